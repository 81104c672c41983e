#include "orbitsphere/ideal_circle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace orbitsphere {

FlowModel::FlowModel(const FlowSpec& spec, std::size_t budget) : spec_(spec) {
    if (spec.model != "flat") throw std::invalid_argument("flow model requires a flat spec");
    S_ = std::make_unique<Surface>(Surface::from_spec(spec));
    C_ = std::make_unique<Cover>(*S_, budget);
    L_ = std::make_unique<Leaves>(*C_);
}

const char* tri_name(Tri t) {
    switch (t) {
        case Tri::Yes: return "yes";
        case Tri::No: return "no";
        default: return "undecided";
    }
}

const char* class_name(PointClass c) {
    switch (c) {
        case PointClass::SliceNeighborhood: return "slice-neighborhood";
        case PointClass::PerfectFitEndpoint: return "perfect-fit-endpoint";
        case PointClass::NonSeparatedFamily: return "non-separated-family";
        default: return "quadrant";
    }
}

namespace {

long ceil_of(const QuadNum& x) { return -((-x).floor()); }

int mod(int a, int n) { return ((a % n) + n) % n; }

// An endpoint of a path segment: a point on the leaf, or the ideal end of an arm.
struct End {
    int arm = -1;
    bool inf = false;
    QuadNum param;
};

End finite(const PathPoint& p) { return {p.arm, false, p.param}; }
End infinite(int arm) { return {arm, true, QuadNum()}; }

bool is_center(const Leaf& L, const End& e) {
    return L.at_vertex() && !e.inf && e.param == L.seed_param;
}

QuadNum radius_of(const Leaf& L, int arm, const QuadNum& p) {
    return QuadNum(static_cast<long>(L.arms[arm].sigma)) * (p - L.seed_param);
}

bool in_segment(const Leaf& L, const End& x, const End& y, int arm_p, const QuadNum& p) {
    if (!L.at_vertex()) {
        auto ge = [&](const End& e) { return e.inf ? L.arms[e.arm].sigma < 0 : p >= e.param; };
        auto le = [&](const End& e) { return e.inf ? L.arms[e.arm].sigma > 0 : p <= e.param; };
        return (ge(x) && le(y)) || (ge(y) && le(x));
    }
    bool cp = p == L.seed_param;
    bool cx = is_center(L, x), cy = is_center(L, y);
    auto within = [&](const End& e) {
        return e.inf || radius_of(L, arm_p, p) <= radius_of(L, e.arm, e.param);
    };
    if (cx || cy || x.arm != y.arm) {
        if (cp) return true;
        return (!cx && arm_p == x.arm && within(x)) || (!cy && arm_p == y.arm && within(y));
    }
    if (cp || arm_p != x.arm) return false;
    QuadNum r = radius_of(L, arm_p, p);
    auto rad = [&](const End& e) { return radius_of(L, e.arm, e.param); };
    bool above_x = x.inf || r <= rad(x), above_y = y.inf || r <= rad(y);
    bool below_x = !x.inf && r >= rad(x), below_y = !y.inf && r >= rad(y);
    return (below_x && above_y) || (below_y && above_x);
}

// Parameter direction (+1 or -1) of the move from z toward w along L.
int direction(const Leaf& L, const End& z, const End& w) {
    if (!L.at_vertex()) return w.inf ? L.arms[w.arm].sigma : (w.param - z.param).sign();
    int s = L.arms[z.arm].sigma;
    if (is_center(L, w) || w.arm != z.arm) return -s;
    return w.inf ? s : (w.param - z.param).sign();
}

bool same_end(const Leaf& L, const End& a, const End& b) {
    if (a.inf || b.inf) return a.inf && b.inf && a.arm == b.arm;
    if (a.param != b.param) return false;
    return !L.at_vertex() || a.param == L.seed_param || a.arm == b.arm;
}

End segment_start(const PolygonalPath& P, std::size_t i) {
    return i == 0 ? infinite(P.spec.first_arm) : finite(P.on_next[i - 1]);
}

End segment_end(const PolygonalPath& P, std::size_t i) {
    return i + 1 == P.length() ? infinite(P.spec.last_arm) : finite(P.on_prev[i]);
}

}  // namespace

PolygonalPath make_path(Leaves& L, const PathSpec& spec) {
    std::size_t n = spec.leaves.size();
    if (n == 0) throw PathError("a path needs at least one segment");
    auto arm_ok = [](const Leaf& l, int a) { return a >= 0 && a < static_cast<int>(l.arms.size()); };
    if (!arm_ok(spec.leaves.front(), spec.first_arm) || !arm_ok(spec.leaves.back(), spec.last_arm))
        throw PathError("end ray refers to a missing arm");
    if (n == 1 && spec.first_arm == spec.last_arm)
        throw PathError("a single-leaf path needs two distinct arms");
    PolygonalPath P;
    P.spec = spec;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Leaf& a = spec.leaves[i];
        const Leaf& b = spec.leaves[i + 1];
        if (a.kind == b.kind)
            throw PathError("consecutive segments " + std::to_string(i) + " and " + std::to_string(i + 1) +
                            " have the same kind");
        bool a_stable = a.kind == Kind::Stable;
        auto c = a_stable ? L.crossing(a, b) : L.crossing(b, a);
        if (!c)
            throw PathError("consecutive segments " + std::to_string(i) + " and " + std::to_string(i + 1) +
                            " do not intersect");
        PathPoint on_s{c->at_center ? -1 : c->arm_s, c->param_s};
        PathPoint on_u{c->at_center ? -1 : c->arm_u, c->param_u};
        P.on_prev.push_back(a_stable ? on_s : on_u);
        P.on_next.push_back(a_stable ? on_u : on_s);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (same_end(spec.leaves[i], segment_start(P, i), segment_end(P, i)))
            throw PathError("segment " + std::to_string(i) + " is degenerate");
        if (i > 0 && i + 1 < n && P.on_next[i - 1].arm < 0 && P.on_prev[i].arm < 0)
            throw PathError("segment " + std::to_string(i) + " is degenerate");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            const Leaf& a = spec.leaves[i];
            const Leaf& b = spec.leaves[j];
            std::string msg = "segments " + std::to_string(i) + " and " + std::to_string(j) + " intersect";
            if (a.kind == b.kind) {
                if (L.same_leaf(a, b)) throw PathError(msg);
                continue;
            }
            bool a_stable = a.kind == Kind::Stable;
            auto c = a_stable ? L.crossing(a, b) : L.crossing(b, a);
            if (!c) continue;
            int arm_a = c->at_center ? -1 : (a_stable ? c->arm_s : c->arm_u);
            int arm_b = c->at_center ? -1 : (a_stable ? c->arm_u : c->arm_s);
            QuadNum pa = a_stable ? c->param_s : c->param_u;
            QuadNum pb = a_stable ? c->param_u : c->param_s;
            if (in_segment(a, segment_start(P, i), segment_end(P, i), arm_a, pa) &&
                in_segment(b, segment_start(P, j), segment_end(P, j), arm_b, pb))
                throw PathError(msg);
        }
    }
    return P;
}

ConvexResult is_convex(Leaves& L, const PolygonalPath& P) {
    ConvexResult r;
    const Foliation& F = L.foliation();
    for (std::size_t i = 0; i + 1 < P.length(); ++i) {
        const Leaf& a = P.spec.leaves[i];
        const Leaf& b = P.spec.leaves[i + 1];
        End back = segment_start(P, i);
        End out = segment_end(P, i + 1);
        int left, total;
        if (P.on_prev[i].arm < 0) {
            total = static_cast<int>(L.cover().quadrants(a.vertex).size());
            left = mod(a.arms[back.arm].slot - b.arms[out.arm].slot, total);
        } else {
            total = 4;
            int qb = F.quadrant(a.kind, direction(a, finite(P.on_prev[i]), back));
            int qo = F.quadrant(b.kind, direction(b, finite(P.on_next[i]), out));
            left = mod(qb - qo, 4);
        }
        int vi = static_cast<int>(i);
        if (left == 1 && r.left_convex) {
            r.left_convex = false;
            r.left_bad_vertex = vi;
        }
        if (total - left == 1 && r.right_convex) {
            r.right_convex = false;
            r.right_bad_vertex = vi;
        }
    }
    return r;
}

bool SequenceCircle::contained(const std::pair<int, int>& inner, const std::pair<int, int>& outer) const {
    int n = static_cast<int>(circle.size());
    auto rel = [&](int x) { return ((x - outer.first) % n + n) % n; };
    int a = rel(inner.first), b = rel(inner.second), e = rel(outer.second);
    if (e == 0) e = n;
    if (b == 0) b = n;
    return a < b && b <= e;
}

bool SequenceCircle::disjoint(const std::pair<int, int>& a, const std::pair<int, int>& b) const {
    return contained(b, {a.second, a.first});
}

namespace {

int tail_arm(Leaves& L, const RaySpec& r, const Leaf& host) {
    const Leaf& l = r.leaf;
    if (!host.at_vertex()) {
        if (l.at_vertex()) return -1;
        return l.arms[r.arm].sigma < 0 ? 0 : 1;
    }
    if (l.at_vertex()) {
        if (l.vertex != host.vertex) return -1;
        for (int a = 0; a < static_cast<int>(host.arms.size()); ++a)
            if (host.arms[a].slot == l.arms[r.arm].slot) return a;
        return -1;
    }
    Cover& C = L.cover();
    QuadNum p = l.seed_param;
    for (int a = 0; a < static_cast<int>(host.arms.size()); ++a) {
        if (!L.on_arm(host, a, p) || !C.same_point(L.point_at(host, a, p), l.seed)) continue;
        if (l.arms[r.arm].sigma == host.arms[a].sigma) return a;
        if (host.arms.size() == 2) return 1 - a;
        throw std::invalid_argument("ray passes through a singular vertex");
    }
    return -1;
}

// Adds the reference and corner leaves of every tile on the parent chain
// from t back to the base, which keeps the arrangement connected.
void add_connectors(Cover& C, CircleBuilder& B, int t) {
    while (t > 0) {
        B.add_ball_seeds(t, 0);
        t = C.tile(t).parent;
    }
}

int end_position(Leaves& L, const CircleApprox& c, int leaf, const RaySpec& r) {
    int a = tail_arm(L, r, c.leaves[leaf]);
    if (a < 0) throw CircleError("ray not found on its circle leaf");
    return c.pos({leaf, a});
}

}  // namespace

int ray_arm_on(Leaves& L, const RaySpec& r, const Leaf& host) { return tail_arm(L, r, host); }

bool same_tail(FlowModel& M, const RaySpec& a, const RaySpec& b) {
    Leaves& L = M.leaves();
    if (!L.same_leaf(a.leaf, b.leaf)) return false;
    const Leaf& host = b.leaf.at_vertex() ? b.leaf : a.leaf;
    const RaySpec& other = b.leaf.at_vertex() ? a : b;
    const RaySpec& self = b.leaf.at_vertex() ? b : a;
    int x = tail_arm(L, other, host);
    int y = tail_arm(L, self, host);
    return x >= 0 && x == y;
}

SequenceCircle sequence_circle(FlowModel& M, const std::vector<const AdmissibleSequence*>& seqs,
                               const std::vector<RaySpec>& rays, int circle_depth) {
    Leaves& L = M.leaves();
    Cover& C = M.cover();
    CircleBuilder B(L);
    B.add_ball_seeds(C.base(), std::max(0, circle_depth));
    std::vector<std::vector<std::pair<int, int>>> chain_leaves;
    for (const auto* s : seqs) {
        add_connectors(C, B, s->ray.leaf.seed.tile);
        B.add_leaf(s->ray.leaf, s->ray.leaf.at_vertex() ? -1 : s->ray.leaf.seed.tile);
        auto& cl = chain_leaves.emplace_back();
        for (const auto& ch : s->chains) {
            int first = -1, last = -1;
            for (const auto& l : ch.path.spec.leaves) {
                int i = B.add_leaf(l);
                if (first < 0) first = i;
                last = i;
            }
            cl.emplace_back(first, last);
        }
    }
    for (const auto& r : rays) {
        add_connectors(C, B, r.leaf.seed.tile);
        B.add_leaf(r.leaf);
    }
    SequenceCircle out;
    out.circle = B.build();
    const CircleApprox& c = out.circle;
    for (std::size_t si = 0; si < seqs.size(); ++si) {
        const auto* s = seqs[si];
        out.seq_ray_pos.push_back(end_position(L, c, B.find_leaf(s->ray.leaf), s->ray));
        auto& arcs = out.arcs.emplace_back();
        for (std::size_t k = 0; k < s->chains.size(); ++k) {
            const auto& ch = s->chains[k];
            const auto& spec = ch.path.spec;
            int a = end_position(L, c, chain_leaves[si][k].first, {spec.leaves.front(), spec.first_arm});
            int b = end_position(L, c, chain_leaves[si][k].second, {spec.leaves.back(), spec.last_arm});
            arcs.push_back(ch.left ? std::pair(b, a) : std::pair(a, b));
        }
    }
    for (const auto& r : rays) out.ray_pos.push_back(end_position(L, c, B.find_leaf(r.leaf), r));
    return out;
}

namespace {

long escape_bound(const Vec2& D, const Vec2& dir) {
    QuadNum c = (D.x * dir.y - D.y * dir.x).abs();
    QuadNum m = std::max(dir.x.abs(), dir.y.abs());
    return std::max(0L, ceil_of(c / m) - 2);
}

}  // namespace

AdmissibleSequence standard_sequence(FlowModel& M, const RaySpec& ray, int depth, int circle_depth) {
    if (depth < 1) throw std::invalid_argument("standard sequence needs depth >= 1");
    Leaves& L = M.leaves();
    Cover& C = M.cover();
    const Foliation& F = L.foliation();
    const Leaf& R = ray.leaf;
    int sigma = R.arms[ray.arm].sigma;
    Kind tk = other(R.kind);

    struct Piece {
        int tile;
        QuadNum lo, hi;
    };
    std::vector<Piece> pieces;
    long span = 4;
    auto ensure = [&](std::size_t n) {
        while (pieces.size() <= n) {
            span *= 2;
            pieces.clear();
            L.trace_arm(R, ray.arm, R.seed_param + QuadNum(sigma * span),
                        [&](int t, const QuadNum& lo, const QuadNum& hi) { pieces.push_back({t, lo, hi}); });
        }
    };

    static const long fractions[][2] = {{17, 37}, {11, 29}, {23, 41}, {3, 7}, {13, 31}, {5, 19}};
    AdmissibleSequence seq;
    seq.ray = ray;
    std::size_t idx = 1;
    long prev = -1;
    while (static_cast<int>(seq.chains.size()) < depth) {
        if (idx > (1u << 22)) throw BudgetExceeded("no escaping transversal found along the ray");
        ensure(idx);
        const Piece& pc = pieces[idx];
        std::optional<QuadNum> chosen;
        for (const auto& f : fractions) {
            QuadNum p = pc.lo + (pc.hi - pc.lo) * QuadNum(rat(f[0], f[1]));
            if (!level_hits_lattice(F, tk, p)) {
                chosen = p;
                break;
            }
        }
        if (!chosen) {
            idx *= 2;
            continue;
        }
        CPoint P = L.point_at(R, ray.arm, *chosen);
        Vec2 D = C.dev(P);
        long bound = escape_bound(D, F.forward(tk));
        if (bound <= prev) {
            idx *= 2;
            continue;
        }
        Leaf d = L.leaf_at(P, tk);
        Vec2 fd = F.forward(tk);
        Vec2 fr = QuadNum(static_cast<long>(sigma)) * F.forward(R.kind);
        ConvexChain ch;
        ch.path = make_path(L, PathSpec{{d}, 0, 1});
        ch.left = (fd.x * fr.y - fd.y * fr.x).sign() > 0;
        seq.chains.push_back(std::move(ch));
        seq.crossing_params.push_back(*chosen);
        seq.escape_bound.push_back(bound);
        prev = bound;
        idx *= 2;
    }
    seq.escape_ok = true;
    for (std::size_t i = 1; i < seq.escape_bound.size(); ++i)
        if (seq.escape_bound[i] <= seq.escape_bound[i - 1]) seq.escape_ok = false;

    SequenceCircle sc = sequence_circle(M, {&seq}, {}, circle_depth);
    seq.nesting_ok = true;
    for (std::size_t i = 0; i + 1 < seq.chains.size(); ++i) {
        bool ok = sc.contained(sc.arcs[0][i + 1], sc.arcs[0][i]);
        seq.nested.push_back(ok);
        seq.nesting_ok = seq.nesting_ok && ok;
    }
    for (const auto& a : sc.arcs[0])
        if (!sc.in_arc(a, sc.seq_ray_pos[0])) seq.nesting_ok = false;
    return seq;
}

bool is_master(FlowModel& M, const AdmissibleSequence& seq) {
    std::vector<RaySpec> classes;
    std::vector<int> count;
    for (const auto& ch : seq.chains) {
        const auto& sp = ch.path.spec;
        std::vector<int> seen;
        for (RaySpec r : {RaySpec{sp.leaves.front(), sp.first_arm}, RaySpec{sp.leaves.back(), sp.last_arm}}) {
            int hit = -1;
            for (std::size_t c = 0; c < classes.size(); ++c)
                if (same_tail(M, classes[c], r)) hit = static_cast<int>(c);
            if (hit < 0) {
                classes.push_back(r);
                count.push_back(0);
                hit = static_cast<int>(classes.size()) - 1;
            }
            if (std::find(seen.begin(), seen.end(), hit) == seen.end()) {
                seen.push_back(hit);
                if (++count[hit] > 1) return false;
            }
        }
    }
    return true;
}

Tri equivalent_rays(FlowModel& M, const RaySpec& a, const RaySpec& b, int depth) {
    if (same_tail(M, a, b)) return Tri::Yes;
    if (depth < 1) return Tri::Undecided;
    for (int pass = 0; pass < 2; ++pass) {
        const RaySpec& x = pass == 0 ? a : b;
        const RaySpec& y = pass == 0 ? b : a;
        AdmissibleSequence s = standard_sequence(M, x, depth, 0);
        SequenceCircle sc = sequence_circle(M, {&s}, {y}, 0);
        for (const auto& arc : sc.arcs[0])
            if (!sc.in_arc(arc, sc.ray_pos[0])) return Tri::No;
    }
    return Tri::Undecided;
}

IdealPointApprox ideal_point(FlowModel& M, const RaySpec& ray, int depth) {
    IdealPointApprox p;
    p.seq = standard_sequence(M, ray, depth, 0);
    p.master = p.seq.escape_ok && p.seq.nesting_ok && is_master(M, p.seq);
    p.cls = PointClass::SliceNeighborhood;
    return p;
}

Tri same_ideal_point(FlowModel& M, const IdealPointApprox& p, const IdealPointApprox& q, int depth) {
    if (!p.master || !q.master) throw std::invalid_argument("same_ideal_point requires master sequences");
    if (same_tail(M, p.seq.ray, q.seq.ray)) return Tri::Yes;
    SequenceCircle sc = sequence_circle(M, {&p.seq, &q.seq}, {}, 0);
    std::size_t np = std::min<std::size_t>(depth, sc.arcs[0].size());
    std::size_t nq = std::min<std::size_t>(depth, sc.arcs[1].size());
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < nq; ++j)
            if (sc.disjoint(sc.arcs[0][i], sc.arcs[1][j])) return Tri::No;
    return Tri::Undecided;
}

std::vector<int> circular_order(FlowModel& M, const std::vector<RaySpec>& points, int center_tile,
                                int circle_depth) {
    Leaves& L = M.leaves();
    Cover& C = M.cover();
    CircleBuilder B(L);
    B.add_ball_seeds(center_tile, std::max(0, circle_depth));
    add_connectors(C, B, center_tile);
    for (const auto& r : points) {
        add_connectors(C, B, r.leaf.seed.tile);
        B.add_leaf(r.leaf);
    }
    CircleApprox c = B.build();
    std::vector<int> pos;
    for (const auto& r : points) pos.push_back(end_position(L, c, B.find_leaf(r.leaf), r));
    std::vector<int> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return pos[a] < pos[b]; });
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (pos[idx[i]] == pos[idx[i - 1]]) throw CircleError("ideal points not certified distinct");
    auto zero = std::find(idx.begin(), idx.end(), 0);
    std::rotate(idx.begin(), zero, idx.end());
    return idx;
}

bool detect_product_region(FlowModel& M, int depth) {
    if (depth <= 0) return false;
    CircleBuilder B(M.leaves());
    B.add_ball_seeds(M.cover().base(), depth);
    CircleApprox c = B.build();
    std::size_t ns = 0, nu = 0;
    for (const auto& l : c.leaves) (l.kind == Kind::Stable ? ns : nu)++;
    return ns > 0 && nu > 0 && c.crossings.size() == ns * nu;
}

BoundarySample boundary_sample(FlowModel& M, int depth, std::size_t count) {
    BoundarySample out;
    out.depth = std::max(0, depth);
    for (;;) {
        CircleBuilder B(M.leaves());
        B.add_ball_seeds(M.cover().base(), out.depth);
        out.circle = B.build();
        if (out.circle.size() >= count || out.depth >= 12) break;
        ++out.depth;
    }
    out.product = detect_product_region(M, std::max(1, out.depth));
    const CircleApprox& c = out.circle;
    auto type = [&](const EndRef& e) {
        const Leaf& l = c.leaves[e.leaf];
        return 2 * static_cast<int>(l.kind) + (l.arms[e.arm].sigma > 0 ? 1 : 0);
    };
    int id = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        out.points.push_back({id++, PointClass::SliceNeighborhood, c.order[i]});
        if (out.product && type(c.order[i]) != type(c.order[(i + 1) % c.size()]))
            out.points.push_back({id++, PointClass::Quadrant, std::nullopt});
    }
    return out;
}

// True when a leaf of kind k at this level would pass through a lattice point
// of the developing image, i.e. possibly through a cone vertex.
bool level_hits_lattice(const Foliation& F, Kind k, const QuadNum& level) {
    const QuadNum& s = F.slope(k);
    if (s.b() == 0) return true;
    Rational X = -level.b() / s.b();
    X.canonicalize();
    if (X.get_den() != 1) return false;
    Rational Y = level.a() + s.a() * X;
    Y.canonicalize();
    return Y.get_den() == 1;
}

std::vector<CPoint> fixed_points_in_ball(FlowModel& M, const GroupElem& g, int radius) {
    std::vector<CPoint> fixed;
    if (g.power == 0) return fixed;
    Cover& C = M.cover();
    C.build_ball(radius);
    Mat2 A = C.derivative(g);
    // The lift fixes the base vertex at the origin and deck elements translate.
    Vec2 b{QuadNum(0L), QuadNum(0L)};
    if (!g.fiber.empty()) {
        int t = C.tile_of_word(g.fiber);
        b = {QuadNum(C.tile(t).X), QuadNum(C.tile(t).Y)};
    }
    long det = (1 - A.a) * (1 - A.d) - A.b * A.c;
    if (det == 0) return fixed;
    QuadNum inv(rat(1, det));
    Vec2 x{inv * (QuadNum(1 - A.d) * b.x + QuadNum(A.b) * b.y), inv * (QuadNum(A.c) * b.x + QuadNum(1 - A.a) * b.y)};
    long X = x.x.floor(), Y = x.y.floor();
    Vec2 local{x.x - QuadNum(X), x.y - QuadNum(Y)};
    bool on_boundary = local.x.sign() == 0 || local.y.sign() == 0;
    std::vector<CPoint> checked;
    // g P = P  iff  F^n1 P = F^-n2 k^-1 P with n = n1 + n2.
    long n1 = g.power / 2, n2 = g.power - n1;
    for (int lab = 0; lab < M.surface().size(); ++lab) {
        for (int cand : C.tiles_at(X, Y, lab)) {
            int dc = C.tile(cand).dist;
            if (dc < 0 || dc > radius) continue;
            CPoint P{cand, local};
            if (on_boundary) {
                bool seen = false;
                for (const auto& q : checked) seen = seen || C.same_point(q, P);
                if (seen) continue;
                checked.push_back(P);
            }
            CPoint lhs = C.apply(GroupElem{{}, n1}, P);
            CPoint rhs = C.apply(GroupElem{{}, -n2}, C.apply(GroupElem{inverse(g.fiber), 0}, P));
            if (!C.same_point(lhs, rhs)) continue;
            bool dup = false;
            for (const auto& f : fixed) dup = dup || C.same_point(f, P);
            if (!dup) fixed.push_back(P);
        }
    }
    return fixed;
}

std::vector<PerfectFit> detect_perfect_fits(FlowModel& M, int depth, int max_word_length) {
    std::vector<PerfectFit> out;
    if (depth <= 0) return out;
    Cover& C = M.cover();
    int radius = std::min(depth, max_word_length);
    C.build_ball(radius);
    for (int t : C.ball_tiles(radius)) {
        if (C.tile(t).label != 0) continue;
        Word w = C.element_of(t);
        long room = max_word_length - static_cast<long>(w.size());
        for (long n = -room; n <= room; ++n) {
            if (n == 0) continue;
            GroupElem g{w, n};
            auto fixed = fixed_points_in_ball(M, g, radius);
            if (fixed.size() < 2) continue;
            PerfectFit pf;
            pf.certificate = element_string(g);
            for (const auto& f : fixed) {
                pf.fixed_tiles.push_back(f.tile);
                pf.fixed.push_back("tile " + std::to_string(f.tile));
            }
            out.push_back(std::move(pf));
        }
    }
    return out;
}

LemmaVerdict fundamental_lemma_verdict(const std::vector<bool>& regions_meet, const std::vector<bool>& e_meets_r,
                                       const std::vector<bool>& f_meets_l) {
    LemmaVerdict v;
    std::size_t n = std::min({regions_meet.size(), e_meets_r.size(), f_meets_l.size()});
    if (n == 0) return v;
    for (std::size_t i = 0; i < n; ++i)
        if (!regions_meet[i] || !e_meets_r[i] || !f_meets_l[i]) return v;
    v.consistent = false;
    std::ostringstream os;
    os << "forbidden configuration persists at all " << n
       << " computed depths: regions meet, e_i meets r and f_i meets l";
    v.diagnostic = os.str();
    return v;
}

LemmaVerdict fundamental_lemma_check(FlowModel& M, const AdmissibleSequence& E, const AdmissibleSequence& F,
                                     const RaySpec& l, const RaySpec& r, int circle_depth) {
    SequenceCircle sc = sequence_circle(M, {&E, &F}, {l, r}, circle_depth);
    std::size_t n = std::min(sc.arcs[0].size(), sc.arcs[1].size());
    std::vector<bool> meet, er, fl;
    for (std::size_t i = 0; i < n; ++i) {
        meet.push_back(!sc.disjoint(sc.arcs[0][i], sc.arcs[1][i]));
        er.push_back(sc.in_arc(sc.arcs[0][i], sc.ray_pos[1]));
        fl.push_back(sc.in_arc(sc.arcs[1][i], sc.ray_pos[0]));
    }
    LemmaVerdict v = fundamental_lemma_verdict(meet, er, fl);
    if (!v.consistent) throw InconsistencyError(v.diagnostic);
    return v;
}

}  // namespace orbitsphere
