#include "orbitsphere/leaves.hpp"

namespace orbitsphere {

const char* kind_name(Kind k) { return k == Kind::Stable ? "stable" : "unstable"; }

int quadrant_of(const Vec2& dir) {
    int sx = dir.x.sign(), sy = dir.y.sign();
    if (sx == 0 || sy == 0) throw std::logic_error("leaf direction parallel to a tile side");
    if (sx > 0 && sy > 0) return 0;
    if (sx < 0 && sy > 0) return 1;
    if (sx < 0 && sy < 0) return 2;
    return 3;
}

Foliation::Foliation(const Surface& S) {
    slope_[0] = S.stable_slope();
    slope_[1] = S.unstable_slope();
    for (int k = 0; k < 2; ++k) {
        QuadNum denom = slope_[k] - slope_[1 - k];
        fwd_[k] = {QuadNum(1L) / denom, slope_[k] / denom};
    }
    if (quadrant(Kind::Stable, 1) % 2 == quadrant(Kind::Unstable, 1) % 2)
        throw std::invalid_argument("stable and unstable slopes must have opposite signs");
}

int Foliation::quadrant(Kind k, int sigma) const {
    const Vec2& f = forward(k);
    return quadrant_of(sigma > 0 ? f : Vec2{-f.x, -f.y});
}

namespace {
Vec2 corner_of_quadrant(int q) {
    static const long cx[4] = {0, 1, 1, 0};
    static const long cy[4] = {0, 0, 1, 1};
    return {QuadNum(cx[q]), QuadNum(cy[q])};
}
}  // namespace

Leaf Leaves::leaf_at(const CPoint& p, Kind k) {
    if (auto v = C_->as_vertex(p)) return singular_leaf(*v, k);
    Leaf L;
    L.kind = k;
    L.seed = p;
    Vec2 d = C_->dev(p);
    L.level = fol_.level(k, d);
    L.seed_param = fol_.param(k, d);
    L.arms = {Arm{-1, p, -1}, Arm{1, p, -1}};
    return L;
}

Leaf Leaves::singular_leaf(int vertex, Kind k) {
    Leaf L;
    L.kind = k;
    L.vertex = vertex;
    L.seed = {vertex, {QuadNum(0L), QuadNum(0L)}};
    Vec2 d = C_->dev(L.seed);
    L.level = fol_.level(k, d);
    L.seed_param = fol_.param(k, d);
    auto quads = C_->quadrants(vertex);
    int qp = fol_.quadrant(k, 1), qm = fol_.quadrant(k, -1);
    for (int slot = 0; slot < static_cast<int>(quads.size()); ++slot) {
        int q = slot % 4;
        if (q != qp && q != qm) continue;
        L.arms.push_back(Arm{q == qp ? 1 : -1, {quads[slot], corner_of_quadrant(q)}, slot});
    }
    return L;
}

bool Leaves::on_arm(const Leaf& L, int arm, const QuadNum& param) const {
    int s = (param - L.seed_param).sign() * L.arms[arm].sigma;
    return L.at_vertex() ? s > 0 : s >= 0;
}

CPoint Leaves::point_at(const Leaf& L, int arm, const QuadNum& param) {
    QuadNum delta = param - L.seed_param;
    if (delta.sign() == 0) return L.seed;
    if (delta.sign() != L.arms[arm].sigma) throw std::invalid_argument("parameter not on this arm");
    return C_->trace(L.arms[arm].start, delta * fol_.forward(L.kind));
}

void Leaves::trace_arm(const Leaf& L, int arm, const QuadNum& until,
                       const std::function<void(int, const QuadNum&, const QuadNum&)>& piece) {
    const Arm& A = L.arms[arm];
    QuadNum delta = until - L.seed_param;
    if (delta.sign() != A.sigma) return;
    int tile = A.start.tile;
    QuadNum cur = L.seed_param;
    Kind k = L.kind;
    walk_segment(A.start.local, delta * fol_.forward(k), [&](Dir d, const Vec2& exit) {
        const Tile& t = C_->tile(tile);
        Vec2 dv{exit.x + QuadNum(t.X), exit.y + QuadNum(t.Y)};
        QuadNum pe = fol_.param(k, dv);
        if (A.sigma > 0) piece(tile, cur, pe);
        else piece(tile, pe, cur);
        cur = pe;
        tile = C_->neighbor(tile, d);
    });
    if (A.sigma > 0) piece(tile, cur, until);
    else piece(tile, until, cur);
}

std::vector<LeafRay> Leaves::leaf_through(const CPoint& p, Kind k) {
    Leaf L = leaf_at(p, k);
    std::vector<LeafRay> out;
    for (int a = 0; a < static_cast<int>(L.arms.size()); ++a) {
        LeafRay r;
        r.leaf = L;
        r.arm = a;
        r.itinerary = {L.arms[a].start.tile};
        r.end = L.arms[a].start;
        r.end_param = L.seed_param;
        out.push_back(std::move(r));
    }
    return out;
}

LeafRay Leaves::extend_ray(const LeafRay& ray, int steps) {
    LeafRay r = ray;
    const QuadNum one(1L);
    Vec2 dir = fol_.forward(r.leaf.kind);
    if (r.leaf.arms[r.arm].sigma < 0) dir = {-dir.x, -dir.y};
    int sx = dir.x.sign(), sy = dir.y.sign();
    for (int i = 0; i < steps; ++i) {
        Vec2 p = r.end.local;
        QuadNum tx = (sx > 0 ? one - p.x : -p.x) / dir.x;
        QuadNum ty = (sy > 0 ? one - p.y : -p.y) / dir.y;
        int c = (tx - ty).sign();
        if (c == 0) {
            CPoint hit{r.end.tile, p + tx * dir};
            int v = *C_->as_vertex(hit);
            r.terminal_vertex = v;
            throw SingularVertexReached(v);
        }
        QuadNum t = c < 0 ? tx : ty;
        Vec2 q = p + t * dir;
        Dir d;
        if (c < 0) {
            d = sx > 0 ? kRight : kLeft;
            q.x = QuadNum(sx > 0 ? 0L : 1L);
        } else {
            d = sy > 0 ? kUp : kDown;
            q.y = QuadNum(sy > 0 ? 0L : 1L);
        }
        r.end = {C_->neighbor(r.end.tile, d), q};
        r.itinerary.push_back(r.end.tile);
    }
    r.end_param = param_of(r.leaf.kind, r.end);
    return r;
}

std::vector<Slice> Leaves::line_leaves(const CPoint& p, Kind k) {
    Leaf L = leaf_at(p, k);
    std::vector<Slice> out;
    if (!L.singular()) {
        out.push_back({L, 0, 1, false});
        return out;
    }
    int n = static_cast<int>(L.arms.size());
    for (int i = 0; i < n; ++i) out.push_back({L, i, (i + 1) % n, true});
    return out;
}

std::optional<Leaves::Crossing> Leaves::crossing(const Leaf& s, const Leaf& u) {
    if (s.kind != Kind::Stable || u.kind != Kind::Unstable)
        throw std::invalid_argument("crossing expects a stable and an unstable leaf");
    if (s.at_vertex() && u.at_vertex() && s.vertex == u.vertex)
        return Crossing{-1, -1, s.seed_param, u.seed_param, true};
    for (int as = 0; as < static_cast<int>(s.arms.size()); ++as) {
        if (!on_arm(s, as, u.level)) continue;
        CPoint p1 = point_at(s, as, u.level);
        for (int au = 0; au < static_cast<int>(u.arms.size()); ++au) {
            if (!on_arm(u, au, s.level)) continue;
            CPoint p2 = point_at(u, au, s.level);
            if (C_->same_point(p1, p2)) return Crossing{as, au, u.level, s.level, false};
        }
    }
    return std::nullopt;
}

bool Leaves::same_leaf(const Leaf& a, const Leaf& b) {
    if (a.kind != b.kind || a.level != b.level) return false;
    if (a.at_vertex() && b.at_vertex()) return a.vertex == b.vertex;
    const Leaf& probe = a.at_vertex() ? b : a;
    const Leaf& host = a.at_vertex() ? a : b;
    QuadNum p = param_of(probe.kind, probe.seed);
    for (int arm = 0; arm < static_cast<int>(host.arms.size()); ++arm) {
        QuadNum delta = p - host.seed_param;
        if (delta.sign() == 0) return C_->same_point(host.seed, probe.seed);
        if (!on_arm(host, arm, p)) continue;
        if (C_->same_point(point_at(host, arm, p), probe.seed)) return true;
    }
    return false;
}

Leaf Leaves::image(const GroupElem& g, const Leaf& L, std::vector<int>* arm_map) {
    if (!L.at_vertex()) {
        Leaf out = leaf_at(C_->apply(g, L.seed), L.kind);
        if (arm_map) *arm_map = {0, 1};
        return out;
    }
    int v = C_->apply_vertex(g, L.vertex);
    Leaf out = singular_leaf(v, L.kind);
    if (arm_map) {
        arm_map->assign(L.arms.size(), -1);
        for (int a = 0; a < static_cast<int>(L.arms.size()); ++a) {
            QuadNum target = L.seed_param + QuadNum(static_cast<long>(L.arms[a].sigma));
            CPoint img = C_->apply(g, point_at(L, a, target));
            QuadNum pi = param_of(L.kind, img);
            for (int b = 0; b < static_cast<int>(out.arms.size()); ++b) {
                if (!on_arm(out, b, pi)) continue;
                if (C_->same_point(point_at(out, b, pi), img)) {
                    (*arm_map)[a] = b;
                    break;
                }
            }
            if ((*arm_map)[a] < 0) throw std::logic_error("prong image not found");
        }
    }
    return out;
}

}  // namespace orbitsphere
