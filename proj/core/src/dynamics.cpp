#include "orbitsphere/dynamics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

#include "orbitsphere/sphere_quotient.hpp"

namespace orbitsphere {

namespace {

bool is_twist_token(const std::string& t) {
    return !t.empty() && (t[0] == 'H' || t[0] == 'V') &&
           std::all_of(t.begin() + 1, t.end(), [](unsigned char c) { return std::isdigit(c); });
}

CPoint apply_times(Cover& C, const GroupElem& g, long j, CPoint p) {
    GroupElem step = j >= 0 ? g : C.inverse(g);
    for (long i = 0; i < std::labs(j); ++i) p = C.apply(step, p);
    return p;
}

Leaf image_times(Leaves& L, const GroupElem& g, long j, Leaf leaf, std::vector<int>& arm_map) {
    GroupElem step = j >= 0 ? g : L.cover().inverse(g);
    arm_map.resize(leaf.arms.size());
    for (std::size_t a = 0; a < arm_map.size(); ++a) arm_map[a] = static_cast<int>(a);
    for (long i = 0; i < std::labs(j); ++i) {
        std::vector<int> m;
        leaf = L.image(step, leaf, &m);
        for (auto& a : arm_map) a = m[a];
    }
    return leaf;
}

// Factor by which g stretches the parameter along leaves of kind k.
QuadNum stretch(const Cover& C, const Foliation& F, const GroupElem& g, Kind k) {
    Vec2 f = F.forward(k);
    Vec2 img = C.derivative(g).apply(f);
    return f.x.sign() != 0 ? img.x / f.x : img.y / f.y;
}

QuadNum qpow(QuadNum x, int n) {
    QuadNum r(1L);
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

QuadNum avoid_lattice(const Foliation& F, Kind k, QuadNum p, int sigma) {
    while (level_hits_lattice(F, k, p)) p += QuadNum(rat(sigma, 97));
    return p;
}

void connect(Cover& C, CircleBuilder& B, int t) {
    while (t > 0) {
        B.add_ball_seeds(t, 0);
        t = C.tile(t).parent;
    }
}

int cyclic_gap(int a, int b, int n) {
    int d = std::abs(a - b);
    return std::min(d, n - d);
}

struct Sample {
    int end = 0;  // index into the fixed-end list
    QuadNum r;
    CPoint q;
    QuadNum predicted_param;
    int leaf = -1;
};

}  // namespace

GroupElem parse_element(FlowModel& M, const std::string& text) {
    Cover& C = M.cover();
    GroupElem out = identity_element();
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        long exp = 1;
        std::string name = tok;
        if (auto caret = tok.find('^'); caret != std::string::npos) {
            name = tok.substr(0, caret);
            try {
                std::size_t used = 0;
                exp = std::stol(tok.substr(caret + 1), &used);
                if (used != tok.size() - caret - 1) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw std::invalid_argument("bad exponent in '" + tok + "'");
            }
        }
        GroupElem g;
        if (name == "e") {
            g = identity_element();
        } else if (name.size() > 2 && name.front() == '[' && name.back() == ']') {
            Word w = parse_word(name.substr(1, name.size() - 2));
            if (!C.is_deck(w)) throw std::invalid_argument("word " + name + " is not a closed loop");
            g = deck_element(C.group().reduce(w));
        } else {
            const GeneratorDecl* decl = nullptr;
            for (const auto& d : M.spec().generators)
                if (d.name == name) decl = &d;
            if (!decl) throw std::invalid_argument("unknown generator '" + name + "'");
            if (std::all_of(decl->tokens.begin(), decl->tokens.end(), is_twist_token)) {
                if (decl != M.spec().monodromy())
                    throw std::invalid_argument("generator '" + name + "' is not the monodromy");
                g = monodromy_element();
            } else {
                std::string letters;
                for (const auto& t : decl->tokens) letters += t;
                Word w = parse_word(letters);
                if (!C.is_deck(w)) throw std::invalid_argument("generator '" + name + "' is not a closed loop");
                g = deck_element(C.group().reduce(w));
            }
        }
        out = C.compose(out, C.power(g, exp));
    }
    return out;
}

const char* element_kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::Identity: return "identity";
        case ElementKind::PeriodicSingular: return "periodic-singular";
        case ElementKind::PeriodicRegular: return "periodic-regular";
        case ElementKind::Free: return "free";
        case ElementKind::UndecidedAtRadius: return "undecided-at-radius";
    }
    return "?";
}

std::string ElementClass::name() const {
    if (kind == ElementKind::PeriodicSingular) return std::string("periodic-singular(") + std::to_string(prongs) + ")";
    return element_kind_name(kind);
}

ElementClass classify_element(FlowModel& M, const GroupElem& g, int radius) {
    ElementClass out;
    Cover& C = M.cover();
    Leaves& L = M.leaves();
    if (g.power == 0 && C.group().is_trivial(g.fiber)) {
        out.kind = ElementKind::Identity;
        out.all_fixed = true;
        out.witness = "identity fixes every point";
        return out;
    }
    if (g.power != 0) {
        out.fixed = fixed_points_in_ball(M, g, radius);
        if (out.fixed.empty()) {
            out.witness = "no fixed point within radius " + std::to_string(radius);
            return out;
        }
        auto v = C.as_vertex(out.fixed[0]);
        if (v && M.surface().prongs() > 2) {
            out.kind = ElementKind::PeriodicSingular;
            out.prongs = M.surface().prongs();
            out.vertex = v;
        } else {
            out.kind = ElementKind::PeriodicRegular;
            out.prongs = 2;
            if (v) out.vertex = v;
        }
        out.witness = "fixed point in tile " + std::to_string(out.fixed[0].tile);
        if (out.fixed.size() > 1) out.witness += " and " + std::to_string(out.fixed.size() - 1) + " more";
        return out;
    }
    // Deck translations act freely; look for a leaf that g moves along an axis.
    for (Kind k : {Kind::Stable, Kind::Unstable}) {
        try {
            Leaf l0 = L.leaf_at(C.reference(C.base()), k);
            std::vector<int> m;
            Leaf l1 = L.image(g, l0, &m);
            Leaf l2 = L.image(g, l1, &m);
            if (L.same_leaf(l0, l1)) continue;
            CircleBuilder B(L);
            B.add_ball_seeds(C.base(), 0);
            connect(C, B, l1.seed.tile);
            connect(C, B, l2.seed.tile);
            int i0 = B.add_leaf(l0), i1 = B.add_leaf(l1), i2 = B.add_leaf(l2);
            CircleApprox c = B.build();
            if (c.leaves[i1].arms.size() != 2) continue;
            int a = c.pos({i1, 0}), b = c.pos({i1, 1});
            auto inside = [&](int li) {
                int n = 0;
                for (std::size_t e = 0; e < c.leaves[li].arms.size(); ++e)
                    n += c.between(a, c.pos({li, static_cast<int>(e)}), b) ? 1 : 0;
                return n;
            };
            int n0 = inside(i0), n2 = inside(i2);
            int s0 = static_cast<int>(c.leaves[i0].arms.size()), s2 = static_cast<int>(c.leaves[i2].arms.size());
            bool split = (n0 == s0 && n2 == 0) || (n0 == 0 && n2 == s2);
            if (split) {
                out.kind = ElementKind::Free;
                out.axis = l0;
                out.witness = std::string(kind_name(k)) + " leaf through the base separates from its second image";
                return out;
            }
        } catch (const BudgetExceeded&) {
        } catch (const OutsideBall&) {
        } catch (const CircleError&) {
        }
    }
    out.witness = "no axis leaf found within radius " + std::to_string(radius);
    return out;
}

FixedPointReport fixed_points_on_circle(FlowModel& M, const GroupElem& g, int depth) {
    FixedPointReport rep;
    rep.element = g;
    Cover& C = M.cover();
    Leaves& L = M.leaves();
    const Foliation& F = L.foliation();
    ElementClass cls = classify_element(M, g, depth);
    if (cls.kind != ElementKind::PeriodicSingular && cls.kind != ElementKind::PeriodicRegular) {
        rep.note = "element is " + cls.name() + ": " + cls.witness;
        return rep;
    }
    rep.center = cls.fixed[0];
    rep.prongs = cls.prongs;
    rep.stable_leaf = L.leaf_at(rep.center, Kind::Stable);
    rep.unstable_leaf = L.leaf_at(rep.center, Kind::Unstable);

    std::vector<int> perm;
    Leaf img = image_times(L, g, 1, rep.stable_leaf, perm);
    if (!L.same_leaf(img, rep.stable_leaf)) {
        rep.status = Tri::No;
        rep.note = "stable leaf through the fixed point is not invariant";
        return rep;
    }
    std::vector<int> acc(perm.size());
    for (std::size_t a = 0; a < acc.size(); ++a) acc[a] = static_cast<int>(a);
    long j = 0;
    for (long e = 1; e <= 4L * std::max(2, rep.prongs); ++e) {
        for (auto& a : acc) a = perm[a];
        bool id = true;
        for (std::size_t a = 0; a < acc.size(); ++a) id = id && acc[a] == static_cast<int>(a);
        if (id) {
            j = e;
            break;
        }
    }
    if (j == 0) {
        rep.note = "no prong-preserving power found";
        return rep;
    }
    rep.exponent = j;
    rep.power = C.power(g, j);
    std::vector<int> um;
    Leaf uimg = image_times(L, g, j, rep.unstable_leaf, um);
    bool u_ok = L.same_leaf(uimg, rep.unstable_leaf);
    for (std::size_t a = 0; a < um.size(); ++a) u_ok = u_ok && um[a] == static_cast<int>(a);
    if (!u_ok) {
        rep.status = Tri::No;
        rep.note = "power does not fix the unstable prongs";
        return rep;
    }
    QuadNum cs = stretch(C, F, rep.power, Kind::Stable);
    QuadNum cu = stretch(C, F, rep.power, Kind::Unstable);
    rep.expanded = cs > QuadNum(1L) ? Kind::Stable : Kind::Unstable;
    rep.factor = rep.expanded == Kind::Stable ? cs : cu;

    CircleBuilder B(L);
    B.add_ball_seeds(C.base(), depth);
    connect(C, B, rep.center.tile);
    int iS = B.add_leaf(rep.stable_leaf);
    int iU = B.add_leaf(rep.unstable_leaf);

    struct EndSpec {
        Kind kind;
        int arm;
        const Leaf* leaf;
    };
    std::vector<EndSpec> specs;
    for (Kind k : {Kind::Stable, Kind::Unstable}) {
        const Leaf& lf = k == Kind::Stable ? rep.stable_leaf : rep.unstable_leaf;
        for (int a = 0; a < static_cast<int>(lf.arms.size()); ++a) specs.push_back({k, a, &lf});
    }
    const int per_end = 10;
    std::vector<Sample> samples;
    for (int e = 0; e < static_cast<int>(specs.size()); ++e) {
        const EndSpec& s = specs[e];
        const Leaf& lf = *s.leaf;
        int sg = lf.arms[s.arm].sigma;
        bool attracting = s.kind == rep.expanded;
        // Under the power (attracting end) or its inverse (repelling end) the
        // arm is stretched by this factor.
        QuadNum mu = attracting ? rep.factor : QuadNum(1L) / (s.kind == Kind::Stable ? cs : cu);
        for (int i = 0; i < per_end; ++i) {
            QuadNum p = avoid_lattice(F, other(s.kind), lf.seed_param + QuadNum(rat(sg * (i + 1), 8)), sg);
            Sample smp;
            smp.end = e;
            smp.r = (p - lf.seed_param).abs();
            smp.q = L.point_at(lf, s.arm, p);
            smp.predicted_param = lf.seed_param + QuadNum(static_cast<long>(sg)) * mu * smp.r;
            smp.leaf = B.add_leaf(L.leaf_at(smp.q, other(s.kind)));
            samples.push_back(smp);
        }
    }
    CircleApprox c = B.build();
    rep.circle_size = c.size();
    const int N = static_cast<int>(c.size());

    QuadNum zs = F.level(Kind::Stable, C.dev(rep.center));
    QuadNum zu = F.level(Kind::Unstable, C.dev(rep.center));
    for (std::size_t li = 0; li < c.leaves.size(); ++li) {
        const Leaf& lf = c.leaves[li];
        const QuadNum& zl = lf.kind == Kind::Stable ? zs : zu;
        if (lf.level != zl) continue;
        if (L.same_leaf(lf, lf.kind == Kind::Stable ? rep.stable_leaf : rep.unstable_leaf))
            rep.fixed_leaf_ends += lf.arms.size();
    }

    std::vector<int> end_pos(specs.size());
    for (std::size_t e = 0; e < specs.size(); ++e) {
        int host = specs[e].kind == Kind::Stable ? iS : iU;
        int a = ray_arm_on(L, {*specs[e].leaf, specs[e].arm}, c.leaves[host]);
        end_pos[e] = a >= 0 ? c.pos({host, a}) : -1;
        rep.ends.push_back({specs[e].kind, specs[e].arm, end_pos[e], specs[e].kind == rep.expanded});
    }
    std::sort(rep.ends.begin(), rep.ends.end(),
              [](const FixedEnd& x, const FixedEnd& y) { return x.position < y.position; });
    rep.alternating = !rep.ends.empty() && rep.ends.front().position >= 0;
    for (std::size_t i = 0; i < rep.ends.size(); ++i)
        rep.alternating = rep.alternating && rep.ends[i].kind != rep.ends[(i + 1) % rep.ends.size()].kind;

    rep.nesting_ok = true;
    for (std::size_t e = 0; e < specs.size(); ++e) {
        std::pair<int, int> prev{N, N};
        for (const auto& s : samples) {
            if (s.end != static_cast<int>(e)) continue;
            const Leaf& tl = c.leaves[s.leaf];
            std::vector<int> gaps;
            for (int a = 0; a < static_cast<int>(tl.arms.size()); ++a)
                gaps.push_back(cyclic_gap(c.pos({s.leaf, a}), end_pos[e], N));
            std::sort(gaps.begin(), gaps.end());
            std::pair<int, int> cur{gaps.front(), gaps.back()};
            if (!(cur.first < prev.first && cur.second < prev.second)) rep.nesting_ok = false;
            prev = cur;
        }
    }

    const QuadNum cell = QuadNum(rat(1, std::max(1, N)));
    for (const auto& s : samples) {
        const EndSpec& es = specs[s.end];
        bool attracting = es.kind == rep.expanded;
        rep.neighbors += 2;
        CPoint moved = apply_times(C, g, attracting ? j : -j, s.q);
        bool step = C.same_point(moved, L.point_at(*es.leaf, es.arm, s.predicted_param));
        if (!step) continue;
        rep.step_checked += 2;
        QuadNum mu = (s.predicted_param - es.leaf->seed_param).abs() / s.r;
        QuadNum prev = QuadNum(1L) / (QuadNum(1L) + s.r);
        bool mono = true;
        QuadNum d = prev;
        for (int m = 1; m <= rep.iterations; ++m) {
            d = QuadNum(1L) / (QuadNum(1L) + qpow(mu, m) * s.r);
            mono = mono && d < prev;
            prev = d;
        }
        if (mono && d < cell) rep.converged += 2;
    }

    std::size_t expected = 2 * static_cast<std::size_t>(rep.prongs);
    bool ok = rep.ends.size() == expected && rep.fixed_leaf_ends == expected && rep.alternating &&
              rep.nesting_ok && rep.converged == rep.neighbors;
    rep.status = ok ? Tri::Yes : Tri::No;
    if (!ok) {
        std::ostringstream os;
        os << "ends " << rep.ends.size() << "/" << expected << ", fixed leaf ends " << rep.fixed_leaf_ends
           << ", alternating " << rep.alternating << ", nesting " << rep.nesting_ok << ", converged "
           << rep.converged << "/" << rep.neighbors;
        rep.note = os.str();
    }
    return rep;
}

SourceSinkReport source_sink_on_sphere(FlowModel& M, const GroupElem& g, int depth, std::size_t grid) {
    SourceSinkReport rep;
    rep.element = g;
    FixedPointReport fp = fixed_points_on_circle(M, g, depth);
    if (fp.status != Tri::Yes) {
        rep.note = "fixed points not certified: " + fp.note;
        return rep;
    }
    Cover& C = M.cover();
    Leaves& L = M.leaves();
    const Foliation& F = L.foliation();
    Kind E = fp.expanded;
    Kind K = other(E);
    const Leaf& LE = E == Kind::Stable ? fp.stable_leaf : fp.unstable_leaf;
    const Leaf& LC = E == Kind::Stable ? fp.unstable_leaf : fp.stable_leaf;
    QuadNum cE = fp.factor;
    QuadNum cC = stretch(C, F, fp.power, K);
    rep.source_kind = K;
    rep.source_leaf = LC;
    rep.sink_leaf = LE;

    CircleBuilder B(L);
    B.add_ball_seeds(C.base(), depth);
    connect(C, B, fp.center.tile);
    int iE = B.add_leaf(LE);
    int iC = B.add_leaf(LC);

    struct GridPoint {
        const Leaf* host;
        int arm;
        bool on_expanded;
        QuadNum r, predicted;
        CPoint q;
        int leaf;
    };
    std::vector<std::pair<const Leaf*, int>> arms;
    for (int a = 0; a < static_cast<int>(LE.arms.size()); ++a) arms.emplace_back(&LE, a);
    for (int a = 0; a < static_cast<int>(LC.arms.size()); ++a) arms.emplace_back(&LC, a);
    std::vector<GridPoint> pts;
    for (std::size_t ai = 0; ai < arms.size(); ++ai) {
        std::size_t count = grid / arms.size() + (ai < grid % arms.size() ? 1 : 0);
        const Leaf& host = *arms[ai].first;
        int a = arms[ai].second;
        int sg = host.arms[a].sigma;
        bool on_e = &host == &LE;
        for (std::size_t i = 0; i < count; ++i) {
            // Parameters in [1/2, 2] keep the grid away from the source.
            QuadNum r(rat(1, 2) + rat(3 * static_cast<long>(i), 2 * static_cast<long>(std::max<std::size_t>(1, count - 1))));
            QuadNum p = avoid_lattice(F, other(host.kind), host.seed_param + QuadNum(static_cast<long>(sg)) * r, sg);
            GridPoint gp{&host, a, on_e, (p - host.seed_param).abs(), {}, L.point_at(host, a, p), -1};
            gp.predicted = host.seed_param + QuadNum(static_cast<long>(sg)) * (on_e ? cE : cC) * gp.r;
            gp.leaf = B.add_leaf(L.leaf_at(gp.q, other(host.kind)));
            pts.push_back(gp);
        }
    }
    CircleApprox c = B.build();
    ChordSystem cs = gluing_pairs(c);
    QuotientComplex q = build_quotient(cs);
    rep.vertex_count = q.vertex_count();
    auto class_of_leaf = [&](int li) {
        int cl = q.class_of[c.pos({li, 0})];
        for (int a = 1; a < static_cast<int>(c.leaves[li].arms.size()); ++a)
            if (q.class_of[c.pos({li, a})] != cl) return -1;
        return cl;
    };
    rep.sink = class_of_leaf(iE);
    rep.source = class_of_leaf(iC);
    rep.distinct = rep.sink >= 0 && rep.source >= 0 && rep.sink != rep.source;

    const QuadNum cell = QuadNum(rat(1, std::max<long>(1, static_cast<long>(c.size()))));
    const QuadNum one(1L);
    for (const auto& gp : pts) {
        ++rep.grid;
        int cl = class_of_leaf(gp.leaf);
        if (cl == rep.source || cl == rep.sink) continue;
        CPoint moved = apply_times(C, g, fp.exponent, gp.q);
        if (!C.same_point(moved, L.point_at(*gp.host, gp.arm, gp.predicted))) continue;
        ++rep.step_checked;
        QuadNum mu = gp.on_expanded ? cE : cC;
        auto dist = [&](const QuadNum& r) { return gp.on_expanded ? one / (one + r) : r / (one + r); };
        QuadNum prev = dist(gp.r), d = prev;
        bool mono = true;
        for (int m = 1; m <= fp.iterations; ++m) {
            d = dist(qpow(mu, m) * gp.r);
            mono = mono && d < prev;
            prev = d;
        }
        if (mono && d < cell) ++rep.contracted;
    }
    rep.status = rep.distinct && rep.contracted == rep.grid ? Tri::Yes : Tri::No;
    if (rep.status != Tri::Yes) {
        std::ostringstream os;
        os << "distinct " << rep.distinct << ", contracted " << rep.contracted << "/" << rep.grid;
        rep.note = os.str();
    }
    return rep;
}

std::vector<PeriodicEntry> periodic_table(FlowModel& M, int radius, int max_len) {
    std::vector<PeriodicEntry> out;
    Cover& C = M.cover();
    int r = std::min(radius, max_len);
    C.build_ball(r);
    for (int t : C.ball_tiles(r)) {
        if (C.tile(t).label != 0) continue;
        Word w = C.element_of(t);
        int len = C.tile(t).dist;
        for (long n = -(max_len - len); n <= max_len - len; ++n) {
            if (n == 0) continue;
            GroupElem g{w, n};
            auto fixed = fixed_points_in_ball(M, g, radius);
            if (fixed.size() != 1) continue;
            out.push_back({g, fixed[0], len + static_cast<int>(std::labs(n))});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const PeriodicEntry& a, const PeriodicEntry& b) { return a.length < b.length; });
    return out;
}

namespace {

ConicalWitness periodic_leaf_witness(FlowModel& M, const RaySpec& x, int depth, int max_len) {
    ConicalWitness w;
    w.method = "periodic-leaf";
    Cover& C = M.cover();
    Leaves& L = M.leaves();
    const Foliation& F = L.foliation();
    const Leaf& lf = x.leaf;
    for (const auto& pe : periodic_table(M, depth, max_len)) {
        if (F.level(lf.kind, C.dev(pe.fixed)) != lf.level) continue;
        if (!L.same_leaf(L.leaf_at(pe.fixed, lf.kind), lf)) continue;
        FixedPointReport fp = fixed_points_on_circle(M, pe.g, std::min(depth, 2));
        if (fp.status != Tri::Yes) {
            w.note = "fixing element " + element_string(pe.g) + " not certified: " + fp.note;
            continue;
        }
        // Use the direction in which the leaf of x repels.
        long dir = lf.kind == fp.expanded ? -1 : 1;
        GroupElem h = dir > 0 ? fp.power : C.inverse(fp.power);
        for (long i = 1; i <= 3; ++i) w.sequence.push_back(C.power(h, i));
        w.a = std::string("class of the ") + kind_name(lf.kind) + " leaf through the fixed point of " +
              element_string(pe.g);
        w.b = std::string("class of the ") + kind_name(other(lf.kind)) + " leaf through the same point";
        w.status = Tri::Yes;
        return w;
    }
    if (w.note.empty()) w.note = "no periodic element of length <= " + std::to_string(max_len) + " fixes the leaf";
    return w;
}

ConicalWitness translates_witness(FlowModel& M, const QuotientPoint& x, int depth) {
    ConicalWitness w;
    w.method = "translates";
    Cover& C = M.cover();
    Leaves& L = M.leaves();
    const Foliation& F = L.foliation();
    Vec2 v;
    Kind sk = Kind::Stable;
    if (x.end) {
        const Leaf& lf = x.end->leaf;
        int sg = lf.arms[x.end->arm].sigma;
        v = QuadNum(static_cast<long>(sg)) * F.forward(lf.kind);
        sk = other(lf.kind);
    } else {
        v = *x.direction;
    }
    auto point_at = [&](long m) -> CPoint {
        if (x.end) {
            const Leaf& lf = x.end->leaf;
            int sg = lf.arms[x.end->arm].sigma;
            return L.point_at(lf, x.end->arm, lf.seed_param + QuadNum(sg * 2 * m));
        }
        return C.trace(C.reference(C.base()), QuadNum(2 * m) * v);
    };
    QuadNum vs = F.level(sk, v);
    if (vs.sign() == 0) {
        w.note = "direction is parallel to the separating foliation";
        return w;
    }
    const int terms = 6;
    int valid = 0, clean_tail = 0;
    std::map<int, int> home;  // label -> tile near the base
    for (int r = 1; static_cast<int>(home.size()) < M.surface().size() && r <= M.surface().size(); ++r) {
        C.build_ball(r);
        for (int t : C.ball_tiles(r)) home.emplace(C.tile(t).label, t);
    }
    for (long m = 1; m <= terms; ++m) {
        try {
            CPoint P = point_at(m);
            auto h = home.find(C.tile(P.tile).label);
            if (h == home.end()) continue;
            Word k = C.group().reduce(concat(C.element_of(h->second), inverse(C.element_of(P.tile))));
            GroupElem gm = deck_element(k);
            CPoint Q = C.apply(gm, P);
            if (!C.same_point(Q, CPoint{h->second, P.local})) continue;
            Leaf S = L.leaf_at(C.reference(h->second), sk);
            QuadNum s = (S.level - F.level(sk, C.dev(Q))) / vs;
            if (s <= QuadNum(-2 * m)) continue;
            CPoint Y = C.trace(Q, s * v);
            if (!L.same_leaf(L.leaf_at(Y, sk), S)) continue;
            // The translate of S back along the ray: every sampled end other
            // than x should lie on the base side of it.
            std::vector<int> am;
            Leaf back = L.image(C.inverse(gm), S, &am);
            CircleBuilder B(L);
            B.add_ball_seeds(C.base(), std::min(depth, 1));
            connect(C, B, back.seed.tile);
            int ib = B.add_leaf(back);
            int i0 = B.add_leaf(L.leaf_at(C.reference(C.base()), sk));
            int ix = x.end ? B.add_leaf(x.end->leaf) : -1;
            CircleApprox c = B.build();
            if (ib == i0 || c.leaves[ib].arms.size() != 2) continue;
            int e0 = c.pos({ib, 0}), e1 = c.pos({ib, 1});
            bool base_inside = c.between(e0, c.pos({i0, 0}), e1);
            int xa = ix >= 0 ? ray_arm_on(L, *x.end, c.leaves[ix]) : -1;
            // Connector leaves only keep the arrangement connected; the sample
            // is the set of leaves seeded near the base.
            CircleBuilder sample(L);
            sample.add_ball_seeds(C.base(), std::min(depth, 1));
            bool clean = true;
            for (const auto& sl : sample.leaves()) {
                int li = B.find_leaf(sl);
                if (li < 0 || li == ib) continue;
                for (int a = 0; a < static_cast<int>(c.leaves[li].arms.size()); ++a) {
                    if (li == ix && a == xa) continue;
                    if (c.between(e0, c.pos({li, a}), e1) != base_inside) clean = false;
                }
            }
            ++valid;
            clean_tail = clean ? clean_tail + 1 : 0;
            w.sequence.push_back(gm);
        } catch (const NonGenericPath&) {
        } catch (const BudgetExceeded&) {
        } catch (const OutsideBall&) {
        } catch (const CircleError&) {
        }
    }
    if (valid >= 3 && clean_tail >= 2) {
        w.status = Tri::Yes;
        w.a = "forward end of the translated ray, beyond a leaf through a fixed tile";
        w.b = "limit of the translated base, behind the same leaf";
    } else {
        w.note = "translates: " + std::to_string(valid) + " valid terms, clean tail " + std::to_string(clean_tail);
    }
    return w;
}

}  // namespace

std::vector<QuotientPoint> conical_samples(FlowModel& M, std::size_t leaf_points, std::size_t ray_points) {
    Cover& C = M.cover();
    Leaves& L = M.leaves();
    std::vector<QuotientPoint> out;
    std::vector<std::pair<int, Kind>> seen;
    std::size_t singular_wanted = leaf_points > 0 ? leaf_points - 1 : 0;
    C.build_ball(2);
    for (int t : C.ball_tiles(2)) {
        for (int cx = 0; cx <= 1 && out.size() < singular_wanted; ++cx) {
            int v = C.vertex_at(t, cx, 0);
            Kind k = cx == 0 ? Kind::Stable : Kind::Unstable;
            if (std::find(seen.begin(), seen.end(), std::pair(v, k)) != seen.end()) continue;
            seen.emplace_back(v, k);
            Leaf s = L.singular_leaf(v, k);
            int arm = static_cast<int>(out.size() % s.arms.size());
            out.push_back({RaySpec{s, arm}, std::nullopt,
                           std::string(kind_name(k)) + " prong " + std::to_string(arm) + " at vertex " + std::to_string(v)});
        }
    }
    if (leaf_points > 0)
        out.push_back({RaySpec{L.leaf_at(C.reference(C.base()), Kind::Stable), 1}, std::nullopt,
                       "forward end of the stable leaf through the base"});
    const long dirs[][2] = {{2, 1}, {-1, 3}, {1, -2}, {-3, -1}, {3, 2}};
    for (std::size_t i = 0; i < ray_points && i < 5; ++i)
        out.push_back({std::nullopt, Vec2{QuadNum(dirs[i][0]), QuadNum(dirs[i][1])},
                       "ray in direction (" + std::to_string(dirs[i][0]) + ", " + std::to_string(dirs[i][1]) + ")"});
    return out;
}

ConicalWitness conical_witness(FlowModel& M, const QuotientPoint& x, int depth, int max_word_length) {
    if (!x.end && !x.direction) throw std::invalid_argument("quotient point needs an end or a direction");
    if (x.end) {
        ConicalWitness w = periodic_leaf_witness(M, *x.end, depth, max_word_length);
        if (w.status == Tri::Yes) return w;
        ConicalWitness t = translates_witness(M, x, depth);
        if (t.status == Tri::Yes) return t;
        t.note = w.note + "; " + t.note;
        return t;
    }
    return translates_witness(M, x, depth);
}

}  // namespace orbitsphere
