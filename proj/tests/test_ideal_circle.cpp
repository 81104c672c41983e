#include <doctest.h>

#include <algorithm>
#include <set>

#include "orbitsphere/ideal_circle.hpp"
#include "orbitsphere/skewed.hpp"
#include "support.hpp"

using namespace orbitsphere;

namespace {

CircleApprox ball_circle(FlowModel& M, int radius) {
    M.cover().build_ball(radius + 2);
    CircleBuilder b(M.leaves());
    b.add_ball_seeds(M.cover().base(), radius);
    return b.build();
}

std::vector<RaySpec> rays_of(const CircleApprox& c, std::size_t count) {
    std::vector<RaySpec> out;
    std::size_t step = std::max<std::size_t>(1, c.size() / count);
    for (std::size_t i = 0; i < c.size() && out.size() < count; i += step) {
        const EndRef& e = c.order[i];
        out.push_back({c.leaves[e.leaf], e.arm});
    }
    return out;
}

// Rotates so the sequence starts with its smallest entry.
std::vector<int> normalized(std::vector<int> v) {
    std::rotate(v.begin(), std::min_element(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

TEST_CASE("circle lists every leaf end exactly once") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    CircleApprox c = ball_circle(M, 2);
    std::size_t ends = 0;
    for (const auto& l : c.leaves) ends += l.arms.size();
    CHECK(c.size() == ends);
    std::set<int> seen;
    for (std::size_t li = 0; li < c.leaves.size(); ++li)
        for (int p : c.position[li]) seen.insert(p);
    CHECK(seen.size() == ends);
}

TEST_CASE("crossing leaves have interleaved ends") {
    FlowModel M(testsupport::load("anosov_cat.flowspec"));
    CircleApprox c = ball_circle(M, 2);
    int checked = 0;
    for (auto [s, u] : c.crossings) {
        if (c.leaves[s].arms.size() != 2 || c.leaves[u].arms.size() != 2) continue;
        int a = c.position[s][0], b = c.position[s][1];
        bool u0 = c.between(a, c.position[u][0], b);
        bool u1 = c.between(a, c.position[u][1], b);
        CHECK(u0 != u1);
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("between is a cyclic betweenness relation") {
    CircleApprox c;
    c.order.resize(7);
    for (int a = 0; a < 7; ++a)
        for (int b = 0; b < 7; ++b)
            for (int x = 0; x < 7; ++x) {
                if (a == b || b == x || a == x) continue;
                CHECK(c.between(a, b, x) == c.between(b, x, a));
                CHECK(c.between(a, b, x) != c.between(a, x, b));
            }
}

TEST_CASE("circular order is coherent on subsets") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    CircleApprox c = ball_circle(M, 1);
    std::vector<RaySpec> all = rays_of(c, 12);
    std::vector<int> full = circular_order(M, all, M.cover().base(), 2);
    REQUIRE(full.size() == all.size());
    std::vector<RaySpec> sub;
    std::vector<int> idx;
    for (std::size_t i = 0; i < all.size(); i += 2) {
        sub.push_back(all[i]);
        idx.push_back(static_cast<int>(i));
    }
    std::vector<int> part = circular_order(M, sub, M.cover().base(), 2);
    std::vector<int> restricted;
    for (int i : full)
        if (i % 2 == 0) restricted.push_back(i);
    std::vector<int> mapped;
    for (int j : part) mapped.push_back(idx[j]);
    CHECK(normalized(mapped) == normalized(restricted));
}

TEST_CASE("ideal point sequences escape and nest") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    M.cover().build_ball(4);
    Leaf l = M.leaves().leaf_at(M.cover().reference(M.cover().base()), Kind::Stable);
    IdealPointApprox p = ideal_point(M, {l, 1}, 3);
    CHECK(p.seq.escape_ok);
    CHECK(p.seq.nesting_ok);
    CHECK(std::is_sorted(p.seq.escape_bound.begin(), p.seq.escape_bound.end()));
    CHECK(p.master == is_master(M, p.seq));
}

TEST_CASE("same ideal point is symmetric and reflexive") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    M.cover().build_ball(4);
    CPoint b = M.cover().reference(M.cover().base());
    IdealPointApprox p = ideal_point(M, {M.leaves().leaf_at(b, Kind::Stable), 1}, 3);
    IdealPointApprox q = ideal_point(M, {M.leaves().leaf_at(b, Kind::Unstable), 0}, 3);
    CHECK(same_ideal_point(M, p, p, 3) == Tri::Yes);
    CHECK(same_ideal_point(M, p, q, 3) == same_ideal_point(M, q, p, 3));
    CHECK(same_ideal_point(M, p, q, 3) == Tri::No);
}

TEST_CASE("one-leaf paths are slices and two-leaf corners are convex on one side") {
    FlowModel M(testsupport::load("anosov_cat.flowspec"));
    M.cover().build_ball(3);
    CPoint b = M.cover().reference(M.cover().base());
    Leaf s = M.leaves().leaf_at(b, Kind::Stable);
    Leaf u = M.leaves().leaf_at(b, Kind::Unstable);
    ConvexResult one = is_convex(M.leaves(), make_path(M.leaves(), {{s}, 0, 1}));
    CHECK(one.left_convex);
    CHECK(one.right_convex);
    ConvexResult two = is_convex(M.leaves(), make_path(M.leaves(), {{s, u}, 0, 1}));
    CHECK(two.left_convex != two.right_convex);
}

TEST_CASE("paths through disjoint leaves are rejected") {
    FlowModel M(testsupport::load("anosov_cat.flowspec"));
    M.cover().build_ball(3);
    Leaf a = M.leaves().leaf_at(M.cover().reference(M.cover().base()), Kind::Stable);
    Leaf b = M.leaves().leaf_at({M.cover().base(), Vec2{QuadNum(rat(1, 3)), QuadNum(rat(5, 7))}}, Kind::Stable);
    CHECK_THROWS_AS(make_path(M.leaves(), {{a, b}, 0, 1}), PathError);
}

TEST_CASE("product region is detected on the torus only") {
    FlowModel cat(testsupport::load("anosov_cat.flowspec"));
    FlowModel pa(testsupport::load("pa_sing.flowspec"));
    CHECK(detect_product_region(cat, 2));
    CHECK_FALSE(detect_product_region(pa, 2));
}

TEST_CASE("torus boundary sample carries four quadrant points") {
    FlowModel M(testsupport::load("anosov_cat.flowspec"));
    BoundarySample b = boundary_sample(M, 2, 100);
    CHECK(b.product);
    auto q = std::count_if(b.points.begin(), b.points.end(), [](const SamplePoint& p) { return p.cls == PointClass::Quadrant; });
    CHECK(q == 4);
}

TEST_CASE("no perfect fits in the flat models") {
    FlowModel cat(testsupport::load("anosov_cat.flowspec"));
    FlowModel pa(testsupport::load("pa_sing.flowspec"));
    CHECK(detect_perfect_fits(cat, 3).empty());
    CHECK(detect_perfect_fits(pa, 3).empty());
}

TEST_CASE("skewed model has perfect fits whose rays share an ideal point") {
    SkewedModel S(testsupport::load("lozenge.flowspec"));
    auto fits = S.detect_perfect_fits(2);
    CHECK_FALSE(fits.empty());
    for (const auto& f : fits) CHECK(f.fixed.size() >= 2);
    SkewedModel::Ray r{Kind::Stable, rat(1, 3), true};
    SkewedModel::Ray s{Kind::Unstable, rat(1, 3), true};
    CHECK(SkewedModel::form_perfect_fit(r, s));
    CHECK(S.equivalent_rays(r, s) == Tri::Yes);
    SkewedModel::Ray t{Kind::Unstable, rat(1, 2), true};
    CHECK(S.equivalent_rays(r, t) == Tri::No);
}

TEST_CASE("lemma verdict flags only persistent forbidden configurations") {
    CHECK(fundamental_lemma_verdict({}, {}, {}).consistent);
    CHECK(fundamental_lemma_verdict({true, true}, {true, false}, {true, true}).consistent);
    LemmaVerdict v = fundamental_lemma_verdict({true, true}, {true, true}, {true, true});
    CHECK_FALSE(v.consistent);
    CHECK(v.diagnostic.find("2 computed depths") != std::string::npos);
}

TEST_CASE("the two ends of a regular leaf are separated at depth one") {
    for (const char* name : {"anosov_cat.flowspec", "pa_sing.flowspec"}) {
        CAPTURE(name);
        FlowModel M(testsupport::load(name));
        M.cover().build_ball(5);
        for (int t : M.cover().ball_tiles(1))
            for (Kind k : {Kind::Stable, Kind::Unstable}) {
                Leaf l = M.leaves().leaf_at(M.cover().reference(t), k);
                CHECK(same_ideal_point(M, ideal_point(M, {l, 0}, 1), ideal_point(M, {l, 1}, 1), 1) == Tri::No);
            }
    }
}
