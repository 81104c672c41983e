#include <doctest.h>

#include <random>

#include "orbitsphere/ideal_circle.hpp"
#include "support.hpp"

using namespace orbitsphere;

namespace {

CPoint random_point(Cover& C, std::mt19937& rng, int radius) {
    auto tiles = C.ball_tiles(radius);
    int t = tiles[rng() % tiles.size()];
    // Denominators coprime to the lattice keep the point off the singular leaves.
    return {t, Vec2{QuadNum(rat(1 + static_cast<long>(rng() % 95), 97)), QuadNum(rat(1 + static_cast<long>(rng() % 87), 89))}};
}

}  // namespace

TEST_CASE("stable and unstable leaves meet at most once and at a common point") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    Cover& C = M.cover();
    Leaves& L = M.leaves();
    C.build_ball(3);
    std::mt19937 rng(3);
    int met = 0;
    for (int trial = 0; trial < 40; ++trial) {
        Leaf s = L.leaf_at(random_point(C, rng, 1), Kind::Stable);
        Leaf u = L.leaf_at(random_point(C, rng, 1), Kind::Unstable);
        auto x = L.crossing(s, u);
        if (!x) continue;
        ++met;
        CHECK(C.same_point(L.point_at(s, x->arm_s, x->param_s), L.point_at(u, x->arm_u, x->param_u)));
        CHECK(L.on_arm(s, x->arm_s, x->param_s));
        CHECK(L.on_arm(u, x->arm_u, x->param_u));
    }
    CHECK(met > 0);
}

TEST_CASE("a leaf through its own point crosses the other kind at that point") {
    FlowModel M(testsupport::load("anosov_cat.flowspec"));
    Cover& C = M.cover();
    Leaves& L = M.leaves();
    C.build_ball(3);
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        CPoint p = random_point(C, rng, 2);
        auto x = L.crossing(L.leaf_at(p, Kind::Stable), L.leaf_at(p, Kind::Unstable));
        REQUIRE(x);
        CHECK(x->param_s == L.param_of(Kind::Stable, p));
        CHECK(x->param_u == L.param_of(Kind::Unstable, p));
    }
}

TEST_CASE("leaf images are equivariant") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    Cover& C = M.cover();
    Leaves& L = M.leaves();
    C.build_ball(3);
    std::mt19937 rng(9);
    std::vector<GroupElem> elems{monodromy_element(), C.inverse(monodromy_element()), deck_element(parse_word("R")),
                                 deck_element(parse_word("UR"))};
    for (int trial = 0; trial < 24; ++trial) {
        const GroupElem& g = elems[trial % elems.size()];
        Kind k = trial % 2 ? Kind::Stable : Kind::Unstable;
        CPoint p = random_point(C, rng, 1);
        Leaf img = L.image(g, L.leaf_at(p, k), nullptr);
        CHECK(img.kind == k);
        CHECK(L.same_leaf(img, L.leaf_at(C.apply(g, p), k)));
    }
}

TEST_CASE("singular leaves carry one arm per prong") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    Cover& C = M.cover();
    C.build_ball(2);
    for (int t : C.ball_tiles(1)) {
        int v = C.vertex_at_lower_left(t);
        for (Kind k : {Kind::Stable, Kind::Unstable}) {
            Leaf l = M.leaves().singular_leaf(v, k);
            CHECK(l.singular());
            CHECK(l.arms.size() == 4);
        }
    }
}

TEST_CASE("torus vertices are regular points of the foliation") {
    FlowModel M(testsupport::load("anosov_cat.flowspec"));
    M.cover().build_ball(1);
    Leaf l = M.leaves().singular_leaf(M.cover().vertex_at_lower_left(0), Kind::Stable);
    CHECK(l.arms.size() == 2);
    CHECK_FALSE(l.singular());
}

TEST_CASE("foliation slopes are eigen-directions of the matrix") {
    for (const char* name : {"anosov_cat.flowspec", "pa_sing.flowspec"}) {
        FlowModel M(testsupport::load(name));
        const Foliation& F = M.leaves().foliation();
        const Mat2& A = M.surface().matrix();
        for (Kind k : {Kind::Stable, Kind::Unstable}) {
            Vec2 v = F.forward(k);
            Vec2 w = A.apply(v);
            CHECK(w.x * v.y == w.y * v.x);
        }
        CHECK(F.slope(Kind::Stable) != F.slope(Kind::Unstable));
    }
}
