#include <doctest.h>

#include <random>
#include <set>

#include "orbitsphere/cover.hpp"
#include "orbitsphere/flowspec.hpp"
#include "orbitsphere/surface.hpp"
#include "support.hpp"

using namespace orbitsphere;

TEST_CASE("torus ball size matches the lattice count") {
    Surface S = Surface::from_spec(testsupport::load("anosov_cat.flowspec"));
    Cover C(S);
    for (int r = 0; r <= 4; ++r) {
        C.build_ball(r);
        CHECK(C.ball_tiles(r).size() == static_cast<std::size_t>(2 * r * r + 2 * r + 1));
    }
}

TEST_CASE("cone vertices of the genus two cover have eight quarters") {
    Surface S = Surface::from_spec(testsupport::load("pa_sing.flowspec"));
    Cover C(S);
    C.build_ball(2);
    std::set<int> seen;
    for (int t : C.ball_tiles(1))
        for (int cx = 0; cx <= 1; ++cx)
            for (int cy = 0; cy <= 1; ++cy) {
                int v = C.vertex_at(t, cx, cy);
                if (!seen.insert(v).second) continue;
                CHECK(C.quadrants(v).size() == 8);
            }
    CHECK(seen.size() > 4);
}

TEST_CASE("monodromy image of the base reference point follows the matrix") {
    Surface S = Surface::from_spec(testsupport::load("anosov_cat.flowspec"));
    Cover C(S);
    CPoint p = C.reference(C.base());
    CPoint q = C.apply(monodromy_element(), p);
    Vec2 expect = S.matrix().apply(C.dev(p));
    CHECK(C.dev(q) == expect);
    CHECK(C.tile(q.tile).X == expect.x.floor());
    CHECK(C.tile(q.tile).Y == expect.y.floor());
}

TEST_CASE("group law: composition and inverse act consistently") {
    Surface S = Surface::from_spec(testsupport::load("pa_sing.flowspec"));
    Cover C(S);
    C.build_ball(3);
    std::vector<GroupElem> elems{monodromy_element(), deck_element(parse_word("R")), deck_element(parse_word("UU")),
                                 deck_element(parse_word("URRD"))};
    std::mt19937 rng(11);
    CPoint p = C.reference(C.base());
    for (int trial = 0; trial < 20; ++trial) {
        GroupElem a = elems[rng() % elems.size()], b = elems[rng() % elems.size()];
        if (rng() % 2) a = C.inverse(a);
        if (rng() % 2) b = C.inverse(b);
        GroupElem ab = C.compose(a, b);
        CHECK(C.same_point(C.apply(ab, p), C.apply(a, C.apply(b, p))));
        CHECK(C.same_point(C.apply(C.inverse(ab), C.apply(ab, p)), p));
        CHECK(C.equal(C.compose(ab, C.inverse(ab)), identity_element()));
    }
}

TEST_CASE("deck elements translate developed coordinates") {
    Surface S = Surface::from_spec(testsupport::load("pa_sing.flowspec"));
    Cover C(S);
    C.build_ball(3);
    for (int t : C.ball_tiles(2)) {
        if (C.tile(t).label != 0) continue;
        GroupElem k = deck_element(C.element_of(t));
        CPoint p = C.reference(C.base());
        Vec2 d = C.dev(C.apply(k, p)) - C.dev(p);
        CHECK(d == Vec2{QuadNum(C.tile(t).X), QuadNum(C.tile(t).Y)});
    }
}

TEST_CASE("tile budget is enforced") {
    Surface S = Surface::from_spec(testsupport::load("pa_sing.flowspec"));
    Cover C(S, 50);
    CHECK_THROWS_AS(C.build_ball(6), BudgetExceeded);
}

TEST_CASE("Dehn reduction trivializes the vertex relator") {
    TileGroup G(2);
    Word rel = parse_word("LDRULDRU");
    CHECK(G.is_trivial(rel));
    CHECK_FALSE(G.is_trivial(parse_word("RU")));
    CHECK(G.reduce(parse_word("RL")).empty());
}
