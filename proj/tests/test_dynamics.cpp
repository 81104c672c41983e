#include <doctest.h>

#include "orbitsphere/dynamics.hpp"
#include "support.hpp"

using namespace orbitsphere;

TEST_CASE("element parser accepts generator words and raw tile words") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    Cover& C = M.cover();
    C.build_ball(3);
    CHECK(C.equal(parse_element(M, "e"), identity_element()));
    CHECK(C.equal(parse_element(M, "t"), monodromy_element()));
    CHECK(C.equal(parse_element(M, "t^-1"), C.inverse(monodromy_element())));
    CHECK(C.equal(parse_element(M, "t^2"), C.power(monodromy_element(), 2)));
    CHECK(C.equal(parse_element(M, "[R] t"), C.compose(deck_element(parse_word("R")), monodromy_element())));
    CHECK_THROWS_AS(parse_element(M, "zz"), std::invalid_argument);
    CHECK_THROWS_AS(parse_element(M, "t^"), std::invalid_argument);
    CHECK_THROWS_AS(parse_element(M, "[RX]"), std::invalid_argument);
}

TEST_CASE("elements are classified by their fixed points") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    ElementClass id = classify_element(M, parse_element(M, "e"), 3);
    CHECK(id.kind == ElementKind::Identity);
    CHECK(id.all_fixed);
    ElementClass t = classify_element(M, parse_element(M, "t"), 3);
    CHECK(t.kind == ElementKind::PeriodicSingular);
    CHECK(t.prongs == 4);
    CHECK(t.name() == "periodic-singular(4)");
    ElementClass r = classify_element(M, parse_element(M, "a t^-1"), 4);
    CHECK(r.kind == ElementKind::PeriodicRegular);
    CHECK(r.fixed.size() == 1);
    ElementClass a = classify_element(M, parse_element(M, "[R]"), 3);
    CHECK(a.kind == ElementKind::Free);
    CHECK(a.axis.has_value());
}

TEST_CASE("classification is invariant under conjugation") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    Cover& C = M.cover();
    C.build_ball(4);
    GroupElem h = deck_element(parse_word("U"));
    for (const char* s : {"t", "a t^-1", "[R]"}) {
        CAPTURE(s);
        GroupElem g = parse_element(M, s);
        GroupElem c = C.compose(C.compose(h, g), C.inverse(h));
        CHECK(classify_element(M, g, 4).kind == classify_element(M, c, 4).kind);
    }
}

TEST_CASE("fixed ideal points of periodic elements alternate") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    FixedPointReport t = fixed_points_on_circle(M, parse_element(M, "t"), 3);
    CHECK(t.status == Tri::Yes);
    CHECK(t.ends.size() == 8);
    CHECK(t.alternating);
    CHECK(t.nesting_ok);
    CHECK(t.converged == t.neighbors);
    CHECK(t.fixed_leaf_ends == t.ends.size());
    FixedPointReport r = fixed_points_on_circle(M, parse_element(M, "a t^-1"), 3);
    CHECK(r.status == Tri::Yes);
    CHECK(r.ends.size() == 4);
    CHECK(r.alternating);
}

TEST_CASE("attracting and repelling ends swap under inversion") {
    FlowModel M(testsupport::load("anosov_cat.flowspec"));
    FixedPointReport f = fixed_points_on_circle(M, parse_element(M, "t"), 3);
    FixedPointReport b = fixed_points_on_circle(M, parse_element(M, "t^-1"), 3);
    REQUIRE(f.ends.size() == 4);
    REQUIRE(b.ends.size() == 4);
    int fa = 0, ba = 0;
    for (const auto& e : f.ends) fa += e.attracting;
    for (const auto& e : b.ends) ba += e.attracting;
    CHECK(fa == 2);
    CHECK(ba == 2);
    CHECK(f.expanded != b.expanded);
}

TEST_CASE("source and sink swap under inversion") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    SourceSinkReport f = source_sink_on_sphere(M, parse_element(M, "t"), 3, 60);
    SourceSinkReport b = source_sink_on_sphere(M, parse_element(M, "t^-1"), 3, 60);
    CHECK(f.status == Tri::Yes);
    CHECK(b.status == Tri::Yes);
    CHECK(f.distinct);
    CHECK(f.contracted == f.grid);
    CHECK(M.leaves().same_leaf(f.source_leaf, b.sink_leaf));
    CHECK(M.leaves().same_leaf(f.sink_leaf, b.source_leaf));
}

TEST_CASE("free elements have no source and sink certificate") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    SourceSinkReport r = source_sink_on_sphere(M, parse_element(M, "[R]"), 2, 20);
    CHECK(r.status != Tri::Yes);
}

TEST_CASE("periodic table entries fix their recorded points") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    auto table = periodic_table(M, 3, 4);
    CHECK_FALSE(table.empty());
    for (const auto& e : table) {
        CHECK(e.length <= 4);
        CHECK(M.cover().same_point(M.cover().apply(e.g, e.fixed), e.fixed));
    }
}

TEST_CASE("singular prong ends are conical") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    auto samples = conical_samples(M, 2, 0);
    REQUIRE(samples.size() == 2);
    ConicalWitness w = conical_witness(M, samples[0], 3);
    CHECK(w.status == Tri::Yes);
    CHECK_FALSE(w.sequence.empty());
    CHECK_FALSE(w.method.empty());
}
