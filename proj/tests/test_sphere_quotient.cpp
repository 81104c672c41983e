#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "orbitsphere/sphere_quotient.hpp"
#include "support.hpp"

using namespace orbitsphere;

namespace {

CircleApprox ball_circle(FlowModel& M, int radius) {
    M.cover().build_ball(radius + 2);
    CircleBuilder b(M.leaves());
    b.add_ball_seeds(M.cover().base(), radius);
    return b.build();
}

ChordSystem toy(std::size_t n, std::vector<std::vector<int>> stable, std::vector<std::vector<int>> unstable) {
    ChordSystem cs;
    cs.circle_size = n;
    for (auto& e : stable) cs.stable.push_back({Kind::Stable, -1, e});
    for (auto& e : unstable) cs.unstable.push_back({Kind::Unstable, -1, e});
    return cs;
}

}  // namespace

TEST_CASE("genus two quotient is a sphere") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    CircleApprox c = ball_circle(M, 2);
    ChordSystem cs = gluing_pairs(M, c, 2);
    QuotientComplex q = build_quotient(cs);
    CHECK(q.euler == 2);
    CHECK(q.connected);
    CHECK(q.links_ok);
    CHECK(q.sphere());
}

TEST_CASE("fibers are bounded by the prong count") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    CircleApprox c = ball_circle(M, 2);
    ChordSystem cs = gluing_pairs(c);
    QuotientComplex q = build_quotient(cs);
    std::vector<int> fiber(q.vertex_count(), 0);
    for (int v : q.class_of) ++fiber[v];
    for (std::size_t v = 0; v < fiber.size(); ++v) {
        CHECK(fiber[v] <= 4);
        CHECK((fiber[v] >= 2) == (q.class_kind[v] != 0));
    }
}

TEST_CASE("linked chords are rejected") {
    ChordSystem cs = toy(4, {{0, 2}, {1, 3}}, {});
    CHECK_THROWS_AS(check_unlinked(cs), LinkedChords);
    CHECK_THROWS_AS(build_quotient(cs), LinkedChords);
    QuotientComplex q = build_quotient(cs, false);
    CHECK_FALSE(q.sphere());
}

TEST_CASE("nested and disjoint chords are unlinked") {
    ChordSystem cs = toy(8, {{0, 3}, {1, 2}}, {{4, 7}, {5, 6}});
    CHECK_NOTHROW(check_unlinked(cs));
    ChordSystem crossing_kinds = toy(4, {{0, 2}}, {{1, 3}});
    CHECK_NOTHROW(check_unlinked(crossing_kinds));
}

TEST_CASE("torus input is refused as a product region") {
    FlowModel M(testsupport::load("anosov_cat.flowspec"));
    CircleApprox c = ball_circle(M, 1);
    CHECK_THROWS_WITH_AS(gluing_pairs(M, c, 2), doctest::Contains("product region detected"), Refusal);
}

TEST_CASE("deck and monodromy actions preserve chord classes and order") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    std::vector<GroupElem> elems{monodromy_element(), deck_element(parse_word("R")), deck_element(parse_word("U"))};
    EquivarianceReport r = check_equivariance(M, 2, elems);
    CHECK(r.elements == elems.size());
    CHECK(r.checked > 0);
    CHECK(r.ok());
}

TEST_CASE("complex json has the documented shape") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    QuotientComplex q = build_quotient(gluing_pairs(ball_circle(M, 1)));
    auto j = nlohmann::json::parse(complex_json(q));
    for (const char* key : {"vertices", "edges", "faces", "euler_characteristic", "connected", "links_ok", "census",
                            "circle_classes"})
        CHECK(j.contains(key));
    CHECK(j["vertices"].size() == q.vertex_count());
    CHECK(j["euler_characteristic"] == 2);
    CHECK(complex_json(q) == complex_json(q));
}

TEST_CASE("embedding is deterministic and lies on the unit sphere") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    QuotientComplex q = build_quotient(gluing_pairs(ball_circle(M, 1)));
    auto a = sphere_embedding(q, 100, 5);
    auto b = sphere_embedding(q, 100, 5);
    CHECK(a == b);
    for (const auto& p : a) CHECK(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] == doctest::Approx(1.0).epsilon(1e-9));
    PeanoSample s = peano_sample(q, 64);
    CHECK(s.points.size() == 64);
    for (std::size_t i = 1; i < s.points.size(); ++i) CHECK(s.points[i - 1].t <= s.points[i].t);
}

TEST_CASE("svg writers produce files") {
    FlowModel M(testsupport::load("pa_sing.flowspec"));
    ChordSystem cs = gluing_pairs(ball_circle(M, 1));
    QuotientComplex q = build_quotient(cs);
    std::string chords = "test_chords.svg", curve = "test_curve.svg";
    write_chords_svg(cs, chords);
    write_curve_svg(peano_sample(q, 32), curve);
    for (const auto& path : {chords, curve}) {
        std::ifstream f(path);
        std::stringstream ss;
        ss << f.rdbuf();
        CHECK(ss.str().find("<svg") != std::string::npos);
        std::remove(path.c_str());
    }
}
