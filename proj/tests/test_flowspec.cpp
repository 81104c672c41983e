#include <doctest.h>

#include <random>

#include "orbitsphere/flowspec.hpp"
#include "support.hpp"

using namespace orbitsphere;
using testsupport::load;

namespace {

bool has_error(const ValidationReport& r, const std::string& needle) {
    for (const auto& e : r.errors)
        if (e.find(needle) != std::string::npos) return true;
    return false;
}

// Brute-force positivity of M^e for e up to (k-1)^2 + 1.
int brute_primitivity(const std::vector<std::vector<long>>& m) {
    std::size_t k = m.size();
    std::vector<std::vector<long>> p = m;
    for (std::size_t e = 1; e <= (k - 1) * (k - 1) + 1; ++e) {
        bool pos = true;
        for (const auto& row : p)
            for (long v : row) pos = pos && v > 0;
        if (pos) return static_cast<int>(e);
        std::vector<std::vector<long>> q(k, std::vector<long>(k, 0));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                for (std::size_t l = 0; l < k; ++l) q[i][j] = std::min(1L, q[i][j] + (p[i][l] > 0 && m[l][j] > 0));
        p = q;
    }
    return 0;
}

}  // namespace

TEST_CASE("bundled torus spec parses without singularities") {
    FlowSpec s = load("anosov_cat.flowspec");
    CHECK(s.genus == 1);
    CHECK(s.singular.empty());
    ValidationReport r = validate(s);
    CHECK(r.ok);
    CHECK(r.errors.empty());
    CHECK(r.computed_genus == 1);
    CHECK(r.primitivity_power >= 1);
}

TEST_CASE("bundled genus two spec has two four-prong vertices") {
    FlowSpec s = load("pa_sing.flowspec");
    ValidationReport r = validate(s);
    CHECK(r.ok);
    CHECK(r.genus == 2);
    CHECK(r.census.size() == 1);
    CHECK(r.census.at(4) == 2);
    CHECK(r.primitivity_power == 2);
}

TEST_CASE("skewed spec validates") {
    ValidationReport r = validate(load("lozenge.flowspec"));
    CHECK(r.ok);
}

TEST_CASE("empty rectangle section is rejected") {
    CHECK_THROWS_WITH_AS(parse_flowspec("genus 1\n[rectangles]\n[gluings]\n"), doctest::Contains("at least one rectangle required"),
                         ParseError);
}

TEST_CASE("parse errors carry line and column") {
    try {
        parse_flowspec("genus 1\n[rectangles]\ns0\n[gluings]\ns0 sideways s0\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
        CHECK(e.column() == 4);
    }
    CHECK_THROWS_AS(parse_flowspec("[rectangles]\ns0\ns0\n"), ParseError);
    CHECK_THROWS_WITH_AS(parse_flowspec("[rectangles]\ns0\n[gluings]\ns0 right s9\n"), doctest::Contains("dangling"),
                         ParseError);
    CHECK_THROWS_AS(parse_flowspec("[rectangles]\ns0\n[bogus]\n"), ParseError);
    CHECK_THROWS_AS(parse_flowspec("genus 1 2\n[rectangles]\ns0\n"), ParseError);
}

TEST_CASE("one-prong vertex is a violation") {
    ValidationReport r = validate(load("invalid/one_prong.flowspec"));
    CHECK_FALSE(r.ok);
    CHECK(has_error(r, "prong count below 2"));
}

TEST_CASE("permutation transition is not primitive") {
    ValidationReport r = validate(load("invalid/permutation.flowspec"));
    CHECK_FALSE(r.ok);
    CHECK(has_error(r, "transition not primitive"));
}

TEST_CASE("serialization round-trips and is a canonical fixed point") {
    for (const char* name : {"anosov_cat.flowspec", "pa_sing.flowspec", "lozenge.flowspec"}) {
        CAPTURE(name);
        FlowSpec s = load(name);
        std::string once = serialize(s);
        FlowSpec back = parse_flowspec(once);
        CHECK(back.structurally_equal(s));
        CHECK(serialize(back) == once);
    }
}

TEST_CASE("validation is pure") {
    FlowSpec s = load("pa_sing.flowspec");
    CHECK(validate(s) == validate(s));
}

TEST_CASE("primitivity exponent agrees with brute force on random matrices") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t k = 1 + rng() % 4;
        std::vector<std::vector<long>> m(k, std::vector<long>(k));
        for (auto& row : m)
            for (auto& v : row) v = (rng() % 3 == 0) ? 1 + static_cast<long>(rng() % 2) : 0;
        CAPTURE(trial);
        CHECK(primitivity_exponent(m) == brute_primitivity(m));
    }
}
