#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "orbitsphere/dynamics.hpp"
#include "orbitsphere/skewed.hpp"
#include "orbitsphere/sphere_quotient.hpp"
#include "support.hpp"

#ifndef ORBITSPHERE_CLI
#error "ORBITSPHERE_CLI must be defined by the build"
#endif

using namespace orbitsphere;
using testsupport::load;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

CircleApprox ball_circle(FlowModel& M, int depth) {
    M.cover().build_ball(depth + 2);
    CircleBuilder b(M.leaves());
    b.add_ball_seeds(M.cover().base(), depth);
    return b.build();
}

std::vector<int> normalized(std::vector<int> v) {
    if (!v.empty()) std::rotate(v.begin(), std::min_element(v.begin(), v.end()), v.end());
    return v;
}

struct Run {
    int code = -1;
    std::string out, err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Run run_cli(const std::string& args) {
    auto dir = std::filesystem::temp_directory_path() / ("orbitsphere_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto out = dir / "stdout", err = dir / "stderr";
    std::string cmd = std::string("\"") + ORBITSPHERE_CLI + "\" " + args + " --out \"" + (dir / "out").string() +
                      "\" >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
    int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    std::filesystem::remove_all(dir);
    return r;
}

Outcome fixed_point_census() {
    auto t0 = Clock::now();
    FlowModel M(load("pa_sing.flowspec"));
    FixedPointReport t = fixed_points_on_circle(M, parse_element(M, "t"), 4);
    FixedPointReport r = fixed_points_on_circle(M, parse_element(M, "a t^-1"), 4);
    double dt = seconds_since(t0);
    std::ostringstream os;
    os << "prong-fixing power " << element_string(t.power) << ": " << t.ends.size() << " fixed ends, alternating "
       << t.alternating << ", converged " << t.converged << "/" << t.neighbors << "; regular " << element_string(r.power)
       << ": " << r.ends.size() << " fixed ends, alternating " << r.alternating << "; " << dt << " s";
    bool ok = t.status == Tri::Yes && t.ends.size() == 8 && t.alternating && t.converged == t.neighbors &&
              r.status == Tri::Yes && r.ends.size() == 4 && r.alternating && r.converged == r.neighbors && dt < 120.0;
    return {ok, os.str()};
}

Outcome sphere_certificate() {
    auto t0 = Clock::now();
    FlowModel M(load("pa_sing.flowspec"));
    std::ostringstream os;
    bool ok = true;
    // Leaves of the coarsest circle are the persistent cells; their class
    // type and fiber must not change under refinement.
    std::vector<Leaf> persistent;
    std::vector<std::pair<int, int>> reference;
    for (int depth : {3, 4, 5}) {
        CircleApprox c = ball_circle(M, depth);
        QuotientComplex q = build_quotient(gluing_pairs(M, c, std::min(depth, 4)));
        std::vector<int> fiber(q.vertex_count(), 0);
        for (int v : q.class_of) ++fiber[v];
        bool census_ok = true;
        if (persistent.empty()) {
            persistent = c.leaves;
            for (std::size_t li = 0; li < c.leaves.size(); ++li) {
                int v = q.class_of[c.pos({static_cast<int>(li), 0})];
                reference.push_back({q.class_kind[v], fiber[v]});
            }
        } else {
            CircleBuilder b(M.leaves());
            b.add_ball_seeds(M.cover().base(), depth);
            for (std::size_t i = 0; i < persistent.size() && census_ok; ++i) {
                int li = b.find_leaf(persistent[i]);
                if (li < 0) {
                    census_ok = false;
                    break;
                }
                int v = q.class_of[c.pos({li, 0})];
                census_ok = reference[i] == std::pair<int, int>{q.class_kind[v], fiber[v]};
            }
        }
        os << "d" << depth << ": N=" << c.size() << " chi=" << q.euler << " connected=" << q.connected
           << " links=" << q.links_ok << " census=" << (census_ok ? "stable" : "changed") << "; ";
        ok = ok && q.sphere() && census_ok;
    }
    double dt = seconds_since(t0);
    os << persistent.size() << " persistent cells; " << dt << " s";
    return {ok && dt < 300.0, os.str()};
}

Outcome gluing_bounds() {
    FlowModel M(load("pa_sing.flowspec"));
    CircleApprox c = ball_circle(M, 4);
    ChordSystem cs = gluing_pairs(M, c, 4);
    QuotientComplex q = build_quotient(cs);
    std::vector<int> fiber(q.vertex_count(), 0);
    for (int v : q.class_of) ++fiber[v];
    std::size_t over = 0, mismatched = 0;
    int largest = 0;
    for (std::size_t v = 0; v < fiber.size(); ++v) {
        largest = std::max(largest, fiber[v]);
        over += fiber[v] > cs.p_max;
        mismatched += (fiber[v] >= 2) != (q.class_kind[v] != 0);
    }
    std::ostringstream os;
    os << q.class_of.size() << " samples, " << fiber.size() << " classes, largest fiber " << largest << " (p_max "
       << cs.p_max << "), " << over << " over bound, " << mismatched << " chord/fiber mismatches";
    return {cs.p_max == 4 && over == 0 && mismatched == 0, os.str()};
}

Outcome equivariance() {
    FlowModel M(load("pa_sing.flowspec"));
    Cover& C = M.cover();
    C.build_ball(3);
    std::vector<int> deck;
    for (int t : C.ball_tiles(2))
        if (C.tile(t).label == 0 && t != C.base()) deck.push_back(t);
    std::mt19937 rng(20240601u);
    std::ostringstream os;
    bool ok = true;
    std::size_t total = 0, violations = 0, least = SIZE_MAX;
    for (int i = 0; i < 10; ++i) {
        GroupElem g = deck_element(C.element_of(deck[rng() % deck.size()]));
        long n = static_cast<long>(rng() % 3) - 1;
        if (n != 0) g = C.compose(g, C.power(monodromy_element(), n));
        EquivarianceReport r = check_equivariance(M, 2, {g});
        total += r.checked;
        least = std::min(least, r.checked);
        violations += r.class_mismatches + r.order_violations;
        ok = ok && r.ok() && r.checked >= 100;
    }
    os << "10 elements, " << total << " samples (fewest " << least << " per element), " << violations << " violations";
    return {ok, os.str()};
}

Outcome refusal() {
    std::string spec = testsupport::spec_path("anosov_cat.flowspec");
    Run q = run_cli("quotient \"" + spec + "\"");
    Run b = run_cli("boundary \"" + spec + "\" --depth 2");
    std::size_t quadrants = 0;
    bool parsed = false;
    try {
        auto j = nlohmann::json::parse(b.out);
        quadrants = j.at("boundary").at("quadrant_points").get<std::size_t>();
        parsed = true;
    } catch (const std::exception&) {
    }
    bool cites = q.err.find("product region detected") != std::string::npos;
    std::ostringstream os;
    os << "quotient exit " << q.code << (cites ? " citing product region" : " without product-region citation")
       << "; boundary exit " << b.code << " with " << quadrants << " quadrant points";
    return {q.code == 2 && cites && b.code == 0 && parsed && quadrants == 4, os.str()};
}

Outcome perfect_fits() {
    FlowModel cat(load("anosov_cat.flowspec"));
    FlowModel pa(load("pa_sing.flowspec"));
    auto fc = detect_perfect_fits(cat, 4, 6);
    auto fp = detect_perfect_fits(pa, 4, 6);
    SkewedModel S(load("lozenge.flowspec"));
    auto fl = S.detect_perfect_fits(3, 6);
    bool certified = !fl.empty();
    for (const auto& f : fl) certified = certified && !f.certificate.empty() && f.fixed.size() >= 2;

    // Rays forming a perfect fit are equivalent and must land on one ideal point.
    std::size_t pairs = 0, equal = 0;
    for (int i = -4; i <= 4; ++i) {
        for (bool diag : {true, false}) {
            Rational c = rat(i, 3);
            SkewedModel::Ray r{Kind::Stable, c, diag};
            SkewedModel::Ray s{Kind::Unstable, diag ? c : c - 1, diag};
            if (!SkewedModel::form_perfect_fit(r, s)) continue;
            ++pairs;
            equal += S.equivalent_rays(r, s) == Tri::Yes && S.same_ideal_point(r, s) == Tri::Yes;
        }
    }
    // Flat check: two rays along the same half-leaf give one ideal point.
    pa.cover().build_ball(5);
    Leaves& L = pa.leaves();
    Leaf l = L.leaf_at(pa.cover().reference(pa.cover().base()), Kind::Stable);
    CPoint further = L.point_at(l, 1, l.seed_param + QuadNum(rat(7, 5)));
    Leaf l2 = L.leaf_at(further, Kind::Stable);
    RaySpec a{l, 1}, b{l2, 1};
    bool flat_equal = equivalent_rays(pa, a, b, 3) == Tri::Yes &&
                      same_ideal_point(pa, ideal_point(pa, a, 3), ideal_point(pa, b, 3), 3) == Tri::Yes;

    std::ostringstream os;
    os << "torus " << fc.size() << ", genus two " << fp.size() << ", lozenge " << fl.size()
       << (fl.empty() ? "" : " (first certificate " + fl.front().certificate + ")") << "; " << equal << "/" << pairs
       << " perfect-fit ray pairs share an ideal point; flat equivalent rays " << (flat_equal ? "equal" : "not equal");
    return {fc.empty() && fp.empty() && certified && pairs > 0 && equal == pairs && flat_equal, os.str()};
}

Outcome order_stability() {
    FlowModel M(load("pa_sing.flowspec"));
    CircleApprox c = ball_circle(M, 2);
    std::vector<RaySpec> rays;
    std::size_t step = std::max<std::size_t>(1, c.size() / 50);
    for (std::size_t i = 0; i < c.size() && rays.size() < 50; i += step) rays.push_back({c.leaves[c.order[i].leaf], c.order[i].arm});
    int base = M.cover().base();
    int other = M.cover().neighbor(M.cover().neighbor(base, kRight), kUp);
    auto o0 = normalized(circular_order(M, rays, base, 2));
    auto o1 = normalized(circular_order(M, rays, other, 2));
    auto o2 = normalized(circular_order(M, rays, base, 3));
    auto inversions = [&](const std::vector<int>& a) {
        std::size_t bad = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (i >= o0.size() || a[i] != o0[i]) ++bad;
        return bad;
    };
    std::size_t b1 = inversions(o1), b2 = inversions(o2);
    std::ostringstream os;
    os << rays.size() << " ideal points; base change " << b1 << " displaced, refinement 2->3 " << b2 << " displaced";
    return {rays.size() == 50 && o0.size() == 50 && b1 == 0 && b2 == 0 && o1.size() == 50 && o2.size() == 50, os.str()};
}

Outcome source_sink() {
    FlowModel M(load("pa_sing.flowspec"));
    std::ostringstream os;
    bool ok = true;
    for (const char* s : {"t", "t^-1", "t^2", "a t^-1", "a^-1 t"}) {
        SourceSinkReport r = source_sink_on_sphere(M, parse_element(M, s), 3, 200);
        bool good = r.status == Tri::Yes && r.distinct && r.source != r.sink && r.grid == 200 && r.contracted == 200;
        os << s << ": " << (good ? "ok" : tri_name(r.status)) << " " << r.contracted << "/" << r.grid << "; ";
        ok = ok && good;
    }
    return {ok, os.str()};
}

Outcome conical() {
    FlowModel M(load("pa_sing.flowspec"));
    auto samples = conical_samples(M);
    std::size_t resolved = 0, leaf_points = 0, honest = 0;
    for (const auto& x : samples) {
        leaf_points += x.end.has_value();
        ConicalWitness w = conical_witness(M, x, 3, 6);
        if (w.status == Tri::Yes)
            ++resolved;
        else if (!w.note.empty())
            ++honest;
    }
    std::ostringstream os;
    os << resolved << "/" << samples.size() << " resolved (" << leaf_points << " leaf classes, "
       << samples.size() - leaf_points << " non-leaf), " << honest << " undecided with stated budget";
    bool mixed = leaf_points > 0 && leaf_points < samples.size();
    return {samples.size() == 10 && mixed && resolved >= 7 && resolved + honest == samples.size(), os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    // An optional argument selects a single criterion by number.
    std::size_t only = argc > 1 ? std::stoul(argv[1]) : 0;
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"fixed-point census", fixed_point_census},
        {"sphere certificate", sphere_certificate},
        {"gluing bounds", gluing_bounds},
        {"equivariance", equivariance},
        {"refusal correctness", refusal},
        {"perfect-fit detector", perfect_fits},
        {"order stability", order_stability},
        {"source and sink", source_sink},
        {"conical witnesses", conical},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && only != i + 1) continue;
        Outcome o;
        auto t0 = Clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
                  << "): " << o.detail << " [" << std::fixed << std::setprecision(1) << seconds_since(t0) << " s]"
                  << std::defaultfloat << std::endl;
    }
    std::size_t ran = only != 0 ? 1 : criteria.size();
    std::cout << ran - failed << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
