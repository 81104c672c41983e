#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "orbitsphere/dynamics.hpp"
#include "orbitsphere/flowspec.hpp"
#include "orbitsphere/skewed.hpp"
#include "orbitsphere/sphere_quotient.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace orbitsphere;

namespace {

enum Exit { kOk = 0, kUsage = 1, kRefused = 2, kCertificate = 3 };

struct RunConfig {
    std::string spec_path;
    int depth = 3;
    int radius = 6;
    std::size_t samples = 200;
    std::string out = "orbitsphere-out";
    std::string element;
    std::string sequence;
    unsigned seed = 20240601u;
    std::size_t budget = 1000000;
};

class CertificateFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

ordered_json leaf_end_json(const Leaf& l, int arm) {
    ordered_json j;
    j["kind"] = kind_name(l.kind);
    j["arm"] = arm;
    j["singular"] = l.singular();
    if (l.at_vertex()) j["vertex"] = l.vertex;
    j["level"] = l.level.str();
    return j;
}

ordered_json validate_json(const FlowSpec& spec, const ValidationReport& v) {
    ordered_json j;
    j["ok"] = v.ok;
    j["model"] = spec.model;
    j["genus"] = v.genus;
    j["computed_genus"] = v.computed_genus;
    j["primitivity_power"] = v.primitivity_power;
    ordered_json census = ordered_json::object();
    for (const auto& [p, n] : v.census) census[std::to_string(p)] = n;
    j["prong_census"] = census;
    j["errors"] = v.errors;
    return j;
}

ordered_json boundary_flat(FlowModel& M, const RunConfig& cfg) {
    BoundarySample bs = boundary_sample(M, cfg.depth, cfg.samples);
    ordered_json j;
    j["model"] = "flat";
    j["depth"] = bs.depth;
    j["product_region"] = bs.product;
    j["size"] = bs.points.size();
    int quadrants = 0;
    ordered_json pts = ordered_json::array();
    for (const auto& p : bs.points) {
        ordered_json q;
        q["id"] = p.id;
        q["class"] = class_name(p.cls);
        if (p.end) {
            const Leaf& l = bs.circle.leaves[p.end->leaf];
            q["leaf_end"] = leaf_end_json(l, p.end->arm);
            q["certificate"] = {{"depth", bs.depth}, {"seed_tile", bs.circle.seed_tile[p.end->leaf]}};
        } else {
            ++quadrants;
            q["leaf_end"] = nullptr;
            q["certificate"] = {{"depth", bs.depth}, {"product_region", true}};
        }
        pts.push_back(q);
    }
    j["quadrant_points"] = quadrants;
    auto fits = detect_perfect_fits(M, std::min(cfg.depth, 4));
    j["perfect_fits"] = fits.size();
    j["points"] = pts;
    return j;
}

ordered_json boundary_skewed(const FlowSpec& spec, const RunConfig& cfg) {
    SkewedModel S(spec);
    std::vector<SkewedModel::Ray> rays;
    long span = 4L * cfg.depth;
    for (Kind k : {Kind::Stable, Kind::Unstable})
        for (long i = -span; i <= span; ++i)
            for (bool toward : {true, false}) rays.push_back({k, rat(i, 4), toward});
    // Rays of a perfect fit share their end; order one representative per end.
    std::vector<SkewedModel::BoundaryPoint> ends;
    std::vector<std::vector<int>> members;
    for (std::size_t i = 0; i < rays.size(); ++i) {
        auto b = SkewedModel::end_of(rays[i]);
        auto it = std::find(ends.begin(), ends.end(), b);
        if (it == ends.end()) {
            ends.push_back(b);
            members.push_back({static_cast<int>(i)});
        } else {
            members[it - ends.begin()].push_back(static_cast<int>(i));
        }
    }
    std::vector<SkewedModel::Ray> reps;
    for (const auto& m : members) reps.push_back(rays[m.front()]);
    ordered_json pts = ordered_json::array();
    for (int e : S.circular_order(reps)) {
        ordered_json q;
        q["id"] = pts.size();
        bool fit = false;
        ordered_json le = ordered_json::array();
        for (int r : members[e]) {
            fit = fit || rays[r].kind != rays[members[e].front()].kind;
            le.push_back({{"kind", kind_name(rays[r].kind)}, {"level", rays[r].level.get_str()}});
        }
        q["class"] = class_name(fit ? PointClass::PerfectFitEndpoint : PointClass::SliceNeighborhood);
        q["side"] = ends[e].side;
        q["a"] = ends[e].a.get_str();
        q["leaf_ends"] = le;
        q["certificate"] = {{"depth", cfg.depth}, {"exact", true}};
        pts.push_back(q);
    }
    ordered_json j;
    j["model"] = "skewed";
    j["depth"] = cfg.depth;
    j["size"] = pts.size();
    j["perfect_fits"] = S.detect_perfect_fits(cfg.depth).size();
    j["points"] = pts;
    return j;
}

ordered_json quotient_run(FlowModel& M, const RunConfig& cfg) {
    Leaves& L = M.leaves();
    CircleBuilder B(L);
    B.add_ball_seeds(M.cover().base(), cfg.depth);
    CircleApprox circle = B.build();
    ChordSystem cs = gluing_pairs(M, circle, std::min(cfg.depth, 4));
    QuotientComplex q = build_quotient(cs);
    fs::create_directories(cfg.out);
    write_chords_svg(cs, (fs::path(cfg.out) / "chords.svg").string());
    PeanoSample ps = peano_sample(q, cfg.samples, cfg.seed);
    write_curve_svg(ps, (fs::path(cfg.out) / "curve.svg").string());
    write_complex_json(q, (fs::path(cfg.out) / "complex.json").string());
    std::map<int, int> fiber;
    for (int c : q.class_of) ++fiber[c];
    int max_fiber = 0;
    for (const auto& [c, n] : fiber) max_fiber = std::max(max_fiber, n);
    ordered_json j;
    j["depth"] = cfg.depth;
    j["circle_size"] = circle.size();
    j["vertices"] = q.vertex_count();
    j["edges"] = q.edges.size();
    j["faces"] = q.faces.size();
    j["euler"] = q.euler;
    j["connected"] = q.connected;
    j["links_ok"] = q.links_ok;
    j["sphere"] = q.sphere();
    j["p_max"] = cs.p_max;
    j["max_fiber"] = max_fiber;
    j["census"] = q.census;
    j["artifacts"] = {"chords.svg", "curve.svg", "complex.json"};
    if (!q.sphere())
        throw CertificateFailure("sphere certificate failed: euler " + std::to_string(q.euler) +
                                 (q.failing_vertex >= 0 ? ", bad link at vertex " + std::to_string(q.failing_vertex) : ""));
    return j;
}

ordered_json element_json(FlowModel& M, const GroupElem& g, const RunConfig& cfg) {
    ordered_json j;
    j["element"] = element_string(g);
    ElementClass cls = classify_element(M, g, cfg.radius);
    j["class"] = cls.name();
    j["witness"] = cls.witness;
    if (cls.kind != ElementKind::PeriodicSingular && cls.kind != ElementKind::PeriodicRegular) return j;
    FixedPointReport fp = fixed_points_on_circle(M, g, cfg.depth);
    ordered_json f;
    f["status"] = tri_name(fp.status);
    f["exponent"] = fp.exponent;
    f["count"] = fp.ends.size();
    f["circle_size"] = fp.circle_size;
    f["alternating"] = fp.alternating;
    f["neighbors"] = fp.neighbors;
    f["converged"] = fp.converged;
    ordered_json ends = ordered_json::array();
    for (const auto& e : fp.ends)
        ends.push_back({{"kind", kind_name(e.kind)}, {"arm", e.arm}, {"position", e.position},
                        {"role", e.attracting ? "attracting" : "repelling"}});
    f["ends"] = ends;
    if (!fp.note.empty()) f["note"] = fp.note;
    j["fixed_points"] = f;
    SourceSinkReport ss = source_sink_on_sphere(M, g, std::min(cfg.depth, 3), cfg.samples);
    ordered_json s;
    s["status"] = tri_name(ss.status);
    s["source"] = ss.source;
    s["sink"] = ss.sink;
    s["source_kind"] = kind_name(ss.source_kind);
    s["distinct"] = ss.distinct;
    s["grid"] = ss.grid;
    s["contracted"] = ss.contracted;
    if (!ss.note.empty()) s["note"] = ss.note;
    j["source_sink"] = s;
    return j;
}

ordered_json dynamics_run(FlowModel& M, const RunConfig& cfg) {
    ordered_json j;
    std::string elem = cfg.element;
    if (elem.empty()) {
        const GeneratorDecl* mono = M.spec().monodromy();
        elem = mono ? mono->name : "e";
    }
    if (!cfg.sequence.empty()) {
        ordered_json seq = ordered_json::array();
        for (int n = 1; n <= 3; ++n) {
            std::string w = cfg.sequence;
            for (std::size_t at = w.find("^n"); at != std::string::npos; at = w.find("^n"))
                w.replace(at, 2, "^" + std::to_string(n));
            seq.push_back(element_json(M, parse_element(M, w), cfg));
        }
        j["sequence"] = seq;
    } else {
        j["report"] = element_json(M, parse_element(M, elem), cfg);
    }
    ordered_json con = ordered_json::array();
    int resolved = 0;
    for (const auto& p : conical_samples(M)) {
        ConicalWitness w = conical_witness(M, p, std::min(cfg.depth, 3), 6);
        ordered_json c;
        c["point"] = p.label;
        c["status"] = tri_name(w.status);
        c["method"] = w.method;
        ordered_json seq = ordered_json::array();
        for (const auto& g : w.sequence) seq.push_back(element_string(g));
        c["sequence"] = seq;
        if (w.status == Tri::Yes) {
            c["a"] = w.a;
            c["b"] = w.b;
            ++resolved;
        } else {
            c["budget"] = "word length 6, 6 translate terms";
            c["note"] = w.note;
        }
        con.push_back(c);
    }
    j["conical_witnesses"] = con;
    j["conical_resolved"] = resolved;
    return j;
}

std::size_t budget_from_env(std::size_t fallback) {
    const char* env = std::getenv("ORBITSPHERE_BUDGET");
    if (!env || !*env) return fallback;
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || v == 0) throw CLI::ValidationError("ORBITSPHERE_BUDGET must be a positive integer");
    return static_cast<std::size_t>(v);
}

int emit(const ordered_json& j, int code) {
    std::cout << j.dump(2) << "\n";
    return code;
}

int run_command(const std::string& cmd, const RunConfig& cfg) {
    std::string text = read_file(cfg.spec_path);
    FlowSpec spec;
    try {
        spec = parse_flowspec(text);
    } catch (const ParseError& e) {
        std::cerr << cfg.spec_path << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
        return kUsage;
    }
    ValidationReport v = validate(spec);
    ordered_json out;
    out["command"] = cmd;
    out["spec"] = fs::path(cfg.spec_path).filename().string();
    if (cmd == "validate" || !v.ok) {
        out["validation"] = validate_json(spec, v);
        if (!v.ok)
            for (const auto& e : v.errors) std::cerr << cfg.spec_path << ": " << e << "\n";
        return emit(out, v.ok ? kOk : kUsage);
    }
    bool skewed = spec.model == "skewed";
    if (cmd == "boundary") {
        if (skewed) {
            out["boundary"] = boundary_skewed(spec, cfg);
        } else {
            FlowModel M(spec, cfg.budget);
            out["boundary"] = boundary_flat(M, cfg);
        }
        fs::create_directories(cfg.out);
        write_text(fs::path(cfg.out) / "boundary.json", out["boundary"].dump(2) + "\n");
        return emit(out, kOk);
    }
    if (skewed) {
        SkewedModel S(spec);
        auto fits = S.detect_perfect_fits(std::max(cfg.depth, 1));
        std::string why = fits.empty() ? "skewed model is outside the supported scope"
                                       : "perfect fit detected, certificate " + fits.front().certificate;
        std::cerr << "refused: " << why << "\n";
        out["refused"] = why;
        return emit(out, kRefused);
    }
    FlowModel M(spec, cfg.budget);
    if (cmd == "quotient") {
        out["quotient"] = quotient_run(M, cfg);
        return emit(out, kOk);
    }
    if (cmd == "dynamics") {
        out["dynamics"] = dynamics_run(M, cfg);
        return emit(out, kOk);
    }
    // report
    int code = kOk;
    out["provenance"] = {{"spec_sha256", sha256_hex(text)}, {"depth", cfg.depth},      {"radius", cfg.radius},
                         {"samples", cfg.samples},          {"seed", cfg.seed},        {"tile_budget", cfg.budget},
                         {"word_length", 6}};
    out["validation"] = validate_json(spec, v);
    out["boundary"] = boundary_flat(M, cfg);
    try {
        out["quotient"] = quotient_run(M, cfg);
    } catch (const Refusal& e) {
        std::cerr << "quotient refused: " << e.what() << "\n";
        out["quotient"] = {{"refused", e.what()}};
        code = kRefused;
    } catch (const CertificateFailure& e) {
        std::cerr << e.what() << "\n";
        out["quotient"] = {{"failed", e.what()}};
        code = kCertificate;
    }
    out["dynamics"] = dynamics_run(M, cfg);
    fs::create_directories(cfg.out);
    write_text(fs::path(cfg.out) / "report.json", out.dump(2) + "\n");
    return emit(out, code);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ideal boundaries and sphere quotients of pseudo-Anosov suspension flows", "orbitsphere"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string command;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("spec", cfg.spec_path, "FlowSpec file")->required()->check(CLI::ExistingFile);
        sub->add_option("--depth", cfg.depth, "Combinatorial depth")->check(CLI::Range(1, 12));
        sub->add_option("--radius", cfg.radius, "Ball radius for fixed point searches")->check(CLI::Range(1, 12));
        sub->add_option("--samples", cfg.samples, "Sample count")->check(CLI::PositiveNumber);
        sub->add_option("--out", cfg.out, "Output directory");
        sub->add_option("--element", cfg.element, "Group element, e.g. \"a t^2\"");
        sub->add_option("--sequence", cfg.sequence, "Element pattern with exponent n, e.g. \"t^n\"");
        sub->add_option("--seed", cfg.seed, "Seed for the sphere embedding");
        sub->callback([&command, sub] { command = sub->get_name(); });
    };
    add_common(app.add_subcommand("validate", "Parse and validate a spec"));
    add_common(app.add_subcommand("boundary", "Sample the ideal circle"));
    add_common(app.add_subcommand("quotient", "Build the sphere quotient and its renders"));
    add_common(app.add_subcommand("dynamics", "Analyse the action of a group element"));
    add_common(app.add_subcommand("report", "Run the full pipeline with provenance"));
    if (argc <= 1) {
        std::cerr << app.help();
        return kUsage;
    }
    try {
        app.parse(argc, argv);
        cfg.budget = budget_from_env(cfg.budget);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::cout << app.help();
            return kOk;
        }
        std::cerr << e.what() << "\n" << app.help();
        return kUsage;
    }
    try {
        return run_command(command, cfg);
    } catch (const Refusal& e) {
        std::cerr << "refused: " << e.what() << "\n";
        ordered_json out{{"command", command}, {"refused", e.what()}};
        return emit(out, kRefused);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const CertificateFailure& e) {
        std::cerr << e.what() << "\n";
        return kCertificate;
    } catch (const BudgetExceeded& e) {
        std::cerr << "tile budget exhausted: " << e.what() << "\n";
        return kCertificate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCertificate;
    }
}
