#include "orbitsphere/flowspec.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "orbitsphere/surface.hpp"

namespace orbitsphere {

ParseError::ParseError(int line, int column, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + msg),
      line_(line),
      column_(column) {}

namespace {

struct Token {
    std::string text;
    int column;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
        i = j;
    }
    return out;
}

bool is_ident(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

bool is_int(const std::string& s) {
    if (s.empty()) return false;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    return std::all_of(s.begin() + static_cast<long>(i), s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

const std::set<std::string> kCorners = {"bl", "br", "tl", "tr"};

}  // namespace

FlowSpec parse_flowspec(const std::string& text) {
    FlowSpec spec;
    std::string section;
    std::set<std::string> rect_ids, gen_ids;
    struct Ref {
        std::string id;
        int line, col;
    };
    std::vector<Ref> refs;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    int last_line = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        last_line = lineno;
        auto fail = [&](size_t k, const std::string& msg) -> ParseError {
            int col = k < toks.size() ? toks[k].column : static_cast<int>(line.size()) + 1;
            return ParseError(lineno, col, msg);
        };
        auto expect_count = [&](size_t n) {
            if (toks.size() > n) throw fail(n, "unexpected trailing content '" + toks[n].text + "'");
            if (toks.size() < n) throw fail(toks.size(), "missing field");
        };
        const std::string& t0 = toks[0].text;
        if (t0.front() == '[') {
            if (t0.back() != ']' || toks.size() != 1) throw fail(0, "malformed section header");
            std::string name = t0.substr(1, t0.size() - 2);
            static const std::set<std::string> known = {"rectangles", "gluings",    "singular",
                                                        "transition", "generators", "homeomorphism"};
            if (!known.count(name)) throw fail(0, "unknown section '" + name + "'");
            section = name;
            continue;
        }
        if (section.empty()) {
            if (t0 == "genus") {
                expect_count(2);
                if (!is_int(toks[1].text)) throw fail(1, "genus must be an integer");
                spec.genus = std::stoi(toks[1].text);
            } else if (t0 == "model") {
                expect_count(2);
                if (toks[1].text != "flat" && toks[1].text != "skewed")
                    throw fail(1, "model must be 'flat' or 'skewed'");
                spec.model = toks[1].text;
            } else if (t0 == "dilatation") {
                expect_count(2);
                double v = 0;
                try {
                    v = std::stod(toks[1].text);
                } catch (...) {
                    throw fail(1, "dilatation must be a number");
                }
                if (!(v > 0)) throw fail(1, "dilatation must be positive");
                spec.dilatation = toks[1].text;
            } else {
                throw fail(0, "unknown header key '" + t0 + "'");
            }
        } else if (section == "rectangles") {
            expect_count(1);
            if (!is_ident(t0)) throw fail(0, "invalid identifier '" + t0 + "'");
            if (!rect_ids.insert(t0).second) throw fail(0, "duplicate identifier '" + t0 + "'");
            spec.rectangles.push_back(t0);
        } else if (section == "gluings") {
            if (toks.size() < 3) throw fail(toks.size(), "missing field");
            if (toks.size() > 4) throw fail(4, "unexpected trailing content '" + toks[4].text + "'");
            Gluing g;
            g.from = t0;
            g.side = toks[1].text;
            g.to = toks[2].text;
            if (g.side != "right" && g.side != "top") throw fail(1, "side must be 'right' or 'top'");
            if (toks.size() == 4) {
                if (toks[3].text == "-") g.flipped = true;
                else if (toks[3].text != "+") throw fail(3, "orientation flag must be + or -");
            }
            refs.push_back({g.from, lineno, toks[0].column});
            refs.push_back({g.to, lineno, toks[2].column});
            spec.gluings.push_back(g);
        } else if (section == "singular") {
            expect_count(2);
            auto dot = t0.find('.');
            if (dot == std::string::npos || !kCorners.count(t0.substr(dot + 1)))
                throw fail(0, "vertex must be <rectangle>.<bl|br|tl|tr>");
            if (!is_int(toks[1].text)) throw fail(1, "prong count must be an integer");
            refs.push_back({t0.substr(0, dot), lineno, toks[0].column});
            for (const auto& s : spec.singular)
                if (s.vertex == t0) throw fail(0, "duplicate identifier '" + t0 + "'");
            spec.singular.push_back({t0, std::stoi(toks[1].text)});
        } else if (section == "transition") {
            if (toks.size() < 2 || toks[1].text != ":") throw fail(1, "expected ':'");
            if (spec.transition.count(t0)) throw fail(0, "duplicate identifier '" + t0 + "'");
            refs.push_back({t0, lineno, toks[0].column});
            std::vector<Crossing> seq;
            for (size_t k = 2; k < toks.size(); ++k) {
                std::string s = toks[k].text;
                Crossing c;
                if (s.back() == '+' || s.back() == '-') {
                    c.orientation = s.back();
                    s.pop_back();
                }
                if (!is_ident(s)) throw fail(k, "invalid identifier '" + s + "'");
                c.target = s;
                refs.push_back({s, lineno, toks[k].column});
                seq.push_back(c);
            }
            spec.transition[t0] = seq;
        } else if (section == "generators") {
            if (toks.size() < 3 || toks[1].text != "=") throw fail(1, "expected '='");
            if (!is_ident(t0)) throw fail(0, "invalid identifier '" + t0 + "'");
            if (!gen_ids.insert(t0).second) throw fail(0, "duplicate identifier '" + t0 + "'");
            GeneratorDecl g{t0, {}};
            for (size_t k = 2; k < toks.size(); ++k) g.tokens.push_back(toks[k].text);
            spec.generators.push_back(g);
        } else if (section == "homeomorphism") {
            expect_count(2);
            try {
                Breakpoint b{parse_rational(t0).get_str(), parse_rational(toks[1].text).get_str()};
                spec.homeomorphism.push_back(b);
            } catch (const std::invalid_argument&) {
                throw fail(0, "breakpoint must be two rationals");
            }
        }
    }
    if (spec.rectangles.empty()) throw ParseError(last_line, 1, "at least one rectangle required");
    for (const auto& r : refs)
        if (!rect_ids.count(r.id))
            throw ParseError(r.line, r.col, "dangling reference to rectangle '" + r.id + "'");
    return spec;
}

FlowSpec load_flowspec(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_flowspec(ss.str());
}

FlowSpec FlowSpec::canonical() const {
    FlowSpec c = *this;
    std::sort(c.rectangles.begin(), c.rectangles.end());
    std::sort(c.gluings.begin(), c.gluings.end(), [](const Gluing& a, const Gluing& b) {
        return std::tie(a.from, a.side, a.to, a.flipped) < std::tie(b.from, b.side, b.to, b.flipped);
    });
    std::sort(c.singular.begin(), c.singular.end(),
              [](const SingularDecl& a, const SingularDecl& b) { return a.vertex < b.vertex; });
    std::sort(c.generators.begin(), c.generators.end(),
              [](const GeneratorDecl& a, const GeneratorDecl& b) { return a.name < b.name; });
    std::sort(c.homeomorphism.begin(), c.homeomorphism.end(),
              [](const Breakpoint& a, const Breakpoint& b) {
                  return parse_rational(a.x) < parse_rational(b.x);
              });
    return c;
}

bool FlowSpec::structurally_equal(const FlowSpec& o) const {
    FlowSpec a = canonical(), b = o.canonical();
    return a.genus == b.genus && a.model == b.model && a.dilatation == b.dilatation &&
           a.rectangles == b.rectangles && a.gluings == b.gluings && a.singular == b.singular &&
           a.transition == b.transition && a.generators == b.generators &&
           a.homeomorphism == b.homeomorphism;
}

namespace {
bool is_twist_token(const std::string& s) {
    return s.size() >= 2 && (s[0] == 'H' || s[0] == 'V') && is_int(s.substr(1));
}
}  // namespace

const GeneratorDecl* FlowSpec::monodromy() const {
    for (const auto& g : generators)
        if (!g.tokens.empty() && std::all_of(g.tokens.begin(), g.tokens.end(), is_twist_token))
            return &g;
    return nullptr;
}

std::string serialize(const FlowSpec& spec) {
    FlowSpec c = spec.canonical();
    std::ostringstream os;
    os << "genus " << c.genus << "\n";
    os << "model " << c.model << "\n";
    if (c.dilatation) os << "dilatation " << *c.dilatation << "\n";
    os << "[rectangles]\n";
    for (const auto& r : c.rectangles) os << r << "\n";
    os << "[gluings]\n";
    for (const auto& g : c.gluings)
        os << g.from << " " << g.side << " " << g.to << (g.flipped ? " -" : "") << "\n";
    os << "[singular]\n";
    for (const auto& s : c.singular) os << s.vertex << " " << s.prongs << "\n";
    os << "[transition]\n";
    for (const auto& [k, seq] : c.transition) {
        os << k << " :";
        for (const auto& x : seq) os << " " << x.target << x.orientation;
        os << "\n";
    }
    os << "[generators]\n";
    for (const auto& g : c.generators) {
        os << g.name << " =";
        for (const auto& t : g.tokens) os << " " << t;
        os << "\n";
    }
    if (!c.homeomorphism.empty()) {
        os << "[homeomorphism]\n";
        for (const auto& b : c.homeomorphism) os << b.x << " " << b.y << "\n";
    }
    return os.str();
}

int primitivity_exponent(const std::vector<std::vector<long>>& m) {
    size_t k = m.size();
    if (k == 0) return 0;
    std::vector<std::vector<char>> base(k, std::vector<char>(k, 0));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) base[i][j] = m[i][j] > 0;
    auto p = base;
    size_t limit = (k - 1) * (k - 1) + 1;
    for (size_t e = 1; e <= limit; ++e) {
        bool all = true;
        for (size_t i = 0; i < k && all; ++i)
            for (size_t j = 0; j < k && all; ++j) all = p[i][j];
        if (all) return static_cast<int>(e);
        std::vector<std::vector<char>> q(k, std::vector<char>(k, 0));
        for (size_t i = 0; i < k; ++i)
            for (size_t l = 0; l < k; ++l)
                if (p[i][l])
                    for (size_t j = 0; j < k; ++j)
                        if (base[l][j]) q[i][j] = 1;
        p = std::move(q);
    }
    return 0;
}

std::vector<std::vector<long>> transition_matrix(
    const FlowSpec& spec, const std::map<std::string, std::vector<Crossing>>& table) {
    auto rects = spec.rectangles;
    std::sort(rects.begin(), rects.end());
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < rects.size(); ++i) idx[rects[i]] = i;
    std::vector<std::vector<long>> m(rects.size(), std::vector<long>(rects.size(), 0));
    for (const auto& [src, seq] : table) {
        auto is = idx.find(src);
        if (is == idx.end()) continue;
        for (const auto& c : seq) {
            auto it = idx.find(c.target);
            if (it != idx.end()) ++m[is->second][it->second];
        }
    }
    return m;
}

namespace {

void validate_skewed(const FlowSpec& spec, ValidationReport& rep) {
    auto err = [&](const std::string& e) { rep.errors.push_back(e); };
    rep.genus = spec.genus;
    auto c = spec.canonical();
    if (c.homeomorphism.size() < 2) {
        err("skewed model needs at least two homeomorphism breakpoints");
        return;
    }
    for (size_t i = 1; i < c.homeomorphism.size(); ++i) {
        if (parse_rational(c.homeomorphism[i].y) <= parse_rational(c.homeomorphism[i - 1].y))
            err("homeomorphism breakpoints must be strictly increasing");
    }
    Rational dx = parse_rational(c.homeomorphism.back().x) - parse_rational(c.homeomorphism.front().x);
    Rational dy = parse_rational(c.homeomorphism.back().y) - parse_rational(c.homeomorphism.front().y);
    if (dx != 1 || dy != 1) err("homeomorphism must commute with unit translation");
    for (const auto& s : spec.singular)
        if (s.prongs < 2) err("prong count below 2 at " + s.vertex);
}

}  // namespace

ValidationReport validate(const FlowSpec& spec) {
    ValidationReport rep;
    auto err = [&](const std::string& e) { rep.errors.push_back(e); };
    if (spec.model == "skewed") {
        validate_skewed(spec, rep);
        rep.ok = rep.errors.empty();
        return rep;
    }
    rep.genus = spec.genus;
    for (const auto& s : spec.singular)
        if (s.prongs < 2) err("prong count below 2 at " + s.vertex);
    if (spec.genus < 1) err("declared genus must be at least 1");

    std::map<std::pair<std::string, std::string>, int> out_count, in_count;
    for (const auto& g : spec.gluings) {
        if (g.flipped) err("unsupported gluing orientation at " + g.from + " " + g.side + " " + g.to);
        ++out_count[{g.from, g.side}];
        ++in_count[{g.to, g.side}];
    }
    bool structural = true;
    for (const auto& r : spec.rectangles) {
        for (const std::string side : {"right", "top"}) {
            int o = out_count[{r, side}];
            int i = in_count[{r, side}];
            std::string opposite = side == "right" ? "left" : "bottom";
            if (o != 1) {
                err("side " + side + " of " + r + " glued " + std::to_string(o) + " times");
                structural = false;
            }
            if (i != 1) {
                err("side " + opposite + " of " + r + " glued " + std::to_string(i) + " times");
                structural = false;
            }
        }
    }
    // Prong census from declarations; Euler-Poincare uses it.
    long index_sum = 0;
    for (const auto& s : spec.singular) {
        if (s.prongs >= 2) {
            ++rep.census[s.prongs];
            index_sum += s.prongs - 2;
        }
    }
    if (spec.genus >= 0 && index_sum != 4L * spec.genus - 4)
        err("Euler-Poincare mismatch: sum of (p-2) is " + std::to_string(index_sum) +
            " but 4g-4 is " + std::to_string(4L * spec.genus - 4));

    auto declared = transition_matrix(spec, spec.transition);
    rep.primitivity_power = primitivity_exponent(declared);
    if (rep.primitivity_power == 0) err("transition not primitive");
    for (const auto& r : spec.rectangles)
        if (!spec.transition.count(r)) err("transition missing for " + r);

    if (structural) {
        try {
            Surface S = Surface::from_spec(spec);
            rep.computed_genus = S.euler_genus();
            if (rep.computed_genus != spec.genus)
                err("declared genus " + std::to_string(spec.genus) + " but surface has genus " +
                    std::to_string(rep.computed_genus));
            // Census agreement with the cone-point structure.
            std::map<int, int> decl_prongs;
            for (const auto& s : spec.singular) {
                auto dot = s.vertex.find('.');
                int sq = S.index_of(s.vertex.substr(0, dot));
                int v = S.vertex_of_corner(sq, s.vertex.substr(dot + 1));
                if (decl_prongs.count(v)) err("vertex " + s.vertex + " declared twice");
                decl_prongs[v] = s.prongs;
            }
            for (int v = 0; v < S.vertex_count(); ++v) {
                int p = 2 * static_cast<int>(S.vertex_cycle(v).size());
                std::string vname = S.name(S.vertex_cycle(v).front()) + ".bl";
                auto it = decl_prongs.find(v);
                if (p > 2 && (it == decl_prongs.end() || it->second != p))
                    err("singularity census mismatch at " + vname + ": surface has " +
                        std::to_string(p) + " prongs");
                if (p == 2 && it != decl_prongs.end())
                    err("vertex " + vname + " declared singular but is regular");
            }
            auto computed = S.computed_transition();
            for (int q = 0; q < S.size(); ++q) {
                std::vector<Crossing> seq;
                for (int j : computed[q]) seq.push_back({S.name(j), '+'});
                rep.computed_transition[S.name(q)] = seq;
                auto it = spec.transition.find(S.name(q));
                if (it != spec.transition.end() && it->second != seq)
                    err("transition table disagrees with monodromy at " + S.name(q));
            }
            for (const auto& g : spec.generators) {
                if (&g == spec.monodromy()) continue;
                if (g.tokens.size() != 1) {
                    err("generator " + g.name + " must be a single R/L/U/D word");
                    continue;
                }
                int sq = S.base();
                bool ok = true;
                for (char ch : g.tokens[0]) {
                    if (std::string("RLUD").find(ch) == std::string::npos) {
                        ok = false;
                        break;
                    }
                    sq = S.neighbor(sq, dir_from_letter(ch));
                }
                if (!ok) err("generator " + g.name + " must be a single R/L/U/D word");
                else if (sq != S.base()) err("generator " + g.name + " is not a loop at the base square");
            }
        } catch (const std::exception& e) {
            err(e.what());
        }
    }
    rep.ok = rep.errors.empty();
    return rep;
}

}  // namespace orbitsphere
