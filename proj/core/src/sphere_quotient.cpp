#include "orbitsphere/sphere_quotient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace orbitsphere {

void check_unlinked(const ChordSystem& cs) {
    for (const auto* sys : {&cs.stable, &cs.unstable}) {
        std::vector<int> label(cs.circle_size, -1), remaining(sys->size());
        for (std::size_t c = 0; c < sys->size(); ++c) {
            for (int e : (*sys)[c].ends) {
                if (label[e] >= 0)
                    throw LinkedChords("chords share an endpoint", label[e], static_cast<int>(c));
                label[e] = static_cast<int>(c);
            }
            remaining[c] = static_cast<int>((*sys)[c].ends.size());
        }
        std::vector<int> stack;
        std::vector<bool> open(sys->size(), false);
        for (std::size_t pos = 0; pos < cs.circle_size; ++pos) {
            int c = label[pos];
            if (c < 0) continue;
            if (!open[c]) {
                open[c] = true;
                stack.push_back(c);
            } else if (stack.back() != c) {
                throw LinkedChords("chords " + std::to_string(stack.back()) + " and " + std::to_string(c) +
                                       " are linked",
                                   stack.back(), c);
            }
            if (--remaining[c] == 0) stack.pop_back();
        }
    }
}

ChordSystem gluing_pairs(const CircleApprox& circle) {
    ChordSystem cs;
    cs.circle_size = circle.size();
    for (std::size_t li = 0; li < circle.leaves.size(); ++li) {
        const Leaf& l = circle.leaves[li];
        Chord ch{l.kind, static_cast<int>(li), {}};
        for (int p : circle.position[li]) ch.ends.push_back(p);
        std::sort(ch.ends.begin(), ch.ends.end());
        cs.p_max = std::max(cs.p_max, static_cast<int>(ch.ends.size()));
        (l.kind == Kind::Stable ? cs.stable : cs.unstable).push_back(std::move(ch));
    }
    check_unlinked(cs);
    return cs;
}

ChordSystem gluing_pairs(FlowModel& M, const CircleApprox& circle, int detector_depth) {
    if (detect_product_region(M, detector_depth))
        throw Refusal("product region detected: suspension Anosov excluded");
    auto fits = detect_perfect_fits(M, detector_depth);
    if (!fits.empty()) throw Refusal("perfect fit detected, certificate " + fits.front().certificate);
    ChordSystem cs = gluing_pairs(circle);
    cs.p_max = std::max(cs.p_max, M.max_prongs());
    return cs;
}

QuotientComplex build_quotient(const ChordSystem& cs, bool verify_unlinked) {
    if (verify_unlinked) check_unlinked(cs);
    const int N = static_cast<int>(cs.circle_size);
    QuotientComplex q;
    q.class_of.assign(N, -1);
    // Contracted stars: each chord becomes one vertex.
    std::vector<std::vector<int>> rotation;  // darts leaving each quotient vertex, counterclockwise
    // Dart 2i leaves position i toward i+1, dart 2i+1 leaves i+1 toward i.
    auto next_dart = [&](int i) { return 2 * i; };
    auto prev_dart = [&](int i) { return 2 * ((i - 1 + N) % N) + 1; };
    for (const auto& ch : cs.stable) {
        int v = static_cast<int>(rotation.size());
        auto& rot = rotation.emplace_back();
        for (int e : ch.ends) {
            q.class_of[e] = v;
            rot.push_back(prev_dart(e));
            rot.push_back(next_dart(e));
        }
        q.class_kind.push_back(1);
    }
    for (const auto& ch : cs.unstable) {
        int v = static_cast<int>(rotation.size());
        auto& rot = rotation.emplace_back();
        for (auto it = ch.ends.rbegin(); it != ch.ends.rend(); ++it) {
            q.class_of[*it] = v;
            rot.push_back(next_dart(*it));
            rot.push_back(prev_dart(*it));
        }
        q.class_kind.push_back(2);
    }
    for (int i = 0; i < N; ++i) {
        if (q.class_of[i] >= 0) continue;
        q.class_of[i] = static_cast<int>(rotation.size());
        rotation.push_back({next_dart(i), prev_dart(i)});
        q.class_kind.push_back(0);
    }
    const int V = static_cast<int>(rotation.size());
    q.census = {{"type1_singleton", 0}, {"type2_stable", 0}, {"type3_unstable", 0}};
    for (int k : q.class_kind)
        ++q.census[k == 0 ? "type1_singleton" : (k == 1 ? "type2_stable" : "type3_unstable")];
    if (N == 0) {
        q.euler = 2;
        q.connected = true;
        q.links_ok = true;
        return q;
    }
    const int D = 2 * N;
    std::vector<int> sigma(D, -1), origin(D, -1);
    for (int v = 0; v < V; ++v) {
        const auto& rot = rotation[v];
        for (std::size_t k = 0; k < rot.size(); ++k) {
            if (sigma[rot[k]] >= 0) throw std::logic_error("dart assigned twice");
            sigma[rot[k]] = rot[(k + 1) % rot.size()];
            origin[rot[k]] = v;
        }
    }
    auto alpha = [](int d) { return d ^ 1; };
    for (int i = 0; i < N; ++i) q.edges.emplace_back(q.class_of[i], q.class_of[(i + 1) % N]);

    std::vector<bool> seen(D, false);
    for (int d0 = 0; d0 < D; ++d0) {
        if (seen[d0]) continue;
        auto& face = q.faces.emplace_back();
        for (int d = d0; !seen[d]; d = sigma[alpha(d)]) {
            seen[d] = true;
            face.push_back(origin[d]);
        }
    }
    q.euler = V - N + static_cast<int>(q.faces.size());

    std::vector<int> parent(V);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& [a, b] : q.edges) parent[find(a)] = find(b);
    q.connected = true;
    for (int v = 0; v < V; ++v) q.connected = q.connected && find(v) == find(0);

    // Link of a vertex: its darts joined by the face corners between them.
    q.links_ok = true;
    for (int v = 0; v < V && q.links_ok; ++v) {
        const auto& rot = rotation[v];
        if (rot.empty()) continue;
        std::size_t steps = 0;
        int d = rot.front();
        do {
            d = sigma[d];
            ++steps;
        } while (d != rot.front() && steps <= rot.size());
        if (steps != rot.size()) {
            q.links_ok = false;
            q.failing_vertex = v;
        }
    }
    return q;
}

std::vector<std::array<double, 3>> sphere_embedding(const QuotientComplex& q, int steps, unsigned seed) {
    const std::size_t V = q.vertex_count();
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::array<double, 3>> x(V);
    auto normalize = [](std::array<double, 3>& p) {
        double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        if (n < 1e-12) {
            p = {1, 0, 0};
            return;
        }
        for (auto& c : p) c /= n;
    };
    for (auto& p : x) {
        p = {gauss(rng), gauss(rng), gauss(rng)};
        normalize(p);
    }
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : q.edges)
        if (e.first != e.second) edges.push_back(e);
    const std::size_t anchors = std::min<std::size_t>(V, 64);
    std::uniform_int_distribution<std::size_t> pick(0, V == 0 ? 0 : V - 1);
    for (int s = 0; s < steps && V > 1; ++s) {
        double eta = 0.05 * (1.0 - static_cast<double>(s) / steps) + 0.005;
        std::vector<std::array<double, 3>> f(V, {0, 0, 0});
        for (const auto& [a, b] : edges)
            for (int c = 0; c < 3; ++c) {
                double d = x[b][c] - x[a][c];
                f[a][c] += d;
                f[b][c] -= d;
            }
        std::vector<std::size_t> sample(anchors);
        for (auto& a : sample) a = anchors == V ? &a - sample.data() : pick(rng);
        double scale = static_cast<double>(V) / static_cast<double>(anchors);
        for (std::size_t i = 0; i < V; ++i)
            for (std::size_t j : sample) {
                if (i == j) continue;
                double d[3], r2 = 1e-6;
                for (int c = 0; c < 3; ++c) {
                    d[c] = x[i][c] - x[j][c];
                    r2 += d[c] * d[c];
                }
                double w = scale * 0.01 / (r2 * std::sqrt(r2));
                for (int c = 0; c < 3; ++c) f[i][c] += w * d[c];
            }
        for (std::size_t i = 0; i < V; ++i) {
            double fn = std::sqrt(f[i][0] * f[i][0] + f[i][1] * f[i][1] + f[i][2] * f[i][2]);
            double lim = fn > 1.0 ? 1.0 / fn : 1.0;
            for (int c = 0; c < 3; ++c) x[i][c] += eta * lim * f[i][c];
            normalize(x[i]);
        }
    }
    return x;
}

PeanoSample peano_sample(const QuotientComplex& q, std::size_t n, unsigned seed) {
    PeanoSample s;
    s.embedding = sphere_embedding(q, 500, seed);
    const std::size_t N = q.class_of.size();
    if (N == 0) return s;
    for (std::size_t j = 0; j < n; ++j) {
        PeanoPoint p;
        p.t = static_cast<double>(j) / static_cast<double>(n);
        p.position = static_cast<int>(std::min(N - 1, j * N / n));
        p.vertex = q.class_of[p.position];
        p.x = s.embedding[p.vertex][0];
        p.y = s.embedding[p.vertex][1];
        p.z = s.embedding[p.vertex][2];
        s.points.push_back(p);
    }
    return s;
}

EquivarianceReport check_equivariance(FlowModel& M, int depth, const std::vector<GroupElem>& elements) {
    EquivarianceReport rep;
    Leaves& L = M.leaves();
    Cover& C = M.cover();
    for (const auto& g : elements) {
        ++rep.elements;
        CircleBuilder base(L);
        base.add_ball_seeds(C.base(), depth);
        std::vector<Leaf> sources = base.leaves();
        CircleBuilder B(L);
        B.add_ball_seeds(C.base(), depth);
        struct Pair {
            int src;
            Leaf image;
            std::vector<int> arm_map;
        };
        std::vector<Pair> pairs;
        for (std::size_t i = 0; i < sources.size(); ++i) {
            try {
                Pair p{static_cast<int>(i), {}, {}};
                p.image = L.image(g, sources[i], &p.arm_map);
                pairs.push_back(std::move(p));
            } catch (const BudgetExceeded&) {
                ++rep.skipped;
            } catch (const OutsideBall&) {
                ++rep.skipped;
            }
        }
        for (const auto& p : pairs) {
            int t = p.image.seed.tile;
            while (t > 0) {
                B.add_ball_seeds(t, 0);
                t = C.tile(t).parent;
            }
            B.add_leaf(p.image);
        }
        CircleApprox c = B.build();
        std::vector<std::pair<int, int>> ends;  // (source position, image position)
        std::map<int, int> leaf_image;
        for (const auto& p : pairs) {
            int si = B.find_leaf(sources[p.src]);
            int ti = B.find_leaf(p.image);
            if (si < 0 || ti < 0) {
                ++rep.class_mismatches;
                continue;
            }
            auto [it, fresh] = leaf_image.emplace(si, ti);
            if (!fresh && it->second != ti) ++rep.class_mismatches;
            for (std::size_t a = 0; a < sources[p.src].arms.size(); ++a) {
                int sa = ray_arm_on(L, {sources[p.src], static_cast<int>(a)}, c.leaves[si]);
                int ta = ray_arm_on(L, {p.image, p.arm_map[a]}, c.leaves[ti]);
                if (sa < 0 || ta < 0) {
                    ++rep.class_mismatches;
                    continue;
                }
                ends.emplace_back(c.pos({si, sa}), c.pos({ti, ta}));
                ++rep.checked;
            }
        }
        std::map<int, int> inverse;
        for (const auto& [s, t] : leaf_image) {
            auto [it, fresh] = inverse.emplace(t, s);
            if (!fresh && it->second != s) ++rep.class_mismatches;
        }
        std::sort(ends.begin(), ends.end());
        std::size_t descents = 0;
        for (std::size_t i = 0; i < ends.size(); ++i)
            if (ends[i].second > ends[(i + 1) % ends.size()].second) ++descents;
        if (descents > 1) rep.order_violations += descents - 1;
    }
    return rep;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path);
}

}  // namespace

void write_chords_svg(const ChordSystem& cs, const std::string& path) {
    const double cx = 260, cy = 260, R = 240;
    const double N = static_cast<double>(std::max<std::size_t>(cs.circle_size, 1));
    auto pt = [&](double pos, double r) {
        double a = 2 * M_PI * pos / N;
        return std::pair(cx + r * std::cos(a), cy - r * std::sin(a));
    };
    std::ostringstream os;
    os.precision(5);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"520\" viewBox=\"0 0 520 520\">\n";
    os << "<circle class=\"boundary\" cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << R
       << "\" fill=\"none\" stroke=\"#222\" stroke-width=\"1.5\"/>\n";
    auto draw = [&](const std::vector<Chord>& chords, const char* cls, const char* color, const char* dash) {
        os << "<g class=\"" << cls << "\" stroke=\"" << color << "\" fill=\"none\" stroke-width=\"0.6\"";
        if (*dash) os << " stroke-dasharray=\"" << dash << "\"";
        os << ">\n";
        for (const auto& ch : chords) {
            auto [mx, my] = std::pair(0.0, 0.0);
            for (int e : ch.ends) {
                auto [x, y] = pt(e, R);
                mx += x / static_cast<double>(ch.ends.size());
                my += y / static_cast<double>(ch.ends.size());
            }
            os << "<path d=\"";
            for (std::size_t k = 0; k < ch.ends.size(); ++k) {
                auto [x, y] = pt(ch.ends[k], R);
                os << "M" << mx << "," << my << " L" << x << "," << y << " ";
            }
            os << "\"/>\n";
        }
        os << "</g>\n";
    };
    draw(cs.stable, "stable", "#1f5fbf", "");
    draw(cs.unstable, "unstable", "#c0392b", "3 2");
    os << "</svg>\n";
    write_file(path, os.str());
}

void write_curve_svg(const PeanoSample& s, const std::string& path) {
    std::ostringstream os;
    os.precision(5);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"520\" viewBox=\"0 0 520 520\">\n";
    os << "<circle cx=\"260\" cy=\"260\" r=\"240\" fill=\"none\" stroke=\"#bbb\"/>\n";
    os << "<polyline class=\"curve\" fill=\"none\" stroke=\"#333\" stroke-width=\"0.5\" points=\"";
    for (const auto& p : s.points) os << 260 + 240 * p.x << "," << 260 - 240 * p.y << " ";
    os << "\"/>\n</svg>\n";
    write_file(path, os.str());
}

std::string complex_json(const QuotientComplex& q) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (std::size_t v = 0; v < q.vertex_count(); ++v) {
        static const char* kinds[] = {"singleton", "stable", "unstable"};
        j["vertices"].push_back({{"id", v}, {"kind", kinds[q.class_kind[v]]}});
    }
    j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : q.edges) j["edges"].push_back({a, b});
    j["faces"] = q.faces;
    j["euler_characteristic"] = q.euler;
    j["connected"] = q.connected;
    j["links_ok"] = q.links_ok;
    j["census"] = q.census;
    j["circle_classes"] = q.class_of;
    return j.dump(1);
}

void write_complex_json(const QuotientComplex& q, const std::string& path) { write_file(path, complex_json(q) + "\n"); }

}  // namespace orbitsphere
