#include "orbitsphere/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace orbitsphere {

char dir_letter(Dir d) { return "RULD"[d]; }

Dir dir_from_letter(char c) {
    switch (c) {
        case 'R': return kRight;
        case 'U': return kUp;
        case 'L': return kLeft;
        case 'D': return kDown;
        default: throw std::invalid_argument(std::string("bad direction letter ") + c);
    }
}

Mat2 Twist::matrix() const {
    if (axis == 'H') return {1, shear, 0, 1};
    return {1, 0, shear, 1};
}

void squarefree_split(long n, long& k, long& d) {
    k = 1;
    d = n;
    for (long p = 2; p * p <= d; ++p) {
        while (d % (p * p) == 0) {
            d /= p * p;
            k *= p;
        }
    }
}

Vec2 Surface::reference_point() {
    return {QuadNum(rat(17, 53)), QuadNum(rat(29, 61))};
}

int Surface::index_of(const std::string& n) const {
    auto it = std::find(names_.begin(), names_.end(), n);
    if (it == names_.end()) throw std::invalid_argument("unknown rectangle " + n);
    return static_cast<int>(it - names_.begin());
}

int Surface::vertex_of_corner(int sq, const std::string& corner) const {
    if (corner == "bl") return bl_vertex_[sq];
    if (corner == "br") return bl_vertex_[neighbor(sq, kRight)];
    if (corner == "tl") return bl_vertex_[neighbor(sq, kUp)];
    if (corner == "tr") return bl_vertex_[neighbor(neighbor(sq, kRight), kUp)];
    throw std::invalid_argument("bad corner " + corner);
}

int Surface::euler_genus() const {
    // V - E + F with F = n squares, E = 2n edges.
    int chi = vertex_count() - size();
    return (2 - chi) / 2;
}

std::vector<int> Surface::cylinder_widths(char axis) const {
    Dir d = axis == 'H' ? kRight : kUp;
    std::vector<char> seen(size(), 0);
    std::vector<int> widths;
    for (int q = 0; q < size(); ++q) {
        if (seen[q]) continue;
        int w = 0;
        for (int x = q; !seen[x]; x = neighbor(x, d)) {
            seen[x] = 1;
            ++w;
        }
        widths.push_back(w);
    }
    return widths;
}

Surface Surface::from_spec(const FlowSpec& raw) {
    FlowSpec spec = raw.canonical();
    Surface S;
    S.names_ = spec.rectangles;
    int n = S.size();
    S.nbr_.assign(n, {-1, -1, -1, -1});
    for (const auto& g : spec.gluings) {
        int a = S.index_of(g.from), b = S.index_of(g.to);
        if (g.side == "right") {
            S.nbr_[a][kRight] = b;
            S.nbr_[b][kLeft] = a;
        } else {
            S.nbr_[a][kUp] = b;
            S.nbr_[b][kDown] = a;
        }
    }
    for (int q = 0; q < n; ++q)
        for (int d = 0; d < 4; ++d)
            if (S.nbr_[q][d] < 0) throw std::invalid_argument("side of " + S.names_[q] + " unglued");
    // Connectivity.
    std::vector<char> seen(n, 0);
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!bfs.empty()) {
        int q = bfs.front();
        bfs.pop();
        for (int d = 0; d < 4; ++d) {
            int x = S.nbr_[q][d];
            if (!seen[x]) {
                seen[x] = 1;
                ++reached;
                bfs.push(x);
            }
        }
    }
    if (reached != n) throw std::invalid_argument("surface not connected");
    // Vertices: cycles of q -> up(right(down(left(q)))).
    S.bl_vertex_.assign(n, -1);
    for (int q = 0; q < n; ++q) {
        if (S.bl_vertex_[q] >= 0) continue;
        std::vector<int> cyc;
        int x = q;
        do {
            S.bl_vertex_[x] = static_cast<int>(S.vertex_cycles_.size());
            cyc.push_back(x);
            x = S.nbr_[S.nbr_[S.nbr_[S.nbr_[x][kLeft]][kDown]][kRight]][kUp];
        } while (x != q);
        S.vertex_cycles_.push_back(cyc);
    }
    S.cone_m_ = static_cast<int>(S.vertex_cycles_[0].size());
    for (const auto& c : S.vertex_cycles_)
        if (static_cast<int>(c.size()) != S.cone_m_)
            throw std::invalid_argument("non-uniform cone angles are not supported");

    const GeneratorDecl* mono = spec.monodromy();
    if (!mono) throw std::invalid_argument("no monodromy generator (H/V twist word) declared");
    Mat2 A;
    for (const auto& tok : mono->tokens) {
        Twist tw{tok[0], std::stol(tok.substr(1))};
        for (int w : S.cylinder_widths(tw.axis))
            if (tw.shear % w != 0)
                throw std::invalid_argument("twist " + tok + " shear not a multiple of cylinder width " +
                                            std::to_string(w));
        S.twists_.push_back(tw);
        A = A * tw.matrix();
    }
    S.A_ = A;
    long T = A.trace();
    if (A.det() != 1 || T <= 2)
        throw std::invalid_argument("monodromy not pseudo-Anosov: trace " + std::to_string(T));
    long k = 1, d = 1;
    squarefree_split(T * T - 4, k, d);
    S.field_d_ = static_cast<int>(d);
    QuadNum half_t(rat(T, 2));
    QuadNum root(Rational(0), rat(k, 2), S.field_d_);
    S.lambda_ = half_t + root;
    QuadNum mu = half_t - root;
    // Eigenvector (b, ev - a) when b != 0, else (ev - d, c).
    auto slope = [&](const QuadNum& ev) {
        if (A.b != 0) return (ev - QuadNum(A.a)) / QuadNum(A.b);
        return QuadNum(A.c) / (ev - QuadNum(A.d));
    };
    S.s_stable_ = slope(S.lambda_);
    S.s_unstable_ = slope(mu);
    return S;
}

SurfacePoint Surface::apply_twist(const Twist& tw, const SurfacePoint& p, bool inv) const {
    Dir along = tw.axis == 'H' ? kRight : kUp;
    // Cylinder through p and index of p's square in it.
    std::vector<int> cyl;
    int x = p.square;
    do {
        cyl.push_back(x);
        x = neighbor(x, along);
    } while (x != p.square);
    long w = static_cast<long>(cyl.size());
    QuadNum shear(inv ? -tw.shear : tw.shear);
    QuadNum along_coord = tw.axis == 'H' ? p.local.x : p.local.y;
    QuadNum across = tw.axis == 'H' ? p.local.y : p.local.x;
    QuadNum X = along_coord + shear * across;
    long f = X.floor();
    QuadNum frac = X - QuadNum(f);
    long idx = ((f % w) + w) % w;
    SurfacePoint r;
    r.square = cyl[idx];
    if (tw.axis == 'H') r.local = {frac, p.local.y};
    else r.local = {p.local.x, frac};
    return r;
}

SurfacePoint Surface::f(const SurfacePoint& p) const {
    SurfacePoint q = p;
    for (auto it = twists_.rbegin(); it != twists_.rend(); ++it) q = apply_twist(*it, q, false);
    return q;
}

SurfacePoint Surface::f_inverse(const SurfacePoint& p) const {
    SurfacePoint q = p;
    for (const auto& tw : twists_) q = apply_twist(tw, q, true);
    return q;
}

SurfacePoint Surface::walk(const SurfacePoint& p, const Vec2& w, std::vector<int>* entered) const {
    int sq = p.square;
    Vec2 end = walk_segment(p.local, w, [&](Dir d, const Vec2&) {
        sq = neighbor(sq, d);
        if (entered) entered->push_back(sq);
    });
    return {sq, end};
}

std::vector<std::vector<int>> Surface::computed_transition() const {
    std::vector<std::vector<int>> out(size());
    const Vec2 dual_edges[2] = {A_.apply({QuadNum(1L), QuadNum(0L)}),
                                A_.apply({QuadNum(0L), QuadNum(1L)})};
    for (int q = 0; q < size(); ++q) {
        SurfacePoint start = f({q, reference_point()});
        for (const Vec2& w : dual_edges) {
            std::vector<int> entered;
            walk(start, w, &entered);
            out[q].push_back(start.square);
            if (!entered.empty()) entered.pop_back();
            out[q].insert(out[q].end(), entered.begin(), entered.end());
        }
    }
    return out;
}

}  // namespace orbitsphere
