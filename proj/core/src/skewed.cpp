#include "orbitsphere/skewed.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace orbitsphere {

namespace {

Rational floor_q(const Rational& x) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Rational(f);
}

Rational interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys, const Rational& x) {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) throw std::out_of_range("point outside the map's domain");
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    if (xs[i] == x) return ys[i];
    if (i == 0) throw std::out_of_range("point outside the map's domain");
    Rational t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    Rational y = ys[i - 1] + t * (ys[i] - ys[i - 1]);
    y.canonicalize();
    return y;
}

}  // namespace

PLMap::PLMap(std::vector<Rational> xs, std::vector<Rational> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() < 2 || xs_.size() != ys_.size()) throw std::invalid_argument("PL map needs two breakpoints");
    for (std::size_t i = 1; i < xs_.size(); ++i)
        if (xs_[i] <= xs_[i - 1] || ys_[i] <= ys_[i - 1]) throw std::invalid_argument("PL map must increase");
}

PLMap PLMap::translation(const Rational& s, const Rational& lo, const Rational& hi) {
    Rational a = lo + s, b = hi + s;
    a.canonicalize();
    b.canonicalize();
    return PLMap({lo, hi}, {a, b});
}

Rational PLMap::operator()(const Rational& x) const { return interpolate(xs_, ys_, x); }

PLMap PLMap::after(const PLMap& g) const {
    Rational lo = std::max(g.lo(), interpolate(g.ys_, g.xs_, std::max(this->lo(), g.ys_.front())));
    Rational hi = std::min(g.hi(), interpolate(g.ys_, g.xs_, std::min(this->hi(), g.ys_.back())));
    std::vector<Rational> pts{lo, hi};
    for (const auto& x : g.xs_)
        if (x > lo && x < hi) pts.push_back(x);
    for (const auto& y : xs_)
        if (y > g.ys_.front() && y < g.ys_.back()) {
            Rational x = interpolate(g.ys_, g.xs_, y);
            if (x > lo && x < hi) pts.push_back(x);
        }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<Rational> ys;
    for (const auto& x : pts) ys.push_back((*this)(g(x)));
    return PLMap(pts, ys);
}

std::vector<Rational> PLMap::fixed_points(bool* continuum) const {
    std::vector<Rational> out;
    if (continuum) *continuum = false;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        Rational d0 = ys_[i] - xs_[i];
        if (d0 == 0) out.push_back(xs_[i]);
        if (i + 1 == xs_.size()) break;
        Rational d1 = ys_[i + 1] - xs_[i + 1];
        if (d0 == 0 && d1 == 0 && continuum) *continuum = true;
        if ((d0 > 0 && d1 < 0) || (d0 < 0 && d1 > 0)) {
            Rational x = xs_[i] + d0 * (xs_[i + 1] - xs_[i]) / (d0 - d1);
            x.canonicalize();
            out.push_back(x);
        }
    }
    return out;
}

SkewedModel::SkewedModel(const FlowSpec& spec) {
    if (spec.model != "skewed") throw std::invalid_argument("skewed model requires 'model skewed'");
    auto c = spec.canonical();
    for (const auto& b : c.homeomorphism) {
        bx_.push_back(parse_rational(b.x));
        by_.push_back(parse_rational(b.y));
    }
    if (bx_.size() < 2 || bx_.back() - bx_.front() != 1 || by_.back() - by_.front() != 1)
        throw std::invalid_argument("homeomorphism must commute with unit translation");
    period_start_ = bx_.front();
    shift_ = Rational(1, 2);
    for (std::size_t i = 0; i < bx_.size(); ++i) {
        Rational x = bx_[i] + shift_;
        if (h(x) != by_[i] + shift_) throw std::invalid_argument("homeomorphism must commute with the half shift");
    }
}

Rational SkewedModel::h(const Rational& x) const {
    Rational n = floor_q(x - period_start_);
    Rational y = interpolate(bx_, by_, x - n) + n;
    y.canonicalize();
    return y;
}

Rational SkewedModel::h_inverse(const Rational& x) const {
    Rational n = floor_q(x - by_.front());
    Rational y = interpolate(by_, bx_, x - n) + n;
    y.canonicalize();
    return y;
}

SkewedModel::Point SkewedModel::apply(const Elem& g, const Point& x) const {
    Point y = x;
    for (long i = 0; i < g.p; ++i) y = {h(y.a), h(y.b)};
    for (long i = 0; i < -g.p; ++i) y = {h_inverse(y.a), h_inverse(y.b)};
    Rational s = shift_ * g.q;
    y.a += s;
    y.b += s;
    y.a.canonicalize();
    y.b.canonicalize();
    return y;
}

PLMap SkewedModel::power_map(long p, long q, const Rational& lo, const Rational& hi) const {
    long margin = std::labs(p) + std::labs(q) + 2;
    Rational L = lo - margin, H = hi + margin;
    std::vector<Rational> xs, ys;
    for (Rational n = floor_q(L - period_start_); n + period_start_ <= H + 1; n += 1)
        for (std::size_t i = 0; i + 1 < bx_.size(); ++i) {
            xs.push_back(bx_[i] + n);
            ys.push_back(by_[i] + n);
        }
    PLMap step(xs, ys);
    if (p < 0) step = step.inverse();
    PLMap m = PLMap::translation(Rational(0), step.lo(), step.hi());
    for (long i = 0; i < std::labs(p); ++i) m = step.after(m);
    return PLMap::translation(shift_ * q, m(m.lo()), m(m.hi())).after(m);
}

std::vector<SkewedModel::Point> SkewedModel::fixed_points(const Elem& g, long radius) const {
    std::vector<Point> out;
    if (g.p == 0 && g.q == 0) return out;
    Rational lo(-radius), hi(radius + 1);
    PLMap m = power_map(g.p, g.q, lo, hi);
    bool continuum = false;
    std::vector<Rational> fx;
    for (const auto& x : m.fixed_points(&continuum))
        if (x >= lo && x <= hi) fx.push_back(x);
    if (continuum) return out;
    for (const auto& a : fx)
        for (const auto& b : fx) {
            Point p{a, b};
            if (in_orbit_space(p) && a <= Rational(radius)) out.push_back(p);
        }
    return out;
}

std::pair<long, long> SkewedModel::tile_of(const Point& x) {
    Rational a = floor_q(x.a * 4), b = floor_q(x.b * 4);
    return {a.get_num().get_si(), b.get_num().get_si()};
}

std::string SkewedModel::elem_string(const Elem& g) {
    std::ostringstream os;
    bool any = false;
    if (g.p != 0) {
        os << "g";
        if (g.p != 1) os << "^" << g.p;
        any = true;
    }
    if (g.q != 0) {
        if (any) os << " ";
        os << "tau";
        if (g.q != 1) os << "^" << g.q;
        any = true;
    }
    return any ? os.str() : "id";
}

SkewedModel::BoundaryPoint SkewedModel::end_of(const Ray& r) {
    if (r.kind == Kind::Stable) {
        if (r.toward_diagonal) return {0, r.level};
        Rational a = r.level - 1;
        a.canonicalize();
        return {1, a};
    }
    return r.toward_diagonal ? BoundaryPoint{0, r.level} : BoundaryPoint{1, r.level};
}

bool SkewedModel::form_perfect_fit(const Ray& r, const Ray& s) {
    return r.kind != s.kind && end_of(r) == end_of(s);
}

Tri SkewedModel::equivalent_rays(const Ray& r, const Ray& s) const {
    return end_of(r) == end_of(s) ? Tri::Yes : Tri::No;
}

std::vector<int> SkewedModel::circular_order(const std::vector<Ray>& rays) const {
    auto key = [](const BoundaryPoint& p) { return std::pair(p.side, p.side == 0 ? p.a : Rational(-p.a)); };
    std::vector<int> idx(rays.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int x, int y) { return key(end_of(rays[x])) < key(end_of(rays[y])); });
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (end_of(rays[idx[i]]) == end_of(rays[idx[i - 1]]))
            throw CircleError("ideal points not certified distinct");
    auto zero = std::find(idx.begin(), idx.end(), 0);
    std::rotate(idx.begin(), zero, idx.end());
    return idx;
}

std::vector<PerfectFit> SkewedModel::detect_perfect_fits(int depth, int max_word_length) const {
    std::vector<PerfectFit> out;
    if (depth <= 0) return out;
    for (long p = -max_word_length; p <= max_word_length; ++p)
        for (long q = -(max_word_length - std::labs(p)); q <= max_word_length - std::labs(p); ++q) {
            if (p == 0 && q == 0) continue;
            auto fx = fixed_points({p, q}, depth);
            std::vector<std::pair<long, long>> tiles;
            for (const auto& x : fx) {
                auto t = tile_of(x);
                if (std::find(tiles.begin(), tiles.end(), t) == tiles.end()) tiles.push_back(t);
            }
            if (tiles.size() < 2) continue;
            PerfectFit pf;
            pf.certificate = elem_string({p, q});
            for (const auto& t : tiles)
                pf.fixed.push_back("(" + std::to_string(t.first) + "," + std::to_string(t.second) + ")");
            out.push_back(std::move(pf));
        }
    return out;
}

}  // namespace orbitsphere
