#pragma once

#include <string>
#include <utility>
#include <vector>

#include "orbitsphere/flowspec.hpp"
#include "orbitsphere/ideal_circle.hpp"

namespace orbitsphere {

// Increasing piecewise-linear map on a closed interval, exact over Q.
class PLMap {
public:
    PLMap() = default;
    PLMap(std::vector<Rational> xs, std::vector<Rational> ys);
    static PLMap translation(const Rational& s, const Rational& lo, const Rational& hi);

    Rational lo() const { return xs_.front(); }
    Rational hi() const { return xs_.back(); }
    bool contains(const Rational& x) const { return x >= lo() && x <= hi(); }
    Rational operator()(const Rational& x) const;
    PLMap inverse() const { return PLMap(ys_, xs_); }
    // (f.after(g))(x) = f(g(x)) on the largest interval where it is defined.
    PLMap after(const PLMap& g) const;
    // Isolated fixed points; sets *continuum when a whole piece is fixed.
    std::vector<Rational> fixed_points(bool* continuum) const;
    const std::vector<Rational>& xs() const { return xs_; }

private:
    std::vector<Rational> xs_, ys_;
};

// Orbit space of a skewed R-covered model: the strip O = {a < b < a + 1}.
// Stable leaves are the horizontal segments b = c, unstable leaves the
// vertical segments a = c. The group is generated by g = (h, h) and the
// half translation tau, which commute.
class SkewedModel {
public:
    struct Point {
        Rational a, b;
    };
    struct Elem {
        long p = 0;  // power of g
        long q = 0;  // power of tau
    };
    // A ray of the leaf {kind, c}; toward_diagonal selects the end on b = a.
    struct Ray {
        Kind kind = Kind::Stable;
        Rational level;
        bool toward_diagonal = true;
    };
    // Point of the boundary of O: side 0 is the line b = a, side 1 is b = a + 1.
    struct BoundaryPoint {
        int side = 0;
        Rational a;
        bool operator==(const BoundaryPoint&) const = default;
    };

    explicit SkewedModel(const FlowSpec& spec);

    Rational h(const Rational& x) const;
    Rational h_inverse(const Rational& x) const;
    Rational shift() const { return shift_; }
    Point apply(const Elem& g, const Point& x) const;
    static bool in_orbit_space(const Point& x) { return x.a < x.b && x.b < x.a + 1; }

    // Fixed points of g with first coordinate in [-radius, radius].
    std::vector<Point> fixed_points(const Elem& g, long radius) const;
    static std::pair<long, long> tile_of(const Point& x);
    static std::string elem_string(const Elem& g);

    static BoundaryPoint end_of(const Ray& r);
    // Rays whose leaves make a perfect fit share their end on the boundary.
    static bool form_perfect_fit(const Ray& r, const Ray& s);
    Tri equivalent_rays(const Ray& r, const Ray& s) const;
    Tri same_ideal_point(const Ray& r, const Ray& s) const { return equivalent_rays(r, s); }
    // Counterclockwise order along the boundary of the strip.
    std::vector<int> circular_order(const std::vector<Ray>& rays) const;
    std::vector<PerfectFit> detect_perfect_fits(int depth, int max_word_length = 6) const;

private:
    PLMap power_map(long p, long q, const Rational& lo, const Rational& hi) const;
    std::vector<Rational> bx_, by_;  // one period of h
    Rational period_start_;
    Rational shift_;
};

}  // namespace orbitsphere
