#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace orbitsphere {

using Rational = mpq_class;

// Element a + b*sqrt(d) of a real quadratic field. d == 0 marks a plain
// rational that is compatible with every field.
class QuadNum {
public:
    QuadNum() = default;
    QuadNum(long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
    QuadNum(const Rational& a) : a_(a) { a_.canonicalize(); }  // NOLINT(google-explicit-constructor)
    QuadNum(const Rational& a, const Rational& b, int d);

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    int d() const { return d_; }
    bool is_rational() const { return b_ == 0; }

    int sign() const;
    double to_double() const;
    // Largest integer n with n <= value.
    long floor() const;
    QuadNum conjugate() const;
    QuadNum abs() const { return sign() < 0 ? -*this : *this; }
    std::string str() const;

    QuadNum operator-() const;
    QuadNum& operator+=(const QuadNum& o);
    QuadNum& operator-=(const QuadNum& o);
    QuadNum& operator*=(const QuadNum& o);
    QuadNum& operator/=(const QuadNum& o);

    friend QuadNum operator+(QuadNum x, const QuadNum& y) { return x += y; }
    friend QuadNum operator-(QuadNum x, const QuadNum& y) { return x -= y; }
    friend QuadNum operator*(QuadNum x, const QuadNum& y) { return x *= y; }
    friend QuadNum operator/(QuadNum x, const QuadNum& y) { return x /= y; }

    friend bool operator==(const QuadNum& x, const QuadNum& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator!=(const QuadNum& x, const QuadNum& y) { return !(x == y); }
    friend bool operator<(const QuadNum& x, const QuadNum& y) { return (x - y).sign() < 0; }
    friend bool operator>(const QuadNum& x, const QuadNum& y) { return (x - y).sign() > 0; }
    friend bool operator<=(const QuadNum& x, const QuadNum& y) { return (x - y).sign() <= 0; }
    friend bool operator>=(const QuadNum& x, const QuadNum& y) { return (x - y).sign() >= 0; }

private:
    void adopt_field(const QuadNum& o);
    void normalize();

    Rational a_{0};
    Rational b_{0};
    int d_ = 0;
};

// Strict total order usable as a map key (lexicographic on coefficients).
struct QuadKeyLess {
    bool operator()(const QuadNum& x, const QuadNum& y) const {
        int c = cmp(x.a(), y.a());
        if (c != 0) return c < 0;
        return cmp(x.b(), y.b()) < 0;
    }
};

struct Vec2 {
    QuadNum x;
    QuadNum y;
    friend Vec2 operator+(const Vec2& p, const Vec2& q) { return {p.x + q.x, p.y + q.y}; }
    friend Vec2 operator-(const Vec2& p, const Vec2& q) { return {p.x - q.x, p.y - q.y}; }
    friend Vec2 operator*(const QuadNum& s, const Vec2& p) { return {s * p.x, s * p.y}; }
    friend bool operator==(const Vec2& p, const Vec2& q) { return p.x == q.x && p.y == q.y; }
};

struct Mat2 {
    long a = 1, b = 0, c = 0, d = 1;  // [[a, b], [c, d]]
    Vec2 apply(const Vec2& v) const {
        return {QuadNum(a) * v.x + QuadNum(b) * v.y, QuadNum(c) * v.x + QuadNum(d) * v.y};
    }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    long det() const { return a * d - b * c; }
    long trace() const { return a + d; }
    Mat2 inverse() const;  // requires det = +-1
    bool operator==(const Mat2& o) const = default;
};

Rational parse_rational(const std::string& s);

inline Rational rat(long n, long d = 1) {
    Rational r(n, d);
    r.canonicalize();
    return r;
}

}  // namespace orbitsphere
