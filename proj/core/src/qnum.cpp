#include "orbitsphere/qnum.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace orbitsphere {

QuadNum::QuadNum(const Rational& a, const Rational& b, int d) : a_(a), b_(b), d_(d) {
    if (d < 0) throw std::invalid_argument("quadratic field needs d >= 0");
    a_.canonicalize();
    b_.canonicalize();
    normalize();
}

void QuadNum::normalize() {
    if (b_ == 0) return;
    if (d_ == 0) throw std::invalid_argument("irrational part without a field");
}

void QuadNum::adopt_field(const QuadNum& o) {
    if (o.d_ == 0 || o.b_ == 0) return;
    if (d_ != 0 && b_ != 0 && d_ != o.d_) throw std::invalid_argument("mixed quadratic fields");
    d_ = o.d_;
}

int QuadNum::sign() const {
    int sa = sgn(a_);
    int sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    Rational a2 = a_ * a_;
    Rational b2d = b_ * b_ * d_;
    int c = cmp(a2, b2d);
    if (c == 0) throw std::logic_error("sqrt(d) is rational");
    return c > 0 ? sa : sb;
}

double QuadNum::to_double() const {
    return a_.get_d() + b_.get_d() * std::sqrt(static_cast<double>(d_));
}

long QuadNum::floor() const {
    long n = static_cast<long>(std::floor(to_double()));
    while ((*this - QuadNum(n)).sign() < 0) --n;
    while ((*this - QuadNum(n + 1)).sign() >= 0) ++n;
    return n;
}

QuadNum QuadNum::conjugate() const {
    QuadNum r = *this;
    r.b_ = -r.b_;
    return r;
}

std::string QuadNum::str() const {
    std::ostringstream os;
    os << a_.get_str();
    if (b_ != 0) os << (sgn(b_) > 0 ? "+" : "-") << Rational(::abs(b_)).get_str() << "*sqrt(" << d_ << ")";
    return os.str();
}

QuadNum QuadNum::operator-() const {
    QuadNum r = *this;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
}

QuadNum& QuadNum::operator+=(const QuadNum& o) {
    adopt_field(o);
    a_ += o.a_;
    b_ += o.b_;
    return *this;
}

QuadNum& QuadNum::operator-=(const QuadNum& o) {
    adopt_field(o);
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
}

QuadNum& QuadNum::operator*=(const QuadNum& o) {
    if (o.b_ == 0) {
        a_ *= o.a_;
        b_ *= o.a_;
        return *this;
    }
    if (b_ == 0) {
        Rational x = a_;
        d_ = o.d_;
        a_ = x * o.a_;
        b_ = x * o.b_;
        return *this;
    }
    adopt_field(o);
    Rational na = a_ * o.a_ + b_ * o.b_ * d_;
    Rational nb = a_ * o.b_ + b_ * o.a_;
    a_ = na;
    b_ = nb;
    return *this;
}

QuadNum& QuadNum::operator/=(const QuadNum& o) {
    if (o.a_ == 0 && o.b_ == 0) throw std::domain_error("division by zero");
    if (o.b_ == 0) {
        a_ /= o.a_;
        b_ /= o.a_;
        return *this;
    }
    Rational norm = o.a_ * o.a_ - o.b_ * o.b_ * o.d_;
    *this *= o.conjugate();
    a_ /= norm;
    b_ /= norm;
    return *this;
}

Mat2 Mat2::inverse() const {
    long dt = det();
    if (dt != 1 && dt != -1) throw std::domain_error("matrix not unimodular");
    return {d * dt, -b * dt, -c * dt, a * dt};
}

Rational parse_rational(const std::string& s) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    r.canonicalize();
    return r;
}

}  // namespace orbitsphere
