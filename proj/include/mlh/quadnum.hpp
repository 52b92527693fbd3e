#pragma once

#include "mlh/rational.hpp"

#include <cmath>
#include <cstdint>

namespace mlh {

/// Element a + b*sqrt(D) of the quadratic extension Q(sqrt(D)).
///
/// D is carried unreduced (no square-free factoring), so the metallic
/// number sigma_{p,q} is always (p + sqrt(p^2+4q))/2 with half-integer
/// coefficients. Two values are operable only when their discriminants
/// agree; disc 0 marks a plain rational, which promotes to either side.
/// Equality is componentwise.
class QuadNum {
public:
    QuadNum() : a_(0), b_(0), disc_(0) {}
    QuadNum(long n) : a_(n), b_(0), disc_(0) {}
    QuadNum(Rational a) : a_(std::move(a)), b_(0), disc_(0) {}
    QuadNum(Rational a, Rational b, std::int64_t disc)
        : a_(std::move(a)), b_(std::move(b)), disc_(disc) {
        if (disc_ <= 0 && !b_.is_zero())
            throw domain_error("QuadNum with irrational part needs a positive discriminant");
        if (b_.is_zero() && disc_ < 0) disc_ = 0;
    }

    static QuadNum rational(Rational r) { return QuadNum(std::move(r)); }

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    std::int64_t disc() const { return disc_; }

    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
    bool is_rational() const { return b_.is_zero(); }

    QuadNum conjugate() const { return QuadNum(a_, -b_, disc_); }

    /// Field norm a^2 - b^2 D (rational).
    Rational norm() const { return a_ * a_ - b_ * b_ * Rational(disc_); }

    QuadNum operator-() const { return QuadNum(-a_, -b_, disc_); }

    friend QuadNum operator+(const QuadNum& x, const QuadNum& y) {
        std::int64_t d = merged_disc(x, y);
        return QuadNum(x.a_ + y.a_, x.b_ + y.b_, d);
    }
    friend QuadNum operator-(const QuadNum& x, const QuadNum& y) {
        std::int64_t d = merged_disc(x, y);
        return QuadNum(x.a_ - y.a_, x.b_ - y.b_, d);
    }
    friend QuadNum operator*(const QuadNum& x, const QuadNum& y) {
        std::int64_t d = merged_disc(x, y);
        Rational D{(long)0};
        if (d) D = Rational((long)d);
        return QuadNum(x.a_ * y.a_ + x.b_ * y.b_ * D,
                       x.a_ * y.b_ + x.b_ * y.a_, d);
    }
    friend QuadNum operator/(const QuadNum& x, const QuadNum& y) {
        if (y.is_zero()) throw arithmetic_error("QuadNum division by zero");
        std::int64_t d = merged_disc(x, y);
        // Rationalize by the conjugate. The norm can vanish for a nonzero
        // element when D is a perfect square (Q[x]/(x^2-D) is then not a
        // field); treat that as division by a zero divisor.
        Rational n = y.norm();
        if (n.is_zero()) throw arithmetic_error("QuadNum division by a zero divisor");
        QuadNum t = x * y.conjugate();
        return QuadNum(t.a_ / n, t.b_ / n, d);
    }

    QuadNum& operator+=(const QuadNum& o) { return *this = *this + o; }
    QuadNum& operator-=(const QuadNum& o) { return *this = *this - o; }
    QuadNum& operator*=(const QuadNum& o) { return *this = *this * o; }
    QuadNum& operator/=(const QuadNum& o) { return *this = *this / o; }

    friend bool operator==(const QuadNum& x, const QuadNum& y) {
        if (!x.b_.is_zero() && !y.b_.is_zero() && x.disc_ != y.disc_) return false;
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator!=(const QuadNum& x, const QuadNum& y) { return !(x == y); }

    double to_double() const {
        double v = a_.to_double();
        if (!b_.is_zero()) v += b_.to_double() * std::sqrt((double)disc_);
        return v;
    }

    std::string str() const {
        if (b_.is_zero()) return a_.str();
        std::string s;
        if (!a_.is_zero()) s = a_.str() + (b_.is_negative() ? "" : "+");
        s += b_.str() + "*sqrt(" + std::to_string(disc_) + ")";
        return s;
    }

private:
    static std::int64_t merged_disc(const QuadNum& x, const QuadNum& y) {
        if (x.disc_ == 0) return y.disc_;
        if (y.disc_ == 0) return x.disc_;
        if (x.disc_ != y.disc_)
            throw domain_error("QuadNum discriminant mismatch");
        return x.disc_;
    }

    Rational a_;
    Rational b_;
    std::int64_t disc_;
};

/// sigma_{p,q} = (p + sqrt(p^2+4q))/2, the positive root of x^2 - px - q.
inline QuadNum metallic_sigma(std::int64_t p, std::int64_t q) {
    if (p < 1 || q < 1) throw domain_error("metallic numbers need p >= 1, q >= 1");
    std::int64_t D = p * p + 4 * q;
    return QuadNum(Rational((long)p, 2), Rational(1, 2), D);
}

/// conj(sigma_{p,q}) = p - sigma_{p,q}, the other root of x^2 - px - q.
inline QuadNum quad_conjugate(const QuadNum& x) { return x.conjugate(); }

} // namespace mlh
