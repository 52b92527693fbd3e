#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mlh {

struct arithmetic_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact rational number. Invariants: den > 0, gcd(|num|, den) = 1.
///
/// The integer layer is GMP; Gaussian elimination on exact Gram matrices
/// inflates coefficients well past 64 bits, so fixed-width integers are
/// not an option here.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long n) : num_(n), den_(1) {}
    Rational(long n, long d) : num_(n), den_(d) { normalize(); }
    Rational(mpz_class n, mpz_class d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }
    explicit Rational(const mpz_class& n) : num_(n), den_(1) {}

    static Rational from_strings(const std::string& n, const std::string& d) {
        return Rational(mpz_class(n), mpz_class(d));
    }

    const mpz_class& num() const { return num_; }
    const mpz_class& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_integer() const { return den_ == 1; }

    Rational operator-() const { return Rational(raw{}, -num_, den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw arithmetic_error("rational division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    double to_double() const {
        mpq_class q(num_, den_);
        return q.get_d();
    }

    std::string str() const {
        if (den_ == 1) return num_.get_str();
        return num_.get_str() + "/" + den_.get_str();
    }

private:
    struct raw {};
    Rational(raw, mpz_class n, mpz_class d) : num_(std::move(n)), den_(std::move(d)) {}

    void normalize() {
        if (den_ == 0) throw arithmetic_error("rational with zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        mpz_class g = gcd(num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    mpz_class num_;
    mpz_class den_;
};

} // namespace mlh
