#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>

namespace mlh {

/// Forward-mode dual number: value plus a vector of partials, one per chart
/// coordinate of the active evaluation context. Partials live inline (chart
/// dimension never exceeds kMaxVars here), so arithmetic is allocation-free
/// and the OpenMP sampling loop scales. A zero-length partial vector stands
/// for "all partials zero", keeping numeric literals cheap in generic code.
class DualScalar {
public:
    static constexpr std::size_t kMaxVars = 8;

    double v = 0.0;

    DualScalar() = default;
    DualScalar(double value) : v(value) {}

    /// Seed variable k of an n-variable context.
    static DualScalar variable(double value, std::size_t k, std::size_t n) {
        if (n > kMaxVars) throw std::length_error("dual context exceeds kMaxVars");
        DualScalar x(value);
        x.n_ = n;
        x.d_[k] = 1.0;
        return x;
    }

    double value() const { return v; }
    std::size_t nvars() const { return n_; }
    double partial(std::size_t k) const { return k < n_ ? d_[k] : 0.0; }

    friend DualScalar operator-(const DualScalar& x) {
        DualScalar r(-x.v);
        r.n_ = x.n_;
        for (std::size_t i = 0; i < x.n_; ++i) r.d_[i] = -x.d_[i];
        return r;
    }

    friend DualScalar operator+(const DualScalar& x, const DualScalar& y) {
        DualScalar r(x.v + y.v);
        r.n_ = x.n_ > y.n_ ? x.n_ : y.n_;
        for (std::size_t i = 0; i < r.n_; ++i) r.d_[i] = x.partial(i) + y.partial(i);
        return r;
    }

    friend DualScalar operator-(const DualScalar& x, const DualScalar& y) {
        DualScalar r(x.v - y.v);
        r.n_ = x.n_ > y.n_ ? x.n_ : y.n_;
        for (std::size_t i = 0; i < r.n_; ++i) r.d_[i] = x.partial(i) - y.partial(i);
        return r;
    }

    friend DualScalar operator*(const DualScalar& x, const DualScalar& y) {
        DualScalar r(x.v * y.v);
        r.n_ = x.n_ > y.n_ ? x.n_ : y.n_;
        for (std::size_t i = 0; i < r.n_; ++i)
            r.d_[i] = x.partial(i) * y.v + x.v * y.partial(i);
        return r;
    }

    friend DualScalar operator/(const DualScalar& x, const DualScalar& y) {
        double inv = 1.0 / y.v;
        DualScalar r(x.v * inv);
        r.n_ = x.n_ > y.n_ ? x.n_ : y.n_;
        double sq = x.v * inv * inv;
        for (std::size_t i = 0; i < r.n_; ++i)
            r.d_[i] = x.partial(i) * inv - y.partial(i) * sq;
        return r;
    }

    DualScalar& operator+=(const DualScalar& o) { return *this = *this + o; }
    DualScalar& operator-=(const DualScalar& o) { return *this = *this - o; }
    DualScalar& operator*=(const DualScalar& o) { return *this = *this * o; }
    DualScalar& operator/=(const DualScalar& o) { return *this = *this / o; }

    friend bool operator==(const DualScalar& x, const DualScalar& y) { return x.v == y.v; }
    friend bool operator!=(const DualScalar& x, const DualScalar& y) { return x.v != y.v; }
    friend bool operator<(const DualScalar& x, const DualScalar& y) { return x.v < y.v; }

private:
    std::size_t n_ = 0;
    std::array<double, kMaxVars> d_{};
};

} // namespace mlh
