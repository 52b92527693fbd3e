#pragma once

#include "mlh/dual.hpp"
#include "mlh/quadnum.hpp"

#include <cmath>
#include <cstdlib>

namespace mlh {

/// Default absolute tolerance for float-mode near-equality. Identity
/// residuals are compared against zero, not against each other, so the
/// tolerance is absolute. Overridable per run (--tol / MLH_TOL).
inline constexpr double kDefaultTolerance = 1e-9;

/// Relative threshold for float-mode rank decisions: pivots below
/// rel * (largest pivot) count as zero.
inline constexpr double kRankRelTolerance = 1e-9;

/// Scalar contract used by the generic linear algebra and frame code.
/// `exact` scalars use literal zero tests; float-backed scalars use a
/// scale-relative threshold for pivoting decisions.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<QuadNum> {
    static constexpr bool exact = true;
    static bool is_zero(const QuadNum& x, double /*scale*/ = 0.0) { return x.is_zero(); }
    static double magnitude(const QuadNum& x) { return std::abs(x.to_double()); }
    static double to_double(const QuadNum& x) { return x.to_double(); }
};

template <>
struct ScalarOps<double> {
    static constexpr bool exact = false;
    static bool is_zero(double x, double scale = 0.0) {
        double thr = scale > 0.0 ? kRankRelTolerance * scale : 0.0;
        return std::abs(x) <= thr;
    }
    static double magnitude(double x) { return std::abs(x); }
    static double to_double(double x) { return x; }
};

template <>
struct ScalarOps<DualScalar> {
    static constexpr bool exact = false;
    static bool is_zero(const DualScalar& x, double scale = 0.0) {
        double thr = scale > 0.0 ? kRankRelTolerance * scale : 0.0;
        return std::abs(x.v) <= thr;
    }
    static double magnitude(const DualScalar& x) { return std::abs(x.v); }
    static double to_double(const DualScalar& x) { return x.v; }
};

inline bool nearly_zero(double x, double tol = kDefaultTolerance) {
    return std::abs(x) <= tol;
}

} // namespace mlh
