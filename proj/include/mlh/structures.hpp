#pragma once

#include "mlh/space.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mlh {

struct invariant_violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using QMatrix = Matrix<QuadNum>;
using QVec = Vec<QuadNum>;

/// Generalized almost product structure: F^2 = I.
struct ProductStructure {
    QMatrix F;

    explicit ProductStructure(QMatrix f) : F(std::move(f)) {
        if (F.rows() != F.cols()) throw domain_error("product structure must be square");
        if (!(F * F == QMatrix::identity(F.rows())))
            throw invariant_violation("F is not involutive (F^2 != I)");
    }
};

/// (1,1)-tensor J with J^2 = pJ + qI, g-symmetric for the diagonal metric.
struct MetallicStructure {
    std::int64_t p = 1;
    std::int64_t q = 1;
    QMatrix J;

    MetallicStructure(std::int64_t p_, std::int64_t q_, QMatrix j, const SemiEuclideanSpace& space)
        : p(p_), q(q_), J(std::move(j)) {
        if (p < 1 || q < 1) throw domain_error("metallic structure needs p >= 1, q >= 1");
        if (J.rows() != space.dim || J.cols() != space.dim)
            throw domain_error("J dimension mismatch");
        if (!satisfies_polynomial())
            throw invariant_violation("J^2 != pJ + qI");
        if (!is_g_symmetric(space))
            throw invariant_violation("g(JU,V) != g(U,JV): GJ not symmetric");
    }

    std::int64_t disc() const { return p * p + 4 * q; }
    QuadNum sigma() const { return metallic_sigma(p, q); }

    bool satisfies_polynomial() const {
        const int n = J.rows();
        QMatrix lhs = J * J;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                QuadNum rhs = QuadNum(Rational((long)p)) * J(i, j);
                if (i == j) rhs += QuadNum(Rational((long)q));
                if (lhs(i, j) != rhs) return false;
            }
        return true;
    }

    bool is_g_symmetric(const SemiEuclideanSpace& space) const {
        const int n = J.rows();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                QuadNum lhs = space.signature[i] > 0 ? J(i, j) : -J(i, j);
                QuadNum rhs = space.signature[j] > 0 ? J(j, i) : -J(j, i);
                if (lhs != rhs) return false;
            }
        return true;
    }

    QVec apply(const QVec& v) const { return matvec(J, v); }

    template <class S>
    Matrix<S> as() const {
        Matrix<S> m(J.rows(), J.cols());
        for (int i = 0; i < J.rows(); ++i)
            for (int j = 0; j < J.cols(); ++j) m(i, j) = S(J(i, j).to_double());
        return m;
    }
};

template <>
inline Matrix<QuadNum> MetallicStructure::as<QuadNum>() const { return J; }

/// J = (p/2) I +- ((2 sigma - p)/2) F.  Both branches are metallic; their sum
/// is pI.
inline MetallicStructure metallic_from_product(const ProductStructure& f, std::int64_t p,
                                               std::int64_t q, int branch,
                                               const SemiEuclideanSpace& space) {
    const int n = f.F.rows();
    QuadNum sigma = metallic_sigma(p, q);
    QuadNum half_p = QuadNum(Rational((long)p, 2));
    QuadNum coeff = sigma - half_p; // (2 sigma - p)/2
    if (branch < 0) coeff = -coeff;
    QMatrix j(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            j(i, k) = coeff * f.F(i, k);
            if (i == k) j(i, k) += half_p;
        }
    return MetallicStructure(p, q, std::move(j), space);
}

/// F = +-( 2/(2 sigma - p) J - p/(2 sigma - p) I ); inverse of the above.
inline ProductStructure product_from_metallic(const MetallicStructure& j, int branch) {
    const int n = j.J.rows();
    QuadNum sigma = j.sigma();
    QuadNum denom = sigma + sigma - QuadNum(Rational((long)j.p)); // sqrt(D)
    QMatrix f(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            QuadNum t = (j.J(i, k) + j.J(i, k)) / denom;
            if (i == k) t -= QuadNum(Rational((long)j.p)) / denom;
            f(i, k) = branch < 0 ? -t : t;
        }
    return ProductStructure(std::move(f));
}

/// Structure compatibility report: the defining polynomial identity, metric
/// symmetry, and the derived pairing identity
/// g(JU,JV) = p g(U,JV) + q g(U,V) on randomized exact vector pairs.
struct StructureReport {
    bool polynomial_ok = false;       // J^2 = pJ + qI
    bool symmetry_ok = false;         // g(JU,V) = g(U,JV)
    bool pairing_ok = false;          // g(JU,JV) = p g(U,JV) + q g(U,V)
    int pairing_samples = 0;
    bool all_ok() const { return polynomial_ok && symmetry_ok && pairing_ok; }
};

QVec random_rational_vector(int dim, std::mt19937_64& rng, long bound = 16);

StructureReport check_metallic_compat(const SemiEuclideanSpace& space, std::int64_t p,
                                      std::int64_t q, const QMatrix& J, int pairing_samples = 200,
                                      std::uint64_t seed = 1);

/// J-eigenspace split over Q(sqrt(D)): dimensions of ker(J - sigma I) and
/// ker(J - (p - sigma) I).
std::pair<int, int> eigenspace_dims(const MetallicStructure& j);

} // namespace mlh
