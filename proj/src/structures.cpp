#include "mlh/structures.hpp"

namespace mlh {

QVec random_rational_vector(int dim, std::mt19937_64& rng, long bound) {
    QVec v(dim);
    for (int i = 0; i < dim; ++i) {
        long num = long(rng() % (2 * bound + 1)) - bound;
        long den = long(rng() % (unsigned long)bound) + 1;
        v[i] = QuadNum(Rational(num, den));
    }
    return v;
}

StructureReport check_metallic_compat(const SemiEuclideanSpace& space, std::int64_t p,
                                      std::int64_t q, const QMatrix& J, int pairing_samples,
                                      std::uint64_t seed) {
    StructureReport rep;
    const int n = space.dim;

    QMatrix jj = J * J;
    rep.polynomial_ok = true;
    for (int i = 0; i < n && rep.polynomial_ok; ++i)
        for (int k = 0; k < n; ++k) {
            QuadNum rhs = QuadNum(Rational((long)p)) * J(i, k);
            if (i == k) rhs += QuadNum(Rational((long)q));
            if (jj(i, k) != rhs) { rep.polynomial_ok = false; break; }
        }

    rep.symmetry_ok = true;
    for (int i = 0; i < n && rep.symmetry_ok; ++i)
        for (int k = i + 1; k < n; ++k) {
            QuadNum lhs = space.signature[i] > 0 ? J(i, k) : -J(i, k);
            QuadNum rhs = space.signature[k] > 0 ? J(k, i) : -J(k, i);
            if (lhs != rhs) { rep.symmetry_ok = false; break; }
        }

    std::mt19937_64 rng(seed);
    rep.pairing_ok = true;
    rep.pairing_samples = pairing_samples;
    QuadNum P{Rational((long)p)}, Q{Rational((long)q)};
    for (int s = 0; s < pairing_samples; ++s) {
        QVec u = random_rational_vector(n, rng);
        QVec v = random_rational_vector(n, rng);
        QVec ju = matvec(J, u), jv = matvec(J, v);
        QuadNum lhs = space.metric(ju, jv);
        QuadNum rhs = P * space.metric(u, jv) + Q * space.metric(u, v);
        if (lhs != rhs) { rep.pairing_ok = false; break; }
    }
    return rep;
}

std::pair<int, int> eigenspace_dims(const MetallicStructure& j) {
    const int n = j.J.rows();
    QuadNum sigma = j.sigma();
    QuadNum other = QuadNum(Rational((long)j.p)) - sigma;
    QMatrix a = j.J, b = j.J;
    for (int i = 0; i < n; ++i) {
        a(i, i) -= sigma;
        b(i, i) -= other;
    }
    int plus = (int)nullspace(a).size();
    int minus = (int)nullspace(b).size();
    return {plus, minus};
}

} // namespace mlh
