#pragma once

#include "mlh/linalg.hpp"

#include <cstdint>
#include <vector>

namespace mlh {

/// Flat semi-Euclidean ambient space R^dim with a diagonal metric whose
/// entries are the signature signs. The index (count of -1 entries) must be
/// strictly between 0 and dim, otherwise no lightlike hypersurfaces exist.
struct SemiEuclideanSpace {
    int dim = 0;
    std::vector<int> signature; // entries are +1 / -1

    SemiEuclideanSpace() = default;
    SemiEuclideanSpace(int dimension, std::vector<int> sig)
        : dim(dimension), signature(std::move(sig)) {
        validate();
    }

    int index() const {
        int q = 0;
        for (int s : signature) q += (s < 0);
        return q;
    }

    void validate() const {
        if (dim < 2 || (int)signature.size() != dim)
            throw domain_error("signature length must equal dim (dim >= 2)");
        for (int s : signature)
            if (s != 1 && s != -1) throw domain_error("signature entries must be +1 or -1");
        int q = index();
        if (q <= 0 || q >= dim)
            throw domain_error("metric index must satisfy 0 < q < dim");
    }

    /// Diagonal pairing sum_i eps_i U_i V_i.
    template <class S>
    S metric(const Vec<S>& u, const Vec<S>& v) const {
        if ((int)u.size() != dim || (int)v.size() != dim)
            throw domain_error("metric_eval: vector length mismatch");
        S acc{};
        for (int i = 0; i < dim; ++i) {
            S t = u[i] * v[i];
            acc = signature[i] > 0 ? acc + t : acc - t;
        }
        return acc;
    }
};

template <class S>
S metric_eval(const SemiEuclideanSpace& space, const Vec<S>& u, const Vec<S>& v) {
    return space.metric(u, v);
}

} // namespace mlh
