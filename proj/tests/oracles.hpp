#pragma once

// Test-only oracles, kept independent of the library's elimination paths.

#include "mlh/linalg.hpp"

namespace mlh::oracle {

/// Determinant by recursive Laplace expansion along the first row.
template <class S>
S laplace_det(const Matrix<S>& m) {
    const int n = m.rows();
    if (n == 1) return m(0, 0);
    S acc{};
    for (int j = 0; j < n; ++j) {
        Matrix<S> minor(n - 1, n - 1);
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = m(r, c);
            }
        }
        S term = m(0, j) * laplace_det(minor);
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

/// Adjugate (transposed cofactor matrix) via Laplace minors.
template <class S>
Matrix<S> adjugate(const Matrix<S>& m) {
    const int n = m.rows();
    Matrix<S> adj(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Matrix<S> minor(n - 1, n - 1);
            int rr = 0;
            for (int r = 0; r < n; ++r) {
                if (r == i) continue;
                int cc = 0;
                for (int c = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor(rr, cc++) = m(r, c);
                }
                ++rr;
            }
            S cof = laplace_det(minor);
            adj(j, i) = ((i + j) % 2 == 0) ? cof : -cof;
        }
    return adj;
}

/// Kernel generator of a rank n-1 symmetric matrix: any nonzero adjugate
/// column lies in the kernel (G adj(G) = det(G) I = 0).
template <class S>
std::optional<Vec<S>> adjugate_kernel(const Matrix<S>& m) {
    Matrix<S> adj = adjugate(m);
    for (int j = 0; j < m.cols(); ++j) {
        Vec<S> col = adj.col(j);
        for (const auto& x : col)
            if (!ScalarOps<S>::is_zero(x)) return col;
    }
    return std::nullopt;
}

} // namespace mlh::oracle
