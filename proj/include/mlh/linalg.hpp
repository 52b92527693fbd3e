#pragma once

#include "mlh/scalar.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace mlh {

template <class S>
using Vec = std::vector<S>;

template <class S>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols, S{}) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = S(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    S& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
    const S& operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Vec<S> col(int j) const {
        Vec<S> v(rows_);
        for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        Matrix r(x.rows_, y.cols_);
        for (int i = 0; i < x.rows_; ++i)
            for (int k = 0; k < x.cols_; ++k) {
                const S& xik = x(i, k);
                if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(xik)) continue;
                for (int j = 0; j < y.cols_; ++j) r(i, j) += xik * y(k, j);
            }
        return r;
    }

    friend Matrix operator+(const Matrix& x, const Matrix& y) {
        Matrix r(x.rows_, x.cols_);
        for (std::size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] + y.a_[i];
        return r;
    }
    friend Matrix operator-(const Matrix& x, const Matrix& y) {
        Matrix r(x.rows_, x.cols_);
        for (std::size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] - y.a_[i];
        return r;
    }

    friend bool operator==(const Matrix& x, const Matrix& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }

private:
    int rows_, cols_;
    std::vector<S> a_;
};

template <class S>
Vec<S> matvec(const Matrix<S>& m, const Vec<S>& v) {
    Vec<S> r(m.rows(), S{});
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
    return r;
}

template <class S>
Matrix<S> scaled(const Matrix<S>& m, const S& c) {
    Matrix<S> r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = c * m(i, j);
    return r;
}

template <class S>
Vec<S> vec_sub(const Vec<S>& x, const Vec<S>& y) {
    Vec<S> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
    return r;
}

template <class S>
Vec<S> vec_add(const Vec<S>& x, const Vec<S>& y) {
    Vec<S> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
    return r;
}

template <class S>
Vec<S> vec_scale(const S& c, const Vec<S>& x) {
    Vec<S> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = c * x[i];
    return r;
}

template <class S>
void vec_axpy(Vec<S>& acc, const S& c, const Vec<S>& x) {
    for (std::size_t i = 0; i < x.size(); ++i) acc[i] += c * x[i];
}

/// Recorded pivot decisions of one elimination, so a float-mode pass can be
/// replayed verbatim with dual numbers (or at perturbed points) without the
/// pivot choice jumping — the replayed computation stays a smooth function
/// of the matrix entries.
struct ElimPlan {
    std::vector<std::pair<int, int>> steps; // (pivot row before swap, pivot column)
};

template <class S>
struct Echelon {
    Matrix<S> m;                 // reduced row echelon form
    std::vector<int> pivot_cols; // one per rank step
    int rank = 0;
};

/// Row reduction to RREF. Exact scalars pivot by scanning columns left to
/// right (deterministic bases, conditioning irrelevant); float-backed
/// scalars use full pivoting so no basis entry rides a tiny pivot. Columns
/// at `col_limit` and beyond are never pivoted (used to protect the
/// right-hand side in solve). If `replay` is given its recorded choices are
/// used verbatim; if `record` is given the choices taken are written to it.
template <class S>
Echelon<S> row_reduce(Matrix<S> m, const ElimPlan* replay = nullptr, ElimPlan* record = nullptr,
                      int col_limit = -1) {
    const int nr = m.rows(), nc = m.cols();
    const int plim = col_limit < 0 ? nc : col_limit;
    double scale = 0.0;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) scale = std::max(scale, ScalarOps<S>::magnitude(m(i, j)));

    Echelon<S> out;
    int row = 0;
    auto eliminate_with = (+[](Matrix<S>& mm, int prow, int pcol) {
        const int cols = mm.cols();
        S inv = S(1) / mm(prow, pcol);
        for (int j = 0; j < cols; ++j) mm(prow, j) = mm(prow, j) * inv;
        for (int i = 0; i < mm.rows(); ++i) {
            if (i == prow) continue;
            S f = mm(i, pcol);
            if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(f)) continue;
            for (int j = 0; j < cols; ++j) mm(i, j) = mm(i, j) - f * mm(prow, j);
        }
    });

    if (replay) {
        for (auto [prow, pcol] : replay->steps) {
            m.swap_rows(row, prow);
            eliminate_with(m, row, pcol);
            out.pivot_cols.push_back(pcol);
            ++row;
        }
    } else if (ScalarOps<S>::exact) {
        for (int col = 0; col < plim && row < nr; ++col) {
            int best = -1;
            double best_mag = 0.0;
            for (int i = row; i < nr; ++i) {
                double mag = ScalarOps<S>::magnitude(m(i, col));
                if (mag > best_mag) { best_mag = mag; best = i; }
            }
            if (best < 0 || ScalarOps<S>::is_zero(m(best, col), scale)) continue;
            if (record) record->steps.emplace_back(best, col);
            m.swap_rows(row, best);
            eliminate_with(m, row, col);
            out.pivot_cols.push_back(col);
            ++row;
        }
    } else {
        std::vector<bool> used(nc, false);
        while (row < nr) {
            int bi = -1, bj = -1;
            double best_mag = 0.0;
            for (int i = row; i < nr; ++i)
                for (int j = 0; j < plim; ++j) {
                    if (used[j]) continue;
                    double mag = ScalarOps<S>::magnitude(m(i, j));
                    if (mag > best_mag) { best_mag = mag; bi = i; bj = j; }
                }
            if (bi < 0 || ScalarOps<S>::is_zero(m(bi, bj), scale)) break;
            if (record) record->steps.emplace_back(bi, bj);
            m.swap_rows(row, bi);
            eliminate_with(m, row, bj);
            used[bj] = true;
            out.pivot_cols.push_back(bj);
            ++row;
        }
    }
    out.rank = row;
    out.m = std::move(m);
    return out;
}

/// Basis of the kernel, one vector per free column, in ascending free-column
/// order. Deterministic given the pivot plan.
template <class S>
std::vector<Vec<S>> nullspace_from_echelon(const Echelon<S>& e, int ncols) {
    std::vector<bool> is_pivot(ncols, false);
    for (int c : e.pivot_cols) is_pivot[c] = true;
    std::vector<Vec<S>> basis;
    for (int j = 0; j < ncols; ++j) {
        if (is_pivot[j]) continue;
        Vec<S> x(ncols, S{});
        x[j] = S(1);
        for (int step = 0; step < e.rank; ++step)
            x[e.pivot_cols[step]] = -e.m(step, j);
        basis.push_back(std::move(x));
    }
    return basis;
}

template <class S>
std::vector<Vec<S>> nullspace(const Matrix<S>& m, const ElimPlan* replay = nullptr,
                              ElimPlan* record = nullptr) {
    auto e = row_reduce(m, replay, record);
    return nullspace_from_echelon(e, m.cols());
}

/// Solve A x = b for one consistent right-hand side; free variables are set
/// to zero. Returns nothing when the system is inconsistent.
template <class S>
std::optional<Vec<S>> solve(const Matrix<S>& a, const Vec<S>& b, const ElimPlan* replay = nullptr,
                            ElimPlan* record = nullptr) {
    const int nr = a.rows(), nc = a.cols();
    Matrix<S> aug(nr, nc + 1);
    double scale = 0.0;
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nc; ++j) {
            aug(i, j) = a(i, j);
            scale = std::max(scale, ScalarOps<S>::magnitude(a(i, j)));
        }
        aug(i, nc) = b[i];
        scale = std::max(scale, ScalarOps<S>::magnitude(b[i]));
    }
    auto e = row_reduce(std::move(aug), replay, record, nc);
    // Pivots never enter the rhs column; a leftover rhs residue below the
    // rank means the system is inconsistent.
    for (int i = e.rank; i < nr; ++i)
        if (!ScalarOps<S>::is_zero(e.m(i, nc), scale)) return std::nullopt;
    Vec<S> x(nc, S{});
    for (int step = 0; step < e.rank; ++step) x[e.pivot_cols[step]] = e.m(step, nc);
    return x;
}

/// Determinant by fraction-free-style forward elimination with partial
/// pivoting (plain division variant; entries are field elements).
template <class S>
S determinant(Matrix<S> m) {
    const int n = m.rows();
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, ScalarOps<S>::magnitude(m(i, j)));
    S det = S(1);
    for (int col = 0; col < n; ++col) {
        int best = -1;
        double best_mag = 0.0;
        for (int i = col; i < n; ++i) {
            double mag = ScalarOps<S>::magnitude(m(i, col));
            if (mag > best_mag) { best_mag = mag; best = i; }
        }
        if (best < 0 || ScalarOps<S>::is_zero(m(best, col), scale)) return S{};
        if (best != col) { m.swap_rows(col, best); det = -det; }
        det = det * m(col, col);
        S inv = S(1) / m(col, col);
        for (int i = col + 1; i < n; ++i) {
            S f = m(i, col) * inv;
            if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(f)) continue;
            for (int j = col; j < n; ++j) m(i, j) = m(i, j) - f * m(col, j);
        }
    }
    return det;
}

/// Projective equality: v and w generate the same line.
template <class S>
bool proportional(const Vec<S>& v, const Vec<S>& w) {
    if (v.size() != w.size()) return false;
    double scale = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        scale = std::max({scale, ScalarOps<S>::magnitude(v[i]), ScalarOps<S>::magnitude(w[i])});
    scale = scale * scale;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (!ScalarOps<S>::is_zero(v[i] * w[j] - v[j] * w[i], scale)) return false;
    return true;
}

} // namespace mlh
