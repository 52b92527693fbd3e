#pragma once

#include "mlh/polynomial.hpp"
#include "mlh/structures.hpp"

#include <optional>
#include <utility>

namespace mlh {

/// Induced metric is non-degenerate: no radical direction.
struct NotLightlikeError : std::runtime_error {
    NotLightlikeError() : std::runtime_error("hypersurface is not lightlike (Gram nullity 0)") {}
};

/// Gram nullity >= 2 cannot happen for a genuine hypersurface frame.
struct NotHypersurfaceRankError : std::runtime_error {
    explicit NotHypersurfaceRankError(int nullity)
        : std::runtime_error("induced Gram nullity " + std::to_string(nullity) +
                             " (expected 1 for a lightlike hypersurface)") {}
};

struct ScreenConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateChartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Affine level set { x : c.x = offset } with exact data.
struct AffineHypersurface {
    QVec c;
    QuadNum offset;

    AffineHypersurface(QVec covector, QuadNum off) : c(std::move(covector)), offset(std::move(off)) {
        if (pivot() < 0) throw domain_error("affine hypersurface needs a nonzero covector");
    }

    int dim() const { return (int)c.size(); }

    /// Highest index with a nonzero coefficient; the graph direction for
    /// hypersurfaces written as x_last = f(x_1..x_n).
    int pivot() const {
        for (int i = dim() - 1; i >= 0; --i)
            if (!c[i].is_zero()) return i;
        return -1;
    }

    bool contains(const QVec& x) const {
        QuadNum acc;
        for (int i = 0; i < dim(); ++i) acc += c[i] * x[i];
        return acc == offset;
    }

    QVec point_on() const {
        QVec x(dim(), QuadNum{});
        int k = pivot();
        x[k] = offset / c[k];
        return x;
    }

    /// Basis of ker(c): v_i = e_i - (c_i / c_p) e_p for i != p, ascending i.
    /// Reproduces the coordinate frames the worked examples list.
    std::vector<QVec> kernel_basis() const {
        const int k = pivot();
        std::vector<QVec> basis;
        for (int i = 0; i < dim(); ++i) {
            if (i == k) continue;
            QVec v(dim(), QuadNum{});
            v[i] = QuadNum(1);
            if (!c[i].is_zero()) v[k] = -(c[i] / c[k]);
            basis.push_back(std::move(v));
        }
        return basis;
    }

    /// Closed-form lightlike criterion: the metric dual of c is null.
    bool is_lightlike(const SemiEuclideanSpace& space) const {
        QuadNum acc;
        for (int i = 0; i < dim(); ++i) {
            QuadNum t = c[i] * c[i];
            acc = space.signature[i] > 0 ? acc + t : acc - t;
        }
        return acc.is_zero();
    }
};

/// Polynomial chart u -> x(u) with a box domain; Jacobian columns are kept
/// as symbolic derivatives so second-order data stays available to the
/// dual-number passes.
struct ChartHypersurface {
    int n = 0;   // chart dimension
    int dim = 0; // ambient dimension
    std::vector<Polynomial> comp;                 // dim components
    std::vector<std::vector<Polynomial>> dcomp;   // dim x n partials
    std::vector<std::pair<double, double>> domain;

    ChartHypersurface() = default;
    ChartHypersurface(std::vector<Polynomial> components,
                      std::vector<std::pair<double, double>> dom)
        : n((int)dom.size()), dim((int)components.size()), comp(std::move(components)),
          domain(std::move(dom)) {
        if (dim < 2 || n != dim - 1)
            throw domain_error("chart must have dim components over dim-1 coordinates");
        dcomp.resize(dim);
        for (int i = 0; i < dim; ++i) {
            dcomp[i].resize(n);
            for (int k = 0; k < n; ++k) dcomp[i][k] = comp[i].derivative(k);
        }
    }

    template <class S>
    void eval(const std::vector<S>& u, Vec<S>& x, Matrix<S>& jac) const {
        x.assign(dim, S{});
        jac = Matrix<S>(dim, n);
        for (int i = 0; i < dim; ++i) {
            x[i] = comp[i].eval(u);
            for (int k = 0; k < n; ++k) jac(i, k) = dcomp[i][k].eval(u);
        }
    }
};

/// Point + spanning tangent vectors.
template <class S>
struct TangentFrameT {
    Vec<S> point;
    std::vector<Vec<S>> phi;
};

using TangentFrame = TangentFrameT<QuadNum>;

enum class Kind { Generic, Invariant, ScreenSemiInvariant };

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Invariant: return "Invariant";
        case Kind::ScreenSemiInvariant: return "ScreenSemiInvariant";
        default: return "Generic";
    }
}

/// Pivot decisions of one full frame construction, recorded on the plain
/// value pass and replayed verbatim on dual / finite-difference passes.
struct FrameTrace {
    ElimPlan gram_plan;
    int e_norm_index = -1;
    int n_seed = -1;
    ElimPlan screen_plan;
    ElimPlan coeff_plan; // shared plan for tangent-coefficient solves
    Kind kind = Kind::Generic;
    int ad_seed_plus = -1;
    int ad_seed_minus = -1;
    ElimPlan mu0_plan;
};

/// One lightlike frame at a point. E spans the radical, N is the canonical
/// transversal from null completion of the highest coordinate direction that
/// pairs with E, and W spans the screen {E,N}^perp.
///
/// When a metallic structure is present and the hypersurface is invariant or
/// screen semi-invariant at the point, the adapted block carries the frame
/// the structure theory presumes: a transversal aligned with the eigenspace
/// split of J, psi = JE and zeta = JN inside the screen, and the mu0
/// complement.
template <class S>
struct FramePoint {
    Vec<S> x;
    Matrix<S> jac; // dim x n tangent basis as columns
    int n = 0, dim = 0;

    Vec<S> E_coeff; // radical in the tangent basis
    Vec<S> E;       // ambient
    Vec<S> N;       // canonical transversal
    std::vector<Vec<S>> W;

    Kind kind = Kind::Generic;
    S inv_lambda{};      // invariant: J E = lambda E
    Vec<S> N_ad;         // adapted transversal (invariant / ssi)
    std::vector<Vec<S>> W_ad;
    std::vector<Vec<S>> mu0;        // ssi only
    std::vector<Vec<S>> mu0_coeff;  // chart coefficients
    Vec<S> psi, zeta;               // J E and J N_active (always present)
    std::optional<Vec<S>> psi_coeff, zeta_coeff; // when tangent (ssi)

    bool has_adapted() const { return kind != Kind::Generic; }
    const Vec<S>& active_N() const { return has_adapted() ? N_ad : N; }
    const std::vector<Vec<S>>& active_W() const { return has_adapted() ? W_ad : W; }
};

struct FrameOptions {
    std::vector<QVec> override_basis;        // optional explicit screen basis (exact mode)
    bool use_override = false;
    const Polynomial* frame_scale = nullptr; // optional scaling of E (chart mode)
    bool adapt = true;                       // build metallic-adapted block when possible
};

/// Frame construction over any scalar backend. `structure` may be null
/// (no metallic data: classification left Generic, psi/zeta empty).
template <class S>
FramePoint<S> build_frame(const SemiEuclideanSpace& space, const Vec<S>& x, const Matrix<S>& jac,
                          const Matrix<S>* J, const S& sigma, long p, long q,
                          const FrameOptions& opt, FrameTrace* record, const FrameTrace* replay);

/// Exact affine frame (single point; constant fields).
FramePoint<QuadNum> build_affine_frame(const SemiEuclideanSpace& space,
                                       const AffineHypersurface& h,
                                       const MetallicStructure* structure,
                                       const FrameOptions& opt);

/// Spec-level tangent frame operation.
TangentFrame tangent_frame(const SemiEuclideanSpace& space, const AffineHypersurface& h,
                           const QVec& point);

/// Affine hypersurface as a degree-1 chart over its kernel basis, for the
/// float backend. Chart coordinates range over the given box (default
/// [-1,1]^n).
ChartHypersurface affine_as_chart(const AffineHypersurface& h,
                                  std::vector<std::pair<double, double>> domain = {});

/// Radical generator from an explicit frame; nullity must be exactly one.
QVec radical(const SemiEuclideanSpace& space, const std::vector<QVec>& phi);

/// Canonical transversal for a given screen (or the default {E,.}^perp rule
/// when the screen list is empty): unique N with g(N,E)=1, g(N,N)=0 and
/// g(N,W)=0.
QVec transversal(const SemiEuclideanSpace& space, const QVec& E, const std::vector<QVec>& screen);

} // namespace mlh
