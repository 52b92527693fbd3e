#pragma once

#include "mlh/hypersurface.hpp"

namespace mlh {

/// Ambient vector field evaluated at one point: value plus the matrix of
/// directional derivatives along the chart coordinates (column k is d/du^k).
/// Exact affine mode carries zero derivative tables (constant fields).
template <class S>
struct Fld {
    Vec<S> v;
    Matrix<S> d;
};

/// Non-owning view of a stored field; the hot sampling loop uses views to
/// keep the per-sample evaluation allocation-light.
template <class S>
struct FldView {
    const Vec<S>& v;
    const Matrix<S>& d;
};

template <class S>
struct GeomPoint {
    const SemiEuclideanSpace* space = nullptr;
    long p = 1, q = 1;
    S sigma{};
    Matrix<S> J;
    bool has_J = false;

    FramePoint<S> f;

    std::vector<Matrix<S>> dphi; // derivative of each coordinate field (dim x n each)
    Matrix<S> dE, dN, dNad, dPsi, dZeta;
    std::vector<Matrix<S>> dW, dWad;
    std::vector<Matrix<S>> dMu0;

    int n() const { return f.n; }
    int dim() const { return f.dim; }

    Fld<S> coord_field(int k) const { return {f.jac.col(k), dphi[k]}; }
    Fld<S> position_field() const { return {f.x, f.jac}; }
    Fld<S> E_field() const { return {f.E, dE}; }
    Fld<S> N_field() const {
        return f.has_adapted() ? Fld<S>{f.N_ad, dNad} : Fld<S>{f.N, dN};
    }
    Fld<S> default_N_field() const { return {f.N, dN}; }
    Fld<S> psi_field() const { return {f.psi, dPsi}; }
    Fld<S> zeta_field() const { return {f.zeta, dZeta}; }
    Fld<S> mu0_field(int i) const { return {f.mu0[i], dMu0[i]}; }
    Fld<S> screen_field(int a) const {
        return f.has_adapted() ? Fld<S>{f.W_ad[a], dWad[a]} : Fld<S>{f.W[a], dW[a]};
    }
    int screen_size() const { return (int)(f.has_adapted() ? f.W_ad.size() : f.W.size()); }

    FldView<S> E_view() const { return {f.E, dE}; }
    FldView<S> N_view() const {
        return f.has_adapted() ? FldView<S>{f.N_ad, dNad} : FldView<S>{f.N, dN};
    }
    FldView<S> psi_view() const { return {f.psi, dPsi}; }
    FldView<S> zeta_view() const { return {f.zeta, dZeta}; }
    FldView<S> mu0_view(int i) const { return {f.mu0[i], dMu0[i]}; }
    FldView<S> screen_view(int a) const {
        return f.has_adapted() ? FldView<S>{f.W_ad[a], dWad[a]} : FldView<S>{f.W[a], dW[a]};
    }

    S g(const Vec<S>& a, const Vec<S>& b) const { return space->metric(a, b); }
};

/// Directional ambient derivative of a field along chart direction a.
template <class S, class F>
Vec<S> nabla_amb(const GeomPoint<S>& G, const Vec<S>& a, const F& fld) {
    Vec<S> r(G.dim(), S{});
    for (int k = 0; k < G.n(); ++k)
        if (!(ScalarOps<S>::exact && ScalarOps<S>::is_zero(a[k])))
            for (int i = 0; i < G.dim(); ++i) r[i] += fld.d(i, k) * a[k];
    return r;
}

/// Second fundamental form B(U,V) = g(nabla~_U V, E).
template <class S, class F>
S B_form(const GeomPoint<S>& G, const Vec<S>& aU, const F& V) {
    return G.g(nabla_amb(G, aU, V), G.f.E);
}

/// tau(U) = g(nabla~_U N, E).
template <class S>
S tau_form(const GeomPoint<S>& G, const Vec<S>& aU) {
    return G.g(nabla_amb(G, aU, G.N_view()), G.f.E);
}

/// A_N U = tau(U) N - nabla~_U N (Weingarten).
template <class S>
Vec<S> A_N_op(const GeomPoint<S>& G, const Vec<S>& aU) {
    Vec<S> dn = nabla_amb(G, aU, G.N_view());
    S t = G.g(dn, G.f.E);
    Vec<S> r = vec_scale(t, G.N_view().v);
    for (int i = 0; i < G.dim(); ++i) r[i] -= dn[i];
    return r;
}

/// A*_E U = -nabla_U E - tau(U) E (nabla~_U E is already tangent).
template <class S>
Vec<S> A_star_op(const GeomPoint<S>& G, const Vec<S>& aU) {
    Vec<S> de = nabla_amb(G, aU, G.E_view());
    S t = tau_form(G, aU);
    Vec<S> r(G.dim());
    for (int i = 0; i < G.dim(); ++i) r[i] = -de[i] - t * G.f.E[i];
    return r;
}

template <class S>
S theta_form(const GeomPoint<S>& G, const Vec<S>& v) {
    return G.g(G.N_view().v, v);
}

template <class S>
S u_form(const GeomPoint<S>& G, const Vec<S>& v) {
    return G.g(v, G.f.psi);
}

template <class S>
S v_form(const GeomPoint<S>& G, const Vec<S>& v) {
    return G.g(v, G.f.zeta);
}

/// Tangent/transversal split of an ambient vector: w = T + beta N with
/// beta = g(w, E).
template <class S>
std::pair<Vec<S>, S> gauss_split(const GeomPoint<S>& G, const Vec<S>& w) {
    S beta = G.g(w, G.f.E);
    Vec<S> t = w;
    vec_axpy(t, -beta, G.N_view().v);
    return {t, beta};
}

/// Screen/radical split of a tangent vector: T = P(T) + g(T,N) E.
template <class S>
std::pair<Vec<S>, S> screen_split(const GeomPoint<S>& G, const Vec<S>& t) {
    S c = G.g(t, G.N_view().v);
    Vec<S> p = t;
    vec_axpy(p, -c, G.f.E);
    return {p, c};
}

/// Induced connection: tangent part of the ambient derivative.
template <class S, class F>
Vec<S> induced_nabla(const GeomPoint<S>& G, const Vec<S>& aU, const F& V) {
    Vec<S> dv = nabla_amb(G, aU, V);
    S b = G.g(dv, G.f.E);
    vec_axpy(dv, -b, G.N_view().v);
    return dv;
}

/// C(U, PV) = g(nabla_U PV, N); equals g(nabla~_U PV, N) since N is null.
template <class S, class F>
S C_form(const GeomPoint<S>& G, const Vec<S>& aU, const F& PV) {
    return G.g(nabla_amb(G, aU, PV), G.N_view().v);
}

/// phi applied pointwise to a tangent vector: phi(t) = J t - u(t) N.
template <class S>
Vec<S> phi_vec(const GeomPoint<S>& G, const Vec<S>& t) {
    Vec<S> r = matvec(G.J, t);
    vec_axpy(r, -u_form(G, t), G.N_view().v);
    return r;
}

/// u(V) along the chart: value and gradient (for (nabla_U u)V terms).
template <class S, class F>
std::pair<S, Vec<S>> u_fn(const GeomPoint<S>& G, const F& V) {
    S val = G.g(V.v, G.f.psi);
    Vec<S> grad(G.n(), S{});
    for (int k = 0; k < G.n(); ++k)
        grad[k] = G.g(V.d.col(k), G.f.psi) + G.g(V.v, G.dPsi.col(k));
    return {val, grad};
}

/// v(E) along the chart (value and gradient); v(E) = g(E, zeta).
template <class S>
std::pair<S, Vec<S>> vE_fn(const GeomPoint<S>& G) {
    S val = G.g(G.f.E, G.f.zeta);
    Vec<S> grad(G.n(), S{});
    for (int k = 0; k < G.n(); ++k)
        grad[k] = G.g(G.dE.col(k), G.f.zeta) + G.g(G.f.E, G.dZeta.col(k));
    return {val, grad};
}

/// The field phi(V) with its derivative table (product rule; J constant).
template <class S, class F>
Fld<S> phi_field(const GeomPoint<S>& G, const F& V) {
    Fld<S> r;
    auto [uv, ugrad] = u_fn(G, V);
    FldView<S> N = G.N_view();
    r.v = matvec(G.J, V.v);
    vec_axpy(r.v, -uv, N.v);
    r.d = Matrix<S>(G.dim(), G.n());
    for (int k = 0; k < G.n(); ++k) {
        Vec<S> col = matvec(G.J, V.d.col(k));
        vec_axpy(col, -ugrad[k], N.v);
        vec_axpy(col, -uv, N.d.col(k));
        for (int i = 0; i < G.dim(); ++i) r.d(i, k) = col[i];
    }
    return r;
}

/// xi = zeta - v(E) N, the tangent part of J N, with derivatives.
template <class S>
Fld<S> xi_field(const GeomPoint<S>& G) {
    auto [ve, vgrad] = vE_fn(G);
    FldView<S> N = G.N_view();
    Fld<S> r;
    r.v = G.f.zeta;
    vec_axpy(r.v, -ve, N.v);
    r.d = Matrix<S>(G.dim(), G.n());
    for (int k = 0; k < G.n(); ++k) {
        Vec<S> col = G.dZeta.col(k);
        vec_axpy(col, -vgrad[k], N.v);
        vec_axpy(col, -ve, N.d.col(k));
        for (int i = 0; i < G.dim(); ++i) r.d(i, k) = col[i];
    }
    return r;
}

/// Expansion of a tangent vector lying in span(mu0) in the mu0 basis.
template <class S>
Vec<S> mu0_coefficients(const GeomPoint<S>& G, const Vec<S>& t) {
    const int m = (int)G.f.mu0.size();
    Matrix<S> gram(m, m);
    Vec<S> rhs(m);
    for (int i = 0; i < m; ++i) {
        rhs[i] = G.g(t, G.f.mu0[i]);
        for (int j = 0; j < m; ++j) gram(i, j) = G.g(G.f.mu0[i], G.f.mu0[j]);
    }
    auto sol = solve(gram, rhs);
    if (!sol) throw ScreenConstructionError("mu0 Gram is degenerate");
    return *sol;
}

/// mu0-projection of a tangent vector.
template <class S>
Vec<S> mu0_project(const GeomPoint<S>& G, const Vec<S>& t) {
    Vec<S> coeff = mu0_coefficients(G, t);
    Vec<S> r(G.dim(), S{});
    for (std::size_t i = 0; i < G.f.mu0.size(); ++i) vec_axpy(r, coeff[i], G.f.mu0[i]);
    return r;
}

/// mu0-connection coefficients (alpha1, alpha2, alpha3) for U,V in mu0:
/// alpha1 = C(U, JV), alpha2 = B(U, JV), alpha3 = C(U, V), each equal to the
/// direct projections g(nabla_U V, JN), g(nabla_U V, JE), g(nabla_U V, N).
template <class S>
struct Mu0Alphas {
    S a1{}, a2{}, a3{};          // via B/C formulas
    S p1{}, p2{}, p3{};          // via direct projections
};

template <class S>
Mu0Alphas<S> mu0_alphas(const GeomPoint<S>& G, int iu, int iv) {
    Mu0Alphas<S> r;
    const Vec<S>& aU = G.f.mu0_coeff[iu];
    Fld<S> V = G.mu0_field(iv);
    Fld<S> JV{matvec(G.J, V.v), Matrix<S>(G.dim(), G.n())};
    for (int k = 0; k < G.n(); ++k) {
        Vec<S> col = matvec(G.J, V.d.col(k));
        for (int i = 0; i < G.dim(); ++i) JV.d(i, k) = col[i];
    }
    r.a1 = C_form(G, aU, JV);
    r.a2 = B_form(G, aU, JV);
    r.a3 = C_form(G, aU, V);
    Vec<S> nv = induced_nabla(G, aU, V);
    r.p1 = G.g(nv, G.f.zeta);
    r.p2 = G.g(nv, G.f.psi);
    r.p3 = G.g(nv, G.N_field().v);
    return r;
}

enum class DerivEngine { None, Dual, FiniteDifference };

struct GeomBuildOptions {
    FrameOptions frame;
    DerivEngine engine = DerivEngine::Dual;
    double fd_step = 1e-6;
};

/// Exact geometry of an affine hypersurface: constant frame, zero derivative
/// tables.
GeomPoint<QuadNum> exact_affine_geometry(const SemiEuclideanSpace& space,
                                         const AffineHypersurface& h,
                                         const MetallicStructure* structure,
                                         const FrameOptions& opt);

/// Float geometry of a chart point: value pass picks the pivots, then a dual
/// (or finite-difference) pass fills the derivative tables.
GeomPoint<double> chart_geometry(const SemiEuclideanSpace& space, const ChartHypersurface& chart,
                                 const MetallicStructure* structure,
                                 const std::vector<double>& u, const GeomBuildOptions& opt);

/// Lie bracket of polynomial chart-coefficient fields, as chart coefficients.
std::vector<Polynomial> lie_bracket_poly(const std::vector<Polynomial>& aU,
                                         const std::vector<Polynomial>& aV);

} // namespace mlh
