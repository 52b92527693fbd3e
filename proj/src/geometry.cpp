#include "mlh/geometry.hpp"

namespace mlh {

namespace {

template <class S>
void scale_vec_inplace(Vec<S>& v, const S& c) {
    for (auto& x : v) x = c * x;
}

/// Rescale the radical by beta (and the transversal by 1/beta) keeping all
/// frame relations intact. Used to manufacture tau != 0 on totally geodesic
/// hypersurfaces.
template <class S>
void apply_scale(FramePoint<S>& f, const S& beta) {
    S inv = S(1) / beta;
    scale_vec_inplace(f.E, beta);
    scale_vec_inplace(f.E_coeff, beta);
    scale_vec_inplace(f.N, inv);
    if (f.has_adapted()) scale_vec_inplace(f.N_ad, inv);
    if (!f.psi.empty()) scale_vec_inplace(f.psi, beta);
    if (!f.zeta.empty()) scale_vec_inplace(f.zeta, inv);
    if (f.psi_coeff) scale_vec_inplace(*f.psi_coeff, beta);
    if (f.zeta_coeff) scale_vec_inplace(*f.zeta_coeff, inv);
    if (f.kind == Kind::ScreenSemiInvariant && f.W_ad.size() >= 2) {
        scale_vec_inplace(f.W_ad[0], beta);
        scale_vec_inplace(f.W_ad[1], inv);
    }
}

Vec<double> strip(const Vec<DualScalar>& v) {
    Vec<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].v;
    return r;
}

Matrix<double> strip(const Matrix<DualScalar>& m) {
    Matrix<double> r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).v;
    return r;
}

FramePoint<double> strip(const FramePoint<DualScalar>& f) {
    FramePoint<double> r;
    r.x = strip(f.x);
    r.jac = strip(f.jac);
    r.n = f.n;
    r.dim = f.dim;
    r.E_coeff = strip(f.E_coeff);
    r.E = strip(f.E);
    r.N = strip(f.N);
    for (const auto& w : f.W) r.W.push_back(strip(w));
    r.kind = f.kind;
    r.inv_lambda = f.inv_lambda.v;
    if (!f.N_ad.empty()) r.N_ad = strip(f.N_ad);
    for (const auto& w : f.W_ad) r.W_ad.push_back(strip(w));
    for (const auto& m : f.mu0) r.mu0.push_back(strip(m));
    for (const auto& m : f.mu0_coeff) r.mu0_coeff.push_back(strip(m));
    if (!f.psi.empty()) r.psi = strip(f.psi);
    if (!f.zeta.empty()) r.zeta = strip(f.zeta);
    if (f.psi_coeff) r.psi_coeff = strip(*f.psi_coeff);
    if (f.zeta_coeff) r.zeta_coeff = strip(*f.zeta_coeff);
    return r;
}

Matrix<double> partial_table(const Vec<DualScalar>& v, int n) {
    Matrix<double> d((int)v.size(), n);
    for (int i = 0; i < (int)v.size(); ++i)
        for (int k = 0; k < n; ++k) d(i, k) = v[i].partial(k);
    return d;
}

} // namespace

GeomPoint<QuadNum> exact_affine_geometry(const SemiEuclideanSpace& space,
                                         const AffineHypersurface& h,
                                         const MetallicStructure* structure,
                                         const FrameOptions& opt) {
    GeomPoint<QuadNum> G;
    G.space = &space;
    G.f = build_affine_frame(space, h, structure, opt);
    if (structure) {
        G.p = structure->p;
        G.q = structure->q;
        G.sigma = structure->sigma();
        G.J = structure->J;
        G.has_J = true;
    }
    const int dim = G.f.dim, n = G.f.n;
    Matrix<QuadNum> zero(dim, n);
    G.dphi.assign(n, zero);
    G.dE = zero;
    G.dN = zero;
    G.dNad = zero;
    G.dPsi = zero;
    G.dZeta = zero;
    G.dW.assign(G.f.W.size(), zero);
    G.dWad.assign(G.f.W_ad.size(), zero);
    G.dMu0.assign(G.f.mu0.size(), zero);
    return G;
}

GeomPoint<double> chart_geometry(const SemiEuclideanSpace& space, const ChartHypersurface& chart,
                                 const MetallicStructure* structure,
                                 const std::vector<double>& u, const GeomBuildOptions& opt) {
    const int dim = chart.dim, n = chart.n;
    Matrix<double> Jd;
    double sigma_d = 1.0;
    long p = 1, q = 1;
    const Matrix<double>* Jp = nullptr;
    if (structure) {
        Jd = structure->as<double>();
        sigma_d = structure->sigma().to_double();
        p = structure->p;
        q = structure->q;
        Jp = &Jd;
    }

    // Value pass: make every pivot decision and record it.
    Vec<double> x;
    Matrix<double> jac;
    chart.eval(u, x, jac);
    FrameTrace trace;
    FramePoint<double> fv = build_frame<double>(space, x, jac, Jp, sigma_d, p, q, opt.frame,
                                                &trace, nullptr);
    if (opt.frame.frame_scale) {
        double beta = opt.frame.frame_scale->eval(u);
        if (nearly_zero(beta)) throw DegenerateChartError("frame scale vanishes at sample point");
        apply_scale(fv, beta);
    }

    GeomPoint<double> G;
    G.space = &space;
    G.p = p;
    G.q = q;
    G.sigma = sigma_d;
    if (structure) {
        G.J = Jd;
        G.has_J = true;
    }

    Matrix<double> zero(dim, n);

    if (opt.engine == DerivEngine::Dual) {
        std::vector<DualScalar> ud(n);
        for (int k = 0; k < n; ++k) ud[k] = DualScalar::variable(u[k], k, n);
        Vec<DualScalar> xd;
        Matrix<DualScalar> jacd;
        chart.eval(ud, xd, jacd);
        Matrix<DualScalar> Jdd;
        const Matrix<DualScalar>* Jpd = nullptr;
        if (structure) {
            Jdd = structure->as<DualScalar>();
            Jpd = &Jdd;
        }
        FramePoint<DualScalar> fd = build_frame<DualScalar>(space, xd, jacd, Jpd,
                                                            DualScalar(sigma_d), p, q, opt.frame,
                                                            nullptr, &trace);
        if (opt.frame.frame_scale) {
            DualScalar beta = opt.frame.frame_scale->eval(ud);
            apply_scale(fd, beta);
        }
        G.f = strip(fd);
        G.dphi.resize(n, zero);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < dim; ++i)
                for (int m = 0; m < n; ++m) G.dphi[k](i, m) = jacd(i, k).partial(m);
        G.dE = partial_table(fd.E, n);
        G.dN = partial_table(fd.N, n);
        G.dNad = fd.has_adapted() ? partial_table(fd.N_ad, n) : zero;
        G.dPsi = fd.psi.empty() ? zero : partial_table(fd.psi, n);
        G.dZeta = fd.zeta.empty() ? zero : partial_table(fd.zeta, n);
        for (const auto& w : fd.W) G.dW.push_back(partial_table(w, n));
        for (const auto& w : fd.W_ad) G.dWad.push_back(partial_table(w, n));
        for (const auto& m : fd.mu0) G.dMu0.push_back(partial_table(m, n));
        return G;
    }

    G.f = fv;
    G.dphi.assign(n, zero);
    G.dE = zero;
    G.dN = zero;
    G.dNad = zero;
    G.dPsi = zero;
    G.dZeta = zero;
    G.dW.assign(fv.W.size(), zero);
    G.dWad.assign(fv.W_ad.size(), zero);
    G.dMu0.assign(fv.mu0.size(), zero);
    if (opt.engine == DerivEngine::None) return G;

    // Finite-difference pass: central differences of the replayed frame.
    const double h = opt.fd_step;
    for (int k = 0; k < n; ++k) {
        auto eval_at = [&](double step) {
            std::vector<double> us = u;
            us[k] += step;
            Vec<double> xs;
            Matrix<double> jacs;
            chart.eval(us, xs, jacs);
            FramePoint<double> fs = build_frame<double>(space, xs, jacs, Jp, sigma_d, p, q,
                                                        opt.frame, nullptr, &trace);
            if (opt.frame.frame_scale) apply_scale(fs, opt.frame.frame_scale->eval(us));
            return fs;
        };
        FramePoint<double> fp = eval_at(h);
        FramePoint<double> fm = eval_at(-h);
        auto put = [&](Matrix<double>& tab, const Vec<double>& vp, const Vec<double>& vm) {
            for (int i = 0; i < dim; ++i) tab(i, k) = (vp[i] - vm[i]) / (2.0 * h);
        };
        for (int m = 0; m < n; ++m) {
            for (int i = 0; i < dim; ++i)
                G.dphi[m](i, k) = (fp.jac(i, m) - fm.jac(i, m)) / (2.0 * h);
        }
        put(G.dE, fp.E, fm.E);
        put(G.dN, fp.N, fm.N);
        if (fv.has_adapted()) put(G.dNad, fp.N_ad, fm.N_ad);
        if (!fv.psi.empty()) put(G.dPsi, fp.psi, fm.psi);
        if (!fv.zeta.empty()) put(G.dZeta, fp.zeta, fm.zeta);
        for (std::size_t a = 0; a < fv.W.size(); ++a) put(G.dW[a], fp.W[a], fm.W[a]);
        for (std::size_t a = 0; a < fv.W_ad.size(); ++a) put(G.dWad[a], fp.W_ad[a], fm.W_ad[a]);
        for (std::size_t a = 0; a < fv.mu0.size(); ++a) put(G.dMu0[a], fp.mu0[a], fm.mu0[a]);
    }
    return G;
}

std::vector<Polynomial> lie_bracket_poly(const std::vector<Polynomial>& aU,
                                         const std::vector<Polynomial>& aV) {
    const int n = (int)aU.size();
    std::vector<Polynomial> r(n, Polynomial(n));
    for (int k = 0; k < n; ++k) {
        Polynomial acc(n);
        for (int i = 0; i < n; ++i)
            acc = acc + aU[i] * aV[k].derivative(i) - aV[i] * aU[k].derivative(i);
        r[k] = acc;
    }
    return r;
}

} // namespace mlh
