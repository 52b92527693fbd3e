#include "mlh/hypersurface.hpp"

#include <type_traits>

namespace mlh {

namespace {

template <class S>
Vec<S> metric_row(const SemiEuclideanSpace& space, const Vec<S>& v) {
    Vec<S> r(v.size());
    for (int i = 0; i < space.dim; ++i) r[i] = space.signature[i] > 0 ? v[i] : -v[i];
    return r;
}

template <class S>
double vec_scale_mag(const Vec<S>& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, ScalarOps<S>::magnitude(x));
    return m;
}

template <class S>
Vec<S> basis_vector(int dim, int k) {
    Vec<S> v(dim, S{});
    v[k] = S(1);
    return v;
}

// Null completion: N = (1/pr) (v - (g(v,v) / (2 pr)) E) with pr = g(v,E).
template <class S>
Vec<S> null_partner(const SemiEuclideanSpace& space, const Vec<S>& E, const Vec<S>& v) {
    S pr = space.metric(v, E);
    S vv = space.metric(v, v);
    Vec<S> n = v;
    vec_axpy(n, -(vv / (pr + pr)), E);
    S inv = S(1) / pr;
    for (auto& x : n) x = inv * x;
    return n;
}

} // namespace

template <class S>
FramePoint<S> build_frame(const SemiEuclideanSpace& space, const Vec<S>& x, const Matrix<S>& jac,
                          const Matrix<S>* J, const S& sigma, long p, long q,
                          const FrameOptions& opt, FrameTrace* record, const FrameTrace* replay) {
    (void)q;
    const int dim = space.dim;
    const int n = jac.cols();
    const bool value_pass = replay == nullptr;

    FramePoint<S> f;
    f.x = x;
    f.jac = jac;
    f.n = n;
    f.dim = dim;

    std::vector<Vec<S>> phi(n);
    for (int k = 0; k < n; ++k) phi[k] = jac.col(k);

    if (value_pass && !ScalarOps<S>::exact) {
        auto e = row_reduce(jac);
        if (e.rank < n) throw DegenerateChartError("chart Jacobian is rank-deficient");
    }

    // Radical: nullspace of the induced Gram matrix.
    Matrix<S> gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            gram(i, j) = space.metric(phi[i], phi[j]);
            gram(j, i) = gram(i, j);
        }
    auto kernel = nullspace(gram, replay ? &replay->gram_plan : nullptr,
                            record ? &record->gram_plan : nullptr);
    if (value_pass) {
        if (kernel.empty()) throw NotLightlikeError();
        if (kernel.size() > 1) throw NotHypersurfaceRankError((int)kernel.size());
    }
    f.E_coeff = kernel.at(0);
    f.E = matvec(jac, f.E_coeff);

    // Deterministic normalization of the radical generator.
    int ni;
    if (replay) {
        ni = replay->e_norm_index;
    } else {
        ni = -1;
        if (ScalarOps<S>::exact) {
            for (int i = 0; i < dim; ++i)
                if (!ScalarOps<S>::is_zero(f.E[i])) { ni = i; break; }
        } else {
            double best = -1.0;
            for (int i = 0; i < dim; ++i) {
                double m = ScalarOps<S>::magnitude(f.E[i]);
                if (m > best) { best = m; ni = i; }
            }
        }
        if (record) record->e_norm_index = ni;
    }
    {
        S inv = S(1) / f.E[ni];
        for (auto& v : f.E) v = inv * v;
        for (auto& v : f.E_coeff) v = inv * v;
    }

    const double e_mag = vec_scale_mag(f.E);

    // Canonical transversal. Default rule: null completion of the highest
    // coordinate direction pairing with E; with an explicit screen the seed
    // is first stripped of its screen components.
    if (opt.use_override) {
        if constexpr (std::is_same_v<S, QuadNum>) {
            const auto& basis = opt.override_basis;
            if ((int)basis.size() != n - 1)
                throw ScreenConstructionError("screen override must have n-1 vectors");
            for (const auto& w : basis)
                if (!space.metric(w, f.E).is_zero())
                    throw ScreenConstructionError("screen override vector not orthogonal to the radical");
            Matrix<S> span(dim, n);
            for (int i = 0; i < dim; ++i) {
                span(i, 0) = f.E[i];
                for (int a = 0; a < n - 1; ++a) span(i, a + 1) = basis[a][i];
            }
            if (row_reduce(span).rank != n)
                throw ScreenConstructionError("screen override does not complement the radical");
            Matrix<S> wgram(n - 1, n - 1);
            for (int a = 0; a < n - 1; ++a)
                for (int b = 0; b < n - 1; ++b) wgram(a, b) = space.metric(basis[a], basis[b]);
            if ((n - 1) > 0 && ScalarOps<S>::is_zero(determinant(wgram)))
                throw ScreenConstructionError("screen override Gram matrix is degenerate");
            f.W = basis;

            int seed = -1;
            for (int k = dim - 1; k >= 0; --k)
                if (!ScalarOps<S>::is_zero(f.E[k])) { seed = k; break; }
            Vec<S> v = basis_vector<S>(dim, seed);
            if (n - 1 > 0) {
                Vec<S> rhs(n - 1);
                for (int a = 0; a < n - 1; ++a) rhs[a] = space.metric(v, basis[a]);
                auto sol = solve(wgram, rhs);
                for (int a = 0; a < n - 1; ++a) vec_axpy(v, -(*sol)[a], basis[a]);
            }
            f.N = null_partner(space, f.E, v);
        } else {
            throw ScreenConstructionError("screen override requires the exact backend");
        }
    } else {
        int seed;
        if (replay) {
            seed = replay->n_seed;
        } else if (ScalarOps<S>::exact) {
            // Highest coordinate direction pairing with E; reproduces the
            // worked examples' transversal.
            seed = -1;
            for (int k = dim - 1; k >= 0; --k) {
                if (!ScalarOps<S>::is_zero(f.E[k], e_mag)) { seed = k; break; }
            }
        } else {
            // Float mode pivots on the largest pairing for conditioning.
            seed = 0;
            double best = -1.0;
            for (int k = 0; k < dim; ++k) {
                double m = ScalarOps<S>::magnitude(f.E[k]);
                if (m > best) { best = m; seed = k; }
            }
        }
        if (record) record->n_seed = seed;
        f.N = null_partner(space, f.E, basis_vector<S>(dim, seed));

        // Screen = {E, N}^perp; always non-degenerate.
        Matrix<S> rows(2, dim);
        {
            Vec<S> re = metric_row(space, f.E), rn = metric_row(space, f.N);
            for (int i = 0; i < dim; ++i) { rows(0, i) = re[i]; rows(1, i) = rn[i]; }
        }
        f.W = nullspace(rows, replay ? &replay->screen_plan : nullptr,
                        record ? &record->screen_plan : nullptr);
        if (value_pass && (int)f.W.size() != n - 1)
            throw ScreenConstructionError("screen construction returned wrong dimension");
    }

    // Metallic-adapted block.
    if (J) {
        f.psi = matvec(*J, f.E);

        Kind kind;
        if (replay) {
            kind = replay->kind;
        } else if (!opt.adapt) {
            kind = Kind::Generic;
        } else {
            const double psi_mag = vec_scale_mag(f.psi);
            // Invariant: J E proportional to E (E[ni] = 1, so the ratio is psi[ni]).
            S lambda = f.psi[ni];
            bool prop = true;
            for (int i = 0; i < dim && prop; ++i)
                if (!ScalarOps<S>::is_zero(f.psi[i] - lambda * f.E[i], psi_mag + e_mag)) prop = false;
            if (prop) {
                kind = Kind::Invariant;
            } else {
                S t = space.metric(f.psi, f.E);
                kind = ScalarOps<S>::is_zero(t, psi_mag * e_mag * dim) ? Kind::ScreenSemiInvariant
                                                                       : Kind::Generic;
            }
            if (record) record->kind = kind;
        }
        f.kind = kind;

        const S P = S((long)p);
        const S sqrtD = sigma + sigma - P; // 2 sigma - p
        const S other = P - sigma;         // p - sigma

        if (kind == Kind::Invariant) {
            f.inv_lambda = f.psi[ni];
            const S mu = P - f.inv_lambda;
            const S denom = f.inv_lambda + f.inv_lambda - P;
            int seed;
            Vec<S> v;
            if (replay) {
                seed = replay->ad_seed_plus;
                v = basis_vector<S>(dim, seed);
                Vec<S> jv = J->col(seed);
                for (int i = 0; i < dim; ++i) v[i] = (jv[i] - mu * v[i]) / denom;
            } else {
                seed = -1;
                for (int k = dim - 1; k >= 0 && seed < 0; --k) {
                    Vec<S> cand = basis_vector<S>(dim, k);
                    Vec<S> jv = J->col(k);
                    for (int i = 0; i < dim; ++i) cand[i] = (jv[i] - mu * cand[i]) / denom;
                    if (!ScalarOps<S>::is_zero(space.metric(cand, f.E), e_mag * (1.0 + vec_scale_mag(cand)))) {
                        seed = k;
                        v = std::move(cand);
                    }
                }
                if (seed < 0) throw ScreenConstructionError("no eigenspace partner for invariant radical");
                if (record) record->ad_seed_plus = seed;
            }
            f.N_ad = null_partner(space, f.E, v);

            Matrix<S> rows(2, dim);
            Vec<S> re = metric_row(space, f.E), rn = metric_row(space, f.N_ad);
            for (int i = 0; i < dim; ++i) { rows(0, i) = re[i]; rows(1, i) = rn[i]; }
            f.W_ad = nullspace(rows, replay ? &replay->mu0_plan : nullptr,
                               record ? &record->mu0_plan : nullptr);
        } else if (kind == Kind::ScreenSemiInvariant) {
            // Eigencomponents of E; both are null, and null partners inside
            // each eigenspace assemble the adapted transversal.
            Vec<S> Eplus(dim), Eminus(dim);
            for (int i = 0; i < dim; ++i) {
                Eplus[i] = (f.psi[i] - other * f.E[i]) / sqrtD;
                Eminus[i] = f.E[i] - Eplus[i];
            }
            const S target_plus = (sigma - P) / sqrtD;
            const S target_minus = sigma / sqrtD;

            auto partner_in = [&](const Vec<S>& comp, bool plus, int& seed_io,
                                  bool have_seed) -> Vec<S> {
                const double cmag = vec_scale_mag(comp);
                auto project = [&](int k) {
                    Vec<S> cand = basis_vector<S>(dim, k);
                    Vec<S> jv = J->col(k);
                    for (int i = 0; i < dim; ++i)
                        cand[i] = plus ? (jv[i] - other * cand[i]) / sqrtD
                                       : (sigma * cand[i] - jv[i]) / sqrtD;
                    return cand;
                };
                Vec<S> v;
                if (have_seed) {
                    v = project(seed_io);
                } else {
                    int seed = -1;
                    for (int k = dim - 1; k >= 0 && seed < 0; --k) {
                        Vec<S> cand = project(k);
                        if (!ScalarOps<S>::is_zero(space.metric(cand, comp),
                                                   cmag * (1.0 + vec_scale_mag(cand)))) {
                            seed = k;
                            v = std::move(cand);
                        }
                    }
                    if (seed < 0)
                        throw ScreenConstructionError("no null partner in eigenspace");
                    seed_io = seed;
                }
                S pr = space.metric(v, comp);
                Vec<S> w = v;
                vec_axpy(w, -(space.metric(v, v) / (pr + pr)), comp);
                S c = (plus ? target_plus : target_minus) / pr;
                for (auto& xx : w) xx = c * xx;
                return w;
            };

            int seed_p = replay ? replay->ad_seed_plus : -1;
            int seed_m = replay ? replay->ad_seed_minus : -1;
            Vec<S> Nplus = partner_in(Eplus, true, seed_p, replay != nullptr);
            Vec<S> Nminus = partner_in(Eminus, false, seed_m, replay != nullptr);
            if (record) { record->ad_seed_plus = seed_p; record->ad_seed_minus = seed_m; }

            f.N_ad = vec_add(Nplus, Nminus);
            Vec<S> zeta_ad = matvec(*J, f.N_ad);

            Matrix<S> rows(4, dim);
            Vec<S> r0 = metric_row(space, f.E), r1 = metric_row(space, f.psi);
            Vec<S> r2 = metric_row(space, f.N_ad), r3 = metric_row(space, zeta_ad);
            for (int i = 0; i < dim; ++i) {
                rows(0, i) = r0[i]; rows(1, i) = r1[i]; rows(2, i) = r2[i]; rows(3, i) = r3[i];
            }
            f.mu0 = nullspace(rows, replay ? &replay->mu0_plan : nullptr,
                              record ? &record->mu0_plan : nullptr);
            if (value_pass && (int)f.mu0.size() != dim - 4)
                throw ScreenConstructionError("mu0 has unexpected dimension");

            f.W_ad.clear();
            f.W_ad.push_back(f.psi);
            f.W_ad.push_back(zeta_ad);
            for (const auto& m : f.mu0) f.W_ad.push_back(m);
        }

        f.zeta = matvec(*J, f.active_N());

        // Chart coefficients of the tangent fields used as differentiation
        // directions. One elimination plan serves every right-hand side.
        auto tangent_coeffs = [&](const Vec<S>& v) -> Vec<S> {
            std::optional<Vec<S>> sol;
            if (replay)
                sol = solve(jac, v, &replay->coeff_plan, nullptr);
            else if (record && record->coeff_plan.steps.empty())
                sol = solve(jac, v, nullptr, &record->coeff_plan);
            else if (record)
                sol = solve(jac, v, &record->coeff_plan, nullptr);
            else
                sol = solve(jac, v, nullptr, nullptr);
            if (!sol) throw ScreenConstructionError("field is not tangent");
            return *sol;
        };
        if (kind == Kind::ScreenSemiInvariant) {
            f.psi_coeff = tangent_coeffs(f.psi);
            f.zeta_coeff = tangent_coeffs(f.zeta);
            f.mu0_coeff.clear();
            for (const auto& m : f.mu0) f.mu0_coeff.push_back(tangent_coeffs(m));
        }
    } else {
        f.kind = Kind::Generic;
    }

    return f;
}

template FramePoint<QuadNum> build_frame<QuadNum>(const SemiEuclideanSpace&, const Vec<QuadNum>&,
                                                  const Matrix<QuadNum>&, const Matrix<QuadNum>*,
                                                  const QuadNum&, long, long, const FrameOptions&,
                                                  FrameTrace*, const FrameTrace*);
template FramePoint<double> build_frame<double>(const SemiEuclideanSpace&, const Vec<double>&,
                                                const Matrix<double>&, const Matrix<double>*,
                                                const double&, long, long, const FrameOptions&,
                                                FrameTrace*, const FrameTrace*);
template FramePoint<DualScalar> build_frame<DualScalar>(const SemiEuclideanSpace&,
                                                        const Vec<DualScalar>&,
                                                        const Matrix<DualScalar>&,
                                                        const Matrix<DualScalar>*,
                                                        const DualScalar&, long, long,
                                                        const FrameOptions&, FrameTrace*,
                                                        const FrameTrace*);

FramePoint<QuadNum> build_affine_frame(const SemiEuclideanSpace& space,
                                       const AffineHypersurface& h,
                                       const MetallicStructure* structure,
                                       const FrameOptions& opt) {
    if (h.dim() != space.dim) throw domain_error("hypersurface covector length mismatch");
    QVec x = h.point_on();
    auto basis = h.kernel_basis();
    QMatrix jac(space.dim, space.dim - 1);
    for (int k = 0; k < space.dim - 1; ++k)
        for (int i = 0; i < space.dim; ++i) jac(i, k) = basis[k][i];

    if (opt.use_override) {
        for (const auto& w : opt.override_basis) {
            QuadNum acc;
            for (int i = 0; i < space.dim; ++i) acc += h.c[i] * w[i];
            if (!acc.is_zero())
                throw ScreenConstructionError("screen override vector is not tangent to the hypersurface");
        }
    }

    QuadNum sigma = structure ? structure->sigma() : QuadNum(1);
    long p = structure ? structure->p : 1, q = structure ? structure->q : 1;
    const QMatrix* J = structure ? &structure->J : nullptr;
    return build_frame<QuadNum>(space, x, jac, J, sigma, p, q, opt, nullptr, nullptr);
}

TangentFrame tangent_frame(const SemiEuclideanSpace& space, const AffineHypersurface& h,
                           const QVec& point) {
    if (h.dim() != space.dim) throw domain_error("hypersurface covector length mismatch");
    if (!h.contains(point)) throw domain_error("point does not lie on the hypersurface");
    return TangentFrame{point, h.kernel_basis()};
}

ChartHypersurface affine_as_chart(const AffineHypersurface& h,
                                  std::vector<std::pair<double, double>> domain) {
    const int dim = h.dim(), n = dim - 1;
    if (domain.empty()) domain.assign(n, {-1.0, 1.0});
    if ((int)domain.size() != n) throw domain_error("chart domain dimension mismatch");
    QVec x0 = h.point_on();
    auto basis = h.kernel_basis();
    std::vector<Polynomial> comp(dim, Polynomial(n));
    for (int i = 0; i < dim; ++i) {
        Polynomial p = Polynomial::constant(n, x0[i].to_double());
        for (int k = 0; k < n; ++k) {
            double c = basis[k][i].to_double();
            if (c != 0.0) p = p + Polynomial::variable(n, k).times(c);
        }
        comp[i] = p;
    }
    return ChartHypersurface(std::move(comp), std::move(domain));
}

QVec radical(const SemiEuclideanSpace& space, const std::vector<QVec>& phi) {
    const int n = (int)phi.size();
    QMatrix gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            gram(i, j) = space.metric(phi[i], phi[j]);
            gram(j, i) = gram(i, j);
        }
    auto kernel = nullspace(gram);
    if (kernel.empty()) throw NotLightlikeError();
    if (kernel.size() > 1) throw NotHypersurfaceRankError((int)kernel.size());
    QVec E(space.dim, QuadNum{});
    for (int k = 0; k < n; ++k) vec_axpy(E, kernel[0][k], phi[k]);
    for (int i = 0; i < space.dim; ++i)
        if (!E[i].is_zero()) {
            QuadNum inv = QuadNum(1) / E[i];
            for (auto& v : E) v = inv * v;
            break;
        }
    return E;
}

QVec transversal(const SemiEuclideanSpace& space, const QVec& E, const std::vector<QVec>& screen) {
    int seed = -1;
    for (int k = space.dim - 1; k >= 0; --k)
        if (!E[k].is_zero()) { seed = k; break; }
    QVec v(space.dim, QuadNum{});
    v[seed] = QuadNum(1);
    if (!screen.empty()) {
        const int m = (int)screen.size();
        QMatrix wgram(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) wgram(a, b) = space.metric(screen[a], screen[b]);
        QVec rhs(m);
        for (int a = 0; a < m; ++a) rhs[a] = space.metric(v, screen[a]);
        auto sol = solve(wgram, rhs);
        if (!sol) throw ScreenConstructionError("degenerate screen in transversal construction");
        for (int a = 0; a < m; ++a) vec_axpy(v, -(*sol)[a], screen[a]);
    }
    QuadNum pr = space.metric(v, E);
    if (pr.is_zero()) throw ScreenConstructionError("transversal seed is orthogonal to the radical");
    QuadNum vv = space.metric(v, v);
    QVec n = v;
    vec_axpy(n, -(vv / (pr + pr)), E);
    QuadNum inv = QuadNum(1) / pr;
    for (auto& xx : n) xx = inv * xx;
    return n;
}

} // namespace mlh
