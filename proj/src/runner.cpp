#include "mlh/runner.hpp"

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

namespace mlh {

namespace {

ordered_json qvec_to_json(const QVec& v) {
    ordered_json a = ordered_json::array();
    for (const auto& x : v) a.push_back(quadnum_to_json(x));
    return a;
}

ordered_json qvec_to_float_json(const QVec& v) {
    ordered_json a = ordered_json::array();
    for (const auto& x : v) a.push_back(x.to_double());
    return a;
}

ordered_json dvec_to_json(const Vec<double>& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(x);
    return a;
}

std::string quadnum_str(const QuadNum& x) { return x.str(); }

template <class S>
std::string vec_str(const Vec<S>& v) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        if constexpr (std::is_same_v<S, QuadNum>) os << quadnum_str(v[i]);
        else os << v[i];
    }
    os << "]";
    return os.str();
}

std::vector<int> resolve_selection(const std::vector<std::string>& ids, Kind kind,
                                   bool has_structure) {
    const auto& reg = identity_registry();
    bool all = ids.empty() || (ids.size() == 1 && ids[0] == "all");
    if (all) return applicable_identities(kind, has_structure);
    std::vector<int> out;
    for (const auto& id : ids) {
        int idx = identity_index(id);
        if (idx < 0) throw schema_error("unknown identity id '" + id + "'");
        const auto& def = reg[idx];
        if (def.ap == Applicability::Invariant && kind != Kind::Invariant)
            throw precondition_error("identity " + id + " requires an invariant hypersurface");
        if (def.ap == Applicability::SSI && kind != Kind::ScreenSemiInvariant)
            throw precondition_error("identity " + id +
                                     " requires a screen semi-invariant hypersurface");
        if (idx >= identity_index("EQ30") && !has_structure)
            throw precondition_error("identity " + id + " requires a metallic structure");
        out.push_back(idx);
    }
    return out;
}

/// Projective comparison of a computed exact vector against a claim.
void compare_claim_vec(RunReport& rep, const std::string& tag, const QVec& computed,
                       const ordered_json& claim, long p, long q) {
    QVec want;
    for (const auto& e : claim) want.push_back(quadnum_from_json(e, p, q));
    if ((int)want.size() != (int)computed.size() || !proportional(computed, want)) {
        rep.discrepancies.push_back(
            {tag, vec_str(want), vec_str(computed) + " (projective comparison)"});
    }
}

struct SampleSlot {
    int status = 0; // 0 ok, 1 skipped (degenerate), 2 classification mismatch
    std::string why;
    SampleOutcomes out;
    ordered_json dump;
};

template <class S>
ordered_json geometry_dump(const GeomPoint<S>& G, const ordered_json& point) {
    ordered_json rec;
    rec["point"] = point;
    auto vec_json = [&](const Vec<S>& v) {
        ordered_json a = ordered_json::array();
        for (const auto& x : v) {
            if constexpr (std::is_same_v<S, QuadNum>) a.push_back(quadnum_to_json(x));
            else a.push_back(x);
        }
        return a;
    };
    rec["E"] = vec_json(G.f.E);
    rec["N"] = vec_json(G.N_field().v);
    const int n = G.n();
    ordered_json bmat = ordered_json::array(), cmat = ordered_json::array(),
                 tau = ordered_json::array();
    for (int a = 0; a < n; ++a) {
        Vec<S> da(n, S{});
        da[a] = S(1);
        ordered_json brow = ordered_json::array();
        for (int b = 0; b < n; ++b) {
            S v = B_form(G, da, G.coord_field(b));
            if constexpr (std::is_same_v<S, QuadNum>) brow.push_back(quadnum_to_json(v));
            else brow.push_back(v);
        }
        bmat.push_back(brow);
        ordered_json crow = ordered_json::array();
        for (int s = 0; s < G.screen_size(); ++s) {
            S v = C_form(G, da, G.screen_field(s));
            if constexpr (std::is_same_v<S, QuadNum>) crow.push_back(quadnum_to_json(v));
            else crow.push_back(v);
        }
        cmat.push_back(crow);
        S t = tau_form(G, da);
        if constexpr (std::is_same_v<S, QuadNum>) tau.push_back(quadnum_to_json(t));
        else tau.push_back(t);
    }
    rec["B_matrix"] = bmat;
    rec["C_matrix"] = cmat;
    rec["tau_covector"] = tau;
    return rec;
}

/// Classification flags over the evaluated geometry samples.
template <class S>
void accumulate_flags(const GeomPoint<S>& G, double& maxB, double& maxC, double& maxBzeta,
                      double& umbilical_defect) {
    const int n = G.n();
    double gg = 0.0, gB = 0.0;
    std::vector<std::pair<double, double>> gb;
    for (int a = 0; a < n; ++a) {
        Vec<S> da(n, S{});
        da[a] = S(1);
        for (int b = 0; b < n; ++b) {
            S bv = B_form(G, da, G.coord_field(b));
            maxB = std::max(maxB, ScalarOps<S>::magnitude(bv));
            double gd = ScalarOps<S>::to_double(G.g(G.f.jac.col(a), G.f.jac.col(b)));
            double bd = ScalarOps<S>::to_double(bv);
            gg += gd * gd;
            gB += gd * bd;
            gb.emplace_back(gd, bd);
        }
        for (int s = 0; s < G.screen_size(); ++s)
            maxC = std::max(maxC, ScalarOps<S>::magnitude(C_form(G, da, G.screen_view(s))));
        if (G.has_J && G.f.kind == Kind::ScreenSemiInvariant)
            maxBzeta = std::max(maxBzeta,
                                ScalarOps<S>::magnitude(B_form(G, da, G.zeta_view())));
    }
    // per-point fit of B = lambda g; the defect is the worst residual
    double lambda = gg > 0 ? gB / gg : 0.0;
    for (auto [gd, bd] : gb)
        umbilical_defect = std::max(umbilical_defect, std::abs(bd - lambda * gd));
}

} // namespace

ordered_json report_to_json(const RunReport& rep, bool include_timing) {
    ordered_json j;
    j["name"] = rep.name;
    j["backend"] = rep.backend;
    j["exit_code"] = rep.exit_code;
    if (!rep.error_kind.empty()) {
        j["error"] = {{"kind", rep.error_kind}, {"detail", rep.error_detail}};
    }
    if (rep.has_structure_checks) {
        j["structure_checks"] = {{"EQ3", rep.structure.polynomial_ok},
                                 {"EQ4", rep.structure.symmetry_ok},
                                 {"EQ5", rep.structure.pairing_ok},
                                 {"pairing_samples", rep.structure.pairing_samples}};
    }
    if (!rep.classification.empty()) j["classification"] = rep.classification;
    if (!rep.frame.is_null()) j["frame"] = rep.frame;
    if (!rep.flags.is_null()) j["flags"] = rep.flags;
    if (!rep.identities.empty()) {
        ordered_json ids = ordered_json::array();
        for (const auto& r : rep.identities) {
            ordered_json e;
            e["id"] = r.id;
            e["samples"] = r.samples;
            e["max_residual"] = r.max_residual;
            e["pass"] = r.pass;
            e["backend"] = r.backend;
            if (r.informational) e["informational"] = true;
            if (!r.note.empty()) e["note"] = r.note;
            ids.push_back(e);
        }
        j["identities"] = ids;
    }
    if (!rep.discrepancies.empty()) {
        ordered_json ds = ordered_json::array();
        for (const auto& d : rep.discrepancies)
            ds.push_back({{"tag", d.tag}, {"paper_claim", d.paper_claim}, {"computed", d.computed}});
        j["discrepancies"] = ds;
    }
    j["samples_evaluated"] = rep.samples_evaluated;
    j["samples_skipped"] = rep.samples_skipped;
    if (include_timing) j["timing_ms"] = rep.timing_ms;
    return j;
}

RunReport run(const Manifest& manifest, const RunOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.name = manifest.name;
    rep.backend = manifest.exact_backend ? "exact" : "float";
    const double tol = opts.tolerance > 0 ? opts.tolerance : manifest.tolerance;
    const std::uint64_t seed = opts.seed.value_or(manifest.seed);
    const int samples = opts.samples > 0 ? opts.samples : manifest.samples;
    const auto& ids = opts.identities.empty() ? manifest.identities : opts.identities;

    auto finalize = [&]() {
        rep.timing_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        return rep;
    };

    try {
        // Early id validation: unknown names are schema errors regardless of
        // what the geometry turns out to be.
        if (!(ids.empty() || (ids.size() == 1 && ids[0] == "all")))
            for (const auto& id : ids)
                if (identity_index(id) < 0) throw schema_error("unknown identity id '" + id + "'");

        if (manifest.structure) {
            rep.has_structure_checks = true;
            rep.structure = check_metallic_compat(manifest.space, manifest.p, manifest.q,
                                                  manifest.structure->J, 200, seed);
            if (!rep.structure.all_ok()) rep.exit_code = kExitIdentityFailure;
        }

        if (opts.structure_only || !manifest.has_hypersurface()) {
            if (!manifest.paper_claims.is_null() && manifest.paper_claims.contains("structure_ok")) {
                bool claim = manifest.paper_claims.at("structure_ok").get<bool>();
                if (claim != rep.structure.all_ok())
                    rep.discrepancies.push_back({"structure", claim ? "metallic" : "not metallic",
                                                 rep.structure.all_ok() ? "metallic" : "not metallic"});
            }
            return finalize();
        }

        FrameOptions fopt;
        if (!manifest.screen_override.empty()) {
            fopt.use_override = true;
            fopt.override_basis = manifest.screen_override;
        }
        if (manifest.frame_scale) fopt.frame_scale = &*manifest.frame_scale;
        const MetallicStructure* st = manifest.structure ? &*manifest.structure : nullptr;

        double maxB = 0.0, maxC = 0.0, maxBzeta = 0.0, umbDefect = 0.0;

        if (manifest.exact_backend) {
            auto G = exact_affine_geometry(manifest.space, *manifest.affine, st, fopt);
            rep.classification = st ? kind_name(G.f.kind) : "";
            rep.frame = ordered_json{{"point", qvec_to_json(G.f.x)},
                                     {"E", qvec_to_json(G.f.E)},
                                     {"E_approx", qvec_to_float_json(G.f.E)},
                                     {"N", qvec_to_json(G.f.N)},
                                     {"N_approx", qvec_to_float_json(G.f.N)}};
            ordered_json screen = ordered_json::array();
            for (const auto& w : G.f.W) screen.push_back(qvec_to_json(w));
            rep.frame["screen"] = screen;
            if (G.f.has_adapted()) {
                rep.frame["adapted"] = {{"N", qvec_to_json(G.f.N_ad)},
                                        {"psi", qvec_to_json(G.f.psi)},
                                        {"zeta", qvec_to_json(G.f.zeta)}};
                if (!G.f.mu0.empty()) {
                    ordered_json mu = ordered_json::array();
                    for (const auto& m : G.f.mu0) mu.push_back(qvec_to_json(m));
                    rep.frame["adapted"]["mu0"] = mu;
                }
            }

            // Recorded-claim comparisons (projective on frame vectors).
            const auto& pc = manifest.paper_claims;
            if (!pc.is_null()) {
                if (pc.contains("E"))
                    compare_claim_vec(rep, "E", G.f.E, pc.at("E"), manifest.p, manifest.q);
                if (pc.contains("N"))
                    compare_claim_vec(rep, "N", G.f.N, pc.at("N"), manifest.p, manifest.q);
                if (st && pc.contains("JE"))
                    compare_claim_vec(rep, "JE", matvec(st->J, G.f.E), pc.at("JE"), manifest.p,
                                      manifest.q);
                if (st && pc.contains("JN"))
                    compare_claim_vec(rep, "JN", matvec(st->J, G.f.N), pc.at("JN"), manifest.p,
                                      manifest.q);
                if (st && pc.contains("classification")) {
                    std::string want = pc.at("classification").get<std::string>();
                    if (want != rep.classification)
                        rep.discrepancies.push_back({"classification", want, rep.classification});
                }
            }

            if (!opts.classify_only) {
                auto selected = resolve_selection(ids, G.f.kind, st != nullptr);
                auto out = evaluate_identities(G, selected, tol);
                rep.identities = aggregate_identities({out}, selected, tol, true);
                rep.samples_evaluated = 1;
                accumulate_flags(G, maxB, maxC, maxBzeta, umbDefect);
                if (!opts.dump_path.empty()) {
                    ordered_json dumps = ordered_json::array();
                    dumps.push_back(geometry_dump(G, qvec_to_json(G.f.x)));
                    std::ofstream os(opts.dump_path);
                    os << dumps.dump(2) << "\n";
                }
            }
        } else {
            ChartHypersurface chart =
                manifest.chart ? *manifest.chart : affine_as_chart(*manifest.affine);
            GeomBuildOptions gopt;
            gopt.frame = fopt;
            gopt.engine = opts.engine;

            std::vector<std::vector<double>> pts = manifest.points;
            if (pts.empty()) {
                std::mt19937_64 rng(seed);
                pts.resize(samples);
                for (auto& u : pts) {
                    u.resize(chart.n);
                    for (int k = 0; k < chart.n; ++k) {
                        double t = double(rng() % 1000000) / 1000000.0;
                        u[k] = chart.domain[k].first +
                               t * (chart.domain[k].second - chart.domain[k].first);
                    }
                }
            }

            // Probe serially for the classification consensus.
            Kind kind = Kind::Generic;
            bool probed = false;
            std::string first_error;
            ordered_json probe_frame;
            for (const auto& u : pts) {
                try {
                    auto G = chart_geometry(manifest.space, chart, st, u, gopt);
                    kind = G.f.kind;
                    probed = true;
                    probe_frame = ordered_json{{"point", dvec_to_json(u)},
                                               {"E", dvec_to_json(G.f.E)},
                                               {"N", dvec_to_json(G.f.N)}};
                    ordered_json screen = ordered_json::array();
                    for (const auto& w : G.f.W) screen.push_back(dvec_to_json(w));
                    probe_frame["screen"] = screen;
                    if (G.f.has_adapted()) {
                        probe_frame["adapted"] = {{"N", dvec_to_json(G.f.N_ad)},
                                                  {"psi", dvec_to_json(G.f.psi)},
                                                  {"zeta", dvec_to_json(G.f.zeta)}};
                    }
                    break;
                } catch (const std::exception& e) {
                    if (first_error.empty()) first_error = e.what();
                }
            }
            if (!probed) throw NotLightlikeError();
            rep.classification = st ? kind_name(kind) : "";
            rep.frame = probe_frame;

            const auto& pc = manifest.paper_claims;
            if (!pc.is_null() && st && pc.contains("classification")) {
                std::string want = pc.at("classification").get<std::string>();
                if (want != rep.classification)
                    rep.discrepancies.push_back({"classification", want, rep.classification});
            }

            if (!opts.classify_only) {
                auto selected = resolve_selection(ids, kind, st != nullptr);
                std::vector<SampleSlot> slots(pts.size());
                const bool want_dump = !opts.dump_path.empty();
                const bool par = opts.parallel;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
                for (long i = 0; i < (long)pts.size(); ++i) {
                    try {
                        auto G = chart_geometry(manifest.space, chart, st, pts[i], gopt);
                        if (G.f.kind != kind) {
                            slots[i].status = 2;
                            slots[i].why = kind_name(G.f.kind);
                            continue;
                        }
                        slots[i].out = evaluate_identities(G, selected, tol);
                        if (want_dump) slots[i].dump = geometry_dump(G, dvec_to_json(pts[i]));
                    } catch (const std::exception& e) {
                        slots[i].status = 1;
                        slots[i].why = e.what();
                    }
                }
                (void)par;

                std::vector<SampleOutcomes> outs;
                ordered_json dumps = ordered_json::array();
                double fB = 0, fC = 0, fBz = 0, fUmb = 0;
                for (auto& s : slots) {
                    if (s.status == 0) {
                        outs.push_back(std::move(s.out));
                        if (want_dump) dumps.push_back(std::move(s.dump));
                    } else {
                        ++rep.samples_skipped;
                    }
                }
                // Flags from a serial pass over a few samples (cheap).
                for (std::size_t i = 0; i < pts.size() && i < 8; ++i) {
                    try {
                        auto G = chart_geometry(manifest.space, chart, st, pts[i], gopt);
                        if (G.f.kind == kind) accumulate_flags(G, fB, fC, fBz, fUmb);
                    } catch (const std::exception&) {
                    }
                }
                maxB = fB;
                maxC = fC;
                maxBzeta = fBz;
                umbDefect = fUmb;
                rep.samples_evaluated = (long)outs.size();
                rep.identities = aggregate_identities(outs, selected, tol, false);
                if (want_dump) {
                    std::ofstream os(opts.dump_path);
                    os << dumps.dump(2) << "\n";
                }
            }
        }

        if (!opts.classify_only && rep.samples_evaluated > 0) {
            rep.flags = ordered_json{{"totally_geodesic", maxB <= tol},
                                     {"totally_umbilical", umbDefect <= tol},
                                     {"max_B", maxB},
                                     {"max_C", maxC}};
            if (rep.classification == "ScreenSemiInvariant")
                rep.flags["mixed_geodesic"] = maxBzeta <= tol;
        }

        if (!rep.all_identities_pass()) rep.exit_code = kExitIdentityFailure;
        if (!rep.discrepancies.empty() && manifest.discrepancy_fatal)
            rep.exit_code = std::max(rep.exit_code, (int)kExitIdentityFailure);
    } catch (const schema_error& e) {
        rep.exit_code = kExitSchema;
        rep.error_kind = "SchemaError";
        rep.error_detail = e.what();
    } catch (const NotLightlikeError& e) {
        rep.exit_code = kExitPrecondition;
        rep.error_kind = "NotLightlike";
        rep.error_detail = e.what();
        if (!manifest.paper_claims.is_null() && manifest.paper_claims.contains("lightlike") &&
            manifest.paper_claims.at("lightlike").get<bool>())
            rep.discrepancies.push_back(
                {"lightlike", "hypersurface is lightlike", "induced Gram nullity 0"});
    } catch (const NotHypersurfaceRankError& e) {
        rep.exit_code = kExitPrecondition;
        rep.error_kind = "NotHypersurfaceRank";
        rep.error_detail = e.what();
    } catch (const ScreenConstructionError& e) {
        rep.exit_code = kExitPrecondition;
        rep.error_kind = "ScreenConstruction";
        rep.error_detail = e.what();
    } catch (const precondition_error& e) {
        rep.exit_code = kExitPrecondition;
        rep.error_kind = "Precondition";
        rep.error_detail = e.what();
    } catch (const DegenerateChartError& e) {
        rep.exit_code = kExitPrecondition;
        rep.error_kind = "DegenerateChart";
        rep.error_detail = e.what();
    } catch (const invariant_violation& e) {
        rep.exit_code = kExitPrecondition;
        rep.error_kind = "InvariantViolation";
        rep.error_detail = e.what();
    } catch (const domain_error& e) {
        rep.exit_code = kExitSchema;
        rep.error_kind = "SchemaError";
        rep.error_detail = e.what();
    }
    return finalize();
}

Manifest generate_random_instance(long p, long q, int dim, const std::vector<int>& signature,
                                  std::uint64_t seed) {
    SemiEuclideanSpace space(dim, signature); // throws domain_error when definite
    std::mt19937_64 rng(seed);

    int neg = -1, pos = -1;
    for (int i = 0; i < dim; ++i) {
        if (signature[i] < 0 && neg < 0) neg = i;
        if (signature[i] > 0 && pos < 0) pos = i;
    }

    // Random rational covector with a two-coordinate null completion:
    // eps_neg c_neg^2 + eps_pos c_pos^2 = -(rest).
    QVec c(dim, QuadNum{});
    Rational rest(0);
    for (int i = 0; i < dim; ++i) {
        if (i == neg || i == pos) continue;
        long num = long(rng() % 33) - 16;
        long den = long(rng() % 16) + 1;
        Rational r(num, den);
        c[i] = QuadNum(r);
        Rational sq = r * r;
        rest = signature[i] > 0 ? rest + sq : rest - sq;
    }
    Rational cpos = (Rational(1) - rest) / Rational(2);
    Rational cneg = (Rational(-1) - rest) / Rational(2);
    c[neg] = QuadNum(cneg);
    c[pos] = QuadNum(cpos);

    Manifest m;
    m.name = "random-" + std::to_string(seed);
    m.p = p;
    m.q = q;
    m.space = space;
    m.affine.emplace(c, QuadNum(0));
    m.exact_backend = true;
    m.seed = seed;
    m.samples = 1;

    QuadNum s = metallic_sigma(p, q);
    if (seed % 2 == 1) {
        QMatrix J(dim, dim);
        for (int i = 0; i < dim; ++i) J(i, i) = (rng() % 2) ? s : QuadNum(p) - s;
        m.structure.emplace(p, q, std::move(J), space);
    } else {
        // Signed-swap involution between two same-signature coordinates gives
        // a non-diagonal exact structure via Eq. (6).
        QMatrix F(dim, dim);
        std::vector<int> sign(dim);
        for (int i = 0; i < dim; ++i) sign[i] = (rng() % 2) ? 1 : -1;
        int a = -1, b = -1;
        for (int tries = 0; tries < 64 && b < 0; ++tries) {
            int i = int(rng() % (unsigned)dim), j = int(rng() % (unsigned)dim);
            if (i != j && signature[i] == signature[j]) { a = std::min(i, j); b = std::max(i, j); }
        }
        for (int i = 0; i < dim; ++i) {
            if (i == a || i == b) continue;
            F(i, i) = QuadNum(sign[i]);
        }
        if (b >= 0) {
            F(a, b) = QuadNum(1);
            F(b, a) = QuadNum(1);
        }
        m.structure.emplace(metallic_from_product(ProductStructure(F), p, q, +1, space));
    }
    return m;
}

} // namespace mlh
