#include "mlh/manifest.hpp"

#include <fstream>

namespace mlh {

namespace {

mpz_class mpz_from_json(const ordered_json& v) {
    if (v.is_number_integer()) return mpz_class((long)v.get<std::int64_t>());
    if (v.is_string()) return mpz_class(v.get<std::string>());
    throw schema_error("expected integer or decimal string, got " + v.dump());
}

Rational rational_from_json(const ordered_json& v) {
    if (v.is_number_integer()) return Rational((long)v.get<std::int64_t>());
    if (v.is_array()) {
        if (v.size() != 2) throw schema_error("rational must be [num, den]");
        return Rational(mpz_from_json(v[0]), mpz_from_json(v[1]));
    }
    throw schema_error("expected rational, got " + v.dump());
}

ordered_json mpz_to_json(const mpz_class& z) {
    if (z.fits_slong_p()) return ordered_json(z.get_si());
    return ordered_json(z.get_str());
}

} // namespace

QuadNum quadnum_from_json(const ordered_json& v, long p, long q) {
    const std::int64_t D = p * p + 4 * q;
    if (v.is_number_integer()) return QuadNum(Rational((long)v.get<std::int64_t>()));
    if (v.is_array()) return QuadNum(rational_from_json(v));
    if (v.is_object()) {
        if (!v.contains("a") || !v.contains("b"))
            throw schema_error("quadratic number object needs fields a and b");
        return QuadNum(rational_from_json(v.at("a")), rational_from_json(v.at("b")), D);
    }
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        bool neg = false;
        if (!s.empty() && s[0] == '-') { neg = true; s = s.substr(1); }
        QuadNum r;
        if (s == "sigma") r = metallic_sigma(p, q);
        else if (s == "p-sigma") r = QuadNum(Rational(p)) - metallic_sigma(p, q);
        else {
            auto slash = s.find('/');
            try {
                if (slash == std::string::npos) r = QuadNum(Rational(mpz_class(s)));
                else r = QuadNum(Rational(mpz_class(s.substr(0, slash)),
                                          mpz_class(s.substr(slash + 1))));
            } catch (const std::exception&) {
                throw schema_error("unrecognized scalar literal '" + v.get<std::string>() + "'");
            }
        }
        return neg ? -r : r;
    }
    throw schema_error("cannot parse scalar from " + v.dump());
}

ordered_json quadnum_to_json(const QuadNum& x) {
    ordered_json j;
    j["a"] = ordered_json::array({mpz_to_json(x.a().num()), mpz_to_json(x.a().den())});
    j["b"] = ordered_json::array({mpz_to_json(x.b().num()), mpz_to_json(x.b().den())});
    return j;
}

namespace {

QVec qvec_from_json(const ordered_json& v, long p, long q) {
    if (!v.is_array()) throw schema_error("expected an array of scalars");
    QVec r;
    for (const auto& e : v) r.push_back(quadnum_from_json(e, p, q));
    return r;
}

QMatrix qmatrix_from_json(const ordered_json& rows, long p, long q) {
    if (!rows.is_array() || rows.empty()) throw schema_error("matrix rows must be a nonempty array");
    const int n = (int)rows.size();
    QMatrix m(n, (int)rows[0].size());
    for (int i = 0; i < n; ++i) {
        if ((int)rows[i].size() != m.cols()) throw schema_error("ragged matrix rows");
        for (int j = 0; j < m.cols(); ++j) m(i, j) = quadnum_from_json(rows[i][j], p, q);
    }
    return m;
}

MetallicStructure structure_from_json(const ordered_json& j, long p, long q,
                                      const SemiEuclideanSpace& space) {
    std::string type = j.value("type", "diagonal");
    if (type == "diagonal") {
        if (!j.contains("entries")) throw schema_error("diagonal structure needs 'entries'");
        QVec d = qvec_from_json(j.at("entries"), p, q);
        if ((int)d.size() != space.dim) throw schema_error("diagonal entries length mismatch");
        QMatrix m(space.dim, space.dim);
        for (int i = 0; i < space.dim; ++i) m(i, i) = d[i];
        return MetallicStructure(p, q, std::move(m), space);
    }
    if (type == "matrix") {
        if (!j.contains("rows")) throw schema_error("matrix structure needs 'rows'");
        return MetallicStructure(p, q, qmatrix_from_json(j.at("rows"), p, q), space);
    }
    if (type == "from_product") {
        if (!j.contains("F")) throw schema_error("from_product structure needs 'F'");
        ProductStructure f(qmatrix_from_json(j.at("F").at("rows"), p, q));
        int branch = j.value("branch", "+") == "-" ? -1 : +1;
        return metallic_from_product(f, p, q, branch, space);
    }
    throw schema_error("unknown structure type '" + type + "'");
}

} // namespace

Manifest parse_manifest(const ordered_json& j) {
    if (!j.is_object()) throw schema_error("manifest must be a JSON object");
    Manifest m;
    m.name = j.value("name", "");

    if (!j.contains("metallic") || !j.at("metallic").is_object())
        throw schema_error("manifest needs a 'metallic' object with p and q");
    m.p = j.at("metallic").value("p", 0);
    m.q = j.at("metallic").value("q", 0);
    if (m.p < 1 || m.q < 1) throw schema_error("metallic p and q must be positive integers");

    if (!j.contains("ambient") || !j.at("ambient").is_object())
        throw schema_error("manifest needs an 'ambient' object");
    const auto& amb = j.at("ambient");
    int dim = amb.value("dim", 0);
    if (!amb.contains("signature")) throw schema_error("ambient needs a signature");
    std::vector<int> sig = amb.at("signature").get<std::vector<int>>();
    try {
        m.space = SemiEuclideanSpace(dim, sig);
    } catch (const domain_error& e) {
        throw schema_error(std::string("invalid ambient space: ") + e.what());
    }

    std::string backend = j.value("backend", "");

    if (j.contains("structure"))
        m.structure.emplace(structure_from_json(j.at("structure"), m.p, m.q, m.space));

    double sigma_d = metallic_sigma(m.p, m.q).to_double();

    if (j.contains("hypersurface")) {
        const auto& h = j.at("hypersurface");
        std::string type = h.value("type", "");
        if (type == "affine") {
            if (!h.contains("c")) throw schema_error("affine hypersurface needs covector 'c'");
            QVec c = qvec_from_json(h.at("c"), m.p, m.q);
            if ((int)c.size() != m.space.dim) throw schema_error("covector length mismatch");
            QuadNum off = h.contains("offset") ? quadnum_from_json(h.at("offset"), m.p, m.q)
                                               : QuadNum(0);
            try {
                m.affine.emplace(std::move(c), std::move(off));
            } catch (const domain_error& e) {
                throw schema_error(e.what());
            }
            if (backend.empty()) backend = "exact";
        } else if (type == "chart") {
            if (!h.contains("components") || !h.contains("domain"))
                throw schema_error("chart hypersurface needs 'components' and 'domain'");
            std::vector<std::pair<double, double>> dom;
            for (const auto& d : h.at("domain")) {
                if (!d.is_array() || d.size() != 2) throw schema_error("domain entries are [lo,hi]");
                dom.emplace_back(d[0].get<double>(), d[1].get<double>());
            }
            std::vector<Polynomial> comp;
            for (const auto& c : h.at("components")) {
                try {
                    comp.push_back(parse_polynomial(c.get<std::string>(), (int)dom.size(), sigma_d));
                } catch (const domain_error& e) {
                    throw schema_error(e.what());
                }
            }
            if ((int)comp.size() != m.space.dim)
                throw schema_error("chart needs one component per ambient dimension");
            try {
                m.chart.emplace(std::move(comp), std::move(dom));
            } catch (const domain_error& e) {
                throw schema_error(e.what());
            }
            if (backend.empty()) backend = "float";
        } else {
            throw schema_error("hypersurface type must be 'affine' or 'chart'");
        }
    }

    if (backend.empty()) backend = "exact";
    if (backend != "exact" && backend != "float")
        throw schema_error("backend must be 'exact' or 'float'");
    m.exact_backend = backend == "exact";
    if (m.exact_backend && m.chart)
        throw schema_error("exact backend requires an affine hypersurface");

    if (j.contains("screen_override")) {
        if (!m.exact_backend)
            throw schema_error("screen_override requires the exact backend");
        for (const auto& row : j.at("screen_override"))
            m.screen_override.push_back(qvec_from_json(row, m.p, m.q));
    }

    if (j.contains("frame_scale")) {
        if (m.exact_backend) throw schema_error("frame_scale requires the float backend");
        int nvars = m.chart ? m.chart->n : m.space.dim - 1;
        try {
            m.frame_scale = parse_polynomial(j.at("frame_scale").get<std::string>(), nvars,
                                             sigma_d);
        } catch (const domain_error& e) {
            throw schema_error(e.what());
        }
    }

    if (j.contains("points")) {
        for (const auto& pt : j.at("points"))
            m.points.push_back(pt.get<std::vector<double>>());
    }

    if (j.contains("identities")) {
        if (j.at("identities").is_string())
            m.identities = {j.at("identities").get<std::string>()};
        else
            m.identities = j.at("identities").get<std::vector<std::string>>();
    }

    m.samples = j.value("samples", 100);
    if (m.samples < 1) throw schema_error("samples must be positive");
    m.seed = j.value("seed", (std::uint64_t)1);
    m.tolerance = j.value("tolerance", kDefaultTolerance);
    if (!(m.tolerance > 0)) throw schema_error("tolerance must be positive");

    if (j.contains("paper_claims")) m.paper_claims = j.at("paper_claims");
    m.discrepancy_fatal = j.value("discrepancy_fatal", true);
    m.expected_outcome = j.value("expected_outcome", "");
    return m;
}

Manifest load_manifest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw schema_error("cannot open manifest file '" + path + "'");
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw schema_error(std::string("manifest is not valid JSON: ") + e.what());
    }
    return parse_manifest(j);
}

ordered_json manifest_to_json(const Manifest& m) {
    ordered_json j;
    if (!m.name.empty()) j["name"] = m.name;
    j["metallic"] = {{"p", m.p}, {"q", m.q}};
    j["ambient"] = {{"dim", m.space.dim}, {"signature", m.space.signature}};
    if (m.structure) {
        ordered_json rows = ordered_json::array();
        for (int i = 0; i < m.space.dim; ++i) {
            ordered_json row = ordered_json::array();
            for (int k = 0; k < m.space.dim; ++k) row.push_back(quadnum_to_json(m.structure->J(i, k)));
            rows.push_back(row);
        }
        j["structure"] = {{"type", "matrix"}, {"rows", rows}};
    }
    if (m.affine) {
        ordered_json c = ordered_json::array();
        for (const auto& x : m.affine->c) c.push_back(quadnum_to_json(x));
        j["hypersurface"] = {{"type", "affine"}, {"c", c},
                             {"offset", quadnum_to_json(m.affine->offset)}};
    } else if (m.chart) {
        ordered_json comp = ordered_json::array();
        for (const auto& p : m.chart->comp) comp.push_back(p.str());
        ordered_json dom = ordered_json::array();
        for (auto [lo, hi] : m.chart->domain) dom.push_back(ordered_json::array({lo, hi}));
        j["hypersurface"] = {{"type", "chart"}, {"components", comp}, {"domain", dom}};
    }
    if (!m.screen_override.empty()) {
        ordered_json rows = ordered_json::array();
        for (const auto& w : m.screen_override) {
            ordered_json row = ordered_json::array();
            for (const auto& x : w) row.push_back(quadnum_to_json(x));
            rows.push_back(row);
        }
        j["screen_override"] = rows;
    }
    if (!m.identities.empty()) j["identities"] = m.identities;
    j["samples"] = m.samples;
    j["seed"] = m.seed;
    j["tolerance"] = m.tolerance;
    j["backend"] = m.exact_backend ? "exact" : "float";
    if (!m.paper_claims.is_null()) j["paper_claims"] = m.paper_claims;
    if (!m.discrepancy_fatal) j["discrepancy_fatal"] = false;
    if (!m.expected_outcome.empty()) j["expected_outcome"] = m.expected_outcome;
    return j;
}

} // namespace mlh
