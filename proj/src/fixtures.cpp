#include "mlh/runner.hpp"

namespace mlh {

namespace {

Manifest fx(const char* text) { return parse_manifest(ordered_json::parse(text)); }

std::vector<Fixture> build_fixtures() {
    std::vector<Fixture> out;

    // Structure-only check of the 7-dimensional diagonal tensor.
    out.push_back({"ex-1-structure", fx(R"json({
        "name": "ex-1-structure",
        "metallic": {"p": 1, "q": 1},
        "ambient": {"dim": 7, "signature": [-1, 1, -1, 1, -1, 1, 1]},
        "structure": {"type": "diagonal",
                      "entries": ["p-sigma", "sigma", "p-sigma", "sigma", "p-sigma", "sigma", "sigma"]},
        "backend": "exact",
        "paper_claims": {"structure_ok": true},
        "expected_outcome": "pass"
    })json")});

    // The hyperplane x1 = sigma x5 with J = sigma I. Its quoted radical is not
    // g-orthogonal to the tangent space; the induced metric is non-degenerate,
    // so the run must fail the lightlike precondition and report the defect.
    out.push_back({"ex-2-hyperplane", fx(R"json({
        "name": "ex-2-hyperplane",
        "metallic": {"p": 1, "q": 1},
        "ambient": {"dim": 5, "signature": [-1, 1, -1, 1, 1]},
        "structure": {"type": "diagonal",
                      "entries": ["sigma", "sigma", "sigma", "sigma", "sigma"]},
        "hypersurface": {"type": "affine", "c": [1, 0, 0, 0, "-sigma"], "offset": 0},
        "backend": "exact",
        "paper_claims": {"lightlike": true,
                         "E": [0, "sigma", "sigma", 0, 0],
                         "classification": "Invariant"},
        "discrepancy_fatal": false,
        "expected_outcome": "error:NotLightlike"
    })json")});

    // Screen semi-invariant example 1 with the diagonal that actually
    // reproduces the quoted frame products.
    out.push_back({"ssi-example-1", fx(R"json({
        "name": "ssi-example-1",
        "metallic": {"p": 1, "q": 1},
        "ambient": {"dim": 5, "signature": [-1, 1, -1, 1, 1]},
        "structure": {"type": "diagonal",
                      "entries": ["p-sigma", "p-sigma", "sigma", "sigma", "sigma"]},
        "hypersurface": {"type": "affine",
                         "c": ["sigma", "sigma", 1, 0, -1], "offset": 0},
        "backend": "exact",
        "paper_claims": {"lightlike": true,
                         "E": ["sigma", "-sigma", 1, 0, 1],
                         "N": ["-sigma", "sigma", -1, 0, 1],
                         "JE": [-1, 1, "sigma", 0, "sigma"],
                         "JN": [1, -1, "-sigma", 0, "sigma"],
                         "classification": "ScreenSemiInvariant"},
        "expected_outcome": "pass"
    })json")});

    // The second screen semi-invariant example: with J = sigma I the radical
    // maps into itself, so the structure claims cannot hold. Kept as a
    // documented-discrepancy fixture.
    out.push_back({"ssi-example-2", fx(R"json({
        "name": "ssi-example-2",
        "metallic": {"p": 1, "q": 1},
        "ambient": {"dim": 5, "signature": [-1, 1, -1, 1, 1]},
        "structure": {"type": "diagonal",
                      "entries": ["sigma", "sigma", "sigma", "sigma", "sigma"]},
        "hypersurface": {"type": "affine",
                         "c": [1, 0, "sigma", "sigma", -1], "offset": 0},
        "backend": "exact",
        "paper_claims": {"lightlike": true,
                         "E": [1, 0, "sigma", "-sigma", 1],
                         "N": [-1, 0, -1, 1, 1],
                         "JE": ["sigma", {"a": [3, 2], "b": [1, 2]}, 0,
                                {"a": [-3, 2], "b": [-1, 2]}, "sigma"],
                         "JN": ["-sigma", 0, "-sigma", "sigma", "sigma"],
                         "classification": "ScreenSemiInvariant"},
        "discrepancy_fatal": false,
        "expected_outcome": "discrepancy"
    })json")});

    // Corrected invariant fixture: a genuinely lightlike hyperplane whose
    // radical is preserved by J = sigma I.
    out.push_back({"invariant-hyperplane", fx(R"json({
        "name": "invariant-hyperplane",
        "metallic": {"p": 1, "q": 1},
        "ambient": {"dim": 5, "signature": [-1, 1, -1, 1, 1]},
        "structure": {"type": "diagonal",
                      "entries": ["sigma", "sigma", "sigma", "sigma", "sigma"]},
        "hypersurface": {"type": "affine", "c": [1, -1, 0, 0, 0], "offset": 0},
        "backend": "exact",
        "paper_claims": {"lightlike": true,
                         "E": [1, 1, 0, 0, 0],
                         "JE": ["sigma", "sigma", 0, 0, 0],
                         "classification": "Invariant"},
        "expected_outcome": "pass"
    })json")});

    // Curved fixture: polynomial light cone chart in R^4_1 with a mixed
    // diagonal structure; exercises the lemma suites with nonzero B.
    out.push_back({"light-cone", fx(R"json({
        "name": "light-cone",
        "metallic": {"p": 1, "q": 1},
        "ambient": {"dim": 4, "signature": [-1, 1, 1, 1]},
        "structure": {"type": "diagonal",
                      "entries": ["sigma", "p-sigma", "p-sigma", "sigma"]},
        "hypersurface": {"type": "chart",
                         "components": ["u1*(1 + u2^2 + u3^2)",
                                        "u1*(u2^2 + u3^2 - 1)",
                                        "2*u1*u2",
                                        "2*u1*u3"],
                         "domain": [[0.5, 2.0], [-1.0, 1.0], [-1.0, 1.0]]},
        "backend": "float",
        "samples": 120,
        "seed": 7,
        "tolerance": 1e-8,
        "paper_claims": {"classification": "Generic"},
        "expected_outcome": "pass"
    })json")});

    return out;
}

} // namespace

const std::vector<Fixture>& fixtures() {
    static const std::vector<Fixture> fx_list = build_fixtures();
    return fx_list;
}

} // namespace mlh
