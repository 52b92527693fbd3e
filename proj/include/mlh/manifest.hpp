#pragma once

#include "mlh/hypersurface.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace mlh {

using ordered_json = nlohmann::ordered_json;

struct schema_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One run description: ambient space, metallic structure, hypersurface,
/// backend and sampling parameters, plus optional fixture metadata
/// (recorded claims and expected outcome).
struct Manifest {
    std::string name;
    long p = 1, q = 1;
    SemiEuclideanSpace space;

    std::optional<MetallicStructure> structure;
    std::optional<AffineHypersurface> affine;
    std::optional<ChartHypersurface> chart;

    std::vector<QVec> screen_override;
    std::optional<Polynomial> frame_scale;
    std::vector<std::vector<double>> points; // explicit chart sample points

    std::vector<std::string> identities; // empty or {"all"}: applicable set
    int samples = 100;
    std::uint64_t seed = 1;
    double tolerance = kDefaultTolerance;
    bool exact_backend = true;

    ordered_json paper_claims;  // optional fixture claims
    bool discrepancy_fatal = true;
    std::string expected_outcome; // fixture annotation: pass | error:<kind> | discrepancy

    bool has_hypersurface() const { return affine.has_value() || chart.has_value(); }
};

/// QuadNum <-> JSON. Accepted forms: integer, [num, den] (numbers or decimal
/// strings), {"a":[n,d],"b":[n,d]} with the discriminant implied by (p,q),
/// and the symbols "sigma" / "p-sigma" with optional sign. Emission uses the
/// {"a":..,"b":..} form; components that exceed 64 bits become decimal
/// strings, so round-trips are bit-exact at any size.
QuadNum quadnum_from_json(const ordered_json& v, long p, long q);
ordered_json quadnum_to_json(const QuadNum& x);

Manifest parse_manifest(const ordered_json& j);
Manifest load_manifest_file(const std::string& path);
ordered_json manifest_to_json(const Manifest& m);

} // namespace mlh
