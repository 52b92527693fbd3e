#pragma once

#include "mlh/identities.hpp"
#include "mlh/manifest.hpp"

namespace mlh {

// Exit code contract: 0 all pass, 2 identity/claim failure, 3 precondition
// or classification failure, 4 schema error.
enum ExitCode : int {
    kExitOk = 0,
    kExitIdentityFailure = 2,
    kExitPrecondition = 3,
    kExitSchema = 4,
};

struct RunOptions {
    std::vector<std::string> identities; // overrides the manifest when nonempty
    int samples = -1;                    // override when positive
    double tolerance = -1.0;             // override when positive
    std::optional<std::uint64_t> seed;
    bool parallel = true;
    DerivEngine engine = DerivEngine::Dual;
    std::string dump_path;     // sampled-geometry dump (empty: off)
    bool structure_only = false;
    bool classify_only = false;
};

struct Discrepancy {
    std::string tag;
    std::string paper_claim;
    std::string computed;
};

struct RunReport {
    std::string name;
    std::string backend;
    int exit_code = kExitOk;
    std::string error_kind;   // NotLightlike | NotHypersurfaceRank | ScreenConstruction | ...
    std::string error_detail;

    bool has_structure_checks = false;
    StructureReport structure;

    std::string classification;
    ordered_json frame;
    ordered_json flags; // totally_geodesic, mixed_geodesic, ...

    std::vector<IdentityResult> identities;
    std::vector<Discrepancy> discrepancies;

    long samples_evaluated = 0;
    long samples_skipped = 0;
    double timing_ms = 0.0;

    bool all_identities_pass() const {
        for (const auto& r : identities)
            if (!r.informational && !r.pass) return false;
        return true;
    }
};

ordered_json report_to_json(const RunReport& rep, bool include_timing = true);

RunReport run(const Manifest& manifest, const RunOptions& opts = {});

/// Seeded random lightlike-instance generator: a rational null covector by
/// two-coordinate completion plus a random exact metallic structure
/// (diagonal, or from a signed-swap involution on even seeds).
Manifest generate_random_instance(long p, long q, int dim, const std::vector<int>& signature,
                                  std::uint64_t seed);

struct Fixture {
    std::string name;
    Manifest manifest;
};

/// Built-in worked-example instances plus corrected/constructed companions.
const std::vector<Fixture>& fixtures();

} // namespace mlh
