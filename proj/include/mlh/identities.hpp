#pragma once

#include "mlh/geometry.hpp"

#include <string>

namespace mlh {

struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Applicability { Any, Invariant, SSI };

struct IdentityDef {
    const char* id;
    Applicability ap;
    bool informational;  // reported but never gates the run
    bool equivalence;    // two-sided theorem checked at sample resolution
    const char* description;
};

const std::vector<IdentityDef>& identity_registry();
int identity_index(const std::string& id); // -1 when unknown

/// Raw per-sample outcome for one identity.
struct SampleEntry {
    bool used = false;
    double res = 0.0;           // max residual magnitude at this sample
    bool exact_nonzero = false; // exact backend: residual not literally zero
    double lhs = 0.0, rhs = 0.0; // equivalence sides / auxiliary values
    double aux = 0.0;            // extra payload (per-identity meaning)
};

struct SampleOutcomes {
    std::vector<SampleEntry> entries; // indexed like identity_registry()
};

/// Evaluate the selected identities at one geometry sample.
template <class S>
SampleOutcomes evaluate_identities(const GeomPoint<S>& G, const std::vector<int>& selected,
                                   double tol);

struct IdentityResult {
    std::string id;
    long samples = 0;
    double max_residual = 0.0;
    bool exact_nonzero = false;
    bool pass = false;
    bool informational = false;
    std::string backend;
    std::string note;
};

std::vector<IdentityResult> aggregate_identities(const std::vector<SampleOutcomes>& samples,
                                                 const std::vector<int>& selected, double tol,
                                                 bool exact_backend);

/// Identity ids applicable to a classification kind.
std::vector<int> applicable_identities(Kind kind, bool has_structure);

/// Least-squares fit of C = factor * B through the origin. `trivial` when the
/// B values are all below tolerance (factor undetermined).
struct ConformalFit {
    bool trivial = false;
    double factor = 0.0;
    double residual = 0.0;
};
ConformalFit fit_conformal_factor(const std::vector<std::pair<double, double>>& bc_pairs,
                                  double tol);

} // namespace mlh
