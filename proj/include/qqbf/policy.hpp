#pragma once

#include <string>

namespace qqbf {

/// Every tunable tolerance in one record. The defaults are the documented
/// contract; tests and the CLI may override individual knobs (CLI: --tol-*
/// flags or a JSON policy file named by the QQBF_NUM_POLICY env var).
struct NumericPolicy {
    /// Relative threshold under which the cross term c and the x/y
    /// degeneracy are snapped to exact zero inside the scalar solve.
    double scalar_snap = 1e-12;

    /// Minimum residual norm for accepting a Gram-Schmidt direction when
    /// completing a unitary or picking auxiliary directions.
    double completion_residual = 1e-10;

    /// Frobenius tolerance for unitarity / orthonormality checks.
    double orthonormal = 1e-10;

    /// Normalized Sylvester-resultant magnitude below which two polynomials
    /// are declared non-coprime.
    double resultant = 1e-9;

    /// |s1|, |s2| threshold for the direct compatibility test.
    double compat = 1e-9;

    /// Epsilon ladder for the degenerate compatibility path: `count` rungs
    /// starting at `first`, each a decade smaller.
    double compat_eps_first = 1e-2;
    int compat_eps_count = 5;
    /// A limit sequence counts as "goes to zero" when it is nonincreasing
    /// and its endpoint is below this fraction of its start.
    double compat_endpoint_ratio = 1e-4;

    /// Herald probability below which output fidelity is numerically
    /// meaningless and verification skips the fidelity check.
    double prob_floor = 1e-8;

    /// Verification demands fidelity >= 1 - fidelity_slack.
    double fidelity_slack = 1e-9;

    /// Process-wide active policy (the CLI and tests mutate it up front;
    /// library code only reads it).
    static NumericPolicy& active();
};

/// Overwrite fields of `p` from a JSON object {"scalar_snap": ..., ...}.
/// Unknown keys are rejected. Throws InputError on malformed input.
void load_policy_json(NumericPolicy& p, const std::string& json_text);

} // namespace qqbf
