#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qqbf/multifunc.hpp"
#include "qqbf/synth.hpp"

namespace qqbf {

/// Exact post-selected execution at one point.
struct SimulationResult {
    double success_prob = 0.0;
    /// Normalized output-qubit amplitudes (on |0>, |1>); meaningful only
    /// when success_prob > 0.
    std::array<cplx, 2> output{cplx{0, 0}, cplx{0, 0}};
    /// |<f(z)|output>|^2; present only when the target function was known.
    std::optional<double> fidelity;
};

/// Apply the circuit to the coin input and post-select the all-zero herald
/// (amplitudes at basis indices 0 and 1). Fidelity is reported against the
/// circuit's own function when it carries one, or `target` when given.
SimulationResult run(const Circuit& c, const std::vector<ExtComplex>& zs,
                     const std::optional<MultiRationalFn>& target = std::nullopt);

/// Two-branch execution of a multifunctional circuit: branch 0 heralds on
/// indices {0,1} (qubit 2 reads 0) and implements g0; branch 1 heralds on
/// indices {2,3} (qubit 2 reads 1) and implements g1.
std::array<SimulationResult, 2>
run_multifunctional(const MultiCircuit& c, const std::vector<ExtComplex>& zs);

/// Seeded full-register measurement statistics.
struct BranchCounts {
    std::uint64_t herald = 0;      // shots landing in this branch's herald
    std::array<std::uint64_t, 2> output{0, 0}; // split by the output qubit
};
struct SampleResult {
    std::uint64_t shots = 0;
    std::uint64_t herald_successes = 0; // all-zero herald (branch 0)
    std::vector<BranchCounts> branches; // one entry, or two if multifunctional
    std::uint64_t rng_seed = 0;
};

SampleResult sample(const Circuit& c, const std::vector<ExtComplex>& zs,
                    std::uint64_t shots, std::uint64_t seed);
SampleResult sample(const MultiCircuit& c, const std::vector<ExtComplex>& zs,
                    std::uint64_t shots, std::uint64_t seed);

/// One offending grid point from verify().
struct VerifyFailure {
    std::vector<ExtComplex> zs;
    double success_prob = 0.0;
    double fidelity = 0.0;
    std::string reason; // "fidelity" or "zero_probability"
};
struct VerifyReport {
    bool pass = true;
    std::vector<VerifyFailure> failures;
};

/// Check the circuit against its target over a grid: wherever the herald
/// probability clears the policy floor, the output must match |f(z)> to
/// within the policy fidelity slack. For a univariate circuit running at
/// exactly the function's degree, the herald probability must additionally
/// be strictly positive at every grid point, infinity included.
VerifyReport verify(const Circuit& c, const MultiRationalFn& f,
                    const std::vector<std::vector<ExtComplex>>& grid);

} // namespace qqbf
