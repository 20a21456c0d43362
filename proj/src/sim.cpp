#include "qqbf/sim.hpp"

#include <cmath>
#include <random>

#include "qqbf/policy.hpp"
#include "qqbf/prob.hpp"

namespace qqbf {

namespace {

// Output coin value implied by the (unnormalized) herald amplitude pair.
ExtComplex implied_coin(cplx amp0, cplx amp1) {
    if (std::abs(amp1) == 0.0) return ExtComplex::infinity();
    return amp0 / amp1;
}

SimulationResult branch_result(cplx amp0, cplx amp1,
                               const std::optional<MultiRationalFn>& fn,
                               const std::vector<int>& ns,
                               const std::vector<ExtComplex>& zs) {
    SimulationResult res;
    res.success_prob = std::norm(amp0) + std::norm(amp1);
    if (res.success_prob > 0.0) {
        const double n = std::sqrt(res.success_prob);
        res.output = {amp0 / n, amp1 / n};
        if (fn) {
            const auto [pv, qv] = boundary_eval(fn->P(), fn->Q(), ns, zs);
            StateVec out(2);
            out << res.output[0], res.output[1];
            res.fidelity = fidelity_to_coin(out, implied_coin(pv, qv));
        }
    }
    return res;
}

std::vector<ExtComplex> checked_point(const std::vector<ExtComplex>& zs,
                                      int k) {
    if (static_cast<int>(zs.size()) != k)
        throw InputError("dimension_mismatch",
                         "need one coin value per variable");
    return zs;
}

// Uniform double in [0,1) from the top 53 bits of the generator output —
// bit-reproducible for a given seed, independent of library internals.
double canonical_u01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

SampleResult sample_core(const Eigen::MatrixXcd& U, const std::vector<int>& ns,
                         int m, const std::vector<ExtComplex>& zs,
                         std::uint64_t shots, std::uint64_t seed,
                         int branch_count) {
    if (shots < 1) throw InputError("bad_argument", "shots must be >= 1");
    const StateVec psi = U * input_state(zs, ns, m);

    std::vector<double> cdf(static_cast<size_t>(psi.size()));
    double acc = 0.0;
    for (long i = 0; i < psi.size(); ++i) {
        acc += std::norm(psi[i]);
        cdf[static_cast<size_t>(i)] = acc;
    }

    SampleResult res;
    res.shots = shots;
    res.rng_seed = seed;
    res.branches.assign(static_cast<size_t>(branch_count), BranchCounts{});

    std::mt19937_64 gen(seed);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = canonical_u01(gen) * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const long idx =
            std::min<long>(it - cdf.begin(), psi.size() - 1);
        const long branch = idx >> 1;
        if (branch < branch_count) {
            auto& bc = res.branches[static_cast<size_t>(branch)];
            ++bc.herald;
            ++bc.output[static_cast<size_t>(idx & 1)];
        }
    }
    res.herald_successes = res.branches[0].herald;
    return res;
}

} // namespace

SimulationResult run(const Circuit& c, const std::vector<ExtComplex>& zs,
                     const std::optional<MultiRationalFn>& target) {
    const auto point = checked_point(zs, c.k);
    const StateVec psi = c.U * input_state(point, c.ns, c.m);
    const auto& fn = target ? target : c.fn;
    return branch_result(psi[0], psi[1], fn, c.ns, point);
}

std::array<SimulationResult, 2>
run_multifunctional(const MultiCircuit& c, const std::vector<ExtComplex>& zs) {
    const auto point = checked_point(zs, c.k);
    const StateVec psi = c.U * input_state(point, c.ns, c.m);
    return {branch_result(psi[0], psi[1], c.g0, c.ns, point),
            branch_result(psi[2], psi[3], c.g1, c.ns, point)};
}

SampleResult sample(const Circuit& c, const std::vector<ExtComplex>& zs,
                    std::uint64_t shots, std::uint64_t seed) {
    return sample_core(c.U, c.ns, c.m, checked_point(zs, c.k), shots, seed, 1);
}

SampleResult sample(const MultiCircuit& c, const std::vector<ExtComplex>& zs,
                    std::uint64_t shots, std::uint64_t seed) {
    return sample_core(c.U, c.ns, c.m, checked_point(zs, c.k), shots, seed, 2);
}

VerifyReport verify(const Circuit& c, const MultiRationalFn& f,
                    const std::vector<std::vector<ExtComplex>>& grid) {
    if (grid.empty())
        throw InputError("bad_argument", "verification grid is empty");
    const auto& policy = NumericPolicy::active();
    const bool exact_degree = c.k == 1 && c.ns == f.degrees();

    VerifyReport report;
    for (const auto& zs : grid) {
        const SimulationResult r = run(c, zs, f);
        if (r.success_prob > policy.prob_floor &&
            r.fidelity.value_or(0.0) < 1.0 - policy.fidelity_slack) {
            report.failures.push_back(VerifyFailure{
                zs, r.success_prob, r.fidelity.value_or(0.0), "fidelity"});
        }
        if (exact_degree && !(r.success_prob > 0.0)) {
            report.failures.push_back(VerifyFailure{
                zs, r.success_prob, 0.0, "zero_probability"});
        }
    }
    report.pass = report.failures.empty();
    return report;
}

} // namespace qqbf
