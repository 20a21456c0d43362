#pragma once

#include <array>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "qqbf/poly.hpp"
#include "qqbf/synth.hpp"

namespace qqbf {

/// Outcome of the compatibility test of g1 with g0: can a single circuit
/// herald g0 at its dedicated-circuit probability and g1 on the alternate
/// outcome? Decided by the two cross sums
///   s_i = sum_J (conj(p_J)/x - conj(q_J)/y) {r,s}_J / prod C,
/// evaluated directly when x and y are both nonzero, and through an
/// epsilon-limit ladder when the scalars are degenerate.
struct CompatibilityReport {
    bool compatible = false;
    cplx s1{0.0, 0.0};
    cplx s2{0.0, 0.0};
    /// (epsilon, s1(eps), s2(eps)) rows when the limit path was taken;
    /// empty when the direct test applied.
    std::vector<std::tuple<double, cplx, cplx>> epsilon_trace;
};

CompatibilityReport compatibility(const MultiRationalFn& g0,
                                  const MultiRationalFn& g1,
                                  const std::vector<int>& ns);
CompatibilityReport compatibility(const RationalFn& g0, const RationalFn& g1,
                                  int n);

/// Scalars of the second pair of heralded rows in the priority construction.
struct PriorityScalars {
    cplx a1{0, 0};
    double a2 = 0.0;
    cplx a3{0, 0};
    cplx a4{0, 0};
    double H = 0.0; // a5 is fixed to 0
};

/// A two-function heralded circuit. Rows 0..3 of U are <v0|..<v3|; qubit 2
/// reading 0 (with all higher qubits 0) heralds g0 on the output qubit,
/// qubit 2 reading 1 heralds g1.
struct MultiCircuit {
    int k = 1;
    std::vector<int> ns;
    int m = 0;
    Eigen::MatrixXcd U;
    std::array<StateVec, 4> rows;
    std::optional<PriorityScalars> scalars; // present for the priority build
    double dilation_r = 0.0;                // nonzero for the dilation build
    std::optional<MultiRationalFn> g0, g1;  // kept for in-process runs
};

/// Priority construction: g0 keeps its dedicated-circuit success
/// probability; g1 rides on the alternate herald. Requires compatibility;
/// throws InfeasibleError("incompatible") otherwise.
MultiCircuit synthesize_priority(const MultiRationalFn& g0,
                                 const MultiRationalFn& g1,
                                 const std::vector<int>& ns);
MultiCircuit synthesize_priority(const RationalFn& g0, const RationalFn& g1,
                                 int n);

/// Unitary dilation of a contraction A (N x M, spectral norm <= 1):
///   [[ A,              sqrt(I - A A+) ],
///    [ sqrt(I - A+ A), -A+            ]]
/// Hermitian square roots via eigendecomposition; eigenvalues below -1e-12
/// are an error, tiny negatives are clamped to zero.
Eigen::MatrixXcd dilation_unitary(const Eigen::MatrixXcd& A);

/// General two-function construction through the dilation of the stacked,
/// binomially weighted coefficient rows (scaled by 1/(r ||M||_2), r >= 1).
/// Works for any pair, compatible or not, at the cost of success
/// probability.
MultiCircuit synthesize_dilation(const MultiRationalFn& g0,
                                 const MultiRationalFn& g1,
                                 const std::vector<int>& ns, double r = 1.0);
MultiCircuit synthesize_dilation(const RationalFn& g0, const RationalFn& g1,
                                 int n, double r = 1.0);

} // namespace qqbf
