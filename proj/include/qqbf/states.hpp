#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "qqbf/types.hpp"

namespace qqbf {

using StateVec = Eigen::VectorXcd;

/// Maximum total qubit count for dense statevectors (dimension 2^24).
inline constexpr int kMaxQubits = 24;

/// Amplitudes (on |0>, on |1>) of the coin state (z|0> + |1>)/sqrt(1+|z|^2);
/// z = infinity gives the limit (1, 0).
std::array<cplx, 2> coin_amplitudes(const ExtComplex& z);

/// |s_j^n>: equal superposition of the C(n,j) n-qubit bitstrings containing
/// exactly j zeros. n = 0 returns the scalar [1].
StateVec symmetric_basis_vector(int n, int j);

/// Tensor product of per-variable coin blocks and |0> ancillas:
/// |0>^(x)m  (x)  |z_k>^(x)n_k  (x) ... (x)  |z_1>^(x)n_1,
/// with variable 1's coins on the least significant bits and the ancillas on
/// the most significant bits. Unit norm. A variable with n_i = 0 contributes
/// no coins (constant functions carry their output on an ancilla).
StateVec input_state(const std::vector<ExtComplex>& zs,
                     const std::vector<int>& ns, int m);

/// Product basis vector |0 ancillas> (x) |s_{J_k}^{n_k}> (x) ... (x) |s_{J_1}^{n_1}>.
StateVec symmetric_product_vector(const std::vector<int>& ns, int m,
                                  const std::vector<int>& J);

/// |<z|psi>|^2 for a normalized single-qubit state (amps on |0>, |1>).
double fidelity_to_coin(const StateVec& v, const ExtComplex& z);

/// Kronecker product with `a` on the high bits, `b` on the low bits.
StateVec kron(const StateVec& a, const StateVec& b);

/// n choose j as a double (n <= 24 here, exact in double precision).
double binomial(int n, int j);

} // namespace qqbf
