#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qqbf/poly.hpp"
#include "qqbf/states.hpp"
#include "qqbf/types.hpp"

namespace qqbf {

/// Scalar solution of the orthonormality system for the two heralded rows:
///   x^2 + b = y*conj(y) + a = 1/K^2,   x*y = -c,
/// with l the discriminant sqrt((w^2+a-b)^2 + 4|c|^2).
struct SynthScalars {
    double a = 0.0;
    double b = 0.0;
    cplx c{0.0, 0.0};
    double l = 0.0;
    double x = 0.0;
    cplx y{0.0, 0.0};
    double K = 0.0;
    double w = 0.0;
};

/// Every multi-index (j_1..j_k) with 0 <= j_i <= ns[i], in lexicographic
/// order (last variable fastest).
std::vector<std::vector<int>> all_multi_indices(const std::vector<int>& ns);

/// Product of per-variable binomials C(ns[i], J[i]).
double binomial_product(const std::vector<int>& ns, const std::vector<int>& J);

/// The quadratic-form scalars of the construction:
///   a = sum |q_J|^2 / prod C,  b = sum |p_J|^2 / prod C,
///   c = sum p_J conj(q_J) / prod C.
/// Requires ns[i] >= deg_i for both polynomials.
struct AbcResult {
    double a, b;
    cplx c;
};
AbcResult abc(const MultiPoly& P, const MultiPoly& Q,
              const std::vector<int>& ns);

/// Solve for (l, x, y, K) given (a, b, c, w). x is real >= 0; the larger of
/// the two quadratic roots is computed directly and the smaller through the
/// product identity x|y| = |c|, so neither suffers cancellation. When c and
/// the gap w^2+a-b are both negligible (relative to the scale of a, b) the
/// solution snaps to x = y = 0 exactly. phase convention: y = -c/|c| * |y|,
/// taken as +1 when c = 0.
SynthScalars solve_xyk(double a, double b, cplx c, double w = 0.0);

/// An ancillary qubit is required exactly when the coin space has no room
/// for an extra direction (2^sum(ns) == prod(ns[i]+1), i.e. all ns[i] = 1)
/// and the solve actually needs one (x, y not both zero).
bool needs_ancilla(const std::vector<int>& ns, const SynthScalars& s);

/// `count` deterministic orthonormal directions, each orthogonal to the
/// whole symmetric-product span (and to the previous picks). With m >= 1 the
/// first direction is the basis state with the lowest ancilla bit set;
/// the rest come from Gram-Schmidt residuals of the computational basis
/// scanned in ascending index order. Throws InfeasibleError("capacity")
/// when the complement is exhausted.
std::vector<StateVec> theta_directions(const std::vector<int>& ns, int m,
                                       int count);

/// First auxiliary direction (theta_directions(ns, m, 1)[0]).
StateVec theta0(const std::vector<int>& ns, int m);

/// The two heralded rows:
///   v0 = sum K conj(p_J)/sqrt(prod C) |s_J> + K x |theta0>
///   v1 = sum K conj(q_J)/sqrt(prod C) |s_J> + K y |theta0>
/// (theta0 only enters when x or y is nonzero).
std::pair<StateVec, StateVec> build_v0_v1(const MultiPoly& P,
                                          const MultiPoly& Q,
                                          const std::vector<int>& ns, int m,
                                          const SynthScalars& s);

/// Complete pairwise-orthonormal rows to a full unitary by a chain of
/// Householder reflections (one per given row, pivot on the diagonal,
/// reflector sign -pivot/|pivot|, -1 on a vanishing pivot). Rows of the
/// result are the conjugates of the input vectors followed by the induced
/// completion. Throws InputError on non-orthonormal input.
Eigen::MatrixXcd complete_unitary(const std::vector<StateVec>& rows);

/// Alternative completion: scan computational basis kets in lexicographic
/// bitstring order (bit 0 read first), append each Gram-Schmidt residual
/// with norm above the policy threshold, phased so its first nonzero
/// component is real positive. Produces the sparse, permutation-like
/// completions natural for circuits that need no auxiliary direction.
Eigen::MatrixXcd complete_unitary_gs(const std::vector<StateVec>& rows);

/// Same Gram-Schmidt completion, but scan the given candidate vectors
/// before falling back to the computational basis kets. Seeding with the
/// symmetric-subspace basis keeps the completion supported on two-term
/// combinations of coin states instead of dense reflections.
Eigen::MatrixXcd complete_unitary_gs(const std::vector<StateVec>& rows,
                                     const std::vector<StateVec>& candidates);

/// A synthesized heralded circuit. Rows 0 and 1 of U are <v0| and <v1|; the
/// output qubit is bit 0 and the herald demands every other qubit read 0.
struct Circuit {
    int k = 1;
    std::vector<int> ns;
    int m = 0;
    Eigen::MatrixXcd U;
    StateVec v0, v1;
    std::optional<StateVec> theta; // auxiliary direction, absent when x=y=0
    SynthScalars scalars;
    /// The synthesized function, kept for in-process verification runs.
    /// Not part of the circuit's serialized form.
    std::optional<MultiRationalFn> fn;
};

/// End-to-end synthesis. ns defaults to the per-variable degrees (a
/// degree-0 function gets its output carried on one ancilla). Larger ns are
/// allowed for padding studies: coefficients are zero-extended and the
/// binomial weights use the larger n. The numerator/denominator pair is
/// phase-normalized first so that any common scalar factor, complex
/// included, leaves the circuit bit-identical.
Circuit synthesize(const MultiRationalFn& f,
                   std::optional<std::vector<int>> ns = std::nullopt);
Circuit synthesize(const RationalFn& f,
                   std::optional<std::vector<int>> ns = std::nullopt);

/// Synthesis from a deliberately non-coprime padded pair (probability
/// studies; the zero at the padding root is the point of the exercise).
Circuit synthesize_padded(const PaddedFn& f);

/// Phase-normalize (P, Q) in place: multiply both by conj(mu)/|mu| where mu
/// is Q's nonzero coefficient of lexicographically largest multi-index.
/// Leaves the represented function unchanged and makes synthesis invariant
/// under common complex scaling.
void canonical_phase(MultiPoly& P, MultiPoly& Q);

} // namespace qqbf
