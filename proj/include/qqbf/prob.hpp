#pragma once

#include <string>
#include <vector>

#include "qqbf/poly.hpp"

namespace qqbf {

enum class Ensemble { uniform, covariant };

std::string to_string(Ensemble e);
Ensemble ensemble_from_string(const std::string& s);

/// Values of P and Q at a point of the extended polydisc: coordinates at
/// infinity restrict both polynomials to their top-degree (j_i = n_i) terms
/// in that variable — the limit of the homogenized monomial ratio.
std::pair<cplx, cplx> boundary_eval(const MultiPoly& P, const MultiPoly& Q,
                                    const std::vector<int>& ns,
                                    const std::vector<ExtComplex>& zs);

/// Closed-form herald probability at a point:
///   2 (|P(z)|^2 + |Q(z)|^2) / (prod (1+|z_i|^2)^{n_i} * (l + w^2 + a + b)),
/// with l = sqrt((w^2+a-b)^2 + 4|c|^2). w is the weight of the optional junk
/// direction in the first heralded row; w = 0 (the default) is optimal and
/// the probability is nonincreasing in |w|. Coordinates at infinity are
/// handled by the homogenized limit: restrict both polynomials to the terms
/// of top degree n_i in that variable and drop the (1+|z_i|^2)^{n_i} factor.
double success_probability(const MultiRationalFn& f, const std::vector<int>& ns,
                           const std::vector<ExtComplex>& zs, double w = 0.0);
double success_probability(const RationalFn& f, int n, const ExtComplex& z,
                           double w = 0.0);

/// Same formula for a padded (deliberately non-coprime) pair.
double success_probability(const PaddedFn& f, const ExtComplex& z);

/// Mean herald probability over Haar-uniform single-qubit states
/// (univariate only): 2(a+b) / ((n+1)(l+a+b)).
double mean_uniform(const RationalFn& f, int n);

/// Mean herald probability over the equatorial (covariant) states
/// (e^{i phi}|0> + |1>)/sqrt(2), phi uniform (univariate only):
///   2 sum_j (|p_j|^2 + |q_j|^2) / (2^n (l+a+b)).
double mean_covariant(const RationalFn& f, int n);

/// One row of the qubit-count trade-off sweep.
struct SweepRow {
    double param;
    int n;
    Ensemble ensemble;
    double mean_prob;
    bool is_argmax; // best n for this parameter value
};

/// For each parameter value, scale the base numerator by the parameter and
/// tabulate the ensemble mean for every n in [n_min, n_max] (embedding above
/// the degree = padding at infinity: same coefficients, higher n). Rows are
/// sorted by (param, n) and the per-param argmax n is flagged.
std::vector<SweepRow> sweep(const RationalFn& base,
                            const std::vector<double>& params, int n_min,
                            int n_max, Ensemble ensemble);

/// CSV rendering of sweep rows: header param,n,ensemble,mean_prob,is_argmax.
std::string sweep_csv(const std::vector<SweepRow>& rows);

} // namespace qqbf
