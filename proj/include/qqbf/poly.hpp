#pragma once

#include <map>
#include <optional>
#include <vector>

#include "qqbf/types.hpp"

namespace qqbf {

/// Dense univariate complex polynomial, coefficients in ascending powers.
/// Invariant: the leading stored coefficient is nonzero, except for the zero
/// polynomial which is stored as the single coefficient 0 and has degree -1.
class Poly {
public:
    Poly() : coeffs_{cplx{0.0, 0.0}} {}
    explicit Poly(std::vector<cplx> coeffs);

    static Poly zero() { return Poly{}; }
    static Poly constant(cplx c) { return Poly{{c}}; }

    int degree() const;               // -1 for the zero polynomial
    bool is_zero() const { return degree() < 0; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }

    /// Coefficient of z^j; zero beyond the stored degree.
    cplx coeff(int j) const;

    /// Horner evaluation; at z = infinity returns infinity when degree >= 1,
    /// otherwise the constant term.
    ExtComplex eval(const ExtComplex& z) const;

    Poly operator*(const Poly& rhs) const;
    Poly operator*(cplx s) const;
    Poly operator+(const Poly& rhs) const;

private:
    std::vector<cplx> coeffs_;
};

/// Sparse multivariate complex polynomial in k variables: a map from the
/// multi-index (j_1..j_k) to its coefficient. Zero coefficients are never
/// stored, so every per-variable degree is attained by some stored term.
class MultiPoly {
public:
    explicit MultiPoly(int k) : k_(k) {}
    MultiPoly(int k, std::map<std::vector<int>, cplx> terms);

    static MultiPoly from_univariate(const Poly& p);

    int k() const { return k_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<std::vector<int>, cplx>& terms() const { return terms_; }

    /// Per-variable attained degrees; all zeros for the zero polynomial.
    std::vector<int> degrees() const;

    cplx coeff(const std::vector<int>& index) const;
    void set_coeff(const std::vector<int>& index, cplx c);

    /// Sum of coeff * z1^j1 ... zk^jk at a finite point.
    cplx eval(const std::vector<cplx>& zs) const;

    MultiPoly scaled(cplx s) const;

private:
    int k_;
    std::map<std::vector<int>, cplx> terms_;
};

/// Sylvester resultant of two univariate polynomials, normalized by the
/// coefficient 2-norms (||P||^deg Q * ||Q||^deg P) so the scale of the
/// inputs cannot fake or mask a common root.
double normalized_resultant(const Poly& P, const Poly& Q);

/// True when P and Q share no root, judged by the normalized resultant
/// magnitude against `tol` (default: the active policy's threshold).
bool coprime_check(const Poly& P, const Poly& Q,
                   std::optional<double> tol = std::nullopt);

/// Univariate rational function P/Q. Construction enforces Q != 0 and
/// coprimality, so a valid object never hits 0/0.
class RationalFn {
public:
    RationalFn(Poly P, Poly Q);

    const Poly& P() const { return P_; }
    const Poly& Q() const { return Q_; }
    int degree() const { return std::max(P_.degree(), Q_.degree()); }

    /// P(z)/Q(z) on the extended plane: a root of Q maps to infinity; at
    /// z = infinity the value is the ratio of the degree-n homogenized top
    /// coefficients (0 or infinity when only one of them vanishes).
    ExtComplex eval(const ExtComplex& z) const;

private:
    Poly P_, Q_;
};

/// Multivariate rational function P/Q in k variables (Q != 0; per-variable
/// coprimality is not testable by resultant and is not required here).
class MultiRationalFn {
public:
    MultiRationalFn(MultiPoly P, MultiPoly Q);

    static MultiRationalFn from_univariate(const RationalFn& f);

    const MultiPoly& P() const { return P_; }
    const MultiPoly& Q() const { return Q_; }
    int k() const { return P_.k(); }

    /// Per-variable max(deg_i P, deg_i Q).
    std::vector<int> degrees() const;

    /// P(zs)/Q(zs) at a finite point; Q(zs) = 0 maps to infinity.
    ExtComplex eval(const std::vector<cplx>& zs) const;

private:
    MultiPoly P_, Q_;
};

/// Result of padding: deliberately NOT a RationalFn, because the pair shares
/// the factor (z - r) and would violate the coprimality invariant.
struct PaddedFn {
    Poly P, Q;
    int target_n; // the qubit count the padded pair is meant to run at
};

/// Multiply numerator and denominator by (z - r). For r = infinity the
/// coefficients are unchanged and only the target qubit count is raised —
/// the limit of the finite-r construction.
PaddedFn pad(const RationalFn& f, const ExtComplex& r);

} // namespace qqbf
