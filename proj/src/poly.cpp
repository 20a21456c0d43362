#include "qqbf/poly.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "qqbf/policy.hpp"

namespace qqbf {

namespace {

bool all_finite(const std::vector<cplx>& cs) {
    for (const auto& c : cs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

std::vector<cplx> trimmed(std::vector<cplx> cs) {
    while (cs.size() > 1 && cs.back() == cplx{0.0, 0.0}) cs.pop_back();
    if (cs.empty()) cs.push_back(cplx{0.0, 0.0});
    return cs;
}

} // namespace

Poly::Poly(std::vector<cplx> coeffs) : coeffs_(trimmed(std::move(coeffs))) {
    if (!all_finite(coeffs_))
        throw InputError("bad_argument", "polynomial coefficient is not finite");
}

int Poly::degree() const {
    if (coeffs_.size() == 1 && coeffs_[0] == cplx{0.0, 0.0}) return -1;
    return static_cast<int>(coeffs_.size()) - 1;
}

cplx Poly::coeff(int j) const {
    if (j < 0 || j >= static_cast<int>(coeffs_.size())) return {0.0, 0.0};
    return coeffs_[static_cast<size_t>(j)];
}

ExtComplex Poly::eval(const ExtComplex& z) const {
    if (z.is_inf) {
        if (degree() >= 1) return ExtComplex::infinity();
        return coeffs_[0];
    }
    cplx acc{0.0, 0.0};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * z.value + *it;
    return acc;
}

Poly Poly::operator*(const Poly& rhs) const {
    if (is_zero() || rhs.is_zero()) return Poly::zero();
    std::vector<cplx> out(coeffs_.size() + rhs.coeffs_.size() - 1, cplx{0, 0});
    for (size_t i = 0; i < coeffs_.size(); ++i)
        for (size_t j = 0; j < rhs.coeffs_.size(); ++j)
            out[i + j] += coeffs_[i] * rhs.coeffs_[j];
    return Poly(std::move(out));
}

Poly Poly::operator*(cplx s) const {
    std::vector<cplx> out = coeffs_;
    for (auto& c : out) c *= s;
    return Poly(std::move(out));
}

Poly Poly::operator+(const Poly& rhs) const {
    std::vector<cplx> out(std::max(coeffs_.size(), rhs.coeffs_.size()),
                          cplx{0, 0});
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = coeff(static_cast<int>(i)) + rhs.coeff(static_cast<int>(i));
    return Poly(std::move(out));
}

// ---------------------------------------------------------------- MultiPoly

MultiPoly::MultiPoly(int k, std::map<std::vector<int>, cplx> terms) : k_(k) {
    if (k < 1) throw InputError("bad_argument", "variable count must be >= 1");
    for (auto& [idx, c] : terms) {
        if (static_cast<int>(idx.size()) != k)
            throw InputError("bad_argument", "multi-index length != k");
        for (int j : idx)
            if (j < 0) throw InputError("bad_argument", "negative exponent");
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InputError("bad_argument", "coefficient is not finite");
        if (c != cplx{0.0, 0.0}) terms_.emplace(idx, c);
    }
}

MultiPoly MultiPoly::from_univariate(const Poly& p) {
    MultiPoly out(1);
    for (int j = 0; j <= std::max(p.degree(), 0); ++j)
        out.set_coeff({j}, p.coeff(j));
    return out;
}

std::vector<int> MultiPoly::degrees() const {
    std::vector<int> d(static_cast<size_t>(k_), 0);
    for (const auto& [idx, c] : terms_)
        for (int i = 0; i < k_; ++i)
            d[static_cast<size_t>(i)] =
                std::max(d[static_cast<size_t>(i)], idx[static_cast<size_t>(i)]);
    return d;
}

cplx MultiPoly::coeff(const std::vector<int>& index) const {
    auto it = terms_.find(index);
    return it == terms_.end() ? cplx{0.0, 0.0} : it->second;
}

void MultiPoly::set_coeff(const std::vector<int>& index, cplx c) {
    if (static_cast<int>(index.size()) != k_)
        throw InputError("bad_argument", "multi-index length != k");
    for (int j : index)
        if (j < 0) throw InputError("bad_argument", "negative exponent");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw InputError("bad_argument", "coefficient is not finite");
    if (c == cplx{0.0, 0.0})
        terms_.erase(index);
    else
        terms_[index] = c;
}

cplx MultiPoly::eval(const std::vector<cplx>& zs) const {
    if (static_cast<int>(zs.size()) != k_)
        throw InputError("dimension_mismatch",
                         "evaluation point has wrong variable count");
    cplx acc{0.0, 0.0};
    for (const auto& [idx, c] : terms_) {
        cplx t = c;
        for (int i = 0; i < k_; ++i)
            for (int p = 0; p < idx[static_cast<size_t>(i)]; ++p)
                t *= zs[static_cast<size_t>(i)];
        acc += t;
    }
    return acc;
}

MultiPoly MultiPoly::scaled(cplx s) const {
    MultiPoly out(k_);
    for (const auto& [idx, c] : terms_) out.set_coeff(idx, c * s);
    return out;
}

// ---------------------------------------------------------------- resultant

double normalized_resultant(const Poly& P, const Poly& Q) {
    const int dp = P.degree(), dq = Q.degree();
    if (dp < 0 || dq < 0) return 0.0; // a zero polynomial divides everything
    if (dp == 0 || dq == 0) return 1.0; // nonzero constants share no root

    const int n = dp + dq;
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n, n);
    // dq rows of P's coefficients (descending), then dp rows of Q's.
    for (int r = 0; r < dq; ++r)
        for (int j = 0; j <= dp; ++j) S(r, r + j) = P.coeff(dp - j);
    for (int r = 0; r < dp; ++r)
        for (int j = 0; j <= dq; ++j) S(dq + r, r + j) = Q.coeff(dq - j);

    double np = 0.0, nq = 0.0;
    for (const auto& c : P.coeffs()) np += std::norm(c);
    for (const auto& c : Q.coeffs()) nq += std::norm(c);
    const double scale =
        std::pow(std::sqrt(np), dq) * std::pow(std::sqrt(nq), dp);
    return std::abs(S.determinant()) / scale;
}

bool coprime_check(const Poly& P, const Poly& Q, std::optional<double> tol) {
    const double t = tol.value_or(NumericPolicy::active().resultant);
    return normalized_resultant(P, Q) > t;
}

// --------------------------------------------------------------- RationalFn

RationalFn::RationalFn(Poly P, Poly Q) : P_(std::move(P)), Q_(std::move(Q)) {
    if (Q_.is_zero())
        throw InputError("bad_argument", "denominator is the zero polynomial");
    if (!coprime_check(P_, Q_)) {
        std::ostringstream os;
        os << "numerator and denominator share a root (normalized resultant "
           << normalized_resultant(P_, Q_) << ")";
        throw InputError("not_coprime", os.str());
    }
}

ExtComplex RationalFn::eval(const ExtComplex& z) const {
    if (z.is_inf) {
        const int n = degree();
        const cplx pn = P_.coeff(n), qn = Q_.coeff(n);
        if (std::abs(qn) == 0.0) return ExtComplex::infinity();
        return pn / qn;
    }
    const cplx q = Q_.eval(z).value;
    if (std::abs(q) == 0.0) return ExtComplex::infinity();
    return P_.eval(z).value / q;
}

MultiRationalFn::MultiRationalFn(MultiPoly P, MultiPoly Q)
    : P_(std::move(P)), Q_(std::move(Q)) {
    if (P_.k() != Q_.k())
        throw InputError("bad_argument", "P and Q have different variable counts");
    if (Q_.is_zero())
        throw InputError("bad_argument", "denominator is the zero polynomial");
}

MultiRationalFn MultiRationalFn::from_univariate(const RationalFn& f) {
    return MultiRationalFn(MultiPoly::from_univariate(f.P()),
                           MultiPoly::from_univariate(f.Q()));
}

std::vector<int> MultiRationalFn::degrees() const {
    std::vector<int> dp = P_.degrees(), dq = Q_.degrees();
    for (size_t i = 0; i < dp.size(); ++i) dp[i] = std::max(dp[i], dq[i]);
    return dp;
}

ExtComplex MultiRationalFn::eval(const std::vector<cplx>& zs) const {
    const cplx q = Q_.eval(zs);
    if (std::abs(q) == 0.0) return ExtComplex::infinity();
    return P_.eval(zs) / q;
}

// --------------------------------------------------------------------- pad

PaddedFn pad(const RationalFn& f, const ExtComplex& r) {
    const int n = f.degree();
    if (r.is_inf) return PaddedFn{f.P(), f.Q(), n + 1};
    const Poly factor({-r.value, cplx{1.0, 0.0}}); // z - r
    return PaddedFn{f.P() * factor, f.Q() * factor, n + 1};
}

} // namespace qqbf
