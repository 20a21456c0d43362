#include "qqbf/multifunc.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qqbf/policy.hpp"

namespace qqbf {

namespace {

struct CanonPair {
    MultiPoly P, Q;
};

CanonPair canonicalized(const MultiRationalFn& f) {
    CanonPair c{f.P(), f.Q()};
    canonical_phase(c.P, c.Q);
    return c;
}

void check_pair_degrees(const MultiRationalFn& g0, const MultiRationalFn& g1,
                        const std::vector<int>& ns) {
    if (g0.k() != g1.k())
        throw InputError("dimension_mismatch",
                         "the two functions have different variable counts");
    if (static_cast<int>(ns.size()) != g0.k())
        throw InputError("dimension_mismatch",
                         "qubit list length != variable count");
    const auto d0 = g0.degrees(), d1 = g1.degrees();
    for (size_t i = 0; i < ns.size(); ++i)
        if (ns[i] < d0[i] || ns[i] < d1[i])
            throw InputError("degree_mismatch",
                             "qubit count below a function degree");
}

// The four cross sums sum coef0_J conj(coef1_J) / prod C.
cplx cross_sum(const MultiPoly& A, const MultiPoly& B,
               const std::vector<int>& ns) {
    cplx acc{0.0, 0.0};
    for (const auto& [J, av] : A.terms()) {
        const cplx bv = B.coeff(J);
        if (bv != cplx{0.0, 0.0})
            acc += av * std::conj(bv) / binomial_product(ns, J);
    }
    return acc;
}

// s_i = sum_J (conj(p_J)/x - conj(q_J)/y) t_J / prod C over g1's coefficients.
cplx s_value(const MultiPoly& P, const MultiPoly& Q, const MultiPoly& T,
             const std::vector<int>& ns, double x, cplx y) {
    cplx acc{0.0, 0.0};
    for (const auto& [J, tv] : T.terms()) {
        const cplx term =
            std::conj(P.coeff(J)) / x - std::conj(Q.coeff(J)) / y;
        acc += term * tv / binomial_product(ns, J);
    }
    return acc;
}

// x and y after adding delta to P's constant coefficient, solved on the
// branch continuous with the unperturbed circuit (y keeps the sign of +c/|c|)
// with the same cancellation-free root selection as solve_xyk.
struct PerturbedSolve {
    MultiPoly P;
    double x;
    cplx y;
};

PerturbedSolve perturbed_xy(const MultiPoly& P0, const MultiPoly& Q,
                            const std::vector<int>& ns, double delta) {
    const double snap = NumericPolicy::active().scalar_snap;
    MultiPoly P = P0;
    const std::vector<int> zero(ns.size(), 0);
    P.set_coeff(zero, P.coeff(zero) + delta);
    const auto [a, b, c] = abc(P, Q, ns);
    const double d = a - b;
    if (std::abs(c) <= snap * std::sqrt(a * b)) {
        return {P, std::sqrt(std::max(d, 0.0)),
                cplx{std::sqrt(std::max(-d, 0.0)), 0.0}};
    }
    const double l = std::hypot(d, 2.0 * std::abs(c));
    double x, ymag;
    if (d >= 0.0) {
        x = std::sqrt((l + d) / 2.0);
        ymag = std::abs(c) / x;
    } else {
        ymag = std::sqrt((l - d) / 2.0);
        x = std::abs(c) / ymag;
    }
    return {P, x, (c / std::abs(c)) * ymag};
}

double perturbation_gap(const MultiPoly& P, const MultiPoly& Q,
                        const std::vector<int>& ns, double delta) {
    const auto ps = perturbed_xy(P, Q, ns, delta);
    return std::min(ps.x, std::abs(ps.y));
}

// Does the ladder of magnitudes converge to zero? Either everything is
// already negligible, or the sequence is nonincreasing and ends far below
// its start.
bool goes_to_zero(const std::vector<cplx>& vals) {
    const auto& policy = NumericPolicy::active();
    bool all_tiny = true;
    for (const auto& v : vals) all_tiny = all_tiny && std::abs(v) < 1e-12;
    if (all_tiny) return true;
    for (size_t i = 0; i + 1 < vals.size(); ++i)
        if (std::abs(vals[i + 1]) > std::abs(vals[i]) * (1.0 + 1e-6))
            return false;
    return std::abs(vals.back()) <=
           policy.compat_endpoint_ratio * std::abs(vals.front());
}

} // namespace

CompatibilityReport compatibility(const MultiRationalFn& g0,
                                  const MultiRationalFn& g1,
                                  const std::vector<int>& ns) {
    check_pair_degrees(g0, g1, ns);
    const auto& policy = NumericPolicy::active();
    const auto f0 = canonicalized(g0);
    const auto f1 = canonicalized(g1);

    const auto [a, b, c] = abc(f0.P, f0.Q, ns);
    const SynthScalars s = solve_xyk(a, b, c);

    CompatibilityReport report;
    if (s.x > policy.scalar_snap && std::abs(s.y) > policy.scalar_snap) {
        report.s1 = s_value(f0.P, f0.Q, f1.P, ns, s.x, s.y);
        report.s2 = s_value(f0.P, f0.Q, f1.Q, ns, s.x, s.y);
        report.compatible = std::abs(report.s1) < policy.compat &&
                            std::abs(report.s2) < policy.compat;
        return report;
    }

    // Degenerate scalars: lift the degeneracy by perturbing the constant
    // coefficient of g0's numerator, calibrating the perturbation so the
    // induced scalar gap min(x, |y|) sits exactly on each ladder rung, and
    // classify the limits of s1, s2.
    std::vector<cplx> s1s, s2s;
    double eps = policy.compat_eps_first;
    for (int rung = 0; rung < policy.compat_eps_count; ++rung, eps /= 10.0) {
        double lo = 0.0, hi = 1e-9;
        while (perturbation_gap(f0.P, f0.Q, ns, hi) < eps) {
            hi *= 2.0;
            if (hi > 1e6)
                throw InfeasibleError("numeric",
                                      "perturbation cannot lift the "
                                      "degenerate scalars");
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (perturbation_gap(f0.P, f0.Q, ns, mid) < eps)
                lo = mid;
            else
                hi = mid;
        }
        const auto ps = perturbed_xy(f0.P, f0.Q, ns, 0.5 * (lo + hi));
        const cplx s1e = s_value(ps.P, f0.Q, f1.P, ns, ps.x, ps.y);
        const cplx s2e = s_value(ps.P, f0.Q, f1.Q, ns, ps.x, ps.y);
        report.epsilon_trace.emplace_back(eps, s1e, s2e);
        s1s.push_back(s1e);
        s2s.push_back(s2e);
    }
    report.s1 = s1s.back();
    report.s2 = s2s.back();
    report.compatible = goes_to_zero(s1s) && goes_to_zero(s2s);
    return report;
}

CompatibilityReport compatibility(const RationalFn& g0, const RationalFn& g1,
                                  int n) {
    return compatibility(MultiRationalFn::from_univariate(g0),
                         MultiRationalFn::from_univariate(g1), {n});
}

MultiCircuit synthesize_priority(const MultiRationalFn& g0,
                                 const MultiRationalFn& g1,
                                 const std::vector<int>& ns) {
    const auto& policy = NumericPolicy::active();
    if (!compatibility(g0, g1, ns).compatible)
        throw InfeasibleError(
            "incompatible",
            "the second function cannot ride on the first one's circuit "
            "without costing it success probability");

    const auto f0 = canonicalized(g0);
    const auto f1 = canonicalized(g1);
    const auto [a, b, c] = abc(f0.P, f0.Q, ns);
    const SynthScalars s = solve_xyk(a, b, c);

    const cplx pr = cross_sum(f0.P, f1.P, ns);
    const cplx qr = cross_sum(f0.Q, f1.P, ns);
    const cplx ps = cross_sum(f0.P, f1.Q, ns);
    const cplx qs = cross_sum(f0.Q, f1.Q, ns);

    // a1, a3 from whichever orthogonality equation is well conditioned; the
    // other equation must then hold automatically (it does exactly when the
    // compatibility sums vanish).
    cplx a1{0.0, 0.0}, a3{0.0, 0.0};
    if (s.x > policy.scalar_snap) {
        a1 = -std::conj(pr) / s.x;
        a3 = -std::conj(ps) / s.x;
        if (std::abs(qr + std::conj(s.y) * a1) > policy.compat ||
            std::abs(qs + std::conj(s.y) * a3) > policy.compat)
            throw InfeasibleError("numeric",
                                  "orthogonality equations disagree");
    } else if (std::abs(s.y) > policy.scalar_snap) {
        a1 = -std::conj(qr) / std::conj(s.y);
        a3 = -std::conj(qs) / std::conj(s.y);
        if (std::abs(pr) > policy.compat || std::abs(ps) > policy.compat)
            throw InfeasibleError("numeric",
                                  "orthogonality equations disagree");
    } else {
        if (std::max(std::max(std::abs(pr), std::abs(qr)),
                     std::max(std::abs(ps), std::abs(qs))) > policy.compat)
            throw InfeasibleError("numeric",
                                  "cross sums do not vanish with x = y = 0");
    }

    double A2 = std::norm(a1), B2 = std::norm(a3);
    for (const auto& [J, v] : f1.P.terms())
        A2 += std::norm(v) / binomial_product(ns, J);
    for (const auto& [J, v] : f1.Q.terms())
        B2 += std::norm(v) / binomial_product(ns, J);
    const cplx C2 = cross_sum(f1.P, f1.Q, ns) + std::conj(a1) * a3;

    const double a2 = std::sqrt(std::max(
        (B2 - A2 + std::hypot(B2 - A2, 2.0 * std::abs(C2))) / 2.0, 0.0));
    cplx a4;
    if (a2 > policy.scalar_snap) {
        a4 = -C2 / a2;
    } else {
        if (std::abs(C2) > policy.compat)
            throw InfeasibleError("numeric",
                                  "normalization scalars are inconsistent "
                                  "(a2 = 0 with a nonzero cross term)");
        a4 = cplx{std::sqrt(std::max(A2 - B2, 0.0)), 0.0};
    }
    const double H = 1.0 / std::sqrt(A2 + a2 * a2);

    // Smallest register with room for the symmetric span plus two
    // heralded directions per function pair.
    int sum_n = 0;
    long prod = 1;
    for (int n : ns) {
        sum_n += n;
        prod *= n + 1;
    }
    int m = 0;
    while ((1L << (sum_n + m)) < prod + 2) ++m;
    const long dim = 1L << (sum_n + m);

    const auto th = theta_directions(ns, m, 2);
    auto [v0, v1] = build_v0_v1(f0.P, f0.Q, ns, m, s);

    auto build_row = [&](const MultiPoly& coefs, cplx t0, cplx t1,
                         double norm) {
        StateVec v = StateVec::Zero(dim);
        for (const auto& [J, cv] : coefs.terms())
            v += (norm * std::conj(cv) / std::sqrt(binomial_product(ns, J))) *
                 symmetric_product_vector(ns, m, J);
        v += (norm * t0) * th[0];
        v += (norm * t1) * th[1];
        return v;
    };
    const StateVec v2 = build_row(f1.P, a1, cplx{a2, 0.0}, H);
    const StateVec v3 = build_row(f1.Q, a3, a4, H);

    MultiCircuit mc;
    mc.k = static_cast<int>(ns.size());
    mc.ns = ns;
    mc.m = m;
    mc.rows = {v0, v1, v2, v3};
    // Seed the completion with the symmetric-subspace basis so the filler
    // rows stay two-term combinations of coin states rather than dense
    // reflections; the heralded rows above are unaffected.
    std::vector<StateVec> seeds;
    for (const auto& J : all_multi_indices(ns))
        seeds.push_back(symmetric_product_vector(ns, m, J));
    mc.U = complete_unitary_gs({v0, v1, v2, v3}, seeds);
    mc.scalars = PriorityScalars{a1, a2, a3, a4, H};
    mc.g0 = g0;
    mc.g1 = g1;
    return mc;
}

MultiCircuit synthesize_priority(const RationalFn& g0, const RationalFn& g1,
                                 int n) {
    return synthesize_priority(MultiRationalFn::from_univariate(g0),
                               MultiRationalFn::from_univariate(g1), {n});
}

namespace {

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (H + H.adjoint()));
    Eigen::VectorXd ev = es.eigenvalues();
    for (long i = 0; i < ev.size(); ++i) {
        if (ev[i] < -1e-12)
            throw InfeasibleError("numeric",
                                  "square-root operand has a negative "
                                  "eigenvalue");
        ev[i] = std::sqrt(std::max(ev[i], 0.0));
    }
    return es.eigenvectors() * ev.asDiagonal() *
           es.eigenvectors().adjoint();
}

double spectral_norm(const Eigen::MatrixXcd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    return svd.singularValues()[0];
}

} // namespace

Eigen::MatrixXcd dilation_unitary(const Eigen::MatrixXcd& A) {
    const long N = A.rows(), M = A.cols();
    if (spectral_norm(A) > 1.0 + 1e-12)
        throw InputError("not_contraction",
                         "matrix has spectral norm above one");
    const Eigen::MatrixXcd top =
        hermitian_sqrt(Eigen::MatrixXcd::Identity(N, N) - A * A.adjoint());
    const Eigen::MatrixXcd bot =
        hermitian_sqrt(Eigen::MatrixXcd::Identity(M, M) - A.adjoint() * A);
    Eigen::MatrixXcd U(N + M, N + M);
    U.topLeftCorner(N, M) = A;
    U.topRightCorner(N, N) = top;
    U.bottomLeftCorner(M, M) = bot;
    U.bottomRightCorner(M, N) = -A.adjoint();
    return U;
}

MultiCircuit synthesize_dilation(const MultiRationalFn& g0,
                                 const MultiRationalFn& g1,
                                 const std::vector<int>& ns, double r) {
    check_pair_degrees(g0, g1, ns);
    if (r < 1.0)
        throw InputError("bad_argument", "scale factor r must be >= 1");

    const auto f0 = canonicalized(g0);
    const auto f1 = canonicalized(g1);
    const auto ab0 = abc(f0.P, f0.Q, ns);
    const auto ab1 = abc(f1.P, f1.Q, ns);
    const double K = solve_xyk(ab0.a, ab0.b, ab0.c).K;
    const double H = solve_xyk(ab1.a, ab1.b, ab1.c).K;

    int sum_n = 0;
    for (int n : ns) sum_n += n;
    const long dims = 1L << sum_n;

    // Rows of the contraction act as bras on the coin register, so they
    // carry the plain coefficients: row i applied to the input state yields
    // an amplitude proportional to the polynomial's value. (The stored ket
    // rows below are their conjugates, matching the two-row convention of
    // the single-function synthesis.)
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(4, dims);
    const MultiPoly* coefs[4] = {&f0.P, &f0.Q, &f1.P, &f1.Q};
    const double norms[4] = {K, K, H, H};
    for (int row = 0; row < 4; ++row)
        for (const auto& [J, cv] : coefs[row]->terms())
            M.row(row) += (norms[row] * cv /
                           std::sqrt(binomial_product(ns, J))) *
                          symmetric_product_vector(ns, 0, J).transpose();

    const Eigen::MatrixXcd A = M / (r * spectral_norm(M));
    const Eigen::MatrixXcd Ud = dilation_unitary(A);

    int m = 0;
    while ((1L << (sum_n + m)) < dims + 4) ++m;
    if (sum_n + m > kMaxQubits)
        throw InputError("bad_argument",
                         "register exceeds the dense-statevector qubit limit");
    const long D = 1L << (sum_n + m);
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(D, D);
    U.topLeftCorner(dims + 4, dims + 4) = Ud;

    MultiCircuit mc;
    mc.k = static_cast<int>(ns.size());
    mc.ns = ns;
    mc.m = m;
    mc.U = U;
    for (int i = 0; i < 4; ++i)
        mc.rows[static_cast<size_t>(i)] = U.row(i).conjugate().transpose();
    mc.dilation_r = r;
    mc.g0 = g0;
    mc.g1 = g1;
    return mc;
}

MultiCircuit synthesize_dilation(const RationalFn& g0, const RationalFn& g1,
                                 int n, double r) {
    return synthesize_dilation(MultiRationalFn::from_univariate(g0),
                               MultiRationalFn::from_univariate(g1), {n}, r);
}

} // namespace qqbf
