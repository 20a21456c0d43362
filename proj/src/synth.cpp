#include "qqbf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qqbf/policy.hpp"

namespace qqbf {

namespace {

// Indices 0..dim-1 ordered by their bitstring read from bit 0 upward — the
// order in which the kets |b1 b2 ...> appear when written least significant
// bit first.
std::vector<long> string_order(long dim) {
    std::vector<long> idx(static_cast<size_t>(dim));
    std::iota(idx.begin(), idx.end(), 0L);
    int nb = 1;
    while ((1L << nb) < dim) ++nb;
    std::sort(idx.begin(), idx.end(), [nb](long s, long t) {
        for (int b = 0; b < nb; ++b) {
            const int sb = static_cast<int>((s >> b) & 1);
            const int tb = static_cast<int>((t >> b) & 1);
            if (sb != tb) return sb < tb;
        }
        return false;
    });
    return idx;
}

void check_orthonormal(const std::vector<StateVec>& rows) {
    if (rows.empty())
        throw InputError("bad_argument", "no rows to complete");
    const long dim = rows[0].size();
    if (static_cast<long>(rows.size()) > dim)
        throw InputError("bad_argument", "more rows than the dimension");
    const double tol = NumericPolicy::active().orthonormal;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim)
            throw InputError("dimension_mismatch", "rows of mixed dimension");
        for (size_t j = 0; j <= i; ++j) {
            const cplx g = rows[j].dot(rows[i]); // <rows[j]|rows[i]>
            const cplx want = (i == j) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
            if (std::abs(g - want) > tol)
                throw InputError("bad_argument",
                                 "input rows are not orthonormal");
        }
    }
}

int total_qubits(const std::vector<int>& ns, int m) {
    int t = m;
    for (int n : ns) t += n;
    if (t > kMaxQubits)
        throw InputError("bad_argument",
                         "register exceeds the dense-statevector qubit limit");
    return t;
}

void check_degrees(const MultiPoly& P, const MultiPoly& Q,
                   const std::vector<int>& ns) {
    if (static_cast<int>(ns.size()) != P.k())
        throw InputError("dimension_mismatch",
                         "qubit list length != variable count");
    const auto dp = P.degrees(), dq = Q.degrees();
    for (size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] < std::max(dp[i], dq[i])) {
            std::ostringstream os;
            os << "variable " << (i + 1) << " needs at least "
               << std::max(dp[i], dq[i]) << " coins, got " << ns[i];
            throw InputError("degree_mismatch", os.str());
        }
    }
}

} // namespace

std::vector<std::vector<int>> all_multi_indices(const std::vector<int>& ns) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(ns.size(), 0);
    while (true) {
        out.push_back(cur);
        int i = static_cast<int>(ns.size()) - 1;
        while (i >= 0 && cur[static_cast<size_t>(i)] == ns[static_cast<size_t>(i)]) {
            cur[static_cast<size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++cur[static_cast<size_t>(i)];
    }
    return out;
}

double binomial_product(const std::vector<int>& ns, const std::vector<int>& J) {
    double r = 1.0;
    for (size_t i = 0; i < ns.size(); ++i) r *= binomial(ns[i], J[i]);
    return r;
}

AbcResult abc(const MultiPoly& P, const MultiPoly& Q,
              const std::vector<int>& ns) {
    check_degrees(P, Q, ns);
    double a = 0.0, b = 0.0;
    cplx c{0.0, 0.0};
    for (const auto& [J, q] : Q.terms())
        a += std::norm(q) / binomial_product(ns, J);
    for (const auto& [J, p] : P.terms()) {
        const double w = binomial_product(ns, J);
        b += std::norm(p) / w;
        const cplx q = Q.coeff(J);
        if (q != cplx{0.0, 0.0}) c += p * std::conj(q) / w;
    }
    return {a, b, c};
}

SynthScalars solve_xyk(double a, double b, cplx c, double w) {
    if (a <= 0.0 && b <= 0.0)
        throw InputError("bad_argument",
                         "both quadratic forms vanish (zero function pair)");
    const double snap = NumericPolicy::active().scalar_snap;
    SynthScalars s;
    s.a = a;
    s.b = b;
    s.c = c;
    s.w = w;
    const double d = w * w + a - b;

    if (std::abs(c) <= snap * std::sqrt(a * b)) {
        // Cross term is numerical noise: treat it as exactly zero.
        if (std::abs(d) <= snap * (a + b + w * w)) {
            s.l = 0.0; // fully degenerate: x = y = 0 exactly
            s.x = 0.0;
            s.y = cplx{0.0, 0.0};
            s.K = std::sqrt(2.0 / (a + b + w * w));
            return s;
        }
        s.l = std::abs(d);
        s.x = std::sqrt(std::max(d, 0.0));
        s.y = cplx{std::sqrt(std::max(-d, 0.0)), 0.0}; // phase(0) := +1
        s.K = std::sqrt(2.0 / (s.l + w * w + a + b));
        return s;
    }

    s.l = std::hypot(d, 2.0 * std::abs(c));
    // Take the larger quadratic root directly and recover the smaller from
    // the product identity x|y| = |c|; both stay fully accurate when d
    // dominates and the naive difference l - |d| would cancel.
    double ymag;
    if (d >= 0.0) {
        s.x = std::sqrt((s.l + d) / 2.0);
        ymag = std::abs(c) / s.x;
    } else {
        ymag = std::sqrt((s.l - d) / 2.0);
        s.x = std::abs(c) / ymag;
    }
    s.y = (-c / std::abs(c)) * ymag;
    s.K = std::sqrt(2.0 / (s.l + w * w + a + b));
    return s;
}

bool needs_ancilla(const std::vector<int>& ns, const SynthScalars& s) {
    const double snap = NumericPolicy::active().scalar_snap;
    if (std::abs(s.x) <= snap && std::abs(s.y) <= snap) return false;
    long pow2 = 1, prod = 1;
    for (int n : ns) {
        pow2 <<= n;
        prod *= n + 1;
    }
    return pow2 == prod;
}

std::vector<StateVec> theta_directions(const std::vector<int>& ns, int m,
                                       int count) {
    const int nq = total_qubits(ns, m);
    const long dim = 1L << nq;
    int sum_n = 0;
    for (int n : ns) sum_n += n;

    std::vector<StateVec> span;
    for (const auto& J : all_multi_indices(ns))
        span.push_back(symmetric_product_vector(ns, m, J));

    std::vector<StateVec> out;
    if (m >= 1 && count >= 1) {
        StateVec th = StateVec::Zero(dim);
        th[1L << sum_n] = 1.0; // lowest ancilla bit set, coins all zero
        out.push_back(th);
    }
    const double accept = NumericPolicy::active().completion_residual;
    for (long t = 0; static_cast<int>(out.size()) < count; ++t) {
        if (t >= dim)
            throw InfeasibleError("capacity",
                                  "no direction orthogonal to the symmetric "
                                  "span is left in this register");
        StateVec r = StateVec::Zero(dim);
        r[t] = 1.0;
        for (const auto& s : span) r -= s * std::conj(s[t]);
        for (const auto& s : out) r -= s * std::conj(s[t]);
        const double nr = r.norm();
        if (nr > accept) out.push_back(r / nr);
    }
    return out;
}

StateVec theta0(const std::vector<int>& ns, int m) {
    return theta_directions(ns, m, 1)[0];
}

std::pair<StateVec, StateVec> build_v0_v1(const MultiPoly& P,
                                          const MultiPoly& Q,
                                          const std::vector<int>& ns, int m,
                                          const SynthScalars& s) {
    const long dim = 1L << total_qubits(ns, m);
    StateVec v0 = StateVec::Zero(dim), v1 = StateVec::Zero(dim);
    for (const auto& J : all_multi_indices(ns)) {
        const StateVec B = symmetric_product_vector(ns, m, J);
        const double cc = std::sqrt(binomial_product(ns, J));
        const cplx p = P.coeff(J), q = Q.coeff(J);
        if (p != cplx{0.0, 0.0}) v0 += (s.K * std::conj(p) / cc) * B;
        if (q != cplx{0.0, 0.0}) v1 += (s.K * std::conj(q) / cc) * B;
    }
    const double snap = NumericPolicy::active().scalar_snap;
    if (std::abs(s.x) > snap || std::abs(s.y) > snap) {
        const StateVec th = theta0(ns, m);
        v0 += (s.K * s.x) * th;
        v1 += (s.K * s.y) * th;
    }
    return {v0, v1};
}

Eigen::MatrixXcd complete_unitary(const std::vector<StateVec>& rows) {
    check_orthonormal(rows);
    const long dim = rows[0].size();
    const int r = static_cast<int>(rows.size());
    const double snap = NumericPolicy::active().scalar_snap;

    std::vector<StateVec> cur(rows);
    std::vector<StateVec> us;
    std::vector<double> uu;
    std::vector<cplx> alphas;
    for (int i = 0; i < r; ++i) {
        const StateVec& xi = cur[static_cast<size_t>(i)];
        const cplx piv = xi[i];
        const cplx alpha =
            std::abs(piv) > snap ? -piv / std::abs(piv) : cplx{-1.0, 0.0};
        StateVec u = xi;
        u[i] -= alpha;
        const double n2 = u.squaredNorm(); // in [2, 4]: never degenerate
        for (int j = i + 1; j < r; ++j) {
            auto& cj = cur[static_cast<size_t>(j)];
            cj -= u * (2.0 * u.dot(cj) / n2);
        }
        us.push_back(std::move(u));
        uu.push_back(n2);
        alphas.push_back(alpha);
    }

    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(dim, dim);
    for (int i = 0; i < r; ++i) M(i, i) = alphas[static_cast<size_t>(i)];
    for (int i = r - 1; i >= 0; --i) {
        const StateVec& u = us[static_cast<size_t>(i)];
        const Eigen::RowVectorXcd w = u.adjoint() * M;
        M.noalias() -= (2.0 / uu[static_cast<size_t>(i)]) * u * w;
    }
    return M.adjoint();
}

Eigen::MatrixXcd complete_unitary_gs(const std::vector<StateVec>& rows) {
    return complete_unitary_gs(rows, {});
}

Eigen::MatrixXcd complete_unitary_gs(const std::vector<StateVec>& rows,
                                     const std::vector<StateVec>& candidates) {
    check_orthonormal(rows);
    const long dim = rows[0].size();
    const double accept = NumericPolicy::active().completion_residual;
    const double snap = NumericPolicy::active().scalar_snap;

    std::vector<StateVec> out(rows);
    auto consider = [&](StateVec r) {
        for (const auto& s : out) r -= s * (s.dot(r));
        const double nr = r.norm();
        if (nr <= accept) return;
        r /= nr;
        long k = 0;
        while (k < dim && std::abs(r[k]) <= snap) ++k;
        r *= std::conj(r[k]) / std::abs(r[k]); // first nonzero made real > 0
        out.push_back(std::move(r));
    };

    for (const auto& cand : candidates) {
        if (static_cast<long>(out.size()) == dim) break;
        if (cand.size() != dim)
            throw InputError("bad_argument", "candidate dimension mismatch");
        consider(cand);
    }
    for (long t : string_order(dim)) {
        if (static_cast<long>(out.size()) == dim) break;
        StateVec r = StateVec::Zero(dim);
        r[t] = 1.0;
        consider(std::move(r));
    }
    if (static_cast<long>(out.size()) != dim)
        throw InfeasibleError("capacity", "completion could not span the space");

    Eigen::MatrixXcd U(dim, dim);
    for (long i = 0; i < dim; ++i)
        U.row(i) = out[static_cast<size_t>(i)].conjugate().transpose();
    return U;
}

void canonical_phase(MultiPoly& P, MultiPoly& Q) {
    // Q never stores zero coefficients, so its last map entry is the nonzero
    // coefficient of lexicographically largest index.
    const cplx mu = Q.terms().rbegin()->second;
    const cplx ph = std::conj(mu) / std::abs(mu);
    P = P.scaled(ph);
    Q = Q.scaled(ph);
}

namespace {

Circuit synthesize_core(MultiPoly P, MultiPoly Q, const std::vector<int>& ns,
                        std::optional<MultiRationalFn> fn) {
    check_degrees(P, Q, ns);
    canonical_phase(P, Q);

    const auto [a, b, c] = abc(P, Q, ns);
    const SynthScalars s = solve_xyk(a, b, c);
    const int m = needs_ancilla(ns, s) ? 1 : 0;
    auto [v0, v1] = build_v0_v1(P, Q, ns, m, s);

    Circuit circ;
    circ.k = static_cast<int>(ns.size());
    circ.ns = ns;
    circ.m = m;
    circ.scalars = s;
    circ.v0 = v0;
    circ.v1 = v1;
    circ.fn = std::move(fn);

    const double snap = NumericPolicy::active().scalar_snap;
    if (std::abs(s.x) > snap || std::abs(s.y) > snap) {
        circ.theta = theta0(ns, m);
        circ.U = complete_unitary({v0, v1});
    } else {
        // No auxiliary direction: the sparse string-ordered completion keeps
        // permutation structure (identity, NOT-like and control-like gates)
        // intact instead of smearing it across reflections.
        circ.U = complete_unitary_gs({v0, v1});
    }
    return circ;
}

} // namespace

Circuit synthesize(const MultiRationalFn& f, std::optional<std::vector<int>> ns) {
    const std::vector<int> use = ns.value_or(f.degrees());
    return synthesize_core(f.P(), f.Q(), use, f);
}

Circuit synthesize(const RationalFn& f, std::optional<std::vector<int>> ns) {
    return synthesize(MultiRationalFn::from_univariate(f), std::move(ns));
}

Circuit synthesize_padded(const PaddedFn& f) {
    return synthesize_core(MultiPoly::from_univariate(f.P),
                           MultiPoly::from_univariate(f.Q), {f.target_n},
                           std::nullopt);
}

} // namespace qqbf
