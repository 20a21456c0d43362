#include "qqbf/states.hpp"

#include <bit>
#include <cmath>

#include "qqbf/policy.hpp"

namespace qqbf {

double binomial(int n, int j) {
    if (j < 0 || j > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= j; ++i) r = r * (n - j + i) / i;
    return std::round(r);
}

std::array<cplx, 2> coin_amplitudes(const ExtComplex& z) {
    if (z.is_inf) return {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
    const double norm = std::sqrt(1.0 + std::norm(z.value));
    return {z.value / norm, cplx{1.0 / norm, 0.0}};
}

StateVec symmetric_basis_vector(int n, int j) {
    if (n < 0 || j < 0 || j > n)
        throw InputError("bad_argument", "symmetric index out of range");
    if (n == 0) return StateVec::Ones(1);
    StateVec v = StateVec::Zero(1L << n);
    const double amp = 1.0 / std::sqrt(binomial(n, j));
    for (long t = 0; t < (1L << n); ++t) {
        const int ones = std::popcount(static_cast<unsigned long>(t));
        if (n - ones == j) v[t] = amp;
    }
    return v;
}

StateVec kron(const StateVec& a, const StateVec& b) {
    StateVec out(a.size() * b.size());
    for (long i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

namespace {

void check_register_size(const std::vector<int>& ns, int m) {
    long total = m;
    for (int n : ns) total += n;
    if (total > kMaxQubits)
        throw InputError("bad_argument",
                         "register exceeds the dense-statevector qubit limit");
}

} // namespace

StateVec input_state(const std::vector<ExtComplex>& zs,
                     const std::vector<int>& ns, int m) {
    if (zs.empty() || zs.size() != ns.size())
        throw InputError("dimension_mismatch",
                         "need one coin value per variable");
    for (int n : ns)
        if (n < 0)
            throw InputError("bad_argument", "negative coin count");
    if (m < 0) throw InputError("bad_argument", "negative ancilla count");
    check_register_size(ns, m);

    StateVec v = StateVec::Ones(1);
    for (size_t i = 0; i < zs.size(); ++i) { // variable 1 lands on the low bits
        const auto amps = coin_amplitudes(zs[i]);
        StateVec coin(2);
        coin << amps[0], amps[1];
        StateVec block = StateVec::Ones(1);
        for (int c = 0; c < ns[i]; ++c) block = kron(block, coin);
        v = kron(block, v);
    }
    StateVec anc = StateVec::Zero(1L << m);
    anc[0] = 1.0;
    return kron(anc, v);
}

StateVec symmetric_product_vector(const std::vector<int>& ns, int m,
                                  const std::vector<int>& J) {
    if (J.size() != ns.size())
        throw InputError("dimension_mismatch", "index length != variable count");
    check_register_size(ns, m);
    StateVec v = StateVec::Ones(1);
    for (size_t i = 0; i < ns.size(); ++i)
        v = kron(symmetric_basis_vector(ns[i], J[i]), v);
    StateVec anc = StateVec::Zero(1L << m);
    anc[0] = 1.0;
    return kron(anc, v);
}

double fidelity_to_coin(const StateVec& v, const ExtComplex& z) {
    if (v.size() != 2)
        throw InputError("bad_argument", "fidelity needs a single-qubit state");
    if (std::abs(v.norm() - 1.0) > 1e-8)
        throw InputError("bad_argument", "state is not normalized");
    const auto amps = coin_amplitudes(z);
    const cplx overlap = std::conj(amps[0]) * v[0] + std::conj(amps[1]) * v[1];
    return std::norm(overlap);
}

} // namespace qqbf
