#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include "qqbf/json_io.hpp"
#include "qqbf/multifunc.hpp"
#include "qqbf/prob.hpp"
#include "qqbf/sim.hpp"

using namespace qqbf;

namespace {

const double kR2 = 1.0 / std::sqrt(2.0);
const Poly kOne{{cplx{1, 0}}};
const Poly kZ{{cplx{0, 0}, cplx{1, 0}}};

MultiRationalFn two_var(std::map<std::vector<int>, cplx> p_terms) {
    MultiPoly q(2);
    q.set_coeff({0, 0}, cplx{1, 0});
    return {MultiPoly(2, std::move(p_terms)), q};
}

MultiRationalFn product_fn(cplx scale = cplx{1, 0}) {
    return two_var({{{1, 1}, scale}});
}

MultiRationalFn sum_fn() {
    return two_var({{{1, 0}, cplx{1, 0}}, {{0, 1}, cplx{1, 0}}});
}

MultiRationalFn scaled_sum_fn() {
    return two_var({{{1, 0}, cplx{kR2, 0}}, {{0, 1}, cplx{kR2, 0}}});
}

/// Fit the slope of log|s2| against log(eps) over the trace rows.
double trace_slope(const CompatibilityReport& rep) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(rep.epsilon_trace.size());
    for (const auto& [eps, s1, s2] : rep.epsilon_trace) {
        const double x = std::log10(eps), y = std::log10(std::abs(s2));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("compatibility: product rides on the sum circuit") {
    const auto rep = compatibility(sum_fn(), product_fn(), {1, 1});
    CHECK(rep.compatible);
    // Degenerate scalars force the limit ladder; the cross sum dies
    // quadratically in the probe size.
    REQUIRE(rep.epsilon_trace.size() >= 3);
    CHECK(trace_slope(rep) == doctest::Approx(2.0).epsilon(0.05));
    for (const auto& [eps, s1, s2] : rep.epsilon_trace)
        CHECK(std::abs(s1) < 1e-12);
}

TEST_CASE("compatibility: the sum cannot ride on the product circuit") {
    const auto rep = compatibility(product_fn(), sum_fn(), {1, 1});
    CHECK_FALSE(rep.compatible);
    REQUIRE(rep.epsilon_trace.size() >= 3);
    // The cross sum blows up as the probe shrinks: one decade per decade.
    const auto& first = rep.epsilon_trace.front();
    const auto& last = rep.epsilon_trace.back();
    CHECK(std::abs(std::get<2>(last)) >
          1e3 * std::abs(std::get<2>(first)));
}

TEST_CASE("compatibility: a function does not ride on its own circuit") {
    // Degenerate-scalar functions fail the limit test even against
    // themselves: the probe cross sum diverges instead of vanishing.
    const auto rep = compatibility(RationalFn{kZ, kOne}, RationalFn{kZ, kOne}, 1);
    CHECK_FALSE(rep.compatible);
}

TEST_CASE("compatibility: direct test when both scalars are alive") {
    // g0 = z + 2 has x, y both nonzero, so no ladder is needed.
    const RationalFn g0{Poly{{cplx{2, 0}, cplx{1, 0}}}, kOne};
    const auto bad = compatibility(g0, RationalFn{kZ, kOne}, 1);
    CHECK_FALSE(bad.compatible);
    CHECK(bad.epsilon_trace.empty());
    CHECK(std::abs(bad.s1) > 1e-6);

    // A pair built to annihilate both cross sums passes the direct test.
    const auto r = abc(MultiPoly::from_univariate(g0.P()),
                       MultiPoly::from_univariate(g0.Q()), {1});
    const auto s = solve_xyk(r.a, r.b, r.c);
    const cplx t0 = std::conj(cplx{2, 0}) / s.x - std::conj(cplx{1, 0}) / s.y;
    const cplx t1 = std::conj(cplx{1, 0}) / s.x;
    MultiPoly rp(1), rq(1);
    rp.set_coeff({0}, t1);
    rp.set_coeff({1}, -t0);
    rq.set_coeff({0}, t1 * 2.0);
    rq.set_coeff({1}, -t0 * 2.0);
    const auto good = compatibility(MultiRationalFn::from_univariate(g0),
                                    MultiRationalFn{rp, rq}, {1});
    CHECK(good.compatible);
    CHECK(good.epsilon_trace.empty());
    CHECK(std::abs(good.s1) < 1e-12);
    CHECK(std::abs(good.s2) < 1e-12);
}

TEST_CASE("priority construction: sum first, product on the side herald") {
    const MultiCircuit mc = synthesize_priority(sum_fn(), product_fn(), {1, 1});
    CHECK(mc.m == 1);
    CHECK(mc.dilation_r == 0.0);
    REQUIRE(mc.U.rows() == 8);
    REQUIRE(mc.scalars.has_value());
    CHECK(std::abs(mc.scalars->a1) < 1e-12);
    CHECK(std::abs(mc.scalars->a3 - cplx{-1, 0}) < 1e-12);
    CHECK(mc.scalars->a2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(mc.scalars->a4) < 1e-12);
    CHECK(mc.scalars->H == doctest::Approx(kR2).epsilon(1e-12));

    // First two rows are bit-identical to the dedicated sum circuit's.
    const Circuit dedicated = synthesize(sum_fn());
    CHECK((mc.rows[0] - dedicated.v0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((mc.rows[1] - dedicated.v1).cwiseAbs().maxCoeff() == 0.0);

    // Pinned third and fourth rows.
    StateVec v2 = StateVec::Zero(8), v3 = StateVec::Zero(8);
    v2[0] = v2[5] = kR2;
    v3[3] = kR2;
    v3[4] = -kR2;
    CHECK((mc.rows[2] - v2).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((mc.rows[3] - v3).cwiseAbs().maxCoeff() < 1e-12);

    // The unitary's leading rows are their bras.
    for (int i = 0; i < 4; ++i)
        CHECK((mc.U.row(i).transpose() -
               mc.rows[size_t(i)].conjugate()).norm() < 1e-12);
    CHECK((mc.U.adjoint() * mc.U -
           Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-10);
}

TEST_CASE("priority branches deliver the dedicated probabilities") {
    const MultiCircuit mc = synthesize_priority(sum_fn(), product_fn(), {1, 1});
    std::mt19937_64 gen(61);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 15; ++trial) {
        const std::vector<ExtComplex> zs{ExtComplex{g(gen), g(gen)},
                                         ExtComplex{g(gen), g(gen)}};
        const auto [b0, b1] = run_multifunctional(mc, zs);
        const double want0 = success_probability(sum_fn(), {1, 1}, zs);
        const double want1 = success_probability(product_fn(), {1, 1}, zs);
        CHECK(std::abs(b0.success_prob - want0) < 1e-10);
        CHECK(std::abs(b1.success_prob - 0.5 * want1) < 1e-10);
        if (b0.success_prob > 1e-8) CHECK(*b0.fidelity >= 1 - 1e-9);
        if (b1.success_prob > 1e-8) CHECK(*b1.fidelity >= 1 - 1e-9);
    }
}

TEST_CASE("priority rows stay orthonormal across compatible pairs") {
    // A univariate pair passing the direct compatibility test: g1's
    // coefficient vectors are built to annihilate both cross sums of
    // g0 = z + 2 (see the compatibility direct-test case).
    const RationalFn zp2{Poly{{cplx{2, 0}, cplx{1, 0}}}, kOne};
    const auto r = abc(MultiPoly::from_univariate(zp2.P()),
                       MultiPoly::from_univariate(zp2.Q()), {1});
    const auto s = solve_xyk(r.a, r.b, r.c);
    const cplx t0 = cplx{2, 0} / s.x - cplx{1, 0} / s.y;
    const cplx t1 = cplx{1, 0} / s.x;
    MultiPoly rp(1), rq(1);
    rp.set_coeff({0}, t1);
    rp.set_coeff({1}, -t0);
    rq.set_coeff({0}, t1 * 2.0);
    rq.set_coeff({1}, -t0 * 2.0);

    struct Case {
        MultiRationalFn g0, g1;
        std::vector<int> ns;
    };
    const std::vector<Case> pairs{
        {sum_fn(), product_fn(), {1, 1}},
        {MultiRationalFn::from_univariate(zp2), MultiRationalFn{rp, rq}, {1}},
        {sum_fn(), product_fn(cplx{2, 1}), {1, 1}},
    };
    for (const auto& [g0, g1, ns] : pairs) {
        const MultiCircuit mc = synthesize_priority(g0, g1, ns);
        for (size_t i = 0; i < 4; ++i)
            for (size_t j = 0; j < 4; ++j) {
                const cplx ip = mc.rows[i].dot(mc.rows[j]);
                const cplx want = i == j ? cplx{1, 0} : cplx{0, 0};
                CHECK(std::abs(ip - want) < 1e-10);
            }
        const long dim = mc.U.rows();
        CHECK((mc.U.adjoint() * mc.U -
               Eigen::MatrixXcd::Identity(dim, dim)).norm() < 1e-10);
    }
}

TEST_CASE("priority refuses incompatible pairs") {
    try {
        synthesize_priority(product_fn(), sum_fn(), {1, 1});
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.kind() == "incompatible");
    }
    CHECK_THROWS_AS(synthesize_priority(RationalFn{kZ, kOne},
                                        RationalFn{kZ, kOne}, 1),
                    InfeasibleError);
    // Arity and degree validation.
    CHECK_THROWS_AS(synthesize_priority(sum_fn(), product_fn(), {1}),
                    InputError);
    CHECK_THROWS_AS(synthesize_priority(sum_fn(), product_fn(), {1, 0}),
                    InputError);
}

TEST_CASE("dilation of a contraction: pinned 1x1 cases") {
    Eigen::MatrixXcd zero(1, 1), one(1, 1);
    zero << 0;
    one << 1;
    Eigen::MatrixXcd X(2, 2), Z(2, 2);
    X << 0, 1, 1, 0;
    Z << 1, 0, 0, -1;
    CHECK((dilation_unitary(zero) - X).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((dilation_unitary(one) - Z).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("dilation of random contractions is unitary with exact corner") {
    std::mt19937_64 gen(62);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> dims(1, 6);
    std::uniform_real_distribution<double> shrink(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int N = dims(gen), M = dims(gen);
        Eigen::MatrixXcd A(N, M);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < M; ++j) A(i, j) = cplx{g(gen), g(gen)};
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
        A *= shrink(gen) / svd.singularValues()[0];
        const Eigen::MatrixXcd U = dilation_unitary(A);
        REQUIRE(U.rows() == N + M);
        CHECK((U * U.adjoint() -
               Eigen::MatrixXcd::Identity(N + M, N + M)).norm() < 1e-10);
        CHECK((U.topLeftCorner(N, M) - A).cwiseAbs().maxCoeff() < 1e-12);
    }

    Eigen::MatrixXcd big(1, 1);
    big << 1.5;
    try {
        dilation_unitary(big);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(e.kind() == "not_contraction");
    }
}

TEST_CASE("dilation circuit: any pair runs, at a probability cost") {
    const MultiCircuit dil = synthesize_dilation(sum_fn(), product_fn(), {1, 1});
    const MultiCircuit pri = synthesize_priority(sum_fn(), product_fn(), {1, 1});
    CHECK(dil.dilation_r == 1.0);
    CHECK(dil.m == 1); // 4 coin dims + 4 heralded rows fit in 8

    std::mt19937_64 gen(63);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<ExtComplex> zs{ExtComplex{g(gen), g(gen)},
                                         ExtComplex{g(gen), g(gen)}};
        const auto [b0, b1] = run_multifunctional(dil, zs);
        if (b0.success_prob > 1e-8) CHECK(*b0.fidelity >= 1 - 1e-9);
        if (b1.success_prob > 1e-8) CHECK(*b1.fidelity >= 1 - 1e-9);
        const auto [p0, p1] = run_multifunctional(pri, zs);
        CHECK(b0.success_prob <= p0.success_prob + 1e-12);
    }

    // The incompatible ordering is exactly what the dilation is for.
    const MultiCircuit rev = synthesize_dilation(product_fn(), sum_fn(), {1, 1});
    const auto [r0, r1] = run_multifunctional(
        rev, {ExtComplex{1, 0}, ExtComplex{1, 0}});
    CHECK(*r0.fidelity >= 1 - 1e-9);
    CHECK(*r1.fidelity >= 1 - 1e-9);
}

TEST_CASE("dilation scale factor trades probability quadratically") {
    const std::vector<ExtComplex> zs{ExtComplex{0.7, 0.2},
                                     ExtComplex{-0.4, 1.1}};
    const MultiCircuit a = synthesize_dilation(sum_fn(), product_fn(), {1, 1});
    const MultiCircuit b =
        synthesize_dilation(sum_fn(), product_fn(), {1, 1}, 2.0);
    CHECK(b.dilation_r == 2.0);
    const auto [a0, a1] = run_multifunctional(a, zs);
    const auto [b0, b1] = run_multifunctional(b, zs);
    CHECK(b0.success_prob == doctest::Approx(a0.success_prob / 4).epsilon(1e-10));
    CHECK(b1.success_prob == doctest::Approx(a1.success_prob / 4).epsilon(1e-10));
    CHECK_THROWS_AS(synthesize_dilation(sum_fn(), product_fn(), {1, 1}, 0.5),
                    InputError);
}

TEST_CASE("dilation treats identical functions symmetrically") {
    const MultiCircuit dil = synthesize_dilation(RationalFn{kZ, kOne},
                                                 RationalFn{kZ, kOne}, 1);
    const auto [b0, b1] =
        run_multifunctional(dil, {ExtComplex{0.7, 0.3}});
    CHECK(b0.success_prob == doctest::Approx(b1.success_prob).epsilon(1e-12));
    CHECK(*b0.fidelity >= 1 - 1e-9);
    CHECK(*b1.fidelity >= 1 - 1e-9);
}

TEST_CASE("dilation heralds the function itself for complex coefficients") {
    // Locks the row convention: the heralded amplitude must be the
    // polynomial's value, not its coefficient-conjugate.
    MultiPoly p0(1), p1(1), q(1);
    p0.set_coeff({1}, cplx{1, 2});
    p1.set_coeff({0}, cplx{0, 1});
    p1.set_coeff({1}, cplx{1, 0});
    q.set_coeff({0}, cplx{1, 0});
    const MultiRationalFn g0{p0, q}, g1{p1, q};
    const MultiCircuit dil = synthesize_dilation(g0, g1, {1});
    for (const cplx z : {cplx{0.5, -0.3}, cplx{1, 1}, cplx{-2, 0.25}}) {
        const auto [b0, b1] = run_multifunctional(dil, {ExtComplex{z}});
        REQUIRE(b0.success_prob > 1e-8);
        REQUIRE(b1.success_prob > 1e-8);
        CHECK(*b0.fidelity >= 1 - 1e-9);
        CHECK(*b1.fidelity >= 1 - 1e-9);
    }
}

TEST_CASE("multifunctional circuits round-trip through JSON") {
    const MultiCircuit pri = synthesize_priority(sum_fn(), product_fn(), {1, 1});
    json jp = multicircuit_to_json(pri);
    CHECK(jp["kind"] == "priority");
    CHECK(jp.contains("scalars"));
    const MultiCircuit pback = multicircuit_from_json(json::parse(jp.dump()));
    CHECK((pback.U - pri.U).cwiseAbs().maxCoeff() == 0.0);
    CHECK(pback.ns == pri.ns);
    REQUIRE(pback.scalars.has_value());
    CHECK(pback.scalars->H == pri.scalars->H);

    const MultiCircuit dil =
        synthesize_dilation(sum_fn(), product_fn(), {1, 1}, 1.5);
    json jd = multicircuit_to_json(dil);
    CHECK(jd["kind"] == "dilation");
    CHECK(jd["r"].get<double>() == 1.5);
    const MultiCircuit dback = multicircuit_from_json(json::parse(jd.dump()));
    CHECK(dback.dilation_r == 1.5);
    CHECK((dback.U - dil.U).cwiseAbs().maxCoeff() == 0.0);

    // Compatibility reports serialize with their trace.
    const auto rep = compatibility(sum_fn(), product_fn(), {1, 1});
    const json jr = compat_to_json(rep);
    CHECK(jr["compatible"].get<bool>());
    CHECK(jr["epsilon_trace"].size() == rep.epsilon_trace.size());
}
