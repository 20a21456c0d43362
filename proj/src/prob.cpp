#include "qqbf/prob.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qqbf/policy.hpp"
#include "qqbf/synth.hpp"

namespace qqbf {

std::string to_string(Ensemble e) {
    return e == Ensemble::uniform ? "uniform" : "covariant";
}

Ensemble ensemble_from_string(const std::string& s) {
    if (s == "uniform") return Ensemble::uniform;
    if (s == "covariant") return Ensemble::covariant;
    throw InputError("bad_argument", "unknown ensemble: " + s);
}

std::pair<cplx, cplx> boundary_eval(const MultiPoly& P, const MultiPoly& Q,
                                    const std::vector<int>& ns,
                                    const std::vector<ExtComplex>& zs) {
    if (zs.size() != ns.size())
        throw InputError("dimension_mismatch",
                         "evaluation point has wrong variable count");
    auto value = [&](const MultiPoly& poly) {
        cplx acc{0.0, 0.0};
        for (const auto& [J, coef] : poly.terms()) {
            cplx t = coef;
            bool keep = true;
            for (size_t i = 0; i < zs.size() && keep; ++i) {
                if (zs[i].is_inf) {
                    keep = J[i] == ns[i]; // only the top-degree slice survives
                } else {
                    for (int p = 0; p < J[i]; ++p) t *= zs[i].value;
                }
            }
            if (keep) acc += t;
        }
        return acc;
    };
    return {value(P), value(Q)};
}

namespace {

double success_probability_core(const MultiPoly& P, const MultiPoly& Q,
                                const std::vector<int>& ns,
                                const std::vector<ExtComplex>& zs, double w) {
    const auto [a, b, c] = abc(P, Q, ns);
    const double w2 = w * w;
    const double l = std::hypot(w2 + a - b, 2.0 * std::abs(c));
    const auto [pv, qv] = boundary_eval(P, Q, ns, zs);
    double den = 1.0;
    for (size_t i = 0; i < zs.size(); ++i)
        if (!zs[i].is_inf)
            den *= std::pow(1.0 + std::norm(zs[i].value), ns[i]);
    return 2.0 * (std::norm(pv) + std::norm(qv)) / (den * (l + w2 + a + b));
}

} // namespace

double success_probability(const MultiRationalFn& f, const std::vector<int>& ns,
                           const std::vector<ExtComplex>& zs, double w) {
    return success_probability_core(f.P(), f.Q(), ns, zs, w);
}

double success_probability(const RationalFn& f, int n, const ExtComplex& z,
                           double w) {
    return success_probability_core(MultiPoly::from_univariate(f.P()),
                                    MultiPoly::from_univariate(f.Q()), {n},
                                    {z}, w);
}

double success_probability(const PaddedFn& f, const ExtComplex& z) {
    return success_probability_core(MultiPoly::from_univariate(f.P),
                                    MultiPoly::from_univariate(f.Q),
                                    {f.target_n}, {z}, 0.0);
}

double mean_uniform(const RationalFn& f, int n) {
    const auto [a, b, c] = abc(MultiPoly::from_univariate(f.P()),
                               MultiPoly::from_univariate(f.Q()), {n});
    const double l = std::hypot(a - b, 2.0 * std::abs(c));
    return 2.0 * (a + b) / ((n + 1) * (l + a + b));
}

double mean_covariant(const RationalFn& f, int n) {
    const auto [a, b, c] = abc(MultiPoly::from_univariate(f.P()),
                               MultiPoly::from_univariate(f.Q()), {n});
    const double l = std::hypot(a - b, 2.0 * std::abs(c));
    double s = 0.0;
    for (const auto& coef : f.P().coeffs()) s += std::norm(coef);
    for (const auto& coef : f.Q().coeffs()) s += std::norm(coef);
    return 2.0 * s / (std::pow(2.0, n) * (l + a + b));
}

std::vector<SweepRow> sweep(const RationalFn& base,
                            const std::vector<double>& params, int n_min,
                            int n_max, Ensemble ensemble) {
    if (params.empty())
        throw InputError("bad_argument", "empty parameter grid");
    if (n_min > n_max)
        throw InputError("bad_argument", "empty qubit range");
    if (n_min < base.degree())
        throw InputError("degree_mismatch",
                         "qubit range must start at the function's degree");

    std::vector<double> ps = params;
    std::sort(ps.begin(), ps.end());

    std::vector<SweepRow> rows;
    for (double p : ps) {
        const RationalFn f(base.P() * cplx{p, 0.0}, base.Q());
        const size_t begin = rows.size();
        double best = -1.0;
        int best_n = n_min;
        for (int n = n_min; n <= n_max; ++n) {
            const double mean = ensemble == Ensemble::uniform
                                    ? mean_uniform(f, n)
                                    : mean_covariant(f, n);
            rows.push_back(SweepRow{p, n, ensemble, mean, false});
            if (mean > best) {
                best = mean;
                best_n = n;
            }
        }
        for (size_t i = begin; i < rows.size(); ++i)
            rows[i].is_argmax = rows[i].n == best_n;
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "param,n,ensemble,mean_prob,is_argmax\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", r.param);
        os << buf << ',' << r.n << ',' << to_string(r.ensemble) << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.mean_prob);
        os << buf << ',' << (r.is_argmax ? 1 : 0) << '\n';
    }
    return os.str();
}

} // namespace qqbf
