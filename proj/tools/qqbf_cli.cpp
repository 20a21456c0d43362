// qqbf — synthesize, simulate, and analyze heralded rational-function
// circuits from the command line. Results are JSON (CSV for sweep); errors
// carry a machine-readable {"error": {"kind", "detail"}} payload on stderr.
//
// Exit codes: 0 success; 2 input validation failure; 3 mathematical
// infeasibility; 4 verification failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qqbf/json_io.hpp"
#include "qqbf/multifunc.hpp"
#include "qqbf/policy.hpp"
#include "qqbf/poly.hpp"
#include "qqbf/prob.hpp"
#include "qqbf/sim.hpp"
#include "qqbf/synth.hpp"

namespace {

using namespace qqbf;

void emit_error(const std::string& kind, const std::string& detail) {
    std::cerr << json{{"error", {{"kind", kind}, {"detail", detail}}}}.dump()
              << "\n";
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw InputError("bad_argument", "cannot write: " + out_path);
    out << text;
    if (text.empty() || text.back() != '\n') out << "\n";
}

std::string slurp(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Inline JSON, @file, or "-" for stdin.
std::string load_text(const std::string& arg) {
    if (arg == "-") return slurp(std::cin);
    if (!arg.empty() && arg.front() == '@') {
        std::ifstream in(arg.substr(1));
        if (!in)
            throw InputError("bad_argument",
                             "cannot read file: " + arg.substr(1));
        return slurp(in);
    }
    return arg;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError("bad_json", e.what());
    }
}

std::vector<int> parse_ns(const std::string& text) {
    std::vector<int> ns;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size() || v < 0) throw std::invalid_argument("");
            ns.push_back(v);
        } catch (const std::exception&) {
            throw InputError("bad_argument",
                             "--n must be a comma-separated list of "
                             "nonnegative integers");
        }
    }
    if (ns.empty())
        throw InputError("bad_argument", "--n must not be empty");
    return ns;
}

std::vector<ExtComplex> parse_point(const std::string& text) {
    std::vector<ExtComplex> zs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) zs.push_back(parse_ext_complex(item));
    if (zs.empty()) throw InputError("bad_argument", "empty point");
    return zs;
}

/// Semicolon-separated points, each a comma-separated coordinate list.
std::vector<std::vector<ExtComplex>> parse_grid_points(const std::string& text) {
    std::vector<std::vector<ExtComplex>> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) grid.push_back(parse_point(item));
    if (grid.empty()) throw InputError("bad_argument", "empty grid");
    return grid;
}

/// Default verification grid: the cross product of a small set of
/// representative coordinates (origin, unit reals, a unit imaginary, a
/// generic complex point, infinity) over all variables.
std::vector<std::vector<ExtComplex>> default_grid(int k) {
    const std::vector<ExtComplex> axis = {
        ExtComplex{0.0, 0.0},  ExtComplex{1.0, 0.0}, ExtComplex{-1.0, 0.0},
        ExtComplex{0.0, 1.0},  ExtComplex{2.0, 0.5}, ExtComplex::infinity()};
    std::vector<std::vector<ExtComplex>> grid{{}};
    for (int v = 0; v < k; ++v) {
        std::vector<std::vector<ExtComplex>> next;
        for (const auto& partial : grid)
            for (const auto& z : axis) {
                auto p = partial;
                p.push_back(z);
                next.push_back(std::move(p));
            }
        grid = std::move(next);
    }
    return grid;
}

double parse_plain_double(const std::string& text) {
    try {
        size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw InputError("bad_argument", "not a number: " + text);
    }
}

/// "lo:hi:count[:log]" or a comma-separated list of values.
std::vector<double> parse_param_grid(const std::string& text) {
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(item);
        if (parts.size() != 3 && parts.size() != 4)
            throw InputError("bad_argument",
                             "--grid range form is lo:hi:count[:log]");
        const double lo = parse_plain_double(parts[0]);
        const double hi = parse_plain_double(parts[1]);
        const int count = static_cast<int>(parse_plain_double(parts[2]));
        const bool logspace = parts.size() == 4;
        if (logspace && parts[3] != "log")
            throw InputError("bad_argument",
                             "--grid range form is lo:hi:count[:log]");
        if (count < 1)
            throw InputError("bad_argument", "--grid needs at least 1 point");
        if (logspace && (lo <= 0.0 || hi <= 0.0))
            throw InputError("bad_argument",
                             "log spacing needs positive endpoints");
        std::vector<double> out;
        for (int i = 0; i < count; ++i) {
            const double t =
                count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            out.push_back(logspace
                              ? lo * std::pow(hi / lo, t)
                              : lo + (hi - lo) * t);
        }
        return out;
    }
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_plain_double(item));
    if (out.empty()) throw InputError("bad_argument", "empty --grid");
    return out;
}

/// ns for a function: the --n flag when given, per-variable degrees
/// otherwise.
std::vector<int> resolve_ns(const AnyFn& fn, const std::string& n_arg) {
    if (!n_arg.empty()) return parse_ns(n_arg);
    return to_multi(fn).degrees();
}

/// Elementwise max of the two functions' degrees when --n is absent.
std::vector<int> resolve_pair_ns(const AnyFn& g0, const AnyFn& g1,
                                 const std::string& n_arg) {
    if (!n_arg.empty()) return parse_ns(n_arg);
    const auto d0 = to_multi(g0).degrees();
    const auto d1 = to_multi(g1).degrees();
    if (d0.size() != d1.size())
        throw InputError("dimension_mismatch",
                         "the two functions have different variable counts");
    std::vector<int> ns(d0.size());
    for (size_t i = 0; i < ns.size(); ++i) ns[i] = std::max(d0[i], d1[i]);
    return ns;
}

Circuit synth_from_fn(const AnyFn& fn, const std::string& n_arg) {
    if (std::holds_alternative<RationalFn>(fn)) {
        const auto& rf = std::get<RationalFn>(fn);
        if (n_arg.empty()) return synthesize(rf);
        return synthesize(rf, parse_ns(n_arg));
    }
    const auto& mf = std::get<MultiRationalFn>(fn);
    if (n_arg.empty()) return synthesize(mf);
    return synthesize(mf, parse_ns(n_arg));
}

void add_policy_flags(CLI::App* sub) {
    auto bind = [sub](const char* flag, double NumericPolicy::* field,
                      const char* help) {
        sub->add_option_function<double>(
            flag, [field](double v) { NumericPolicy::active().*field = v; },
            help);
    };
    bind("--tol-scalar-snap", &NumericPolicy::scalar_snap,
         "Degeneracy snap threshold in the scalar solve");
    bind("--tol-completion", &NumericPolicy::completion_residual,
         "Minimum residual norm for completion directions");
    bind("--tol-orthonormal", &NumericPolicy::orthonormal,
         "Orthonormality / unitarity tolerance");
    bind("--tol-resultant", &NumericPolicy::resultant,
         "Coprimality threshold on the normalized resultant");
    bind("--tol-compat", &NumericPolicy::compat,
         "Compatibility cross-sum threshold");
    bind("--tol-prob-floor", &NumericPolicy::prob_floor,
         "Herald probability below which fidelity is not checked");
    bind("--tol-fidelity", &NumericPolicy::fidelity_slack,
         "Verification demands fidelity >= 1 - this");
}

} // namespace

int main(int argc, char** argv) {
    if (const char* policy_path = std::getenv("QQBF_NUM_POLICY")) {
        try {
            std::ifstream in(policy_path);
            if (!in)
                throw InputError("bad_argument",
                                 std::string("cannot read policy file: ") +
                                     policy_path);
            load_policy_json(NumericPolicy::active(), slurp(in));
        } catch (const Error& e) {
            emit_error(e.kind(), e.what());
            return 2;
        }
    }

    CLI::App app{"Synthesis and verification toolkit for heralded circuits "
                 "that map coin states |z> to |f(z)> for rational f"};
    app.require_subcommand(1);

    std::string fn_arg, g0_arg, g1_arg, n_arg, z_arg, grid_arg, circuit_arg;
    std::string target_arg, ensemble_arg = "uniform", out_path;
    int m_override = -1;
    std::uint64_t shots = 0, seed = 1;
    double w = 0.0, r_scale = 1.0;
    int n_min = -1, n_max = -1;
    int exit_code = 0;

    // ---- synth ----
    auto* synth = app.add_subcommand(
        "synth", "Synthesize a heralded circuit for a rational function");
    synth->add_option("--fn", fn_arg, "Function as JSON or @file")->required();
    synth->add_option("--n", n_arg, "Per-variable qubit counts (CSV)");
    synth->add_option("--m", m_override,
                      "Expected ancilla count (validated, not forced)");
    synth->add_option("--out", out_path, "Output path (default stdout)");
    add_policy_flags(synth);
    synth->callback([&] {
        Circuit c = synth_from_fn(fn_from_arg(fn_arg), n_arg);
        if (m_override >= 0 && m_override != c.m)
            throw InputError("bad_argument",
                             "--m " + std::to_string(m_override) +
                                 " conflicts with the required ancilla count " +
                                 std::to_string(c.m));
        write_output(circuit_to_json(c).dump(2), out_path);
    });

    // ---- run ----
    auto* run_cmd = app.add_subcommand(
        "run", "Exact post-selected execution at one point");
    run_cmd->add_option("--circuit", circuit_arg,
                        "Circuit JSON, @file, or - for stdin");
    run_cmd->add_option("--fn", fn_arg, "Synthesize this function in-process");
    run_cmd->add_option("--n", n_arg, "Qubit counts when --fn is used");
    run_cmd->add_option("--z", z_arg, "Point: comma-separated coordinates, "
                                      "each re, re+imi, imi, or inf")
        ->required();
    run_cmd->add_option("--target", target_arg,
                        "Report fidelity against this function");
    run_cmd->add_option("--out", out_path, "Output path (default stdout)");
    add_policy_flags(run_cmd);
    run_cmd->callback([&] {
        const auto zs = parse_point(z_arg);
        std::optional<MultiRationalFn> target;
        if (!target_arg.empty()) target = to_multi(fn_from_arg(target_arg));
        if (!fn_arg.empty()) {
            const Circuit c = synth_from_fn(fn_from_arg(fn_arg), n_arg);
            write_output(simresult_to_json(run(c, zs, target)).dump(2),
                         out_path);
            return;
        }
        const json cj = parse_json(load_text(
            circuit_arg.empty() ? std::string("-") : circuit_arg));
        if (cj.contains("kind")) {
            MultiCircuit mc = multicircuit_from_json(cj);
            const auto res = run_multifunctional(mc, zs);
            write_output(json{{"branches",
                               json::array({simresult_to_json(res[0]),
                                            simresult_to_json(res[1])})}}
                             .dump(2),
                         out_path);
            return;
        }
        const Circuit c = circuit_from_json(cj);
        write_output(simresult_to_json(run(c, zs, target)).dump(2), out_path);
    });

    // ---- sample ----
    auto* sample_cmd = app.add_subcommand(
        "sample", "Seeded measurement statistics at one point");
    sample_cmd->add_option("--circuit", circuit_arg,
                           "Circuit JSON, @file, or - for stdin");
    sample_cmd->add_option("--fn", fn_arg,
                           "Synthesize this function in-process");
    sample_cmd->add_option("--n", n_arg, "Qubit counts when --fn is used");
    sample_cmd->add_option("--z", z_arg, "Point (see run --z)")->required();
    sample_cmd->add_option("--shots", shots, "Number of shots")->required();
    sample_cmd->add_option("--seed", seed, "RNG seed (default 1)");
    sample_cmd->add_option("--out", out_path, "Output path (default stdout)");
    add_policy_flags(sample_cmd);
    sample_cmd->callback([&] {
        const auto zs = parse_point(z_arg);
        if (!fn_arg.empty()) {
            const Circuit c = synth_from_fn(fn_from_arg(fn_arg), n_arg);
            write_output(sample_to_json(sample(c, zs, shots, seed)).dump(2),
                         out_path);
            return;
        }
        const json cj = parse_json(load_text(
            circuit_arg.empty() ? std::string("-") : circuit_arg));
        const SampleResult res =
            cj.contains("kind")
                ? sample(multicircuit_from_json(cj), zs, shots, seed)
                : sample(circuit_from_json(cj), zs, shots, seed);
        write_output(sample_to_json(res).dump(2), out_path);
    });

    // ---- verify ----
    auto* verify_cmd = app.add_subcommand(
        "verify", "Synthesize and check a circuit against its function "
                  "over a grid of points");
    verify_cmd->add_option("--fn", fn_arg, "Function as JSON or @file")
        ->required();
    verify_cmd->add_option("--n", n_arg, "Per-variable qubit counts (CSV)");
    verify_cmd->add_option("--grid", grid_arg,
                           "Semicolon-separated points (default: a built-in "
                           "grid crossing 0, ±1, i, 2+0.5i, inf per variable)");
    verify_cmd->add_option("--out", out_path, "Output path (default stdout)");
    add_policy_flags(verify_cmd);
    verify_cmd->callback([&] {
        const AnyFn fn = fn_from_arg(fn_arg);
        const MultiRationalFn mf = to_multi(fn);
        const Circuit c = synth_from_fn(fn, n_arg);
        const auto grid = grid_arg.empty() ? default_grid(mf.k())
                                           : parse_grid_points(grid_arg);
        const VerifyReport report = verify(c, mf, grid);
        write_output(verify_to_json(report).dump(2), out_path);
        if (!report.pass) {
            emit_error("verification",
                       std::to_string(report.failures.size()) +
                           " grid point(s) failed");
            exit_code = 4;
        }
    });

    // ---- prob ----
    auto* prob_cmd = app.add_subcommand(
        "prob", "Closed-form herald probability at a point, or its "
                "ensemble mean");
    prob_cmd->add_option("--fn", fn_arg, "Function as JSON or @file")
        ->required();
    prob_cmd->add_option("--n", n_arg, "Per-variable qubit counts (CSV)");
    prob_cmd->add_option("--z", z_arg, "Point (omit to get an ensemble mean)");
    prob_cmd->add_option("--w", w, "Junk-direction weight (default 0, "
                                   "which is optimal)");
    prob_cmd->add_option("--ensemble", ensemble_arg,
                         "uniform or covariant (mean mode)");
    prob_cmd->add_option("--out", out_path, "Output path (default stdout)");
    add_policy_flags(prob_cmd);
    prob_cmd->callback([&] {
        const AnyFn fn = fn_from_arg(fn_arg);
        const auto ns = resolve_ns(fn, n_arg);
        if (!z_arg.empty()) {
            const double pr =
                success_probability(to_multi(fn), ns, parse_point(z_arg), w);
            write_output(json{{"success_prob", pr}}.dump(2), out_path);
            return;
        }
        if (!std::holds_alternative<RationalFn>(fn))
            throw InputError("bad_argument",
                             "ensemble means are univariate only");
        if (ns.size() != 1)
            throw InputError("bad_argument",
                             "--n must be a single integer for means");
        const auto& rf = std::get<RationalFn>(fn);
        const Ensemble e = ensemble_from_string(ensemble_arg);
        const double mean = e == Ensemble::uniform
                                ? mean_uniform(rf, ns[0])
                                : mean_covariant(rf, ns[0]);
        write_output(json{{"mean_prob", mean},
                          {"ensemble", to_string(e)},
                          {"n", ns[0]}}
                         .dump(2),
                     out_path);
    });

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Tabulate ensemble means over a parameter grid and a qubit "
                 "range (CSV)");
    sweep_cmd->add_option("--fn", fn_arg,
                          "Univariate base function; the parameter scales "
                          "its numerator")
        ->required();
    sweep_cmd->add_option("--grid", grid_arg,
                          "Parameter values: lo:hi:count[:log] or CSV")
        ->required();
    sweep_cmd->add_option("--n-min", n_min, "Smallest qubit count "
                                            "(default: the degree)");
    sweep_cmd->add_option("--n-max", n_max, "Largest qubit count "
                                            "(default: degree + 3)");
    sweep_cmd->add_option("--ensemble", ensemble_arg,
                          "uniform or covariant (default uniform)");
    sweep_cmd->add_option("--out", out_path, "Output path (default stdout)");
    add_policy_flags(sweep_cmd);
    sweep_cmd->callback([&] {
        const AnyFn fn = fn_from_arg(fn_arg);
        if (!std::holds_alternative<RationalFn>(fn))
            throw InputError("bad_argument", "sweep is univariate only");
        const auto& rf = std::get<RationalFn>(fn);
        const int lo = n_min >= 0 ? n_min : std::max(rf.degree(), 1);
        const int hi = n_max >= 0 ? n_max : std::max(rf.degree(), 1) + 3;
        const auto rows = sweep(rf, parse_param_grid(grid_arg), lo, hi,
                                ensemble_from_string(ensemble_arg));
        write_output(sweep_csv(rows), out_path);
    });

    // ---- compat ----
    auto* compat_cmd = app.add_subcommand(
        "compat", "Test whether g1 can ride on g0's circuit at full "
                  "priority (the report is the answer; both verdicts exit 0)");
    compat_cmd->add_option("--g0", g0_arg, "Priority function (JSON or @file)")
        ->required();
    compat_cmd->add_option("--g1", g1_arg, "Secondary function")->required();
    compat_cmd->add_option("--n", n_arg, "Per-variable qubit counts (CSV)");
    compat_cmd->add_option("--out", out_path, "Output path (default stdout)");
    add_policy_flags(compat_cmd);
    compat_cmd->callback([&] {
        const AnyFn g0 = fn_from_arg(g0_arg);
        const AnyFn g1 = fn_from_arg(g1_arg);
        const auto ns = resolve_pair_ns(g0, g1, n_arg);
        const auto report = compatibility(to_multi(g0), to_multi(g1), ns);
        write_output(compat_to_json(report).dump(2), out_path);
    });

    // ---- multifunc ----
    auto* multifunc_cmd = app.add_subcommand(
        "multifunc", "Build the priority circuit: g0 at its dedicated "
                     "probability, g1 on the alternate herald");
    multifunc_cmd
        ->add_option("--g0", g0_arg, "Priority function (JSON or @file)")
        ->required();
    multifunc_cmd->add_option("--g1", g1_arg, "Secondary function")
        ->required();
    multifunc_cmd->add_option("--n", n_arg, "Per-variable qubit counts (CSV)");
    multifunc_cmd->add_option("--out", out_path, "Output path (default stdout)");
    add_policy_flags(multifunc_cmd);
    multifunc_cmd->callback([&] {
        const AnyFn g0 = fn_from_arg(g0_arg);
        const AnyFn g1 = fn_from_arg(g1_arg);
        const auto ns = resolve_pair_ns(g0, g1, n_arg);
        const MultiCircuit mc =
            synthesize_priority(to_multi(g0), to_multi(g1), ns);
        write_output(multicircuit_to_json(mc).dump(2), out_path);
    });

    // ---- dilate ----
    auto* dilate_cmd = app.add_subcommand(
        "dilate", "Build the dilation circuit for any function pair "
                  "(no compatibility required, lower success probability)");
    dilate_cmd->add_option("--g0", g0_arg, "First function (JSON or @file)")
        ->required();
    dilate_cmd->add_option("--g1", g1_arg, "Second function")->required();
    dilate_cmd->add_option("--n", n_arg, "Per-variable qubit counts (CSV)");
    dilate_cmd->add_option("--r", r_scale,
                           "Extra contraction factor >= 1 (default 1)");
    dilate_cmd->add_option("--out", out_path, "Output path (default stdout)");
    add_policy_flags(dilate_cmd);
    dilate_cmd->callback([&] {
        const AnyFn g0 = fn_from_arg(g0_arg);
        const AnyFn g1 = fn_from_arg(g1_arg);
        const auto ns = resolve_pair_ns(g0, g1, n_arg);
        const MultiCircuit mc =
            synthesize_dilation(to_multi(g0), to_multi(g1), ns, r_scale);
        write_output(multicircuit_to_json(mc).dump(2), out_path);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) return 0;
        emit_error("bad_argument", e.what());
        return 2;
    } catch (const InfeasibleError& e) {
        emit_error(e.kind(), e.what());
        return 3;
    } catch (const VerificationError& e) {
        emit_error(e.kind(), e.what());
        return 4;
    } catch (const Error& e) {
        emit_error(e.kind(), e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 2;
    }
    return exit_code;
}
