#include "qqbf/json_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qqbf {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw InputError("bad_json",
                         std::string("missing field \"") + key + "\"");
    return j.at(key);
}

double number_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number())
        throw InputError("bad_json",
                         std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

int int_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer())
        throw InputError("bad_json", std::string("field \"") + key +
                                         "\" must be an integer");
    return v.get<int>();
}

double parse_double(const std::string& text) {
    try {
        size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw InputError("bad_argument",
                             "trailing characters in number: " + text);
        return v;
    } catch (const InputError&) {
        throw;
    } catch (const std::exception&) {
        throw InputError("bad_argument", "not a number: " + text);
    }
}

} // namespace

MultiRationalFn to_multi(const AnyFn& f) {
    if (std::holds_alternative<RationalFn>(f))
        return MultiRationalFn::from_univariate(std::get<RationalFn>(f));
    return std::get<MultiRationalFn>(f);
}

json complex_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
        !j[1].is_number())
        throw InputError("bad_json", "a complex number is a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

ExtComplex parse_ext_complex(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw InputError("bad_argument", "empty number");

    std::string lower = s;
    for (char& ch : lower) ch = static_cast<char>(std::tolower(
        static_cast<unsigned char>(ch)));
    if (lower == "inf" || lower == "+inf" || lower == "infinity")
        return ExtComplex::infinity();

    if (s.back() != 'i' && s.back() != 'I')
        return ExtComplex{cplx{parse_double(s), 0.0}};

    // Something with an imaginary tail: split at the last sign that is not
    // part of an exponent and not the leading sign.
    const std::string body = s.substr(0, s.size() - 1);
    size_t split = std::string::npos;
    for (size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') &&
            body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto imag_of = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_double(t);
    };
    if (split == std::string::npos)
        return ExtComplex{cplx{0.0, imag_of(body)}};
    return ExtComplex{cplx{parse_double(body.substr(0, split)),
                           imag_of(body.substr(split))}};
}

std::string format_ext_complex(const ExtComplex& z) {
    if (z.is_inf) return "inf";
    const double re = z.value.real(), im = z.value.imag();
    if (im == 0.0) return fmt_double(re);
    if (re == 0.0) return fmt_double(im) + "i";
    return fmt_double(re) + (im < 0.0 ? "-" : "+") + fmt_double(std::abs(im)) +
           "i";
}

json poly_to_json(const Poly& p) {
    json coeffs = json::array();
    for (const cplx& c : p.coeffs()) coeffs.push_back(complex_to_json(c));
    return json{{"coeffs", coeffs}};
}

Poly poly_from_json(const json& j) {
    const json& coeffs = field(j, "coeffs");
    if (!coeffs.is_array() || coeffs.empty())
        throw InputError("bad_json", "\"coeffs\" must be a nonempty array");
    std::vector<cplx> cs;
    cs.reserve(coeffs.size());
    for (const json& c : coeffs) cs.push_back(complex_from_json(c));
    return Poly{std::move(cs)};
}

json multipoly_to_json(const MultiPoly& p) {
    json terms = json::array();
    for (const auto& [J, v] : p.terms())
        terms.push_back(
            json{{"index", J}, {"re", v.real()}, {"im", v.imag()}});
    return json{{"k", p.k()}, {"terms", terms}};
}

MultiPoly multipoly_from_json(const json& j) {
    const int k = int_field(j, "k");
    if (k < 1) throw InputError("bad_json", "\"k\" must be at least 1");
    const json& terms = field(j, "terms");
    if (!terms.is_array())
        throw InputError("bad_json", "\"terms\" must be an array");
    MultiPoly p{k};
    for (const json& t : terms) {
        const json& idx = field(t, "index");
        if (!idx.is_array() || static_cast<int>(idx.size()) != k)
            throw InputError("bad_json",
                             "term \"index\" must list one power per variable");
        std::vector<int> J;
        J.reserve(idx.size());
        for (const json& e : idx) {
            if (!e.is_number_integer())
                throw InputError("bad_json", "term powers must be integers");
            J.push_back(e.get<int>());
        }
        p.set_coeff(J, cplx{number_field(t, "re"), number_field(t, "im")});
    }
    return p;
}

json fn_to_json(const RationalFn& f) {
    return json{{"P", poly_to_json(f.P())}, {"Q", poly_to_json(f.Q())}};
}

json fn_to_json(const MultiRationalFn& f) {
    return json{{"P", multipoly_to_json(f.P())},
                {"Q", multipoly_to_json(f.Q())}};
}

AnyFn fn_from_json(const json& j) {
    const json& P = field(j, "P");
    const json& Q = field(j, "Q");
    if (P.is_object() && P.contains("coeffs")) {
        if (!Q.contains("coeffs"))
            throw InputError("bad_json",
                             "\"P\" and \"Q\" must be the same flavor");
        return RationalFn{poly_from_json(P), poly_from_json(Q)};
    }
    return MultiRationalFn{multipoly_from_json(P), multipoly_from_json(Q)};
}

AnyFn fn_from_arg(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg.front() == '@') {
        std::ifstream in(arg.substr(1));
        if (!in)
            throw InputError("bad_argument",
                             "cannot read file: " + arg.substr(1));
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError("bad_json", e.what());
    }
    return fn_from_json(j);
}

json statevec_to_json(const StateVec& v) {
    int nq = 0;
    while ((1L << nq) < v.size()) ++nq;
    json amps = json::array();
    for (long i = 0; i < v.size(); ++i) amps.push_back(complex_to_json(v[i]));
    return json{{"num_qubits", nq}, {"amps", amps}};
}

StateVec statevec_from_json(const json& j) {
    const int nq = int_field(j, "num_qubits");
    if (nq < 1 || nq > kMaxQubits)
        throw InputError("bad_json", "unsupported qubit count");
    const json& amps = field(j, "amps");
    if (!amps.is_array() || static_cast<long>(amps.size()) != (1L << nq))
        throw InputError("bad_json",
                         "\"amps\" must hold exactly 2^num_qubits entries");
    StateVec v(1L << nq);
    for (long i = 0; i < v.size(); ++i)
        v[i] = complex_from_json(amps[static_cast<size_t>(i)]);
    return v;
}

namespace {

json matrix_to_json(const Eigen::MatrixXcd& U) {
    json rows = json::array();
    for (long i = 0; i < U.rows(); ++i) {
        json row = json::array();
        for (long j = 0; j < U.cols(); ++j)
            row.push_back(complex_to_json(U(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXcd matrix_from_json(const json& j, long dim) {
    if (!j.is_array() || static_cast<long>(j.size()) != dim)
        throw InputError("bad_json", "unitary has the wrong row count");
    Eigen::MatrixXcd U(dim, dim);
    for (long r = 0; r < dim; ++r) {
        const json& row = j[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<long>(row.size()) != dim)
            throw InputError("bad_json", "unitary has a wrong-length row");
        for (long c = 0; c < dim; ++c)
            U(r, c) = complex_from_json(row[static_cast<size_t>(c)]);
    }
    return U;
}

std::vector<int> ns_from_json(const json& j) {
    const json& ns = field(j, "ns");
    if (!ns.is_array() || ns.empty())
        throw InputError("bad_json", "\"ns\" must be a nonempty array");
    std::vector<int> out;
    out.reserve(ns.size());
    for (const json& e : ns) {
        if (!e.is_number_integer() || e.get<int>() < 0)
            throw InputError("bad_json",
                             "\"ns\" entries must be nonnegative integers");
        out.push_back(e.get<int>());
    }
    return out;
}

long circuit_dim(const std::vector<int>& ns, int m) {
    int total = m;
    for (int n : ns) total += n;
    if (total < 1 || total > kMaxQubits)
        throw InputError("bad_json", "unsupported register size");
    return 1L << total;
}

void check_bit_order(const json& j) {
    if (field(j, "bit_order").get<std::string>() != "lsb-first")
        throw InputError("bad_json",
                         "\"bit_order\" must be \"lsb-first\"");
}

} // namespace

json circuit_to_json(const Circuit& c) {
    const auto& s = c.scalars;
    return json{{"k", c.k},
                {"ns", c.ns},
                {"m", c.m},
                {"bit_order", "lsb-first"},
                {"unitary", matrix_to_json(c.U)},
                {"scalars",
                 json{{"a", s.a},
                      {"b", s.b},
                      {"c", complex_to_json(s.c)},
                      {"l", s.l},
                      {"x", s.x},
                      {"y", complex_to_json(s.y)},
                      {"K", s.K},
                      {"w", s.w}}}};
}

Circuit circuit_from_json(const json& j) {
    check_bit_order(j);
    Circuit c;
    c.k = int_field(j, "k");
    c.ns = ns_from_json(j);
    c.m = int_field(j, "m");
    if (c.k != static_cast<int>(c.ns.size()))
        throw InputError("bad_json", "\"k\" must match the length of \"ns\"");
    if (c.m < 0) throw InputError("bad_json", "\"m\" must be nonnegative");
    const long dim = circuit_dim(c.ns, c.m);
    c.U = matrix_from_json(field(j, "unitary"), dim);
    const json& s = field(j, "scalars");
    c.scalars.a = number_field(s, "a");
    c.scalars.b = number_field(s, "b");
    c.scalars.c = complex_from_json(field(s, "c"));
    c.scalars.l = number_field(s, "l");
    c.scalars.x = number_field(s, "x");
    c.scalars.y = complex_from_json(field(s, "y"));
    c.scalars.K = number_field(s, "K");
    c.scalars.w = number_field(s, "w");
    c.v0 = c.U.row(0).conjugate().transpose();
    c.v1 = c.U.row(1).conjugate().transpose();
    return c;
}

json multicircuit_to_json(const MultiCircuit& c) {
    json j{{"k", c.k},
           {"ns", c.ns},
           {"m", c.m},
           {"bit_order", "lsb-first"},
           {"unitary", matrix_to_json(c.U)}};
    if (c.scalars) {
        const auto& s = *c.scalars;
        j["kind"] = "priority";
        j["scalars"] = json{{"a1", complex_to_json(s.a1)},
                            {"a2", s.a2},
                            {"a3", complex_to_json(s.a3)},
                            {"a4", complex_to_json(s.a4)},
                            {"H", s.H}};
    } else {
        j["kind"] = "dilation";
        j["r"] = c.dilation_r;
    }
    return j;
}

MultiCircuit multicircuit_from_json(const json& j) {
    check_bit_order(j);
    MultiCircuit c;
    c.k = int_field(j, "k");
    c.ns = ns_from_json(j);
    c.m = int_field(j, "m");
    if (c.k != static_cast<int>(c.ns.size()))
        throw InputError("bad_json", "\"k\" must match the length of \"ns\"");
    if (c.m < 0) throw InputError("bad_json", "\"m\" must be nonnegative");
    const long dim = circuit_dim(c.ns, c.m);
    if (dim < 4)
        throw InputError("bad_json",
                         "a two-function circuit needs at least two qubits");
    c.U = matrix_from_json(field(j, "unitary"), dim);
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "priority") {
        const json& s = field(j, "scalars");
        c.scalars = PriorityScalars{complex_from_json(field(s, "a1")),
                                    number_field(s, "a2"),
                                    complex_from_json(field(s, "a3")),
                                    complex_from_json(field(s, "a4")),
                                    number_field(s, "H")};
    } else if (kind == "dilation") {
        c.dilation_r = number_field(j, "r");
    } else {
        throw InputError("bad_json",
                         "\"kind\" must be \"priority\" or \"dilation\"");
    }
    for (int i = 0; i < 4; ++i)
        c.rows[static_cast<size_t>(i)] = c.U.row(i).conjugate().transpose();
    return c;
}

json simresult_to_json(const SimulationResult& r) {
    json j{{"success_prob", r.success_prob},
           {"output", json::array({complex_to_json(r.output[0]),
                                   complex_to_json(r.output[1])})}};
    if (r.fidelity) j["fidelity"] = *r.fidelity;
    return j;
}

json sample_to_json(const SampleResult& r) {
    json branches = json::array();
    for (const auto& b : r.branches)
        branches.push_back(json{
            {"herald", b.herald},
            {"output", json::array({b.output[0], b.output[1]})}});
    return json{{"shots", r.shots},
                {"herald_successes", r.herald_successes},
                {"seed", r.rng_seed},
                {"branches", branches}};
}

json verify_to_json(const VerifyReport& r) {
    json failures = json::array();
    for (const auto& f : r.failures) {
        json zs = json::array();
        for (const auto& z : f.zs) zs.push_back(format_ext_complex(z));
        failures.push_back(json{{"z", zs},
                                {"success_prob", f.success_prob},
                                {"fidelity", f.fidelity},
                                {"reason", f.reason}});
    }
    return json{{"pass", r.pass}, {"failures", failures}};
}

json compat_to_json(const CompatibilityReport& r) {
    json trace = json::array();
    for (const auto& [eps, s1, s2] : r.epsilon_trace)
        trace.push_back(json{{"epsilon", eps},
                             {"s1", complex_to_json(s1)},
                             {"s2", complex_to_json(s2)}});
    return json{{"compatible", r.compatible},
                {"s1", complex_to_json(r.s1)},
                {"s2", complex_to_json(r.s2)},
                {"epsilon_trace", trace}};
}

} // namespace qqbf
