#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "qqbf/multifunc.hpp"
#include "qqbf/poly.hpp"
#include "qqbf/prob.hpp"
#include "qqbf/sim.hpp"
#include "qqbf/synth.hpp"

namespace qqbf {

using json = nlohmann::json;

/// Either flavor of rational function, as parsed from JSON.
using AnyFn = std::variant<RationalFn, MultiRationalFn>;

/// View any parsed function as multivariate (univariate becomes k = 1).
MultiRationalFn to_multi(const AnyFn& f);

// ---- complex scalars ----
json complex_to_json(const cplx& z);              // [re, im]
cplx complex_from_json(const json& j);

/// Parse "re", "re+imi", "re-imi", "imi", "i", "-i", or "inf" (also "Inf",
/// "INF", "∞" is not expected). Throws InputError on anything else.
ExtComplex parse_ext_complex(const std::string& text);
std::string format_ext_complex(const ExtComplex& z);

// ---- polynomials and functions ----
json poly_to_json(const Poly& p);                 // {"coeffs": [[re,im],...]}
Poly poly_from_json(const json& j);
json multipoly_to_json(const MultiPoly& p);       // {"k":…, "terms":[…]}
MultiPoly multipoly_from_json(const json& j);
json fn_to_json(const RationalFn& f);             // {"P":…, "Q":…}
json fn_to_json(const MultiRationalFn& f);
/// Accepts univariate ({"coeffs"}) or multivariate ({"k","terms"}) P/Q.
AnyFn fn_from_json(const json& j);
/// Parse inline JSON text or, when the string starts with '@', the named
/// file's contents.
AnyFn fn_from_arg(const std::string& arg);

// ---- states ----
json statevec_to_json(const StateVec& v);         // {"num_qubits","amps"}
StateVec statevec_from_json(const json& j);

// ---- circuits ----
json circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const json& j);
json multicircuit_to_json(const MultiCircuit& c);
MultiCircuit multicircuit_from_json(const json& j);

// ---- results ----
json simresult_to_json(const SimulationResult& r);
json sample_to_json(const SampleResult& r);
json verify_to_json(const VerifyReport& r);
json compat_to_json(const CompatibilityReport& r);

} // namespace qqbf
