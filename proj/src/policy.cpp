#include "qqbf/policy.hpp"

#include <json.hpp>

#include "qqbf/types.hpp"

namespace qqbf {

NumericPolicy& NumericPolicy::active() {
    static NumericPolicy instance;
    return instance;
}

void load_policy_json(NumericPolicy& p, const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("bad_json", std::string("policy file: ") + e.what());
    }
    if (!j.is_object())
        throw InputError("bad_json", "policy file must be a JSON object");

    for (const auto& [key, val] : j.items()) {
        if (key == "scalar_snap") p.scalar_snap = val.get<double>();
        else if (key == "completion_residual") p.completion_residual = val.get<double>();
        else if (key == "orthonormal") p.orthonormal = val.get<double>();
        else if (key == "resultant") p.resultant = val.get<double>();
        else if (key == "compat") p.compat = val.get<double>();
        else if (key == "compat_eps_first") p.compat_eps_first = val.get<double>();
        else if (key == "compat_eps_count") p.compat_eps_count = val.get<int>();
        else if (key == "compat_endpoint_ratio") p.compat_endpoint_ratio = val.get<double>();
        else if (key == "prob_floor") p.prob_floor = val.get<double>();
        else if (key == "fidelity_slack") p.fidelity_slack = val.get<double>();
        else
            throw InputError("bad_argument", "unknown policy key: " + key);
    }
}

} // namespace qqbf
