#pragma once

#include <json.hpp>

#include "lyaplab/distribution.hpp"
#include "lyaplab/operator.hpp"

namespace lyaplab {

// Model descriptors:
//   {"kind": "stdmap", "lambda": 50, "map_lambda": 50, "init": [x_prev, x_curr]}
//   {"kind": "skewshift", "lambda": 10, "dim": 3, "rotation_alpha": 1.94,
//    "h": {"amplitude": 1, "offset": 0}, "init": [w1, w2, w3]}
//   {"kind": "iid", "lambda": 10, "distribution": {...}}
//   {"kind": "constant", "lambda": 10, "value": 0.3}
//   {"kind": "periodic", "lambda": 10, "values": [-1, 1]}
// Distributions:
//   {"kind": "uniform", "lo": 0, "hi": 1}
//   {"kind": "mixture", "uniform": [[lo, hi, weight], ...], "atoms": [[x, weight], ...]}
// Unknown keys are rejected so typos do not silently fall back to defaults.

OperatorSpec model_from_json(const nlohmann::json& j);
nlohmann::ordered_json model_to_json(const OperatorSpec& spec);

Distribution distribution_from_json(const nlohmann::json& j);
nlohmann::ordered_json distribution_to_json(const Distribution& d);

}  // namespace lyaplab
