#include "model_json.hpp"

#include <cmath>
#include <initializer_list>
#include <string>

#include "lyaplab/errors.hpp"

namespace lyaplab {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void allow_keys(const json& j, std::initializer_list<const char*> keys, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ConfigError(std::string(what) + ": unknown key '" + k + "'");
  }
}

double number(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ConfigError(std::string(what) + ": missing '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string(what) + ": '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string(what) + ": '" + key + "' must be finite");
  return x;
}

double number_or(const json& j, const char* key, double fallback, const char* what) {
  return j.contains(key) ? number(j, key, what) : fallback;
}

std::vector<double> numbers(const json& v, const char* what) {
  if (!v.is_array()) throw ConfigError(std::string(what) + ": expected an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigError(std::string(what) + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// Golden-mean rotation.
const double kDefaultRotation = kPi * (std::sqrt(5.0) - 1.0);

}  // namespace

Distribution distribution_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError("distribution: need a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") {
    allow_keys(j, {"kind", "lo", "hi"}, "distribution");
    const double lo = number_or(j, "lo", 0.0, "distribution");
    const double hi = number_or(j, "hi", 1.0, "distribution");
    return Distribution::uniform(lo, hi);
  }
  if (kind == "mixture") {
    allow_keys(j, {"kind", "uniform", "atoms"}, "distribution");
    std::vector<Distribution::Piece> pieces;
    std::vector<Distribution::Atom> atoms;
    if (j.contains("uniform"))
      for (const json& p : j.at("uniform")) {
        const auto v = numbers(p, "distribution.uniform");
        if (v.size() != 3) throw ConfigError("distribution.uniform: entries are [lo, hi, weight]");
        pieces.push_back({v[0], v[1], v[2]});
      }
    if (j.contains("atoms"))
      for (const json& a : j.at("atoms")) {
        const auto v = numbers(a, "distribution.atoms");
        if (v.size() != 2) throw ConfigError("distribution.atoms: entries are [x, weight]");
        atoms.push_back({v[0], v[1]});
      }
    return Distribution::mixture(std::move(pieces), std::move(atoms));
  }
  throw ConfigError("distribution: unknown kind '" + kind + "'");
}

ordered_json distribution_to_json(const Distribution& d) {
  ordered_json j;
  if (d.atoms().empty() && d.pieces().size() == 1 && d.pieces()[0].weight == 1.0) {
    j["kind"] = "uniform";
    j["lo"] = d.pieces()[0].lo;
    j["hi"] = d.pieces()[0].hi;
    return j;
  }
  j["kind"] = "mixture";
  j["uniform"] = ordered_json::array();
  for (const auto& p : d.pieces()) j["uniform"].push_back({p.lo, p.hi, p.weight});
  j["atoms"] = ordered_json::array();
  for (const auto& a : d.atoms()) j["atoms"].push_back({a.at, a.weight});
  return j;
}

OperatorSpec model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError("model: need a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  OperatorSpec spec;
  if (kind == "stdmap") {
    allow_keys(j, {"kind", "lambda", "map_lambda", "init"}, "model");
    StdMapDriver d;
    if (j.contains("map_lambda")) d.map_lambda = number(j, "map_lambda", "model");
    if (j.contains("init")) {
      const auto v = numbers(j.at("init"), "model.init");
      if (v.size() != 2) throw ConfigError("model.init: stdmap needs [x_prev, x_curr]");
      try {
        d.init = make_std_map_state(v[0], v[1]);
      } catch (const DomainError& e) {
        throw ConfigError(std::string("model.init: ") + e.what());
      }
    }
    spec.driver = d;
  } else if (kind == "skewshift") {
    allow_keys(j, {"kind", "lambda", "dim", "rotation_alpha", "h", "init"}, "model");
    SkewShiftDriver d;
    if (j.contains("dim")) {
      if (!j.at("dim").is_number_integer()) throw ConfigError("model: 'dim' must be an integer");
      d.dim = j.at("dim").get<int>();
    }
    d.rotation_alpha = number_or(j, "rotation_alpha", kDefaultRotation, "model");
    if (j.contains("h")) {
      const json& h = j.at("h");
      allow_keys(h, {"amplitude", "offset"}, "model.h");
      d.h.amplitude = number_or(h, "amplitude", 1.0, "model.h");
      d.h.offset = number_or(h, "offset", 0.0, "model.h");
    }
    if (j.contains("init")) d.init = numbers(j.at("init"), "model.init");
    spec.driver = d;
  } else if (kind == "iid") {
    allow_keys(j, {"kind", "lambda", "distribution"}, "model");
    IidDriver d;
    if (j.contains("distribution")) d.dist = distribution_from_json(j.at("distribution"));
    spec.driver = d;
  } else if (kind == "constant") {
    allow_keys(j, {"kind", "lambda", "value"}, "model");
    spec.driver = ConstantDriver{number_or(j, "value", 0.0, "model")};
  } else if (kind == "periodic") {
    allow_keys(j, {"kind", "lambda", "values"}, "model");
    if (!j.contains("values")) throw ConfigError("model: periodic needs 'values'");
    spec.driver = PeriodicDriver{numbers(j.at("values"), "model.values")};
  } else {
    throw ConfigError("model: unknown kind '" + kind + "'");
  }
  spec.lambda = number(j, "lambda", "model");
  spec.validate();
  return spec;
}

ordered_json model_to_json(const OperatorSpec& spec) {
  ordered_json j;
  j["kind"] = spec.kind();
  j["lambda"] = spec.lambda;
  if (const auto* d = std::get_if<StdMapDriver>(&spec.driver)) {
    j["map_lambda"] = d->map_lambda.value_or(spec.lambda);
    if (d->init) j["init"] = {d->init->x_prev.value(), d->init->x_curr.value()};
  } else if (const auto* d = std::get_if<SkewShiftDriver>(&spec.driver)) {
    j["dim"] = d->dim;
    j["rotation_alpha"] = d->rotation_alpha;
    j["h"] = {{"amplitude", d->h.amplitude}, {"offset", d->h.offset}};
    if (d->init) j["init"] = *d->init;
  } else if (const auto* d = std::get_if<IidDriver>(&spec.driver)) {
    j["distribution"] = distribution_to_json(d->dist);
  } else if (const auto* d = std::get_if<ConstantDriver>(&spec.driver)) {
    j["value"] = d->value;
  } else if (const auto* d = std::get_if<PeriodicDriver>(&spec.driver)) {
    j["values"] = d->values;
  }
  return j;
}

}  // namespace lyaplab
