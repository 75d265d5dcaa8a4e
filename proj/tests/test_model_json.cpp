#include <doctest.h>

#include "lyaplab/errors.hpp"
#include "lyaplab/verify.hpp"
#include "model_json.hpp"

using namespace lyaplab;
using nlohmann::json;

TEST_CASE("models round-trip through JSON") {
  const std::vector<json> models = {
      json::parse(R"({"kind":"stdmap","lambda":50})"),
      json::parse(R"({"kind":"stdmap","lambda":50,"map_lambda":40,"init":[0.1,-0.2]})"),
      json::parse(R"({"kind":"skewshift","lambda":10,"dim":3,"rotation_alpha":1.94,
                      "h":{"amplitude":2,"offset":0.5},"init":[0.1,0.2,0.3]})"),
      json::parse(R"({"kind":"iid","lambda":10})"),
      json::parse(R"({"kind":"iid","lambda":10,"distribution":{"kind":"mixture",
                      "uniform":[[0,1,0.5]],"atoms":[[2,0.5]]}})"),
      json::parse(R"({"kind":"constant","lambda":4,"value":0.3})"),
      json::parse(R"({"kind":"periodic","lambda":10,"values":[-1,1]})")};
  for (const json& m : models) {
    const OperatorSpec spec = model_from_json(m);
    const json once = model_to_json(spec);
    const json twice = model_to_json(model_from_json(once));
    CHECK(once == twice);
    CHECK(once.at("lambda") == m.at("lambda"));
    CHECK(once.at("kind") == m.at("kind"));
    const PotentialWindow a = sample_potential(spec, 0, 30, 9);
    const PotentialWindow b = sample_potential(model_from_json(once), 0, 30, 9);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  }
  const json resolved = model_to_json(model_from_json(json::parse(R"({"kind":"stdmap","lambda":50})")));
  CHECK(resolved.at("map_lambda") == 50.0);
  const json iid = model_to_json(model_from_json(json::parse(R"({"kind":"iid","lambda":3})")));
  CHECK(iid.at("distribution").at("kind") == "uniform");
  CHECK(iid.at("distribution").at("lo") == 0.0);
  CHECK(iid.at("distribution").at("hi") == 1.0);
}

TEST_CASE("malformed models are configuration errors") {
  const std::vector<const char*> bad = {
      R"({"kind":"stdmap"})",
      R"({"kind":"stdmap","lambda":50,"lamda":3})",
      R"({"kind":"warp","lambda":1})",
      R"({"lambda":1})",
      R"({"kind":"stdmap","lambda":"big"})",
      R"({"kind":"stdmap","lambda":0})",
      R"({"kind":"stdmap","lambda":50,"init":[1]})",
      R"({"kind":"skewshift","lambda":5,"dim":2.5})",
      R"({"kind":"skewshift","lambda":5,"dim":2,"init":[0.1]})",
      R"({"kind":"skewshift","lambda":5,"h":{"amp":1}})",
      R"({"kind":"periodic","lambda":5})",
      R"({"kind":"periodic","lambda":5,"values":[]})",
      R"({"kind":"periodic","lambda":5,"values":[1,"x"]})",
      R"({"kind":"iid","lambda":5,"distribution":{"kind":"uniform","lo":1,"hi":0}})",
      R"({"kind":"iid","lambda":5,"distribution":{"kind":"normal"}})",
      R"({"kind":"iid","lambda":5,"distribution":{"kind":"mixture","atoms":[[1]]}})",
      R"([1,2])"};
  for (const char* s : bad) {
    INFO(s);
    CHECK_THROWS_AS(model_from_json(json::parse(s)), ConfigError);
  }
}

TEST_CASE("distribution descriptors") {
  const Distribution u = distribution_from_json(json::parse(R"({"kind":"uniform","lo":-1,"hi":3})"));
  CHECK(u.support_min() == -1.0);
  CHECK(u.support_max() == 3.0);
  CHECK(u.max_density_on(-1.0, 3.0) == doctest::Approx(0.25));
  const Distribution m = distribution_from_json(
      json::parse(R"({"kind":"mixture","uniform":[[0,1,0.25],[2,4,0.25]],"atoms":[[5,0.5]]})"));
  CHECK(m.total_mass() == doctest::Approx(1.0));
  CHECK(m.support_max() == 5.0);
  CHECK(distribution_from_json(distribution_to_json(m)).support_min() == 0.0);
}

TEST_CASE("the invariant suite passes") {
  const auto results = run_verify(1, 1);
  CHECK(results.size() >= 20);
  for (const VerifyResult& r : results) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
  const auto again = run_verify(1, 3);
  REQUIRE(again.size() == results.size());
  for (std::size_t k = 0; k < results.size(); ++k) CHECK(again[k].detail == results[k].detail);
}
