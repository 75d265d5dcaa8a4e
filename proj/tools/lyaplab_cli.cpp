// lyaplab command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "lyaplab/lyaplab.h"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

// Usage or configuration problem: exit 1, nothing written.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure reported by the library: exit 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(lyl_status s) {
  if (s == LYL_OK) return;
  const std::string msg = lyl_last_error();
  if (s == LYL_ERR_CONFIG || s == LYL_ERR_DOMAIN) throw UsageError(msg);
  throw NumericalError(msg);
}

// ---------------------------------------------------------------------------
// Output.

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  std::string str() const {
    std::string out;
    const auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t k = 0; k < r.size(); ++k) {
        if (k) out += ',';
        out += csv_field(r[k]);
      }
      out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

std::string num(double x) { return fmt_double(x); }
std::string num(std::int64_t x) { return std::to_string(x); }

std::string summary_path(const std::string& out) {
  const auto slash = out.find_last_of('/');
  const auto dot = out.find_last_of('.');
  const std::string stem =
      (dot != std::string::npos && (slash == std::string::npos || dot > slash)) ? out.substr(0, dot)
                                                                                : out;
  return stem + ".json";
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << body;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Run configuration: per-command defaults, overlaid by --config, overlaid by
// flags. The resolved document is echoed into the summary.

enum class Kind { Number, Integer, Numbers, Text, Switch };

struct FlagSpec {
  std::string flag;  // without leading dashes
  std::string key;   // dotted path into the config
  Kind kind;
  std::string help;
};

const std::vector<FlagSpec> kModelFlags = {
    {"model", "model.kind", Kind::Text, "stdmap | skewshift | iid | constant | periodic"},
    {"lambda", "model.lambda", Kind::Number, "coupling constant"},
    {"map-lambda", "model.map_lambda", Kind::Number, "standard-map kick (default: lambda)"},
    {"init", "model.init", Kind::Numbers, "fixed initial condition (default: random)"},
    {"dim", "model.dim", Kind::Integer, "skew-shift dimension"},
    {"rotation-alpha", "model.rotation_alpha", Kind::Number, "skew-shift frequency"},
    {"h-amplitude", "model.h.amplitude", Kind::Number, "skew-shift cosine amplitude"},
    {"h-offset", "model.h.offset", Kind::Number, "skew-shift cosine offset"},
    {"dist-lo", "model.distribution.lo", Kind::Number, "iid uniform law, lower end"},
    {"dist-hi", "model.distribution.hi", Kind::Number, "iid uniform law, upper end"},
    {"value", "model.value", Kind::Number, "constant potential value"},
    {"values", "model.values", Kind::Numbers, "periodic potential values"},
};

struct Command {
  std::string name;
  std::string help;
  bool uses_model;
  bool needs_out;
  ordered_json defaults;
  std::vector<FlagSpec> flags;
  std::function<int(ordered_json& cfg, unsigned workers, ordered_json& results, Csv& csv)>
      run;
};

json* walk(json& root, const std::string& dotted, bool create) {
  json* node = &root;
  std::size_t start = 0;
  for (;;) {
    const auto dot = dotted.find('.', start);
    const std::string part = dotted.substr(start, dot == std::string::npos ? dot : dot - start);
    if (!node->is_object()) {
      if (!create) return nullptr;
      *node = json::object();
    }
    if (!node->contains(part) && !create) return nullptr;
    node = &(*node)[part];
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
}

double parse_number(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(x)) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw UsageError("--" + flag + ": '" + s + "' is not a finite number");
  }
}

std::int64_t parse_integer(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw UsageError("--" + flag + ": '" + s + "' is not an integer");
  }
}

// Typed accessors over the resolved config.
double get_num(const ordered_json& c, const char* key) {
  const auto& v = c.at(key);
  if (!v.is_number()) throw UsageError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::int64_t get_int(const ordered_json& c, const char* key) {
  const auto& v = c.at(key);
  if (!v.is_number_integer()) throw UsageError(std::string("'") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::int64_t get_positive(const ordered_json& c, const char* key) {
  const std::int64_t v = get_int(c, key);
  if (v < 1) throw UsageError(std::string("'") + key + "' must be >= 1");
  return v;
}

std::vector<double> get_nums(const ordered_json& c, const char* key) {
  const auto& v = c.at(key);
  if (!v.is_array()) throw UsageError(std::string("'") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw UsageError(std::string("'") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Library handles.

struct ModelHandle {
  lyl_model* ptr = nullptr;
  ~ModelHandle() { lyl_model_free(ptr); }
};

struct HistogramHandle {
  lyl_histogram* ptr = nullptr;
  ~HistogramHandle() { lyl_histogram_free(ptr); }
};

std::unique_ptr<ModelHandle> load_model(const ordered_json& model) {
  auto m = std::make_unique<ModelHandle>();
  check(lyl_model_from_json(model.dump().c_str(), &m->ptr));
  return m;
}

ordered_json resolved_model(const ModelHandle& m) {
  char* text = nullptr;
  check(lyl_model_to_json(m.ptr, &text));
  ordered_json j = ordered_json::parse(text);
  lyl_string_free(text);
  return j;
}

// ---------------------------------------------------------------------------
// Energy grids: an explicit list or e_min..e_max with e_count points.

std::vector<double> energy_grid(ordered_json& cfg) {
  std::vector<double> es = get_nums(cfg, "energies");
  if (!es.empty()) return es;
  const double lo = get_num(cfg, "e_min");
  const double hi = get_num(cfg, "e_max");
  const std::int64_t n = get_positive(cfg, "e_count");
  if (n > 1 && !(hi > lo)) throw UsageError("need e_max > e_min");
  es.resize(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k)
    es[static_cast<std::size_t>(k)] =
        n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return es;
}

const std::vector<FlagSpec> kGridFlags = {
    {"energy", "energies", Kind::Numbers, "explicit energies (overrides the grid)"},
    {"e-min", "e_min", Kind::Number, "grid start"},
    {"e-max", "e_max", Kind::Number, "grid end"},
    {"e-count", "e_count", Kind::Integer, "grid points"},
};

ordered_json grid_defaults(double lo, double hi, std::int64_t n) {
  return {{"energies", json::array()}, {"e_min", lo}, {"e_max", hi}, {"e_count", n}};
}

// Default window half-width: lambda^-2 for the standard map, lambda^-ell otherwise.
double resolve_delta(ordered_json& cfg, const ordered_json& model) {
  if (cfg.at("delta").is_null()) {
    const double lambda = model.at("lambda").get<double>();
    const double ell =
        model.at("kind") == "stdmap" ? 2.0 : static_cast<double>(get_positive(cfg, "ell"));
    cfg["delta"] = std::pow(lambda, -ell);
  }
  const double delta = get_num(cfg, "delta");
  if (!(delta > 0.0)) throw UsageError("'delta' must be > 0");
  return delta;
}

// ---------------------------------------------------------------------------
// Subcommands.

int run_orbit(ordered_json& cfg, unsigned, ordered_json& res, Csv& csv) {
  const double lambda = get_num(cfg, "lambda");
  const std::int64_t steps = get_positive(cfg, "steps");
  std::vector<double> x(static_cast<std::size_t>(steps + 2));
  check(lyl_std_map_orbit(get_num(cfg, "x_prev"), get_num(cfg, "x_curr"), lambda, steps,
                          x.data()));
  csv.header = {"n", "x", "residual"};
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::string r;
    if (k > 0 && k + 1 < x.size()) {
      double v = 0.0;
      check(lyl_pendulum_residual(x[k - 1], x[k], x[k + 1], lambda, &v));
      worst = std::max(worst, v);
      r = num(v);
    }
    csv.add({num(static_cast<std::int64_t>(k) - 1), num(x[k]), r});
  }
  res["max_residual"] = worst;
  return kExitOk;
}

int run_lyapunov(ordered_json& cfg, unsigned workers, ordered_json& res, Csv& csv) {
  auto model = load_model(cfg.at("model"));
  cfg["model"] = resolved_model(*model);
  const std::vector<double> es = energy_grid(cfg);
  std::vector<lyl_lyapunov_estimate> est(es.size());
  check(lyl_lyapunov_scan(model->ptr, es.data(), es.size(), get_positive(cfg, "steps"),
                          get_positive(cfg, "ensemble"), cfg.at("seed").get<std::uint64_t>(),
                          workers, est.data()));
  csv.header = {"E", "gamma", "stderr", "steps", "ensemble"};
  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  for (std::size_t k = 0; k < es.size(); ++k) {
    csv.add({num(es[k]), num(est[k].gamma), num(est[k].std_error), num(est[k].steps),
             num(est[k].ensemble)});
    lo = std::min(lo, est[k].gamma);
    hi = std::max(hi, est[k].gamma);
    sum += est[k].gamma;
  }
  res["points"] = es.size();
  res["gamma_min"] = lo;
  res["gamma_max"] = hi;
  res["gamma_mean"] = sum / static_cast<double>(es.size());
  res["ln_lambda"] = std::log(lyl_model_lambda(model->ptr));
  return kExitOk;
}

std::vector<double> histogram_edges(const ModelHandle& m, ordered_json& cfg) {
  const auto bins = static_cast<std::size_t>(get_positive(cfg, "bins"));
  std::vector<double> edges(bins + 1);
  if (cfg.at("e_min").is_null() || cfg.at("e_max").is_null()) {
    check(lyl_spectrum_edges(m.ptr, bins, edges.data()));
    cfg["e_min"] = edges.front();
    cfg["e_max"] = edges.back();
  } else {
    check(lyl_uniform_edges(get_num(cfg, "e_min"), get_num(cfg, "e_max"), bins, edges.data()));
  }
  return edges;
}

int run_dos(ordered_json& cfg, unsigned workers, ordered_json& res, Csv& csv) {
  auto model = load_model(cfg.at("model"));
  cfg["model"] = resolved_model(*model);
  const std::vector<double> edges = histogram_edges(*model, cfg);
  HistogramHandle h;
  check(lyl_dos_histogram(model->ptr, get_positive(cfg, "size"), get_positive(cfg, "ensemble"),
                          edges.data(), edges.size(), cfg.at("seed").get<std::uint64_t>(),
                          workers, &h.ptr));
  std::vector<double> mass(lyl_histogram_bins(h.ptr));
  lyl_histogram_data(h.ptr, nullptr, mass.data());
  csv.header = {"e_lo", "e_hi", "mass", "ids"};
  double cum = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    cum += mass[k];
    csv.add({num(edges[k]), num(edges[k + 1]), num(mass[k]), num(cum)});
  }
  res["bins"] = mass.size();
  res["total_mass"] = cum;
  res["coverage_warning"] = lyl_histogram_coverage_warning(h.ptr) != 0;
  return kExitOk;
}

int run_thouless(ordered_json& cfg, unsigned workers, ordered_json& res, Csv& csv) {
  auto model = load_model(cfg.at("model"));
  cfg["model"] = resolved_model(*model);
  const std::vector<double> es = energy_grid(cfg);
  const lyl_thouless_budget budget{get_positive(cfg, "steps"), get_positive(cfg, "ensemble"),
                                   get_positive(cfg, "dos_size"),
                                   get_positive(cfg, "dos_ensemble"),
                                   static_cast<size_t>(get_positive(cfg, "bins"))};
  std::vector<lyl_thouless_row> rows(es.size());
  check(lyl_thouless_scan(model->ptr, es.data(), es.size(), &budget,
                          cfg.at("seed").get<std::uint64_t>(), workers, rows.data()));
  csv.header = {"E", "gamma_transfer", "stderr_transfer", "gamma_thouless", "residual"};
  double worst = 0.0;
  for (const auto& r : rows) {
    csv.add({num(r.e), num(r.gamma_transfer), num(r.std_error_transfer), num(r.gamma_thouless),
             num(r.residual)});
    worst = std::max(worst, std::abs(r.residual));
  }
  res["points"] = rows.size();
  res["max_abs_residual"] = worst;
  return kExitOk;
}

int run_scan(ordered_json& cfg, unsigned workers, ordered_json& res, Csv& csv) {
  auto model = load_model(cfg.at("model"));
  cfg["model"] = resolved_model(*model);
  const std::vector<double> es = energy_grid(cfg);
  if (es.size() < 2) throw UsageError("scan needs at least two energies");
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  std::vector<lyl_lyapunov_estimate> est(es.size());
  check(lyl_lyapunov_scan(model->ptr, es.data(), es.size(), get_positive(cfg, "steps"),
                          get_positive(cfg, "ensemble"), seed, workers, est.data()));
  const double ln_lambda = std::log(lyl_model_lambda(model->ptr));
  if (cfg.at("threshold").is_null()) cfg["threshold"] = get_num(cfg, "threshold_frac") * ln_lambda;
  const double t = get_num(cfg, "threshold");

  csv.header = {"E", "gamma", "stderr"};
  std::vector<double> gammas(es.size());
  std::size_t below = 0;
  for (std::size_t k = 0; k < es.size(); ++k) {
    gammas[k] = est[k].gamma;
    if (gammas[k] <= t) ++below;
    csv.add({num(es[k]), num(est[k].gamma), num(est[k].std_error)});
  }
  const double e0 = 0.5 * (es.front() + es.back());
  const double half = 0.5 * (es.back() - es.front());
  double meas = 0.0;
  check(lyl_measure_zt(es.data(), gammas.data(), es.size(), t, e0, half, &meas));
  res["threshold"] = t;
  res["ln_lambda"] = ln_lambda;
  res["window"] = {{"e0", e0}, {"half_width", half}};
  res["meas_Zt"] = meas;
  res["fraction_below"] = static_cast<double>(below) / static_cast<double>(es.size());
  res["gamma_min"] = *std::min_element(gammas.begin(), gammas.end());
  res["gamma_max"] = *std::max_element(gammas.begin(), gammas.end());

  const double delta = resolve_delta(cfg, cfg.at("model"));
  if (cfg.at("prop31").get<bool>()) {
    const double xi = get_num(cfg, "xi");
    const auto bins = static_cast<std::size_t>(get_positive(cfg, "bins"));
    std::vector<double> edges(bins + 1);
    check(lyl_spectrum_edges(model->ptr, bins, edges.data()));
    HistogramHandle h;
    check(lyl_dos_histogram(model->ptr, get_positive(cfg, "dos_size"),
                            get_positive(cfg, "dos_ensemble"), edges.data(), edges.size(), seed,
                            workers, &h.ptr));
    double g = 0.0;
    check(lyl_empirical_g(h.ptr, e0, delta, xi, &g));
    const lyl_prop31_inputs in{ln_lambda, t, xi, delta, g};
    lyl_bound_report r{};
    check(lyl_prop31_bound(&in, &r));
    res["prop31"] = {{"e0", e0},
                     {"delta", delta},
                     {"xi", xi},
                     {"g", g},
                     {"raw_bound", r.raw_bound},
                     {"log_raw_bound", r.log_raw_bound},
                     {"clamped_bound", r.clamped_bound},
                     {"vacuous", r.vacuous != 0}};
  }
  return kExitOk;
}

int run_bounds(ordered_json& cfg, unsigned workers, ordered_json& res, Csv& csv) {
  auto model = load_model(cfg.at("model"));
  cfg["model"] = resolved_model(*model);
  const ordered_json& mj = cfg.at("model");
  if (cfg.at("e_min").is_null() || cfg.at("e_max").is_null()) {
    double lo = 0.0, hi = 0.0;
    check(lyl_model_potential_range(model->ptr, &lo, &hi));
    const double pad = 0.05 * (hi - lo);
    cfg["e_min"] = lo + pad;
    cfg["e_max"] = hi - pad;
  }
  const std::vector<double> es = energy_grid(cfg);
  const double delta = resolve_delta(cfg, mj);
  const double alpha = get_num(cfg, "moment_alpha");
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

  csv.header = {"E", "bound", "bound_stderr", "window_mass", "window_mass_stderr",
                "clamp_violations"};
  std::int64_t clamp = 0, dominance = 0;
  for (double e : es) {
    lyl_window_bound wb{};
    check(lyl_frac_moment_bound(model->ptr, e, delta, alpha, get_positive(cfg, "window_half"),
                                get_positive(cfg, "ensemble"), seed, workers, &wb));
    double mass = 0.0, mass_se = 0.0;
    check(lyl_empirical_window_mass(model->ptr, e, delta, get_positive(cfg, "size"),
                                    get_positive(cfg, "mass_ensemble"), seed, workers, &mass,
                                    &mass_se));
    clamp += wb.clamp_violations;
    if (mass > wb.bound + 2.0 * std::hypot(wb.std_error, mass_se)) ++dominance;
    csv.add({num(e), num(wb.bound), num(wb.std_error), num(mass), num(mass_se),
             num(wb.clamp_violations)});
  }
  res["points"] = es.size();
  res["delta"] = delta;
  res["clamp_violations"] = clamp;
  res["dominance_violations"] = dominance;

  // Determinant moments and the bounded-density lemmas for i.i.d. models.
  if (mj.at("kind") == "iid") {
    const std::string dist = mj.at("distribution").dump();
    double slo = 0.0, shi = 0.0;
    check(lyl_distribution_support(dist.c_str(), &slo, &shi));
    const double e0 = 0.5 * (es.front() + es.back());
    if (cfg.at("xi").is_null()) {
      const double gap = std::min(es.front() - slo, shi - es.back());
      if (!(gap > 0.0)) throw UsageError("energies reach the support edge; pass --xi");
      cfg["xi"] = std::min(1.0, gap);
    }
    const double xi = get_num(cfg, "xi");
    double a_density = 0.0;
    check(lyl_distribution_max_density(dist.c_str(), e0 - xi, e0 + xi, &a_density));
    const double lambda = lyl_model_lambda(model->ptr);
    ordered_json prop2 = ordered_json::array();
    for (std::int64_t m = 1; m <= get_positive(cfg, "m_max"); ++m) {
      double mean = 0.0, se = 0.0, rhs = 0.0;
      check(lyl_prop2_mc(dist.c_str(), m, e0, delta, lambda, {0.0, 0.0}, xi,
                         get_positive(cfg, "samples"), seed, workers, &mean, &se));
      check(lyl_prop2_rhs(a_density, delta, xi, m, &rhs));
      prop2.push_back({{"m", m},
                       {"estimate", mean},
                       {"stderr", se},
                       {"rhs", rhs},
                       {"holds", mean <= rhs + 3.0 * se}});
    }
    lyl_lemma_check lc{};
    check(lyl_lemma_split_check(a_density, delta, e0, xi, dist.c_str(), 0.0, &lc));
    res["e0"] = e0;
    res["xi"] = xi;
    res["density_bound"] = a_density;
    res["prop2"] = prop2;
    res["lemma_split"] = {{"lhs", lc.lhs}, {"lhs_err", lc.lhs_err}, {"rhs", lc.rhs},
                          {"holds", lc.lhs <= lc.rhs}};
  }
  return clamp > 0 ? kExitNumerical : kExitOk;
}

int run_resonance(ordered_json& cfg, unsigned, ordered_json& res, Csv& csv) {
  const std::vector<double> lambdas = get_nums(cfg, "lambdas");
  if (lambdas.empty()) throw UsageError("'lambdas' must not be empty");
  const double b = get_num(cfg, "b");
  const double e = get_num(cfg, "energy");
  const double alpha = get_num(cfg, "moment_alpha");
  const double dexp = get_num(cfg, "delta_exp");
  const lyl_quad_tolerance tol{get_num(cfg, "tol_abs"), get_num(cfg, "tol_rel")};
  csv.header = {"lambda", "lambda_bar", "distance", "resonant", "next_regular",
                "K",      "K_err",      "converged", "divergent"};
  int failed = 0;
  for (double lambda : lambdas) {
    lyl_lambda_class c{};
    check(lyl_classify_lambda(lambda, dexp, &c));
    double next = 0.0;
    check(lyl_next_regular_lambda(lambda, dexp, 0.01, &next));
    lyl_quad_result k{};
    check(lyl_k_integral(lambda, b, e, alpha, &tol, &k));
    if (!k.converged && !k.divergent) ++failed;
    csv.add({num(lambda), num(c.lambda_bar), num(c.distance), num(std::int64_t{c.resonant}),
             num(next), num(k.value), num(k.err_est), num(std::int64_t{k.converged}),
             num(std::int64_t{k.divergent})});
  }
  res["points"] = lambdas.size();
  res["unconverged"] = failed;
  return failed > 0 ? kExitNumerical : kExitOk;
}

void verify_row(const char* name, int passed, const char* detail, void* user) {
  static_cast<Csv*>(user)->add({name, passed ? "1" : "0", detail});
}

int run_verify(ordered_json& cfg, unsigned workers, ordered_json& res, Csv& csv) {
  csv.header = {"check", "passed", "detail"};
  int failures = 0;
  check(lyl_verify(cfg.at("seed").get<std::uint64_t>(), workers, verify_row, &csv, &failures));
  for (const auto& r : csv.rows)
    std::cerr << (r[1] == "1" ? "PASS " : "FAIL ") << r[0] << "  " << r[2] << "\n";
  res["checks"] = csv.rows.size();
  res["failures"] = failures;
  return failures > 0 ? kExitNumerical : kExitOk;
}

ordered_json model_default() { return {{"kind", "stdmap"}, {"lambda", 50.0}}; }

std::vector<Command> commands() {
  std::vector<Command> cs;
  cs.push_back({"orbit", "standard-map orbit and pendulum-recursion residuals", false, true,
                {{"lambda", 50.0}, {"x_prev", 0.5}, {"x_curr", 1.0}, {"steps", 1000}},
                {{"lambda", "lambda", Kind::Number, "kick strength"},
                 {"x-prev", "x_prev", Kind::Number, "x_{-1}"},
                 {"x-curr", "x_curr", Kind::Number, "x_0"},
                 {"steps", "steps", Kind::Integer, "iterations"}},
                run_orbit});

  ordered_json ly = {{"model", model_default()}, {"steps", 100000}, {"ensemble", 1}};
  ly.update(grid_defaults(-0.5, 0.5, 11));
  cs.push_back({"lyapunov", "ensemble-averaged Lyapunov exponents on an energy grid", true, true,
                ly,
                {{"steps", "steps", Kind::Integer, "transfer steps N per member"},
                 {"ensemble", "ensemble", Kind::Integer, "members B"}},
                run_lyapunov});

  cs.push_back({"dos", "density of states by eigenvalue counting", true, true,
                {{"model", model_default()},
                 {"size", 4000},
                 {"ensemble", 1},
                 {"bins", 200},
                 {"e_min", nullptr},
                 {"e_max", nullptr}},
                {{"size", "size", Kind::Integer, "truncation length"},
                 {"ensemble", "ensemble", Kind::Integer, "members"},
                 {"bins", "bins", Kind::Integer, "histogram bins"},
                 {"e-min", "e_min", Kind::Number, "histogram start (default: spectrum hull)"},
                 {"e-max", "e_max", Kind::Number, "histogram end (default: spectrum hull)"}},
                run_dos});

  ordered_json th = {{"model", model_default()}, {"steps", 1000000}, {"ensemble", 1},
                     {"dos_size", 4000},         {"dos_ensemble", 1}, {"bins", 2000}};
  th.update(grid_defaults(-0.5, 0.5, 11));
  cs.push_back({"thouless", "transfer-matrix exponents against the Thouless formula", true, true,
                th,
                {{"steps", "steps", Kind::Integer, "transfer steps"},
                 {"ensemble", "ensemble", Kind::Integer, "transfer members"},
                 {"dos-size", "dos_size", Kind::Integer, "DOS truncation length"},
                 {"dos-ensemble", "dos_ensemble", Kind::Integer, "DOS members"},
                 {"bins", "bins", Kind::Integer, "DOS bins"}},
                run_thouless});

  ordered_json sc = {{"model", model_default()},
                     {"steps", 100000},
                     {"ensemble", 8},
                     {"threshold_frac", 0.8},
                     {"threshold", nullptr},
                     {"delta", nullptr},
                     {"ell", 2},
                     {"xi", 0.5},
                     {"prop31", false},
                     {"dos_size", 4000},
                     {"dos_ensemble", 1},
                     {"bins", 2000}};
  sc.update(grid_defaults(-0.5, 0.5, 101));
  cs.push_back({"scan", "exceptional-energy scan against a Lyapunov threshold", true, true, sc,
                {{"steps", "steps", Kind::Integer, "transfer steps"},
                 {"ensemble", "ensemble", Kind::Integer, "members"},
                 {"threshold-frac", "threshold_frac", Kind::Number, "t = frac * ln lambda"},
                 {"threshold", "threshold", Kind::Number, "absolute threshold t"},
                 {"delta", "delta", Kind::Number, "bound window half-width"},
                 {"ell", "ell", Kind::Integer, "delta = lambda^-ell for non-stdmap models"},
                 {"xi", "xi", Kind::Number, "bound parameter xi"},
                 {"prop31", "prop31", Kind::Switch, "evaluate the exceptional-set bound"},
                 {"dos-size", "dos_size", Kind::Integer, "DOS truncation length"},
                 {"dos-ensemble", "dos_ensemble", Kind::Integer, "DOS members"},
                 {"bins", "bins", Kind::Integer, "DOS bins"}},
                run_scan});

  ordered_json bd = {{"model", model_default()},
                     {"delta", nullptr},
                     {"ell", 2},
                     {"moment_alpha", 0.5},
                     {"window_half", 20},
                     {"ensemble", 2000},
                     {"size", 4000},
                     {"mass_ensemble", 4},
                     {"xi", nullptr},
                     {"m_max", 3},
                     {"samples", 20000}};
  bd.update(grid_defaults(0.0, 0.0, 21));
  bd["e_min"] = nullptr;
  bd["e_max"] = nullptr;
  cs.push_back({"bounds", "fractional-moment window bounds and determinant moments", true, true,
                bd,
                {{"delta", "delta", Kind::Number, "window half-width"},
                 {"ell", "ell", Kind::Integer, "delta = lambda^-ell for non-stdmap models"},
                 {"moment-alpha", "moment_alpha", Kind::Number, "fractional moment"},
                 {"window-half", "window_half", Kind::Integer, "Green-function window half-size"},
                 {"ensemble", "ensemble", Kind::Integer, "Green-function members"},
                 {"size", "size", Kind::Integer, "truncation length for window mass"},
                 {"mass-ensemble", "mass_ensemble", Kind::Integer, "window-mass members"},
                 {"xi", "xi", Kind::Number, "distance to the support edge"},
                 {"m-max", "m_max", Kind::Integer, "largest determinant size"},
                 {"samples", "samples", Kind::Integer, "Monte Carlo samples"}},
                run_bounds});

  cs.push_back({"resonance", "resonance classification and the K integral", false, true,
                {{"lambdas", {20.0 * std::numbers::pi, 21.0 * std::numbers::pi}},
                 {"b", std::numbers::pi},
                 {"energy", 0.0},
                 {"moment_alpha", 0.75},
                 {"delta_exp", 0.1},
                 {"tol_abs", 1e-10},
                 {"tol_rel", 1e-7}},
                {{"lambdas", "lambdas", Kind::Numbers, "couplings"},
                 {"b", "b", Kind::Number, "level of the phase function"},
                 {"energy", "energy", Kind::Number, "energy, |E| < 1"},
                 {"moment-alpha", "moment_alpha", Kind::Number, "exponent in (1/2, 1)"},
                 {"delta-exp", "delta_exp", Kind::Number, "resonance width exponent"},
                 {"tol-abs", "tol_abs", Kind::Number, "quadrature absolute tolerance"},
                 {"tol-rel", "tol_rel", Kind::Number, "quadrature relative tolerance"}},
                run_resonance});

  cs.push_back({"verify", "invariant suite over every module", false, false, ordered_json::object(),
                {}, run_verify});
  return cs;
}

// Overlays `src` onto `dst`, rejecting keys that `dst` does not declare.
// Model objects are merged field by field and validated by the library.
void overlay(ordered_json& dst, const json& src, const std::string& where) {
  if (!src.is_object()) throw UsageError(where + ": expected a JSON object");
  for (const auto& [k, v] : src.items()) {
    if (k == "seed") {
      dst["seed"] = v;
      continue;
    }
    if (!dst.contains(k)) throw UsageError(where + ": unknown key '" + k + "'");
    if (k == "model") {
      if (!v.is_object()) throw UsageError(where + ": 'model' must be an object");
      if (v.contains("kind") && v.at("kind") != dst["model"].value("kind", json())) {
        dst["model"] = ordered_json::object();
      }
      for (const auto& [mk, mv] : v.items()) dst["model"][mk] = mv;
      continue;
    }
    dst[k] = v;
  }
}

struct FlagBinding {
  FlagSpec spec;
  std::vector<std::string> values;
  bool on = false;
  CLI::Option* opt = nullptr;
};

void apply_flag(ordered_json& cfg, const FlagBinding& f) {
  if (f.opt->count() == 0) return;
  json patch;
  json* slot = walk(patch, f.spec.key, true);
  const std::string& flag = f.spec.flag;
  switch (f.spec.kind) {
    case Kind::Number:
      *slot = parse_number(f.values.at(0), flag);
      break;
    case Kind::Integer:
      *slot = parse_integer(f.values.at(0), flag);
      break;
    case Kind::Numbers: {
      *slot = json::array();
      for (const auto& v : f.values) slot->push_back(parse_number(v, flag));
      break;
    }
    case Kind::Text:
      *slot = f.values.at(0);
      break;
    case Kind::Switch:
      *slot = true;
      break;
  }
  // Model flags merge into the model object; a kind change starts it afresh
  // but keeps the coupling.
  if (patch.contains("model")) {
    json& m = patch["model"];
    ordered_json& cur = cfg["model"];
    if (m.contains("kind") && m["kind"] != cur.value("kind", json())) {
      const json lambda = cur.value("lambda", json(50.0));
      cur = ordered_json{{"kind", m["kind"]}, {"lambda", lambda}};
    }
    if (m.contains("distribution")) {
      ordered_json& d = cur["distribution"];
      if (!d.is_object() || d.value("kind", "") != "uniform")
        d = ordered_json{{"kind", "uniform"}, {"lo", 0.0}, {"hi", 1.0}};
      for (const auto& [k, v] : m["distribution"].items()) d[k] = v;
      m.erase("distribution");
    }
    if (m.contains("h")) {
      ordered_json& h = cur["h"];
      if (!h.is_object()) h = ordered_json::object();
      for (const auto& [k, v] : m["h"].items()) h[k] = v;
      m.erase("h");
    }
    for (const auto& [k, v] : m.items()) cur[k] = v;
    return;
  }
  for (const auto& [k, v] : patch.items()) cfg[k] = v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lyaplab: Lyapunov exponents and spectral bounds for ergodic Schrodinger operators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lyl_version()));

  std::vector<Command> cmds = commands();
  struct Bound {
    CLI::App* sub;
    std::string config_path;
    std::string out;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::vector<std::unique_ptr<FlagBinding>> flags;
  };
  std::vector<Bound> bound(cmds.size());
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    Command& c = cmds[i];
    Bound& b = bound[i];
    b.sub = app.add_subcommand(c.name, c.help);
    b.sub->add_option("--config", b.config_path, "JSON run configuration; flags override it")
        ->check(CLI::ExistingFile);
    b.sub->add_option("--out", b.out, "CSV output; the summary goes next to it as .json")
        ->required(c.needs_out);
    b.sub->add_option("--seed", b.seed, "random seed");
    b.sub->add_option("--workers", b.workers, "worker threads (0: all); output does not depend on it");
    std::vector<FlagSpec> specs = c.flags;
    if (c.uses_model) {
      specs.insert(specs.end(), kModelFlags.begin(), kModelFlags.end());
      if (c.defaults.contains("e_count"))
        specs.insert(specs.end(), kGridFlags.begin(), kGridFlags.end());
    }
    for (const FlagSpec& s : specs) {
      if (std::any_of(b.flags.begin(), b.flags.end(),
                      [&](const auto& f) { return f->spec.flag == s.flag; }))
        continue;
      auto f = std::make_unique<FlagBinding>();
      f->spec = s;
      const std::string name = "--" + s.flag;
      if (s.kind == Kind::Switch)
        f->opt = b.sub->add_flag(name, f->on, s.help);
      else if (s.kind == Kind::Numbers)
        f->opt = b.sub->add_option(name, f->values, s.help)->expected(1, -1)->allow_extra_args();
      else
        f->opt = b.sub->add_option(name, f->values, s.help)->expected(1);
      b.flags.push_back(std::move(f));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::size_t which = 0;
  while (!bound[which].sub->parsed()) ++which;
  Command& cmd = cmds[which];
  Bound& b = bound[which];

  const auto start = std::chrono::steady_clock::now();
  ordered_json cfg = cmd.defaults;
  cfg["seed"] = std::uint64_t{1};
  ordered_json results = ordered_json::object();
  Csv csv;
  int code = kExitOk;
  try {
    if (!b.out.empty() && summary_path(b.out) == b.out)
      throw UsageError("--out must not end in .json; the summary is written there");
    if (!b.config_path.empty()) {
      std::ifstream f(b.config_path);
      json file;
      try {
        file = json::parse(f);
      } catch (const json::exception& e) {
        throw UsageError(std::string("--config: ") + e.what());
      }
      overlay(cfg, file, "--config");
    }
    if (b.sub->count("--seed")) cfg["seed"] = b.seed;
    if (!cfg.at("seed").is_number_unsigned() && !cfg.at("seed").is_number_integer())
      throw UsageError("'seed' must be a non-negative integer");
    if (cfg.at("seed").is_number_integer() && cfg.at("seed").get<std::int64_t>() < 0)
      throw UsageError("'seed' must be a non-negative integer");
    for (const auto& f : b.flags) apply_flag(cfg, *f);
    code = cmd.run(cfg, b.workers, results, csv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!b.out.empty()) {
    ordered_json summary;
    summary["command"] = cmd.name;
    summary["version"] = lyl_version();
    summary["seed"] = cfg.at("seed");
    summary["workers"] = b.workers;
    summary["config"] = cfg;
    summary["results"] = results;
    summary["wall_time_s"] = wall;
    try {
      write_file(b.out, csv.str());
      write_file(summary_path(b.out), summary.dump(2) + "\n");
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  return code;
}
