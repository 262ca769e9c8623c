#include "mfsync/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace mfsync {

namespace {

TrigFn parse_fn(const std::string& s) {
  if (s == "one" || s == "1") return TrigFn::one;
  if (s == "cos") return TrigFn::cos;
  if (s == "sin") return TrigFn::sin;
  throw std::invalid_argument("unknown trig factor '" + s + "' (expected one, cos or sin)");
}

std::string fn_name(TrigFn fn) {
  switch (fn) {
    case TrigFn::one: return "one";
    case TrigFn::cos: return "cos";
    case TrigFn::sin: return "sin";
  }
  return "one";
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad value for '") + key + "': " + e.what());
  }
}

int integral_mode(const nlohmann::json& t, const char* key) {
  const double v = get_or<double>(t, key, 0.0);
  if (v != std::floor(v)) {
    throw std::invalid_argument(std::string("term mode '") + key +
                                "' must be an integer for the coupling to be periodic");
  }
  return static_cast<int>(v);
}

}  // namespace

ModelConfig parse_model_config(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("model config must be a JSON object");
  ModelConfig m;
  m.type = get_or<std::string>(j, "type", m.type);
  if (m.type != "kuramoto" && m.type != "winfree" && m.type != "custom") {
    throw std::invalid_argument("model type must be kuramoto, winfree or custom");
  }
  m.omega = get_or<double>(j, "omega", m.omega);
  m.kappa = get_or<double>(j, "kappa", m.kappa);
  m.n = get_or<int>(j, "n", m.n);
  if (j.contains("terms")) {
    for (const auto& t : j.at("terms")) {
      TrigTerm term;
      term.coeff = get_or<double>(t, "coeff", 0.0);
      term.y_fn = parse_fn(get_or<std::string>(t, "y", "one"));
      term.m = integral_mode(t, "m");
      term.z_fn = parse_fn(get_or<std::string>(t, "z", "one"));
      term.k = integral_mode(t, "k");
      m.terms.push_back(term);
    }
  }
  if (m.type == "custom" && m.terms.empty()) {
    throw std::invalid_argument("custom model needs a non-empty 'terms' array");
  }
  if (j.contains("perturbation")) {
    const auto& p = j.at("perturbation");
    auto& pc = m.perturbation;
    pc.kind = get_or<std::string>(p, "kind", pc.kind);
    if (pc.kind != "zero" && pc.kind != "detune" && pc.kind != "trig") {
      throw std::invalid_argument("perturbation kind must be zero, detune or trig");
    }
    pc.values = get_or<std::vector<double>>(p, "values", {});
    pc.amplitude = get_or<double>(p, "amplitude", 0.0);
    pc.relative = get_or<bool>(p, "relative", false);
    pc.mode = get_or<double>(p, "mode", 1.0);
    pc.phases = get_or<std::vector<double>>(p, "phases", {});
  }
  return m;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file " + path + " is not valid JSON: " + e.what());
  }
  return parse_model_config(j);
}

nlohmann::json to_json(const ModelConfig& m) {
  nlohmann::json j;
  j["type"] = m.type;
  j["omega"] = m.omega;
  j["kappa"] = m.kappa;
  j["n"] = m.n;
  if (!m.terms.empty()) {
    j["terms"] = nlohmann::json::array();
    for (const auto& t : m.terms) {
      j["terms"].push_back({{"coeff", t.coeff},
                            {"y", fn_name(t.y_fn)},
                            {"m", t.m},
                            {"z", fn_name(t.z_fn)},
                            {"k", t.k}});
    }
  }
  const auto& p = m.perturbation;
  j["perturbation"] = {{"kind", p.kind},     {"values", p.values}, {"amplitude", p.amplitude},
                       {"relative", p.relative}, {"mode", p.mode},   {"phases", p.phases}};
  return j;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["model"] = to_json(c.model);
  j["seed"] = c.seed;
  j["grid"] = c.grid;
  j["h"] = c.h ? nlohmann::json(*c.h) : nlohmann::json(nullptr);
  j["tmax"] = c.t_max;
  j["D"] = c.d ? nlohmann::json(*c.d) : nlohmann::json(nullptr);
  j["optimize_radius"] = c.optimize_radius;
  j["strict"] = c.strict;
  j["stride"] = c.stride;
  j["x0"] = c.x0;
  j["spread_fraction"] = c.spread_fraction;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["psi_samples"] = c.psi_samples;
  j["kappa_range"] = {c.kappa_range.min, c.kappa_range.max, c.kappa_range.count};
  j["omega_range"] = {c.omega_range.min, c.omega_range.max, c.omega_range.count};
  j["empirical"] = c.empirical;
  j["probe_t"] = c.probe_t;
  return j;
}

ModelSpec build_model(const ModelConfig& config) {
  if (config.type == "kuramoto") return builtin_kuramoto(config.omega, config.kappa, config.n);
  if (config.type == "winfree") return builtin_winfree(config.omega, config.kappa, config.n);
  return normalize_period(make_trig_model(config.n, config.omega, config.terms, "custom"));
}

PerturbationSpec build_perturbation(const PerturbationConfig& config, int n, double radius,
                                    std::uint64_t seed) {
  const double amplitude = config.relative ? config.amplitude * radius : config.amplitude;
  if (config.kind == "zero") return PerturbationSpec::zero(n);
  if (config.kind == "detune") {
    if (config.values.empty()) return PerturbationSpec::random_detune(n, amplitude, seed);
    if (static_cast<int>(config.values.size()) != n) {
      throw std::invalid_argument("detune vector length differs from n");
    }
    return PerturbationSpec::constant_detune(config.values);
  }
  if (config.kind == "trig") {
    if (config.phases.empty()) {
      return PerturbationSpec::random_trigonometric(n, amplitude, config.mode, seed);
    }
    if (static_cast<int>(config.phases.size()) != n) {
      throw std::invalid_argument("phase vector length differs from n");
    }
    return PerturbationSpec::trigonometric(amplitude, config.mode, config.phases);
  }
  throw std::invalid_argument("unknown perturbation kind " + config.kind);
}

}  // namespace mfsync
