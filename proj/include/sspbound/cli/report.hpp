#pragma once

// Report and certificate records plus their JSON form (schema 1). Rationals
// are stored as exact "p/q" strings so a JSON round trip is lossless.

#include "sspbound/oracle/simulate.hpp"
#include "sspbound/solve/bounds.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sspbound::cli {

using nlohmann::json;
using certgen::Objective;
using certgen::Side;
using solve::BoundCertificate;

inline constexpr int kSchemaVersion = 1;

struct ModelSummary {
  std::string path;
  std::size_t nx = 0, nu = 0, k = 0;
  std::vector<std::string> vars;
  friend bool operator==(const ModelSummary&, const ModelSummary&) = default;
};

struct BoundEntry {
  Objective problem = Objective::Sup;
  Side side = Side::Upper;
  std::string status;  ///< "certificate", "no-certificate" or "anomaly"
  std::string message;
  std::optional<BoundCertificate> certificate;
  friend bool operator==(const BoundEntry&, const BoundEntry&) = default;
};

struct VerificationEntry {
  bool pass = true;
  std::string summary;
  std::vector<solve::ConditionCheck> checks;
  friend bool operator==(const VerificationEntry&, const VerificationEntry&) = default;
};

struct SimulationEntry {
  std::string policy;
  oracle::SimEstimate estimate;
  friend bool operator==(const SimulationEntry&, const SimulationEntry&) = default;
};

struct Report {
  int schema = kSchemaVersion;
  std::string command;
  std::optional<ModelSummary> model;
  std::vector<BoundEntry> bounds;
  std::optional<SimulationEntry> simulation;
  std::optional<VerificationEntry> verification;
  std::vector<std::string> warnings;
  std::vector<std::string> audit;
  std::map<std::string, double> timings;  ///< seconds
  int exit_code = 0;
  friend bool operator==(const Report&, const Report&) = default;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Objective objective_from(const std::string& s) {
  if (s == "supval") return Objective::Sup;
  if (s == "infval") return Objective::Inf;
  throw SchemaError("unknown problem '" + s + "'");
}

inline Side side_from(const std::string& s) {
  if (s == "upper") return Side::Upper;
  if (s == "lower") return Side::Lower;
  throw SchemaError("unknown side '" + s + "'");
}

inline Rational rational_from(const json& j, const char* field) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument&) {
    }
  } else if (j.is_number_integer()) {
    return Rational(j.get<long long>());
  } else if (j.is_number()) {
    return from_double(j.get<double>());
  }
  throw SchemaError(std::string("field '") + field + "' is not a number");
}

inline const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw SchemaError(std::string("missing field '") + name + "'");
  return j.at(name);
}

template <class T>
std::optional<T> optional_field(const json& j, const char* name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return j.at(name).get<T>();
}

}  // namespace detail

inline json certificate_to_json(const BoundCertificate& c) {
  json a = json::object();
  for (std::size_t i = 0; i < c.a.size(); ++i) a[c.vars[i]] = to_string(c.a[i]);
  json j{{"schema", kSchemaVersion},
         {"problem", to_string(c.problem)},
         {"side", to_string(c.side)},
         {"vars", c.vars},
         {"a", a},
         {"b", to_string(c.b)},
         {"K", to_string(c.K)},
         {"Kprime", to_string(c.Kprime)},
         {"M", to_string(c.M)},
         {"bound_expr", c.bound_expr()},
         {"strategy", c.strategy},
         {"exact", c.exact},
         {"solver_stats", {{"iterations", c.stats.iterations}, {"lp_count", c.stats.lp_count}}}};
  j["choice"] = c.choice ? json(*c.choice + 1) : json(nullptr);
  if (c.init) {
    std::vector<std::string> init;
    for (const auto& v : *c.init) init.push_back(to_string(v));
    j["init"] = init;
    j["value_at_init"] = to_string(*c.value_at_init());
  } else {
    j["init"] = nullptr;
    j["value_at_init"] = nullptr;
  }
  return j;
}

/// Throws SchemaError on anything malformed.
inline BoundCertificate certificate_from_json(const json& j) {
  using detail::field;
  try {
    if (j.contains("schema") && j.at("schema") != kSchemaVersion) throw SchemaError("unsupported schema version");
    BoundCertificate c;
    c.problem = detail::objective_from(field(j, "problem").get<std::string>());
    c.side = detail::side_from(field(j, "side").get<std::string>());
    const json& a = field(j, "a");
    if (j.contains("vars")) {
      c.vars = j.at("vars").get<std::vector<std::string>>();
    } else {
      if (!a.is_object()) throw SchemaError("field 'a' must be an object");
      for (const auto& [name, v] : a.items()) c.vars.push_back(name);
    }
    for (const auto& v : c.vars) {
      if (!a.is_object() || !a.contains(v)) throw SchemaError("field 'a' has no entry for '" + v + "'");
      c.a.push_back(detail::rational_from(a.at(v), "a"));
    }
    c.b = detail::rational_from(field(j, "b"), "b");
    c.K = detail::rational_from(field(j, "K"), "K");
    c.Kprime = detail::rational_from(field(j, "Kprime"), "Kprime");
    c.M = detail::rational_from(field(j, "M"), "M");
    c.strategy = j.value("strategy", std::string());
    c.exact = j.value("exact", true);
    if (auto ch = detail::optional_field<std::size_t>(j, "choice")) {
      if (*ch == 0) throw SchemaError("field 'choice' counts blocks from 1");
      c.choice = *ch - 1;
    }
    if (j.contains("init") && !j.at("init").is_null()) {
      std::vector<Rational> init;
      for (const auto& v : j.at("init")) init.push_back(detail::rational_from(v, "init"));
      c.init = init;
    }
    if (j.contains("solver_stats")) {
      c.stats.iterations = j.at("solver_stats").value("iterations", std::size_t{0});
      c.stats.lp_count = j.at("solver_stats").value("lp_count", std::size_t{0});
    }
    return c;
  } catch (const json::exception& e) {
    throw SchemaError(e.what());
  }
}

inline json check_to_json(const solve::ConditionCheck& c) {
  return json{{"name", c.name},
              {"block", c.block ? json(*c.block + 1) : json(nullptr)},
              {"pass", c.pass},
              {"slack", c.slack ? json(to_string(*c.slack)) : json(nullptr)}};
}

inline solve::ConditionCheck check_from_json(const json& j) {
  solve::ConditionCheck c;
  c.name = detail::field(j, "name").get<std::string>();
  if (auto b = detail::optional_field<std::size_t>(j, "block")) c.block = *b - 1;
  c.pass = detail::field(j, "pass").get<bool>();
  if (j.contains("slack") && !j.at("slack").is_null()) c.slack = detail::rational_from(j.at("slack"), "slack");
  return c;
}

inline json estimate_to_json(const oracle::SimEstimate& e) {
  return json{{"mean", e.mean},
              {"stderr", e.stderr_ ? json(*e.stderr_) : json(nullptr)},
              {"trials", e.trials},
              {"truncated_fraction", e.truncated_fraction},
              {"mean_steps", e.mean_steps},
              {"seed", e.seed},
              {"unreliable", e.unreliable}};
}

inline oracle::SimEstimate estimate_from_json(const json& j) {
  oracle::SimEstimate e;
  e.mean = detail::field(j, "mean").get<double>();
  e.stderr_ = detail::optional_field<double>(j, "stderr");
  e.trials = detail::field(j, "trials").get<std::size_t>();
  e.truncated_fraction = detail::field(j, "truncated_fraction").get<double>();
  e.mean_steps = j.value("mean_steps", 0.0);
  e.seed = detail::field(j, "seed").get<std::uint64_t>();
  e.unreliable = detail::field(j, "unreliable").get<bool>();
  return e;
}

inline json report_to_json(const Report& r) {
  json j{{"schema", r.schema}, {"command", r.command}, {"exit_code", r.exit_code}};
  if (r.model)
    j["model"] = {{"path", r.model->path},
                  {"program_vars", r.model->nx},
                  {"sampling_vars", r.model->nu},
                  {"blocks", r.model->k},
                  {"vars", r.model->vars}};
  else
    j["model"] = nullptr;
  j["bounds"] = json::array();
  for (const auto& b : r.bounds)
    j["bounds"].push_back({{"problem", to_string(b.problem)},
                           {"side", to_string(b.side)},
                           {"status", b.status},
                           {"message", b.message},
                           {"certificate", b.certificate ? certificate_to_json(*b.certificate) : json(nullptr)}});
  j["simulation"] = r.simulation ? json{{"policy", r.simulation->policy},
                                        {"estimate", estimate_to_json(r.simulation->estimate)}}
                                 : json(nullptr);
  if (r.verification) {
    json checks = json::array();
    for (const auto& c : r.verification->checks) checks.push_back(check_to_json(c));
    j["verification"] = {{"pass", r.verification->pass}, {"summary", r.verification->summary}, {"checks", checks}};
  } else {
    j["verification"] = nullptr;
  }
  j["warnings"] = r.warnings;
  j["audit"] = r.audit;
  j["timings"] = r.timings;
  return j;
}

inline Report report_from_json(const json& j) {
  using detail::field;
  try {
    Report r;
    r.schema = field(j, "schema").get<int>();
    if (r.schema != kSchemaVersion) throw SchemaError("unsupported schema version");
    r.command = field(j, "command").get<std::string>();
    r.exit_code = field(j, "exit_code").get<int>();
    if (!field(j, "model").is_null()) {
      const json& m = j.at("model");
      r.model = ModelSummary{field(m, "path").get<std::string>(), field(m, "program_vars").get<std::size_t>(),
                             field(m, "sampling_vars").get<std::size_t>(), field(m, "blocks").get<std::size_t>(),
                             field(m, "vars").get<std::vector<std::string>>()};
    }
    for (const auto& b : field(j, "bounds")) {
      BoundEntry e;
      e.problem = detail::objective_from(field(b, "problem").get<std::string>());
      e.side = detail::side_from(field(b, "side").get<std::string>());
      e.status = field(b, "status").get<std::string>();
      e.message = field(b, "message").get<std::string>();
      if (!field(b, "certificate").is_null()) e.certificate = certificate_from_json(b.at("certificate"));
      r.bounds.push_back(std::move(e));
    }
    if (!field(j, "simulation").is_null())
      r.simulation = SimulationEntry{field(j.at("simulation"), "policy").get<std::string>(),
                                     estimate_from_json(field(j.at("simulation"), "estimate"))};
    if (!field(j, "verification").is_null()) {
      const json& v = j.at("verification");
      VerificationEntry e{field(v, "pass").get<bool>(), field(v, "summary").get<std::string>(), {}};
      for (const auto& c : field(v, "checks")) e.checks.push_back(check_from_json(c));
      r.verification = std::move(e);
    }
    r.warnings = field(j, "warnings").get<std::vector<std::string>>();
    r.audit = field(j, "audit").get<std::vector<std::string>>();
    r.timings = field(j, "timings").get<std::map<std::string, double>>();
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace sspbound::cli
