#pragma once

// Subcommands behind the sspbound executable. Each returns the exit code:
// 0 success, 1 no certificate / failed check / unreliable estimate,
// 2 input error, 3 I/O error.

#include "sspbound/cli/report.hpp"
#include "sspbound/frontend/frontend.hpp"
#include "sspbound/oracle/simulate.hpp"
#include "sspbound/oracle/value_iteration.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sspbound::cli {

enum ExitCode : int { kOk = 0, kNoResult = 1, kInputError = 2, kIoError = 3 };

enum class SideRequest { Upper, Lower, Both };
enum class Format { Text, Json };

struct RunConfig {
  std::string command;  ///< parse, bound, simulate or certify
  std::string model_path;
  std::string cert_path;  ///< certify only
  Objective problem = Objective::Sup;
  SideRequest side = SideRequest::Both;
  std::map<std::string, std::string> init;  ///< variable -> value text
  solve::LowerStrategy strategy = solve::LowerStrategy::Fixed;
  Format format = Format::Text;
  std::uint64_t seed = 0;
  std::size_t trials = 100000;
  std::uint64_t step_cap = 1000000;
  std::size_t threads = 1;
  std::string policy = "always:1";  ///< always:N, uniform or greedy
  std::map<std::string, std::string> box;  ///< variable -> "lo:hi", for greedy
  std::optional<std::string> out;
};

/// Input problem reported with exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

inline ModelSummary summarize(const std::string& path, const Model& m) {
  return ModelSummary{path, m.nx(), m.nu(), m.k(), m.program_vars};
}

inline std::vector<Rational> init_vector(const Model& m, const std::map<std::string, std::string>& overrides) {
  std::vector<Rational> x = m.init ? *m.init : std::vector<Rational>(m.nx(), Rational(0));
  for (const auto& [name, text] : overrides) {
    const auto i = m.program_index(name);
    if (!i) throw InputError("--init: '" + name + "' is not a program variable");
    try {
      x[*i] = parse_rational(text);
    } catch (const std::invalid_argument&) {
      throw InputError("--init: malformed value '" + text + "' for '" + name + "'");
    }
  }
  return x;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void emit(const Report& r, const RunConfig& cfg, const std::string& text, std::ostream& out) {
  const std::string body = cfg.format == Format::Json ? report_to_json(r).dump(2) + "\n" : text;
  if (!cfg.out) {
    out << body;
    return;
  }
  std::ofstream f(*cfg.out, std::ios::binary);
  if (!f || !(f << body)) throw IoError("cannot write '" + *cfg.out + "'");
}

struct Loaded {
  Model model;
  std::vector<std::string> warnings;
};

inline Loaded load(const std::string& path, std::ostream& err) {
  const std::string source = read_file(path);
  try {
    auto vm = frontend::load_model(source);
    Loaded l{std::move(vm.model), {}};
    for (const auto& w : vm.warnings) l.warnings.push_back(w.str());
    return l;
  } catch (const frontend::DiagnosticError& e) {
    for (const auto& d : e.diagnostics()) err << path << ":" << d.str() << "\n";
    throw InputError("");
  }
}

inline std::string summary_line(const Model& m) {
  std::ostringstream os;
  os << "|X|=" << m.nx() << " |R|=" << m.nu() << " k=" << m.k();
  return os.str();
}

}  // namespace detail

inline std::string render_text(const Report& r) {
  std::ostringstream os;
  if (r.model)
    os << r.model->path << ": |X|=" << r.model->nx << " |R|=" << r.model->nu << " k=" << r.model->k << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  for (const auto& b : r.bounds) {
    os << to_string(b.problem) << " " << to_string(b.side) << " bound: ";
    if (b.certificate) {
      const auto& c = *b.certificate;
      os << c.bound_expr();
      if (c.init) os << "   (at init " << to_display(*c.value_at_init()) << ")";
      os << "   [" << c.strategy << (c.exact ? "" : ", verified within tolerance") << "]\n";
    } else {
      os << b.message << "\n";
    }
  }
  if (r.simulation) {
    const auto& e = r.simulation->estimate;
    os << "policy " << r.simulation->policy << ", " << e.trials << " trials, seed " << e.seed << "\n";
    os << std::setprecision(10) << "mean " << e.mean << "  stderr ";
    if (e.stderr_)
      os << *e.stderr_;
    else
      os << "null";
    os << "  truncated " << e.truncated_fraction << "  mean steps " << e.mean_steps << "\n";
    if (e.unreliable) os << "estimate unreliable: more than 1% of trials hit the step cap\n";
  }
  if (r.verification) {
    for (const auto& c : r.verification->checks) {
      os << (c.pass ? "  ok    " : "  FAIL  ") << c.message();
      if (c.slack)
        os << "  (slack " << to_display(*c.slack) << ")";
      else
        os << "  (unbounded)";
      os << "\n";
    }
    os << (r.verification->pass ? "certificate valid" : r.verification->summary) << "\n";
  }
  if (!r.audit.empty()) os << r.audit.size() << " audit note(s); see --format json\n";
  for (const auto& [name, t] : r.timings) os << "time " << name << ": " << std::fixed << std::setprecision(3) << t << " s\n";
  return os.str();
}

inline int cmd_parse(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto l = detail::load(cfg.model_path, err);
  for (const auto& w : l.warnings) err << cfg.model_path << ":" << w << "\n";
  Report r;
  r.command = "parse";
  r.model = detail::summarize(cfg.model_path, l.model);
  detail::emit(r, cfg, detail::summary_line(l.model) + "\n", out);
  return kOk;
}

inline int cmd_bound(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto l = detail::load(cfg.model_path, err);
  Report r;
  r.command = "bound";
  r.model = detail::summarize(cfg.model_path, l.model);
  r.warnings = l.warnings;
  const auto x0 = detail::init_vector(l.model, cfg.init);
  if (!l.model.guard.contains(x0))
    r.warnings.push_back("initial state violates the loop guard; the bound expression still holds on the guard");

  solve::SolveOptions opt;
  opt.strategy = cfg.strategy;
  opt.seed = cfg.seed;
  opt.init = x0;
  std::vector<Side> sides;
  if (cfg.side != SideRequest::Lower) sides.push_back(Side::Upper);
  if (cfg.side != SideRequest::Upper) sides.push_back(Side::Lower);
  for (Side s : sides) {
    const auto t0 = std::chrono::steady_clock::now();
    auto res = solve::solve_bound(l.model, cfg.problem, s, opt);
    r.timings[to_string(s)] = detail::seconds_since(t0);
    BoundEntry e;
    e.problem = cfg.problem;
    e.side = s;
    e.status = res.outcome == solve::Outcome::Certificate     ? "certificate"
               : res.outcome == solve::Outcome::NoCertificate ? "no-certificate"
                                                              : "anomaly";
    e.message = res.certificate ? "" : res.message;
    e.certificate = res.certificate;
    for (auto& a : res.audit) r.audit.push_back(std::string(to_string(s)) + ": " + a);
    if (!res.certificate) r.exit_code = kNoResult;
    r.bounds.push_back(std::move(e));
  }
  detail::emit(r, cfg, render_text(r), out);
  return r.exit_code;
}

inline oracle::Policy make_policy(const RunConfig& cfg, const Model& m, Report& r) {
  const std::string& p = cfg.policy;
  if (p == "uniform") return oracle::Policy::uniform();
  if (p.rfind("always:", 0) == 0) {
    std::size_t l = 0;
    try {
      l = std::stoul(p.substr(7));
    } catch (const std::exception&) {
      throw InputError("--policy: malformed block number in '" + p + "'");
    }
    if (l < 1 || l > m.k()) throw InputError("--policy: block must lie between 1 and " + std::to_string(m.k()));
    return oracle::Policy::always(l - 1);
  }
  if (p == "greedy") {
    oracle::Box box;
    for (const auto& v : m.program_vars) {
      auto it = cfg.box.find(v);
      if (it == cfg.box.end()) throw InputError("--policy greedy needs --box with a range for '" + v + "'");
      const auto colon = it->second.find(':');
      try {
        if (colon == std::string::npos) throw std::invalid_argument("");
        box.lo.push_back(std::stol(it->second.substr(0, colon)));
        box.hi.push_back(std::stol(it->second.substr(colon + 1)));
      } catch (const std::exception&) {
        throw InputError("--box: malformed range '" + it->second + "' (expected lo:hi)");
      }
    }
    for (const auto& [name, range] : cfg.box)
      if (!m.program_index(name)) throw InputError("--box: '" + name + "' is not a program variable");
    try {
      oracle::require_lattice(m);
      oracle::ValueIterationOptions vo;
      // outside the box: the upper certificate for sup, the lower one for inf
      const auto bound = cfg.problem == Objective::Sup ? solve::upper_bound(m) : solve::inf_bounds(m, Side::Lower);
      if (bound.certificate) {
        std::vector<double> a;
        for (const auto& v : bound.certificate->a) a.push_back(to_double(v));
        const double c = to_double(bound.certificate->offset());
        vo.boundary = [a, c](const std::vector<double>& x) {
          double v = c;
          for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * x[i];
          return v;
        };
        r.audit.push_back("value iteration scores states outside the box by " + bound.certificate->bound_expr());
      }
      auto table = std::make_shared<oracle::ValueTable>(oracle::value_iteration(m, box, cfg.problem, vo));
      for (const auto& w : table->warnings) r.warnings.push_back(w);
      return oracle::Policy::greedy(std::move(table));
    } catch (const oracle::UnsupportedModel& e) {
      throw InputError(e.what());
    }
  }
  throw InputError("--policy: expected always:N, uniform or greedy");
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto l = detail::load(cfg.model_path, err);
  Report r;
  r.command = "simulate";
  r.model = detail::summarize(cfg.model_path, l.model);
  r.warnings = l.warnings;
  if (cfg.trials == 0) throw InputError("--trials must be at least 1");
  if (cfg.step_cap == 0) throw InputError("--step-cap must be at least 1");
  const auto policy = make_policy(cfg, l.model, r);
  oracle::SimOptions opt;
  opt.trials = cfg.trials;
  opt.seed = cfg.seed;
  opt.step_cap = cfg.step_cap;
  opt.threads = cfg.threads;
  opt.init = detail::init_vector(l.model, cfg.init);
  const auto t0 = std::chrono::steady_clock::now();
  const auto est = oracle::simulate(l.model, policy, opt);
  r.timings["simulate"] = detail::seconds_since(t0);
  r.simulation = SimulationEntry{policy.name(), est};
  r.exit_code = est.unreliable ? kNoResult : kOk;
  detail::emit(r, cfg, render_text(r), out);
  return r.exit_code;
}

/// Accepts a bare certificate or a bound report (first certificate, or the
/// one matching --side when a single side is requested).
inline BoundCertificate read_certificate(const std::string& path, SideRequest side) {
  const std::string text = detail::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": malformed JSON: " + e.what());
  }
  try {
    if (j.is_object() && j.contains("bounds")) {
      for (const auto& b : j.at("bounds")) {
        if (!b.contains("certificate") || b.at("certificate").is_null()) continue;
        const auto c = certificate_from_json(b.at("certificate"));
        if (side == SideRequest::Both || (side == SideRequest::Upper) == (c.side == Side::Upper)) return c;
      }
      throw InputError(path + ": report contains no matching certificate");
    }
    return certificate_from_json(j);
  } catch (const SchemaError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline int cmd_certify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto l = detail::load(cfg.model_path, err);
  auto cert = read_certificate(cfg.cert_path, cfg.side);
  if (cert.vars != l.model.program_vars) throw InputError("certificate variables do not match the model");
  Report r;
  r.command = "certify";
  r.model = detail::summarize(cfg.model_path, l.model);
  r.warnings = l.warnings;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = solve::verify_certificate(l.model, cert);
  r.timings["verify"] = detail::seconds_since(t0);
  r.verification = VerificationEntry{rep.pass, rep.pass ? "certificate valid" : rep.first_failure(), rep.checks};
  r.exit_code = rep.pass ? kOk : kNoResult;
  detail::emit(r, cfg, render_text(r), out);
  return r.exit_code;
}

/// Runs one subcommand, mapping exceptions to exit codes.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    if (cfg.command == "parse") return cmd_parse(cfg, out, err);
    if (cfg.command == "bound") return cmd_bound(cfg, out, err);
    if (cfg.command == "simulate") return cmd_simulate(cfg, out, err);
    if (cfg.command == "certify") return cmd_certify(cfg, out, err);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kInputError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const InputError& e) {
    if (*e.what()) err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace sspbound::cli
