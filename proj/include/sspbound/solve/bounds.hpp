#pragma once

// Bound synthesis: encode the conditions, solve the LP (or the bilinear
// system by alternating LPs), then turn the numeric solution into an exact,
// verified certificate.

#include "sspbound/certgen/farkas.hpp"
#include "sspbound/certgen/motzkin.hpp"
#include "sspbound/solve/certificate.hpp"
#include "sspbound/solve/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sspbound::solve {

enum class LowerStrategy { Fixed, Motzkin };

struct SolveOptions {
  std::size_t enumeration_limit = kDefaultEnumerationLimit;
  LowerStrategy strategy = LowerStrategy::Fixed;
  std::size_t motzkin_starts = 8;
  std::size_t motzkin_iterations = 50;
  double motzkin_tolerance = 1e-8;
  std::uint64_t seed = 0;
  std::int64_t snap_denominator = 10000;
  double snap_tolerance = 1e-6;
  std::optional<std::vector<Rational>> init;  ///< objective anchor; defaults to the model's init
};

enum class Outcome { Certificate, NoCertificate, Anomaly };

struct SolveResult {
  Outcome outcome = Outcome::NoCertificate;
  std::optional<BoundCertificate> certificate;
  std::string message;
  std::vector<std::string> audit;
  SolverStats stats;
};

namespace detail {

struct Encoding {
  certgen::PotentialTemplate tmpl;
  certgen::LinearConstraintSystem base;  ///< template, exit range and step conditions
};

inline Encoding encode_base(const Model& m, const SolveOptions& opt) {
  Encoding e;
  e.tmpl = certgen::build_template(m);
  const auto& t = e.tmpl;
  e.base.num_unknowns = t.size();
  using C = certgen::LinearConstraintSystem::Constraint;
  C mpos;  // −M <= 0
  mpos.terms[t.M()] = -1;
  mpos.origin = "step bound M >= 0";
  e.base.add(mpos);
  C order;  // K − K′ <= 0
  order.terms[t.K()] = 1;
  order.terms[t.Kprime()] = -1;
  order.origin = "exit range ordering";
  e.base.add(order);
  for (const auto& a : certgen::encode_c2(m, t, opt.enumeration_limit))
    e.base.append(certgen::farkas_transform(a, t.size()));
  for (const auto& a : certgen::encode_c4(m, t, opt.enumeration_limit))
    e.base.append(certgen::farkas_transform(a, t.size()));
  return e;
}

inline std::vector<Rational> anchor(const Model& m, const SolveOptions& opt) {
  if (opt.init) return *opt.init;
  if (m.init) return *m.init;
  return std::vector<Rational>(m.nx(), Rational(0));
}

/// Objective aᵀx0 + b − K (upper, minimized) or aᵀx0 + b − K′ (lower, maximized).
inline std::vector<Rational> objective(const certgen::PotentialTemplate& t, const std::vector<Rational>& x0,
                                       Side side) {
  std::vector<Rational> obj(t.size());
  for (std::size_t i = 0; i < t.n; ++i) obj[t.a(i)] = x0[i];
  obj[t.b()] = 1;
  obj[side == Side::Upper ? t.K() : t.Kprime()] = -1;
  return obj;
}

struct LpOutcome {
  lp::Status status = lp::Status::Infeasible;
  std::vector<double> theta;
  double value = 0;
  std::string diagnostic;
};

inline LpOutcome run_lp(const certgen::LinearConstraintSystem& sys, const std::vector<Rational>& obj, Side side,
                        SolverStats& stats) {
  const auto p = sys.to_lp(obj, side == Side::Upper ? lp::Sense::Minimize : lp::Sense::Maximize);
  const auto res = lp::solve(p);
  stats.lp_count++;
  stats.iterations += res.iterations;
  LpOutcome out;
  out.status = res.status;
  out.diagnostic = res.diagnostic;
  if (res.status == lp::Status::Optimal) {
    out.theta.assign(res.x.begin(), res.x.begin() + static_cast<long>(sys.num_unknowns));
    out.value = res.objective;
  }
  return out;
}

inline Rational snap(double v, const SolveOptions& opt) {
  const Rational r = best_rational(v, opt.snap_denominator);
  if (std::fabs(to_double(r) - v) < opt.snap_tolerance) return r;
  return from_double(v);
}

/// Exact certificate for a fixed coefficient vector a: M is the largest
/// one-step change of aᵀx, [K, K′] the exact range of h over exits, and b
/// is chosen so that K = 0 (upper) or K′ = 0 (lower). For fixed a these
/// are the optimal choices of the remaining unknowns.
inline std::optional<BoundCertificate> complete(const Model& m, std::vector<Rational> a, Objective problem, Side side,
                                                SolverStats& stats, const SolveOptions& opt, std::string& why) {
  std::optional<Rational> lo, hi;
  bool any = false;
  Rational M = 0;
  for (std::size_t l = 0; l < m.k(); ++l) {
    const auto er = exit_range(m, a, l, stats, opt.enumeration_limit);
    if (er.any) {
      if (!er.range.lo || !er.range.hi) {
        why = "exit range unbounded";
        return std::nullopt;
      }
      lo = any ? std::min(*lo, *er.range.lo) : *er.range.lo;
      hi = any ? std::max(*hi, *er.range.hi) : *er.range.hi;
      any = true;
    }
    const auto s = step_bound(m, a, l, stats, opt.enumeration_limit);
    if (!s) {
      why = "one-step change unbounded";
      return std::nullopt;
    }
    M = std::max(M, *s);
  }
  if (!any) {
    why = "no block can leave the loop guard";
    return std::nullopt;
  }
  BoundCertificate c;
  c.problem = problem;
  c.side = side;
  c.vars = m.program_vars;
  c.a = std::move(a);
  c.M = M;
  c.b = side == Side::Upper ? Rational(-*lo) : Rational(-*hi);
  c.K = *lo + c.b;
  c.Kprime = *hi + c.b;
  return c;
}

/// Snapped coefficients first; if they do not verify exactly, the exact
/// binary values of the solver output are verified within a tolerance.
inline std::optional<BoundCertificate> certify(const Model& m, const std::vector<double>& theta,
                                               const certgen::PotentialTemplate& t, Objective problem, Side side,
                                               std::optional<std::size_t> choice, const std::string& strategy,
                                               const SolveOptions& opt, SolveResult& out) {
  double scale = 1;
  for (double v : theta) scale = std::max(scale, std::fabs(v));
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<Rational> a;
    for (std::size_t i = 0; i < t.n; ++i) a.push_back(attempt == 0 ? snap(theta[t.a(i)], opt) : from_double(theta[t.a(i)]));
    std::string why;
    auto c = complete(m, a, problem, side, out.stats, opt, why);
    if (!c) {
      out.audit.push_back("coefficients (attempt " + std::to_string(attempt + 1) + ") rejected: " + why);
      continue;
    }
    c->choice = choice;
    c->strategy = strategy;
    c->init = anchor(m, opt);
    VerifyOptions vo;
    vo.enumeration_limit = opt.enumeration_limit;
    if (attempt == 1) vo.tolerance = from_double(1e-6 * (1 + scale));
    const auto rep = verify_certificate(m, *c, vo);
    out.stats.lp_count += rep.stats.lp_count;
    out.stats.iterations += rep.stats.iterations;
    if (rep.pass) {
      c->exact = attempt == 0 || vo.tolerance == 0;
      if (attempt == 1) out.audit.push_back("snapped coefficients failed exact verification; kept solver values");
      return c;
    }
    out.audit.push_back("coefficients (attempt " + std::to_string(attempt + 1) + ") failed: " + rep.first_failure());
  }
  return std::nullopt;
}

inline certgen::LinearConstraintSystem with_drift(const Encoding& e, const Model& m, std::size_t l,
                                                  certgen::Direction dir) {
  certgen::LinearConstraintSystem sys = e.base;
  sys.append(certgen::farkas_transform(certgen::encode_c3(m, e.tmpl, l, dir), e.tmpl.size()));
  return sys;
}

inline bool better(Side side, double x, double y) { return side == Side::Upper ? x < y : x > y; }

}  // namespace detail

/// Conditions with drift required for every block (sup upper, inf lower).
inline SolveResult solve_all_blocks(const Model& m, Objective problem, Side side, const SolveOptions& opt = {}) {
  SolveResult out;
  const auto shape = certgen::condition_shape(problem, side);
  const auto enc = detail::encode_base(m, opt);
  certgen::LinearConstraintSystem sys = enc.base;
  for (std::size_t l = 0; l < m.k(); ++l)
    sys.append(certgen::farkas_transform(certgen::encode_c3(m, enc.tmpl, l, shape.drift), enc.tmpl.size()));
  out.audit = sys.audit;
  const auto x0 = detail::anchor(m, opt);
  const auto lp = detail::run_lp(sys, detail::objective(enc.tmpl, x0, side), side, out.stats);
  if (!lp.diagnostic.empty()) out.audit.push_back(lp.diagnostic);
  if (lp.status == lp::Status::Infeasible) {
    out.message = "no linear certificate";
    return out;
  }
  if (lp.status == lp::Status::Unbounded) {
    out.outcome = Outcome::Anomaly;
    out.message = "solver anomaly: objective unbounded";
    return out;
  }
  out.certificate = detail::certify(m, lp.theta, enc.tmpl, problem, side, std::nullopt, "all-blocks", opt, out);
  if (!out.certificate) {
    out.outcome = Outcome::Anomaly;
    out.message = "solver anomaly: certificate failed verification";
    return out;
  }
  out.certificate->stats = out.stats;
  out.outcome = Outcome::Certificate;
  return out;
}

/// Conditions with drift for some block, committing to one block ℓ per LP
/// and keeping the best verified result (ties go to the lowest ℓ).
inline SolveResult solve_fixed_choice(const Model& m, Objective problem, Side side, const SolveOptions& opt = {}) {
  SolveResult out;
  const auto shape = certgen::condition_shape(problem, side);
  const auto enc = detail::encode_base(m, opt);
  out.audit = enc.base.audit;
  const auto x0 = detail::anchor(m, opt);
  const auto obj = detail::objective(enc.tmpl, x0, side);

  struct Candidate {
    double value;
    std::size_t l;
    std::vector<double> theta;
  };
  std::vector<Candidate> cands;
  bool unbounded = false;
  for (std::size_t l = 0; l < m.k(); ++l) {
    const auto sys = detail::with_drift(enc, m, l, shape.drift);
    const auto lp = detail::run_lp(sys, obj, side, out.stats);
    if (!lp.diagnostic.empty()) out.audit.push_back("block " + std::to_string(l + 1) + ": " + lp.diagnostic);
    if (lp.status == lp::Status::Unbounded) unbounded = true;
    if (lp.status == lp::Status::Optimal) cands.push_back({lp.value, l, lp.theta});
  }
  if (cands.empty()) {
    out.outcome = unbounded ? Outcome::Anomaly : Outcome::NoCertificate;
    out.message = unbounded ? "solver anomaly: objective unbounded" : "no linear certificate";
    return out;
  }
  std::stable_sort(cands.begin(), cands.end(), [&](const Candidate& x, const Candidate& y) {
    if (std::fabs(x.value - y.value) > 1e-9 * (1 + std::fabs(x.value))) return detail::better(side, x.value, y.value);
    return x.l < y.l;
  });
  // The best LP value can lose a little to snapping; certify the candidates
  // whose LP value is within reach of the best and keep the best exact one.
  std::optional<BoundCertificate> best;
  for (const auto& c : cands) {
    if (best && std::fabs(c.value - cands.front().value) > 1e-6 * (1 + std::fabs(c.value))) break;
    auto cert = detail::certify(m, c.theta, enc.tmpl, problem, side, c.l, "fixed-choice(" + std::to_string(c.l + 1) + ")",
                                opt, out);
    if (!cert) continue;
    if (!best) {
      best = cert;
      continue;
    }
    const Rational v = *cert->value_at_init(), w = *best->value_at_init();
    if (side == Side::Upper ? v < w : v > w) best = cert;
  }
  if (!best) {
    out.outcome = Outcome::Anomaly;
    out.message = "solver anomaly: certificate failed verification";
    return out;
  }
  out.certificate = best;
  out.certificate->stats = out.stats;
  out.outcome = Outcome::Certificate;
  return out;
}

/// Same conditions as solve_fixed_choice, but the disjunction over blocks is
/// kept and handled through the bilinear Motzkin system, solved by
/// alternating LPs from several starting multipliers. This is a local
/// method: failing to find a certificate proves nothing.
inline SolveResult solve_motzkin(const Model& m, Objective problem, Side side, const SolveOptions& opt = {}) {
  SolveResult out;
  const auto shape = certgen::condition_shape(problem, side);
  const auto enc = detail::encode_base(m, opt);
  out.audit = enc.base.audit;
  const auto x0 = detail::anchor(m, opt);
  const auto obj = detail::objective(enc.tmpl, x0, side);
  const std::size_t k = m.k();

  std::vector<certgen::ParamHalfSpace> disjuncts;
  for (std::size_t l = 0; l < k; ++l) disjuncts.push_back(certgen::encode_c3(m, enc.tmpl, l, shape.drift).rhs);
  const Polyhedron guard{m.nx() + m.nu(), {certgen::detail::lift(m.guard, m.nu())}};
  const auto bil = certgen::motzkin_transform(guard, disjuncts, enc.tmpl.size());
  const certgen::Tag tag = shape.drift == certgen::Direction::Ge ? certgen::Tag::DriftGe : certgen::Tag::DriftLe;

  // Starts: every unit vector (these reproduce fixed-choice), the uniform
  // mix, then seeded random mixes.
  std::vector<std::vector<Rational>> starts;
  for (std::size_t l = 0; l < k; ++l) {
    std::vector<Rational> z(k);
    z[l] = 1;
    starts.push_back(z);
  }
  if (k > 1) starts.push_back(std::vector<Rational>(k, Rational(1, static_cast<long>(k))));
  std::mt19937_64 rng(opt.seed);
  while (k > 1 && starts.size() < opt.motzkin_starts) {
    std::vector<Rational> z(k);
    Rational sum = 0;
    for (auto& v : z) {
      v = Rational(static_cast<long>(rng() % 1000) + 1, 1000);
      sum += v;
    }
    for (auto& v : z) v /= sum;
    starts.push_back(z);
  }

  struct Best {
    double value;
    std::size_t start;
    std::vector<double> theta;
  };
  std::optional<Best> best;
  bool unbounded = false;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    std::vector<Rational> z = starts[s];
    std::optional<double> current;
    std::vector<double> theta;
    for (std::size_t it = 0; it < opt.motzkin_iterations; ++it) {
      certgen::LinearConstraintSystem sys = enc.base;
      sys.append(bil.fix_multipliers(z, tag));
      const auto lp = detail::run_lp(sys, obj, side, out.stats);
      if (lp.status == lp::Status::Unbounded) unbounded = true;
      if (lp.status != lp::Status::Optimal) break;
      const bool improved = !current || detail::better(side, lp.value, *current);
      const bool converged = current && std::fabs(lp.value - *current) < opt.motzkin_tolerance;
      if (improved) {
        current = lp.value;
        theta = lp.theta;
      }
      if (converged) break;
      const auto step = bil.fix_unknowns(theta);
      out.stats.lp_count++;
      if (!step.feasible) break;
      std::vector<Rational> next;
      for (double v : step.z) next.push_back(detail::snap(std::max(0.0, v), opt));
      Rational sum = 0;
      for (const auto& v : next) sum += v;
      if (sum == 0) break;
      for (auto& v : next) v /= sum;
      if (next == z) break;
      z = std::move(next);
    }
    // ties keep the earlier start
    if (current && (!best || (detail::better(side, *current, best->value) &&
                              std::fabs(*current - best->value) > opt.motzkin_tolerance)))
      best = Best{*current, s, theta};
  }
  if (!best) {
    out.outcome = unbounded ? Outcome::Anomaly : Outcome::NoCertificate;
    out.message = unbounded ? "solver anomaly: objective unbounded"
                            : "no linear certificate found by the local bilinear search (this does not prove "
                              "that none exists)";
    return out;
  }
  out.certificate =
      detail::certify(m, best->theta, enc.tmpl, problem, side, std::nullopt, "motzkin-bilinear", opt, out);
  if (!out.certificate) {
    out.outcome = Outcome::Anomaly;
    out.message = "solver anomaly: certificate failed verification";
    return out;
  }
  out.certificate->stats = out.stats;
  out.outcome = Outcome::Certificate;
  return out;
}

/// Dispatch on problem and side: the ∀-block shapes use one LP, the ∃-block
/// shapes use the configured lower-bound strategy.
inline SolveResult solve_bound(const Model& m, Objective problem, Side side, const SolveOptions& opt = {}) {
  if (certgen::condition_shape(problem, side).all_blocks) return solve_all_blocks(m, problem, side, opt);
  if (opt.strategy == LowerStrategy::Motzkin) return solve_motzkin(m, problem, side, opt);
  return solve_fixed_choice(m, problem, side, opt);
}

inline SolveResult upper_bound(const Model& m, const SolveOptions& opt = {}) {
  return solve_all_blocks(m, Objective::Sup, Side::Upper, opt);
}
inline SolveResult lower_bound_fixed(const Model& m, const SolveOptions& opt = {}) {
  return solve_fixed_choice(m, Objective::Sup, Side::Lower, opt);
}
inline SolveResult lower_bound_motzkin(const Model& m, const SolveOptions& opt = {}) {
  return solve_motzkin(m, Objective::Sup, Side::Lower, opt);
}
inline SolveResult inf_bounds(const Model& m, Side side, const SolveOptions& opt = {}) {
  return solve_bound(m, Objective::Inf, side, opt);
}

}  // namespace sspbound::solve
