#pragma once

// Re-checks a certificate against the model with exact rational LPs. The
// checks are computed from the model (blocks, guard, supports) directly,
// not from the inclusion assertions used to synthesize the certificate.

#include "sspbound/semantics/model.hpp"
#include "sspbound/solve/certificate.hpp"
#include "sspbound/solve/simplex.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sspbound::solve {

/// A closed interval whose ends may be infinite (nullopt).
struct Range {
  std::optional<Rational> lo, hi;
};

namespace detail {

/// LP over (x, u) with x in the closed guard, u in one support case.
/// Sampling variables pinned by the case are substituted as constants, so
/// the LP only carries x and the free part of u.
class Region {
 public:
  Region(const Model& m, const SupportCase* sc) : m_(m), fixed_(m.nu(), Rational(0)), column_(m.nx() + m.nu()) {
    for (std::size_t j = 0; j < m.nx(); ++j) column_[j] = p_.add_var(false);
    if (sc) {
      const auto hull = support_hull(m.distributions, m.nu());
      std::vector<bool> free(m.nu(), false);
      for (auto j : sc->free_vars) free[j] = true;
      for (std::size_t j = 0; j < m.nu(); ++j) {
        if (sc->fixed[j]) {
          fixed_[j] = *sc->fixed[j];
        } else if (free[j]) {
          const std::size_t v = p_.add_var(false);
          column_[m.nx() + j] = v;
          p_.rows.push_back(lp::Row<Rational>{{{v, Rational(1)}}, lp::Relation::LessEq, hull[j].hi});
          p_.rows.push_back(lp::Row<Rational>{{{v, Rational(-1)}}, lp::Relation::LessEq, -hull[j].lo});
        }
      }
    }
    // u unused without a support case: all pinned at 0
    const auto g = m.guard.closure();
    add_row(g.coeffs, g.rhs);
  }

  /// Restricts to F(x,u) in the closure of the complement of the guard.
  void add_exit(const AffineMap& f) {
    const auto& g = m_.guard;
    std::vector<Rational> coeffs(m_.nx() + m_.nu());
    Rational rhs = -g.rhs;
    for (std::size_t i = 0; i < m_.nx(); ++i) {
      if (g.coeffs[i] == 0) continue;
      for (std::size_t j = 0; j < m_.nx(); ++j) coeffs[j] -= g.coeffs[i] * f.A(i, j);
      for (std::size_t j = 0; j < m_.nu(); ++j) coeffs[m_.nx() + j] -= g.coeffs[i] * f.B(i, j);
      rhs += g.coeffs[i] * f.c[i];
    }
    add_row(coeffs, rhs);
  }

  /// sup of objᵀ(x,u) + constant. nullopt: region empty. Unbounded: hi empty.
  struct Sup {
    bool empty = false;
    std::optional<Rational> value;
  };
  Sup maximize(const std::vector<Rational>& obj, Rational constant, SolverStats& stats) const {
    std::vector<Rational> lp_obj(p_.num_vars);
    for (std::size_t j = 0; j < obj.size(); ++j) {
      if (obj[j] == 0) continue;
      if (column_[j])
        lp_obj[*column_[j]] += obj[j];
      else
        constant += obj[j] * fixed_[j - m_.nx()];
    }
    return maximize_lp(lp_obj, constant, stats);
  }

  /// Same, with the objective given over the LP columns (x first, then the
  /// free u and anything added through problem()).
  Sup maximize_lp(const std::vector<Rational>& obj, const Rational& constant, SolverStats& stats) const {
    if (contradiction_) return {true, std::nullopt};
    lp::Problem<Rational> q = p_;
    q.objective = obj;
    q.objective.resize(q.num_vars);
    q.sense = lp::Sense::Maximize;
    const auto res = lp::solve(q);
    stats.lp_count++;
    stats.iterations += res.iterations;
    if (res.status == lp::Status::Infeasible) return {true, std::nullopt};
    if (res.status == lp::Status::Unbounded) return {false, std::nullopt};
    return {false, res.objective + constant};
  }

  lp::Problem<Rational>& problem() { return p_; }

 private:
  const Model& m_;
  std::vector<Rational> fixed_;                   ///< value of each pinned u
  std::vector<std::optional<std::size_t>> column_;  ///< LP column of each x and free u
  lp::Problem<Rational> p_;
  bool contradiction_ = false;  ///< a row with no columns left is violated

  /// coeffsᵀ(x,u) <= rhs over full coordinates
  void add_row(const std::vector<Rational>& coeffs, Rational rhs) {
    lp::Row<Rational> r;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      if (coeffs[j] == 0) continue;
      if (column_[j])
        r.terms.emplace_back(*column_[j], coeffs[j]);
      else
        rhs -= coeffs[j] * fixed_[j - m_.nx()];
    }
    if (r.terms.empty()) {
      if (rhs < 0) contradiction_ = true;
      return;
    }
    r.rhs = rhs;
    p_.rows.push_back(std::move(r));
  }
};

/// Objective vector over (x, u) for aᵀF(x,u), and the constant aᵀc.
inline std::pair<std::vector<Rational>, Rational> successor_objective(const Model& m, const AffineMap& f,
                                                                      const std::vector<Rational>& a) {
  std::vector<Rational> obj(m.nx() + m.nu());
  Rational c = 0;
  for (std::size_t i = 0; i < m.nx(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < m.nx(); ++j) obj[j] += a[i] * f.A(i, j);
    for (std::size_t j = 0; j < m.nu(); ++j) obj[m.nx() + j] += a[i] * f.B(i, j);
    c += a[i] * f.c[i];
  }
  return {obj, c};
}

inline std::vector<Rational> negated(std::vector<Rational> v) {
  for (auto& x : v) x = -x;
  return v;
}

}  // namespace detail

/// Range of aᵀF_ℓ(x,u) over all exits of block ℓ. Both ends empty and
/// `any` false when the block can never leave the guard.
struct ExitRange {
  bool any = false;
  Range range;
};

inline ExitRange exit_range(const Model& m, const std::vector<Rational>& a, std::size_t l, SolverStats& stats,
                            std::size_t limit = kDefaultEnumerationLimit) {
  ExitRange out;
  const AffineMap& f = m.blocks[l].map;
  const auto [obj, c] = detail::successor_objective(m, f, a);
  bool lo_inf = false, hi_inf = false;
  for (const auto& sc : support_cases(m, l, limit)) {
    detail::Region r(m, &sc);
    r.add_exit(f);
    const auto hi = r.maximize(obj, c, stats);
    if (hi.empty) continue;
    const auto lo = r.maximize(detail::negated(obj), -c, stats);
    out.any = true;
    if (!hi.value)
      hi_inf = true;
    else if (!out.range.hi || *hi.value > *out.range.hi)
      out.range.hi = hi.value;
    if (!lo.value)
      lo_inf = true;
    else if (!out.range.lo || -*lo.value < *out.range.lo)
      out.range.lo = -*lo.value;
  }
  if (lo_inf) out.range.lo.reset();
  if (hi_inf) out.range.hi.reset();
  return out;
}

/// max over the guard and the support of |aᵀx − aᵀF_ℓ(x,u)|; nullopt if unbounded.
inline std::optional<Rational> step_bound(const Model& m, const std::vector<Rational>& a, std::size_t l,
                                          SolverStats& stats, std::size_t limit = kDefaultEnumerationLimit) {
  const AffineMap& f = m.blocks[l].map;
  auto [obj, c] = detail::successor_objective(m, f, a);
  // aᵀx − aᵀF = (a − Aᵀa)ᵀx − (Bᵀa)ᵀu − aᵀc
  std::vector<Rational> diff = detail::negated(obj);
  for (std::size_t i = 0; i < m.nx(); ++i) diff[i] += a[i];
  Rational best = 0;
  for (const auto& sc : support_cases(m, l, limit)) {
    detail::Region r(m, &sc);
    for (int sign : {1, -1}) {
      std::vector<Rational> o = diff;
      if (sign < 0) o = detail::negated(o);
      const auto s = r.maximize(o, Rational(-sign) * c, stats);
      if (s.empty) break;
      if (!s.value) return std::nullopt;
      best = std::max(best, *s.value);
    }
  }
  return best;
}

/// Drift expression δ_ℓ(x) = h(x) − E h(F_ℓ(x,u)) − E R_ℓ, which is affine:
/// coefficients over x and a constant.
inline std::pair<std::vector<Rational>, Rational> drift_expr(const Model& m, const std::vector<Rational>& a,
                                                             std::size_t l) {
  const auto eu = expected_update(m.blocks[l].map, m.distributions);
  std::vector<Rational> coeffs(a);
  Rational c = -reward_expectation(m.blocks[l].reward, m.distributions);
  for (std::size_t i = 0; i < m.nx(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < m.nx(); ++j) coeffs[j] -= a[i] * eu.A(i, j);
    c -= a[i] * eu.offset[i];
  }
  return {coeffs, c};
}

/// min over the guard of ±δ_ℓ (+ for the ≥ direction); nullopt if −∞.
/// Nonnegative means the drift condition holds.
inline std::optional<Rational> drift_slack(const Model& m, const std::vector<Rational>& a, std::size_t l,
                                           certgen::Direction dir, SolverStats& stats) {
  auto [coeffs, c] = drift_expr(m, a, l);
  if (dir == certgen::Direction::Le) {
    coeffs = detail::negated(coeffs);
    c = -c;
  }
  std::vector<Rational> obj = detail::negated(coeffs);
  obj.resize(m.nx() + m.nu());
  detail::Region r(m, nullptr);
  const auto s = r.maximize(obj, -c, stats);
  if (s.empty) return Rational(0);  // empty guard, nothing to check
  if (!s.value) return std::nullopt;
  return -*s.value;
}

/// For ∀x in guard ∃ℓ: ±δ_ℓ(x) >= 0. Returns −max_x min_ℓ ±δ_ℓ(x) capped
/// at −1, i.e. a nonnegative value iff no guard point violates every block.
inline Rational disjunctive_drift_slack(const Model& m, const std::vector<Rational>& a, certgen::Direction dir,
                                        SolverStats& stats) {
  detail::Region r(m, nullptr);
  auto& p = r.problem();
  const std::size_t t = p.add_var(false);
  for (std::size_t l = 0; l < m.k(); ++l) {
    auto [coeffs, c] = drift_expr(m, a, l);
    if (dir == certgen::Direction::Le) {
      coeffs = detail::negated(coeffs);
      c = -c;
    }
    // violation −(±δ) >= t   <=>   ±δ(x) + t <= 0
    lp::Row<Rational> row;
    for (std::size_t j = 0; j < m.nx(); ++j)
      if (coeffs[j] != 0) row.terms.emplace_back(j, coeffs[j]);
    row.terms.emplace_back(t, Rational(1));
    row.rhs = -c;
    p.rows.push_back(std::move(row));
  }
  lp::Row<Rational> cap;
  cap.terms = {{t, Rational(1)}};
  cap.rhs = 1;
  p.rows.push_back(std::move(cap));
  std::vector<Rational> obj(p.num_vars);
  obj[t] = 1;
  const auto s = r.maximize_lp(obj, 0, stats);
  if (s.empty || !s.value) return 0;
  return -*s.value;
}

struct ConditionCheck {
  std::string name;
  std::optional<std::size_t> block;  ///< 0-based
  bool pass = true;
  std::optional<Rational> slack;  ///< nullopt: unbounded violation
  std::string message() const {
    std::ostringstream os;
    os << name;
    if (block) os << " for block " << *block + 1;
    return os.str();
  }
  friend bool operator==(const ConditionCheck&, const ConditionCheck&) = default;
};

struct VerificationReport {
  bool pass = true;
  std::vector<ConditionCheck> checks;
  SolverStats stats;

  std::string first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return c.message() + " violated";
    return "";
  }
};

struct VerifyOptions {
  Rational tolerance = 0;  ///< slack >= −tolerance passes
  std::size_t enumeration_limit = kDefaultEnumerationLimit;
};

/// Checks every condition the certificate's problem and side require.
inline VerificationReport verify_certificate(const Model& m, const BoundCertificate& cert,
                                             const VerifyOptions& opt = {}) {
  VerificationReport rep;
  const Rational& tol = opt.tolerance;
  auto add = [&](std::string name, std::optional<std::size_t> block, std::optional<Rational> slack) {
    ConditionCheck c{std::move(name), block, slack && *slack >= -tol, slack};
    rep.pass = rep.pass && c.pass;
    rep.checks.push_back(std::move(c));
  };
  if (cert.a.size() != m.nx()) {
    add("certificate arity", std::nullopt, std::nullopt);
    return rep;
  }
  add("exit range ordering K <= K'", std::nullopt, cert.Kprime - cert.K);
  add("step bound M >= 0", std::nullopt, cert.M);

  for (std::size_t l = 0; l < m.k(); ++l) {
    const auto er = exit_range(m, cert.a, l, rep.stats, opt.enumeration_limit);
    if (!er.any) continue;
    // K <= h(F) <= K′ with h(F) = aᵀF + b
    add("exit range lower end", l, er.range.lo ? std::optional<Rational>(*er.range.lo + cert.b - cert.K) : std::nullopt);
    add("exit range upper end", l,
        er.range.hi ? std::optional<Rational>(cert.Kprime - cert.b - *er.range.hi) : std::nullopt);
  }

  const auto shape = certgen::condition_shape(cert.problem, cert.side);
  if (shape.all_blocks) {
    for (std::size_t l = 0; l < m.k(); ++l) add("drift condition", l, drift_slack(m, cert.a, l, shape.drift, rep.stats));
  } else if (cert.choice) {
    add("drift condition", *cert.choice, drift_slack(m, cert.a, *cert.choice, shape.drift, rep.stats));
  } else {
    add("drift condition (some block at every point)", std::nullopt,
        disjunctive_drift_slack(m, cert.a, shape.drift, rep.stats));
  }

  for (std::size_t l = 0; l < m.k(); ++l) {
    const auto s = step_bound(m, cert.a, l, rep.stats, opt.enumeration_limit);
    add("bounded difference", l, s ? std::optional<Rational>(cert.M - *s) : std::nullopt);
  }
  return rep;
}

}  // namespace sspbound::solve
