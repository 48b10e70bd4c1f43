#pragma once

// Farkas' lemma: for nonempty P = {v : A v <= b},
//   P ⊆ {cᵀv <= d}  iff  ∃ y >= 0 : Aᵀy = c, bᵀy <= d.
// With c, d affine in the template unknowns θ this is linear in (θ, y).

#include "sspbound/certgen/assertion.hpp"
#include "sspbound/solve/simplex.hpp"

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace sspbound::certgen {

/// Feasibility of the closure of p, decided by an exact phase-1 solve.
inline bool check_nonempty(const Polyhedron& p) {
  lp::Problem<Rational> prob;
  for (std::size_t j = 0; j < p.dim; ++j) prob.add_var(false);
  for (const auto& h : p.rows) {
    lp::Row<Rational> r;
    for (std::size_t j = 0; j < h.coeffs.size(); ++j)
      if (h.coeffs[j] != 0) r.terms.emplace_back(j, h.coeffs[j]);
    r.rhs = h.rhs;
    prob.rows.push_back(std::move(r));
  }
  return lp::solve(prob).status != lp::Status::Infeasible;
}

/// Linear constraints over θ (the first `num_unknowns` variables, free)
/// and multipliers (the rest, all >= 0).
struct LinearConstraintSystem {
  struct Constraint {
    std::map<std::size_t, Rational> terms;
    lp::Relation rel = lp::Relation::LessEq;
    Rational rhs = 0;
    std::string origin;
    friend bool operator==(const Constraint& a, const Constraint& b) {
      return a.terms == b.terms && a.rel == b.rel && a.rhs == b.rhs;
    }
  };

  std::size_t num_unknowns = 0;
  std::size_t num_multipliers = 0;
  std::vector<Constraint> constraints;
  std::vector<std::string> audit;

  std::size_t num_vars() const { return num_unknowns + num_multipliers; }
  std::size_t add_multiplier() { return num_unknowns + num_multipliers++; }

  /// Adds a constraint unless an identical one that only involves θ is
  /// already present.
  void add(Constraint c) {
    bool theta_only = true;
    for (const auto& [j, v] : c.terms)
      if (j >= num_unknowns) theta_only = false;
    if (c.terms.empty()) {
      const bool ok = c.rel == lp::Relation::Equal ? c.rhs == 0 : c.rhs >= 0;
      if (ok) return;
    }
    if (theta_only) {
      std::ostringstream key;
      key << static_cast<int>(c.rel) << '|' << c.rhs;
      for (const auto& [j, v] : c.terms) key << '|' << j << ':' << v;
      if (!seen_.insert(key.str()).second) return;
    }
    constraints.push_back(std::move(c));
  }

  void append(const LinearConstraintSystem& other) {
    // multipliers of `other` are renumbered after ours
    const std::size_t shift = num_multipliers;
    num_multipliers += other.num_multipliers;
    for (const auto& c : other.constraints) {
      Constraint d = c;
      d.terms.clear();
      for (const auto& [j, v] : c.terms) d.terms[j >= num_unknowns ? j + shift : j] = v;
      add(std::move(d));
    }
    audit.insert(audit.end(), other.audit.begin(), other.audit.end());
  }

  /// Numeric LP with the given objective over θ.
  lp::Problem<double> to_lp(const std::vector<Rational>& objective, lp::Sense sense) const {
    lp::Problem<double> p;
    for (std::size_t j = 0; j < num_unknowns; ++j) p.add_var(false);
    for (std::size_t j = 0; j < num_multipliers; ++j) p.add_var(true);
    for (std::size_t j = 0; j < objective.size(); ++j) p.objective[j] = to_double(objective[j]);
    p.sense = sense;
    for (const auto& c : constraints) {
      lp::Row<double> r;
      r.rel = c.rel;
      r.rhs = to_double(c.rhs);
      for (const auto& [j, v] : c.terms) r.terms.emplace_back(j, to_double(v));
      p.rows.push_back(std::move(r));
    }
    return p;
  }

 private:
  std::set<std::string> seen_;
};

inline std::string describe(const InclusionAssertion& a) {
  std::ostringstream os;
  os << describe(a.tag) << " for block " << a.block + 1;
  return os.str();
}

/// terms += scale · (θ-part of u).
inline void add_affine(std::map<std::size_t, Rational>& terms, const UnknownAffine& u, const Rational& scale) {
  for (std::size_t j = 0; j < u.coeffs.size(); ++j)
    if (u.coeffs[j] != 0) {
      Rational& slot = terms[j];
      slot += scale * u.coeffs[j];
      if (slot == 0) terms.erase(j);
    }
}

/// Multiplier system for one inclusion assertion. An empty lhs makes the
/// assertion vacuous; it then contributes nothing but an audit note.
inline LinearConstraintSystem farkas_transform(const InclusionAssertion& a, std::size_t num_unknowns) {
  LinearConstraintSystem sys;
  sys.num_unknowns = num_unknowns;
  const std::string origin = describe(a);

  Polyhedron lhs{a.lhs.dim, {}};
  for (const auto& h : a.lhs.rows)
    if (!h.trivial()) lhs.rows.push_back(h.closure());
  bool empty = false;
  for (const auto& h : a.lhs.rows)
    if (h.trivial() && h.rhs < 0) empty = true;
  if (empty || !check_nonempty(lhs)) {
    std::ostringstream os;
    os << origin << " (support case " << a.point + 1 << ") is vacuous: its premise set is empty";
    sys.audit.push_back(os.str());
    return sys;
  }

  using C = LinearConstraintSystem::Constraint;
  if (a.rhs.coeffs_vanish()) {
    // 0 <= d(θ) on a nonempty set
    C c;
    add_affine(c.terms, a.rhs.rhs, -1);
    c.rhs = a.rhs.rhs.constant;
    c.origin = origin;
    sys.add(std::move(c));
    return sys;
  }

  std::vector<std::size_t> y;
  for (std::size_t r = 0; r < lhs.rows.size(); ++r) y.push_back(sys.add_multiplier());
  for (std::size_t i = 0; i < lhs.dim; ++i) {
    // Σ_r A(r,i) y_r - c_i(θ) = c_i.constant
    C c;
    c.rel = lp::Relation::Equal;
    for (std::size_t r = 0; r < lhs.rows.size(); ++r)
      if (lhs.rows[r].coeffs[i] != 0) c.terms[y[r]] = lhs.rows[r].coeffs[i];
    add_affine(c.terms, a.rhs.coeffs[i], -1);
    c.rhs = a.rhs.coeffs[i].constant;
    c.origin = origin;
    sys.add(std::move(c));
  }
  // Σ_r b_r y_r - d(θ) <= d.constant
  C c;
  for (std::size_t r = 0; r < lhs.rows.size(); ++r)
    if (lhs.rows[r].rhs != 0) c.terms[y[r]] = lhs.rows[r].rhs;
  add_affine(c.terms, a.rhs.rhs, -1);
  c.rhs = a.rhs.rhs.constant;
  c.origin = origin;
  sys.add(std::move(c));
  return sys;
}

}  // namespace sspbound::certgen
