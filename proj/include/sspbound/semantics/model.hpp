#pragma once

// Exact affine/polyhedral model of a succinct MDP: a single while loop whose
// guard is one linear comparison and whose body is a nondeterministic choice
// among blocks, each an affine update of the program variables driven by
// freshly sampled variables.

#include "sspbound/rational.hpp"
#include "sspbound/semantics/linear_expr.hpp"
#include "sspbound/semantics/matrix.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sspbound {

/// coeffsᵀv <= rhs (or < rhs when strict).
struct HalfSpace {
  std::vector<Rational> coeffs;
  Rational rhs = 0;
  bool strict = false;

  bool contains(const std::vector<Rational>& v) const {
    Rational lhs = 0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) lhs += coeffs[i] * v[i];
    return strict ? lhs < rhs : lhs <= rhs;
  }
  HalfSpace closure() const { return HalfSpace{coeffs, rhs, false}; }
  bool trivial() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& c) { return c == 0; });
  }
  friend bool operator==(const HalfSpace&, const HalfSpace&) = default;
};

/// Complement of a half-space: ¬(gᵀx <= t) is gᵀx > t, stored as -gᵀx < -t.
inline HalfSpace negate_guard(const HalfSpace& g) {
  HalfSpace out;
  out.coeffs.reserve(g.coeffs.size());
  for (const auto& c : g.coeffs) out.coeffs.push_back(-c);
  out.rhs = -g.rhs;
  out.strict = !g.strict;
  return out;
}

/// Conjunction of half-spaces over a common variable vector; no rows means
/// the whole space.
struct Polyhedron {
  std::size_t dim = 0;
  std::vector<HalfSpace> rows;

  bool contains(const std::vector<Rational>& v) const {
    return std::all_of(rows.begin(), rows.end(), [&](const HalfSpace& h) { return h.contains(v); });
  }
  Polyhedron closure() const {
    Polyhedron p{dim, {}};
    for (const auto& h : rows) p.rows.push_back(h.closure());
    return p;
  }
};

/// F(x, u) = A·x + B·u + c.
struct AffineMap {
  Matrix<Rational> A;
  Matrix<Rational> B;
  std::vector<Rational> c;

  static AffineMap identity(std::size_t nx, std::size_t nu) {
    return AffineMap{Matrix<Rational>::identity(nx), Matrix<Rational>(nx, nu), std::vector<Rational>(nx)};
  }

  std::vector<Rational> apply(const std::vector<Rational>& x, const std::vector<Rational>& u) const {
    auto out = A.apply(x);
    auto bu = B.apply(u);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bu[i] + c[i];
    return out;
  }

  /// The map that applies *this first and `next` afterwards (same sample u).
  AffineMap then(const AffineMap& next) const {
    AffineMap out;
    out.A = next.A * A;
    out.B = next.A * B + next.B;
    out.c = next.A.apply(c);
    for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] += next.c[i];
    return out;
  }

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

struct Interval {
  Rational lo = 0;
  Rational hi = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Outcome {
  std::vector<Rational> values;  ///< one value per variable of the distribution
  Rational prob;
};

/// Distribution of one sampling variable or of a tuple of them (joint discrete).
struct Distribution {
  enum class Kind { Discrete, Uniform };
  Kind kind = Kind::Discrete;
  std::vector<std::size_t> vars;  ///< indices into the sampling-variable order
  std::vector<Outcome> outcomes;  ///< Discrete only
  Rational lo = 0, hi = 0;        ///< Uniform only (scalar)

  std::vector<Rational> mean() const {
    if (kind == Kind::Uniform) return {(lo + hi) / 2};
    std::vector<Rational> m(vars.size());
    for (const auto& o : outcomes)
      for (std::size_t i = 0; i < vars.size(); ++i) m[i] += o.prob * o.values[i];
    return m;
  }

  std::vector<Interval> hull() const {
    if (kind == Kind::Uniform) return {Interval{lo, hi}};
    std::vector<Interval> h(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
      h[i].lo = h[i].hi = outcomes.front().values[i];
      for (const auto& o : outcomes) {
        h[i].lo = std::min(h[i].lo, o.values[i]);
        h[i].hi = std::max(h[i].hi, o.values[i]);
      }
    }
    return h;
  }
};

/// Reward collected by one loop iteration of block `block`: an affine
/// function of the sampled values only.
struct RewardExpr {
  std::vector<Rational> coeffs;
  Rational constant = 0;
  std::size_t block = 0;

  Rational eval(const std::vector<Rational>& u) const {
    Rational r = constant;
    for (std::size_t i = 0; i < coeffs.size(); ++i) r += coeffs[i] * u[i];
    return r;
  }
};

struct Block {
  AffineMap map;
  RewardExpr reward;
};

struct Model {
  std::vector<std::string> program_vars;
  std::vector<std::string> sampling_vars;
  HalfSpace guard;  ///< over program variables
  std::vector<Block> blocks;
  std::vector<Distribution> distributions;
  std::optional<std::vector<Rational>> init;

  std::size_t nx() const { return program_vars.size(); }
  std::size_t nu() const { return sampling_vars.size(); }
  std::size_t k() const { return blocks.size(); }

  std::optional<std::size_t> program_index(const std::string& name) const {
    auto it = std::find(program_vars.begin(), program_vars.end(), name);
    if (it == program_vars.end()) return std::nullopt;
    return static_cast<std::size_t>(it - program_vars.begin());
  }

  /// Index of the distribution owning each sampling variable.
  std::vector<std::size_t> owner_of_sampling_vars() const {
    std::vector<std::size_t> owner(nu(), static_cast<std::size_t>(-1));
    for (std::size_t d = 0; d < distributions.size(); ++d)
      for (auto v : distributions[d].vars) owner[v] = d;
    return owner;
  }
};

// ---------------------------------------------------------------------------
// Block transformers

/// One (possibly simultaneous) assignment: all right-hand sides are
/// evaluated before any target is written.
struct Assignment {
  std::vector<std::string> targets;
  std::vector<LinearExpr> values;
};

struct RewardStatement {
  LinearExpr value;
};

using LoweredStatement = std::variant<Assignment, RewardStatement>;

/// Symbolic execution of a straight-line block: every program variable's
/// final value and the accumulated reward, as affine expressions of the
/// values at block entry and of the sampled variables.
struct SymbolicResult {
  std::map<std::string, LinearExpr> state;  ///< only variables that were written
  LinearExpr reward;
};

inline SymbolicResult execute_symbolically(const std::vector<LoweredStatement>& stmts) {
  SymbolicResult res;
  for (const auto& s : stmts) {
    if (const auto* asg = std::get_if<Assignment>(&s)) {
      std::vector<LinearExpr> fresh;
      fresh.reserve(asg->values.size());
      for (const auto& v : asg->values) fresh.push_back(v.substitute(res.state));
      for (std::size_t i = 0; i < asg->targets.size(); ++i) res.state[asg->targets[i]] = fresh[i];
    } else {
      res.reward += std::get<RewardStatement>(s).value.substitute(res.state);
    }
  }
  return res;
}

/// Affine map reading off the final state of a symbolic execution.
inline AffineMap affine_map_of(const SymbolicResult& res, const std::vector<std::string>& program_vars,
                               const std::vector<std::string>& sampling_vars) {
  const std::size_t nx = program_vars.size(), nu = sampling_vars.size();
  AffineMap f = AffineMap::identity(nx, nu);
  for (std::size_t i = 0; i < nx; ++i) {
    auto it = res.state.find(program_vars[i]);
    if (it == res.state.end()) continue;
    const LinearExpr& e = it->second;
    for (std::size_t j = 0; j < nx; ++j) f.A(i, j) = e.coeff(program_vars[j]);
    for (std::size_t j = 0; j < nu; ++j) f.B(i, j) = e.coeff(sampling_vars[j]);
    f.c[i] = e.constant;
  }
  return f;
}

/// Affine map of a sequence of assignments, applied left to right with
/// substitution (later assignments see earlier results).
inline AffineMap compose_block(const std::vector<Assignment>& assignments, const std::vector<std::string>& program_vars,
                               const std::vector<std::string>& sampling_vars) {
  std::vector<LoweredStatement> stmts(assignments.begin(), assignments.end());
  return affine_map_of(execute_symbolically(stmts), program_vars, sampling_vars);
}

// ---------------------------------------------------------------------------
// Distribution statistics

/// Mean of every sampling variable, in sampling-variable order.
inline std::vector<Rational> mean_vector(const std::vector<Distribution>& dists, std::size_t nu) {
  std::vector<Rational> mu(nu);
  for (const auto& d : dists) {
    const auto m = d.mean();
    for (std::size_t i = 0; i < d.vars.size(); ++i) mu[d.vars[i]] = m[i];
  }
  return mu;
}

/// Per-variable interval hull of the joint support.
inline std::vector<Interval> support_hull(const std::vector<Distribution>& dists, std::size_t nu) {
  std::vector<Interval> h(nu);
  for (const auto& d : dists) {
    const auto dh = d.hull();
    for (std::size_t i = 0; i < d.vars.size(); ++i) h[d.vars[i]] = dh[i];
  }
  return h;
}

/// x ↦ A·x + B·μ + c: the expected successor valuation.
struct ExpectedUpdate {
  Matrix<Rational> A;
  std::vector<Rational> offset;

  std::vector<Rational> apply(const std::vector<Rational>& x) const {
    auto out = A.apply(x);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += offset[i];
    return out;
  }
};

inline ExpectedUpdate expected_update(const AffineMap& map, const std::vector<Distribution>& dists) {
  const auto mu = mean_vector(dists, map.B.cols());
  ExpectedUpdate e{map.A, map.B.apply(mu)};
  for (std::size_t i = 0; i < e.offset.size(); ++i) e.offset[i] += map.c[i];
  return e;
}

/// Expected one-step reward; the reward is affine so this is its value at the mean.
inline Rational reward_expectation(const RewardExpr& r, const std::vector<Distribution>& dists) {
  return r.eval(mean_vector(dists, r.coeffs.size()));
}

/// max over blocks and over the support hull of |reward|.
inline Rational reward_bound(const Model& model) {
  const auto hull = support_hull(model.distributions, model.nu());
  Rational best = 0;
  for (const auto& b : model.blocks) {
    Rational hi = b.reward.constant, lo = b.reward.constant;
    for (std::size_t i = 0; i < model.nu(); ++i) {
      const Rational& c = b.reward.coeffs[i];
      if (c == 0) continue;
      Rational a = c * hull[i].lo, z = c * hull[i].hi;
      hi += std::max(a, z);
      lo += std::min(a, z);
    }
    best = std::max({best, abs(hi), abs(lo)});
  }
  return best;
}

// ---------------------------------------------------------------------------
// Support representation used to quantify over sampled values

/// One way of quantifying over u for a given block: sampling variables with a
/// value in `fixed` are pinned to that support point; the others listed in
/// `free_vars` range over their hull interval.
struct SupportCase {
  std::vector<std::optional<Rational>> fixed;  ///< indexed by sampling variable
  std::vector<std::size_t> free_vars;          ///< used by the block, ranging over the hull
};

inline constexpr std::size_t kDefaultEnumerationLimit = 16;

/// Sampling variables the block's update actually reads.
inline std::vector<std::size_t> used_sampling_vars(const AffineMap& map) {
  std::vector<std::size_t> used;
  for (std::size_t j = 0; j < map.B.cols(); ++j)
    for (std::size_t i = 0; i < map.B.rows(); ++i)
      if (map.B(i, j) != 0) {
        used.push_back(j);
        break;
      }
  return used;
}

/// Support points of the discrete distributions a block reads are enumerated
/// when their joint count is at most `limit`; otherwise (and for uniform
/// variables) the hull interval is used.
inline std::vector<SupportCase> support_cases(const Model& model, std::size_t block,
                                              std::size_t limit = kDefaultEnumerationLimit) {
  const auto used = used_sampling_vars(model.blocks.at(block).map);
  const auto owner = model.owner_of_sampling_vars();
  std::vector<std::size_t> discrete_dists;
  for (auto v : used) {
    const auto d = owner[v];
    if (model.distributions[d].kind == Distribution::Kind::Discrete &&
        std::find(discrete_dists.begin(), discrete_dists.end(), d) == discrete_dists.end())
      discrete_dists.push_back(d);
  }
  std::size_t count = 1;
  for (auto d : discrete_dists) {
    count *= model.distributions[d].outcomes.size();
    if (count > limit) break;
  }
  const bool enumerate = count <= limit;

  SupportCase base;
  base.fixed.assign(model.nu(), std::nullopt);
  for (auto v : used) {
    const bool pinned = enumerate && model.distributions[owner[v]].kind == Distribution::Kind::Discrete;
    if (!pinned) base.free_vars.push_back(v);
  }
  std::vector<SupportCase> cases{base};
  if (!enumerate) return cases;
  for (auto d : discrete_dists) {
    const auto& dist = model.distributions[d];
    std::vector<SupportCase> next;
    for (const auto& partial : cases)
      for (const auto& o : dist.outcomes) {
        SupportCase c = partial;
        for (std::size_t i = 0; i < dist.vars.size(); ++i) c.fixed[dist.vars[i]] = o.values[i];
        next.push_back(std::move(c));
      }
    cases = std::move(next);
  }
  return cases;
}

}  // namespace sspbound
