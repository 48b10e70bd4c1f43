#pragma once

// Truncated value iteration on the integer lattice inside a box. States
// outside the guard are terminal (value 0). Successors that land outside
// the box get a fixed value: the caller's boundary function (usually a
// certificate) or 0 with a warning.

#include "sspbound/certgen/assertion.hpp"
#include "sspbound/oracle/numeric.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sspbound::oracle {

using certgen::Objective;

class UnsupportedModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Box {
  std::vector<long> lo, hi;  ///< inclusive, per program variable
};

struct ValueIterationOptions {
  double tolerance = 1e-6;
  std::size_t max_sweeps = 1000000;
  std::size_t max_states = 4000000;
  std::size_t max_outcomes = 4096;  ///< joint support size per block
  std::function<double(const std::vector<double>&)> boundary;  ///< value outside the box
};

struct ValueTable {
  Box box;
  Objective sense = Objective::Sup;
  std::vector<double> values;       ///< per lattice point; 0 outside the guard
  std::vector<std::size_t> policy;  ///< greedy block per lattice point
  std::vector<bool> live;           ///< lattice point inside the guard
  std::size_t sweeps = 0;
  bool converged = false;
  std::vector<std::string> warnings;

  std::optional<std::size_t> index(const std::vector<long>& x) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < box.lo.size(); ++i) {
      if (x[i] < box.lo[i] || x[i] > box.hi[i]) return std::nullopt;
      idx = idx * static_cast<std::size_t>(box.hi[i] - box.lo[i] + 1) + static_cast<std::size_t>(x[i] - box.lo[i]);
    }
    return idx;
  }

  /// Lattice point nearest to x, clamped into the box.
  std::vector<long> clamp(const std::vector<double>& x) const {
    std::vector<long> p(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      p[i] = std::min(box.hi[i], std::max(box.lo[i], static_cast<long>(std::llround(x[i]))));
    return p;
  }

  std::optional<double> value_at(const std::vector<long>& x) const {
    const auto i = index(x);
    if (!i) return std::nullopt;
    return values[*i];
  }
};

namespace detail {

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

struct Transition {
  double prob;
  double reward;
  std::vector<double> u;
};

/// Joint outcomes of the distributions block l reads.
inline std::vector<Transition> block_outcomes(const NumericModel& n, std::size_t l, std::size_t limit) {
  std::vector<Transition> out{{1.0, 0.0, std::vector<double>(n.nu, 0.0)}};
  for (auto d : n.blocks[l].reads) {
    const auto& dist = n.dists[d];
    std::vector<Transition> next;
    for (const auto& t : out)
      for (std::size_t o = 0; o < dist.values.size(); ++o) {
        Transition s = t;
        s.prob *= dist.probs[o];
        for (std::size_t i = 0; i < dist.vars.size(); ++i) s.u[dist.vars[i]] = dist.values[o][i];
        next.push_back(std::move(s));
      }
    out = std::move(next);
    if (out.size() > limit) throw UnsupportedModel("value iteration: joint support of a block is too large");
  }
  const auto& b = n.blocks[l];
  for (auto& t : out) {
    t.reward = b.reward_constant;
    for (std::size_t j = 0; j < n.nu; ++j) t.reward += b.reward[j] * t.u[j];
  }
  return out;
}

}  // namespace detail

/// Throws UnsupportedModel unless every block maps lattice points to
/// lattice points (integer A, B, c and integer discrete supports).
inline void require_lattice(const Model& m) {
  for (const auto& d : m.distributions) {
    if (d.kind == Distribution::Kind::Uniform)
      throw UnsupportedModel("value iteration needs discrete distributions; use simulate");
    for (const auto& o : d.outcomes)
      for (const auto& v : o.values)
        if (!detail::is_integer(v)) throw UnsupportedModel("value iteration needs integer support values; use simulate");
  }
  for (const auto& b : m.blocks) {
    for (std::size_t i = 0; i < m.nx(); ++i) {
      if (!detail::is_integer(b.map.c[i])) throw UnsupportedModel("value iteration needs integer updates; use simulate");
      for (std::size_t j = 0; j < m.nx(); ++j)
        if (!detail::is_integer(b.map.A(i, j)))
          throw UnsupportedModel("value iteration needs integer updates; use simulate");
      for (std::size_t j = 0; j < m.nu(); ++j)
        if (!detail::is_integer(b.map.B(i, j)))
          throw UnsupportedModel("value iteration needs integer updates; use simulate");
    }
  }
}

inline ValueTable value_iteration(const Model& m, const Box& box, Objective sense, const ValueIterationOptions& opt = {}) {
  require_lattice(m);
  if (box.lo.size() != m.nx() || box.hi.size() != m.nx()) throw std::invalid_argument("box arity does not match the model");
  const NumericModel n = to_numeric(m);
  ValueTable vt;
  vt.box = box;
  vt.sense = sense;

  std::size_t total = 1;
  std::vector<std::size_t> extent;
  for (std::size_t i = 0; i < n.nx; ++i) {
    if (box.hi[i] < box.lo[i]) throw std::invalid_argument("empty box");
    extent.push_back(static_cast<std::size_t>(box.hi[i] - box.lo[i] + 1));
    total *= extent.back();
    if (total > opt.max_states) throw UnsupportedModel("value iteration: box has too many lattice points");
  }

  auto point = [&](std::size_t idx) {
    std::vector<double> x(n.nx);
    for (std::size_t i = n.nx; i-- > 0;) {
      x[i] = static_cast<double>(box.lo[i] + static_cast<long>(idx % extent[i]));
      idx /= extent[i];
    }
    return x;
  };

  std::vector<std::vector<detail::Transition>> outcomes;
  for (std::size_t l = 0; l < n.blocks.size(); ++l) outcomes.push_back(detail::block_outcomes(n, l, opt.max_outcomes));

  // Per live state and block: constant part (expected reward plus fixed
  // successor values) and the in-box successors.
  struct Edge {
    std::size_t target;
    double prob;
  };
  struct Choice {
    double constant = 0;
    std::vector<Edge> edges;
  };
  vt.values.assign(total, 0.0);
  vt.policy.assign(total, 0);
  vt.live.assign(total, false);
  std::vector<std::vector<Choice>> choices(total);
  bool leaked = false;
  std::vector<double> scratch;
  for (std::size_t s = 0; s < total; ++s) {
    const auto x = point(s);
    if (!n.in_guard(x)) continue;
    vt.live[s] = true;
    choices[s].resize(n.blocks.size());
    for (std::size_t l = 0; l < n.blocks.size(); ++l) {
      Choice& ch = choices[s][l];
      for (const auto& t : outcomes[l]) {
        std::vector<double> y = x;
        n.step(l, y, t.u, scratch);
        ch.constant += t.prob * t.reward;
        if (!n.in_guard(y)) continue;
        std::vector<long> p(n.nx);
        for (std::size_t i = 0; i < n.nx; ++i) p[i] = std::llround(y[i]);
        const auto idx = vt.index(p);
        if (idx) {
          ch.edges.push_back({*idx, t.prob});
        } else if (opt.boundary) {
          ch.constant += t.prob * opt.boundary(y);
        } else {
          leaked = true;
        }
      }
    }
  }
  if (leaked) vt.warnings.push_back("successors outside the box are scored as 0 (no boundary function given)");

  const bool sup = sense == Objective::Sup;
  for (vt.sweeps = 0; vt.sweeps < opt.max_sweeps;) {
    ++vt.sweeps;
    double change = 0;
    for (std::size_t s = 0; s < total; ++s) {
      if (!vt.live[s]) continue;
      double best = 0;
      std::size_t arg = 0;
      for (std::size_t l = 0; l < choices[s].size(); ++l) {
        double v = choices[s][l].constant;
        for (const auto& e : choices[s][l].edges) v += e.prob * vt.values[e.target];
        if (l == 0 || (sup ? v > best : v < best)) {
          best = v;
          arg = l;
        }
      }
      change = std::max(change, std::fabs(best - vt.values[s]));
      vt.values[s] = best;
      vt.policy[s] = arg;
    }
    if (!std::isfinite(change)) break;
    if (change < opt.tolerance) {
      vt.converged = true;
      break;
    }
  }
  if (!vt.converged) vt.warnings.push_back("value iteration did not converge");
  return vt;
}

}  // namespace sspbound::oracle
