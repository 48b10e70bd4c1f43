#pragma once

// Double-precision copy of a model for fast execution. Each block keeps the
// list of distributions it actually reads so unused ones are not sampled.

#include "sspbound/rational.hpp"
#include "sspbound/semantics/model.hpp"

#include <algorithm>
#include <vector>

namespace sspbound::oracle {

struct NumericDistribution {
  bool uniform = false;
  std::vector<std::size_t> vars;
  std::vector<std::vector<double>> values;  ///< per outcome
  std::vector<double> probs;
  std::vector<double> cumulative;
  double lo = 0, hi = 0;

  /// Writes the sampled values into u by inverse transform.
  void sample(double r, std::vector<double>& u) const {
    if (uniform) {
      u[vars[0]] = lo + r * (hi - lo);
      return;
    }
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    std::size_t o = static_cast<std::size_t>(it - cumulative.begin());
    if (o >= values.size()) o = values.size() - 1;
    for (std::size_t i = 0; i < vars.size(); ++i) u[vars[i]] = values[o][i];
  }
};

struct NumericBlock {
  std::vector<double> A, B, c;  ///< row-major nx×nx, nx×nu
  std::vector<double> reward;   ///< per sampling variable
  double reward_constant = 0;
  std::vector<std::size_t> reads;  ///< distributions read by update or reward
};

struct NumericModel {
  std::size_t nx = 0, nu = 0;
  std::vector<double> guard;
  double guard_rhs = 0;
  bool strict = false;
  std::vector<NumericBlock> blocks;
  std::vector<NumericDistribution> dists;

  bool in_guard(const std::vector<double>& x) const {
    double s = 0;
    for (std::size_t i = 0; i < nx; ++i) s += guard[i] * x[i];
    return strict ? s < guard_rhs : s <= guard_rhs;
  }

  /// Applies block l in place; returns the reward.
  double step(std::size_t l, std::vector<double>& x, const std::vector<double>& u, std::vector<double>& scratch) const {
    const auto& b = blocks[l];
    scratch.assign(nx, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
      double v = b.c[i];
      for (std::size_t j = 0; j < nx; ++j) v += b.A[i * nx + j] * x[j];
      for (std::size_t j = 0; j < nu; ++j) v += b.B[i * nu + j] * u[j];
      scratch[i] = v;
    }
    double r = b.reward_constant;
    for (std::size_t j = 0; j < nu; ++j) r += b.reward[j] * u[j];
    x.swap(scratch);
    return r;
  }
};

inline NumericModel to_numeric(const Model& m) {
  NumericModel n;
  n.nx = m.nx();
  n.nu = m.nu();
  for (const auto& g : m.guard.coeffs) n.guard.push_back(to_double(g));
  n.guard_rhs = to_double(m.guard.rhs);
  n.strict = m.guard.strict;
  for (const auto& d : m.distributions) {
    NumericDistribution nd;
    nd.uniform = d.kind == Distribution::Kind::Uniform;
    nd.vars = d.vars;
    nd.lo = to_double(d.lo);
    nd.hi = to_double(d.hi);
    Rational acc = 0;
    for (const auto& o : d.outcomes) {
      std::vector<double> vals;
      for (const auto& v : o.values) vals.push_back(to_double(v));
      nd.values.push_back(std::move(vals));
      nd.probs.push_back(to_double(o.prob));
      acc += o.prob;
      nd.cumulative.push_back(to_double(acc));
    }
    n.dists.push_back(std::move(nd));
  }
  const auto owner = m.owner_of_sampling_vars();
  for (const auto& b : m.blocks) {
    NumericBlock nb;
    for (std::size_t i = 0; i < n.nx; ++i) {
      for (std::size_t j = 0; j < n.nx; ++j) nb.A.push_back(to_double(b.map.A(i, j)));
      for (std::size_t j = 0; j < n.nu; ++j) nb.B.push_back(to_double(b.map.B(i, j)));
      nb.c.push_back(to_double(b.map.c[i]));
    }
    nb.reward.assign(n.nu, 0.0);
    for (std::size_t j = 0; j < b.reward.coeffs.size(); ++j) nb.reward[j] = to_double(b.reward.coeffs[j]);
    nb.reward_constant = to_double(b.reward.constant);
    for (std::size_t j = 0; j < n.nu; ++j) {
      bool used = nb.reward[j] != 0;
      for (std::size_t i = 0; i < n.nx; ++i) used = used || nb.B[i * n.nu + j] != 0;
      if (used && std::find(nb.reads.begin(), nb.reads.end(), owner[j]) == nb.reads.end()) nb.reads.push_back(owner[j]);
    }
    std::sort(nb.reads.begin(), nb.reads.end());
    n.blocks.push_back(std::move(nb));
  }
  return n;
}

}  // namespace sspbound::oracle
