#pragma once

#include "sspbound/oracle/value_iteration.hpp"

#include <memory>
#include <stdexcept>
#include <string>

namespace sspbound::oracle {

/// Memoryless block choice.
struct Policy {
  enum class Kind { Always, Uniform, Greedy };
  Kind kind = Kind::Always;
  std::size_t block = 0;                    ///< Always: 0-based block
  std::shared_ptr<const ValueTable> table;  ///< Greedy: lookup, clamped into the box

  static Policy always(std::size_t l) { return Policy{Kind::Always, l, nullptr}; }
  static Policy uniform() { return Policy{Kind::Uniform, 0, nullptr}; }
  static Policy greedy(std::shared_ptr<const ValueTable> t) { return Policy{Kind::Greedy, 0, std::move(t)}; }

  /// r is a uniform draw in [0, 1), used by the uniform policy only.
  std::size_t choose(const std::vector<double>& x, double r, std::size_t k) const {
    switch (kind) {
      case Kind::Always: return block;
      case Kind::Uniform: return std::min(k - 1, static_cast<std::size_t>(r * static_cast<double>(k)));
      case Kind::Greedy: return table->policy[*table->index(table->clamp(x))];
    }
    return 0;
  }

  void check(std::size_t k) const {
    if (kind == Kind::Always && block >= k)
      throw std::invalid_argument("always(" + std::to_string(block + 1) + ") needs a block between 1 and " +
                                  std::to_string(k));
    if (kind == Kind::Greedy && !table) throw std::invalid_argument("greedy policy needs a value table");
  }

  std::string name() const {
    switch (kind) {
      case Kind::Always: return "always(" + std::to_string(block + 1) + ")";
      case Kind::Uniform: return "uniform";
      case Kind::Greedy: return std::string("greedy-") + to_string(table->sense);
    }
    return "?";
  }
};

}  // namespace sspbound::oracle
