#pragma once

#include "sspbound/certgen/assertion.hpp"
#include "sspbound/rational.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sspbound::solve {

using certgen::Objective;
using certgen::Side;

struct SolverStats {
  std::size_t iterations = 0;  ///< simplex pivots over all LPs
  std::size_t lp_count = 0;
  friend bool operator==(const SolverStats&, const SolverStats&) = default;
};

/// h(x) = aᵀx + b with the exit range [K, K′] and step bound M. The bound
/// is h − K for upper certificates and h − K′ for lower ones.
struct BoundCertificate {
  Objective problem = Objective::Sup;
  Side side = Side::Upper;
  std::vector<std::string> vars;
  std::vector<Rational> a;
  Rational b = 0, K = 0, Kprime = 0, M = 0;
  std::string strategy;               ///< "all-blocks", "fixed-choice(ℓ)" or "motzkin-bilinear"
  std::optional<std::size_t> choice;  ///< 0-based block for fixed-choice
  std::optional<std::vector<Rational>> init;
  bool exact = true;  ///< false when verified only within tolerance
  SolverStats stats;

  Rational offset() const { return side == Side::Upper ? Rational(b - K) : Rational(b - Kprime); }

  Rational bound_at(const std::vector<Rational>& x) const {
    Rational v = offset();
    for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * x[i];
    return v;
  }
  std::optional<Rational> value_at_init() const {
    if (!init) return std::nullopt;
    return bound_at(*init);
  }

  /// Bound as text, e.g. "2.5x - 2.5y + 5".
  std::string bound_expr() const {
    std::ostringstream os;
    bool first = true;
    auto term = [&](const Rational& c, const std::string& name) {
      if (c == 0) return;
      if (first)
        os << (c < 0 ? "-" : "");
      else
        os << (c < 0 ? " - " : " + ");
      const Rational m = abs(c);
      if (m != 1 || name.empty()) os << to_display(m);
      os << name;
      first = false;
    };
    for (std::size_t i = 0; i < a.size(); ++i) term(a[i], vars[i]);
    term(offset(), "");
    if (first) os << "0";
    return os.str();
  }

  friend bool operator==(const BoundCertificate&, const BoundCertificate&) = default;
};

}  // namespace sspbound::solve
