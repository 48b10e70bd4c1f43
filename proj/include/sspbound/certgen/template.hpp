#pragma once

// Linear potential template h(x) = aᵀx + b together with the scalars K, K′
// and M. All of them are unknowns; expressions over the unknowns are kept
// exact as UnknownAffine.

#include "sspbound/rational.hpp"
#include "sspbound/semantics/model.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace sspbound::certgen {

/// Unknown vector layout: a_1..a_n, b, K, K′, M.
struct PotentialTemplate {
  std::size_t n = 0;
  std::vector<std::string> names;

  std::size_t size() const { return n + 4; }
  std::size_t a(std::size_t i) const { return i; }
  std::size_t b() const { return n; }
  std::size_t K() const { return n + 1; }
  std::size_t Kprime() const { return n + 2; }
  std::size_t M() const { return n + 3; }
};

inline PotentialTemplate build_template(const Model& model) {
  if (model.nx() == 0) throw std::invalid_argument("template needs at least one program variable");
  PotentialTemplate t;
  t.n = model.nx();
  for (const auto& v : model.program_vars) t.names.push_back("a_" + v);
  t.names.insert(t.names.end(), {"b", "K", "K'", "M"});
  return t;
}

/// constant + Σ coeffs[j]·θ_j.
struct UnknownAffine {
  std::vector<Rational> coeffs;
  Rational constant = 0;

  UnknownAffine() = default;
  explicit UnknownAffine(std::size_t n, Rational c = 0) : coeffs(n), constant(std::move(c)) {}

  static UnknownAffine unknown(std::size_t n, std::size_t j, Rational scale = 1) {
    UnknownAffine u(n);
    u.coeffs[j] = std::move(scale);
    return u;
  }

  bool is_zero() const {
    if (constant != 0) return false;
    for (const auto& c : coeffs)
      if (c != 0) return false;
    return true;
  }
  bool is_constant() const {
    for (const auto& c : coeffs)
      if (c != 0) return false;
    return true;
  }

  template <class T>
  T eval(const std::vector<T>& theta) const {
    T v = static_cast<T>(constant);
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      if (coeffs[j] != 0) v += static_cast<T>(coeffs[j]) * theta[j];
    return v;
  }

  UnknownAffine& operator+=(const UnknownAffine& o) {
    if (coeffs.size() < o.coeffs.size()) coeffs.resize(o.coeffs.size());
    for (std::size_t j = 0; j < o.coeffs.size(); ++j) coeffs[j] += o.coeffs[j];
    constant += o.constant;
    return *this;
  }
  UnknownAffine& operator*=(const Rational& k) {
    for (auto& c : coeffs) c *= k;
    constant *= k;
    return *this;
  }
  friend UnknownAffine operator+(UnknownAffine x, const UnknownAffine& y) { return x += y; }
  friend UnknownAffine operator-(UnknownAffine x, UnknownAffine y) { return x += (y *= Rational(-1)); }
  friend UnknownAffine operator*(const Rational& k, UnknownAffine x) { return x *= k; }
  friend UnknownAffine operator-(UnknownAffine x) { return x *= Rational(-1); }
  friend bool operator==(const UnknownAffine&, const UnknownAffine&) = default;

  std::string str(const std::vector<std::string>& names) const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      if (coeffs[j] == 0) continue;
      os << (first ? (coeffs[j] < 0 ? "-" : "") : (coeffs[j] < 0 ? " - " : " + "));
      if (abs(coeffs[j]) != 1) os << to_display(abs(coeffs[j]));
      os << names[j];
      first = false;
    }
    if (constant != 0 || first) os << (first ? (constant < 0 ? "-" : "") : (constant < 0 ? " - " : " + "))
                                   << to_display(abs(constant));
    return os.str();
  }
};

/// Σ_i coeffs[i](θ)·v_i <= rhs(θ) over a numeric variable vector v.
struct ParamHalfSpace {
  std::vector<UnknownAffine> coeffs;
  UnknownAffine rhs;

  HalfSpace instantiate(const std::vector<Rational>& theta) const {
    HalfSpace h;
    for (const auto& c : coeffs) h.coeffs.push_back(c.eval(theta));
    h.rhs = rhs.eval(theta);
    return h;
  }
  bool coeffs_vanish() const {
    for (const auto& c : coeffs)
      if (!c.is_zero()) return false;
    return true;
  }
  friend bool operator==(const ParamHalfSpace&, const ParamHalfSpace&) = default;
};

}  // namespace sspbound::certgen
