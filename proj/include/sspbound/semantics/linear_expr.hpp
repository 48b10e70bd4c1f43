#pragma once

#include "sspbound/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace sspbound {

/// Affine expression Σ coeff·var + constant over named variables, exact.
/// Zero coefficients are never stored.
struct LinearExpr {
  std::map<std::string, Rational> terms;
  Rational constant = 0;

  static LinearExpr constant_of(Rational c) {
    LinearExpr e;
    e.constant = std::move(c);
    return e;
  }
  static LinearExpr variable(const std::string& name, Rational coeff = 1) {
    LinearExpr e;
    if (coeff != 0) e.terms.emplace(name, std::move(coeff));
    return e;
  }

  bool is_constant() const { return terms.empty(); }

  Rational coeff(const std::string& name) const {
    auto it = terms.find(name);
    return it == terms.end() ? Rational(0) : it->second;
  }

  LinearExpr& operator+=(const LinearExpr& o) {
    for (const auto& [name, c] : o.terms) {
      Rational& slot = terms[name];
      slot += c;
      if (slot == 0) terms.erase(name);
    }
    constant += o.constant;
    return *this;
  }
  LinearExpr& operator-=(const LinearExpr& o) { return *this += o * Rational(-1); }
  LinearExpr& operator*=(const Rational& k) {
    if (k == 0) {
      terms.clear();
      constant = 0;
      return *this;
    }
    for (auto& [name, c] : terms) c *= k;
    constant *= k;
    return *this;
  }

  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
  friend LinearExpr operator*(LinearExpr a, const Rational& k) { return a *= k; }
  friend LinearExpr operator*(const Rational& k, LinearExpr a) { return a *= k; }
  friend bool operator==(const LinearExpr& a, const LinearExpr& b) {
    return a.constant == b.constant && a.terms == b.terms;
  }

  /// Replaces each variable that has a binding by its bound expression.
  LinearExpr substitute(const std::map<std::string, LinearExpr>& binding) const {
    LinearExpr out = constant_of(constant);
    for (const auto& [name, c] : terms) {
      auto it = binding.find(name);
      if (it == binding.end())
        out += variable(name, c);
      else
        out += it->second * c;
    }
    return out;
  }

  /// Dense coefficient vector in the given variable order; names outside
  /// `order` are ignored.
  std::vector<Rational> dense(const std::vector<std::string>& order) const {
    std::vector<Rational> out(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) out[i] = coeff(order[i]);
    return out;
  }
};

}  // namespace sspbound
