#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sspbound {

/// Exact rational scalar used by the frontend, the semantic model and the
/// constraint generator. Floating point only enters inside the LP engine.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact conversion (every finite double is a dyadic rational).
inline Rational from_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite value has no rational form");
  return Rational(v);
}

/// Parses an unsigned decimal literal such as "12", "0.4" or "3.25" exactly.
inline Rational parse_decimal(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  BigInt num = 0;
  BigInt den = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char ch : text) {
    if (ch == '.') {
      if (seen_dot) throw std::invalid_argument("malformed number '" + std::string(text) + "'");
      seen_dot = true;
      continue;
    }
    if (ch < '0' || ch > '9') throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    seen_digit = true;
    num = num * 10 + (ch - '0');
    if (seen_dot) den *= 10;
  }
  if (!seen_digit) throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  return Rational(num, den);
}

/// Parses "p", "-p" or "p/q" (integers) as written by to_string.
inline Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  std::string head(text.substr(0, slash));
  bool neg = !head.empty() && head.front() == '-';
  if (neg) head.erase(0, 1);
  Rational value = parse_decimal(head);
  if (slash != std::string_view::npos) {
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    value /= den;
  }
  return neg ? Rational(-value) : value;
}

/// Exact text form: "p" or "p/q".
inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Human-facing form: terminating decimals are printed as decimals ("2.5"),
/// everything else as a fraction ("11/13").
inline std::string to_display(const Rational& r) {
  BigInt den = denominator(r);
  int twos = 0;
  int fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1) return to_string(r);
  int digits = std::max(twos, fives);
  if (digits == 0) return numerator(r).str();
  BigInt scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  BigInt scaled = numerator(r * Rational(scale));
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string s = scaled.str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
  s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  return neg ? "-" + s : s;
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

/// Closest rational p/q to v with q <= max_den (continued-fraction convergents
/// and semiconvergents).
inline Rational best_rational(double v, std::int64_t max_den) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite value");
  const Rational target = from_double(v);
  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Rational rest = target;
  Rational best = 0;
  for (int iter = 0; iter < 64; ++iter) {
    BigInt a = numerator(rest) / denominator(rest);
    if (numerator(rest) < 0 && numerator(rest) % denominator(rest) != 0) a -= 1;  // floor
    BigInt q2 = a * q1 + q0;
    if (q2 > max_den) {
      // largest semiconvergent that still fits
      BigInt t = (BigInt(max_den) - q0) / q1;
      Rational semi(t * p1 + p0, t * q1 + q0);
      Rational conv(p1, q1);
      best = abs(semi - target) < abs(conv - target) ? semi : conv;
      return best;
    }
    BigInt p2 = a * p1 + p0;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    best = Rational(p1, q1);
    Rational frac = rest - Rational(a);
    if (frac == 0) return best;
    rest = 1 / frac;
  }
  return best;
}

inline std::vector<double> to_double(const std::vector<Rational>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& r : v) out.push_back(to_double(r));
  return out;
}

}  // namespace sspbound
