#pragma once

// Certificate conditions as inclusion assertions lhs ⊆ rhs. The lhs is a
// numeric polyhedron over v = (x, u) (program variables then sampling
// variables); the rhs is one half-space whose coefficients are affine in
// the template unknowns.
//
//   exit range   K <= h(F(x,u)) <= K′   for x in guard, F(x,u) outside it
//   drift        h(x) >= E h(F(x,u)) + E R   (or <= for lower bounds)
//   step bound   |h(x) - h(F(x,u))| <= M

#include "sspbound/certgen/template.hpp"
#include "sspbound/semantics/model.hpp"

#include <string>
#include <vector>

namespace sspbound::certgen {

enum class Objective { Sup, Inf };
enum class Side { Upper, Lower };
enum class Direction { Ge, Le };  ///< drift h >= E[...] (Ge) or h <= E[...] (Le)

inline const char* to_string(Objective p) { return p == Objective::Sup ? "supval" : "infval"; }
inline const char* to_string(Side s) { return s == Side::Upper ? "upper" : "lower"; }

/// Drift direction and block quantifier for each problem/side pair.
struct ConditionShape {
  Direction drift;
  bool all_blocks;  ///< drift for every block (true) or for some block (false)
};

inline ConditionShape condition_shape(Objective p, Side s) {
  if (p == Objective::Sup) return s == Side::Upper ? ConditionShape{Direction::Ge, true} : ConditionShape{Direction::Le, false};
  return s == Side::Lower ? ConditionShape{Direction::Le, true} : ConditionShape{Direction::Ge, false};
}

enum class Tag { ExitLower, ExitUpper, DriftGe, DriftLe, StepPlus, StepMinus };

inline const char* describe(Tag t) {
  switch (t) {
    case Tag::ExitLower: return "exit range lower end";
    case Tag::ExitUpper: return "exit range upper end";
    case Tag::DriftGe:
    case Tag::DriftLe: return "drift condition";
    case Tag::StepPlus:
    case Tag::StepMinus: return "bounded difference";
  }
  return "?";
}

struct InclusionAssertion {
  Polyhedron lhs;
  ParamHalfSpace rhs;
  Tag tag = Tag::DriftGe;
  std::size_t block = 0;
  std::size_t point = 0;  ///< support case index
};

namespace detail {

/// Guard closure lifted from x-space to (x, u)-space.
inline HalfSpace lift(const HalfSpace& g, std::size_t nu) {
  HalfSpace h = g.closure();
  h.coeffs.resize(h.coeffs.size() + nu);
  return h;
}

/// Substitutes pinned sampling values into a half-space over (x, u).
inline void pin(HalfSpace& h, const SupportCase& sc, std::size_t nx) {
  for (std::size_t j = 0; j < sc.fixed.size(); ++j) {
    if (!sc.fixed[j]) continue;
    h.rhs -= h.coeffs[nx + j] * *sc.fixed[j];
    h.coeffs[nx + j] = 0;
  }
}

inline void pin(ParamHalfSpace& h, const SupportCase& sc, std::size_t nx) {
  for (std::size_t j = 0; j < sc.fixed.size(); ++j) {
    if (!sc.fixed[j]) continue;
    h.rhs = h.rhs - *sc.fixed[j] * h.coeffs[nx + j];
    h.coeffs[nx + j] = UnknownAffine(h.rhs.coeffs.size());
  }
}

/// Box rows for the sampling variables left free in a support case.
inline void add_box(Polyhedron& p, const Model& m, const SupportCase& sc) {
  const auto hull = support_hull(m.distributions, m.nu());
  for (auto j : sc.free_vars) {
    HalfSpace up, lo;
    up.coeffs.assign(m.nx() + m.nu(), 0);
    lo.coeffs = up.coeffs;
    up.coeffs[m.nx() + j] = 1;
    up.rhs = hull[j].hi;
    lo.coeffs[m.nx() + j] = -1;
    lo.rhs = -hull[j].lo;
    p.rows.push_back(up);
    p.rows.push_back(lo);
  }
}

/// (Mᵀa) as a vector of UnknownAffine: entry i is Σ_r M(r, i)·a_r.
inline std::vector<UnknownAffine> transpose_times_a(const Matrix<Rational>& M, const PotentialTemplate& t) {
  std::vector<UnknownAffine> out(M.cols(), UnknownAffine(t.size()));
  for (std::size_t i = 0; i < M.cols(); ++i)
    for (std::size_t r = 0; r < M.rows(); ++r)
      if (M(r, i) != 0) out[i].coeffs[t.a(r)] += M(r, i);
  return out;
}

/// aᵀv for a numeric vector v.
inline UnknownAffine a_dot(const std::vector<Rational>& v, const PotentialTemplate& t) {
  UnknownAffine out(t.size());
  for (std::size_t r = 0; r < v.size(); ++r) out.coeffs[t.a(r)] = v[r];
  return out;
}

/// Coefficients of h(F(x, u)) over (x, u) and its constant part aᵀc + b.
struct SuccessorPotential {
  std::vector<UnknownAffine> coeffs;  ///< (Aᵀa, Bᵀa)
  UnknownAffine constant;             ///< aᵀc + b
};

inline SuccessorPotential successor_potential(const AffineMap& f, const PotentialTemplate& t) {
  SuccessorPotential s;
  s.coeffs = transpose_times_a(f.A, t);
  auto bu = transpose_times_a(f.B, t);
  s.coeffs.insert(s.coeffs.end(), bu.begin(), bu.end());
  s.constant = a_dot(f.c, t) + UnknownAffine::unknown(t.size(), t.b());
  return s;
}

}  // namespace detail

inline std::vector<InclusionAssertion> encode_c2(const Model& m, const PotentialTemplate& t,
                                                 std::size_t enumeration_limit = kDefaultEnumerationLimit) {
  std::vector<InclusionAssertion> out;
  const std::size_t nx = m.nx(), nu = m.nu();
  for (std::size_t l = 0; l < m.k(); ++l) {
    const AffineMap& f = m.blocks[l].map;
    const auto hf = detail::successor_potential(f, t);
    // closure of the complement at F(x,u): -g·(Ax + Bu + c) <= -t
    HalfSpace exit;
    exit.coeffs.assign(nx + nu, 0);
    for (std::size_t i = 0; i < nx; ++i) {
      const Rational gi = m.guard.coeffs[i];
      if (gi == 0) continue;
      for (std::size_t j = 0; j < nx; ++j) exit.coeffs[j] -= gi * f.A(i, j);
      for (std::size_t j = 0; j < nu; ++j) exit.coeffs[nx + j] -= gi * f.B(i, j);
      exit.rhs += gi * f.c[i];
    }
    exit.rhs -= m.guard.rhs;

    const auto cases = support_cases(m, l, enumeration_limit);
    for (std::size_t p = 0; p < cases.size(); ++p) {
      Polyhedron lhs{nx + nu, {detail::lift(m.guard, nu), exit}};
      for (auto& row : lhs.rows) detail::pin(row, cases[p], nx);
      detail::add_box(lhs, m, cases[p]);

      // K - h(F) <= 0
      ParamHalfSpace lo;
      for (const auto& c : hf.coeffs) lo.coeffs.push_back(-c);
      lo.rhs = hf.constant - UnknownAffine::unknown(t.size(), t.K());
      // h(F) - K′ <= 0
      ParamHalfSpace hi;
      hi.coeffs = hf.coeffs;
      hi.rhs = UnknownAffine::unknown(t.size(), t.Kprime()) - hf.constant;
      detail::pin(lo, cases[p], nx);
      detail::pin(hi, cases[p], nx);
      out.push_back({lhs, lo, Tag::ExitLower, l, p});
      out.push_back({lhs, hi, Tag::ExitUpper, l, p});
    }
  }
  return out;
}

inline InclusionAssertion encode_c3(const Model& m, const PotentialTemplate& t, std::size_t l, Direction dir) {
  const std::size_t nx = m.nx(), nu = m.nu();
  const AffineMap& f = m.blocks.at(l).map;
  const ExpectedUpdate eu = expected_update(f, m.distributions);
  const Rational er = reward_expectation(m.blocks[l].reward, m.distributions);

  // (A - I)ᵀa · x <= -aᵀ(Bμ + c) - E R     for h >= E h(F) + E R
  auto ax = detail::transpose_times_a(f.A, t);
  for (std::size_t i = 0; i < nx; ++i) ax[i].coeffs[t.a(i)] -= 1;
  UnknownAffine d = -detail::a_dot(eu.offset, t);
  d.constant -= er;

  ParamHalfSpace h;
  const Rational sign = dir == Direction::Ge ? 1 : -1;
  for (auto& c : ax) h.coeffs.push_back(sign * c);
  h.coeffs.resize(nx + nu, UnknownAffine(t.size()));
  h.rhs = sign * d;
  return {Polyhedron{nx + nu, {detail::lift(m.guard, nu)}}, h, dir == Direction::Ge ? Tag::DriftGe : Tag::DriftLe, l,
          0};
}

inline std::vector<InclusionAssertion> encode_c4(const Model& m, const PotentialTemplate& t,
                                                 std::size_t enumeration_limit = kDefaultEnumerationLimit) {
  std::vector<InclusionAssertion> out;
  const std::size_t nx = m.nx(), nu = m.nu();
  for (std::size_t l = 0; l < m.k(); ++l) {
    const auto hf = detail::successor_potential(m.blocks[l].map, t);
    // h(x) - h(F) = aᵀx - (Aᵀa)ᵀx - (Bᵀa)ᵀu - aᵀc - b + b
    std::vector<UnknownAffine> diff(nx + nu);
    for (std::size_t i = 0; i < nx + nu; ++i) diff[i] = -hf.coeffs[i];
    for (std::size_t i = 0; i < nx; ++i) diff[i].coeffs[t.a(i)] += 1;
    const UnknownAffine ac = hf.constant - UnknownAffine::unknown(t.size(), t.b());
    const UnknownAffine M = UnknownAffine::unknown(t.size(), t.M());

    const auto cases = support_cases(m, l, enumeration_limit);
    for (std::size_t p = 0; p < cases.size(); ++p) {
      Polyhedron lhs{nx + nu, {detail::lift(m.guard, nu)}};
      detail::add_box(lhs, m, cases[p]);
      ParamHalfSpace plus{diff, M + ac};
      ParamHalfSpace minus;
      for (const auto& c : diff) minus.coeffs.push_back(-c);
      minus.rhs = M - ac;
      detail::pin(plus, cases[p], nx);
      detail::pin(minus, cases[p], nx);
      out.push_back({lhs, plus, Tag::StepPlus, l, p});
      out.push_back({lhs, minus, Tag::StepMinus, l, p});
    }
  }
  return out;
}

}  // namespace sspbound::certgen
