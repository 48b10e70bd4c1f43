#pragma once

// Exact oracles for polyhedron-in-halfspace inclusion and for emptiness of
// a polyhedron minus a union of open half-spaces, plus the randomized
// comparisons against the Farkas and Motzkin transforms.

#include "sspbound/certgen/farkas.hpp"
#include "sspbound/certgen/motzkin.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>

namespace inclusion {

using namespace sspbound;
using namespace sspbound::certgen;
using Vec = std::vector<Rational>;

inline bool feasible(const LinearConstraintSystem& sys) {
  return lp::solve(sys.to_lp({}, lp::Sense::Minimize)).status != lp::Status::Infeasible;
}

/// Feasibility with some unknowns pinned to values.
inline bool feasible_at(LinearConstraintSystem sys, const std::map<std::size_t, Rational>& pinned) {
  for (const auto& [j, v] : pinned) {
    LinearConstraintSystem::Constraint c;
    c.terms[j] = 1;
    c.rel = lp::Relation::Equal;
    c.rhs = v;
    sys.constraints.push_back(c);
  }
  return feasible(sys);
}

inline LinearConstraintSystem system_of(const std::vector<InclusionAssertion>& as, std::size_t n) {
  LinearConstraintSystem sys;
  sys.num_unknowns = n;
  for (const auto& a : as) sys.append(farkas_transform(a, n));
  return sys;
}

inline HalfSpace row(Vec c, Rational rhs) { return HalfSpace{std::move(c), std::move(rhs), false}; }

inline ParamHalfSpace numeric(const Vec& c, const Rational& d) {
  ParamHalfSpace h;
  for (const auto& v : c) h.coeffs.push_back(UnknownAffine(0, v));
  h.rhs = UnknownAffine(0, d);
  return h;
}

// ---- exact enumeration oracle ------------------------------------------

/// Gauss-Jordan on an augmented matrix; returns pivot columns among the
/// first `ncols`.
inline std::vector<std::size_t> rref(std::vector<Vec>& m, std::size_t ncols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    const Rational piv = m[r][c];
    for (auto& v : m[r]) v /= piv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (std::size_t j = 0; j < m[i].size(); ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline void subsets(std::size_t m, std::size_t k, std::vector<std::size_t>& cur, std::size_t from,
             const std::function<void(const std::vector<std::size_t>&)>& f) {
  if (cur.size() == k) {
    f(cur);
    return;
  }
  for (std::size_t i = from; i < m; ++i) {
    cur.push_back(i);
    subsets(m, k, cur, i + 1, f);
    cur.pop_back();
  }
}

inline Rational dot(const Vec& a, const Vec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Generators {
  std::vector<Vec> vertices, rays;
};

/// Vertices and extreme rays of a pointed polyhedron {x : A x <= g}.
inline Generators generators(const Polyhedron& p) {
  const std::size_t n = p.dim, m = p.rows.size();
  Generators out;
  std::vector<std::size_t> cur;
  subsets(m, n, cur, 0, [&](const std::vector<std::size_t>& s) {
    std::vector<Vec> mat;
    for (auto i : s) {
      Vec r = p.rows[i].coeffs;
      r.push_back(p.rows[i].rhs);
      mat.push_back(r);
    }
    if (rref(mat, n).size() < n) return;
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = mat[i][n];
    if (p.contains(x)) out.vertices.push_back(x);
  });
  subsets(m, n - 1, cur, 0, [&](const std::vector<std::size_t>& s) {
    std::vector<Vec> mat;
    for (auto i : s) mat.push_back(p.rows[i].coeffs);
    const auto piv = rref(mat, n);
    if (piv.size() != n - 1) return;
    std::size_t free = 0;
    while (std::find(piv.begin(), piv.end(), free) != piv.end()) ++free;
    Vec r(n);
    r[free] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) r[piv[i]] = -mat[i][free];
    for (int sign : {1, -1}) {
      Vec d = r;
      for (auto& v : d) v *= sign;
      bool ok = true;
      for (const auto& h : p.rows) ok = ok && dot(h.coeffs, d) <= 0;
      if (ok) out.rays.push_back(d);
    }
  });
  return out;
}

inline std::size_t rank(const Polyhedron& p) {
  std::vector<Vec> mat;
  for (const auto& h : p.rows) mat.push_back(h.coeffs);
  return rref(mat, p.dim).size();
}

/// Random nonempty pointed polyhedron with at most 4 variables and 6 rows.
inline Polyhedron random_polyhedron(std::mt19937& rng, Generators& gens) {
  std::uniform_int_distribution<int> coef(-4, 4), rhs(-4, 8);
  for (;;) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(n, 6)(rng);
    Polyhedron p{n, {}};
    for (std::size_t i = 0; i < m; ++i) {
      Vec c(n);
      for (auto& v : c) v = coef(rng);
      p.rows.push_back(row(c, rhs(rng)));
    }
    if (rank(p) < n) continue;
    gens = generators(p);
    if (!gens.vertices.empty()) return p;
  }
}

/// Inclusion of P in {cᵀx <= d} decided from the generators.
inline bool included(const Generators& g, const Vec& c, const Rational& d) {
  for (const auto& r : g.rays)
    if (dot(c, r) > 0) return false;
  for (const auto& v : g.vertices)
    if (dot(c, v) > d) return false;
  return true;
}

/// Random points of P (convex combination of vertices plus a conic
/// combination of rays); true if one of them leaves the half-space.
inline bool sample_violation(std::mt19937& rng, const Generators& g, const Vec& c, const Rational& d, int samples) {
  std::uniform_real_distribution<double> w(0.0, 1.0);
  const std::size_t n = c.size();
  std::vector<std::vector<double>> vs, rs;
  for (const auto& v : g.vertices) vs.push_back(to_double(v));
  for (const auto& r : g.rays) rs.push_back(to_double(r));
  const auto cd = to_double(c);
  const double dd = to_double(d);
  for (int s = 0; s < samples; ++s) {
    std::vector<double> x(n, 0.0);
    double total = 0;
    std::vector<double> lam(vs.size());
    for (auto& l : lam) total += (l = w(rng));
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) x[j] += lam[i] / total * vs[i][j];
    for (const auto& r : rs) {
      const double mu = 100 * w(rng);
      for (std::size_t j = 0; j < n; ++j) x[j] += mu * r[j];
    }
    double v = 0;
    for (std::size_t j = 0; j < n; ++j) v += cd[j] * x[j];
    if (v > dd + 1e-9) return true;
  }
  return false;
}

struct Tally {
  int instances = 0, disagreements = 0, positive = 0, negative = 0;
};

/// Farkas transform feasibility against vertex/ray enumeration, with point
/// sampling as a second witness for violations.
inline Tally farkas_trials(std::uint32_t seed, int count, int samples = 10000) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coef(-4, 4), off(-6, 12);
  Tally t;
  for (int iter = 0; iter < count; ++iter) {
    Generators g;
    const Polyhedron p = random_polyhedron(rng, g);
    Vec c(p.dim);
    for (auto& v : c) v = coef(rng);
    Rational d = off(rng);
    if (iter % 3 == 0 && g.rays.empty()) {
      // boundary case: d equal to the maximum, sometimes just below
      d = dot(c, g.vertices[0]);
      for (const auto& v : g.vertices) d = std::max(d, dot(c, v));
      if (iter % 2) d -= Rational(1, 1000);
    }
    const bool truth = included(g, c, d);
    const bool sampled_violation = sample_violation(rng, g, c, d, samples);
    const bool transform = feasible(farkas_transform({p, numeric(c, d), Tag::DriftGe, 0, 0}, 0));
    ++t.instances;
    if (transform != truth || (sampled_violation && truth)) ++t.disagreements;
    (truth ? t.positive : t.negative)++;
  }
  return t;
}

/// Motzkin transform feasibility against an exact margin LP: the set
/// P minus the open half-spaces {c_l x < d_l} is empty iff max s with
/// c_l x >= d_l + s over P is <= 0.
inline Tally motzkin_trials(std::uint32_t seed, int count) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coef(-4, 4), off(-6, 8);
  Tally t;
  for (int iter = 0; iter < count; ++iter) {
    Generators g;
    const Polyhedron p = random_polyhedron(rng, g);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    std::vector<Vec> cs;
    std::vector<Rational> ds;
    std::vector<ParamHalfSpace> hs;
    for (std::size_t l = 0; l < k; ++l) {
      Vec c(p.dim);
      for (auto& v : c) v = coef(rng);
      cs.push_back(c);
      ds.push_back(off(rng));
      hs.push_back(numeric(c, ds.back()));
    }
    lp::Problem<Rational> q;
    for (std::size_t j = 0; j < p.dim; ++j) q.add_var(false);
    const std::size_t s = q.add_var(false);
    for (const auto& h : p.rows) {
      lp::Row<Rational> r;
      for (std::size_t j = 0; j < p.dim; ++j)
        if (h.coeffs[j] != 0) r.terms.emplace_back(j, h.coeffs[j]);
      r.rhs = h.rhs;
      q.rows.push_back(r);
    }
    for (std::size_t l = 0; l < k; ++l) {
      lp::Row<Rational> r;
      for (std::size_t j = 0; j < p.dim; ++j)
        if (cs[l][j] != 0) r.terms.emplace_back(j, -cs[l][j]);
      r.terms.emplace_back(s, Rational(1));
      r.rhs = -ds[l];
      q.rows.push_back(r);
    }
    q.rows.push_back(lp::Row<Rational>{{{s, Rational(1)}}, lp::Relation::LessEq, Rational(1)});
    q.objective[s] = 1;
    q.sense = lp::Sense::Maximize;
    const auto res = lp::solve(q);
    ++t.instances;
    if (res.status != lp::Status::Optimal) {
      ++t.disagreements;
      continue;
    }
    const bool is_empty = res.objective <= 0;
    const bool cert = motzkin_transform(p, hs, 0).fix_unknowns({}).feasible;
    if (cert != is_empty) ++t.disagreements;
    (is_empty ? t.positive : t.negative)++;
  }
  return t;
}

}  // namespace inclusion
