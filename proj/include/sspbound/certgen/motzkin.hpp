#pragma once

// Emptiness of G ∩ ⋂_ℓ {c_ℓ(θ)ᵀx > d_ℓ(θ)} for a nonempty polyhedron
// G = {x : A x <= g}. By Motzkin's transposition theorem it is empty iff
//   y, z >= 0,  Aᵀy - Σ z_ℓ c_ℓ(θ) = 0,  gᵀy - Σ z_ℓ d_ℓ(θ) <= 0,  1ᵀz >= ε.
// The products z_ℓ·θ make the system bilinear. Fixing z leaves a Farkas
// system in (θ, y); fixing θ leaves an LP in (y, z).

#include "sspbound/certgen/farkas.hpp"

#include <vector>

namespace sspbound::certgen {

struct BilinearSystem {
  Polyhedron guard;                       ///< closed, nonempty
  std::vector<ParamHalfSpace> disjuncts;  ///< at least one must hold at every point of guard
  Rational epsilon = 1;
  std::size_t num_unknowns = 0;

  /// Bilinear terms, as (multiplier index ℓ, unknown index j, coefficient
  /// of z_ℓ·θ_j) in equality row i. Mostly for inspection and tests.
  struct Product {
    std::size_t row, z, theta;
    Rational coeff;
  };
  std::vector<Product> products() const {
    std::vector<Product> out;
    for (std::size_t i = 0; i <= guard.dim; ++i)
      for (std::size_t l = 0; l < disjuncts.size(); ++l) {
        const UnknownAffine& u = i < guard.dim ? disjuncts[l].coeffs[i] : disjuncts[l].rhs;
        for (std::size_t j = 0; j < u.coeffs.size(); ++j)
          if (u.coeffs[j] != 0) out.push_back({i, l, j, -u.coeffs[j]});
      }
    return out;
  }

  /// The half-space Σ z_ℓ (c_ℓ, d_ℓ) for fixed z.
  ParamHalfSpace combine(const std::vector<Rational>& z) const {
    ParamHalfSpace h;
    h.coeffs.assign(guard.dim, UnknownAffine(num_unknowns));
    h.rhs = UnknownAffine(num_unknowns);
    for (std::size_t l = 0; l < disjuncts.size(); ++l) {
      if (z[l] == 0) continue;
      for (std::size_t i = 0; i < guard.dim; ++i) h.coeffs[i] += z[l] * disjuncts[l].coeffs[i];
      h.rhs += z[l] * disjuncts[l].rhs;
    }
    return h;
  }

  /// With z fixed the system is the Farkas system of guard ⊆ combine(z).
  LinearConstraintSystem fix_multipliers(const std::vector<Rational>& z, Tag tag) const {
    InclusionAssertion a{guard, combine(z), tag, 0, 0};
    return farkas_transform(a, num_unknowns);
  }

  struct MultiplierStep {
    bool feasible = false;
    double slack = 0;  ///< largest t with gᵀy - Σ z d + t <= 0
    std::vector<double> z;
  };

  /// With θ fixed, finds z (normalized to 1ᵀz = 1) maximizing the slack.
  /// feasible means slack >= -tol, i.e. the emptiness certificate exists.
  MultiplierStep fix_unknowns(const std::vector<double>& theta, double tol = 1e-7) const {
    lp::Problem<double> p;
    std::vector<std::size_t> y, z;
    for (std::size_t r = 0; r < guard.rows.size(); ++r) y.push_back(p.add_var(true));
    for (std::size_t l = 0; l < disjuncts.size(); ++l) z.push_back(p.add_var(true));
    const std::size_t t = p.add_var(false);
    p.objective[t] = 1;
    p.sense = lp::Sense::Maximize;
    for (std::size_t i = 0; i < guard.dim; ++i) {
      lp::Row<double> row;
      row.rel = lp::Relation::Equal;
      for (std::size_t r = 0; r < guard.rows.size(); ++r)
        if (guard.rows[r].coeffs[i] != 0) row.terms.emplace_back(y[r], to_double(guard.rows[r].coeffs[i]));
      for (std::size_t l = 0; l < disjuncts.size(); ++l) {
        const double c = disjuncts[l].coeffs[i].eval(theta);
        if (c != 0) row.terms.emplace_back(z[l], -c);
      }
      if (!row.terms.empty()) p.rows.push_back(std::move(row));
    }
    lp::Row<double> ineq;
    for (std::size_t r = 0; r < guard.rows.size(); ++r) ineq.terms.emplace_back(y[r], to_double(guard.rows[r].rhs));
    for (std::size_t l = 0; l < disjuncts.size(); ++l) ineq.terms.emplace_back(z[l], -disjuncts[l].rhs.eval(theta));
    ineq.terms.emplace_back(t, 1.0);
    p.rows.push_back(std::move(ineq));
    lp::Row<double> norm;
    norm.rel = lp::Relation::Equal;
    norm.rhs = 1;
    for (auto zl : z) norm.terms.emplace_back(zl, 1.0);
    p.rows.push_back(std::move(norm));
    // keep the slack bounded; only its sign matters beyond this
    lp::Row<double> cap;
    cap.terms.emplace_back(t, 1.0);
    cap.rhs = 1e6;
    p.rows.push_back(std::move(cap));

    MultiplierStep out;
    const auto res = lp::solve(p);
    if (res.status != lp::Status::Optimal) return out;
    out.slack = res.objective;
    out.feasible = out.slack >= -tol;
    for (auto zl : z) out.z.push_back(res.x[zl]);
    return out;
  }
};

inline BilinearSystem motzkin_transform(const Polyhedron& guard, const std::vector<ParamHalfSpace>& disjuncts,
                                        std::size_t num_unknowns, Rational epsilon = 1) {
  BilinearSystem s;
  s.guard = guard.closure();
  s.disjuncts = disjuncts;
  s.epsilon = std::move(epsilon);
  s.num_unknowns = num_unknowns;
  return s;
}

}  // namespace sspbound::certgen
