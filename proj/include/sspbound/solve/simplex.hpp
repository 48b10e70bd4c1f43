#pragma once

// Dense two-phase primal simplex on the standard-form tableau.
//
// The same code runs over double (constraint synthesis) and over Rational
// (exact geometric checks and certificate verification). Tolerances come from
// SimplexTolerances<T>; for Rational they are all zero.

#include "sspbound/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sspbound::lp {

enum class Relation { LessEq, Equal };
enum class Sense { Minimize, Maximize };
enum class Status { Optimal, Infeasible, Unbounded };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

template <class T>
struct Row {
  std::vector<std::pair<std::size_t, T>> terms;
  Relation rel = Relation::LessEq;
  T rhs{};
};

template <class T>
struct Problem {
  std::size_t num_vars = 0;
  std::vector<bool> nonneg;  ///< per variable: x >= 0 when true, free otherwise
  std::vector<Row<T>> rows;
  std::vector<T> objective;
  Sense sense = Sense::Minimize;

  std::size_t add_var(bool nonnegative) {
    nonneg.push_back(nonnegative);
    objective.emplace_back();
    return num_vars++;
  }
};

template <class T>
struct Result {
  Status status = Status::Infeasible;
  std::vector<T> x;
  T objective{};
  std::size_t iterations = 0;
  std::string diagnostic;  ///< non-empty when pivots were repeatedly rejected as too small
};

template <class T>
struct SimplexTolerances;

template <>
struct SimplexTolerances<double> {
  double feas = 1e-7;
  double opt = 1e-9;
  double piv = 1e-10;
};

template <>
struct SimplexTolerances<Rational> {
  Rational feas = 0;
  Rational opt = 0;
  Rational piv = 0;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), data_((rows + 1) * (cols + 1)) {}

  T& at(std::size_t r, std::size_t c) { return data_[r * (n_ + 1) + c]; }
  const T& at(std::size_t r, std::size_t c) const { return data_[r * (n_ + 1) + c]; }
  T& rhs(std::size_t r) { return at(r, n_); }
  T& cost(std::size_t c) { return at(m_, c); }
  T& cost_rhs() { return at(m_, n_); }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const T inv = T(1) / at(pr, pc);
    T* prow = &data_[pr * (n_ + 1)];
    for (std::size_t c = 0; c <= n_; ++c) prow[c] *= inv;
    prow[pc] = T(1);
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      T* row = &data_[r * (n_ + 1)];
      const T f = row[pc];
      if (f == T(0)) continue;
      for (std::size_t c = 0; c <= n_; ++c) {
        if (prow[c] != T(0)) row[c] -= f * prow[c];
      }
      row[pc] = T(0);
    }
  }

 private:
  std::size_t m_, n_;
  std::vector<T> data_;
};

template <class T>
T abs_value(const T& v) {
  return v < T(0) ? T(-v) : v;
}

}  // namespace detail

struct SimplexOptions {
  std::size_t max_iterations = 200000;
  std::size_t degenerate_switch = 50;  ///< consecutive degenerate pivots before Bland's rule
};

/// Solves the LP. Deterministic for a fixed input: Dantzig pricing with
/// lowest-index tie breaking, switching to Bland's rule while degenerate.
template <class T>
Result<T> solve(const Problem<T>& problem, const SimplexOptions& options = {},
                const SimplexTolerances<T>& tol = {}) {
  using detail::abs_value;
  const std::size_t nv = problem.num_vars;
  if (problem.nonneg.size() != nv || problem.objective.size() != nv)
    throw std::invalid_argument("lp::solve: inconsistent problem dimensions");

  // Column layout: one column per nonneg variable, two per free variable,
  // then one slack per inequality row, then artificials.
  std::vector<std::size_t> pos_col(nv), neg_col(nv, static_cast<std::size_t>(-1));
  std::size_t ncols = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    pos_col[j] = ncols++;
    if (!problem.nonneg[j]) neg_col[j] = ncols++;
  }
  const std::size_t m = problem.rows.size();
  std::vector<std::size_t> slack_col(m, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < m; ++i)
    if (problem.rows[i].rel == Relation::LessEq) slack_col[i] = ncols++;
  const std::size_t first_art = ncols;

  // Which rows need an artificial: equalities, and inequalities whose rhs is negative.
  std::vector<bool> flip(m, false), needs_art(m, false);
  std::size_t nart = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = problem.rows[i];
    flip[i] = row.rhs < T(0);
    needs_art[i] = row.rel == Relation::Equal || flip[i];
    if (needs_art[i]) ++nart;
  }
  const std::size_t total_cols = first_art + nart;

  detail::Tableau<T> tab(m, total_cols);
  std::vector<std::size_t> basis(m);
  {
    std::size_t art = first_art;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = problem.rows[i];
      const T sign = flip[i] ? T(-1) : T(1);
      for (const auto& [j, v] : row.terms) {
        if (j >= nv) throw std::invalid_argument("lp::solve: variable index out of range");
        tab.at(i, pos_col[j]) += sign * v;
        if (neg_col[j] != static_cast<std::size_t>(-1)) tab.at(i, neg_col[j]) -= sign * v;
      }
      if (slack_col[i] != static_cast<std::size_t>(-1)) tab.at(i, slack_col[i]) = sign;
      tab.rhs(i) = sign * row.rhs;
      if (needs_art[i]) {
        tab.at(i, art) = T(1);
        basis[i] = art++;
      } else {
        basis[i] = slack_col[i];
      }
    }
  }

  Result<T> result;
  std::vector<bool> allowed(total_cols, true);
  std::size_t tiny_pivots = 0;

  auto run = [&](void) -> Status {
    std::size_t degenerate_run = 0;
    while (true) {
      if (result.iterations >= options.max_iterations)
        throw NumericalError("simplex iteration limit reached");
      const bool bland = degenerate_run >= options.degenerate_switch;
      std::size_t enter = total_cols;
      T best{};
      for (std::size_t c = 0; c < total_cols; ++c) {
        if (!allowed[c]) continue;
        const T& d = tab.cost(c);
        if (d < T(-tol.opt)) {
          if (bland) { enter = c; break; }
          if (enter == total_cols || d < best) { enter = c; best = d; }
        }
      }
      if (enter == total_cols) return Status::Optimal;

      std::size_t leave = m;
      T best_ratio{};
      for (std::size_t r = 0; r < m; ++r) {
        const T& a = tab.at(r, enter);
        if (a > T(tol.piv)) {
          T ratio = tab.rhs(r) / a;
          if (ratio < T(0)) ratio = T(0);
          if (leave == m || ratio < best_ratio ||
              (ratio == best_ratio && basis[r] < basis[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        } else if (a > T(0)) {
          ++tiny_pivots;
        }
      }
      if (leave == m) return Status::Unbounded;
      degenerate_run = (tab.rhs(leave) <= T(tol.feas)) ? degenerate_run + 1 : 0;
      tab.pivot(leave, enter);
      basis[leave] = enter;
      ++result.iterations;
    }
  };

  // Phase 1: minimise the sum of artificials.
  if (nart > 0) {
    for (std::size_t c = first_art; c < total_cols; ++c) tab.cost(c) = T(1);
    for (std::size_t r = 0; r < m; ++r) {
      if (basis[r] < first_art) continue;
      for (std::size_t c = 0; c <= total_cols; ++c) tab.at(m, c) -= tab.at(r, c);
    }
    run();
    const T infeas = -tab.cost_rhs();
    if (infeas > T(tol.feas)) {
      result.status = Status::Infeasible;
      return result;
    }
    // Drive remaining artificials out of the basis; rows where that is
    // impossible are redundant and neutralised.
    for (std::size_t r = 0; r < m; ++r) {
      if (basis[r] < first_art) continue;
      std::size_t col = total_cols;
      T best{};
      for (std::size_t c = 0; c < first_art; ++c) {
        T a = abs_value(tab.at(r, c));
        if (a > T(tol.piv) && (col == total_cols || a > best)) {
          col = c;
          best = a;
        }
      }
      if (col != total_cols) {
        tab.pivot(r, col);
        basis[r] = col;
      } else {
        for (std::size_t c = 0; c <= total_cols; ++c) tab.at(r, c) = T(0);
        tab.at(r, basis[r]) = T(1);
      }
    }
    for (std::size_t c = first_art; c < total_cols; ++c) allowed[c] = false;
  }

  // Phase 2.
  for (std::size_t c = 0; c <= total_cols; ++c) tab.cost(c) = T(0);
  const T sense_sign = problem.sense == Sense::Minimize ? T(1) : T(-1);
  for (std::size_t j = 0; j < nv; ++j) {
    const T cj = sense_sign * problem.objective[j];
    tab.cost(pos_col[j]) = cj;
    if (neg_col[j] != static_cast<std::size_t>(-1)) tab.cost(neg_col[j]) = -cj;
  }
  for (std::size_t r = 0; r < m; ++r) {
    const T cb = tab.cost(basis[r]);
    if (cb == T(0)) continue;
    for (std::size_t c = 0; c <= total_cols; ++c) tab.at(m, c) -= cb * tab.at(r, c);
  }
  const Status st = run();
  result.status = st;
  if (tiny_pivots > 100)
    result.diagnostic = "numerical instability: " + std::to_string(tiny_pivots) +
                        " pivot candidates below pivot tolerance were rejected";
  if (st == Status::Unbounded) return result;

  std::vector<T> colval(total_cols, T(0));
  for (std::size_t r = 0; r < m; ++r) colval[basis[r]] = tab.rhs(r);
  result.x.assign(nv, T(0));
  for (std::size_t j = 0; j < nv; ++j) {
    result.x[j] = colval[pos_col[j]];
    if (neg_col[j] != static_cast<std::size_t>(-1)) result.x[j] -= colval[neg_col[j]];
  }
  T obj{};
  for (std::size_t j = 0; j < nv; ++j) obj += problem.objective[j] * result.x[j];
  result.objective = obj;
  return result;
}

/// Largest value of objᵀx over {x : rows}, all variables free. Returns
/// nullopt when the region is empty; +inf-like status via Status::Unbounded.
template <class T>
Result<T> maximize_over(const std::vector<Row<T>>& rows, std::size_t num_vars, const std::vector<T>& obj) {
  Problem<T> p;
  for (std::size_t j = 0; j < num_vars; ++j) p.add_var(false);
  p.rows = rows;
  p.objective = obj;
  p.sense = Sense::Maximize;
  return solve(p);
}

}  // namespace sspbound::lp
