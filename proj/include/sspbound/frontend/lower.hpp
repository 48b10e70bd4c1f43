#pragma once

#include "sspbound/frontend/ast.hpp"
#include "sspbound/semantics/linear_expr.hpp"

#include <functional>
#include <string>

namespace sspbound::frontend {

/// Called for every identifier met while lowering; may throw.
using NameCheck = std::function<void(const std::string&, SourceLoc)>;

/// Lowers a surface expression to an affine LinearExpr. Products need a
/// constant factor and divisors must be nonzero constants.
inline LinearExpr lower_expr(const ExprPtr& e, const NameCheck& check = {}) {
  auto fail = [&](const std::string& msg) -> LinearExpr {
    throw DiagnosticError({Diagnostic{Severity::Error, msg, e->loc}});
  };
  switch (e->kind) {
    case Expr::Kind::Number: return LinearExpr::constant_of(e->value);
    case Expr::Kind::Var:
      if (check) check(e->name, e->loc);
      return LinearExpr::variable(e->name);
    case Expr::Kind::Neg: return lower_expr(e->lhs, check) * Rational(-1);
    case Expr::Kind::Add: return lower_expr(e->lhs, check) + lower_expr(e->rhs, check);
    case Expr::Kind::Sub: return lower_expr(e->lhs, check) - lower_expr(e->rhs, check);
    case Expr::Kind::Mul: {
      LinearExpr l = lower_expr(e->lhs, check), r = lower_expr(e->rhs, check);
      if (l.is_constant()) return r * l.constant;
      if (r.is_constant()) return l * r.constant;
      return fail("non-linear expression: product of two non-constant terms");
    }
    case Expr::Kind::Div: {
      LinearExpr l = lower_expr(e->lhs, check), r = lower_expr(e->rhs, check);
      if (!r.is_constant()) return fail("non-linear expression: division by a non-constant term");
      if (r.constant == 0) return fail("division by zero");
      return l * Rational(1 / r.constant);
    }
  }
  return fail("unknown expression");
}

/// Lowers an expression that must be a constant (probabilities, init values,
/// distribution support points).
inline Rational lower_constant(const ExprPtr& e, const std::string& what) {
  LinearExpr v = lower_expr(e);
  if (!v.is_constant()) throw DiagnosticError({Diagnostic{Severity::Error, what + " must be a constant", e->loc}});
  return v.constant;
}

/// Rebuilds a surface expression from a LinearExpr (terms in name order,
/// then the constant).
inline ExprPtr to_expr(const LinearExpr& e, SourceLoc loc = {}) {
  ExprPtr out;
  auto add = [&](ExprPtr term, bool negative) {
    if (!out)
      out = negative ? make_unary(term, loc) : term;
    else
      out = make_binary(negative ? Expr::Kind::Sub : Expr::Kind::Add, out, term, loc);
  };
  for (const auto& [name, c] : e.terms) {
    const Rational mag = abs(c);
    ExprPtr term = make_var(name, loc);
    if (mag != 1) term = make_binary(Expr::Kind::Mul, make_number(mag, loc), term, loc);
    add(term, c < 0);
  }
  if (e.constant != 0 || !out) add(make_number(abs(e.constant), loc), e.constant < 0);
  return out;
}

}  // namespace sspbound::frontend
