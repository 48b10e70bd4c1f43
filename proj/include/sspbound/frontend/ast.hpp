#pragma once

#include "sspbound/frontend/diagnostic.hpp"
#include "sspbound/rational.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sspbound::frontend {

/// Surface arithmetic expression. Affinity is checked when lowering, so the
/// tree itself may contain products of variables.
struct Expr {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div };
  Kind kind = Kind::Number;
  Rational value = 0;      ///< Number
  std::string name;        ///< Var
  std::shared_ptr<const Expr> lhs, rhs;  ///< operands (Neg uses lhs)
  SourceLoc loc;
};
using ExprPtr = std::shared_ptr<const Expr>;

inline ExprPtr make_number(Rational v, SourceLoc loc = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Number;
  e->value = std::move(v);
  e->loc = loc;
  return e;
}
inline ExprPtr make_var(std::string name, SourceLoc loc = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = std::move(name);
  e->loc = loc;
  return e;
}
inline ExprPtr make_unary(ExprPtr operand, SourceLoc loc = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Neg;
  e->lhs = std::move(operand);
  e->loc = loc;
  return e;
}
inline ExprPtr make_binary(Expr::Kind kind, ExprPtr l, ExprPtr r, SourceLoc loc = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  e->loc = loc;
  return e;
}

enum class CmpOp { Ge, Gt, Le, Lt };

struct Guard {
  ExprPtr lhs;
  CmpOp op = CmpOp::Ge;
  ExprPtr rhs;
  SourceLoc loc;
};

struct Stmt;

struct Block {
  std::vector<Stmt> stmts;
  SourceLoc loc;
};

struct AssignStmt {
  std::string target;
  ExprPtr value;
};

struct RewardStmt {
  ExprPtr value;
};

/// `if prob(p) { ... } else { ... }`: the then-block runs with probability p.
struct ProbIfStmt {
  ExprPtr prob;
  Block then_block;
  Block else_block;
};

/// Simultaneous assignment. Never produced by the parser; desugaring emits
/// it so that blended updates of several variables all read entry values.
struct ParallelAssignStmt {
  std::vector<std::string> targets;
  std::vector<ExprPtr> values;
};

struct Stmt {
  std::variant<AssignStmt, RewardStmt, ProbIfStmt, ParallelAssignStmt> node;
  SourceLoc loc;
};

struct VarDecl {
  std::string name;
  std::optional<ExprPtr> init;
  SourceLoc loc;
};

struct DistOutcome {
  std::vector<ExprPtr> values;
  ExprPtr prob;
};

struct DistSpec {
  enum class Kind { Discrete, Uniform };
  Kind kind = Kind::Discrete;
  std::vector<DistOutcome> outcomes;
  ExprPtr lo, hi;
};

struct DistDecl {
  std::vector<std::string> names;
  DistSpec spec;
  SourceLoc loc;
};

struct Program {
  std::vector<VarDecl> vars;
  std::vector<DistDecl> dists;
  Guard guard;
  std::vector<Block> blocks;
};

// Structural equality, ignoring source locations.

inline bool same(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Number: return a->value == b->value;
    case Expr::Kind::Var: return a->name == b->name;
    case Expr::Kind::Neg: return same(a->lhs, b->lhs);
    default: return same(a->lhs, b->lhs) && same(a->rhs, b->rhs);
  }
}

inline bool same(const Block& a, const Block& b);

inline bool same(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* x = std::get_if<AssignStmt>(&a.node)) {
    const auto& y = std::get<AssignStmt>(b.node);
    return x->target == y.target && same(x->value, y.value);
  }
  if (auto* x = std::get_if<RewardStmt>(&a.node)) return same(x->value, std::get<RewardStmt>(b.node).value);
  if (auto* x = std::get_if<ProbIfStmt>(&a.node)) {
    const auto& y = std::get<ProbIfStmt>(b.node);
    return same(x->prob, y.prob) && same(x->then_block, y.then_block) && same(x->else_block, y.else_block);
  }
  const auto& x = std::get<ParallelAssignStmt>(a.node);
  const auto& y = std::get<ParallelAssignStmt>(b.node);
  if (x.targets != y.targets || x.values.size() != y.values.size()) return false;
  for (std::size_t i = 0; i < x.values.size(); ++i)
    if (!same(x.values[i], y.values[i])) return false;
  return true;
}

inline bool same(const Block& a, const Block& b) {
  if (a.stmts.size() != b.stmts.size()) return false;
  for (std::size_t i = 0; i < a.stmts.size(); ++i)
    if (!same(a.stmts[i], b.stmts[i])) return false;
  return true;
}

inline bool same(const Program& a, const Program& b) {
  if (a.vars.size() != b.vars.size() || a.dists.size() != b.dists.size() || a.blocks.size() != b.blocks.size())
    return false;
  for (std::size_t i = 0; i < a.vars.size(); ++i) {
    const auto &x = a.vars[i], &y = b.vars[i];
    if (x.name != y.name || x.init.has_value() != y.init.has_value()) return false;
    if (x.init && !same(*x.init, *y.init)) return false;
  }
  for (std::size_t i = 0; i < a.dists.size(); ++i) {
    const auto &x = a.dists[i], &y = b.dists[i];
    if (x.names != y.names || x.spec.kind != y.spec.kind) return false;
    if (x.spec.kind == DistSpec::Kind::Uniform) {
      if (!same(x.spec.lo, y.spec.lo) || !same(x.spec.hi, y.spec.hi)) return false;
      continue;
    }
    if (x.spec.outcomes.size() != y.spec.outcomes.size()) return false;
    for (std::size_t j = 0; j < x.spec.outcomes.size(); ++j) {
      const auto &o = x.spec.outcomes[j], &p = y.spec.outcomes[j];
      if (o.values.size() != p.values.size() || !same(o.prob, p.prob)) return false;
      for (std::size_t t = 0; t < o.values.size(); ++t)
        if (!same(o.values[t], p.values[t])) return false;
    }
  }
  if (a.guard.op != b.guard.op || !same(a.guard.lhs, b.guard.lhs) || !same(a.guard.rhs, b.guard.rhs)) return false;
  for (std::size_t i = 0; i < a.blocks.size(); ++i)
    if (!same(a.blocks[i], b.blocks[i])) return false;
  return true;
}

}  // namespace sspbound::frontend
