#pragma once

#include "sspbound/frontend/ast.hpp"

#include <sstream>
#include <string>

namespace sspbound::frontend {

namespace detail {

inline int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    default: return 4;
  }
}

inline void print_expr(std::ostream& os, const Expr& e, int min_prec, bool strict) {
  const int p = precedence(e);
  const bool paren = strict ? p <= min_prec : p < min_prec;
  if (paren) os << '(';
  switch (e.kind) {
    case Expr::Kind::Number:
      if (e.value < 0)
        os << "(-" << to_display(Rational(-e.value)) << ')';
      else
        os << to_display(e.value);
      break;
    case Expr::Kind::Var: os << e.name; break;
    case Expr::Kind::Neg:
      os << '-';
      print_expr(os, *e.lhs, 3, false);
      break;
    default: {
      const char* op = e.kind == Expr::Kind::Add   ? " + "
                       : e.kind == Expr::Kind::Sub ? " - "
                       : e.kind == Expr::Kind::Mul ? " * "
                                                   : " / ";
      print_expr(os, *e.lhs, p, false);
      os << op;
      print_expr(os, *e.rhs, p, true);
    }
  }
  if (paren) os << ')';
}

inline void print_block(std::ostream& os, const Block& b, int indent);

inline void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
    os << pad << a->target << " := ";
    print_expr(os, *a->value, 0, false);
    os << ";\n";
  } else if (const auto* r = std::get_if<RewardStmt>(&s.node)) {
    os << pad << "reward ";
    print_expr(os, *r->value, 0, false);
    os << ";\n";
  } else if (const auto* p = std::get_if<ProbIfStmt>(&s.node)) {
    os << pad << "if prob(";
    print_expr(os, *p->prob, 0, false);
    os << ") ";
    print_block(os, p->then_block, indent);
    os << " else ";
    print_block(os, p->else_block, indent);
    os << "\n";
  } else {
    // Simultaneous assignments have no surface syntax; printed one per line.
    const auto& pa = std::get<ParallelAssignStmt>(s.node);
    for (std::size_t i = 0; i < pa.targets.size(); ++i) {
      os << pad << pa.targets[i] << " := ";
      print_expr(os, *pa.values[i], 0, false);
      os << ";" << (pa.targets.size() > 1 ? "  // simultaneous\n" : "\n");
    }
  }
}

inline void print_block(std::ostream& os, const Block& b, int indent) {
  os << "{\n";
  for (const auto& s : b.stmts) print_stmt(os, s, indent + 2);
  os << std::string(static_cast<std::size_t>(indent), ' ') << "}";
}

}  // namespace detail

inline std::string to_source(const ExprPtr& e) {
  std::ostringstream os;
  detail::print_expr(os, *e, 0, false);
  return os.str();
}

/// Pretty-prints a program back to .smdp source.
inline std::string to_source(const Program& prog) {
  std::ostringstream os;
  for (const auto& v : prog.vars) {
    os << "var " << v.name;
    if (v.init) os << " = " << to_source(*v.init);
    os << ";\n";
  }
  for (const auto& d : prog.dists) {
    os << "dist ";
    for (std::size_t i = 0; i < d.names.size(); ++i) os << (i ? ", " : "") << d.names[i];
    os << " ~ ";
    if (d.spec.kind == DistSpec::Kind::Uniform) {
      os << "uniform(" << to_source(d.spec.lo) << ", " << to_source(d.spec.hi) << ")";
    } else {
      os << "discrete { ";
      for (std::size_t j = 0; j < d.spec.outcomes.size(); ++j) {
        const auto& o = d.spec.outcomes[j];
        if (j) os << ", ";
        if (o.values.size() == 1) {
          os << to_source(o.values[0]);
        } else {
          os << "(";
          for (std::size_t t = 0; t < o.values.size(); ++t) os << (t ? ", " : "") << to_source(o.values[t]);
          os << ")";
        }
        os << ": " << to_source(o.prob);
      }
      os << " }";
    }
    os << ";\n";
  }
  static constexpr const char* cmp[] = {">=", ">", "<=", "<"};
  os << "while " << to_source(prog.guard.lhs) << " " << cmp[static_cast<int>(prog.guard.op)] << " "
     << to_source(prog.guard.rhs) << " do\n";
  for (std::size_t i = 0; i < prog.blocks.size(); ++i) {
    if (i) os << "\n[]\n";
    detail::print_block(os, prog.blocks[i], 0);
  }
  os << "\nod\n";
  return os.str();
}

}  // namespace sspbound::frontend
