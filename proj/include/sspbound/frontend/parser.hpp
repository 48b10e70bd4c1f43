#pragma once

// Recursive-descent parser for .smdp sources:
//
//   program  := decl* "while" guard "do" block ("[]" block)* "od"
//   decl     := "var" ident ("=" expr)? ";"
//             | "dist" ident ("," ident)* "~" distspec ";"
//   distspec := "discrete" "{" tuple ":" expr ("," tuple ":" expr)* "}"
//             | "uniform" "(" expr "," expr ")"
//   guard    := expr cmp expr
//   block    := "{" stmt* "}"
//   stmt     := ident ":=" expr ";" | "reward" expr ";"
//             | "if" "prob" "(" expr ")" block "else" block
//   expr     := term (("+" | "-") term)*
//   term     := unary (("*" | "/") unary)*
//   unary    := "-" unary | primary
//   primary  := number | ident | "(" expr ")"

#include "sspbound/frontend/ast.hpp"
#include "sspbound/frontend/lexer.hpp"

#include <string>
#include <vector>

namespace sspbound::frontend {

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {
    if (toks_.empty() || toks_.back().kind != TokenKind::End) toks_.push_back({TokenKind::End, "", {}});
  }

  Program parse_program() {
    Program prog;
    while (true) {
      if (peek().is_keyword("var")) {
        prog.vars.push_back(parse_var());
      } else if (peek().is_keyword("dist")) {
        prog.dists.push_back(parse_dist());
      } else {
        break;
      }
    }
    expect_keyword("while");
    prog.guard = parse_guard();
    expect_keyword("do");
    if (peek().is_keyword("od")) fail(peek(), "loop body needs at least one block");
    prog.blocks.push_back(parse_block());
    while (peek().is_symbol("[]")) {
      next();
      prog.blocks.push_back(parse_block());
    }
    expect_keyword("od");
    if (peek().kind != TokenKind::End) fail(peek(), "expected end of input after 'od'");
    return prog;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    while (peek().is_symbol("+") || peek().is_symbol("-")) {
      const Token op = next();
      ExprPtr rhs = parse_term();
      lhs = make_binary(op.lexeme == "+" ? Expr::Kind::Add : Expr::Kind::Sub, lhs, rhs, op.loc);
    }
    return lhs;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  Token next() {
    Token t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] static void fail(const Token& at, const std::string& msg) {
    throw DiagnosticError({Diagnostic{Severity::Error, msg, at.loc}});
  }
  static std::string describe(const Token& t) {
    if (t.kind == TokenKind::End) return "end of input";
    return "'" + t.lexeme + "'";
  }

  Token expect_symbol(const std::string& s) {
    if (!peek().is_symbol(s)) fail(peek(), "expected '" + s + "' but found " + describe(peek()));
    return next();
  }
  Token expect_keyword(const std::string& s) {
    if (!peek().is_keyword(s)) fail(peek(), "expected '" + s + "' but found " + describe(peek()));
    return next();
  }
  Token expect_identifier() {
    if (peek().kind != TokenKind::Identifier) fail(peek(), "expected identifier but found " + describe(peek()));
    return next();
  }

  VarDecl parse_var() {
    const Token kw = expect_keyword("var");
    VarDecl d;
    d.loc = kw.loc;
    d.name = expect_identifier().lexeme;
    if (peek().is_symbol("=")) {
      next();
      d.init = parse_expr();
    }
    expect_symbol(";");
    return d;
  }

  DistDecl parse_dist() {
    const Token kw = expect_keyword("dist");
    DistDecl d;
    d.loc = kw.loc;
    d.names.push_back(expect_identifier().lexeme);
    while (peek().is_symbol(",")) {
      next();
      d.names.push_back(expect_identifier().lexeme);
    }
    expect_symbol("~");
    if (peek().is_keyword("discrete")) {
      next();
      d.spec.kind = DistSpec::Kind::Discrete;
      expect_symbol("{");
      do {
        DistOutcome o;
        if (d.names.size() == 1) {
          o.values.push_back(parse_expr());
        } else {
          expect_symbol("(");
          o.values.push_back(parse_expr());
          while (peek().is_symbol(",")) {
            next();
            o.values.push_back(parse_expr());
          }
          expect_symbol(")");
        }
        expect_symbol(":");
        o.prob = parse_expr();
        d.spec.outcomes.push_back(std::move(o));
      } while (peek().is_symbol(",") && (next(), true));
      expect_symbol("}");
    } else if (peek().is_keyword("uniform")) {
      next();
      d.spec.kind = DistSpec::Kind::Uniform;
      expect_symbol("(");
      d.spec.lo = parse_expr();
      expect_symbol(",");
      d.spec.hi = parse_expr();
      expect_symbol(")");
    } else {
      fail(peek(), "expected 'discrete' or 'uniform' but found " + describe(peek()));
    }
    expect_symbol(";");
    return d;
  }

  Guard parse_guard() {
    Guard g;
    g.loc = peek().loc;
    g.lhs = parse_expr();
    const Token& t = peek();
    if (t.is_symbol(">="))
      g.op = CmpOp::Ge;
    else if (t.is_symbol(">"))
      g.op = CmpOp::Gt;
    else if (t.is_symbol("<="))
      g.op = CmpOp::Le;
    else if (t.is_symbol("<"))
      g.op = CmpOp::Lt;
    else
      fail(t, "expected comparison operator in loop guard but found " + describe(t));
    next();
    g.rhs = parse_expr();
    return g;
  }

  Block parse_block() {
    Block b;
    b.loc = expect_symbol("{").loc;
    while (!peek().is_symbol("}")) {
      if (peek().kind == TokenKind::End) fail(peek(), "expected '}' but found end of input");
      b.stmts.push_back(parse_stmt());
    }
    next();
    return b;
  }

  Stmt parse_stmt() {
    const Token& t = peek();
    Stmt s;
    s.loc = t.loc;
    if (t.is_keyword("while")) fail(t, "nested while loops are not supported");
    if (t.is_keyword("reward")) {
      next();
      s.node = RewardStmt{parse_expr()};
      expect_symbol(";");
      return s;
    }
    if (t.is_keyword("if")) {
      next();
      expect_keyword("prob");
      expect_symbol("(");
      ProbIfStmt pif;
      pif.prob = parse_expr();
      expect_symbol(")");
      pif.then_block = parse_block();
      expect_keyword("else");
      pif.else_block = parse_block();
      s.node = std::move(pif);
      return s;
    }
    if (t.kind == TokenKind::Identifier) {
      const std::string target = next().lexeme;
      expect_symbol(":=");
      s.node = AssignStmt{target, parse_expr()};
      expect_symbol(";");
      return s;
    }
    fail(t, "expected statement but found " + describe(t));
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    while (peek().is_symbol("*") || peek().is_symbol("/")) {
      const Token op = next();
      ExprPtr rhs = parse_unary();
      lhs = make_binary(op.lexeme == "*" ? Expr::Kind::Mul : Expr::Kind::Div, lhs, rhs, op.loc);
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (peek().is_symbol("-")) {
      const Token op = next();
      return make_unary(parse_unary(), op.loc);
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token t = peek();
    if (t.kind == TokenKind::Number) {
      next();
      return make_number(parse_decimal(t.lexeme), t.loc);
    }
    if (t.kind == TokenKind::Identifier) {
      next();
      return make_var(t.lexeme, t.loc);
    }
    if (t.is_symbol("(")) {
      next();
      ExprPtr e = parse_expr();
      expect_symbol(")");
      return e;
    }
    fail(t, "expected expression but found " + describe(t));
  }
};

inline Program parse(std::vector<Token> tokens) { return Parser(std::move(tokens)).parse_program(); }

inline Program parse_source(std::string_view source) { return parse(tokenize(source)); }

}  // namespace sspbound::frontend
