#pragma once

// Removes `if prob(p) {T} else {E}`. Each instance gets a fresh 0/1 sampling
// variable s with P(s=1)=p, and every variable written by either branch is
// updated to E(v) + s·(T(v) - E(v)). The reward becomes rE + s·(rT - rE).
// Both need T - E constant, otherwise the update is not affine in s.

#include "sspbound/frontend/ast.hpp"
#include "sspbound/frontend/lower.hpp"
#include "sspbound/semantics/model.hpp"

#include <set>
#include <string>
#include <vector>

namespace sspbound::frontend {

namespace detail {

class Desugarer {
 public:
  explicit Desugarer(Program& prog) : prog_(prog) {
    for (const auto& v : prog.vars) taken_.insert(v.name);
    for (const auto& d : prog.dists) taken_.insert(d.names.begin(), d.names.end());
  }

  Block run(const Block& b) {
    Block out;
    out.loc = b.loc;
    for (const auto& s : b.stmts) {
      const auto* pif = std::get_if<ProbIfStmt>(&s.node);
      if (!pif) {
        out.stmts.push_back(s);
        continue;
      }
      for (auto& t : expand(*pif, s.loc)) out.stmts.push_back(std::move(t));
    }
    return out;
  }

 private:
  Program& prog_;
  std::set<std::string> taken_;
  int counter_ = 0;

  std::string fresh_name() {
    std::string name;
    do name = "_pif" + std::to_string(counter_++);
    while (taken_.count(name));
    taken_.insert(name);
    return name;
  }

  static SymbolicResult execute(const Block& b) {
    std::vector<LoweredStatement> lowered;
    for (const auto& s : b.stmts) {
      if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
        lowered.push_back(Assignment{{a->target}, {lower_expr(a->value)}});
      } else if (const auto* r = std::get_if<RewardStmt>(&s.node)) {
        lowered.push_back(RewardStatement{lower_expr(r->value)});
      } else {
        const auto& pa = std::get<ParallelAssignStmt>(s.node);
        Assignment asg{pa.targets, {}};
        for (const auto& v : pa.values) asg.values.push_back(lower_expr(v));
        lowered.push_back(std::move(asg));
      }
    }
    return execute_symbolically(lowered);
  }

  std::vector<Stmt> expand(const ProbIfStmt& pif, SourceLoc loc) {
    const Rational p = lower_constant(pif.prob, "branch probability");
    if (p < 0 || p > 1)
      throw DiagnosticError({Diagnostic{Severity::Error, "branch probability must lie in [0, 1]", pif.prob->loc}});
    const Block then_b = run(pif.then_block);
    const Block else_b = run(pif.else_block);
    if (p == 1) return then_b.stmts;
    if (p == 0) return else_b.stmts;
    if (same(then_b, else_b)) return then_b.stmts;

    const SymbolicResult t = execute(then_b), e = execute(else_b);
    std::set<std::string> written;
    for (const auto& [name, _] : t.state) written.insert(name);
    for (const auto& [name, _] : e.state) written.insert(name);

    auto not_succinct = [&]() {
      return DiagnosticError({Diagnostic{
          Severity::Error, "not expressible as succinct MDP: branch difference depends on variables", loc}});
    };
    auto value_of = [](const SymbolicResult& r, const std::string& name) {
      auto it = r.state.find(name);
      return it == r.state.end() ? LinearExpr::variable(name) : it->second;
    };

    const std::string s = fresh_name();
    std::vector<Stmt> out;
    const LinearExpr dr = t.reward - e.reward;
    if (!dr.is_constant()) throw not_succinct();
    if (t.reward != LinearExpr{} || e.reward != LinearExpr{})
      out.push_back(Stmt{RewardStmt{to_expr(e.reward + LinearExpr::variable(s, dr.constant), loc)}, loc});

    ParallelAssignStmt pa;
    for (const auto& name : written) {
      const LinearExpr tv = value_of(t, name), ev = value_of(e, name);
      const LinearExpr diff = tv - ev;
      if (!diff.is_constant()) throw not_succinct();
      pa.targets.push_back(name);
      pa.values.push_back(to_expr(ev + LinearExpr::variable(s, diff.constant), loc));
    }
    if (!pa.targets.empty()) out.push_back(Stmt{std::move(pa), loc});

    DistDecl d;
    d.names = {s};
    d.loc = loc;
    d.spec.kind = DistSpec::Kind::Discrete;
    d.spec.outcomes.push_back(DistOutcome{{make_number(1, loc)}, make_number(p, loc)});
    d.spec.outcomes.push_back(DistOutcome{{make_number(0, loc)}, make_number(1 - p, loc)});
    prog_.dists.push_back(std::move(d));
    return out;
  }
};

}  // namespace detail

/// Returns a program without probabilistic-if statements. Fresh sampling
/// variables are named _pif0, _pif1, ... skipping names already in use.
inline Program desugar_prob_if(const Program& prog) {
  Program out = prog;
  detail::Desugarer d(out);
  for (auto& b : out.blocks) b = d.run(b);
  return out;
}

}  // namespace sspbound::frontend
