#pragma once

#include "sspbound/frontend/ast.hpp"
#include "sspbound/frontend/lower.hpp"
#include "sspbound/semantics/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace sspbound::frontend {

struct ValidatedModel {
  Model model;
  std::vector<Diagnostic> warnings;
};

namespace detail {

inline const Rational kMassTolerance = Rational(1, 1000000000);

class Validator {
 public:
  explicit Validator(const Program& prog) : prog_(prog) {}

  ValidatedModel run() {
    declare();
    if (!errors_.empty()) throw DiagnosticError(errors_);
    lower_guard();
    for (std::size_t i = 0; i < prog_.blocks.size(); ++i) lower_block(prog_.blocks[i], i);
    if (!errors_.empty()) throw DiagnosticError(errors_);
    return {std::move(model_), std::move(warnings_)};
  }

 private:
  enum class Kind { Program, Sampling };
  const Program& prog_;
  Model model_;
  std::map<std::string, Kind> kinds_;
  std::vector<Diagnostic> errors_, warnings_;

  void error(const std::string& msg, SourceLoc loc) { errors_.push_back({Severity::Error, msg, loc}); }

  bool declare_name(const std::string& name, Kind kind, SourceLoc loc) {
    if (kinds_.count(name)) {
      error("'" + name + "' is already declared", loc);
      return false;
    }
    kinds_[name] = kind;
    return true;
  }

  template <class F>
  void guarded(F&& f) {
    try {
      f();
    } catch (const DiagnosticError& e) {
      errors_.insert(errors_.end(), e.diagnostics().begin(), e.diagnostics().end());
    }
  }

  void declare() {
    std::vector<std::optional<Rational>> init;
    for (const auto& v : prog_.vars) {
      if (!declare_name(v.name, Kind::Program, v.loc)) continue;
      model_.program_vars.push_back(v.name);
      init.emplace_back();
      if (v.init) guarded([&] { init.back() = lower_constant(*v.init, "initial value"); });
    }
    if (model_.program_vars.empty()) error("at least one program variable is required", {});

    std::size_t given = 0;
    for (const auto& i : init) given += i.has_value();
    if (given > 0) {
      if (given < init.size())
        warnings_.push_back({Severity::Warning, "initial values missing for some variables; they default to 0", {}});
      std::vector<Rational> x0;
      for (const auto& i : init) x0.push_back(i.value_or(Rational(0)));
      model_.init = std::move(x0);
    }

    for (const auto& d : prog_.dists) guarded([&] { declare_dist(d); });
  }

  void declare_dist(const DistDecl& d) {
    Distribution dist;
    for (const auto& name : d.names) {
      if (!declare_name(name, Kind::Sampling, d.loc)) return;
      dist.vars.push_back(model_.sampling_vars.size());
      model_.sampling_vars.push_back(name);
    }
    auto fail = [&](const std::string& msg) { throw DiagnosticError({Diagnostic{Severity::Error, msg, d.loc}}); };
    if (d.spec.kind == DistSpec::Kind::Uniform) {
      dist.kind = Distribution::Kind::Uniform;
      if (d.names.size() != 1) fail("uniform distributions are scalar only");
      dist.lo = lower_constant(d.spec.lo, "uniform bound");
      dist.hi = lower_constant(d.spec.hi, "uniform bound");
      if (!(dist.lo < dist.hi)) fail("uniform distribution needs lo < hi");
    } else {
      dist.kind = Distribution::Kind::Discrete;
      Rational mass = 0;
      for (const auto& o : d.spec.outcomes) {
        if (o.values.size() != d.names.size())
          fail("outcome has " + std::to_string(o.values.size()) + " values but the distribution declares " +
               std::to_string(d.names.size()) + " variables");
        Outcome out;
        for (const auto& v : o.values) out.values.push_back(lower_constant(v, "support value"));
        out.prob = lower_constant(o.prob, "probability");
        if (out.prob <= 0) fail("probabilities must be positive");
        mass += out.prob;
        dist.outcomes.push_back(std::move(out));
      }
      if (abs(mass - 1) > kMassTolerance) fail("probabilities sum to " + to_display(mass));
      if (mass != 1)
        for (auto& o : dist.outcomes) o.prob /= mass;
    }
    model_.distributions.push_back(std::move(dist));
  }

  NameCheck checker(bool program_only, const std::string& context) const {
    return [this, program_only, context](const std::string& name, SourceLoc loc) {
      auto it = kinds_.find(name);
      if (it == kinds_.end())
        throw DiagnosticError({Diagnostic{Severity::Error, "undeclared identifier '" + name + "'", loc}});
      if (program_only && it->second != Kind::Program)
        throw DiagnosticError({Diagnostic{Severity::Error, context, loc}});
    };
  }

  void lower_guard() {
    guarded([&] {
      const auto check = checker(true, "guard over program variables only");
      const LinearExpr d = lower_expr(prog_.guard.lhs, check) - lower_expr(prog_.guard.rhs, check);
      if (d.is_constant())
        throw DiagnosticError(
            {Diagnostic{Severity::Error, "loop guard must mention a program variable", prog_.guard.loc}});
      // lhs - rhs = g·x + c0
      HalfSpace h;
      const auto g = d.dense(model_.program_vars);
      const bool ge = prog_.guard.op == CmpOp::Ge || prog_.guard.op == CmpOp::Gt;
      h.strict = prog_.guard.op == CmpOp::Gt || prog_.guard.op == CmpOp::Lt;
      for (const auto& c : g) h.coeffs.push_back(ge ? Rational(-c) : c);
      h.rhs = ge ? d.constant : Rational(-d.constant);
      model_.guard = std::move(h);
    });
  }

  void lower_block(const Block& b, std::size_t index) {
    guarded([&] {
      const auto any = checker(false, "");
      auto target = [&](const std::string& name, SourceLoc loc) {
        auto it = kinds_.find(name);
        if (it == kinds_.end())
          throw DiagnosticError({Diagnostic{Severity::Error, "undeclared identifier '" + name + "'", loc}});
        if (it->second != Kind::Program)
          throw DiagnosticError(
              {Diagnostic{Severity::Error, "cannot assign to sampling variable '" + name + "'", loc}});
      };
      std::vector<LoweredStatement> stmts;
      for (const auto& s : b.stmts) {
        if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
          target(a->target, s.loc);
          stmts.push_back(Assignment{{a->target}, {lower_expr(a->value, any)}});
        } else if (const auto* r = std::get_if<RewardStmt>(&s.node)) {
          stmts.push_back(RewardStatement{lower_expr(r->value, any)});
        } else if (const auto* pa = std::get_if<ParallelAssignStmt>(&s.node)) {
          Assignment asg{pa->targets, {}};
          for (const auto& t : pa->targets) target(t, s.loc);
          for (const auto& v : pa->values) asg.values.push_back(lower_expr(v, any));
          stmts.push_back(std::move(asg));
        } else {
          throw DiagnosticError(
              {Diagnostic{Severity::Error, "probabilistic if must be desugared before validation", s.loc}});
        }
      }
      const SymbolicResult res = execute_symbolically(stmts);
      for (const auto& [name, _] : res.reward.terms)
        if (kinds_.at(name) == Kind::Program)
          throw DiagnosticError({Diagnostic{Severity::Error,
                                            "reward must not depend on program variable '" + name + "'", b.loc}});
      sspbound::Block blk;
      blk.map = affine_map_of(res, model_.program_vars, model_.sampling_vars);
      blk.reward.coeffs = res.reward.dense(model_.sampling_vars);
      blk.reward.constant = res.reward.constant;
      blk.reward.block = index;
      model_.blocks.push_back(std::move(blk));
    });
  }
};

}  // namespace detail

/// Checks a desugared program and lowers it to the exact model. Throws
/// DiagnosticError with every error found; warnings are returned.
inline ValidatedModel validate(const Program& prog) { return detail::Validator(prog).run(); }

}  // namespace sspbound::frontend
