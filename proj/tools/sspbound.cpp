// sspbound {parse|bound|simulate|certify} <model> [options]

#include "sspbound/cli/run.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

// "x=1,y=2" -> {x: "1", y: "2"}
std::map<std::string, std::string> parse_assignments(const std::string& text, const char* flag) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw sspbound::cli::InputError(std::string(flag) + ": expected name=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sspbound;
  cli::RunConfig cfg;
  std::string init, box, side = "both", problem = "sup", strategy = "fixed", format = "text", out;

  CLI::App app{"Linear bounds on expected accumulated reward of succinct MDPs"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* sub) {
    sub->add_option("model", cfg.model_path, "model file (.smdp)")->required();
    sub->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--out", out, "write the report to this file");
  };
  auto* parse = app.add_subcommand("parse", "check a model and print its size");
  common(parse);

  auto* bound = app.add_subcommand("bound", "synthesize upper and/or lower bound certificates");
  common(bound);
  bound->add_option("--side", side, "upper, lower or both")->check(CLI::IsMember({"upper", "lower", "both"}));
  bound->add_option("--problem", problem, "sup or inf")->check(CLI::IsMember({"sup", "inf"}));
  bound->add_option("--init", init, "objective anchor, e.g. x=5,y=0");
  bound->add_option("--lower-strategy", strategy, "fixed or motzkin")->check(CLI::IsMember({"fixed", "motzkin"}));
  bound->add_option("--seed", cfg.seed, "seed for the multi-start schedule");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate under a memoryless policy");
  common(sim);
  sim->add_option("--policy", cfg.policy, "always:N, uniform or greedy");
  sim->add_option("--problem", problem, "sense of the greedy policy: sup or inf")
      ->check(CLI::IsMember({"sup", "inf"}));
  sim->add_option("--box", box, "value-iteration box for greedy, e.g. x=0:400");
  sim->add_option("--init", init, "initial state, e.g. x=5");
  sim->add_option("--seed", cfg.seed);
  sim->add_option("--trials", cfg.trials);
  sim->add_option("--step-cap", cfg.step_cap);
  sim->add_option("--threads", cfg.threads)->check(CLI::PositiveNumber);

  auto* cert = app.add_subcommand("certify", "re-check a certificate against a model");
  common(cert);
  cert->add_option("certificate", cfg.cert_path, "certificate or bound report (JSON)")->required();
  cert->add_option("--side", side, "pick this side from a report")->check(CLI::IsMember({"upper", "lower", "both"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kInputError;
  }

  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  cfg.side = side == "upper" ? cli::SideRequest::Upper : side == "lower" ? cli::SideRequest::Lower : cli::SideRequest::Both;
  cfg.problem = problem == "inf" ? certgen::Objective::Inf : certgen::Objective::Sup;
  cfg.strategy = strategy == "motzkin" ? solve::LowerStrategy::Motzkin : solve::LowerStrategy::Fixed;
  cfg.format = format == "json" ? cli::Format::Json : cli::Format::Text;
  if (!out.empty()) cfg.out = out;
  try {
    if (!init.empty()) cfg.init = parse_assignments(init, "--init");
    if (!box.empty()) cfg.box = parse_assignments(box, "--box");
  } catch (const cli::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kInputError;
  }
  return cli::run(cfg);
}
