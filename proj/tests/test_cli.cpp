#include "common.hpp"
#include "sspbound/cli/run.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace sspbound;
using namespace sspbound::cli;

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("sspbound_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

// Runs the installed binary; args are passed through the shell unquoted.
Outcome sh(const std::string& args) {
  const auto out = scratch("stdout"), err = scratch("stderr");
  const std::string cmd = std::string(SSPBOUND_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string model(const char* name) { return std::string(SSPBOUND_MODELS) + "/" + name + ".smdp"; }

fs::path write(const std::string& name, const std::string& text) {
  auto p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Parse, PrintsSizes) {
  auto r = sh("parse " + model("gambler"));
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "|X|=1 |R|=2 k=2\n");
}

TEST(Parse, NestedLoopIsAnInputError) {
  auto p = write("nested.smdp", "var x = 1;\nwhile x >= 1 do { while x >= 2 do { x := x - 1; } od } od\n");
  auto r = sh("parse " + p.string());
  EXPECT_EQ(r.code, kInputError);
  EXPECT_TRUE(contains(r.err, "nested.smdp:2:")) << r.err;
}

TEST(Parse, MissingFileIsAnIoError) { EXPECT_EQ(sh("parse /nonexistent/model.smdp").code, kIoError); }

TEST(Parse, BadFlagIsAnInputError) {
  EXPECT_EQ(sh("bound " + model("gambler") + " --side sideways").code, kInputError);
  EXPECT_EQ(sh("bound " + model("gambler") + " --init x").code, kInputError);
  EXPECT_EQ(sh("bound " + model("gambler") + " --init z=1").code, kInputError);
}

TEST(Bound, GamblerBothSides) {
  auto r = sh("bound " + model("gambler"));
  EXPECT_EQ(r.code, kOk);
  EXPECT_TRUE(contains(r.out, "supval upper bound: 2x")) << r.out;
  EXPECT_TRUE(contains(r.out, "supval lower bound: 2x - 2")) << r.out;
}

TEST(Bound, AmericanRouletteJson) {
  auto r = sh("bound " + model("american_roulette") + " --format json");
  ASSERT_EQ(r.code, kOk);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["bounds"][0]["certificate"]["a"]["x"], "24");
  EXPECT_EQ(j["bounds"][1]["certificate"]["a"]["x"], "24");
  EXPECT_EQ(j["bounds"][1]["certificate"]["choice"], 7);
}

TEST(Bound, InfProblemAndInitAnchor) {
  auto r = sh("bound " + model("gambler") + " --problem inf --side upper --init x=2 --format json");
  ASSERT_EQ(r.code, kOk);
  auto c = json::parse(r.out)["bounds"][0]["certificate"];
  EXPECT_EQ(c["problem"], "infval");
  EXPECT_EQ(c["value_at_init"], "3/2");
}

TEST(Bound, InitOutsideGuardWarns) {
  auto r = sh("bound " + model("gambler") + " --side upper --init x=0");
  EXPECT_EQ(r.code, kOk);
  EXPECT_TRUE(contains(r.err + r.out, "guard")) << r.err;
}

TEST(Bound, LogModelHasNoUpperCertificate) {
  auto r = sh("bound " + model("log") + " --side upper");
  EXPECT_EQ(r.code, kNoResult);
  EXPECT_TRUE(contains(r.out, "no linear certificate"));
}

TEST(Bound, MotzkinStrategyIsReported) {
  auto r = sh("bound " + model("robot2d") + " --side lower --lower-strategy motzkin --format json");
  ASSERT_EQ(r.code, kOk);
  EXPECT_EQ(json::parse(r.out)["bounds"][0]["certificate"]["strategy"], "motzkin-bilinear");
}

TEST(Simulate, GamblerSeeded) {
  auto r = sh("simulate " + model("gambler") + " --seed 42 --trials 20000 --format json");
  ASSERT_EQ(r.code, kOk);
  auto e = json::parse(r.out)["simulation"]["estimate"];
  EXPECT_GE(e["mean"].get<double>(), 9.7);
  EXPECT_LE(e["mean"].get<double>(), 10.3);
  EXPECT_EQ(e["seed"], 42);
  // same seed, same bits
  EXPECT_EQ(json::parse(sh("simulate " + model("gambler") + " --seed 42 --trials 20000 --format json").out)
                ["simulation"]["estimate"],
            e);
}

TEST(Simulate, SingleTrialReportsNullStderr) {
  auto r = sh("simulate " + model("gambler") + " --trials 1");
  EXPECT_EQ(r.code, kOk);
  EXPECT_TRUE(contains(r.out, "stderr null")) << r.out;
}

TEST(Simulate, GreedyNeedsABox) {
  EXPECT_EQ(sh("simulate " + model("gambler") + " --policy greedy").code, kInputError);
  auto r = sh("simulate " + model("gambler") + " --policy greedy --box x=0:400 --trials 2000 --format json");
  ASSERT_EQ(r.code, kOk);
  EXPECT_EQ(json::parse(r.out)["simulation"]["policy"], "greedy-supval");
}

TEST(Simulate, GreedyScoresTheBoxEdgeByTheCertificate) {
  auto r = sh("simulate " + model("gambler") + " --policy greedy --box x=0:20 --trials 2000 --format json");
  ASSERT_EQ(r.code, kOk);
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["warnings"].empty()) << j["warnings"];
  EXPECT_EQ(j["audit"][0], "value iteration scores states outside the box by 2x");
}

TEST(Simulate, TruncationMakesTheEstimateUnreliable) {
  EXPECT_EQ(sh("simulate " + model("gambler") + " --trials 200 --step-cap 3").code, kNoResult);
}

TEST(Certify, EmittedCertificateValidates) {
  const auto report = scratch("gambler_report.json");
  ASSERT_EQ(sh("bound " + model("gambler") + " --format json --out " + report.string()).code, kOk);
  for (const char* side : {"upper", "lower"}) {
    auto r = sh("certify " + model("gambler") + " " + report.string() + " --side " + side);
    EXPECT_EQ(r.code, kOk) << side << ": " << r.out;
    EXPECT_TRUE(contains(r.out, "certificate valid"));
  }
}

TEST(Certify, BareCertificateWithSlopeOneFails) {
  auto p = write("slope1.json", R"({"problem": "supval", "side": "upper", "vars": ["x"], "a": {"x": "1"},
                                    "b": "0", "K": "0", "Kprime": "4", "M": "2"})");
  auto r = sh("certify " + model("gambler") + " " + p.string());
  EXPECT_EQ(r.code, kNoResult);
  EXPECT_TRUE(contains(r.out, "drift condition for block 1 violated")) << r.out;
}

TEST(Certify, MalformedJsonIsAnInputError) {
  auto p = write("broken.json", "{\"problem\": ");
  EXPECT_EQ(sh("certify " + model("gambler") + " " + p.string()).code, kInputError);
  auto q = write("missing.json", R"({"problem": "supval", "side": "upper", "a": {"x": "1"}})");
  EXPECT_EQ(sh("certify " + model("gambler") + " " + q.string()).code, kInputError);
}

TEST(Certify, ZeroCertificateOnZeroRewardModel) {
  auto m = write("zero.smdp", "var x = 3; while x >= 1 do { x := x - 1; } [] { x := x - 2; } od\n");
  auto c = write("zero.json", R"({"problem": "supval", "side": "upper", "a": {"x": 0}, "b": 0, "K": 0,
                                  "Kprime": 0, "M": 0})");
  EXPECT_EQ(sh("certify " + m.string() + " " + c.string()).code, kOk);
}

// ---- in-process -----------------------------------------------------------

TEST(Report, JsonRoundTripIsIdentity) {
  for (const char* name : {"gambler", "mini_roulette", "log"}) {
    RunConfig cfg;
    cfg.command = "bound";
    cfg.model_path = model(name);
    cfg.format = Format::Json;
    std::ostringstream out, err;
    run(cfg, out, err);
    const auto j = json::parse(out.str());
    const Report r = report_from_json(j);
    EXPECT_EQ(report_to_json(r), j) << name;
    EXPECT_EQ(report_from_json(report_to_json(r)), r) << name;
  }
  RunConfig cfg;
  cfg.command = "simulate";
  cfg.model_path = model("gambler");
  cfg.format = Format::Json;
  cfg.trials = 100;
  std::ostringstream out, err;
  run(cfg, out, err);
  const Report r = report_from_json(json::parse(out.str()));
  EXPECT_EQ(report_from_json(report_to_json(r)), r);
}

TEST(Report, CertificateRationalsAreExact) {
  solve::BoundCertificate c;
  c.vars = {"x", "y"};
  c.a = {Rational(1, 3), Rational(-7, 2)};
  c.b = Rational(5, 11);
  c.K = Rational(-1, 7);
  c.Kprime = Rational(2, 9);
  c.M = Rational(13, 6);
  c.choice = 2;
  c.init = std::vector<Rational>{Rational(1), Rational(2)};
  EXPECT_EQ(certificate_from_json(json::parse(certificate_to_json(c).dump())), c);
  auto j = certificate_to_json(c);
  EXPECT_EQ(j["choice"], 3);
  j["choice"] = 0;
  EXPECT_THROW(certificate_from_json(j), SchemaError);
  j["choice"] = 3;
  j["schema"] = 2;
  EXPECT_THROW(certificate_from_json(j), SchemaError);
}
