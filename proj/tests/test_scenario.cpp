#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "trimer/pipeline.hpp"

namespace {

using namespace trimer;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("trimer_test_scenario_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string expect_validation_message(const std::string& text) {
  try {
    load_scenario_text(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ValidationError for " << text;
  return {};
}

TEST(Scenario, Fig1aLoadsWithDefaultParameters) {
  const Scenario s = builtin_scenario("fig1a");
  EXPECT_EQ(s.name, "fig1a");
  EXPECT_EQ(s.task, Task::Run);
  const ModelParams& p = s.setup.params;
  EXPECT_EQ(p.channel, Channel::AAOnly);
  EXPECT_EQ(p.delta, -3.0);
  EXPECT_EQ(p.gamma, 1.0);
  EXPECT_EQ(p.chi, CollisionMatrix::sodium_rubidium());
  EXPECT_EQ(p.omega1, PulseSchedule::sech(20.0, 20.0));
  EXPECT_TRUE(std::holds_alternative<CptTracking>(p.detuning));
  EXPECT_EQ(s.setup.window, (TimeWindow{0.0, 200.0}));
  EXPECT_EQ(s.setup.initial, StateVector::stoichiometric());
}

TEST(Scenario, DualBuiltinsCarryRatio) {
  const Scenario s = builtin_scenario("fig3c_R2");
  ASSERT_TRUE(s.setup.params.ratio.has_value());
  EXPECT_EQ((*s.setup.params.ratio)(50.0), 2.0);
  EXPECT_EQ(s.setup.params.channel, Channel::Dual);
}

TEST(Scenario, EveryBuiltinRoundTrips) {
  const auto names = builtin_scenario_names();
  EXPECT_GE(names.size(), 9u);
  for (const auto& name : names) {
    const Scenario s = builtin_scenario(name);
    const std::string text = serialize_scenario(s);
    const Scenario back = load_scenario_text(text);
    EXPECT_EQ(back, s) << name;
    EXPECT_EQ(serialize_scenario(back), text) << name;
  }
}

TEST(Scenario, EditedFieldsRoundTrip) {
  Scenario s = builtin_scenario("fig3b_R1");
  s.setup.params.ratio = RatioSchedule::piecewise_linear({{0.0, 1.0}, {100.0, 2.5}, {200.0, 2.0}});
  s.setup.params.chi.set(Species::DimerAB, Species::Trimer, -0.25);
  s.setup.params.omega1 = PulseSchedule::tabulated({0.0, 100.0, 200.0}, {1.0, 20.0, 1.0});
  s.setup.params.detuning = FixedDetuning{0.125};
  s.setup.initial[Species::Trimer] = Complex(0.1, -0.2);
  s.setup.config.rel_tol = 1e-9;
  const Scenario back = load_scenario_text(serialize_scenario(s));
  EXPECT_EQ(back, s);
}

TEST(Scenario, NegativeGammaRejected) {
  const auto msg = expect_validation_message(R"({"gamma": -1})");
  EXPECT_NE(msg.find("gamma ≥ 0"), std::string::npos) << msg;
}

TEST(Scenario, UnknownKeysRejected) {
  EXPECT_NE(expect_validation_message(R"({"gama": 1})").find("gama"), std::string::npos);
  EXPECT_NE(expect_validation_message(R"({"integrator": {"rtol": 1e-8}})").find("integrator.rtol"),
            std::string::npos);
}

TEST(Scenario, TypeAndRangeErrors) {
  expect_validation_message(R"({"channel": "AAB"})");
  expect_validation_message(R"({"delta": "three"})");
  expect_validation_message(R"({"window": {"start": 5, "end": 1}})");
  expect_validation_message(R"({"channel": "AA", "ratio": 2})");
  expect_validation_message(R"({"task": "scan", "channel": "dual", "ratio": 1, "sweep": {"ratios": [1, -2]}})");
  expect_validation_message(R"({"collisions": {"pairs": {"a-x": 0.1}}})");
  expect_validation_message(R"([1, 2])");
}

TEST(Scenario, MalformedJsonReportsBytePosition) {
  const std::string text = "{\"delta\": -3,\n \"gamma\": }";
  try {
    load_scenario_text(text);
    FAIL() << "malformed JSON accepted";
  } catch (const ParseError& e) {
    EXPECT_GT(e.position(), 20u);
    EXPECT_LE(e.position(), text.size());
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
  }
}

TEST(Scenario, UnknownBuiltinListsNames) {
  try {
    builtin_scenario("fig9");
    FAIL() << "unknown name accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("fig1a"), std::string::npos);
  }
}

TEST(Scenario, FileLoading) {
  const auto dir = scratch("file");
  fs::create_directories(dir);
  const auto path = dir / "s.json";
  std::ofstream(path) << serialize_scenario(builtin_scenario("fig1b"));
  EXPECT_EQ(load_scenario_file(path.string()), builtin_scenario("fig1b"));
  EXPECT_THROW(load_scenario_file((dir / "missing.json").string()), IoError);
  fs::remove_all(dir);
}

TEST(Scenario, SampleFilesInRepositoryLoad) {
  const fs::path dir = fs::path(TRIMER_SOURCE_DIR) / "scenarios";
  ASSERT_TRUE(fs::is_directory(dir));
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_scenario_file(e.path().string())) << e.path();
    ++n;
  }
  EXPECT_GT(n, 0u);
}

TEST(Pipeline, Fig1aKeepsDimerDark) {
  const auto dir = scratch("fig1a");
  const auto rep = run_named_scenario("fig1a", dir);
  ASSERT_EQ(rep.files.size(), 3u);
  for (const auto& f : rep.files) EXPECT_TRUE(fs::exists(f)) << f;
  const auto tr = import_timeseries(dir / "fig1a_trajectory.csv");
  EXPECT_LT(tr.peak_population(Species::DimerAA), 1e-3);
  EXPECT_GT(tr.final_population(Species::Trimer), 0.25);
  fs::remove_all(dir);
}

TEST(Pipeline, RatioScanPicksTwo) {
  const auto dir = scratch("rscan");
  const auto rep = run_named_scenario("rscan", dir);
  bool found = false;
  for (const auto& line : rep.summary) found = found || line.find("R = 2,") != std::string::npos;
  EXPECT_TRUE(found);
  fs::remove_all(dir);
}

TEST(Pipeline, CptCurveEndsAtOneThird) {
  const auto dir = scratch("cpt");
  run_named_scenario("cpt_curve", dir);
  std::ifstream in(dir / "cpt_curve_cpt_curve.csv");
  std::string line, last;
  std::getline(in, line);
  EXPECT_EQ(line, "t,eta1,eta2,N_gs");
  while (std::getline(in, line)) last = line;
  const double n_end = parse_double(last.substr(last.rfind(',') + 1));
  EXPECT_NEAR(n_end, 1.0 / 3.0, 1e-4);
  fs::remove_all(dir);
}

TEST(Pipeline, StabilityTaskFlagsPositiveDetuning) {
  const auto dir = scratch("stab");
  const auto rep = run_named_scenario("stability_fig1", dir);
  ASSERT_FALSE(rep.summary.empty());
  EXPECT_EQ(rep.summary[0].find("unstable = 0"), std::string::npos) << rep.summary[0];
  fs::remove_all(dir);
}

TEST(Pipeline, TaskOverrideAndFailures) {
  const auto dir = scratch("override");
  const auto rep = run_scenario(builtin_scenario("fig1b"), dir, Task::CptCurve);
  EXPECT_EQ(rep.task, Task::CptCurve);
  EXPECT_TRUE(fs::exists(dir / "fig1b_cpt_curve.csv"));

  Scenario s = builtin_scenario("fig1a");
  s.setup.config.max_steps = 10;
  EXPECT_THROW(run_scenario(s, dir), StepUnderflowError);
  EXPECT_TRUE(fs::exists(dir / "fig1a_trajectory.csv"));

  const auto blocker = dir / "plain_file";
  std::ofstream(blocker) << "x";
  EXPECT_THROW(run_named_scenario("fig1a", blocker / "sub"), IoError);
  fs::remove_all(dir);
}

}  // namespace
