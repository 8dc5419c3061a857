// Command-line front end: trimer {run, scan, stability, optimize, scenario list|show}.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 runtime failure
// (divergence, step underflow, I/O, optimizer failure).

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trimer/trimer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
  std::string scenario;
  std::string out = "out";
  std::optional<double> rel_tol;
  std::optional<double> stride;
  std::optional<double> delta;
};

struct OptimizeOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::optional<std::string> family;
  std::optional<std::size_t> knots;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--scenario", o.scenario, "Scenario JSON file or built-in name")->required();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--rel-tol", o.rel_tol, "Integrator relative tolerance (abs_tol = rel_tol / 100)");
  cmd->add_option("--stride", o.stride, "Sampling stride (trajectory, CPT curve and stability scan)");
  cmd->add_option("--delta", o.delta, "Override the Feshbach detuning delta");
}

trimer::Scenario resolve(const CommonOptions& o) {
  trimer::Scenario s = std::filesystem::is_regular_file(o.scenario)
                           ? trimer::load_scenario_file(o.scenario)
                           : trimer::builtin_scenario(o.scenario);
  if (o.rel_tol) {
    s.setup.config.rel_tol = *o.rel_tol;
    s.setup.config.abs_tol = *o.rel_tol * 1e-2;
  }
  if (o.stride) {
    s.setup.config.sample_stride = *o.stride;
    trimer::StabilitySettings st = s.stability.value_or(trimer::StabilitySettings{});
    st.stride = *o.stride;
    s.stability = st;
  }
  if (o.delta) s.setup.params.delta = *o.delta;
  return s;
}

void apply(const OptimizeOptions& o, trimer::Scenario& s) {
  trimer::OptimizerSettings op = s.optimizer.value_or(trimer::OptimizerSettings{});
  if (o.seed) op.seed = *o.seed;
  if (o.budget) op.budget = *o.budget;
  if (o.knots) op.knots = *o.knots;
  if (o.family) {
    if (*o.family == "constant") {
      op.family = trimer::ScheduleFamily::ConstantR;
    } else if (*o.family == "piecewise_linear") {
      op.family = trimer::ScheduleFamily::PiecewiseLinear;
    } else {
      throw trimer::ValidationError("--family must be constant or piecewise_linear");
    }
  }
  s.optimizer = op;
}

int execute(const trimer::Scenario& s, const std::string& out, std::optional<trimer::Task> task) {
  const auto rep = trimer::run_scenario(s, out, task);
  std::cout << s.name << " [" << trimer::task_name(rep.task) << "]\n";
  for (const auto& line : rep.summary) std::cout << "  " << line << "\n";
  for (const auto& f : rep.files) std::cout << "  wrote " << f.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field simulator for atom-to-trimer conversion by photoassociation STIRAP"};
  app.require_subcommand(1);

  CommonOptions run_opt;
  CommonOptions scan_opt;
  CommonOptions stab_opt;
  CommonOptions optim_opt;
  OptimizeOptions optim_extra;
  std::string show_name;

  auto* run = app.add_subcommand("run", "Run the scenario's pipeline (integration by default)");
  add_common(run, run_opt);
  auto* scan = app.add_subcommand("scan", "Sweep R and/or delta over the scenario's grid");
  add_common(scan, scan_opt);
  auto* stab = app.add_subcommand("stability", "Linear stability scan along the dark-state curve");
  add_common(stab, stab_opt);
  auto* optim = app.add_subcommand("optimize", "Evolutionary search over ratio schedules R(t)");
  add_common(optim, optim_opt);
  optim->add_option("--seed", optim_extra.seed, "RNG seed");
  optim->add_option("--budget", optim_extra.budget, "Total objective evaluations");
  optim->add_option("--family", optim_extra.family, "constant or piecewise_linear");
  optim->add_option("--knots", optim_extra.knots, "Knots of the piecewise-linear family");

  auto* scen = app.add_subcommand("scenario", "Inspect built-in scenarios");
  scen->require_subcommand(1);
  auto* list = scen->add_subcommand("list", "List built-in scenario names");
  auto* show = scen->add_subcommand("show", "Print a scenario in full JSON form");
  show->add_option("name", show_name, "Built-in name or JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return execute(resolve(run_opt), run_opt.out, std::nullopt);
    if (*scan) return execute(resolve(scan_opt), scan_opt.out, trimer::Task::Scan);
    if (*stab) return execute(resolve(stab_opt), stab_opt.out, trimer::Task::Stability);
    if (*optim) {
      auto s = resolve(optim_opt);
      apply(optim_extra, s);
      return execute(s, optim_opt.out, trimer::Task::Optimize);
    }
    if (*list) {
      for (const auto& name : trimer::builtin_scenario_names()) {
        const auto s = trimer::builtin_scenario(name);
        std::cout << name << "\t" << s.description << "\n";
      }
      return kExitOk;
    }
    if (*show) {
      const auto s = std::filesystem::is_regular_file(show_name) ? trimer::load_scenario_file(show_name)
                                                                 : trimer::builtin_scenario(show_name);
      std::cout << trimer::serialize_scenario(s);
      return kExitOk;
    }
  } catch (const trimer::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const trimer::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const trimer::ConfigurationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const trimer::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << " (last good t = " << e.last_good_time() << ")\n";
    return kExitRuntime;
  } catch (const trimer::StepUnderflowError& e) {
    std::cerr << "step underflow: " << e.what() << " (last good t = " << e.last_good_time() << ")\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}
