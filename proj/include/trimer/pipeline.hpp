#pragma once

// Scenario execution: runs the pipeline a scenario asks for and writes its
// exports into an output directory.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trimer/cpt.hpp"
#include "trimer/errors.hpp"
#include "trimer/export.hpp"
#include "trimer/integrator.hpp"
#include "trimer/scenario.hpp"
#include "trimer/stability.hpp"
#include "trimer/sweep.hpp"

namespace trimer {

struct PipelineReport {
  Task task = Task::Run;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> summary;  ///< human-readable result lines
};

namespace detail {

inline std::filesystem::path prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory " + dir.string());
  return dir;
}

inline std::string kv(std::string_view key, double value) {
  return std::string(key) + " = " + format_double(value);
}

}  // namespace detail

/// Runs `task` (default: the scenario's own) and writes
/// <name>_trajectory.csv / _cpt_overlay.csv, _cpt_curve.csv, _scan.csv,
/// _stability.csv or _optimize.csv with JSON sidecars into out_dir. A run that
/// diverges still writes its partial trajectory, then throws.
inline PipelineReport run_scenario(const Scenario& s, const std::filesystem::path& out_dir,
                                   std::optional<Task> task = std::nullopt) {
  s.validate();
  const auto dir = detail::prepare_output_dir(out_dir);
  PipelineReport rep;
  rep.task = task.value_or(s.task);
  const Json meta = export_metadata(s, task_name(rep.task));
  const ModelParams& p = s.setup.params;

  switch (rep.task) {
    case Task::Run: {
      const auto result = integrate(p, s.setup.initial, s.setup.window, s.setup.config);
      const auto csv = dir / (s.name + "_trajectory.csv");
      if (!result.trajectory.empty()) {
        export_timeseries(result.trajectory, csv, meta);
        rep.files.push_back(csv);
        rep.files.push_back(detail::sidecar_path(csv));
      }
      const Trajectory& tr = result.value();
      const auto overlay = dir / (s.name + "_cpt_overlay.csv");
      export_cpt_overlay(tr, p, overlay);
      rep.files.push_back(overlay);
      rep.summary.push_back(detail::kv("final N_g", tr.final_population(Species::Trimer)));
      rep.summary.push_back(detail::kv("peak N_g", tr.peak_population(Species::Trimer)));
      rep.summary.push_back(detail::kv("max N_d1", tr.peak_population(Species::DimerAA)));
      rep.summary.push_back(detail::kv("max N_d2", tr.peak_population(Species::DimerAB)));
      rep.summary.push_back("accepted steps = " + std::to_string(result.accepted_steps));
      break;
    }
    case Task::CptCurve: {
      const auto curve =
          cpt_reference_curve(p, s.setup.window.start, s.setup.window.end, s.setup.config.sample_stride);
      const auto csv = dir / (s.name + "_cpt_curve.csv");
      export_cpt_curve(curve, csv, meta);
      rep.files = {csv, detail::sidecar_path(csv)};
      rep.summary.push_back(detail::kv("N_gs(t_start)", curve.front().n_gs));
      rep.summary.push_back(detail::kv("N_gs(t_end)", curve.back().n_gs));
      break;
    }
    case Task::Scan: {
      const auto rows = scan_R(s.sweep_spec());
      const auto csv = dir / (s.name + "_scan.csv");
      export_scan(rows, csv, meta);
      rep.files = {csv, detail::sidecar_path(csv)};
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.ok() ? 0 : 1;
      rep.summary.push_back("rows = " + std::to_string(rows.size()) + ", failed = " + std::to_string(failed));
      if (const auto best = best_row(rows)) {
        const auto& b = rows[*best];
        std::string line = "best row:";
        if (b.ratio) line += " R = " + format_double(*b.ratio);
        if (b.delta) line += " delta = " + format_double(*b.delta);
        rep.summary.push_back(line + ", objective = " + format_double(b.objective));
      }
      break;
    }
    case Task::Stability: {
      StabilityReport report;
      if (s.stability_options().point == LinearizationPoint::Integrated) {
        IntegratorConfig cfg = s.setup.config;
        cfg.sample_stride = s.stability_stride();
        const auto result = integrate(p, s.setup.initial, s.setup.window, cfg);
        report = stability_scan(result.value(), p, s.stability_options());
      } else {
        report = stability_scan_cpt(p, s.setup.window, s.stability_stride(), s.stability_options());
      }
      const auto csv = dir / (s.name + "_stability.csv");
      export_stability(report, csv, meta);
      rep.files = {csv, detail::sidecar_path(csv)};
      rep.summary.push_back("samples = " + std::to_string(report.samples.size()) +
                            ", unstable = " + std::to_string(report.unstable_count()));
      rep.summary.push_back(detail::kv("max Re mu", report.max_real_part()));
      break;
    }
    case Task::Optimize: {
      const auto res = optimize_ratio_schedule(s.optimization_spec());
      const auto csv = dir / (s.name + "_optimize.csv");
      export_optimization(res, csv, meta);
      rep.files = {csv, detail::sidecar_path(csv)};
      rep.summary.push_back(detail::kv("best objective", res.best.objective));
      std::string genes = "best R knots =";
      for (double g : res.best.genes) genes += " " + format_double(g);
      rep.summary.push_back(genes);
      rep.summary.push_back("evaluations = " + std::to_string(res.evaluations));
      break;
    }
  }
  return rep;
}

/// Built-in scenario by name (see builtin_scenario_names()).
inline PipelineReport run_named_scenario(std::string_view name, const std::filesystem::path& out_dir) {
  return run_scenario(builtin_scenario(name), out_dir);
}

}  // namespace trimer
