#pragma once

// Scans over the channel ratio R and the Feshbach detuning, and an
// evolutionary search over ratio schedules R(t).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "trimer/cpt.hpp"
#include "trimer/errors.hpp"
#include "trimer/integrator.hpp"
#include "trimer/model.hpp"
#include "trimer/parallel.hpp"
#include "trimer/stability.hpp"

namespace trimer {

/// Everything needed for one integration.
struct RunSetup {
  ModelParams params;
  StateVector initial = StateVector::stoichiometric();
  TimeWindow window;
  IntegratorConfig config;

  friend bool operator==(const RunSetup&, const RunSetup&) = default;
};

enum class Objective { FinalTrimer, PeakTrimer, CptTrackingError };

constexpr std::string_view objective_name(Objective o) noexcept {
  switch (o) {
    case Objective::FinalTrimer: return "final_trimer";
    case Objective::PeakTrimer: return "peak_trimer";
    case Objective::CptTrackingError: return "cpt_tracking_error";
  }
  return "?";
}

/// Largest |N_g(t) - N_gs(t)| over the samples of a run.
inline double cpt_tracking_error(const Trajectory& tr, const ModelParams& p) {
  double worst = 0.0;
  for (const auto& s : tr.samples)
    worst = std::max(worst, std::abs(s.populations[index(Species::Trimer)] -
                                     instantaneous_dark_state(p, s.t).n_g));
  return worst;
}

/// Larger is better; the tracking error enters with a minus sign.
inline double objective_value(Objective o, const Trajectory& tr, const ModelParams& p) {
  switch (o) {
    case Objective::FinalTrimer: return tr.final_population(Species::Trimer);
    case Objective::PeakTrimer: return tr.peak_population(Species::Trimer);
    case Objective::CptTrackingError: return -cpt_tracking_error(tr, p);
  }
  return 0.0;
}

enum class SweepParameter { Ratio, Detuning, Both };

struct SweepSpec {
  RunSetup base;
  SweepParameter parameter = SweepParameter::Ratio;
  std::vector<double> ratios;     ///< used for Ratio and Both
  std::vector<double> detunings;  ///< delta values, used for Detuning and Both
  Objective objective = Objective::FinalTrimer;
  double stability_stride = 1.0;  ///< CPT-curve spacing of the per-row stability summary; 0 disables it
  std::size_t threads = 0;

  void validate() const {
    const bool need_r = parameter != SweepParameter::Detuning;
    const bool need_d = parameter != SweepParameter::Ratio;
    if (need_r && ratios.empty()) throw ConfigurationError("sweep grid of R values is empty");
    if (need_d && detunings.empty()) throw ConfigurationError("sweep grid of delta values is empty");
    if (need_r) {
      if (base.params.channel != Channel::Dual)
        throw ConfigurationError("an R sweep requires the dual channel");
      for (double r : ratios)
        if (!(std::isfinite(r) && r > 0.0))
          throw ConfigurationError("R values must be > 0 (no CPT solution for R < 0)");
    }
    for (double d : detunings)
      if (!std::isfinite(d)) throw ConfigurationError("delta values must be finite");
    if (!(stability_stride >= 0.0)) throw ConfigurationError("stability stride must be >= 0");
  }
};

struct StabilitySummary {
  std::size_t samples = 0;
  std::size_t unstable = 0;
  double max_real_part = 0.0;
};

struct ScanRow {
  std::optional<double> ratio;
  std::optional<double> delta;
  IntegrationStatus status = IntegrationStatus::Completed;
  std::string diagnostic;
  double final_trimer = std::numeric_limits<double>::quiet_NaN();
  double peak_trimer = std::numeric_limits<double>::quiet_NaN();
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::optional<StabilitySummary> stability;

  bool ok() const noexcept { return status == IntegrationStatus::Completed && diagnostic.empty(); }
};

namespace detail {

struct GridPoint {
  std::optional<double> ratio;
  std::optional<double> delta;
};

// R varies slowest.
inline std::vector<GridPoint> expand_grid(const SweepSpec& spec) {
  std::vector<GridPoint> grid;
  switch (spec.parameter) {
    case SweepParameter::Ratio:
      for (double r : spec.ratios) grid.push_back({r, std::nullopt});
      break;
    case SweepParameter::Detuning:
      for (double d : spec.detunings) grid.push_back({std::nullopt, d});
      break;
    case SweepParameter::Both:
      for (double r : spec.ratios)
        for (double d : spec.detunings) grid.push_back({r, d});
      break;
  }
  return grid;
}

inline ScanRow evaluate_point(const SweepSpec& spec, const GridPoint& pt) {
  ScanRow row;
  row.ratio = pt.ratio;
  row.delta = pt.delta;
  ModelParams p = spec.base.params;
  if (pt.ratio) p.ratio = RatioSchedule::constant(*pt.ratio);
  if (pt.delta) p.delta = *pt.delta;
  try {
    const auto result = integrate(p, spec.base.initial, spec.base.window, spec.base.config);
    row.status = result.status;
    row.diagnostic = result.diagnostic;
    if (result.ok()) {
      const auto& tr = result.trajectory;
      row.final_trimer = tr.final_population(Species::Trimer);
      row.peak_trimer = tr.peak_population(Species::Trimer);
      row.objective = objective_value(spec.objective, tr, p);
    }
  } catch (const std::exception& e) {
    row.status = IntegrationStatus::Diverged;
    row.diagnostic = e.what();
    return row;
  }
  if (spec.stability_stride > 0.0) {
    try {
      StabilityOptions opt;
      opt.threads = 1;
      const auto rep = stability_scan_cpt(p, spec.base.window, spec.stability_stride, opt);
      row.stability = StabilitySummary{rep.samples.size(), rep.unstable_count(), rep.max_real_part()};
    } catch (const std::exception& e) {
      row.diagnostic = std::string("stability scan failed: ") + e.what();
    }
  }
  return row;
}

}  // namespace detail

/// One integration per grid point; rows follow grid order (R outer, delta
/// inner). Failures are recorded per row and never abort the sweep.
inline std::vector<ScanRow> scan_R(const SweepSpec& spec) {
  spec.validate();
  const auto grid = detail::expand_grid(spec);
  return parallel_map(
      grid.size(), [&](std::size_t i) { return detail::evaluate_point(spec, grid[i]); },
      spec.threads);
}

/// Index of the best successful row by objective, if any.
inline std::optional<std::size_t> best_row(const std::vector<ScanRow>& rows) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok() || !std::isfinite(rows[i].objective)) continue;
    if (!best || rows[i].objective > rows[*best].objective) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Ratio-schedule optimization

enum class ScheduleFamily { ConstantR, PiecewiseLinear };

constexpr std::string_view family_name(ScheduleFamily f) noexcept {
  return f == ScheduleFamily::ConstantR ? "constant" : "piecewise_linear";
}

struct OptimizationSpec {
  RunSetup base;
  ScheduleFamily family = ScheduleFamily::ConstantR;
  std::size_t knots = 5;  ///< PiecewiseLinear: knots evenly spaced over the window
  std::size_t budget = 60;  ///< total objective evaluations, seeds included
  std::uint64_t seed = 42;
  Objective objective = Objective::FinalTrimer;
  /// Starting R levels; each becomes a constant candidate (all knots equal).
  std::vector<double> seeds = {1.0, 1.5, 2.0, 2.5, 3.0};
  double mutation_scale = 0.1;  ///< sigma = mutation_scale * R
  double min_ratio = 1e-3;
  std::size_t threads = 0;

  std::size_t genes() const noexcept { return family == ScheduleFamily::ConstantR ? 1 : knots; }

  void validate() const {
    if (base.params.channel != Channel::Dual)
      throw ConfigurationError("ratio optimization requires the dual channel");
    if (seeds.empty()) throw ConfigurationError("optimizer needs at least one seed candidate");
    if (budget < seeds.size())
      throw ConfigurationError("budget must be >= population size (" +
                               std::to_string(seeds.size()) + ")");
    if (family == ScheduleFamily::PiecewiseLinear && knots < 2)
      throw ConfigurationError("piecewise-linear family needs >= 2 knots");
    for (double r : seeds)
      if (!(std::isfinite(r) && r > 0.0))
        throw ConfigurationError("seed R values must be > 0 (no CPT solution for R < 0)");
    if (!(mutation_scale >= 0.0) || !(min_ratio > 0.0))
      throw ConfigurationError("mutation_scale must be >= 0 and min_ratio > 0");
  }
};

struct Candidate {
  std::vector<double> genes;
  RatioSchedule schedule = RatioSchedule::constant(1.0);
  double objective = -std::numeric_limits<double>::infinity();
  bool ok = false;
  std::string diagnostic;
};

struct OptimizationResult {
  Candidate best;
  std::vector<double> trace;  ///< best-so-far objective after each generation (generation 0 = seeds)
  std::size_t evaluations = 0;
  std::size_t generations = 0;
};

/// Maps genes onto a schedule of the family.
inline RatioSchedule make_schedule(ScheduleFamily family, const std::vector<double>& genes,
                                   const TimeWindow& window) {
  if (family == ScheduleFamily::ConstantR) return RatioSchedule::constant(genes.at(0));
  std::vector<RatioSchedule::Knot> knots;
  const std::size_t k = genes.size();
  for (std::size_t i = 0; i < k; ++i) {
    const double t = window.start + window.length() * static_cast<double>(i) / static_cast<double>(k - 1);
    knots.push_back({t, genes[i]});
  }
  return RatioSchedule::piecewise_linear(std::move(knots));
}

namespace detail {

inline Candidate evaluate_candidate(const OptimizationSpec& spec, std::vector<double> genes) {
  Candidate c;
  c.genes = std::move(genes);
  try {
    c.schedule = make_schedule(spec.family, c.genes, spec.base.window);
    ModelParams p = spec.base.params;
    p.ratio = c.schedule;
    const auto result = integrate(p, spec.base.initial, spec.base.window, spec.base.config);
    if (result.ok()) {
      c.objective = objective_value(spec.objective, result.trajectory, p);
      c.ok = std::isfinite(c.objective);
      if (!c.ok) c.diagnostic = "objective is not finite";
    } else {
      c.diagnostic = result.diagnostic;
    }
  } catch (const std::exception& e) {
    c.diagnostic = e.what();
  }
  if (!c.ok) c.objective = -std::numeric_limits<double>::infinity();
  return c;
}

inline std::vector<Candidate> evaluate_all(const OptimizationSpec& spec,
                                           std::vector<std::vector<double>> genomes) {
  return parallel_map(
      genomes.size(), [&](std::size_t i) { return evaluate_candidate(spec, genomes[i]); },
      spec.threads);
}

}  // namespace detail

/// (mu + lambda) evolution strategy over the schedule's knot values. The
/// population is seeded with constant schedules, so the result is never worse
/// than the best seed. Offspring pick a parent uniformly and perturb every
/// gene by N(0, (mutation_scale R)^2), clipped at min_ratio. All random draws
/// happen before each generation's parallel evaluation, so a seed fixes the
/// result. Not a global optimizer.
inline OptimizationResult optimize_ratio_schedule(const OptimizationSpec& spec) {
  spec.validate();
  spec.base.params.validate();
  const std::size_t mu = spec.seeds.size();
  const std::size_t n_genes = spec.genes();

  std::vector<std::vector<double>> genomes;
  for (double r : spec.seeds) genomes.emplace_back(n_genes, r);
  std::vector<Candidate> population = detail::evaluate_all(spec, std::move(genomes));

  OptimizationResult out;
  out.evaluations = mu;
  auto by_objective = [](const Candidate& a, const Candidate& b) { return a.objective > b.objective; };
  std::stable_sort(population.begin(), population.end(), by_objective);
  out.trace.push_back(population.front().objective);

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, mu - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  while (out.evaluations < spec.budget) {
    const std::size_t lambda = std::min(mu, spec.budget - out.evaluations);
    std::vector<std::vector<double>> children;
    children.reserve(lambda);
    for (std::size_t k = 0; k < lambda; ++k) {
      std::vector<double> g = population[pick(rng)].genes;
      for (double& r : g) r = std::max(spec.min_ratio, r + spec.mutation_scale * r * normal(rng));
      children.push_back(std::move(g));
    }
    auto offspring = detail::evaluate_all(spec, std::move(children));
    out.evaluations += lambda;
    ++out.generations;
    population.insert(population.end(), std::make_move_iterator(offspring.begin()),
                      std::make_move_iterator(offspring.end()));
    std::stable_sort(population.begin(), population.end(), by_objective);
    population.resize(mu);
    out.trace.push_back(population.front().objective);
  }

  if (!population.front().ok) {
    std::string why = "every candidate failed to integrate";
    if (!population.front().diagnostic.empty()) why += " (e.g. " + population.front().diagnostic + ")";
    throw OptimizationError(why);
  }
  out.best = population.front();
  return out;
}

}  // namespace trimer
