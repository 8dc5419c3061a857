#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "trimer/cpt.hpp"
#include "trimer/errors.hpp"
#include "trimer/model.hpp"
#include "trimer/ode.hpp"

namespace trimer {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  ///< 0 = automatic
  double max_step = 1.0;
  double min_step = 1e-12;  ///< underflow guard
  double sample_stride = 0.5;
  std::size_t max_steps = 10'000'000;

  void validate() const {
    if (!(rel_tol > 0.0 && abs_tol > 0.0)) throw ConfigurationError("tolerances must be > 0");
    if (!(min_step > 0.0 && min_step < max_step))
      throw ConfigurationError("step bounds must satisfy 0 < min_step < max_step");
    if (!(initial_step >= 0.0)) throw ConfigurationError("initial_step must be >= 0");
    if (!(sample_stride > 0.0) || !std::isfinite(sample_stride))
      throw ConfigurationError("sample_stride must be > 0");
  }

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

struct TimeWindow {
  double start = 0.0;
  double end = 200.0;

  double length() const noexcept { return end - start; }

  void validate() const {
    if (!(std::isfinite(start) && std::isfinite(end) && end > start))
      throw ConfigurationError("time window must be finite with end > start");
  }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct Sample {
  double t = 0.0;
  StateVector state;
  std::array<double, kSpeciesCount> populations{};
  Controls controls;
  double conserved = 0.0;
};

inline Sample make_sample(double t, const StateVector& state, const Controls& controls) {
  return {t, state, state.populations(), controls, conserved_atom_number(state)};
}

/// Time-ordered samples of one run.
struct Trajectory {
  std::vector<Sample> samples;

  bool empty() const noexcept { return samples.empty(); }
  std::size_t size() const noexcept { return samples.size(); }
  const Sample& front() const { return samples.front(); }
  const Sample& back() const { return samples.back(); }

  double final_population(Species s) const { return samples.back().populations[index(s)]; }

  double peak_population(Species s) const {
    double peak = 0.0;
    for (const auto& x : samples) peak = std::max(peak, x.populations[index(s)]);
    return peak;
  }

  double max_conservation_error(double reference = 1.0) const {
    double worst = 0.0;
    for (const auto& x : samples) worst = std::max(worst, std::abs(x.conserved - reference));
    return worst;
  }
};

enum class IntegrationStatus { Completed, StepUnderflow, Diverged, StepLimit };

constexpr std::string_view status_name(IntegrationStatus s) noexcept {
  switch (s) {
    case IntegrationStatus::Completed: return "completed";
    case IntegrationStatus::StepUnderflow: return "step_underflow";
    case IntegrationStatus::Diverged: return "diverged";
    case IntegrationStatus::StepLimit: return "step_limit";
  }
  return "?";
}

struct IntegrationResult {
  Trajectory trajectory;  ///< partial when status != Completed
  IntegrationStatus status = IntegrationStatus::Completed;
  double last_good_time = 0.0;
  std::string diagnostic;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;

  bool ok() const noexcept { return status == IntegrationStatus::Completed; }

  /// The trajectory, or the matching error when the run did not complete.
  const Trajectory& value() const {
    switch (status) {
      case IntegrationStatus::Completed: return trajectory;
      case IntegrationStatus::Diverged: throw DivergenceError(diagnostic, last_good_time);
      case IntegrationStatus::StepUnderflow:
      case IntegrationStatus::StepLimit: throw StepUnderflowError(diagnostic, last_good_time);
    }
    return trajectory;
  }
};

namespace detail {

// Maps the active complex fields onto the interleaved (Re, Im) vector the
// integrator works on.
class Realification {
 public:
  explicit Realification(Channel channel) : species_(active_species(channel)) {}

  std::size_t size() const noexcept { return 2 * species_.size(); }
  const std::vector<Species>& species() const noexcept { return species_; }

  void pack(const StateVector& s, std::span<double> y) const noexcept {
    for (std::size_t k = 0; k < species_.size(); ++k) {
      y[2 * k] = s[species_[k]].real();
      y[2 * k + 1] = s[species_[k]].imag();
    }
  }

  StateVector unpack(std::span<const double> y) const noexcept {
    StateVector s;
    for (std::size_t k = 0; k < species_.size(); ++k)
      s[species_[k]] = Complex(y[2 * k], y[2 * k + 1]);
    return s;
  }

 private:
  std::vector<Species> species_;
};

// Real-valued right-hand side seen by the integrator; controls are resolved at
// every stage time.
struct MeanFieldSystem {
  const ModelParams* params;
  const Realification* layout;

  void operator()(double t, std::span<const double> y, std::span<double> dy) const {
    const StateVector s = layout->unpack(y);
    if (!s.finite()) {
      std::fill(dy.begin(), dy.end(), std::numeric_limits<double>::quiet_NaN());
      return;
    }
    layout->pack(rhs(s, controls_at(*params, t), *params), dy);
  }
};

inline ode::StepControl step_control(const IntegratorConfig& c) {
  return {c.rel_tol, c.abs_tol, c.initial_step, c.max_step, c.min_step, c.max_steps};
}

}  // namespace detail

/// Integrates the mean-field equations over the window, sampling every
/// config.sample_stride (plus the window end). Runtime failures (blow-up, step
/// underflow) are reported in the result with the partial trajectory; invalid
/// inputs throw.
inline IntegrationResult integrate(const ModelParams& params, const StateVector& initial,
                                   const TimeWindow& window, const IntegratorConfig& config) {
  params.validate();
  config.validate();
  window.validate();
  if (!initial.finite()) throw InvalidStateError("initial state contains non-finite amplitudes");
  if (params.uses_aa() && !params.omega1.covers(window.start, window.end))
    throw ConfigurationError("omega1 schedule does not cover the simulation window");
  if (params.uses_ab() && !(params.channel == Channel::Dual && params.ratio) &&
      !params.omega2.covers(window.start, window.end))
    throw ConfigurationError("omega2 schedule does not cover the simulation window");

  const detail::Realification layout(params.channel);
  std::vector<double> y0(layout.size());
  layout.pack(initial, y0);

  const auto times = sample_times(window.start, window.end, config.sample_stride);
  IntegrationResult result;
  result.trajectory.samples.reserve(times.size());
  auto observer = [&](double t, std::span<const double> y) {
    const StateVector s = layout.unpack(y);
    result.trajectory.samples.push_back(make_sample(t, s, controls_at(params, t)));
  };

  const auto outcome =
      ode::integrate_adaptive(detail::MeanFieldSystem{&params, &layout}, window.start,
                              window.end, std::move(y0), times, detail::step_control(config),
                              observer);
  result.last_good_time = outcome.t_reached;
  result.accepted_steps = outcome.accepted;
  result.rejected_steps = outcome.rejected;
  result.rhs_evaluations = outcome.evaluations;
  switch (outcome.status) {
    case ode::Status::Success: result.status = IntegrationStatus::Completed; break;
    case ode::Status::NonFinite:
      result.status = IntegrationStatus::Diverged;
      result.diagnostic = "state became non-finite after t = " + std::to_string(outcome.t_reached);
      break;
    case ode::Status::StepUnderflow:
      result.status = IntegrationStatus::StepUnderflow;
      result.diagnostic = "step size fell below min_step at t = " + std::to_string(outcome.t_reached);
      break;
    case ode::Status::StepLimit:
      result.status = IntegrationStatus::StepLimit;
      result.diagnostic = "max_steps exhausted at t = " + std::to_string(outcome.t_reached);
      break;
  }
  return result;
}

/// Final state of the fixed-step 8th-order scheme with n_steps equal steps.
inline StateVector integrate_fixed_steps(const ModelParams& params, const StateVector& initial,
                                         const TimeWindow& window, std::size_t n_steps) {
  const detail::Realification layout(params.channel);
  std::vector<double> y0(layout.size());
  layout.pack(initial, y0);
  const auto y = ode::integrate_fixed(detail::MeanFieldSystem{&params, &layout}, window.start,
                                      window.end, std::move(y0), n_steps);
  return layout.unpack(y);
}

struct OrderReport {
  std::vector<std::size_t> step_counts;
  std::vector<double> errors;            ///< max-abs final-state error per step count
  std::vector<double> pairwise_orders;   ///< log2(e_k / e_{k+1}) where both are resolvable
  std::optional<double> order;           ///< finest resolvable pairwise order
  int design_order = ode::dop853::kDesignOrder;
};

inline double max_abs_difference(const StateVector& a, const StateVector& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < kSpeciesCount; ++i) {
    worst = std::max(worst, std::abs(a.psi[i].real() - b.psi[i].real()));
    worst = std::max(worst, std::abs(a.psi[i].imag() - b.psi[i].imag()));
  }
  return worst;
}

/// Convergence order of the fixed-step scheme under step doubling. With an
/// exact final state the errors are measured against it; otherwise the
/// successive differences y_N - y_2N are used (Richardson). Errors below
/// resolvable_error are treated as round-off and excluded from the estimate.
inline OrderReport order_check(const ModelParams& params, const StateVector& initial,
                               const TimeWindow& window,
                               std::vector<std::size_t> step_counts = {4, 8, 16, 32},
                               std::optional<StateVector> exact_final = std::nullopt,
                               double resolvable_error = 1e-13) {
  OrderReport report;
  report.step_counts = step_counts;
  std::vector<StateVector> finals;
  for (std::size_t n : step_counts) finals.push_back(integrate_fixed_steps(params, initial, window, n));
  if (exact_final) {
    for (const auto& f : finals) report.errors.push_back(max_abs_difference(f, *exact_final));
  } else {
    for (std::size_t k = 0; k + 1 < finals.size(); ++k)
      report.errors.push_back(max_abs_difference(finals[k], finals[k + 1]));
  }
  for (std::size_t k = 0; k + 1 < report.errors.size(); ++k) {
    const double e0 = report.errors[k];
    const double e1 = report.errors[k + 1];
    if (e0 > resolvable_error && e1 > resolvable_error) {
      report.pairwise_orders.push_back(std::log2(e0 / e1));
    }
  }
  if (!report.pairwise_orders.empty()) report.order = report.pairwise_orders.back();
  return report;
}

/// Largest difference of final populations between two tolerance settings.
inline double self_convergence(const ModelParams& params, const StateVector& initial,
                               const TimeWindow& window, IntegratorConfig config,
                               double rel_tol_coarse, double rel_tol_fine) {
  auto final_pops = [&](double rt) {
    config.rel_tol = rt;
    config.abs_tol = rt * 1e-2;
    config.sample_stride = window.length();
    return integrate(params, initial, window, config).value().back().populations;
  };
  const auto a = final_pops(rel_tol_coarse);
  const auto b = final_pops(rel_tol_fine);
  double worst = 0.0;
  for (std::size_t i = 0; i < kSpeciesCount; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace trimer
