#pragma once

// Linear stability of the mean-field flow around the adiabatic dark state.
//
// The dark state is not a fixed point of the lab-frame flow: every field turns
// at its chemical potential. The linearization is therefore taken in the frame
// co-rotating with the dark state, where it is stationary. In that frame the
// global phase of each atom species is a neutral direction and the two atom
// totals are conserved, so the Jacobian carries up to four structural zero
// eigenvalues forming Jordan blocks. Finite differences split such blocks into
// O(sqrt(h)) pairs that would read as spurious growth, so by default the
// spectrum is computed on the complement of those directions and the removed
// modes are reported as exact zeros.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string_view>
#include <vector>

#include "trimer/cpt.hpp"
#include "trimer/errors.hpp"
#include "trimer/integrator.hpp"
#include "trimer/linalg.hpp"
#include "trimer/model.hpp"
#include "trimer/parallel.hpp"

namespace trimer {

enum class LinearizationPoint {
  DarkState,   ///< instantaneous dark state at each sample time
  Integrated,  ///< the numerically integrated state
};

struct StabilityOptions {
  double threshold = 1e-8;
  double zero_mode_cutoff = 1e-10;  ///< |mu| below this never counts as growth
  double fd_step = 1e-6;
  LinearizationPoint point = LinearizationPoint::DarkState;
  bool co_rotating = true;       ///< linearize in the dark-state frame
  bool project_symmetries = true;  ///< remove phase and conservation modes
  std::size_t threads = 0;
};

enum class Classification { Stable, Unstable };

constexpr std::string_view classification_name(Classification c) noexcept {
  return c == Classification::Stable ? "stable" : "unstable";
}

struct StabilitySample {
  double t = 0.0;
  std::vector<std::complex<double>> eigenvalues;  ///< 2M values for M active fields
  double max_real_part = 0.0;  ///< over eigenvalues with |mu| >= zero_mode_cutoff
  Classification classification = Classification::Stable;
};

struct StabilityReport {
  std::vector<StabilitySample> samples;
  double threshold = 1e-8;

  std::size_t unstable_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [](const auto& s) {
      return s.classification == Classification::Unstable;
    }));
  }
  bool any_unstable() const noexcept { return unstable_count() > 0; }
  double max_real_part() const noexcept {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) m = std::max(m, s.max_real_part);
    return m;
  }
};

namespace detail {

// Central-difference Jacobian of f over the vector x.
template <class F>
DenseMatrix central_jacobian(F&& f, const std::vector<double>& x, double h) {
  const std::size_t n = x.size();
  DenseMatrix j(n);
  std::vector<double> xp = x;
  std::vector<double> fp(n);
  std::vector<double> fm(n);
  for (std::size_t k = 0; k < n; ++k) {
    xp[k] = x[k] + h;
    f(xp, fp);
    xp[k] = x[k] - h;
    f(xp, fm);
    xp[k] = x[k];
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(fp[i]) || !std::isfinite(fm[i]))
        throw EvaluationError("right-hand side is non-finite at a perturbed state");
      j(i, k) = (fp[i] - fm[i]) / (2.0 * h);
    }
  }
  return j;
}

// Rotation rates of the dark-state frame: the atoms turn at their chemical
// potentials and every molecule at the sum over its constituents.
inline std::array<double, kSpeciesCount> frame_frequencies(const StateVector& s,
                                                           const ModelParams& p) {
  const auto mu = p.chi.frequency_shifts(s.populations());
  const double wa = mu[index(Species::AtomA)];
  const double wb = mu[index(Species::AtomB)];
  std::array<double, kSpeciesCount> w{};
  for (std::size_t i = 0; i < kSpeciesCount; ++i) w[i] = kAtomsA[i] * wa + kAtomsB[i] * wb;
  return w;
}

}  // namespace detail

/// d(RHS)/d(state) over the interleaved (Re, Im) components of the active
/// fields, by central differences with step h, controls frozen at time t.
inline DenseMatrix jacobian_fd(const StateVector& state, double t, const ModelParams& p,
                               double h = 1e-6) {
  if (!state.finite()) throw InvalidStateError("state contains non-finite amplitudes");
  if (!(h > 0.0)) throw ConfigurationError("finite-difference step must be > 0");
  const Controls c = controls_at(p, t);
  const detail::Realification layout(p.channel);
  std::vector<double> x(layout.size());
  layout.pack(state, x);
  auto f = [&](const std::vector<double>& y, std::vector<double>& out) {
    const StateVector s = layout.unpack(y);
    if (!s.finite()) {
      std::fill(out.begin(), out.end(), std::numeric_limits<double>::quiet_NaN());
      return;
    }
    layout.pack(rhs(s, c, p), out);
  };
  return detail::central_jacobian(f, x, h);
}

/// Linearized generator of the flow about `state` as used for classification:
/// optionally shifted to the co-rotating frame and reduced by the symmetry and
/// conservation directions. `removed` receives the number of projected modes.
inline DenseMatrix linearized_generator(const StateVector& state, double t, const ModelParams& p,
                                        const StabilityOptions& opt, std::size_t* removed = nullptr) {
  DenseMatrix j = jacobian_fd(state, t, p, opt.fd_step);
  const detail::Realification layout(p.channel);
  const auto& species = layout.species();
  if (opt.co_rotating) {
    const auto w = detail::frame_frequencies(state, p);
    for (std::size_t k = 0; k < species.size(); ++k) {
      const double wk = w[index(species[k])];
      j(2 * k, 2 * k + 1) += wk;
      j(2 * k + 1, 2 * k) -= wk;
    }
  }
  if (removed) *removed = 0;
  if (!opt.project_symmetries) return j;

  const std::size_t n = layout.size();
  std::vector<std::vector<double>> directions;
  for (const auto* q : {&kAtomsA, &kAtomsB}) {
    std::vector<double> grad(n);
    std::vector<double> phase(n);
    for (std::size_t k = 0; k < species.size(); ++k) {
      const double qk = (*q)[index(species[k])];
      const Complex z = state[species[k]];
      grad[2 * k] = qk * z.real();
      grad[2 * k + 1] = qk * z.imag();
      phase[2 * k] = -qk * z.imag();
      phase[2 * k + 1] = qk * z.real();
    }
    directions.push_back(std::move(grad));
    directions.push_back(std::move(phase));
  }
  const DenseMatrix u = orthogonal_complement(directions, n);
  if (removed) *removed = n - u.cols();
  return u.transposed() * j * u;
}

/// Spectrum and classification at one linearization point.
inline StabilitySample analyze_point(const StateVector& state, double t, const ModelParams& p,
                                     const StabilityOptions& opt = {}) {
  std::size_t removed = 0;
  const DenseMatrix g = linearized_generator(state, t, p, opt, &removed);
  StabilitySample out;
  out.t = t;
  out.eigenvalues = eigen_spectrum(g);
  out.eigenvalues.insert(out.eigenvalues.end(), removed, {0.0, 0.0});
  double worst = 0.0;
  bool any = false;
  for (const auto& mu : out.eigenvalues) {
    if (std::abs(mu) < opt.zero_mode_cutoff) continue;
    worst = any ? std::max(worst, mu.real()) : mu.real();
    any = true;
  }
  out.max_real_part = worst;
  out.classification =
      worst > opt.threshold ? Classification::Unstable : Classification::Stable;
  return out;
}

/// Dark-state amplitudes at t with real, non-negative phases.
inline StateVector dark_state_at(const ModelParams& p, double t) {
  return instantaneous_dark_state(p, t).amplitudes;
}

/// Stability along the ideal dark-state curve at the given times.
inline StabilityReport stability_scan_cpt(const ModelParams& p, const std::vector<double>& times,
                                          const StabilityOptions& opt = {}) {
  p.validate();
  StabilityReport report;
  report.threshold = opt.threshold;
  report.samples = parallel_map(
      times.size(), [&](std::size_t i) { return analyze_point(dark_state_at(p, times[i]), times[i], p, opt); },
      opt.threads);
  return report;
}

inline StabilityReport stability_scan_cpt(const ModelParams& p, const TimeWindow& window,
                                          double stride, const StabilityOptions& opt = {}) {
  window.validate();
  return stability_scan_cpt(p, sample_times(window.start, window.end, stride), opt);
}

/// Stability at the sample times of a trajectory, linearized either about the
/// dark state at each time or about the sampled state itself.
inline StabilityReport stability_scan(const Trajectory& trajectory, const ModelParams& p,
                                      const StabilityOptions& opt = {}) {
  if (trajectory.empty()) throw ConfigurationError("stability_scan needs at least one sample");
  p.validate();
  StabilityReport report;
  report.threshold = opt.threshold;
  report.samples = parallel_map(
      trajectory.size(),
      [&](std::size_t i) {
        const Sample& s = trajectory.samples[i];
        const StateVector point =
            opt.point == LinearizationPoint::DarkState ? dark_state_at(p, s.t) : s.state;
        return analyze_point(point, s.t, p, opt);
      },
      opt.threads);
  return report;
}

}  // namespace trimer
