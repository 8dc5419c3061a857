#pragma once

// Coherent-population-trapping (atom-molecule dark state) algebra and the
// resonance-tracking detuning controller.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "trimer/errors.hpp"
#include "trimer/model.hpp"

namespace trimer {

/// eta = lambda / Omega, non-negative, with an explicit Omega -> 0 limit.
class CouplingRatio {
 public:
  constexpr CouplingRatio() = default;

  static CouplingRatio finite(double eta) {
    if (!(eta >= 0.0) || !std::isfinite(eta))
      throw DomainError("coupling ratio must be finite and >= 0, got " + std::to_string(eta));
    return CouplingRatio(eta, false);
  }

  static constexpr CouplingRatio infinite() noexcept { return CouplingRatio(0.0, true); }

  /// lambda / omega; omega == 0 gives the infinite limit unless lambda == 0.
  static CouplingRatio from_rates(double lambda, double omega) {
    if (!(lambda >= 0.0) || !(omega >= 0.0))
      throw DomainError("couplings and Rabi frequencies must be >= 0");
    if (lambda == 0.0) return CouplingRatio(0.0, false);
    if (omega == 0.0) return infinite();
    const double eta = lambda / omega;
    return std::isfinite(eta) ? CouplingRatio(eta, false) : infinite();
  }

  constexpr bool is_infinite() const noexcept { return infinite_; }
  constexpr double value() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr bool operator==(const CouplingRatio&, const CouplingRatio&) = default;

 private:
  constexpr CouplingRatio(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_ = 0.0;
  bool infinite_ = false;
};

enum class ReactionPath { AA, AB };

/// Steady state with empty dimer modes.
struct DarkStateSolution {
  double n_a = 0.0;
  double n_b = 0.0;
  double n_d = 0.0;  ///< always zero
  double n_g = 0.0;
  StateVector amplitudes;
  CouplingRatio eta1;
  CouplingRatio eta2;
};

namespace detail {

inline DarkStateSolution make_solution(double na, double nb, double ng, CouplingRatio e1,
                                       CouplingRatio e2) {
  DarkStateSolution sol;
  sol.n_a = na;
  sol.n_b = nb;
  sol.n_g = ng;
  sol.amplitudes[Species::AtomA] = std::sqrt(na);
  sol.amplitudes[Species::AtomB] = std::sqrt(nb);
  sol.amplitudes[Species::Trimer] = std::sqrt(ng);
  sol.eta1 = e1;
  sol.eta2 = e2;
  return sol;
}

}  // namespace detail

/// Single-path dark state reached from the 2:1 atomic mixture:
/// N_g = (1/3) k eta^2 / (1 + k eta^2), k = 4 for the A2 path and k = 1 for AB.
inline DarkStateSolution dark_state_single(CouplingRatio eta, ReactionPath path) {
  const double k = path == ReactionPath::AA ? 4.0 : 1.0;
  double nb = 0.0;
  double ng = 1.0 / 3.0;
  if (!eta.is_infinite()) {
    const double x = k * eta.value() * eta.value();
    if (std::isfinite(x)) {
      nb = (1.0 / 3.0) / (1.0 + x);
      ng = (1.0 / 3.0) * (x > 1.0 ? 1.0 / (1.0 + 1.0 / x) : x / (1.0 + x));
    }
  }
  const CouplingRatio zero = CouplingRatio::finite(0.0);
  return path == ReactionPath::AA ? detail::make_solution(2.0 * nb, nb, ng, eta, zero)
                                  : detail::make_solution(2.0 * nb, nb, ng, zero, eta);
}

/// Two-path dark state satisfying both stationarity relations
/// eta1 psi_a^2 = psi_b psi_g and eta2 psi_b = psi_g together with
/// N_a + N_b + 3 N_g = 1:
///   N_g = eta1 eta2^2 / (eta1 + eta2 + 3 eta1 eta2^2),
///   N_b = eta1 / (...), N_a = eta2 / (...).
inline DarkStateSolution dark_state_dual(CouplingRatio eta1, CouplingRatio eta2) {
  if (!eta1.is_infinite() && eta1.value() == 0.0) {
    throw DomainError(
        "dual dark state needs eta1 > 0; use the single-channel AB formula when the A2 path "
        "is closed");
  }
  if (eta2.is_infinite()) return detail::make_solution(0.0, 0.0, 1.0 / 3.0, eta1, eta2);
  const double e2 = eta2.value();
  if (eta1.is_infinite()) {
    const double denom = 1.0 + 3.0 * e2 * e2;
    return detail::make_solution(0.0, 1.0 / denom, e2 * e2 / denom, eta1, eta2);
  }
  const double e1 = eta1.value();
  // every quotient below is the closed form divided through by a positive term,
  // which keeps large ratios free of overflow
  const double nb = 1.0 / (1.0 + e2 / e1 + 3.0 * e2 * e2);
  const double na = e2 == 0.0 ? 0.0 : 1.0 / (e1 / e2 + 1.0 + 3.0 * e1 * e2);
  const double ng = e2 == 0.0 ? 0.0 : 1.0 / (1.0 / (e2 * e2) + 1.0 / (e1 * e2) + 3.0);
  return detail::make_solution(na, nb, ng, eta1, eta2);
}

/// R = eta2 / eta1. Ratios of opposite sign have no dark state.
inline double channel_ratio(double eta1, double eta2) {
  if (eta1 == 0.0) throw DomainError("channel ratio undefined for eta1 = 0");
  const double r = eta2 / eta1;
  if (r < 0.0) throw DomainError("no CPT solution for R < 0");
  return r;
}

/// Least-squares common Delta for the two-path dark state and the norm of the
/// per-path phase-matching residuals.
struct ResonanceFit {
  double detuning = 0.0;
  double residual_norm = 0.0;
};

/// Each path keeps its dimer empty only while its source term stays phase locked.
/// A2 path: lambda1 psi_a^2 against Omega1 conj(psi_b) psi_g.
/// AB path: lambda2 psi_a psi_b against Omega2 conj(psi_a) psi_g.
/// Both give one linear condition on Delta; the fit is their mean.
inline ResonanceFit dual_resonance_fit(const ModelParams& p, const DarkStateSolution& sol) {
  std::array<double, kSpeciesCount> pops{};
  pops[index(Species::AtomA)] = sol.n_a;
  pops[index(Species::AtomB)] = sol.n_b;
  pops[index(Species::Trimer)] = sol.n_g;
  const auto mu = p.chi.frequency_shifts(pops);
  const double mu_a = mu[index(Species::AtomA)];
  const double mu_b = mu[index(Species::AtomB)];
  const double mu_g = mu[index(Species::Trimer)];

  // Delta + delta + mu_g must equal the rotation rate of the source pair
  // minus that of the partner atom in the PA term.
  const double target_aa = -p.delta + 2.0 * mu_a + mu_b - mu_g;
  const double target_ab = -p.delta + (mu_a + mu_b) + mu_a - mu_g;
  const double fit = 0.5 * (target_aa + target_ab);
  return {fit, std::hypot(fit - target_aa, fit - target_ab)};
}

/// Two-photon resonance detuning that keeps the dark state stationary.
/// Single path: Delta = -delta + 2 (2 chi_ag + chi_bg - chi_gg) N_g
///                     + (4 chi_aa - 2 chi_ag + 4 chi_ab + chi_bb - chi_bg) N_a.
/// Dual: the least-squares value of dual_resonance_fit.
inline double resonance_detuning(const ModelParams& p, const DarkStateSolution& sol) {
  if (p.channel == Channel::Dual) return dual_resonance_fit(p, sol).detuning;
  using S = Species;
  const auto& c = p.chi;
  return -p.delta + 2.0 * (2.0 * c(S::AtomA, S::Trimer) + c(S::AtomB, S::Trimer) - c(S::Trimer, S::Trimer)) * sol.n_g +
         (4.0 * c(S::AtomA, S::AtomA) - 2.0 * c(S::AtomA, S::Trimer) + 4.0 * c(S::AtomA, S::AtomB) +
          c(S::AtomB, S::AtomB) - c(S::AtomB, S::Trimer)) *
             sol.n_a;
}

/// eta_l(t) = lambda_l / Omega_l(t) for the active channels (inactive ones are 0).
inline std::pair<CouplingRatio, CouplingRatio> coupling_ratios(const ModelParams& p, double t) {
  const CouplingRatio zero = CouplingRatio::finite(0.0);
  const CouplingRatio e1 = p.uses_aa() ? CouplingRatio::from_rates(p.lambda1, p.omega1_at(t)) : zero;
  const CouplingRatio e2 = p.uses_ab() ? CouplingRatio::from_rates(p.lambda2, p.omega2_at(t)) : zero;
  return {e1, e2};
}

/// Dark state for the instantaneous pulse values at time t.
inline DarkStateSolution instantaneous_dark_state(const ModelParams& p, double t) {
  const auto [e1, e2] = coupling_ratios(p, t);
  switch (p.channel) {
    case Channel::AAOnly: return dark_state_single(e1, ReactionPath::AA);
    case Channel::ABOnly: return dark_state_single(e2, ReactionPath::AB);
    case Channel::Dual: return dark_state_dual(e1, e2);
  }
  return {};
}

/// Omega1(t), Omega2(t) and Delta(t) (fixed or resonance-tracking).
inline Controls controls_at(const ModelParams& p, double t) {
  Controls c;
  c.omega1 = p.omega1_at(t);
  c.omega2 = p.omega2_at(t);
  if (const auto* fixed = std::get_if<FixedDetuning>(&p.detuning)) {
    c.detuning = fixed->value;
  } else {
    c.detuning = resonance_detuning(p, instantaneous_dark_state(p, t));
  }
  return c;
}

inline StateDerivative rhs_single(const StateVector& s, double t, const ModelParams& p) {
  return rhs_single(s, controls_at(p, t), p);
}

inline StateDerivative rhs_dual(const StateVector& s, double t, const ModelParams& p) {
  return rhs_dual(s, controls_at(p, t), p);
}

inline StateDerivative rhs(const StateVector& s, double t, const ModelParams& p) {
  return rhs(s, controls_at(p, t), p);
}

/// Sampling grid t0, t0 + stride, ..., always ending exactly at t1.
inline std::vector<double> sample_times(double t0, double t1, double stride) {
  if (!(t1 > t0)) throw ConfigurationError("time window must satisfy t1 > t0");
  if (!(stride > 0.0) || !std::isfinite(stride))
    throw ConfigurationError("sample stride must be finite and > 0");
  std::vector<double> ts;
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / stride + 1e-9));
  ts.reserve(n + 2);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = t0 + static_cast<double>(k) * stride;
    if (t1 - t <= 1e-9 * stride) break;
    ts.push_back(t);
  }
  ts.push_back(t1);
  return ts;
}

struct CptPoint {
  double t = 0.0;
  CouplingRatio eta1;
  CouplingRatio eta2;
  double n_gs = 0.0;
};

/// Ideal dark-state trimer population along the pulse schedule.
inline std::vector<CptPoint> cpt_reference_curve(const ModelParams& p, double t0, double t1,
                                                 double stride) {
  std::vector<CptPoint> curve;
  for (double t : sample_times(t0, t1, stride)) {
    const auto sol = instantaneous_dark_state(p, t);
    curve.push_back({t, sol.eta1, sol.eta2, sol.n_g});
  }
  return curve;
}

}  // namespace trimer
