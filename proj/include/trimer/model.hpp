#pragma once

// Mean-field model of Feshbach-assisted photoassociation into A2B trimers.
//
// Units: time in 1/lambda_ref, every rate (lambda, Omega, delta, Delta, gamma)
// in lambda_ref, collision strengths chi in lambda_ref/n with the density n
// absorbed (n = 1). For the sodium/rubidium parameter set lambda_ref is
// 4.718e4 1/s, so one code time unit is about 21.2 microseconds.
//
// Amplitudes are spatially uniform (single-mode approximation) and normalized
// per initial atom: populations N_i = |psi_i|^2 with
//   N_a + N_b + 2 (N_d1 + N_d2) + 3 N_g = 1
// for the default stoichiometric initial state.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trimer/errors.hpp"

namespace trimer {

using Complex = std::complex<double>;

enum class Species : std::size_t { AtomA = 0, AtomB, DimerAA, DimerAB, Trimer };

inline constexpr std::size_t kSpeciesCount = 5;

inline constexpr std::array<Species, kSpeciesCount> kAllSpecies = {
    Species::AtomA, Species::AtomB, Species::DimerAA, Species::DimerAB,
    Species::Trimer};

constexpr std::size_t index(Species s) noexcept {
  return static_cast<std::size_t>(s);
}

/// Number of atoms bound in one particle of each species.
inline constexpr std::array<int, kSpeciesCount> kAtomWeight = {1, 1, 2, 2, 3};
/// A-atom and B-atom content; the flow conserves both totals separately when gamma = 0.
inline constexpr std::array<int, kSpeciesCount> kAtomsA = {1, 0, 2, 1, 2};
inline constexpr std::array<int, kSpeciesCount> kAtomsB = {0, 1, 0, 1, 1};

constexpr std::string_view species_label(Species s) noexcept {
  constexpr std::array<std::string_view, kSpeciesCount> labels = {"a", "b", "d1",
                                                                   "d2", "g"};
  return labels[index(s)];
}

struct StateVector {
  std::array<Complex, kSpeciesCount> psi{};

  Complex& operator[](Species s) noexcept { return psi[index(s)]; }
  const Complex& operator[](Species s) const noexcept { return psi[index(s)]; }

  double population(Species s) const noexcept { return std::norm(psi[index(s)]); }

  std::array<double, kSpeciesCount> populations() const noexcept {
    std::array<double, kSpeciesCount> n{};
    for (std::size_t i = 0; i < kSpeciesCount; ++i) n[i] = std::norm(psi[i]);
    return n;
  }

  bool finite() const noexcept {
    return std::all_of(psi.begin(), psi.end(), [](const Complex& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  /// 2:1 mixture of A and B atoms with no molecules, zero phases.
  static StateVector stoichiometric() {
    StateVector s;
    s[Species::AtomA] = std::sqrt(2.0 / 3.0);
    s[Species::AtomB] = std::sqrt(1.0 / 3.0);
    return s;
  }

  friend bool operator==(const StateVector&, const StateVector&) = default;
};

using StateDerivative = StateVector;

/// N_a + N_b + 2 (N_d1 + N_d2) + 3 N_g.
inline double conserved_atom_number(const StateVector& s) noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < kSpeciesCount; ++i)
    total += kAtomWeight[i] * std::norm(s.psi[i]);
  return total;
}

/// Symmetric matrix of s-wave collision strengths chi_ij.
class CollisionMatrix {
 public:
  CollisionMatrix() = default;

  static CollisionMatrix uniform(double value) {
    CollisionMatrix m;
    for (auto& row : m.chi_) row.fill(value);
    return m;
  }

  /// Na-Rb parameter set: chi_aa = 0.3125, chi_bb = 0.5303, chi_ab = 0.4214,
  /// every other pair 0.0938 except chi_d1d2 = 0.
  static CollisionMatrix sodium_rubidium() {
    auto m = uniform(kMoleculeFill);
    m.set(Species::AtomA, Species::AtomA, 0.3125);
    m.set(Species::AtomB, Species::AtomB, 0.5303);
    m.set(Species::AtomA, Species::AtomB, 0.4214);
    m.set(Species::DimerAA, Species::DimerAB, 0.0);
    return m;
  }

  static constexpr double kMoleculeFill = 0.0938;

  double operator()(Species i, Species j) const noexcept {
    return chi_[index(i)][index(j)];
  }

  void set(Species i, Species j, double value) noexcept {
    chi_[index(i)][index(j)] = value;
    chi_[index(j)][index(i)] = value;
  }

  bool finite() const noexcept {
    for (const auto& row : chi_)
      for (double v : row)
        if (!std::isfinite(v)) return false;
    return true;
  }

  /// Collisional frequency shifts mu_i = 2 sum_j chi_ij N_j.
  std::array<double, kSpeciesCount> frequency_shifts(
      const std::array<double, kSpeciesCount>& populations) const noexcept {
    std::array<double, kSpeciesCount> mu{};
    for (std::size_t i = 0; i < kSpeciesCount; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < kSpeciesCount; ++j) acc += chi_[i][j] * populations[j];
      mu[i] = 2.0 * acc;
    }
    return mu;
  }

  friend bool operator==(const CollisionMatrix&, const CollisionMatrix&) = default;

 private:
  std::array<std::array<double, kSpeciesCount>, kSpeciesCount> chi_{};
};

struct SechPulse {
  double amplitude = 20.0;
  double width = 20.0;
  friend bool operator==(const SechPulse&, const SechPulse&) = default;
};

struct ConstantPulse {
  double value = 0.0;
  friend bool operator==(const ConstantPulse&, const ConstantPulse&) = default;
};

/// Linear interpolation between (time, value) nodes; undefined outside the table.
struct TabulatedPulse {
  std::vector<double> times;
  std::vector<double> values;
  friend bool operator==(const TabulatedPulse&, const TabulatedPulse&) = default;
};

/// Rabi frequency Omega(t) of one photoassociation laser.
class PulseSchedule {
 public:
  using Shape = std::variant<SechPulse, ConstantPulse, TabulatedPulse>;

  PulseSchedule() : shape_(SechPulse{}) {}
  PulseSchedule(Shape shape) : shape_(std::move(shape)) {}  // NOLINT(implicit)

  static PulseSchedule sech(double amplitude, double width) {
    return PulseSchedule(SechPulse{amplitude, width});
  }
  static PulseSchedule constant(double value) {
    return PulseSchedule(ConstantPulse{value});
  }
  static PulseSchedule tabulated(std::vector<double> times, std::vector<double> values) {
    return PulseSchedule(TabulatedPulse{std::move(times), std::move(values)});
  }

  const Shape& shape() const noexcept { return shape_; }

  double operator()(double t) const {
    return std::visit([t](const auto& p) { return evaluate(p, t); }, shape_);
  }

  /// Throws ConfigurationError when a structural invariant fails.
  void validate() const {
    std::visit([](const auto& p) { check(p); }, shape_);
  }

  /// Whether the schedule is defined on [t0, t1].
  bool covers(double t0, double t1) const {
    if (const auto* tab = std::get_if<TabulatedPulse>(&shape_))
      return !tab->times.empty() && tab->times.front() <= t0 && tab->times.back() >= t1;
    return true;
  }

  friend bool operator==(const PulseSchedule&, const PulseSchedule&) = default;

 private:
  static double evaluate(const SechPulse& p, double t) {
    const double x = std::abs(t / p.width);
    // 2 e^{-x} / (1 + e^{-2x}) stays finite for large |x|
    const double e = std::exp(-x);
    return p.amplitude * 2.0 * e / (1.0 + e * e);
  }
  static double evaluate(const ConstantPulse& p, double) { return p.value; }
  static double evaluate(const TabulatedPulse& p, double t) {
    const auto& ts = p.times;
    if (ts.empty() || t < ts.front() || t > ts.back())
      throw ConfigurationError("tabulated pulse undefined at t = " + std::to_string(t));
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    if (it == ts.end()) return p.values.back();
    const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return (1.0 - w) * p.values[lo] + w * p.values[hi];
  }

  static void check(const SechPulse& p) {
    if (!(std::isfinite(p.amplitude) && p.amplitude >= 0.0))
      throw ConfigurationError("sech pulse amplitude must be finite and >= 0");
    if (!(std::isfinite(p.width) && p.width > 0.0))
      throw ConfigurationError("sech pulse width must be finite and > 0");
  }
  static void check(const ConstantPulse& p) {
    if (!(std::isfinite(p.value) && p.value >= 0.0))
      throw ConfigurationError("constant pulse value must be finite and >= 0");
  }
  static void check(const TabulatedPulse& p) {
    if (p.times.size() != p.values.size() || p.times.size() < 2)
      throw ConfigurationError("tabulated pulse needs >= 2 matching time/value pairs");
    for (std::size_t i = 1; i < p.times.size(); ++i)
      if (!(p.times[i] > p.times[i - 1]))
        throw ConfigurationError("tabulated pulse times must be strictly increasing");
    for (double v : p.values)
      if (!(std::isfinite(v) && v >= 0.0))
        throw ConfigurationError("tabulated pulse values must be finite and >= 0");
  }

  Shape shape_;
};

/// Channel ratio R(t) = eta2/eta1, either constant or linear between knots
/// (held at the end values outside the knot range).
class RatioSchedule {
 public:
  struct Knot {
    double t;
    double ratio;
    friend bool operator==(const Knot&, const Knot&) = default;
  };

  static RatioSchedule constant(double ratio) {
    RatioSchedule r;
    r.knots_ = {Knot{0.0, ratio}};
    r.constant_ = true;
    r.validate();
    return r;
  }

  static RatioSchedule piecewise_linear(std::vector<Knot> knots) {
    RatioSchedule r;
    r.knots_ = std::move(knots);
    r.constant_ = false;
    r.validate();
    return r;
  }

  bool is_constant() const noexcept { return constant_; }
  const std::vector<Knot>& knots() const noexcept { return knots_; }

  double operator()(double t) const noexcept {
    if (constant_ || t <= knots_.front().t) return knots_.front().ratio;
    if (t >= knots_.back().t) return knots_.back().ratio;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double x, const Knot& k) { return x < k.t; });
    const Knot& hi = *it;
    const Knot& lo = *(it - 1);
    const double w = (t - lo.t) / (hi.t - lo.t);
    return (1.0 - w) * lo.ratio + w * hi.ratio;
  }

  friend bool operator==(const RatioSchedule&, const RatioSchedule&) = default;

 private:
  void validate() const {
    if (knots_.empty()) throw ConfigurationError("ratio schedule needs at least one knot");
    for (const auto& k : knots_)
      if (!(std::isfinite(k.ratio) && k.ratio > 0.0))
        throw ConfigurationError("ratio schedule values must be > 0 (no CPT solution for R < 0)");
    for (std::size_t i = 1; i < knots_.size(); ++i)
      if (!(knots_[i].t > knots_[i - 1].t))
        throw ConfigurationError("ratio schedule knot times must be strictly increasing");
  }

  std::vector<Knot> knots_;
  bool constant_ = true;
};

enum class Channel { AAOnly, ABOnly, Dual };

constexpr std::string_view channel_name(Channel c) noexcept {
  switch (c) {
    case Channel::AAOnly: return "AA";
    case Channel::ABOnly: return "AB";
    case Channel::Dual: return "dual";
  }
  return "?";
}

/// Species carried by the integrator for a channel (unused dimer excluded).
inline std::vector<Species> active_species(Channel c) {
  switch (c) {
    case Channel::AAOnly:
      return {Species::AtomA, Species::AtomB, Species::DimerAA, Species::Trimer};
    case Channel::ABOnly:
      return {Species::AtomA, Species::AtomB, Species::DimerAB, Species::Trimer};
    case Channel::Dual:
      return {kAllSpecies.begin(), kAllSpecies.end()};
  }
  return {};
}

struct FixedDetuning {
  double value = 0.0;
  friend bool operator==(const FixedDetuning&, const FixedDetuning&) = default;
};

/// Delta(t) follows the two-photon resonance of the instantaneous dark state.
struct CptTracking {
  friend bool operator==(const CptTracking&, const CptTracking&) = default;
};

using DetuningMode = std::variant<FixedDetuning, CptTracking>;

struct ModelParams {
  double lambda1 = 1.0;  ///< Feshbach coupling A + A -> A2
  double lambda2 = 1.0;  ///< Feshbach coupling A + B -> AB
  PulseSchedule omega1 = PulseSchedule::sech(20.0, 20.0);  ///< PA laser A2 + B -> A2B
  PulseSchedule omega2 = PulseSchedule::sech(20.0, 20.0);  ///< PA laser AB + A -> A2B
  /// Dual channel only: when set, Omega2(t) = (lambda2/lambda1) Omega1(t) / R(t)
  /// and omega2 is ignored.
  std::optional<RatioSchedule> ratio;
  double delta = 0.0;  ///< Feshbach detuning, shared by both dimers
  DetuningMode detuning = CptTracking{};
  double gamma = 1.0;  ///< loss rate of untrapped dimers
  CollisionMatrix chi = CollisionMatrix::sodium_rubidium();
  Channel channel = Channel::AAOnly;

  bool uses_aa() const noexcept { return channel != Channel::ABOnly; }
  bool uses_ab() const noexcept { return channel != Channel::AAOnly; }

  double omega1_at(double t) const { return uses_aa() ? omega1(t) : 0.0; }

  double omega2_at(double t) const {
    if (!uses_ab()) return 0.0;
    if (channel == Channel::Dual && ratio) return (lambda2 / lambda1) * omega1(t) / (*ratio)(t);
    return omega2(t);
  }

  /// Structural invariants; throws ConfigurationError.
  void validate() const {
    if (!(std::isfinite(gamma) && gamma >= 0.0))
      throw ConfigurationError("gamma ≥ 0");
    if (!std::isfinite(delta)) throw ConfigurationError("delta must be finite");
    if (const auto* fixed = std::get_if<FixedDetuning>(&detuning);
        fixed && !std::isfinite(fixed->value))
      throw ConfigurationError("fixed Delta must be finite");
    if (!(std::isfinite(lambda1) && lambda1 >= 0.0) ||
        !(std::isfinite(lambda2) && lambda2 >= 0.0))
      throw ConfigurationError("lambda values must be finite and >= 0");
    if (!chi.finite()) throw ConfigurationError("collision matrix entries must be finite");
    if (uses_aa()) omega1.validate();
    if (uses_ab() && !(channel == Channel::Dual && ratio)) omega2.validate();
    if (ratio && channel != Channel::Dual)
      throw ConfigurationError("a ratio schedule requires the dual channel");
    if (ratio && !(lambda1 > 0.0))
      throw ConfigurationError("a ratio schedule requires lambda1 > 0");
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Instantaneous control values entering the equations of motion.
struct Controls {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double detuning = 0.0;  ///< PA laser detuning Delta
  friend bool operator==(const Controls&, const Controls&) = default;
};

namespace detail {

inline void require_finite(const StateVector& s) {
  if (!s.finite()) throw InvalidStateError("state contains non-finite amplitudes");
}

// Shared kernel; the flags switch the AA and AB reaction paths on or off.
inline StateDerivative mean_field_rhs(const StateVector& s, const Controls& c,
                                      const ModelParams& p, bool path_aa, bool path_ab) {
  constexpr Complex I{0.0, 1.0};
  const auto pops = s.populations();
  const auto mu = p.chi.frequency_shifts(pops);

  const Complex a = s[Species::AtomA];
  const Complex b = s[Species::AtomB];
  const Complex d1 = s[Species::DimerAA];
  const Complex d2 = s[Species::DimerAB];
  const Complex g = s[Species::Trimer];
  const Complex dimer_rate{-p.gamma, p.delta};

  StateDerivative ds;
  for (std::size_t i = 0; i < kSpeciesCount; ++i) ds.psi[i] = I * mu[i] * s.psi[i];

  ds[Species::Trimer] += I * (c.detuning + p.delta) * g;

  if (path_aa) {
    const double l1 = p.lambda1;
    const double o1 = c.omega1;
    ds[Species::AtomA] += 2.0 * I * l1 * d1 * std::conj(a);
    ds[Species::AtomB] += -I * o1 * std::conj(d1) * g;
    ds[Species::DimerAA] += dimer_rate * d1 + I * l1 * a * a - I * o1 * std::conj(b) * g;
    ds[Species::Trimer] += -I * o1 * d1 * b;
  } else {
    ds[Species::DimerAA] = 0.0;
  }

  if (path_ab) {
    const double l2 = p.lambda2;
    const double o2 = c.omega2;
    ds[Species::AtomA] += I * l2 * d2 * std::conj(b) - I * o2 * std::conj(d2) * g;
    ds[Species::AtomB] += I * l2 * d2 * std::conj(a);
    ds[Species::DimerAB] += dimer_rate * d2 + I * l2 * a * b - I * o2 * std::conj(a) * g;
    ds[Species::Trimer] += -I * o2 * d2 * a;
  } else {
    ds[Species::DimerAB] = 0.0;
  }
  return ds;
}

}  // namespace detail

/// Equations of motion for one reaction path (channel AAOnly or ABOnly) with
/// resolved controls. The idle dimer's derivative is exactly zero.
inline StateDerivative rhs_single(const StateVector& s, const Controls& c,
                                  const ModelParams& p) {
  if (p.channel == Channel::Dual)
    throw ConfigurationError("rhs_single requires channel AA or AB");
  detail::require_finite(s);
  return detail::mean_field_rhs(s, c, p, p.channel == Channel::AAOnly,
                                p.channel == Channel::ABOnly);
}

/// Both reaction paths acting on the shared atom and trimer fields.
inline StateDerivative rhs_dual(const StateVector& s, const Controls& c,
                                const ModelParams& p) {
  if (p.channel != Channel::Dual) throw ConfigurationError("rhs_dual requires channel dual");
  detail::require_finite(s);
  return detail::mean_field_rhs(s, c, p, true, true);
}

inline StateDerivative rhs(const StateVector& s, const Controls& c, const ModelParams& p) {
  return p.channel == Channel::Dual ? rhs_dual(s, c, p) : rhs_single(s, c, p);
}

/// d/dt of conserved_atom_number along the flow, from the field derivatives.
inline double conserved_rate(const StateVector& s, const StateDerivative& ds) noexcept {
  double rate = 0.0;
  for (std::size_t i = 0; i < kSpeciesCount; ++i)
    rate += kAtomWeight[i] * 2.0 * std::real(std::conj(s.psi[i]) * ds.psi[i]);
  return rate;
}

/// dN_i/dt = 2 Re(conj(psi_i) dpsi_i/dt).
inline std::array<double, kSpeciesCount> population_rates(const StateVector& s,
                                                          const StateDerivative& ds) noexcept {
  std::array<double, kSpeciesCount> r{};
  for (std::size_t i = 0; i < kSpeciesCount; ++i)
    r[i] = 2.0 * std::real(std::conj(s.psi[i]) * ds.psi[i]);
  return r;
}

}  // namespace trimer
