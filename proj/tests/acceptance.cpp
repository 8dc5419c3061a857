// End-to-end acceptance checks; prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "trimer/trimer.hpp"

namespace {

using namespace trimer;
using trimer::testing::Rng;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  Verdict() { detail.precision(12); }

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

ModelParams na_rb(Channel ch, double delta, std::optional<double> ratio = std::nullopt) {
  ModelParams p;
  p.channel = ch;
  p.delta = delta;
  if (ratio) p.ratio = RatioSchedule::constant(*ratio);
  return p;
}

double final_trimer(const ModelParams& p) {
  return integrate(p, StateVector::stoichiometric(), TimeWindow{0.0, 200.0}, {})
      .value()
      .final_population(Species::Trimer);
}

// Fixed point under frozen pulses: returns max dimer population and max population drift.
std::pair<double, double> frozen_dark_state_drift(ModelParams p) {
  p.omega1 = PulseSchedule::constant(p.omega1(0.0));
  p.omega2 = PulseSchedule::constant(p.omega2(0.0));
  const StateVector start = instantaneous_dark_state(p, 0.0).amplitudes;
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  cfg.sample_stride = 0.1;
  const auto tr = integrate(p, start, TimeWindow{0.0, 10.0}, cfg).value();
  const auto n0 = start.populations();
  double dimer = 0.0;
  double drift = 0.0;
  for (const auto& s : tr.samples) {
    dimer = std::max({dimer, s.populations[index(Species::DimerAA)], s.populations[index(Species::DimerAB)]});
    for (std::size_t i = 0; i < kSpeciesCount; ++i) drift = std::max(drift, std::abs(s.populations[i] - n0[i]));
  }
  return {dimer, drift};
}

Verdict dark_state_fixed_point() {
  Verdict v;
  const auto [d_aa, drift_aa] = frozen_dark_state_drift(na_rb(Channel::AAOnly, -3.0));
  v.require(d_aa < 1e-12, "AA max N_d < 1e-12");
  v.require(drift_aa < 1e-9, "AA drift < 1e-9");
  const ModelParams dual = na_rb(Channel::Dual, -3.0, 2.0);
  const auto fit = dual_resonance_fit(dual, instantaneous_dark_state(dual, 0.0));
  const auto [d_dual, drift_dual] = frozen_dark_state_drift(dual);
  v.require(drift_dual < 1e-6, "dual drift < 1e-6");
  v.detail << "AA max N_d = " << d_aa << ", drift = " << drift_aa << "; dual max N_d = " << d_dual
           << ", drift = " << drift_dual << ", resonance residual = " << fit.residual_norm;
  return v;
}

Verdict closed_form_oracles() {
  Verdict v;
  Rng rng(20240501);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double eta = rng.log_uniform(1e-3, 1e3);
    for (bool aa : {true, false}) {
      const double ng = dark_state_single(CouplingRatio::finite(eta), aa ? ReactionPath::AA : ReactionPath::AB).n_g;
      worst = std::max(worst, std::abs(ng - static_cast<double>(trimer::testing::single_path_oracle(eta, aa))));
    }
    const double e1 = rng.log_uniform(1e-3, 1e3);
    const double e2 = rng.log_uniform(1e-3, 1e3);
    const auto d = dark_state_dual(CouplingRatio::finite(e1), CouplingRatio::finite(e2));
    const auto o = trimer::testing::dual_path_oracle(e1, e2);
    worst = std::max({worst, std::abs(d.n_g - static_cast<double>(o.n_g)),
                      std::abs(d.n_a - static_cast<double>(o.n_a)), std::abs(d.n_b - static_cast<double>(o.n_b))});
  }
  v.require(worst < 1e-12, "closed forms within 1e-12 of root-find");
  v.detail << "max deviation = " << worst << " over 1000 samples";
  return v;
}

Verdict conservation() {
  Verdict v;
  ModelParams p = na_rb(Channel::AAOnly, -3.0);
  p.gamma = 0.0;
  const auto tr = integrate(p, StateVector::stoichiometric(), TimeWindow{0.0, 200.0}, {}).value();
  double worst = 0.0;
  for (const auto& s : tr.samples) worst = std::max(worst, std::abs(s.conserved - 1.0));
  v.require(worst < 1e-9, "|conserved - 1| < 1e-9");
  v.detail << "max |conserved - 1| = " << worst << " over " << tr.size() << " samples";
  return v;
}

Verdict analytic_decay() {
  Verdict v;
  ModelParams p;
  p.lambda1 = p.lambda2 = 0.0;
  p.omega1 = p.omega2 = PulseSchedule::constant(0.0);
  p.chi = CollisionMatrix::uniform(0.0);
  p.detuning = FixedDetuning{0.0};
  p.gamma = 1.0;
  p.delta = 2.0;
  StateVector s;
  s[Species::DimerAA] = 0.5;
  IntegratorConfig cfg;
  cfg.sample_stride = 0.05;
  const auto tr = integrate(p, s, TimeWindow{0.0, 5.0}, cfg).value();
  double worst = 0.0;
  for (const auto& x : tr.samples)
    worst = std::max(worst, std::abs(x.populations[index(Species::DimerAA)] - 0.25 * std::exp(-2.0 * x.t)));
  v.require(worst < 1e-9, "N_d within 1e-9 of 0.25 exp(-2t)");
  v.detail << "max error = " << worst;
  return v;
}

Verdict yield_limit() {
  Verdict v;
  double gap = 0.0;
  bool monotone = true;
  for (auto path : {ReactionPath::AA, ReactionPath::AB}) {
    gap = std::max(gap, std::abs(dark_state_single(CouplingRatio::finite(1e6), path).n_g - 1.0 / 3.0));
    double prev = -1.0;
    for (int k = 0; k <= 300; ++k) {
      const double eta = std::pow(10.0, -3.0 + 9.0 * k / 300.0);
      const double ng = dark_state_single(CouplingRatio::finite(eta), path).n_g;
      monotone = monotone && ng > prev;
      prev = ng;
    }
  }
  v.require(gap < 1e-9, "|N_gs(1e6) - 1/3| < 1e-9");
  v.require(monotone, "N_gs increasing in eta");
  v.detail << "|N_gs(1e6) - 1/3| = " << gap << ", monotone over 301 points in [1e-3, 1e6]";
  return v;
}

Verdict yield_orderings() {
  Verdict v;
  const double aa = final_trimer(na_rb(Channel::AAOnly, -3.0));
  const double ab = final_trimer(na_rb(Channel::ABOnly, -3.0));
  const double r1 = final_trimer(na_rb(Channel::Dual, -3.0, 1.0));
  const double r2 = final_trimer(na_rb(Channel::Dual, -3.0, 2.0));
  const double r1_zero = final_trimer(na_rb(Channel::Dual, 0.0, 1.0));
  const double r2_zero = final_trimer(na_rb(Channel::Dual, 0.0, 2.0));
  v.require(aa > ab, "AA > AB");
  v.require(r2 > aa, "R=2 > AA");
  v.require(r2 > r1, "R=2 > R=1");
  v.require(std::abs(r2_zero - r2) < std::abs(r1_zero - r1), "R=2 less detuning-sensitive than R=1");
  v.detail << "AA = " << aa << ", AB = " << ab << ", R=1 = " << r1 << ", R=2 = " << r2
           << ", |dN| R=2 = " << std::abs(r2_zero - r2) << ", R=1 = " << std::abs(r1_zero - r1);
  return v;
}

Verdict instability_detection() {
  Verdict v;
  const auto above = stability_scan_cpt(na_rb(Channel::AAOnly, 3.0), TimeWindow{0.0, 200.0}, 1.0);
  const auto below = stability_scan_cpt(na_rb(Channel::AAOnly, -3.0), TimeWindow{0.0, 200.0}, 1.0);
  v.require(above.any_unstable(), "delta = 3 flagged");
  v.require(!below.any_unstable(), "delta = -3 clean");
  v.detail << "delta=3: " << above.unstable_count() << "/" << above.samples.size()
           << " unstable, max Re mu = " << above.max_real_part() << "; delta=-3: " << below.unstable_count()
           << " unstable, max Re mu = " << below.max_real_part();
  return v;
}

Verdict transient_overshoot() {
  Verdict v;
  bool any = false;
  for (double r : {1.0, 2.0, 3.0}) {
    const auto tr = integrate(na_rb(Channel::Dual, -3.0, r), StateVector::stoichiometric(), TimeWindow{0.0, 200.0}, {})
                        .value();
    const double peak = tr.peak_population(Species::Trimer);
    const double fin = tr.final_population(Species::Trimer);
    any = any || peak > fin;
    v.detail << "R=" << r << ": peak " << peak << " final " << fin << "; ";
  }
  v.require(any, "some R with peak > final");
  return v;
}

Verdict integrator_order() {
  Verdict v;
  ModelParams p;
  p.lambda1 = p.lambda2 = 0.0;
  p.omega1 = p.omega2 = PulseSchedule::constant(0.0);
  p.chi = CollisionMatrix::uniform(0.0);
  p.detuning = FixedDetuning{0.0};
  p.gamma = 1.0;
  p.delta = 2.0;
  StateVector s;
  s[Species::DimerAA] = 0.5;
  StateVector exact;
  exact[Species::DimerAA] = 0.5 * std::exp(Complex(-1.0, 2.0) * 5.0);
  const auto rep = order_check(p, s, TimeWindow{0.0, 5.0}, {4, 8, 16, 32}, exact);
  const double order = rep.order.value_or(0.0);
  const double self =
      self_convergence(na_rb(Channel::AAOnly, -3.0), StateVector::stoichiometric(), TimeWindow{0.0, 200.0}, {}, 1e-8, 1e-11);
  v.require(order >= 4.0, "order >= 4");
  v.require(self < 1e-7, "self-convergence < 1e-7");
  v.detail << "measured order = " << order << ", self-convergence = " << self;
  return v;
}

Verdict regression_pinning() {
  // Converged finals (tolerance halving from 1e-6 until successive values agree to 1e-8).
  const std::vector<std::pair<std::string, double>> golden = {
      {"fig1a", 0.2829636680}, {"fig3b_R1", 0.1281306821}, {"fig3c_R2", 0.3012567369}};
  Verdict v;
  for (const auto& [name, value] : golden) {
    const Scenario s = builtin_scenario(name);
    const double got = integrate(s.setup.params, s.setup.initial, s.setup.window, s.setup.config)
                           .value()
                           .final_population(Species::Trimer);
    v.require(std::abs(got - value) < 1e-6, name + " within 1e-6");
    v.detail << name << " = " << got << " (golden " << value << "); ";
  }
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"dark-state fixed point", dark_state_fixed_point},
      {"closed-form oracle equivalence", closed_form_oracles},
      {"conservation", conservation},
      {"analytic decay", analytic_decay},
      {"yield limit", yield_limit},
      {"yield orderings", yield_orderings},
      {"instability detection", instability_detection},
      {"transient overshoot", transient_overshoot},
      {"integrator order", integrator_order},
      {"regression pinning", regression_pinning},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.str().c_str());
  }
  return failures == 0 ? 0 : 1;
}
