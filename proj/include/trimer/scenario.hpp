#pragma once

// JSON scenario documents and the built-in scenario registry.
//
// Every key is optional; omitted keys take the defaults of the Na-Rb
// parameter set (sech pulses of peak 20 and width 20, lambda = 1, gamma = 1,
// collision fill 0.0938, window [0, 200], stoichiometric 2:1 start).
// Unknown keys are rejected. The schema is documented in README.md.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trimer/errors.hpp"
#include "trimer/integrator.hpp"
#include "trimer/model.hpp"
#include "trimer/stability.hpp"
#include "trimer/sweep.hpp"

namespace trimer {

using Json = nlohmann::ordered_json;

enum class Task { Run, CptCurve, Scan, Stability, Optimize };

constexpr std::string_view task_name(Task t) noexcept {
  switch (t) {
    case Task::Run: return "run";
    case Task::CptCurve: return "cpt_curve";
    case Task::Scan: return "scan";
    case Task::Stability: return "stability";
    case Task::Optimize: return "optimize";
  }
  return "?";
}

struct SweepSettings {
  SweepParameter parameter = SweepParameter::Ratio;
  std::vector<double> ratios = {1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<double> detunings;
  Objective objective = Objective::FinalTrimer;
  double stability_stride = 1.0;
  friend bool operator==(const SweepSettings&, const SweepSettings&) = default;
};

struct OptimizerSettings {
  ScheduleFamily family = ScheduleFamily::ConstantR;
  std::size_t knots = 5;
  std::size_t budget = 60;
  std::uint64_t seed = 42;
  Objective objective = Objective::FinalTrimer;
  std::vector<double> seeds = {1.0, 1.5, 2.0, 2.5, 3.0};
  double mutation_scale = 0.1;
  friend bool operator==(const OptimizerSettings&, const OptimizerSettings&) = default;
};

struct StabilitySettings {
  double stride = 1.0;
  double threshold = 1e-8;
  LinearizationPoint point = LinearizationPoint::DarkState;
  friend bool operator==(const StabilitySettings&, const StabilitySettings&) = default;
};

struct Scenario {
  std::string name = "custom";
  std::string description;
  Task task = Task::Run;
  RunSetup setup;
  std::optional<SweepSettings> sweep;
  std::optional<OptimizerSettings> optimizer;
  std::optional<StabilitySettings> stability;

  /// Nested invariants; throws ValidationError naming the violated one.
  void validate() const;

  SweepSpec sweep_spec() const {
    SweepSpec s;
    s.base = setup;
    const SweepSettings w = sweep.value_or(SweepSettings{});
    s.parameter = w.parameter;
    s.ratios = w.ratios;
    s.detunings = w.detunings;
    s.objective = w.objective;
    s.stability_stride = w.stability_stride;
    return s;
  }

  OptimizationSpec optimization_spec() const {
    OptimizationSpec o;
    o.base = setup;
    const OptimizerSettings w = optimizer.value_or(OptimizerSettings{});
    o.family = w.family;
    o.knots = w.knots;
    o.budget = w.budget;
    o.seed = w.seed;
    o.objective = w.objective;
    o.seeds = w.seeds;
    o.mutation_scale = w.mutation_scale;
    return o;
  }

  StabilityOptions stability_options() const {
    const StabilitySettings w = stability.value_or(StabilitySettings{});
    StabilityOptions o;
    o.threshold = w.threshold;
    o.point = w.point;
    return o;
  }

  double stability_stride() const { return stability.value_or(StabilitySettings{}).stride; }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline void Scenario::validate() const {
  try {
    setup.params.validate();
    setup.window.validate();
    setup.config.validate();
    if (!setup.initial.finite()) throw ValidationError("initial amplitudes must be finite");
    if (setup.params.uses_aa() && !setup.params.omega1.covers(setup.window.start, setup.window.end))
      throw ValidationError("omega1 table must cover the window");
    if (setup.params.uses_ab() && !(setup.params.channel == Channel::Dual && setup.params.ratio) &&
        !setup.params.omega2.covers(setup.window.start, setup.window.end))
      throw ValidationError("omega2 table must cover the window");
    if (sweep || task == Task::Scan) sweep_spec().validate();
    if (optimizer || task == Task::Optimize) optimization_spec().validate();
    if (stability && !(stability->stride > 0.0 && stability->threshold >= 0.0))
      throw ValidationError("stability stride must be > 0 and threshold >= 0");
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
}

namespace detail {

// Typed access to one JSON object with key checking and path-qualified messages.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ValidationError(where() + "must be an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, v] : j_.items()) {
      bool known = false;
      for (auto key : keys) known = known || key == k;
      if (!known) throw ValidationError("unknown key \"" + qualified(k) + "\"");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const Json& at(const std::string& key) const { return j_.at(key); }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number()) throw ValidationError(qualified(key) + " must be a number");
    return v.get<double>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ValidationError(qualified(key) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_string()) throw ValidationError(qualified(key) + " must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    return number_array(j_.at(key), qualified(key));
  }

  static std::vector<double> number_array(const Json& v, const std::string& name) {
    if (!v.is_array()) throw ValidationError(name + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ValidationError(name + " must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

 private:
  std::string where() const { return path_.empty() ? "scenario " : path_ + " "; }
  const Json& j_;
  std::string path_;
};

template <class E, std::size_t N>
E parse_enum(const std::string& text, const std::array<std::pair<std::string_view, E>, N>& table,
             const std::string& name) {
  for (const auto& [k, v] : table)
    if (k == text) return v;
  std::string allowed;
  for (const auto& [k, v] : table) allowed += (allowed.empty() ? "" : ", ") + std::string(k);
  throw ValidationError(name + " must be one of: " + allowed + " (got \"" + text + "\")");
}

inline constexpr std::array<std::pair<std::string_view, Channel>, 3> kChannels = {
    {{"AA", Channel::AAOnly}, {"AB", Channel::ABOnly}, {"dual", Channel::Dual}}};
inline constexpr std::array<std::pair<std::string_view, Task>, 5> kTasks = {
    {{"run", Task::Run},
     {"cpt_curve", Task::CptCurve},
     {"scan", Task::Scan},
     {"stability", Task::Stability},
     {"optimize", Task::Optimize}}};
inline constexpr std::array<std::pair<std::string_view, Objective>, 3> kObjectives = {
    {{"final_trimer", Objective::FinalTrimer},
     {"peak_trimer", Objective::PeakTrimer},
     {"cpt_tracking_error", Objective::CptTrackingError}}};
inline constexpr std::array<std::pair<std::string_view, SweepParameter>, 3> kSweepParameters = {
    {{"R", SweepParameter::Ratio}, {"delta", SweepParameter::Detuning}, {"both", SweepParameter::Both}}};
inline constexpr std::array<std::pair<std::string_view, ScheduleFamily>, 2> kFamilies = {
    {{"constant", ScheduleFamily::ConstantR}, {"piecewise_linear", ScheduleFamily::PiecewiseLinear}}};
inline constexpr std::array<std::pair<std::string_view, LinearizationPoint>, 2> kPoints = {
    {{"dark_state", LinearizationPoint::DarkState}, {"integrated", LinearizationPoint::Integrated}}};

template <class E, std::size_t N>
std::string enum_text(E value, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [k, v] : table)
    if (v == value) return std::string(k);
  return "?";
}

inline PulseSchedule read_pulse(const Json& j, const std::string& name) {
  ObjectReader r(j, name);
  const std::string type = r.string("type", "sech");
  if (type == "sech") {
    r.allow({"type", "amplitude", "width"});
    return PulseSchedule::sech(r.number("amplitude", 20.0), r.number("width", 20.0));
  }
  if (type == "constant") {
    r.allow({"type", "value"});
    if (!r.has("value")) throw ValidationError(name + ".value is required");
    return PulseSchedule::constant(r.number("value", 0.0));
  }
  if (type == "tabulated") {
    r.allow({"type", "times", "values"});
    if (!r.has("times") || !r.has("values"))
      throw ValidationError(name + " tabulated pulse needs times and values");
    return PulseSchedule::tabulated(r.numbers("times", {}), r.numbers("values", {}));
  }
  throw ValidationError(name + ".type must be one of: sech, constant, tabulated (got \"" + type + "\")");
}

inline Json write_pulse(const PulseSchedule& p) {
  Json j;
  if (const auto* s = std::get_if<SechPulse>(&p.shape())) {
    j["type"] = "sech";
    j["amplitude"] = s->amplitude;
    j["width"] = s->width;
  } else if (const auto* c = std::get_if<ConstantPulse>(&p.shape())) {
    j["type"] = "constant";
    j["value"] = c->value;
  } else {
    const auto& t = std::get<TabulatedPulse>(p.shape());
    j["type"] = "tabulated";
    j["times"] = t.times;
    j["values"] = t.values;
  }
  return j;
}

inline RatioSchedule read_ratio(const Json& j) {
  ObjectReader r(j, "ratio");
  const std::string type = r.string("type", "constant");
  if (type == "constant") {
    r.allow({"type", "value"});
    if (!r.has("value")) throw ValidationError("ratio.value is required");
    return RatioSchedule::constant(r.number("value", 0.0));
  }
  if (type == "piecewise_linear") {
    r.allow({"type", "knots"});
    if (!r.has("knots") || !r.at("knots").is_array())
      throw ValidationError("ratio.knots must be an array of [t, R] pairs");
    std::vector<RatioSchedule::Knot> knots;
    for (const auto& k : r.at("knots")) {
      const auto pair = ObjectReader::number_array(k, "ratio.knots entry");
      if (pair.size() != 2) throw ValidationError("ratio.knots entries must be [t, R] pairs");
      knots.push_back({pair[0], pair[1]});
    }
    return RatioSchedule::piecewise_linear(std::move(knots));
  }
  throw ValidationError("ratio.type must be one of: constant, piecewise_linear (got \"" + type + "\")");
}

inline Json write_ratio(const RatioSchedule& r) {
  Json j;
  if (r.is_constant()) {
    j["type"] = "constant";
    j["value"] = r.knots().front().ratio;
  } else {
    j["type"] = "piecewise_linear";
    j["knots"] = Json::array();
    for (const auto& k : r.knots()) j["knots"].push_back({k.t, k.ratio});
  }
  return j;
}

inline Species species_from_label(const std::string& label, const std::string& name) {
  for (Species s : kAllSpecies)
    if (species_label(s) == label) return s;
  throw ValidationError(name + ": unknown species \"" + label + "\" (expected a, b, d1, d2, g)");
}

inline CollisionMatrix read_collisions(const Json& j) {
  ObjectReader r(j, "collisions");
  r.allow({"fill", "pairs", "matrix"});
  if (r.has("matrix")) {
    if (r.has("fill") || r.has("pairs"))
      throw ValidationError("collisions.matrix cannot be combined with fill or pairs");
    const Json& m = r.at("matrix");
    if (!m.is_array() || m.size() != kSpeciesCount)
      throw ValidationError("collisions.matrix must be 5x5");
    CollisionMatrix c;
    for (std::size_t i = 0; i < kSpeciesCount; ++i) {
      const auto row = ObjectReader::number_array(m[i], "collisions.matrix row");
      if (row.size() != kSpeciesCount) throw ValidationError("collisions.matrix must be 5x5");
      for (std::size_t k = 0; k < kSpeciesCount; ++k) {
        if (k < i && row[k] != c(kAllSpecies[i], kAllSpecies[k]))
          throw ValidationError("collisions.matrix must be symmetric");
        c.set(kAllSpecies[i], kAllSpecies[k], row[k]);
      }
    }
    return c;
  }
  CollisionMatrix c = r.has("fill") ? CollisionMatrix::uniform(r.number("fill", 0.0))
                                    : CollisionMatrix::sodium_rubidium();
  if (r.has("pairs")) {
    const Json& pairs = r.at("pairs");
    if (!pairs.is_object()) throw ValidationError("collisions.pairs must be an object");
    for (const auto& [key, value] : pairs.items()) {
      const auto dash = key.find('-');
      if (dash == std::string::npos)
        throw ValidationError("collisions.pairs keys look like \"a-b\" (got \"" + key + "\")");
      const Species si = species_from_label(key.substr(0, dash), "collisions.pairs");
      const Species sj = species_from_label(key.substr(dash + 1), "collisions.pairs");
      if (!value.is_number()) throw ValidationError("collisions.pairs." + key + " must be a number");
      c.set(si, sj, value.get<double>());
    }
  }
  return c;
}

inline Json write_collisions(const CollisionMatrix& c) {
  Json pairs;
  for (std::size_t i = 0; i < kSpeciesCount; ++i)
    for (std::size_t k = i; k < kSpeciesCount; ++k) {
      const std::string key =
          std::string(species_label(kAllSpecies[i])) + "-" + std::string(species_label(kAllSpecies[k]));
      pairs[key] = c(kAllSpecies[i], kAllSpecies[k]);
    }
  Json j;
  j["pairs"] = pairs;
  return j;
}

inline StateVector read_initial(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "stoichiometric")
      throw ValidationError("initial must be \"stoichiometric\" or an object of amplitudes");
    return StateVector::stoichiometric();
  }
  ObjectReader r(j, "initial");
  r.allow({"a", "b", "d1", "d2", "g"});
  StateVector s;
  for (Species sp : kAllSpecies) {
    const std::string key(species_label(sp));
    if (!r.has(key)) continue;
    const Json& v = r.at(key);
    if (v.is_number()) {
      s[sp] = v.get<double>();
      continue;
    }
    const auto parts = ObjectReader::number_array(v, "initial." + key);
    if (parts.size() != 2) throw ValidationError("initial." + key + " must be a number or [re, im]");
    s[sp] = Complex(parts[0], parts[1]);
  }
  return s;
}

inline Json write_initial(const StateVector& s) {
  Json j;
  for (Species sp : kAllSpecies) j[std::string(species_label(sp))] = {s[sp].real(), s[sp].imag()};
  return j;
}

}  // namespace detail

/// Builds a validated Scenario from a parsed JSON document.
inline Scenario scenario_from_json(const Json& doc) {
  using detail::ObjectReader;
  ObjectReader r(doc, "");
  r.allow({"name", "description", "task", "channel", "lambda1", "lambda2", "omega1", "omega2",
           "ratio", "delta", "detuning", "gamma", "collisions", "initial", "window", "integrator",
           "sweep", "optimizer", "stability"});
  Scenario s;
  s.name = r.string("name", s.name);
  s.description = r.string("description", s.description);
  s.task = detail::parse_enum(r.string("task", "run"), detail::kTasks, "task");

  ModelParams& p = s.setup.params;
  p.channel = detail::parse_enum(r.string("channel", "AA"), detail::kChannels, "channel");
  p.lambda1 = r.number("lambda1", p.lambda1);
  p.lambda2 = r.number("lambda2", p.lambda2);
  try {
    if (r.has("omega1")) p.omega1 = detail::read_pulse(r.at("omega1"), "omega1");
    if (r.has("omega2")) p.omega2 = detail::read_pulse(r.at("omega2"), "omega2");
    if (r.has("ratio")) p.ratio = detail::read_ratio(r.at("ratio"));
  } catch (const ConfigurationError& e) {
    throw ValidationError(e.what());
  }
  p.delta = r.number("delta", p.delta);
  if (r.has("detuning")) {
    ObjectReader d(r.at("detuning"), "detuning");
    d.allow({"mode", "value"});
    const std::string mode = d.string("mode", "cpt_tracking");
    if (mode == "cpt_tracking") {
      if (d.has("value")) throw ValidationError("detuning.value only applies to mode \"fixed\"");
      p.detuning = CptTracking{};
    } else if (mode == "fixed") {
      if (!d.has("value")) throw ValidationError("detuning.value is required for mode \"fixed\"");
      p.detuning = FixedDetuning{d.number("value", 0.0)};
    } else {
      throw ValidationError("detuning.mode must be one of: cpt_tracking, fixed (got \"" + mode + "\")");
    }
  }
  p.gamma = r.number("gamma", p.gamma);
  if (r.has("collisions")) p.chi = detail::read_collisions(r.at("collisions"));
  if (r.has("initial")) s.setup.initial = detail::read_initial(r.at("initial"));

  if (r.has("window")) {
    ObjectReader w(r.at("window"), "window");
    w.allow({"start", "end"});
    s.setup.window.start = w.number("start", s.setup.window.start);
    s.setup.window.end = w.number("end", s.setup.window.end);
  }
  if (r.has("integrator")) {
    ObjectReader c(r.at("integrator"), "integrator");
    c.allow({"rel_tol", "abs_tol", "initial_step", "max_step", "min_step", "sample_stride", "max_steps"});
    IntegratorConfig& cfg = s.setup.config;
    cfg.rel_tol = c.number("rel_tol", cfg.rel_tol);
    cfg.abs_tol = c.number("abs_tol", cfg.abs_tol);
    cfg.initial_step = c.number("initial_step", cfg.initial_step);
    cfg.max_step = c.number("max_step", cfg.max_step);
    cfg.min_step = c.number("min_step", cfg.min_step);
    cfg.sample_stride = c.number("sample_stride", cfg.sample_stride);
    cfg.max_steps = c.unsigned_integer("max_steps", cfg.max_steps);
  }
  if (r.has("sweep")) {
    ObjectReader w(r.at("sweep"), "sweep");
    w.allow({"parameter", "ratios", "deltas", "objective", "stability_stride"});
    SweepSettings sw;
    sw.parameter = detail::parse_enum(w.string("parameter", "R"), detail::kSweepParameters, "sweep.parameter");
    sw.ratios = w.numbers("ratios", sw.parameter == SweepParameter::Detuning ? std::vector<double>{} : sw.ratios);
    sw.detunings = w.numbers("deltas", sw.detunings);
    sw.objective = detail::parse_enum(w.string("objective", "final_trimer"), detail::kObjectives, "sweep.objective");
    sw.stability_stride = w.number("stability_stride", sw.stability_stride);
    s.sweep = sw;
  }
  if (r.has("optimizer")) {
    ObjectReader o(r.at("optimizer"), "optimizer");
    o.allow({"family", "knots", "budget", "seed", "objective", "seeds", "mutation_scale"});
    OptimizerSettings op;
    op.family = detail::parse_enum(o.string("family", "constant"), detail::kFamilies, "optimizer.family");
    op.knots = o.unsigned_integer("knots", op.knots);
    op.budget = o.unsigned_integer("budget", op.budget);
    op.seed = o.unsigned_integer("seed", op.seed);
    op.objective = detail::parse_enum(o.string("objective", "final_trimer"), detail::kObjectives, "optimizer.objective");
    op.seeds = o.numbers("seeds", op.seeds);
    op.mutation_scale = o.number("mutation_scale", op.mutation_scale);
    s.optimizer = op;
  }
  if (r.has("stability")) {
    ObjectReader st(r.at("stability"), "stability");
    st.allow({"stride", "threshold", "point"});
    StabilitySettings ss;
    ss.stride = st.number("stride", ss.stride);
    ss.threshold = st.number("threshold", ss.threshold);
    ss.point = detail::parse_enum(st.string("point", "dark_state"), detail::kPoints, "stability.point");
    s.stability = ss;
  }
  s.validate();
  return s;
}

/// Full JSON form: every field written explicitly, so
/// scenario_from_json(scenario_to_json(s)) == s.
inline Json scenario_to_json(const Scenario& s) {
  const ModelParams& p = s.setup.params;
  Json j;
  j["name"] = s.name;
  j["description"] = s.description;
  j["task"] = std::string(task_name(s.task));
  j["channel"] = std::string(channel_name(p.channel));
  j["lambda1"] = p.lambda1;
  j["lambda2"] = p.lambda2;
  j["omega1"] = detail::write_pulse(p.omega1);
  j["omega2"] = detail::write_pulse(p.omega2);
  if (p.ratio) j["ratio"] = detail::write_ratio(*p.ratio);
  j["delta"] = p.delta;
  if (const auto* f = std::get_if<FixedDetuning>(&p.detuning)) {
    j["detuning"] = {{"mode", "fixed"}, {"value", f->value}};
  } else {
    j["detuning"] = {{"mode", "cpt_tracking"}};
  }
  j["gamma"] = p.gamma;
  j["collisions"] = detail::write_collisions(p.chi);
  j["initial"] = detail::write_initial(s.setup.initial);
  j["window"] = {{"start", s.setup.window.start}, {"end", s.setup.window.end}};
  const IntegratorConfig& c = s.setup.config;
  j["integrator"] = {{"rel_tol", c.rel_tol},       {"abs_tol", c.abs_tol},
                     {"initial_step", c.initial_step}, {"max_step", c.max_step},
                     {"min_step", c.min_step},     {"sample_stride", c.sample_stride},
                     {"max_steps", c.max_steps}};
  if (s.sweep) {
    j["sweep"] = {{"parameter", detail::enum_text(s.sweep->parameter, detail::kSweepParameters)},
                  {"ratios", s.sweep->ratios},
                  {"deltas", s.sweep->detunings},
                  {"objective", detail::enum_text(s.sweep->objective, detail::kObjectives)},
                  {"stability_stride", s.sweep->stability_stride}};
  }
  if (s.optimizer) {
    j["optimizer"] = {{"family", detail::enum_text(s.optimizer->family, detail::kFamilies)},
                      {"knots", s.optimizer->knots},
                      {"budget", s.optimizer->budget},
                      {"seed", s.optimizer->seed},
                      {"objective", detail::enum_text(s.optimizer->objective, detail::kObjectives)},
                      {"seeds", s.optimizer->seeds},
                      {"mutation_scale", s.optimizer->mutation_scale}};
  }
  if (s.stability) {
    j["stability"] = {{"stride", s.stability->stride},
                      {"threshold", s.stability->threshold},
                      {"point", detail::enum_text(s.stability->point, detail::kPoints)}};
  }
  return j;
}

inline std::string serialize_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

/// Parses and validates scenario text. Syntax errors carry the byte offset.
inline Scenario load_scenario_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed scenario JSON at byte ") + std::to_string(e.byte) + ": " +
                         e.what(),
                     e.byte);
  }
  return scenario_from_json(doc);
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str());
}

// ---------------------------------------------------------------------------
// Built-in scenarios

inline const std::vector<std::pair<std::string, std::string>>& builtin_scenario_documents() {
  static const std::vector<std::pair<std::string, std::string>> docs = {
      {"fig1a", R"({
  "name": "fig1a",
  "description": "A2B formation through the A2 path, delta = -3; dimers stay dark and the trimer follows the CPT curve",
  "channel": "AA",
  "delta": -3
})"},
      {"fig1b", R"({
  "name": "fig1b",
  "description": "A2B formation through the A2 path, delta = +3; the adiabatic dark state turns dynamically unstable",
  "channel": "AA",
  "delta": 3
})"},
      {"fig1a_AB", R"({
  "name": "fig1a_AB",
  "description": "A2B formation through the AB dimer path alone, delta = -3",
  "channel": "AB",
  "delta": -3
})"},
      {"fig3b_R1", R"({
  "name": "fig3b_R1",
  "description": "Both paths open with channel ratio R = 1, delta = -3",
  "channel": "dual",
  "ratio": {"type": "constant", "value": 1},
  "delta": -3
})"},
      {"fig3c_R2", R"({
  "name": "fig3c_R2",
  "description": "Both paths open with channel ratio R = 2, delta = -3",
  "channel": "dual",
  "ratio": {"type": "constant", "value": 2},
  "delta": -3
})"},
      {"cpt_curve", R"({
  "name": "cpt_curve",
  "description": "Ideal dark-state trimer population N_gs(t) along the A2-path pulse",
  "task": "cpt_curve",
  "channel": "AA",
  "delta": -3
})"},
      {"rscan", R"({
  "name": "rscan",
  "description": "Final trimer population against the channel ratio R at delta = -3",
  "task": "scan",
  "channel": "dual",
  "ratio": {"type": "constant", "value": 2},
  "delta": -3,
  "sweep": {"parameter": "R", "ratios": [1, 1.5, 2, 2.5, 3]}
})"},
      {"stability_fig1", R"({
  "name": "stability_fig1",
  "description": "Linear stability along the A2-path dark state at delta = +3; pass --delta -3 for the stable case",
  "task": "stability",
  "channel": "AA",
  "delta": 3,
  "stability": {"stride": 1}
})"},
      {"optimize_R", R"({
  "name": "optimize_R",
  "description": "Evolutionary search over piecewise-linear R(t) schedules seeded with constant ratios",
  "task": "optimize",
  "channel": "dual",
  "ratio": {"type": "constant", "value": 2},
  "delta": -3,
  "optimizer": {"family": "piecewise_linear", "knots": 5, "budget": 200, "seed": 42}
})"},
  };
  return docs;
}

inline std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, doc] : builtin_scenario_documents()) names.push_back(name);
  return names;
}

inline std::optional<std::string> builtin_scenario_text(std::string_view name) {
  for (const auto& [n, doc] : builtin_scenario_documents())
    if (n == name) return doc;
  return std::nullopt;
}

/// Built-in scenario by name; an unknown name is a ValidationError listing the registry.
inline Scenario builtin_scenario(std::string_view name) {
  if (auto doc = builtin_scenario_text(name)) return load_scenario_text(*doc);
  std::string known;
  for (const auto& n : builtin_scenario_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown scenario \"" + std::string(name) + "\"; registered: " + known);
}

}  // namespace trimer
