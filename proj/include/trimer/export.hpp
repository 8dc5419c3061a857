#pragma once

// CSV exports with JSON sidecars. Numbers are written with 17 significant
// digits so every double survives a write/read cycle exactly.
//
// Time-series columns:
//   t, N_a, N_b, N_d1, N_d2, N_g,
//   Re_psi_a, Im_psi_a, Re_psi_b, Im_psi_b, ..., Re_psi_g, Im_psi_g,
//   Omega1, Omega2, Delta, conserved

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "trimer/cpt.hpp"
#include "trimer/errors.hpp"
#include "trimer/integrator.hpp"
#include "trimer/scenario.hpp"
#include "trimer/stability.hpp"
#include "trimer/sweep.hpp"

namespace trimer {

/// Shortest text that parses back to the same double; "inf", "-inf" and "nan" for non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ParseError("not a number: \"" + std::string(text) + "\"", 0);
  return v;
}

inline std::vector<std::string> timeseries_columns() {
  std::vector<std::string> cols = {"t"};
  for (Species s : kAllSpecies) cols.push_back("N_" + std::string(species_label(s)));
  for (Species s : kAllSpecies) {
    cols.push_back("Re_psi_" + std::string(species_label(s)));
    cols.push_back("Im_psi_" + std::string(species_label(s)));
  }
  for (const char* c : {"Omega1", "Omega2", "Delta", "conserved"}) cols.emplace_back(c);
  return cols;
}

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  return line;
}

// Writes the whole file at once; any failure is an IoError.
inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  return p.replace_extension(".json");
}

}  // namespace detail

/// Provenance record: the full scenario plus tolerances and RNG seed.
inline Json export_metadata(const Scenario& s, std::string_view kind) {
  Json j;
  j["kind"] = std::string(kind);
  j["scenario"] = scenario_to_json(s);
  const auto& c = s.setup.config;
  j["tolerances"] = {{"rel_tol", c.rel_tol}, {"abs_tol", c.abs_tol}};
  if (s.optimizer || s.task == Task::Optimize) {
    j["seed"] = s.optimization_spec().seed;
  } else {
    j["seed"] = nullptr;
  }
  return j;
}

inline std::string timeseries_csv(const Trajectory& tr) {
  std::string out = detail::join(timeseries_columns()) + "\n";
  for (const auto& s : tr.samples) {
    std::vector<std::string> f;
    f.reserve(22);
    f.push_back(format_double(s.t));
    for (double n : s.populations) f.push_back(format_double(n));
    for (const auto& z : s.state.psi) {
      f.push_back(format_double(z.real()));
      f.push_back(format_double(z.imag()));
    }
    f.push_back(format_double(s.controls.omega1));
    f.push_back(format_double(s.controls.omega2));
    f.push_back(format_double(s.controls.detuning));
    f.push_back(format_double(s.conserved));
    out += detail::join(f) + "\n";
  }
  return out;
}

/// Writes the time series CSV and, when metadata is given, a sibling .json.
inline void export_timeseries(const Trajectory& tr, const std::filesystem::path& path,
                              const std::optional<Json>& metadata = std::nullopt) {
  if (tr.empty()) throw ConfigurationError("cannot export an empty trajectory");
  detail::write_text_file(path, timeseries_csv(tr));
  if (metadata) detail::write_text_file(detail::sidecar_path(path), metadata->dump(2) + "\n");
}

inline Trajectory parse_timeseries_csv(std::string_view text) {
  const auto cols = timeseries_columns();
  Trajectory tr;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    const std::size_t line_start = pos;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t a = 0;
    while (true) {
      const auto comma = line.find(',', a);
      fields.push_back(line.substr(a, comma == std::string_view::npos ? std::string_view::npos : comma - a));
      if (comma == std::string_view::npos) break;
      a = comma + 1;
    }
    if (line_no++ == 0) {
      if (fields.size() != cols.size()) throw ParseError("unexpected time-series header", line_start);
      for (std::size_t i = 0; i < cols.size(); ++i)
        if (fields[i] != cols[i]) throw ParseError("unexpected time-series header", line_start);
      continue;
    }
    if (fields.size() != cols.size())
      throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(cols.size()),
                       line_start);
    Sample s;
    std::size_t k = 0;
    try {
      s.t = parse_double(fields[k++]);
      for (auto& n : s.populations) n = parse_double(fields[k++]);
      for (auto& z : s.state.psi) {
        const double re = parse_double(fields[k++]);
        const double im = parse_double(fields[k++]);
        z = Complex(re, im);
      }
      s.controls.omega1 = parse_double(fields[k++]);
      s.controls.omega2 = parse_double(fields[k++]);
      s.controls.detuning = parse_double(fields[k++]);
      s.conserved = parse_double(fields[k++]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_start);
    }
    tr.samples.push_back(s);
  }
  return tr;
}

inline Trajectory import_timeseries(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_timeseries_csv(buf.str());
}

/// Trajectory trimer population next to the instantaneous dark-state value.
inline void export_cpt_overlay(const Trajectory& tr, const ModelParams& p,
                               const std::filesystem::path& path) {
  std::string out = "t,N_g,N_gs,N_d1,N_d2\n";
  for (const auto& s : tr.samples) {
    out += detail::join({format_double(s.t), format_double(s.populations[index(Species::Trimer)]),
                         format_double(instantaneous_dark_state(p, s.t).n_g),
                         format_double(s.populations[index(Species::DimerAA)]),
                         format_double(s.populations[index(Species::DimerAB)])}) +
           "\n";
  }
  detail::write_text_file(path, out);
}

inline void export_cpt_curve(const std::vector<CptPoint>& curve, const std::filesystem::path& path,
                             const std::optional<Json>& metadata = std::nullopt) {
  std::string out = "t,eta1,eta2,N_gs\n";
  for (const auto& c : curve)
    out += detail::join({format_double(c.t), format_double(c.eta1.value()),
                         format_double(c.eta2.value()), format_double(c.n_gs)}) +
           "\n";
  detail::write_text_file(path, out);
  if (metadata) detail::write_text_file(detail::sidecar_path(path), metadata->dump(2) + "\n");
}

inline void export_scan(const std::vector<ScanRow>& rows, const std::filesystem::path& path,
                        const std::optional<Json>& metadata = std::nullopt) {
  std::string out =
      "R,delta,status,final_N_g,peak_N_g,objective,stability_samples,unstable_samples,max_re_mu,"
      "diagnostic\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : rows) {
    const auto& st = r.stability;
    out += detail::join({opt(r.ratio), opt(r.delta), std::string(status_name(r.status)),
                         format_double(r.final_trimer), format_double(r.peak_trimer),
                         format_double(r.objective), st ? std::to_string(st->samples) : "",
                         st ? std::to_string(st->unstable) : "",
                         st ? format_double(st->max_real_part) : "", detail::csv_field(r.diagnostic)}) +
           "\n";
  }
  detail::write_text_file(path, out);
  if (metadata) detail::write_text_file(detail::sidecar_path(path), metadata->dump(2) + "\n");
}

inline void export_stability(const StabilityReport& rep, const std::filesystem::path& path,
                             const std::optional<Json>& metadata = std::nullopt) {
  const std::size_t m = rep.samples.empty() ? 0 : rep.samples.front().eigenvalues.size();
  std::vector<std::string> header = {"t", "max_re_mu", "classification"};
  for (std::size_t k = 0; k < m; ++k) {
    header.push_back("Re_mu_" + std::to_string(k));
    header.push_back("Im_mu_" + std::to_string(k));
  }
  std::string out = detail::join(header) + "\n";
  for (const auto& s : rep.samples) {
    std::vector<std::string> f = {format_double(s.t), format_double(s.max_real_part),
                                  std::string(classification_name(s.classification))};
    for (const auto& mu : s.eigenvalues) {
      f.push_back(format_double(mu.real()));
      f.push_back(format_double(mu.imag()));
    }
    out += detail::join(f) + "\n";
  }
  detail::write_text_file(path, out);
  if (metadata) {
    Json j = *metadata;
    j["threshold"] = rep.threshold;
    detail::write_text_file(detail::sidecar_path(path), j.dump(2) + "\n");
  }
}

/// Best-so-far trace per generation; the sidecar also records the best schedule.
inline void export_optimization(const OptimizationResult& res, const std::filesystem::path& path,
                                const std::optional<Json>& metadata = std::nullopt) {
  std::string out = "generation,best_objective\n";
  for (std::size_t g = 0; g < res.trace.size(); ++g)
    out += std::to_string(g) + "," + format_double(res.trace[g]) + "\n";
  detail::write_text_file(path, out);
  Json j = metadata.value_or(Json::object());
  j["best"] = {{"objective", res.best.objective},
               {"genes", res.best.genes},
               {"schedule", detail::write_ratio(res.best.schedule)}};
  j["evaluations"] = res.evaluations;
  j["generations"] = res.generations;
  detail::write_text_file(detail::sidecar_path(path), j.dump(2) + "\n");
}

}  // namespace trimer
