#include "locsim/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "locsim/errors.hpp"

namespace locsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view what, std::string_view text) {
  throw ValidationError("expected " + std::string(what) + ", got '" + std::string(text) + "'");
}

double to_real(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != end || !std::isfinite(v)) bad_value("a number", s);
  return v;
}

long to_integer(std::string_view s) {
  s = trim(s);
  long v = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != end) bad_value("an integer", s);
  return v;
}

std::size_t to_count(std::string_view s) {
  const long v = to_integer(s);
  if (v < 0) bad_value("a non-negative integer", s);
  return static_cast<std::size_t>(v);
}

cplx to_complex(std::string_view s) {
  const auto parts = split(s, ':');
  if (parts.size() == 1) return {to_real(parts[0]), 0.0};
  if (parts.size() != 2) bad_value("re:im", s);
  return {to_real(parts[0]), to_real(parts[1])};
}

SiteValue to_site(std::string_view s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) bad_value("cell:resonator:value", s);
  const long cell = to_integer(parts[0]);
  const long res = to_integer(parts[1]);
  if (res < 1) bad_value("a 1-based resonator index", parts[1]);
  return {static_cast<int>(cell), static_cast<int>(res), to_real(parts[2])};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(cplx v) { return fmt(v.real()) + ":" + fmt(v.imag()); }

std::string fmt(const SiteValue& s) {
  return std::to_string(s.cell) + ":" + std::to_string(s.resonator) + ":" + fmt(s.value);
}

template <class T>
std::string join(const std::vector<T>& xs, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    if constexpr (std::is_same_v<T, std::string>) {
      out += xs[i];
    } else {
      out += fmt(xs[i]);
    }
  }
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(ExperimentConfig&, std::string_view)> parse;
  /// Nothing printed when the value is unset.
  std::function<std::optional<std::string>(const ExperimentConfig&)> print;
};

template <class Get>
Field real_field(const char* sec, const char* key, Get get) {
  return {sec, key, [get](ExperimentConfig& c, std::string_view v) { get(c) = to_real(v); },
          [get](const ExperimentConfig& c) {
            return std::optional<std::string>(fmt(get(c)));
          }};
}

template <class Get>
Field optional_real_field(const char* sec, const char* key, Get get) {
  return {sec, key, [get](ExperimentConfig& c, std::string_view v) { get(c) = to_real(v); },
          [get](const ExperimentConfig& c) -> std::optional<std::string> {
            const auto& o = get(c);
            if (!o) return std::nullopt;
            return fmt(*o);
          }};
}

template <class Get>
Field count_field(const char* sec, const char* key, Get get) {
  return {sec, key,
          [get](ExperimentConfig& c, std::string_view v) {
            get(c) = static_cast<std::remove_reference_t<decltype(get(c))>>(to_count(v));
          },
          [get](const ExperimentConfig& c) {
            return std::optional<std::string>(
                std::to_string(get(c)));
          }};
}

template <class Get, class Item>
Field list_field(const char* sec, const char* key, Get get, Item item) {
  return {sec, key,
          [get, item](ExperimentConfig& c, std::string_view v) {
            auto& out = get(c);
            out.clear();
            for (auto part : split(v, ',')) out.push_back(item(part));
          },
          [get](const ExperimentConfig& c) {
            return std::optional<std::string>(join(get(c)));
          }};
}

template <class Get>
Field table_field(const char* sec, const char* key, Get get) {
  return {sec, key,
          [get](ExperimentConfig& c, std::string_view v) {
            auto& out = get(c);
            out.clear();
            for (auto row : split(v, '|')) {
              std::vector<cplx> r;
              for (auto part : split(row, ',')) r.push_back(to_complex(part));
              out.push_back(std::move(r));
            }
          },
          [get](const ExperimentConfig& c) -> std::optional<std::string> {
            const auto& t = get(c);
            if (t.empty()) return std::nullopt;
            std::string s;
            for (std::size_t i = 0; i < t.size(); ++i) s += (i ? " | " : "") + join(t[i]);
            return s;
          }};
}

const std::vector<Field>& schema() {
  using C = ExperimentConfig;
  static const std::vector<Field> fields = {
      list_field("geometry", "lengths", [](auto& c) -> auto& { return c.geometry.lengths; }, to_real),
      list_field("geometry", "gaps", [](auto& c) -> auto& { return c.geometry.gaps; }, to_real),

      real_field("material", "delta", [](auto& c) -> auto& { return c.material.delta; }),
      real_field("material", "v0", [](auto& c) -> auto& { return c.material.v0; }),
      list_field("material", "kappa_r", [](auto& c) -> auto& { return c.material.kappa_r; }, to_real),
      list_field("material", "rho_r", [](auto& c) -> auto& { return c.material.rho_r; }, to_real),

      real_field("modulation", "omega", [](auto& c) -> auto& { return c.modulation.omega; }),
      real_field("modulation", "eps_kappa", [](auto& c) -> auto& { return c.modulation.eps_kappa; }),
      real_field("modulation", "eps_s", [](auto& c) -> auto& { return c.modulation.eps_s; }),
      list_field("modulation", "phase_kappa",
                 [](auto& c) -> auto& { return c.modulation.phase_kappa; }, to_real),
      list_field("modulation", "phase_s", [](auto& c) -> auto& { return c.modulation.phase_s; },
                 to_real),
      table_field("modulation", "kappa_harmonics",
                  [](auto& c) -> auto& { return c.modulation.kappa_harmonics; }),
      table_field("modulation", "source_harmonics",
                  [](auto& c) -> auto& { return c.modulation.source_harmonics; }),

      list_field("space_defect", "eta", [](auto& c) -> auto& { return c.space_defect.eta; }, to_site),
      list_field("space_defect", "wave_speed",
                 [](auto& c) -> auto& { return c.space_defect.wave_speed; }, to_site),

      list_field("time_defect", "c", [](auto& c) -> auto& { return c.time_defect.c; }, to_site),
      optional_real_field("time_defect", "t0", [](auto& c) -> auto& { return c.time_defect.t0; }),

      count_field("solver", "alpha_count", [](auto& c) -> auto& { return c.solver.alpha_count; }),
      count_field("solver", "cells", [](auto& c) -> auto& { return c.solver.cells; }),
      count_field("solver", "steps", [](auto& c) -> auto& { return c.solver.steps; }),
      count_field("solver", "K", [](auto& c) -> auto& { return c.solver.K; }),
      count_field("solver", "quad_points", [](auto& c) -> auto& { return c.solver.quad_points; }),
      real_field("solver", "im_tol", [](auto& c) -> auto& { return c.solver.im_tol; }),
      real_field("solver", "gap_tol", [](auto& c) -> auto& { return c.solver.gap_tol; }),
      real_field("solver", "alpha", [](auto& c) -> auto& { return c.solver.alpha; }),
      real_field("solver", "t_start", [](auto& c) -> auto& { return c.solver.t_start; }),
      optional_real_field("solver", "t_end", [](auto& c) -> auto& { return c.solver.t_end; }),
      count_field("solver", "sample_count", [](auto& c) -> auto& { return c.solver.sample_count; }),
      count_field("solver", "steps_per_period",
                  [](auto& c) -> auto& { return c.solver.steps_per_period; }),
      list_field("solver", "snapshots", [](auto& c) -> auto& { return c.solver.snapshots; }, to_real),
      list_field("solver", "guesses", [](auto& c) -> auto& { return c.solver.guesses; }, to_complex),
      real_field("solver", "root_tol", [](auto& c) -> auto& { return c.solver.root_tol; }),

      {"output", "directory",
       [](C& c, std::string_view v) {
         if (v.empty()) bad_value("a directory", v);
         c.output.directory = std::string(v);
       },
       [](const C& c) { return std::optional<std::string>(c.output.directory); }},
      list_field("output", "formats", [](auto& c) -> auto& { return c.output.formats; },
                 [](std::string_view s) {
                   if (s != "csv" && s != "svg") bad_value("csv or svg", s);
                   return std::string(s);
                 }),
  };
  return fields;
}

const char* const kSections[] = {"geometry",    "material", "modulation", "space_defect",
                                 "time_defect", "solver",   "output"};

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = " (line " + std::to_string(line_no) + ")";
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("config: malformed section header" + where);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      bool known = false;
      for (const char* s : kSections) known = known || section == s;
      if (!known) throw ValidationError("config: unknown section '" + section + "'" + where);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ValidationError("config: expected key = value" + where);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ValidationError("config: key '" + key + "' appears before any section" + where);
    }
    const Field* field = nullptr;
    for (const auto& f : schema()) {
      if (section == f.section && key == f.key) field = &f;
    }
    if (!field) {
      throw ValidationError("config: unknown key '" + key + "' in [" + section + "]" + where);
    }
    if (!seen.insert(section + "." + key).second) {
      throw ValidationError("config: duplicate key '" + key + "' in [" + section + "]" + where);
    }
    try {
      field->parse(cfg, value);
    } catch (const ValidationError& e) {
      throw ValidationError("config: key '" + key + "' in [" + section + "]: " + e.what() + where);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_canonical(const ExperimentConfig& config) {
  std::string out;
  for (const char* sec : kSections) {
    std::string body;
    for (const auto& f : schema()) {
      if (std::string_view(f.section) != sec) continue;
      if (auto v = f.print(config)) body += std::string(f.key) + " = " + *v + "\n";
    }
    if (!out.empty()) out += "\n";
    out += "[" + std::string(sec) + "]\n" + body;
  }
  return out;
}

ResonatorGeometry make_geometry(const ExperimentConfig& config) {
  return ResonatorGeometry::build(config.geometry.lengths, config.geometry.gaps);
}

MaterialContrast make_contrast(const ExperimentConfig& config) {
  const std::size_t n = config.geometry.lengths.size();
  auto fill = [n](std::vector<double> v, const char* name) {
    if (v.empty()) return std::vector<double>(n, 1.0);
    if (v.size() != n) {
      throw ValidationError(std::string("config: material.") + name + " needs one value per resonator");
    }
    return v;
  };
  return MaterialContrast::make(config.material.delta, fill(config.material.kappa_r, "kappa_r"),
                                fill(config.material.rho_r, "rho_r"), config.material.v0);
}

ModulationProfile make_profile(const ExperimentConfig& config) {
  const auto& m = config.modulation;
  const std::size_t n = config.geometry.lengths.size();
  if (!m.kappa_harmonics.empty() || !m.source_harmonics.empty()) {
    if (m.kappa_harmonics.size() != n || m.source_harmonics.size() != n) {
      throw ValidationError("config: harmonic tables need one row per resonator for both kappa and s");
    }
    return ModulationProfile::from_harmonics(m.omega, m.kappa_harmonics, m.source_harmonics);
  }
  return ModulationProfile::from_cosine(m.omega, n, m.eps_kappa, m.eps_s, m.phase_kappa, m.phase_s);
}

SpaceDefect make_space_defect(const ExperimentConfig& config, const MaterialContrast& contrast) {
  SpaceDefect d;
  const int n = static_cast<int>(config.geometry.lengths.size());
  auto site = [n](const SiteValue& s) {
    if (s.resonator > n) {
      throw ValidationError("config: defect resonator " + std::to_string(s.resonator) +
                            " exceeds N = " + std::to_string(n));
    }
    return Site{s.cell, s.resonator - 1};
  };
  for (const auto& s : config.space_defect.eta) d.set_eta(site(s), s.value);
  for (const auto& s : config.space_defect.wave_speed) d.set_wave_speed(site(s), s.value, contrast);
  return d;
}

std::optional<TimeDefect> make_time_defect(const ExperimentConfig& config) {
  if (config.time_defect.c.empty()) return std::nullopt;
  const int n = static_cast<int>(config.geometry.lengths.size());
  std::map<Site, double> coeffs;
  for (const auto& s : config.time_defect.c) {
    if (s.resonator > n) {
      throw ValidationError("config: time defect resonator " + std::to_string(s.resonator) +
                            " exceeds N = " + std::to_string(n));
    }
    coeffs[{s.cell, s.resonator - 1}] = s.value;
  }
  const double t0 = config.time_defect.t0.value_or(2.0 * pi / config.modulation.omega);
  return TimeDefect(std::move(coeffs), t0);
}

}  // namespace locsim
