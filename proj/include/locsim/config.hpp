#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "locsim/defect_lab.hpp"
#include "locsim/geometry.hpp"
#include "locsim/modulation.hpp"
#include "locsim/types.hpp"

namespace locsim {

/// (cell, resonator, value) with a 1-based resonator as written in config files.
struct SiteValue {
  int cell = 0;
  int resonator = 1;
  double value = 0.0;
};

struct ExperimentConfig {
  struct Geometry {
    std::vector<double> lengths{1.0};
    std::vector<double> gaps{1.0};
  } geometry;

  struct Material {
    double delta = 1e-4;
    double v0 = 1.0;
    /// Empty means 1 for every resonator.
    std::vector<double> kappa_r;
    std::vector<double> rho_r;
  } material;

  struct Modulation {
    double omega = 0.034;
    double eps_kappa = 0.0;
    double eps_s = 0.0;
    /// Empty means 0 for every resonator.
    std::vector<double> phase_kappa;
    std::vector<double> phase_s;
    /// Explicit tables override the cosine family: one row of 2M+1 harmonics per resonator.
    std::vector<std::vector<cplx>> kappa_harmonics;
    std::vector<std::vector<cplx>> source_harmonics;
  } modulation;

  struct SpaceDefects {
    std::vector<SiteValue> eta;
    std::vector<SiteValue> wave_speed;
  } space_defect;

  struct TimeDefects {
    std::vector<SiteValue> c;
    /// Unset means t0 = T.
    std::optional<double> t0;
  } time_defect;

  struct Solver {
    std::size_t alpha_count = 101;
    int cells = 20;
    std::size_t steps = 256;
    int K = 2;
    std::size_t quad_points = 512;
    double im_tol = 1e-6;
    double gap_tol = 1e-8;
    double alpha = 0.01;
    double t_start = 0.0;
    /// Unset means t_start + 2T.
    std::optional<double> t_end;
    std::size_t sample_count = 401;
    std::size_t steps_per_period = 1024;
    std::vector<double> snapshots;
    std::vector<cplx> guesses;
    double root_tol = 1e-10;
  } solver;

  struct Output {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "svg"};
  } output;
};

/// Strict parser: unknown sections or keys, malformed values and duplicates raise
/// ValidationError naming the offending key and line.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_canonical(c)) reproduces the same text.
std::string to_canonical(const ExperimentConfig& config);

ResonatorGeometry make_geometry(const ExperimentConfig& config);
MaterialContrast make_contrast(const ExperimentConfig& config);
ModulationProfile make_profile(const ExperimentConfig& config);
SpaceDefect make_space_defect(const ExperimentConfig& config, const MaterialContrast& contrast);
std::optional<TimeDefect> make_time_defect(const ExperimentConfig& config);

}  // namespace locsim
