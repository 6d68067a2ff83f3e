#pragma once

#include <string>
#include <vector>

#include "locsim/config.hpp"
#include "locsim/defect_lab.hpp"
#include "locsim/floquet_band.hpp"
#include "locsim/toeplitz_roots.hpp"

namespace locsim {

struct BandResult {
  BandStructure bands;
  std::vector<Interval> band_gaps;
  std::vector<Interval> momentum_gaps;
};

struct ModesResult {
  bool is_static = true;
  std::vector<cplx> omega;
  std::vector<double> lambda;
  std::vector<double> d;
};

struct EvolveResult {
  LocalisationReport report;
  /// Cell index of every supercell site.
  std::vector<int> site_cells;
  double period = 0.0;
  std::size_t peak = 0;
};

struct RootRow {
  cplx guess;
  cplx root;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::string status;
};

BandResult compute_band(const ExperimentConfig& config);
ModesResult compute_modes(const ExperimentConfig& config);
EvolveResult compute_evolve(const ExperimentConfig& config);
std::vector<RootRow> compute_roots(const ExperimentConfig& config);

/// Toeplitz defect strengths eta^0..eta^M read from the config's space defects (N = 1).
std::vector<double> toeplitz_etas(const ExperimentConfig& config);

/// Each writer returns the paths it produced.
std::vector<std::string> write_band(const BandResult& r, const ExperimentConfig& config,
                                    const std::string& dir);
std::vector<std::string> write_gaps(const BandResult& r, const std::string& dir);
std::vector<std::string> write_modes(const ModesResult& r, const ExperimentConfig& config,
                                     const std::string& dir);
std::vector<std::string> write_evolve(const EvolveResult& r, const ExperimentConfig& config,
                                      const std::string& dir);
std::vector<std::string> write_roots(const std::vector<RootRow>& rows, const std::string& dir);

}  // namespace locsim
