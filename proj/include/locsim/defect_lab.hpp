#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "locsim/floquet_band.hpp"
#include "locsim/geometry.hpp"
#include "locsim/modulation.hpp"
#include "locsim/types.hpp"

namespace locsim {

/// Site key: (cell m, resonator i), resonator 0-based.
using Site = std::pair<int, int>;

/// Spatial defect b_i^m = 1 + eta_i^m, b = 1 away from the listed sites.
class SpaceDefect {
 public:
  SpaceDefect() = default;
  explicit SpaceDefect(std::map<Site, double> eta);

  /// Wave-speed override v at a site maps to b = (v / v_r^i)^2.
  void set_wave_speed(Site site, double v, const MaterialContrast& contrast);
  void set_eta(Site site, double eta);

  double b(int cell, int resonator) const;
  const std::map<Site, double>& eta() const noexcept { return eta_; }
  bool empty() const;

 private:
  std::map<Site, double> eta_;
};

/// Finite chain of `cells` copies of the unit cell, closed quasiperiodically with
/// phase e^{i alpha_sc cells L}. Cells run from first_cell() to first_cell() + cells - 1
/// so that cell 0 sits in the middle.
class SupercellSystem {
 public:
  const ResonatorGeometry& geometry() const noexcept { return geom_; }
  const MaterialContrast& contrast() const noexcept { return contrast_; }
  const ModulationProfile& profile() const noexcept { return profile_; }
  const std::optional<TimeDefect>& time_defect() const noexcept { return time_defect_; }
  int cells() const noexcept { return cells_; }
  int first_cell() const noexcept { return first_cell_; }
  double alpha() const noexcept { return alpha_; }
  Eigen::Index dimension() const noexcept { return capacitance_.rows(); }

  Eigen::Index site(int cell, int resonator) const;
  int cell_of(Eigen::Index site) const;

  /// Supercell capacitance (block tridiagonal with phased corner blocks).
  const CMatrix& capacitance() const noexcept { return capacitance_; }
  /// diag(b_i^m) as a vector.
  const RVector& b() const noexcept { return b_; }
  /// diag(b delta kappa_r / (rho_r l)) so that B Cgen = diag(weights) * capacitance.
  const RVector& weights() const noexcept { return weights_; }

  /// Per-site 1/kappa + c f and 1/s at time t.
  RVector inv_kappa(double t) const;
  RVector inv_source(double t) const;

  /// The window over which multipliers are computed.
  double window_start() const;

 private:
  friend SupercellSystem build_supercell(const ResonatorGeometry&, const MaterialContrast&,
                                         const ModulationProfile&, int, const SpaceDefect&,
                                         std::optional<TimeDefect>, double);
  SupercellSystem(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                  ModulationProfile profile)
      : geom_(geom), contrast_(contrast), profile_(std::move(profile)) {}

  ResonatorGeometry geom_;
  MaterialContrast contrast_;
  ModulationProfile profile_;
  std::optional<TimeDefect> time_defect_;
  int cells_ = 0;
  int first_cell_ = 0;
  double alpha_ = 0.0;
  CMatrix capacitance_;
  RVector b_;
  RVector weights_;
};

SupercellSystem build_supercell(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                                const ModulationProfile& profile, int cells,
                                const SpaceDefect& space_defect = {},
                                std::optional<TimeDefect> time_defect = std::nullopt,
                                double alpha_sc = 0.01);

/// ||v||_inf / ||v||_2.
double degree_of_localisation(const CVector& v);

/// Split of d values into a bulk cluster and the modes standing clear of it.
/// bulk = d at or below the 90th percentile; threshold = 2 x the bulk's 99th percentile
/// (percentiles by linear interpolation); localised = d > threshold.
struct BulkSplit {
  double bulk_p99 = 0.0;
  double threshold = 0.0;
  std::vector<std::size_t> localised;
};

BulkSplit split_bulk(const std::vector<double>& d);

struct StaticModes {
  RVector omega;
  /// Columns are the eigenvectors of B Cgen.
  CMatrix modes;
  std::vector<double> d;
};

StaticModes static_defect_modes(const SupercellSystem& sys);

struct LocalisationReport {
  /// Per reduced mode.
  std::vector<cplx> omega;
  std::vector<double> lambda;
  std::vector<double> d;
  /// Position components of each reduced mode, as columns.
  CMatrix modes;
  /// Full (u, p) eigenvectors of the reduced modes, as columns.
  CMatrix states;
  /// All 2 N_tot multipliers.
  std::vector<cplx> multipliers;
  std::size_t steps = 0;

  std::vector<double> times;
  std::vector<double> d_star;
  std::vector<std::pair<double, RVector>> snapshots;
};

LocalisationReport floquet_defect_spectrum(const SupercellSystem& sys,
                                           const MonodromyOptions& opts = {});

struct EvolveOptions {
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t sample_count = 401;
  /// RK4 steps per modulation period.
  std::size_t steps_per_period = 1024;
  std::vector<double> snapshot_times;
};

/// Integrates u' = G^{-1} p, p' = -S B Cgen S^{-1} u with G = 1/kappa + c f.
/// `initial` has 2 N_tot entries (positions then momenta).
LocalisationReport evolve(const SupercellSystem& sys, const CVector& initial,
                          const EvolveOptions& opts);

/// Position part of the reduced Floquet mode with the largest d, zero momentum.
CVector default_initial_state(const SupercellSystem& sys, const LocalisationReport& spectrum);

}  // namespace locsim
