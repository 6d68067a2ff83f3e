#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "locsim/errors.hpp"
#include "locsim/geometry.hpp"
#include "locsim/modulation.hpp"
#include "locsim/rk4.hpp"
#include "locsim/types.hpp"

namespace locsim {

/// Psi'' + M^alpha(t) Psi = 0 with
///   M^alpha(t) = W1(t) diag(delta kappa_r^i / rho_r^i) C^alpha W2(t) + W3(t).
class FloquetProblem {
 public:
  FloquetProblem(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                 ModulationProfile profile, double alpha);

  double alpha() const noexcept { return alpha_; }
  Eigen::Index dimension() const noexcept { return scaled_.rows(); }
  double period() const noexcept { return profile_.period(); }
  const ModulationProfile& profile() const noexcept { return profile_; }
  /// The generalised capacitance matrix at this alpha (the static limit of M).
  const CMatrix& generalised_capacitance() const noexcept { return generalised_; }

  CMatrix coefficient(double t) const;

 private:
  ResonatorGeometry geom_;
  double alpha_;
  CMatrix scaled_;
  CMatrix generalised_;
  ModulationProfile profile_;
};

FloquetProblem assemble_floquet(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                                const ModulationProfile& profile, double alpha);

struct MonodromyOptions {
  std::size_t steps = 256;
  std::size_t max_steps = std::size_t{1} << 20;
  double det_tol = 1e-8;
};

struct Monodromy {
  CMatrix matrix;
  double period = 0.0;
  double t0 = 0.0;
  std::size_t steps = 0;
  cplx determinant;
};

/// Fundamental matrix of Y' = F(t, Y) over [t0, t0 + period] starting from the
/// identity. The step count doubles until |det - 1| < det_tol; the system must
/// be trace free.
template <class Rhs>
Monodromy fundamental_matrix(Rhs&& rhs, Eigen::Index dim, double t0, double period,
                             const MonodromyOptions& opts) {
  if (opts.steps < 32) throw ValidationError("monodromy: need at least 32 steps");
  double last_error = 0.0;
  for (std::size_t steps = opts.steps; steps <= opts.max_steps; steps *= 2) {
    CMatrix y = rk4_integrate(rhs, CMatrix(CMatrix::Identity(dim, dim)), t0, t0 + period, steps);
    const cplx det = y.determinant();
    last_error = std::abs(det - 1.0);
    if (last_error < opts.det_tol) return {std::move(y), period, t0, steps, det};
  }
  throw IntegrationAccuracyError("monodromy: |det - 1| = " + std::to_string(last_error) +
                                 " after " + std::to_string(opts.max_steps) + " steps");
}

Monodromy monodromy(const FloquetProblem& problem, const MonodromyOptions& opts = {});

/// omega = log(mu) / (i T) on the principal branch, so Re omega lies in (-Omega/2, Omega/2].
cplx quasifrequency_from_multiplier(cplx mu, double period);

/// Fold a real frequency into (-Omega/2, Omega/2].
double fold_frequency(double omega, double omega_mod);

/// Pick `keep` representatives out of 2*keep quasifrequencies: from each +/- pair
/// the one with Re >= 0, ties (Re = 0 or Re = Omega/2) broken by Im >= 0.
std::vector<std::size_t> select_representatives(std::span<const cplx> omegas, std::size_t keep,
                                                double omega_mod);

/// N quasifrequencies of a 2N x 2N monodromy, sorted by (Re, Im).
std::vector<cplx> quasifrequencies(const Monodromy& mono, double omega_mod);

struct BandStructure {
  std::vector<double> alpha_grid;
  /// bands[a][j]: quasifrequency of band j at alpha_grid[a].
  std::vector<std::vector<cplx>> bands;
  double omega_mod = 0.0;
  std::vector<double> det_errors;
  std::vector<std::size_t> steps;

  std::size_t band_count() const { return bands.empty() ? 0 : bands.front().size(); }
};

/// Uniform alpha grid with `count` nodes over [-pi/L, pi/L] (closed).
std::vector<double> sweep_grid(const ResonatorGeometry& geom, std::size_t count);

/// OpenMP sweep over the Brillouin zone followed by sequential band matching.
BandStructure band_sweep(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                         const ModulationProfile& profile, std::size_t alpha_count,
                         const MonodromyOptions& opts = {});

/// Serial reference for band_sweep; results are identical.
BandStructure band_sweep_serial(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                                const ModulationProfile& profile, std::size_t alpha_count,
                                const MonodromyOptions& opts = {});

/// Reorder bands so that band j at alpha_{a+1} continues band j at alpha_a
/// (nearest neighbour in the complex plane).
void match_bands(BandStructure& bands);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct GapOptions {
  /// Minimum width of a frequency gap, relative to Omega.
  double gap_tol = 1e-8;
  /// |Im omega| above im_tol * Omega marks a momentum gap.
  double im_tol = 1e-6;
};

std::vector<Interval> detect_band_gaps(const BandStructure& bands, const GapOptions& opts = {});
std::vector<Interval> detect_momentum_gaps(const BandStructure& bands, const GapOptions& opts = {});

}  // namespace locsim
