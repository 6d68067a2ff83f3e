#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "locsim/types.hpp"

namespace locsim {

/// Layout of one unit cell (0, L) holding N resonators D_i = (x_i^-, x_i^+).
///
/// `gap(i)` is the spacing between D_i and D_{i+1}; the last gap closes the
/// cell, so `gap(N-1)` separates D_N from D_1 of the next cell. Indices are
/// 0-based throughout the library.
class ResonatorGeometry {
 public:
  static ResonatorGeometry build(std::vector<double> lengths, std::vector<double> gaps);

  std::size_t size() const noexcept { return lengths_.size(); }
  double period() const noexcept { return period_; }

  double length(std::size_t i) const { return lengths_.at(i); }
  /// Spacing to the right of resonator i.
  double gap(std::size_t i) const { return gaps_.at(i); }
  /// Spacing to the left of resonator i (cyclic: the previous cell's last gap for i = 0).
  double gap_before(std::size_t i) const { return gaps_.at(i == 0 ? size() - 1 : i - 1); }

  double left(std::size_t i) const { return left_.at(i); }
  double right(std::size_t i) const { return left_.at(i) + lengths_.at(i); }

  std::span<const double> lengths() const noexcept { return lengths_; }
  std::span<const double> gaps() const noexcept { return gaps_; }

  /// pi / L, the edge of the Brillouin zone.
  double zone_edge() const noexcept { return pi / period_; }
  /// Reduce alpha modulo 2 pi / L into (-pi/L, pi/L].
  double fold_alpha(double alpha) const;

 private:
  ResonatorGeometry(std::vector<double> lengths, std::vector<double> gaps);

  std::vector<double> lengths_;
  std::vector<double> gaps_;
  std::vector<double> left_;
  double period_ = 0.0;
};

/// High-contrast material data. `v_r[i]` is sqrt(kappa_r[i] / rho_r[i]).
struct MaterialContrast {
  double delta = 1e-4;
  std::vector<double> kappa_r;
  std::vector<double> rho_r;
  double v0 = 1.0;
  std::vector<double> v_r;

  static MaterialContrast uniform(std::size_t n, double delta, double kappa_r = 1.0,
                                  double rho_r = 1.0, double v0 = 1.0);
  static MaterialContrast make(double delta, std::vector<double> kappa_r, std::vector<double> rho_r,
                               double v0);

  /// delta * kappa_r^i / rho_r^i, the row prefactor of the generalised capacitance matrix.
  double prefactor(std::size_t i) const { return delta * kappa_r.at(i) / rho_r.at(i); }
  void validate(std::size_t n) const;
};

struct QuasiperiodicCapacitance {
  double alpha = 0.0;
  CMatrix entries;
};

struct RealspaceCapacitanceBlock {
  int cell_offset = 0;
  RMatrix entries;
};

/// C^alpha: tridiagonal with quasiperiodic corners, e^{-i alpha L} at (1,N)
/// and e^{+i alpha L} at (N,1).
QuasiperiodicCapacitance quasiperiodic_capacitance(const ResonatorGeometry& geom, double alpha);

/// (delta kappa_r / rho_r) diag(1/l_i) C^alpha, scaled row by row.
CMatrix generalised_capacitance(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                                double alpha);

/// C^m = inverse Floquet-Bloch transform of C^alpha at cell offset m. Nonzero
/// only for |m| <= 1: C^{-1} holds the (1,N) coupling and C^{+1} the (N,1) one,
/// so that C^alpha = sum_m C^m e^{i alpha m L}.
RealspaceCapacitanceBlock realspace_capacitance(const ResonatorGeometry& geom, int m);

// Floquet-Bloch transform over the lattice m L:
//   I[f](alpha) = sum_m f(m) e^{i alpha m L},
//   I^{-1}[F](m) = L/(2 pi) int_{Y*} F(alpha) e^{-i alpha m L} d alpha.

using BlockSequence = std::map<int, CVector>;

class BlochSeries {
 public:
  BlochSeries(BlockSequence blocks, double period);
  CVector operator()(double alpha) const;
  double period() const noexcept { return period_; }

 private:
  BlockSequence blocks_;
  double period_;
  Eigen::Index dim_ = 0;
};

BlochSeries floquet_bloch(BlockSequence blocks, double period);

/// Uniform closed grid of `count` nodes from -pi/L to pi/L inclusive.
std::vector<double> zone_grid(double period, std::size_t count);

/// Trapezoidal inverse transform. `alphas` must be uniform and span Y* either
/// closed (first = -pi/L, last = pi/L) or as a periodic grid of width 2 pi / L.
CVector inverse_floquet_bloch(std::span<const double> alphas, std::span<const CVector> samples,
                              int m, double period);

}  // namespace locsim
