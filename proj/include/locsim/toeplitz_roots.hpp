#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <vector>

#include "locsim/geometry.hpp"
#include "locsim/modulation.hpp"
#include "locsim/types.hpp"

namespace locsim {

/// Single-resonator chain (N = 1) with K harmonics kept on each side.
///
/// Harmonics are ordered n = K, K-1, ..., -K along rows and columns. The
/// unknowns are the Fourier coefficients v_n of v(t) = sum_n v_n e^{i(omega + n Omega)t}
/// in the operator  Cgen (1/s) v + (1/s) ((1/kappa) v')'.
class ToeplitzModel {
 public:
  ToeplitzModel(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                ModulationProfile profile, int harmonics, std::size_t quad_points);

  int harmonics() const noexcept { return K_; }
  Eigen::Index block_size() const noexcept { return 2 * K_ + 1; }
  std::size_t quad_points() const noexcept { return quad_points_; }
  double period() const noexcept { return geom_.period(); }
  const ModulationProfile& profile() const noexcept { return profile_; }
  /// Scalar generalised capacitance at alpha.
  double capacitance(double alpha) const;
  /// Harmonic q of 1/s and 1/kappa (zero outside the table).
  cplx s(int q) const { return profile_.harmonic(Modulated::InverseSource, 0, q); }
  cplx k(int q) const { return profile_.harmonic(Modulated::InverseKappa, 0, q); }

 private:
  ResonatorGeometry geom_;
  MaterialContrast contrast_;
  ModulationProfile profile_;
  int K_;
  std::size_t quad_points_;
};

/// (gamma_2, gamma_1, gamma_0, gamma_-1, gamma_-2) of row n; gamma_k multiplies v_{n+k}.
std::array<cplx, 5> gamma_coeffs(int n, cplx omega, double alpha, const ToeplitzModel& model);

/// Square-truncated Gamma^alpha(omega).
CMatrix gamma_matrix(cplx omega, double alpha, const ToeplitzModel& model);

/// G^m: entries eta (1/s)_{-k} on the five central diagonals.
CMatrix defect_block(double eta, const ToeplitzModel& model);

/// T^m(omega) = -(L / 2 pi) int Cgen Gamma^{-1} e^{i alpha m L} d alpha on the periodic
/// trapezoid grid, for every |m| <= max_offset. Quadrature nodes run in parallel.
std::map<int, CMatrix> toeplitz_blocks(cplx omega, int max_offset, const ToeplitzModel& model);
/// Serial reference for toeplitz_blocks.
std::map<int, CMatrix> toeplitz_blocks_serial(cplx omega, int max_offset,
                                              const ToeplitzModel& model);

CMatrix toeplitz_block(int m, cplx omega, const ToeplitzModel& model);

struct ToeplitzSystem {
  std::vector<double> etas;
  /// I - H T(omega), (M+1)(2K+1) square.
  CMatrix matrix;
};

ToeplitzSystem assemble_system(cplx omega, const std::vector<double>& etas,
                               const ToeplitzModel& model);

/// log det as log|det| + i arg(det) from a pivoted LU factorisation.
cplx log_determinant(const CMatrix& m);

struct RootResult {
  cplx omega;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<cplx> trace;
};

struct RootOptions {
  double tol = 1e-10;
  std::size_t max_iterations = 100;
};

/// Secant iteration on det(I - H T(omega)) with a Muller fallback. Throws RootFailure
/// when the residual |det| does not drop below tol * dimension.
RootResult find_root(cplx guess, const std::vector<double>& etas, const ToeplitzModel& model,
                     const RootOptions& opts = {});

}  // namespace locsim
