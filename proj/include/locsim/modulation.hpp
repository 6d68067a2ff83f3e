#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "locsim/geometry.hpp"
#include "locsim/types.hpp"

namespace locsim {

/// Which periodically modulated quantity to evaluate.
enum class Modulated { InverseKappa, InverseSource };

/// Parameters of the cosine family
///   kappa_i(t) = 1 / (1 + eps_kappa cos(Omega t + phi_kappa^i)),
///   s_i(t)     = 1 / (1 + eps_s     cos(Omega t + phi_s^i)).
struct CosineModulation {
  double eps_kappa = 0.0;
  double eps_s = 0.0;
  std::vector<double> phase_kappa;
  std::vector<double> phase_s;
};

/// Finite Fourier tables of 1/kappa_i(t) and 1/s_i(t) with frequency Omega.
///
/// Tables are stored per resonator as 2M+1 complex harmonics (index n + M).
/// Conjugate symmetry is enforced so the evaluated functions are real.
class ModulationProfile {
 public:
  using Table = std::vector<std::vector<cplx>>;

  static ModulationProfile from_cosine(double omega_mod, std::size_t resonators, double eps_kappa,
                                       double eps_s, std::vector<double> phase_kappa = {},
                                       std::vector<double> phase_s = {});
  static ModulationProfile unmodulated(double omega_mod, std::size_t resonators);
  static ModulationProfile from_harmonics(double omega_mod, Table kappa, Table source);

  double omega() const noexcept { return omega_; }
  double period() const noexcept { return 2.0 * pi / omega_; }
  std::size_t size() const noexcept { return k_.size(); }
  int order() const noexcept { return order_; }
  bool is_static() const noexcept { return static_; }
  const std::optional<CosineModulation>& cosine() const noexcept { return cosine_; }

  /// Harmonic n of 1/kappa_i or 1/s_i; zero for |n| > order().
  cplx harmonic(Modulated q, std::size_t i, int n) const;

  /// d^order/dt^order of 1/kappa_i(t) or 1/s_i(t), order in {0, 1, 2}.
  double eval_inv(Modulated q, std::size_t i, double t, int derivative_order = 0) const;

  /// Smallest sampled value of 1/kappa_i or 1/s_i over one period.
  double min_over_period(Modulated q, std::size_t i, std::size_t samples = 512) const;

 private:
  ModulationProfile(double omega, Table k, Table s);

  double omega_;
  int order_ = 0;
  bool static_ = true;
  Table k_;
  Table s_;
  std::optional<CosineModulation> cosine_;
};

inline double eval_inv(const ModulationProfile& p, Modulated q, std::size_t i, double t,
                       int derivative_order = 0) {
  return p.eval_inv(q, i, t, derivative_order);
}

/// Diagonals of W1, W2, W3:
///   (W1)_ii = sqrt(kappa_i) s_i / l_i,  (W2)_ii = sqrt(kappa_i) / s_i,
///   (W3)_ii = -g''/(2g) + g'^2/(4g^2)  with g = 1/kappa_i.
struct WMatrices {
  RVector w1;
  RVector w2;
  RVector w3;
};

WMatrices w_matrices(const ModulationProfile& profile, const ResonatorGeometry& geom, double t);

/// Compactly supported-in-time perturbation c_{(m,i)} f(t) added to 1/kappa_i in cell m,
/// with f(t) = exp(-(t/t0 - 1)^2).
class TimeDefect {
 public:
  TimeDefect(std::map<std::pair<int, int>, double> coefficients, double t0);

  double t0() const noexcept { return t0_; }
  double envelope(double t) const;
  /// Coefficient for (cell, resonator); zero when absent.
  double coefficient(int cell, int resonator) const;
  double eval(int cell, int resonator, double t) const {
    return coefficient(cell, resonator) * envelope(t);
  }
  const std::map<std::pair<int, int>, double>& coefficients() const noexcept {
    return coefficients_;
  }
  bool empty() const;

 private:
  std::map<std::pair<int, int>, double> coefficients_;
  double t0_;
};

inline double defect_eval(const TimeDefect& defect, int cell, int resonator, double t) {
  return defect.eval(cell, resonator, t);
}

}  // namespace locsim
