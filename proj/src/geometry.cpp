#include "locsim/geometry.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "locsim/errors.hpp"

namespace locsim {

ResonatorGeometry ResonatorGeometry::build(std::vector<double> lengths, std::vector<double> gaps) {
  if (lengths.empty() || gaps.empty()) {
    throw ValidationError("geometry: lengths and gaps must be non-empty");
  }
  if (lengths.size() != gaps.size()) {
    throw ValidationError("geometry: got " + std::to_string(lengths.size()) + " lengths but " +
                          std::to_string(gaps.size()) + " gaps");
  }
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i])) {
      throw ValidationError("geometry: length " + std::to_string(i + 1) + " must be positive");
    }
    if (!(gaps[i] > 0.0) || !std::isfinite(gaps[i])) {
      throw ValidationError("geometry: gap " + std::to_string(i + 1) + " must be positive");
    }
  }
  return ResonatorGeometry(std::move(lengths), std::move(gaps));
}

ResonatorGeometry::ResonatorGeometry(std::vector<double> lengths, std::vector<double> gaps)
    : lengths_(std::move(lengths)), gaps_(std::move(gaps)), left_(lengths_.size()) {
  double x = 0.0;
  for (std::size_t i = 0; i < lengths_.size(); ++i) {
    left_[i] = x;
    x += lengths_[i] + gaps_[i];
  }
  period_ = x;
}

double ResonatorGeometry::fold_alpha(double alpha) const {
  const double width = 2.0 * pi / period_;
  const double edge = pi / period_;
  double a = std::fmod(alpha + edge, width);
  if (a <= 0.0) a += width;
  return a - edge;
}

MaterialContrast MaterialContrast::uniform(std::size_t n, double delta, double kappa_r,
                                           double rho_r, double v0) {
  return make(delta, std::vector<double>(n, kappa_r), std::vector<double>(n, rho_r), v0);
}

MaterialContrast MaterialContrast::make(double delta, std::vector<double> kappa_r,
                                        std::vector<double> rho_r, double v0) {
  MaterialContrast m;
  m.delta = delta;
  m.kappa_r = std::move(kappa_r);
  m.rho_r = std::move(rho_r);
  m.v0 = v0;
  if (m.kappa_r.size() != m.rho_r.size()) {
    throw ValidationError("material: kappa_r and rho_r lengths differ");
  }
  m.v_r.resize(m.kappa_r.size());
  for (std::size_t i = 0; i < m.kappa_r.size(); ++i) {
    if (!(m.kappa_r[i] > 0.0) || !(m.rho_r[i] > 0.0)) {
      throw ValidationError("material: kappa_r and rho_r must be positive");
    }
    m.v_r[i] = std::sqrt(m.kappa_r[i] / m.rho_r[i]);
  }
  m.validate(m.kappa_r.size());
  return m;
}

void MaterialContrast::validate(std::size_t n) const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ValidationError("material: delta must be non-negative");
  }
  if (!(v0 > 0.0)) throw ValidationError("material: v0 must be positive");
  if (kappa_r.size() != n || rho_r.size() != n || v_r.size() != n) {
    throw ValidationError("material: expected " + std::to_string(n) + " per-resonator values");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = std::sqrt(kappa_r[i] / rho_r[i]);
    if (!(v_r[i] > 0.0) || std::abs(v_r[i] - expected) > 1e-12 * expected) {
      throw ValidationError("material: v_r must equal sqrt(kappa_r / rho_r)");
    }
  }
}

QuasiperiodicCapacitance quasiperiodic_capacitance(const ResonatorGeometry& geom, double alpha) {
  const auto n = static_cast<Eigen::Index>(geom.size());
  const double a = geom.fold_alpha(alpha);
  const double L = geom.period();
  CMatrix c = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    c(i, i) = 1.0 / geom.gap_before(iu) + 1.0 / geom.gap(iu);
    if (i + 1 < n) {
      c(i, i + 1) = -1.0 / geom.gap(iu);
      c(i + 1, i) = -1.0 / geom.gap(iu);
    }
  }
  // Cross-cell coupling through the closing gap; for N = 1 both land on (0,0).
  const double closing = geom.gap(geom.size() - 1);
  c(0, n - 1) += -std::exp(-I_unit * a * L) / closing;
  c(n - 1, 0) += -std::exp(I_unit * a * L) / closing;
  return {a, std::move(c)};
}

CMatrix generalised_capacitance(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                                double alpha) {
  contrast.validate(geom.size());
  CMatrix c = quasiperiodic_capacitance(geom, alpha).entries;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    const auto iu = static_cast<std::size_t>(i);
    c.row(i) *= contrast.prefactor(iu) / geom.length(iu);
  }
  return c;
}

RealspaceCapacitanceBlock realspace_capacitance(const ResonatorGeometry& geom, int m) {
  const auto n = static_cast<Eigen::Index>(geom.size());
  RealspaceCapacitanceBlock block{m, RMatrix::Zero(n, n)};
  const double closing = geom.gap(geom.size() - 1);
  if (m == 0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      block.entries(i, i) = 1.0 / geom.gap_before(iu) + 1.0 / geom.gap(iu);
      if (i + 1 < n) {
        block.entries(i, i + 1) = -1.0 / geom.gap(iu);
        block.entries(i + 1, i) = -1.0 / geom.gap(iu);
      }
    }
  } else if (m == -1) {
    block.entries(0, n - 1) += -1.0 / closing;
  } else if (m == 1) {
    block.entries(n - 1, 0) += -1.0 / closing;
  }
  return block;
}

}  // namespace locsim
