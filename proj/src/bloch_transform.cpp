#include <cmath>
#include <string>

#include "locsim/errors.hpp"
#include "locsim/geometry.hpp"

namespace locsim {

BlochSeries::BlochSeries(BlockSequence blocks, double period)
    : blocks_(std::move(blocks)), period_(period) {
  if (!(period_ > 0.0)) throw ValidationError("Floquet-Bloch transform: period must be positive");
  if (blocks_.empty()) throw ValidationError("Floquet-Bloch transform: empty block sequence");
  dim_ = blocks_.begin()->second.size();
  for (const auto& [m, v] : blocks_) {
    if (v.size() != dim_) {
      throw ValidationError("Floquet-Bloch transform: block " + std::to_string(m) +
                            " has inconsistent dimension");
    }
  }
}

CVector BlochSeries::operator()(double alpha) const {
  CVector out = CVector::Zero(dim_);
  for (const auto& [m, v] : blocks_) {
    out += std::exp(I_unit * (alpha * m * period_)) * v;
  }
  return out;
}

BlochSeries floquet_bloch(BlockSequence blocks, double period) {
  return BlochSeries(std::move(blocks), period);
}

std::vector<double> zone_grid(double period, std::size_t count) {
  if (count < 2) throw ValidationError("zone grid needs at least two nodes");
  std::vector<double> grid(count);
  const double edge = pi / period;
  const double h = 2.0 * edge / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) grid[j] = -edge + h * static_cast<double>(j);
  grid.back() = edge;
  return grid;
}

CVector inverse_floquet_bloch(std::span<const double> alphas, std::span<const CVector> samples,
                              int m, double period) {
  if (alphas.size() != samples.size() || alphas.size() < 2) {
    throw ValidationError("inverse Floquet-Bloch: need matching alpha and sample counts (>= 2)");
  }
  const std::size_t n = alphas.size();
  const double width = 2.0 * pi / period;
  const double h = alphas[1] - alphas[0];
  if (!(h > 0.0)) throw ValidationError("inverse Floquet-Bloch: grid must be increasing");
  const double scale = std::max(1.0, std::abs(alphas[0]) + width);
  for (std::size_t j = 1; j < n; ++j) {
    if (std::abs((alphas[j] - alphas[j - 1]) - h) > 1e-9 * scale) {
      throw ValidationError("inverse Floquet-Bloch: alpha grid is not uniform");
    }
  }
  const double span = alphas[n - 1] - alphas[0];
  bool closed = std::abs(span - width) <= 1e-9 * scale;
  bool periodic = std::abs(span + h - width) <= 1e-9 * scale;
  if (!closed && !periodic) {
    throw ValidationError("inverse Floquet-Bloch: grid does not cover the Brillouin zone");
  }

  CVector acc = CVector::Zero(samples[0].size());
  for (std::size_t j = 0; j < n; ++j) {
    double w = h;
    if (closed && (j == 0 || j == n - 1)) w *= 0.5;
    acc += (w * std::exp(-I_unit * (alphas[j] * m * period))) * samples[j];
  }
  return acc * (period / (2.0 * pi));
}

}  // namespace locsim
