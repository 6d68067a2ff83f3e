#include "locsim/toeplitz_roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <exception>
#include <string>

#include <Eigen/LU>

#include "locsim/errors.hpp"

namespace locsim {

ToeplitzModel::ToeplitzModel(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                             ModulationProfile profile, int harmonics, std::size_t quad_points)
    : geom_(geom),
      contrast_(contrast),
      profile_(std::move(profile)),
      K_(harmonics),
      quad_points_(quad_points) {
  if (geom_.size() != 1) {
    throw UnsupportedConfiguration("toeplitz: only N = 1 unit cells are supported (got N = " +
                                   std::to_string(geom_.size()) + ")");
  }
  if (profile_.size() != 1) throw ValidationError("toeplitz: profile must describe one resonator");
  if (profile_.order() > 1) {
    throw UnsupportedConfiguration("toeplitz: only first-harmonic modulations are supported");
  }
  if (K_ < 0) throw ValidationError("toeplitz: K must be non-negative");
  if (quad_points_ < 64) throw ValidationError("toeplitz: need at least 64 quadrature points");
  contrast_.validate(1);
}

double ToeplitzModel::capacitance(double alpha) const {
  return generalised_capacitance(geom_, contrast_, alpha)(0, 0).real();
}

std::array<cplx, 5> gamma_coeffs(int n, cplx omega, double alpha, const ToeplitzModel& model) {
  const double cap = model.capacitance(alpha);
  const double Omega = model.profile().omega();
  std::array<cplx, 5> out{};
  for (int k = 2; k >= -2; --k) {
    const cplx nu = omega + static_cast<double>(n + k) * Omega;
    cplx g = cap * model.s(-k);
    for (int a = -1; a <= 1; ++a) {
      const int b = -k - a;
      if (b < -1 || b > 1) continue;
      g -= model.s(a) * model.k(b) * nu * (nu + static_cast<double>(b) * Omega);
    }
    out[static_cast<std::size_t>(2 - k)] = g;
  }
  return out;
}

CMatrix gamma_matrix(cplx omega, double alpha, const ToeplitzModel& model) {
  const int K = model.harmonics();
  const Eigen::Index dim = model.block_size();
  CMatrix g = CMatrix::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const int n = K - static_cast<int>(r);
    const auto c = gamma_coeffs(n, omega, alpha, model);
    for (int k = -2; k <= 2; ++k) {
      // Column of harmonic n + k.
      const Eigen::Index col = r - k;
      if (col < 0 || col >= dim) continue;
      g(r, col) = c[static_cast<std::size_t>(2 - k)];
    }
  }
  return g;
}

CMatrix defect_block(double eta, const ToeplitzModel& model) {
  const Eigen::Index dim = model.block_size();
  CMatrix g = CMatrix::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (int k = -1; k <= 1; ++k) {
      const Eigen::Index col = r - k;
      if (col < 0 || col >= dim) continue;
      g(r, col) = eta * model.s(-k);
    }
  }
  return g;
}

namespace {

/// Cgen Gamma^{-1} at one node; near-singular Gamma raises with the node's alpha.
CMatrix node_kernel(cplx omega, double alpha, const ToeplitzModel& model) {
  const CMatrix g = gamma_matrix(omega, alpha, model);
  Eigen::PartialPivLU<CMatrix> lu(g);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-13)) {
    throw NearSingularityError("toeplitz: Gamma is near singular at alpha = " +
                                   std::to_string(alpha) + " (omega on a band?)",
                               alpha);
  }
  // Cgen is a scalar here; the full Gamma^{-1} is needed for the block sums.
  const CMatrix inv = lu.solve(CMatrix::Identity(g.rows(), g.cols()));
  return model.capacitance(alpha) * inv;
}

struct Grid {
  double start;
  double step;
};

Grid quad_grid(const ToeplitzModel& model) {
  const double L = model.period();
  return {-pi / L, 2.0 * pi / (L * static_cast<double>(model.quad_points()))};
}

void accumulate(std::map<int, CMatrix>& blocks, const CMatrix& kernel, double alpha, double L,
                double weight) {
  for (auto& [m, block] : blocks) {
    block += (weight * std::exp(I_unit * (alpha * m * L))) * kernel;
  }
}

std::map<int, CMatrix> empty_blocks(int max_offset, Eigen::Index dim) {
  if (max_offset < 0) throw ValidationError("toeplitz: negative block offset");
  std::map<int, CMatrix> blocks;
  for (int m = -max_offset; m <= max_offset; ++m) blocks[m] = CMatrix::Zero(dim, dim);
  return blocks;
}

}  // namespace

std::map<int, CMatrix> toeplitz_blocks_serial(cplx omega, int max_offset,
                                              const ToeplitzModel& model) {
  const double L = model.period();
  const Grid grid = quad_grid(model);
  // -(L / 2 pi) * h = -1 / Q on the periodic trapezoid grid.
  const double weight = -1.0 / static_cast<double>(model.quad_points());
  auto blocks = empty_blocks(max_offset, model.block_size());
  for (std::size_t j = 0; j < model.quad_points(); ++j) {
    const double alpha = grid.start + grid.step * static_cast<double>(j);
    accumulate(blocks, node_kernel(omega, alpha, model), alpha, L, weight);
  }
  return blocks;
}

std::map<int, CMatrix> toeplitz_blocks(cplx omega, int max_offset, const ToeplitzModel& model) {
  const double L = model.period();
  const Grid grid = quad_grid(model);
  const double weight = -1.0 / static_cast<double>(model.quad_points());
  const auto count = static_cast<long>(model.quad_points());
  std::vector<CMatrix> kernels(model.quad_points());
  std::vector<std::exception_ptr> errors(model.quad_points());

#pragma omp parallel for schedule(static)
  for (long j = 0; j < count; ++j) {
    const auto k = static_cast<std::size_t>(j);
    try {
      kernels[k] = node_kernel(omega, grid.start + grid.step * static_cast<double>(j), model);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Summed in node order so the result matches the serial reference bit for bit.
  auto blocks = empty_blocks(max_offset, model.block_size());
  for (std::size_t j = 0; j < kernels.size(); ++j) {
    accumulate(blocks, kernels[j], grid.start + grid.step * static_cast<double>(j), L, weight);
  }
  return blocks;
}

CMatrix toeplitz_block(int m, cplx omega, const ToeplitzModel& model) {
  const int reach = std::abs(m);
  return toeplitz_blocks(omega, reach, model).at(m);
}

ToeplitzSystem assemble_system(cplx omega, const std::vector<double>& etas,
                               const ToeplitzModel& model) {
  if (etas.empty() || std::all_of(etas.begin(), etas.end(), [](double e) { return e == 0.0; })) {
    throw ValidationError("toeplitz: all eta are zero, there is no defect to solve for");
  }
  for (double e : etas) {
    if (!(e > -1.0)) throw ValidationError("toeplitz: eta must exceed -1");
  }
  const int M = static_cast<int>(etas.size()) - 1;
  const Eigen::Index d = model.block_size();
  const auto blocks = toeplitz_blocks(omega, M, model);

  CMatrix ht(d * (M + 1), d * (M + 1));
  for (int p = 0; p <= M; ++p) {
    const CMatrix g = defect_block(etas[static_cast<std::size_t>(p)], model);
    for (int q = 0; q <= M; ++q) ht.block(p * d, q * d, d, d) = g * blocks.at(q - p);
  }
  ToeplitzSystem sys;
  sys.etas = etas;
  sys.matrix = CMatrix::Identity(ht.rows(), ht.cols()) - ht;
  return sys;
}

cplx log_determinant(const CMatrix& m) {
  Eigen::PartialPivLU<CMatrix> lu(m);
  const CMatrix& f = lu.matrixLU();
  double log_abs = 0.0;
  double phase = lu.permutationP().determinant() < 0 ? pi : 0.0;
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const cplx u = f(i, i);
    if (u == cplx{}) return {-std::numeric_limits<double>::infinity(), 0.0};
    log_abs += std::log(std::abs(u));
    phase += std::arg(u);
  }
  return {log_abs, std::remainder(phase, 2.0 * pi)};
}

RootResult find_root(cplx guess, const std::vector<double>& etas, const ToeplitzModel& model,
                     const RootOptions& opts) {
  auto logdet = [&](cplx w) { return log_determinant(assemble_system(w, etas, model).matrix); };
  const double dim =
      static_cast<double>(model.block_size()) * static_cast<double>(std::max<std::size_t>(etas.size(), 1));
  const double target = opts.tol * dim;

  RootResult res;
  cplx x0 = guess;
  cplx x1 = guess + 1e-4 * std::max(std::abs(guess), 1e-3);
  cplx l0 = logdet(x0);
  cplx l1 = logdet(x1);
  res.trace = {x0, x1};
  // Third point for the Muller fallback.
  cplx x2_prev = x0, l2_prev = l0;
  bool have_three = false;

  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    res.iterations = it;
    res.omega = x1;
    res.residual = std::exp(l1.real());
    if (res.residual < target) {
      res.converged = true;
      return res;
    }
    // Secant step written with f0/f1 = exp(l0 - l1) so nothing overflows.
    const cplx ratio = std::exp(l0 - l1);
    cplx step = (x1 - x0) / (1.0 - ratio);
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag()) || std::abs(1.0 - ratio) < 1e-14) {
      if (!have_three) break;
      // Muller through (x2_prev, x0, x1) on the raw determinant scaled by f1.
      const cplx f2 = std::exp(l2_prev - l1), f0 = ratio, f1 = 1.0;
      const cplx h0 = x0 - x2_prev, h1 = x1 - x0;
      const cplx d0 = (f0 - f2) / h0, d1 = (f1 - f0) / h1;
      const cplx a = (d1 - d0) / (h1 + h0);
      const cplx b = a * h1 + d1;
      const cplx disc = std::sqrt(b * b - 4.0 * a * f1);
      const cplx den = std::abs(b + disc) > std::abs(b - disc) ? b + disc : b - disc;
      if (den == cplx{}) break;
      step = 2.0 * f1 / den;
    }
    x2_prev = x0;
    l2_prev = l0;
    have_three = true;
    x0 = x1;
    l0 = l1;
    x1 = x1 - step;
    l1 = logdet(x1);
    res.trace.push_back(x1);
  }
  res.omega = x1;
  res.residual = std::exp(l1.real());
  if (res.residual < target) {
    res.converged = true;
    return res;
  }
  throw RootFailure("toeplitz: no root after " + std::to_string(res.iterations) +
                        " iterations (|det| = " + std::to_string(res.residual) + ")",
                    res.residual);
}

}  // namespace locsim
