#include "locsim/floquet_band.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>

#include <Eigen/Eigenvalues>

namespace locsim {

FloquetProblem::FloquetProblem(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                               ModulationProfile profile, double alpha)
    : geom_(geom), alpha_(geom.fold_alpha(alpha)), profile_(std::move(profile)) {
  if (profile_.size() != geom.size()) {
    throw ValidationError("assemble_floquet: modulation profile and geometry disagree on N");
  }
  contrast.validate(geom.size());
  scaled_ = quasiperiodic_capacitance(geom, alpha_).entries;
  for (Eigen::Index i = 0; i < scaled_.rows(); ++i) {
    scaled_.row(i) *= contrast.prefactor(static_cast<std::size_t>(i));
  }
  generalised_ = locsim::generalised_capacitance(geom, contrast, alpha_);
}

CMatrix FloquetProblem::coefficient(double t) const {
  const WMatrices w = w_matrices(profile_, geom_, t);
  CMatrix m = w.w1.asDiagonal() * scaled_ * w.w2.asDiagonal();
  m.diagonal() += w.w3.cast<cplx>();
  return m;
}

FloquetProblem assemble_floquet(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                                const ModulationProfile& profile, double alpha) {
  return FloquetProblem(geom, contrast, profile, alpha);
}

Monodromy monodromy(const FloquetProblem& problem, const MonodromyOptions& opts) {
  const Eigen::Index n = problem.dimension();
  auto rhs = [&problem, n](double t, const CMatrix& y) {
    CMatrix dy(2 * n, y.cols());
    dy.topRows(n) = y.bottomRows(n);
    dy.bottomRows(n).noalias() = -problem.coefficient(t) * y.topRows(n);
    return dy;
  };
  return fundamental_matrix(rhs, 2 * n, 0.0, problem.period(), opts);
}

cplx quasifrequency_from_multiplier(cplx mu, double period) {
  return std::log(mu) / (I_unit * period);
}

double fold_frequency(double omega, double omega_mod) {
  double r = std::fmod(omega + 0.5 * omega_mod, omega_mod);
  if (r <= 0.0) r += omega_mod;
  return r - 0.5 * omega_mod;
}

namespace {

// Values within this fraction of Omega of 0 or Omega/2 count as ties.
constexpr double kTieTolerance = 1e-8;

cplx normalise_branch(cplx w, double omega_mod) {
  if (w.real() <= -0.5 * omega_mod + kTieTolerance * omega_mod) w += omega_mod;
  return w;
}

}  // namespace

std::vector<std::size_t> select_representatives(std::span<const cplx> omegas, std::size_t keep,
                                                double omega_mod) {
  const double tol = kTieTolerance * omega_mod;
  const double half = 0.5 * omega_mod;
  std::vector<std::size_t> chosen;
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    const cplx w = normalise_branch(omegas[j], omega_mod);
    const bool tie = std::abs(w.real()) <= tol || w.real() >= half - tol;
    if (tie ? w.imag() >= 0.0 : w.real() > 0.0) chosen.push_back(j);
  }
  if (chosen.size() == keep) return chosen;

  // Degenerate ties can leave the count off by one; fall back to ordering.
  std::vector<std::size_t> order(omegas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const cplx wa = normalise_branch(omegas[a], omega_mod);
    const cplx wb = normalise_branch(omegas[b], omega_mod);
    if (wa.real() != wb.real()) return wa.real() > wb.real();
    return wa.imag() > wb.imag();
  });
  order.resize(std::min(keep, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<cplx> quasifrequencies(const Monodromy& mono, double omega_mod) {
  Eigen::ComplexEigenSolver<CMatrix> es(mono.matrix, false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("quasifrequencies: eigen-decomposition of the monodromy failed");
  }
  const auto& mu = es.eigenvalues();
  std::vector<cplx> all(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    all[static_cast<std::size_t>(j)] =
        normalise_branch(quasifrequency_from_multiplier(mu(j), mono.period), omega_mod);
  }
  const auto idx = select_representatives(all, all.size() / 2, omega_mod);
  std::vector<cplx> out;
  out.reserve(idx.size());
  for (auto j : idx) out.push_back(all[j]);
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

std::vector<double> sweep_grid(const ResonatorGeometry& geom, std::size_t count) {
  if (count < 2) throw ValidationError("band_sweep: alpha_count must be at least 2");
  return zone_grid(geom.period(), count);
}

namespace {

struct AlphaResult {
  std::vector<cplx> omegas;
  double det_error = 0.0;
  std::size_t steps = 0;
};

AlphaResult solve_alpha(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                        const ModulationProfile& profile, double alpha,
                        const MonodromyOptions& opts) {
  const FloquetProblem problem(geom, contrast, profile, alpha);
  const Monodromy mono = monodromy(problem, opts);
  return {quasifrequencies(mono, profile.omega()), std::abs(mono.determinant - 1.0), mono.steps};
}

BandStructure collect(std::vector<double> grid, std::vector<AlphaResult> results, double omega) {
  BandStructure out;
  out.alpha_grid = std::move(grid);
  out.omega_mod = omega;
  for (auto& r : results) {
    out.bands.push_back(std::move(r.omegas));
    out.det_errors.push_back(r.det_error);
    out.steps.push_back(r.steps);
  }
  match_bands(out);
  return out;
}

[[noreturn]] void rethrow_with_alpha(const std::exception_ptr& ep, double alpha) {
  const std::string where = " (alpha = " + std::to_string(alpha) + ")";
  try {
    std::rethrow_exception(ep);
  } catch (const IntegrationAccuracyError& e) {
    throw IntegrationAccuracyError(e.what() + where);
  } catch (const NumericalError& e) {
    throw NumericalError(e.what() + where);
  }
}

}  // namespace

BandStructure band_sweep_serial(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                                const ModulationProfile& profile, std::size_t alpha_count,
                                const MonodromyOptions& opts) {
  auto grid = sweep_grid(geom, alpha_count);
  std::vector<AlphaResult> results(grid.size());
  for (std::size_t a = 0; a < grid.size(); ++a) {
    try {
      results[a] = solve_alpha(geom, contrast, profile, grid[a], opts);
    } catch (const NumericalError&) {
      rethrow_with_alpha(std::current_exception(), grid[a]);
    }
  }
  return collect(std::move(grid), std::move(results), profile.omega());
}

BandStructure band_sweep(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                         const ModulationProfile& profile, std::size_t alpha_count,
                         const MonodromyOptions& opts) {
  auto grid = sweep_grid(geom, alpha_count);
  const auto count = static_cast<long>(grid.size());
  std::vector<AlphaResult> results(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());

#pragma omp parallel for schedule(dynamic)
  for (long a = 0; a < count; ++a) {
    const auto k = static_cast<std::size_t>(a);
    try {
      results[k] = solve_alpha(geom, contrast, profile, grid[k], opts);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }

  for (std::size_t a = 0; a < errors.size(); ++a) {
    if (!errors[a]) continue;
    try {
      std::rethrow_exception(errors[a]);
    } catch (const NumericalError&) {
      rethrow_with_alpha(errors[a], grid[a]);
    }
  }
  return collect(std::move(grid), std::move(results), profile.omega());
}

void match_bands(BandStructure& bs) {
  const std::size_t n = bs.band_count();
  if (n < 2) return;
  std::vector<std::size_t> perm(n), best(n);
  for (std::size_t a = 1; a < bs.bands.size(); ++a) {
    const auto& prev = bs.bands[a - 1];
    const auto& cur = bs.bands[a];
    auto cost = [&](const std::vector<std::size_t>& p) {
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) c += std::abs(cur[p[j]] - prev[j]);
      return c;
    };
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    if (n <= 7) {
      double best_cost = std::numeric_limits<double>::infinity();
      do {
        const double c = cost(perm);
        if (c < best_cost) {
          best_cost = c;
          best = perm;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
      std::vector<bool> used(n, false);
      for (std::size_t j = 0; j < n; ++j) {
        std::size_t pick = n;
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
          if (!used[k] && std::abs(cur[k] - prev[j]) < d) {
            d = std::abs(cur[k] - prev[j]);
            pick = k;
          }
        }
        used[pick] = true;
        best[j] = pick;
      }
    }
    std::vector<cplx> reordered(n);
    for (std::size_t j = 0; j < n; ++j) reordered[j] = cur[best[j]];
    bs.bands[a] = std::move(reordered);
  }
}

std::vector<Interval> detect_band_gaps(const BandStructure& bs, const GapOptions& opts) {
  const std::size_t n = bs.band_count();
  std::vector<Interval> gaps;
  if (n < 2) return gaps;
  const double im_tol = opts.im_tol * bs.omega_mod;
  const double gap_tol = opts.gap_tol * bs.omega_mod;

  // Real extent of each band over the alphas where it propagates (Im ~ 0).
  struct Extent {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double mean = 0.0;
  };
  std::vector<Extent> ext(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t used = 0;
    for (const auto& row : bs.bands) {
      ext[j].mean += row[j].real();
      if (std::abs(row[j].imag()) > im_tol) continue;
      ext[j].lo = std::min(ext[j].lo, row[j].real());
      ext[j].hi = std::max(ext[j].hi, row[j].real());
      ++used;
    }
    ext[j].mean /= static_cast<double>(bs.bands.size());
    if (used == 0) ext[j].lo = ext[j].hi = std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ext[a].mean < ext[b].mean; });
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Extent& lower = ext[order[k]];
    const Extent& upper = ext[order[k + 1]];
    if (std::isnan(lower.hi) || std::isnan(upper.lo)) continue;
    if (upper.lo - lower.hi > gap_tol) gaps.push_back({lower.hi, upper.lo});
  }
  return gaps;
}

std::vector<Interval> detect_momentum_gaps(const BandStructure& bs, const GapOptions& opts) {
  const double im_tol = opts.im_tol * bs.omega_mod;
  std::vector<Interval> gaps;
  std::optional<Interval> run;
  for (std::size_t a = 0; a < bs.bands.size(); ++a) {
    double worst = 0.0;
    for (const auto& w : bs.bands[a]) worst = std::max(worst, std::abs(w.imag()));
    if (worst > im_tol) {
      if (!run) run = Interval{bs.alpha_grid[a], bs.alpha_grid[a]};
      run->hi = bs.alpha_grid[a];
    } else if (run) {
      gaps.push_back(*run);
      run.reset();
    }
  }
  if (run) gaps.push_back(*run);
  return gaps;
}

}  // namespace locsim
