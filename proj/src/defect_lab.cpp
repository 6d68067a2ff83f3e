#include "locsim/defect_lab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "locsim/errors.hpp"
#include "locsim/rk4.hpp"

namespace locsim {

namespace {

std::string site_name(Site s) {
  return "D_" + std::to_string(s.second + 1) + "^" + std::to_string(s.first);
}

}  // namespace

SpaceDefect::SpaceDefect(std::map<Site, double> eta) {
  for (const auto& [site, value] : eta) set_eta(site, value);
}

void SpaceDefect::set_eta(Site site, double eta) {
  if (!(eta > -1.0) || !std::isfinite(eta)) {
    throw ValidationError("space defect: b = 1 + eta must be positive at " + site_name(site));
  }
  eta_[site] = eta;
}

void SpaceDefect::set_wave_speed(Site site, double v, const MaterialContrast& contrast) {
  if (!(v > 0.0)) throw ValidationError("space defect: wave speed must be positive");
  const double vr = contrast.v_r.at(static_cast<std::size_t>(site.second));
  const double ratio = v / vr;
  set_eta(site, ratio * ratio - 1.0);
}

double SpaceDefect::b(int cell, int resonator) const {
  auto it = eta_.find({cell, resonator});
  return it == eta_.end() ? 1.0 : 1.0 + it->second;
}

bool SpaceDefect::empty() const {
  return std::all_of(eta_.begin(), eta_.end(), [](const auto& kv) { return kv.second == 0.0; });
}

Eigen::Index SupercellSystem::site(int cell, int resonator) const {
  const int n = static_cast<int>(geom_.size());
  if (cell < first_cell_ || cell >= first_cell_ + cells_ || resonator < 0 || resonator >= n) {
    throw ValidationError("supercell: site " + site_name({cell, resonator}) + " is out of range");
  }
  return static_cast<Eigen::Index>((cell - first_cell_) * n + resonator);
}

int SupercellSystem::cell_of(Eigen::Index site) const {
  return first_cell_ + static_cast<int>(site / static_cast<Eigen::Index>(geom_.size()));
}

RVector SupercellSystem::inv_kappa(double t) const {
  const auto n = geom_.size();
  RVector g(dimension());
  const bool defect = time_defect_.has_value();
  const double f = defect ? time_defect_->envelope(t) : 0.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const auto i = static_cast<std::size_t>(k) % n;
    g(k) = profile_.eval_inv(Modulated::InverseKappa, i, t);
    if (defect) g(k) += time_defect_->coefficient(cell_of(k), static_cast<int>(i)) * f;
  }
  return g;
}

RVector SupercellSystem::inv_source(double t) const {
  const auto n = geom_.size();
  RVector s(dimension());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    s(k) = profile_.eval_inv(Modulated::InverseSource, static_cast<std::size_t>(k) % n, t);
  }
  return s;
}

double SupercellSystem::window_start() const {
  return time_defect_ ? time_defect_->t0() - 0.5 * profile_.period() : 0.0;
}

SupercellSystem build_supercell(const ResonatorGeometry& geom, const MaterialContrast& contrast,
                                const ModulationProfile& profile, int cells,
                                const SpaceDefect& space_defect,
                                std::optional<TimeDefect> time_defect, double alpha_sc) {
  if (cells < 1) throw ValidationError("supercell: need at least one cell");
  if (profile.size() != geom.size()) {
    throw ValidationError("supercell: modulation profile and geometry disagree on N");
  }
  contrast.validate(geom.size());
  const int n = static_cast<int>(geom.size());

  SupercellSystem sys(geom, contrast, profile);
  sys.cells_ = cells;
  sys.first_cell_ = -(cells / 2);
  sys.alpha_ = alpha_sc;

  auto check_site = [&](Site s, const char* what) {
    if (s.first < sys.first_cell_ || s.first >= sys.first_cell_ + cells || s.second < 0 ||
        s.second >= n) {
      throw ValidationError(std::string("supercell: ") + what + " at " + site_name(s) +
                            " lies outside cells " + std::to_string(sys.first_cell_) + ".." +
                            std::to_string(sys.first_cell_ + cells - 1));
    }
  };
  for (const auto& kv : space_defect.eta()) check_site(kv.first, "space defect");
  if (time_defect) {
    for (const auto& kv : time_defect->coefficients()) check_site(kv.first, "time defect");
  }
  sys.time_defect_ = std::move(time_defect);

  const Eigen::Index dim = static_cast<Eigen::Index>(cells) * n;
  sys.capacitance_ = CMatrix::Zero(dim, dim);
  const double theta = alpha_sc * cells * geom.period();
  const RMatrix blocks[3] = {realspace_capacitance(geom, -1).entries,
                             realspace_capacitance(geom, 0).entries,
                             realspace_capacitance(geom, 1).entries};
  for (int r = 0; r < cells; ++r) {
    for (int m = -1; m <= 1; ++m) {
      int c = r + m;
      cplx phase{1.0, 0.0};
      if (c < 0) {
        c += cells;
        phase = std::exp(-I_unit * theta);
      } else if (c >= cells) {
        c -= cells;
        phase = std::exp(I_unit * theta);
      }
      sys.capacitance_.block(r * n, c * n, n, n) += phase * blocks[m + 1].cast<cplx>();
    }
  }

  sys.b_.resize(dim);
  sys.weights_.resize(dim);
  for (int r = 0; r < cells; ++r) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Index k = r * n + i;
      const auto ui = static_cast<std::size_t>(i);
      sys.b_(k) = space_defect.b(sys.first_cell_ + r, i);
      sys.weights_(k) = sys.b_(k) * contrast.prefactor(ui) / geom.length(ui);
    }
  }
  return sys;
}

namespace {

double percentile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace

BulkSplit split_bulk(const std::vector<double>& d) {
  if (d.empty()) throw ValidationError("split_bulk: no modes");
  const double p90 = percentile(d, 0.9);
  std::vector<double> bulk;
  for (double x : d) {
    if (x <= p90) bulk.push_back(x);
  }
  BulkSplit out;
  out.bulk_p99 = percentile(bulk, 0.99);
  out.threshold = 2.0 * out.bulk_p99;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d[j] > out.threshold) out.localised.push_back(j);
  }
  return out;
}

double degree_of_localisation(const CVector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw ValidationError("degree_of_localisation: zero vector");
  return v.cwiseAbs().maxCoeff() / norm;
}

StaticModes static_defect_modes(const SupercellSystem& sys) {
  if (!sys.profile().is_static()) {
    throw MisuseError(
        "static_defect_modes: the profile is time modulated, use floquet_defect_spectrum");
  }
  // B Cgen = D C with D > 0 diagonal is similar to the Hermitian D^{1/2} C D^{1/2}.
  const RVector root = sys.weights().cwiseSqrt();
  const CMatrix h = root.asDiagonal() * sys.capacitance() * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("static_defect_modes: eigensolver failed");

  StaticModes out;
  out.omega = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  out.modes = root.asDiagonal() * es.eigenvectors();
  for (Eigen::Index j = 0; j < out.modes.cols(); ++j) {
    out.modes.col(j).normalize();
    out.d.push_back(degree_of_localisation(out.modes.col(j)));
  }
  return out;
}

namespace {

/// Right-hand side of the (u, p) system; works column-wise on any number of states.
class SupercellRhs {
 public:
  explicit SupercellRhs(const SupercellSystem& sys)
      : sys_(sys), coupling_(sys.weights().asDiagonal() * sys.capacitance()) {}

  CMatrix operator()(double t, const CMatrix& y) const {
    const Eigen::Index n = sys_.dimension();
    const RVector g = sys_.inv_kappa(t);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!(g(k) > 0.0)) {
        throw SingularModulationError("evolve: 1/kappa + c f is not positive at site " +
                                          std::to_string(k + 1) + ", t = " + std::to_string(t),
                                      t);
      }
    }
    // S = diag(s) with s = 1 / (1/s).
    const RVector inv_s = sys_.inv_source(t);
    CMatrix dy(2 * n, y.cols());
    dy.topRows(n) = g.cwiseInverse().asDiagonal() * y.bottomRows(n);
    dy.bottomRows(n).noalias() =
        -(inv_s.cwiseInverse().asDiagonal() * (coupling_ * (inv_s.asDiagonal() * y.topRows(n))));
    return dy;
  }

 private:
  const SupercellSystem& sys_;
  CMatrix coupling_;
};

}  // namespace

LocalisationReport floquet_defect_spectrum(const SupercellSystem& sys,
                                           const MonodromyOptions& opts) {
  const Eigen::Index n = sys.dimension();
  const double period = sys.profile().period();
  const SupercellRhs rhs(sys);
  const Monodromy mono = fundamental_matrix(rhs, 2 * n, sys.window_start(), period, opts);

  Eigen::ComplexEigenSolver<CMatrix> es(mono.matrix);
  if (es.info() != Eigen::Success) {
    throw NumericalError("floquet_defect_spectrum: eigen-decomposition failed");
  }
  const auto& mu = es.eigenvalues();
  const double omega_mod = sys.profile().omega();
  std::vector<cplx> all(static_cast<std::size_t>(mu.size()));
  LocalisationReport out;
  out.steps = mono.steps;
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    all[static_cast<std::size_t>(j)] = quasifrequency_from_multiplier(mu(j), period);
    out.multipliers.push_back(mu(j));
  }
  const auto keep = select_representatives(all, static_cast<std::size_t>(n), omega_mod);
  out.modes.resize(n, static_cast<Eigen::Index>(keep.size()));
  out.states.resize(2 * n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto j = static_cast<Eigen::Index>(keep[k]);
    const auto col = static_cast<Eigen::Index>(k);
    cplx w = all[keep[k]];
    w.real(fold_frequency(w.real(), omega_mod));
    out.omega.push_back(w);
    out.lambda.push_back(std::abs(mu(j)));
    out.states.col(col) = es.eigenvectors().col(j);
    out.modes.col(col) = es.eigenvectors().col(j).head(n);
    out.d.push_back(degree_of_localisation(out.modes.col(col)));
  }
  return out;
}

LocalisationReport evolve(const SupercellSystem& sys, const CVector& initial,
                          const EvolveOptions& opts) {
  const Eigen::Index n = sys.dimension();
  if (initial.size() != 2 * n) {
    throw ValidationError("evolve: initial state must have 2 N_tot = " + std::to_string(2 * n) +
                          " entries");
  }
  if (!(opts.t_end > opts.t_start)) throw ValidationError("evolve: need t_end > t_start");
  if (opts.sample_count < 2) throw ValidationError("evolve: need at least two samples");
  if (opts.steps_per_period < 32) throw ValidationError("evolve: need at least 32 steps per period");

  const SupercellRhs rhs(sys);
  const double span = opts.t_end - opts.t_start;
  const double h_max = sys.profile().period() / static_cast<double>(opts.steps_per_period);
  const std::size_t intervals = opts.sample_count - 1;
  const double dt = span / static_cast<double>(intervals);

  std::vector<double> snap = opts.snapshot_times;
  std::sort(snap.begin(), snap.end());
  std::size_t next_snap = 0;

  LocalisationReport out;
  CMatrix y = initial;
  double t = opts.t_start;
  auto record = [&](double now, const CMatrix& state) {
    const CVector u = state.col(0).head(n);
    out.times.push_back(now);
    out.d_star.push_back(degree_of_localisation(u));
  };
  auto snapshot = [&](double now, const CMatrix& state) {
    out.snapshots.emplace_back(now, state.col(0).head(n).cwiseAbs());
  };

  record(t, y);
  for (std::size_t k = 1; k <= intervals; ++k) {
    const double t_next = opts.t_start + dt * static_cast<double>(k);
    // Snapshots inside the interval get their own integration leg.
    while (next_snap < snap.size() && snap[next_snap] <= t_next) {
      const double ts = snap[next_snap++];
      if (ts < t) continue;
      if (ts > t) {
        const auto legs = static_cast<std::size_t>(std::max(1.0, std::ceil((ts - t) / h_max)));
        y = rk4_integrate(rhs, y, t, ts, legs);
        t = ts;
      }
      snapshot(t, y);
    }
    if (t_next > t) {
      const auto legs =
          static_cast<std::size_t>(std::max(1.0, std::ceil((t_next - t) / h_max - 1e-9)));
      y = rk4_integrate(rhs, y, t, t_next, legs);
    }
    t = t_next;
    record(t, y);
  }
  return out;
}

CVector default_initial_state(const SupercellSystem& sys, const LocalisationReport& spectrum) {
  if (spectrum.d.empty()) throw ValidationError("evolve: empty spectrum");
  const auto best = static_cast<Eigen::Index>(
      std::max_element(spectrum.d.begin(), spectrum.d.end()) - spectrum.d.begin());
  const Eigen::Index n = sys.dimension();
  CVector y = CVector::Zero(2 * n);
  y.head(n) = spectrum.modes.col(best).normalized();
  return y;
}

}  // namespace locsim
