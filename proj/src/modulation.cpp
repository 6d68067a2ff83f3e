#include "locsim/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "locsim/errors.hpp"

namespace locsim {

namespace {

std::vector<cplx> cosine_table(double eps, double phase) {
  return {0.5 * eps * std::exp(-I_unit * phase), cplx{1.0, 0.0}, 0.5 * eps * std::exp(I_unit * phase)};
}

void check_eps(double eps, const char* name) {
  if (!(eps >= 0.0) || !(eps < 1.0)) {
    throw ValidationError(std::string("modulation: ") + name + " must lie in [0, 1)");
  }
}

std::vector<double> phases_or_zero(std::vector<double> phases, std::size_t n, const char* name) {
  if (phases.empty()) return std::vector<double>(n, 0.0);
  if (phases.size() != n) {
    throw ValidationError(std::string("modulation: ") + name + " needs one phase per resonator");
  }
  return phases;
}

}  // namespace

ModulationProfile::ModulationProfile(double omega, Table k, Table s)
    : omega_(omega), k_(std::move(k)), s_(std::move(s)) {
  if (!(omega_ > 0.0) || !std::isfinite(omega_)) {
    throw ValidationError("modulation: Omega must be positive");
  }
  if (k_.empty() || k_.size() != s_.size()) {
    throw ValidationError("modulation: need matching, non-empty kappa and s tables");
  }
  const std::size_t width = k_.front().size();
  if (width % 2 == 0) throw ValidationError("modulation: harmonic tables must have odd length");
  order_ = static_cast<int>(width / 2);
  for (const Table* table : {&k_, &s_}) {
    for (const auto& row : *table) {
      if (row.size() != width) throw ValidationError("modulation: ragged harmonic tables");
      for (int n = 0; n <= order_; ++n) {
        const cplx plus = row[static_cast<std::size_t>(order_ + n)];
        const cplx minus = row[static_cast<std::size_t>(order_ - n)];
        const double scale = std::max(1.0, std::abs(plus));
        if (std::abs(plus - std::conj(minus)) > 1e-14 * scale) {
          throw ValidationError("modulation: harmonic tables must be conjugate symmetric");
        }
      }
    }
  }
  static_ = true;
  for (const Table* table : {&k_, &s_}) {
    for (const auto& row : *table) {
      for (int n = 1; n <= order_; ++n) {
        if (row[static_cast<std::size_t>(order_ + n)] != cplx{}) static_ = false;
      }
    }
  }
  for (std::size_t i = 0; i < k_.size(); ++i) {
    if (min_over_period(Modulated::InverseKappa, i) <= 0.0 ||
        min_over_period(Modulated::InverseSource, i) <= 0.0) {
      throw ValidationError("modulation: 1/kappa and 1/s must stay positive (resonator " +
                            std::to_string(i + 1) + ")");
    }
  }
}

ModulationProfile ModulationProfile::from_cosine(double omega_mod, std::size_t resonators,
                                                 double eps_kappa, double eps_s,
                                                 std::vector<double> phase_kappa,
                                                 std::vector<double> phase_s) {
  if (resonators == 0) throw ValidationError("modulation: need at least one resonator");
  check_eps(eps_kappa, "eps_kappa");
  check_eps(eps_s, "eps_s");
  CosineModulation cos{eps_kappa, eps_s,
                       phases_or_zero(std::move(phase_kappa), resonators, "phase_kappa"),
                       phases_or_zero(std::move(phase_s), resonators, "phase_s")};
  Table k(resonators), s(resonators);
  for (std::size_t i = 0; i < resonators; ++i) {
    k[i] = cosine_table(eps_kappa, cos.phase_kappa[i]);
    s[i] = cosine_table(eps_s, cos.phase_s[i]);
  }
  ModulationProfile p(omega_mod, std::move(k), std::move(s));
  p.cosine_ = std::move(cos);
  return p;
}

ModulationProfile ModulationProfile::unmodulated(double omega_mod, std::size_t resonators) {
  return from_cosine(omega_mod, resonators, 0.0, 0.0);
}

ModulationProfile ModulationProfile::from_harmonics(double omega_mod, Table kappa, Table source) {
  return ModulationProfile(omega_mod, std::move(kappa), std::move(source));
}

cplx ModulationProfile::harmonic(Modulated q, std::size_t i, int n) const {
  if (n < -order_ || n > order_) return {};
  const Table& t = q == Modulated::InverseKappa ? k_ : s_;
  return t.at(i)[static_cast<std::size_t>(order_ + n)];
}

double ModulationProfile::eval_inv(Modulated q, std::size_t i, double t,
                                   int derivative_order) const {
  if (derivative_order < 0 || derivative_order > 2) {
    throw ValidationError("modulation: derivative order must be 0, 1 or 2");
  }
  const Table& table = q == Modulated::InverseKappa ? k_ : s_;
  const auto& row = table.at(i);
  cplx acc{};
  for (int n = -order_; n <= order_; ++n) {
    const cplx c = row[static_cast<std::size_t>(order_ + n)];
    if (c == cplx{}) continue;
    // Reduce the phase to one period so t and t + T give identical values.
    const double phase = std::remainder(static_cast<double>(n) * omega_ * t, 2.0 * pi);
    cplx term = c * std::exp(I_unit * phase);
    for (int d = 0; d < derivative_order; ++d) term *= I_unit * (static_cast<double>(n) * omega_);
    acc += term;
  }
  return acc.real();
}

double ModulationProfile::min_over_period(Modulated q, std::size_t i, std::size_t samples) const {
  double lo = eval_inv(q, i, 0.0);
  const double T = period();
  for (std::size_t j = 1; j < samples; ++j) {
    lo = std::min(lo, eval_inv(q, i, T * static_cast<double>(j) / static_cast<double>(samples)));
  }
  return lo;
}

WMatrices w_matrices(const ModulationProfile& profile, const ResonatorGeometry& geom, double t) {
  const std::size_t n = geom.size();
  if (profile.size() != n) {
    throw ValidationError("w_matrices: modulation profile and geometry disagree on N");
  }
  WMatrices w{RVector(n), RVector(n), RVector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double g = profile.eval_inv(Modulated::InverseKappa, i, t, 0);
    if (!(g > 0.0)) {
      throw SingularModulationError(
          "w_matrices: 1/kappa_" + std::to_string(i + 1) + " is not positive", t);
    }
    const double g1 = profile.eval_inv(Modulated::InverseKappa, i, t, 1);
    const double g2 = profile.eval_inv(Modulated::InverseKappa, i, t, 2);
    const double s = 1.0 / profile.eval_inv(Modulated::InverseSource, i, t, 0);
    const double sqrt_kappa = 1.0 / std::sqrt(g);
    const auto k = static_cast<Eigen::Index>(i);
    w.w1(k) = sqrt_kappa * s / geom.length(i);
    w.w2(k) = sqrt_kappa / s;
    w.w3(k) = -g2 / (2.0 * g) + (g1 * g1) / (4.0 * g * g);
  }
  return w;
}

TimeDefect::TimeDefect(std::map<std::pair<int, int>, double> coefficients, double t0)
    : coefficients_(std::move(coefficients)), t0_(t0) {
  if (!(t0_ > 0.0) || !std::isfinite(t0_)) {
    throw ValidationError("time defect: t0 must be positive");
  }
}

double TimeDefect::envelope(double t) const {
  const double x = t / t0_ - 1.0;
  return std::exp(-x * x);
}

double TimeDefect::coefficient(int cell, int resonator) const {
  auto it = coefficients_.find({cell, resonator});
  return it == coefficients_.end() ? 0.0 : it->second;
}

bool TimeDefect::empty() const {
  return std::all_of(coefficients_.begin(), coefficients_.end(),
                     [](const auto& kv) { return kv.second == 0.0; });
}

}  // namespace locsim
