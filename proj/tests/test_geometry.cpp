#include <cmath>
#include <random>

#include "doctest.h"
#include "locsim/errors.hpp"
#include "locsim/geometry.hpp"

using namespace locsim;

namespace {

ResonatorGeometry three_cell() { return ResonatorGeometry::build({1, 1, 1}, {1, 2, 1}); }

// Flux balance on each resonator: V_j is 1 on D_j, 0 on the other resonators of
// the cell and Bloch-phased in neighbouring cells, linear in the gaps.
CMatrix flux_capacitance(const std::vector<double>& gaps, double alpha, double L) {
  const int n = static_cast<int>(gaps.size());
  CMatrix c = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double gl = gaps[(i + n - 1) % n], gr = gaps[i];
    for (int j = 0; j < n; ++j) {
      const cplx self = i == j ? 1.0 : 0.0;
      // left neighbour is resonator i-1, or the last one of the previous cell
      const int li = i == 0 ? n - 1 : i - 1;
      const cplx left = li == j ? (i == 0 ? std::exp(-I_unit * alpha * L) : cplx(1.0)) : cplx(0.0);
      const int ri = i == n - 1 ? 0 : i + 1;
      const cplx right =
          ri == j ? (i == n - 1 ? std::exp(I_unit * alpha * L) : cplx(1.0)) : cplx(0.0);
      c(i, j) = (self - left) / gl + (self - right) / gr;
    }
  }
  return c;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("geometry: period and resonator endpoints") {
  CHECK(three_cell().period() == doctest::Approx(7.0));
  const auto one = ResonatorGeometry::build({1}, {1});
  CHECK(one.period() == doctest::Approx(2.0));
  CHECK(one.left(0) == doctest::Approx(0.0));
  CHECK(one.right(0) == doctest::Approx(1.0));
  const auto two = ResonatorGeometry::build({0.5, 0.5}, {0.25, 0.75});
  CHECK(two.period() == doctest::Approx(2.0));
  CHECK(two.left(1) == doctest::Approx(0.75));
  CHECK(two.right(1) == doctest::Approx(1.25));
}

TEST_CASE("geometry: invalid input is rejected") {
  CHECK_THROWS_AS(ResonatorGeometry::build({}, {}), ValidationError);
  CHECK_THROWS_AS(ResonatorGeometry::build({1, -1}, {1, 1}), ValidationError);
  CHECK_THROWS_AS(ResonatorGeometry::build({1, 1}, {1, 0}), ValidationError);
  CHECK_THROWS_AS(ResonatorGeometry::build({1, 1}, {1}), ValidationError);
}

TEST_CASE("capacitance: N = 1 closed form for 100 random alpha") {
  const auto g = ResonatorGeometry::build({1}, {1});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-pi / 2, pi / 2);
  for (int k = 0; k < 100; ++k) {
    const double a = u(rng);
    const auto c = quasiperiodic_capacitance(g, a).entries(0, 0);
    CHECK(std::abs(c - (2.0 - 2.0 * std::cos(a * 2.0))) < 1e-12);
  }
}

TEST_CASE("capacitance: matches the flux-balance construction") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& gaps : {std::vector<double>{1, 2}, std::vector<double>{1, 2, 1},
                           std::vector<double>{0.5, 1.5, 2.0, 0.75}}) {
    const auto g = ResonatorGeometry::build(std::vector<double>(gaps.size(), 1.0), gaps);
    for (int k = 0; k < 16; ++k) {
      const double a = u(rng) * g.zone_edge();
      CHECK(max_abs(quasiperiodic_capacitance(g, a).entries -
                    flux_capacitance(gaps, a, g.period())) < 1e-12);
    }
  }
  // the N = 2 zone-edge example
  const auto g2 = ResonatorGeometry::build({1, 1}, {1, 2});
  const auto c = quasiperiodic_capacitance(g2, pi / g2.period()).entries;
  CHECK(std::abs(c(0, 0) - 1.5) < 1e-12);
  CHECK(std::abs(c(0, 1) - cplx(-1.0 + 0.5)) < 1e-12);
}

TEST_CASE("capacitance: Hermitian, zero row sums at alpha = 0") {
  const auto g = three_cell();
  for (double a : {-0.4, -0.1, 0.0, 0.2, pi / 7}) {
    const CMatrix c = quasiperiodic_capacitance(g, a).entries;
    CHECK(max_abs(c - c.adjoint()) < 1e-12);
  }
  const CMatrix c0 = quasiperiodic_capacitance(g, 0.0).entries;
  CHECK(c0.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generalised capacitance: N = 1 value, delta = 0, real spectrum") {
  const auto g1 = ResonatorGeometry::build({1}, {1});
  const auto c1 = MaterialContrast::uniform(1, 1e-4);
  CHECK(std::abs(generalised_capacitance(g1, c1, 0.3)(0, 0) - 1e-4 * (2 - 2 * std::cos(0.6))) <
        1e-16);

  const auto g = three_cell();
  CHECK(max_abs(generalised_capacitance(g, MaterialContrast::uniform(3, 0.0), 0.2)) == 0.0);

  const auto c3 = MaterialContrast::uniform(3, 1e-4);
  for (double a : {0.0, 0.1, pi / g.period()}) {
    Eigen::ComplexEigenSolver<CMatrix> es(generalised_capacitance(g, c3, a));
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(std::abs(es.eigenvalues()(j).imag()) < 1e-10 * 1e-4);
      CHECK(es.eigenvalues()(j).real() > -1e-16);
    }
  }
}

TEST_CASE("real-space blocks: support, values and transform consistency") {
  const auto g = three_cell();
  CHECK(realspace_capacitance(g, 2).entries.cwiseAbs().maxCoeff() == 0.0);
  CHECK(realspace_capacitance(g, -3).entries.cwiseAbs().maxCoeff() == 0.0);

  const auto one = ResonatorGeometry::build({1}, {1});
  CHECK(realspace_capacitance(one, 0).entries(0, 0) == doctest::Approx(2.0));

  // C^{+1} carries the (N,1) coupling in the e^{+i alpha m L} convention.
  const RMatrix p1 = realspace_capacitance(g, 1).entries;
  CHECK(p1(2, 0) == doctest::Approx(-1.0));
  CHECK(p1.cwiseAbs().sum() == doctest::Approx(1.0));
  const RMatrix m1 = realspace_capacitance(g, -1).entries;
  CHECK(m1(0, 2) == doctest::Approx(-1.0));

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 64; ++k) {
    const double a = u(rng) * g.zone_edge();
    CMatrix sum = CMatrix::Zero(3, 3);
    for (int m = -1; m <= 1; ++m) {
      sum += realspace_capacitance(g, m).entries.cast<cplx>() * std::exp(I_unit * a * (m * 7.0));
    }
    CHECK(max_abs(sum - quasiperiodic_capacitance(g, a).entries) < 1e-10);
  }
}

TEST_CASE("Floquet-Bloch: constant transform of a single block") {
  BlockSequence f{{0, CVector::Constant(2, cplx(1.5, -0.5))}};
  const auto F = floquet_bloch(f, 2.0);
  for (double a : {-1.0, 0.0, 0.7}) CHECK((F(a) - f[0]).norm() < 1e-15);
}

TEST_CASE("Floquet-Bloch: round trip on 257 nodes") {
  const double L = 2.0;
  CVector f0(2), f1(2);
  f0 << 1, 2;
  f1 << 0, 1;
  const auto F = floquet_bloch({{0, f0}, {1, f1}}, L);
  const auto grid = zone_grid(L, 257);
  std::vector<CVector> samples;
  for (double a : grid) samples.push_back(F(a));
  double err = 0.0;
  for (int m = -3; m <= 3; ++m) {
    const CVector back = inverse_floquet_bloch(grid, samples, m, L);
    const CVector expect = m == 0 ? f0 : m == 1 ? f1 : CVector::Zero(2);
    err = std::max(err, (back - expect).cwiseAbs().maxCoeff());
  }
  CHECK(err < 1e-10);
}

TEST_CASE("Floquet-Bloch: non-uniform grid is rejected") {
  std::vector<double> grid{-1.0, -0.2, 0.5, 1.0};
  std::vector<CVector> samples(4, CVector::Ones(1));
  CHECK_THROWS_AS(inverse_floquet_bloch(grid, samples, 0, pi), ValidationError);
}
