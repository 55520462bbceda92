#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "qcslab/bound.hpp"
#include "qcslab/error.hpp"

using namespace qcslab;

namespace {

BoundParams unit_noise(double ratio) {
  BoundParams p;
  p.n = 1.0;
  p.sigma_n2 = 1.0;
  p.k = 1.0;
  p.sigma_x2 = ratio;
  return p;
}

double reference_inner(int b, double kx, double nn) {
  const double q = std::pow(2.0, -2.0 * b);
  return kx * b * q + nn * b * (1.0 + q);
}

}  // namespace

TEST_CASE("inner term at 35 dB") {
  const BoundParams p = unit_noise(std::pow(10.0, 3.5));
  // Quoted to three decimals; the exact values are 8.3515, 10.6337, 8.3861.
  CHECK(std::abs(bound_inner_term(7, p) - 8.351) <= 2e-3);
  CHECK(std::abs(bound_inner_term(6, p) - 10.632) <= 2e-3);
  CHECK(std::abs(bound_inner_term(8, p) - 8.386) <= 2e-3);
  CHECK(optimal_bitdepth(p).argmin_b == 7);
  for (int b = 2; b <= 12; ++b)
    CHECK(bound_inner_term(b, p) ==
          doctest::Approx(reference_inner(b, std::pow(10.0, 3.5), 1.0)).epsilon(1e-14));
}

TEST_CASE("inner term without noise") {
  BoundParams p;
  p.sigma_n2 = 0.0;
  for (int b = 2; b <= 20; ++b)
    CHECK(bound_inner_term(b, p) == doctest::Approx(p.k * p.sigma_x2 * b * std::pow(4.0, -b)));
  CHECK(optimal_bitdepth(p).argmin_b == 12);
}

TEST_CASE("inner term domain") {
  BoundParams p;
  CHECK_THROWS_AS(bound_inner_term(1, p), Error);
  try {
    bound_inner_term(1, p);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfDomain);
  }
}

TEST_CASE("bound minima at the four reference noise levels") {
  const double isnr[] = {35.0, 20.0, 10.0, 5.0};
  const int expect[] = {7, 5, 2, 2};
  for (int i = 0; i < 4; ++i) {
    const BoundCurve c = optimal_bitdepth(bound_params_for_isnr(isnr[i]), 2, 12);
    CHECK(c.argmin_b == expect[i]);
    CHECK(c.bit_grid.size() == 11);
    CHECK(c.values.size() == 11);
    CHECK(c.boundary_argmin == (expect[i] == 2));
  }
}

TEST_CASE("heavy noise pushes the minimum to the smallest bit depth") {
  const BoundCurve c = optimal_bitdepth(bound_params_for_isnr(-40.0), 3, 12);
  CHECK(c.argmin_b == 3);
  CHECK(c.boundary_argmin);
}

TEST_CASE("single-point grid") {
  const BoundCurve c = optimal_bitdepth(bound_params_for_isnr(20.0), 5, 5);
  CHECK(c.argmin_b == 5);
  CHECK(c.values.size() == 1);
}

TEST_CASE("argmin depends only on the input SNR") {
  Rng rng(1);
  std::uniform_real_distribution<double> isnr(-10.0, 60.0);
  std::uniform_real_distribution<double> logc(-8.0, 8.0);
  for (int rep = 0; rep < 200; ++rep) {
    BoundParams p = bound_params_for_isnr(isnr(rng));
    const int base = optimal_bitdepth(p).argmin_b;
    const double c = std::pow(10.0, logc(rng));
    p.sigma_x2 *= c;
    p.sigma_n2 *= c;
    CHECK(optimal_bitdepth(p).argmin_b == base);
  }
}

TEST_CASE("theorem bound collapses and scales as expected") {
  BoundParams p = bound_params_for_isnr(20.0);
  for (int b = 2; b <= 12; ++b) {
    CHECK(theorem1_bound(b, p) ==
          doctest::Approx(2.0 * p.k / p.budget * bound_inner_term(b, p)).epsilon(1e-14));
    BoundParams dbl = p;
    dbl.budget *= 2.0;
    CHECK(theorem1_bound(b, dbl) == doctest::Approx(theorem1_bound(b, p) / 2.0).epsilon(1e-14));

    BoundParams corr = p;
    corr.corr_s = 1e-4;
    corr.delta = 0.25;
    BoundParams nocorr = corr;
    nocorr.corr_s = 0.0;
    const double extra = corr.k / (1.0 - corr.delta) * (corr.budget / b - 1.0) * corr.corr_s;
    CHECK(theorem1_bound(b, corr) - theorem1_bound(b, nocorr) ==
          doctest::Approx(extra).epsilon(1e-10));
  }
}

TEST_CASE("theorem bound decreases with the budget when measurements are uncorrelated") {
  BoundParams p = bound_params_for_isnr(15.0);
  p.delta = 0.3;
  for (int b = 2; b <= 12; ++b) {
    double prev = std::numeric_limits<double>::infinity();
    for (double budget = 500.0; budget <= 8000.0; budget += 250.0) {
      p.budget = budget;
      const double v = theorem1_bound(b, p);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("full mode with zero correlation is the scaled inner term") {
  BoundParams p = bound_params_for_isnr(35.0);
  p.delta = 0.3;
  const BoundCurve inner = optimal_bitdepth(p, 2, 12, BoundMode::InnerTerm);
  const BoundCurve full = optimal_bitdepth(p, 2, 12, BoundMode::Full);
  const double scale = 2.0 * p.k / (p.budget * (1.0 - p.delta));
  for (size_t i = 0; i < inner.values.size(); ++i)
    CHECK(full.values[i] == doctest::Approx(scale * inner.values[i]).epsilon(1e-14));
  CHECK(full.argmin_b == inner.argmin_b);
}

TEST_CASE("theorem bound rejects invalid RIP constants") {
  BoundParams p;
  p.delta = 1.0;
  CHECK_THROWS_AS(theorem1_bound(4, p), Error);
  p.delta = -0.1;
  CHECK_THROWS_AS(theorem1_bound(4, p), Error);
}

TEST_CASE("envelope examples") {
  CHECK(envelope_optimal_b(1.0, 1.0, 100, 100) == doctest::Approx(0.0));
  CHECK(envelope_optimal_b(4096.0, 1.0, 100, 100) == doctest::Approx(6.0));
  CHECK(envelope_optimal_b(4096.0, 1.0, 25, 100) == doctest::Approx(5.0));
  CHECK(envelope_optimal_b(1.0, 16.0, 100, 100) == doctest::Approx(-2.0));

  CHECK(envelope_regime_relation(64.0, 64.0) == doctest::Approx(2.0 - 6.0));
  CHECK(envelope_regime_relation(37.0, 1.0) == doctest::Approx(74.0));
  CHECK(envelope_regime_relation(3000.0, 1000.0) == doctest::Approx(-3.965784).epsilon(1e-6));
}

TEST_CASE("correlation estimate examples") {
  Matrix c = Matrix::Constant(10, 3, 1.5);
  CHECK(estimate_corr_s(c) == doctest::Approx(2.25));

  Matrix anti(10, 2);
  anti.col(0).setConstant(0.5);
  anti.col(1).setConstant(-0.5);
  CHECK(estimate_corr_s(anti) == doctest::Approx(0.25));

  Rng rng(2);
  std::normal_distribution<double> g;
  Matrix ind(20000, 8);
  for (Index i = 0; i < ind.rows(); ++i)
    for (Index j = 0; j < ind.cols(); ++j) ind(i, j) = g(rng);
  CHECK(estimate_corr_s(ind) < 0.04);

  CHECK_THROWS_AS(estimate_corr_s(Matrix::Ones(1, 3)), Error);
  CHECK_THROWS_AS(estimate_corr_s(Matrix::Ones(5, 1)), Error);
}

TEST_CASE("rip estimate examples") {
  Rng rng(3);
  SensingMatrix eye;
  eye.entries = Matrix::Identity(30, 30);
  CHECK(estimate_rip_delta(eye, 5, 50, rng) == doctest::Approx(0.0));

  SensingMatrix phi = gen_gaussian_matrix(40, 60, rng);
  double expect = 0.0;
  for (Index j = 0; j < 60; ++j) expect = std::max(expect, std::abs(phi.entries.col(j).squaredNorm() - 1.0));
  // Every column is visited with enough single-column draws.
  CHECK(estimate_rip_delta(phi, 1, 5000, rng) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("rip estimate grows with the order") {
  Rng rng(4);
  const SensingMatrix phi = gen_gaussian_matrix(200, 1000, rng);
  double prev = 0.0;
  for (Index k : {5, 10, 20}) {
    Rng r(100);
    const double d = estimate_rip_delta(phi, k, 500, r);
    CHECK(d > 0.0);
    CHECK(d < 1.0);
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("lemma bound examples") {
  CHECK(lemma1_error_bound(0.5, 0.0, 300, 10, 0.2) == doctest::Approx(10 * 0.5 / 0.8));
  CHECK(lemma1_error_bound(0.5, 0.3, 1, 10, 0.2) == doctest::Approx(10 * 0.5 / 0.8));
  CHECK(lemma1_error_bound(1.0, 0.1, 3, 1, 0.0) == doctest::Approx(1.2));
}

TEST_CASE("lemma bound with zero correlation is the upper oracle band") {
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double s2 = 0.01 + u(rng);
    const double k = 1 + std::floor(50 * u(rng));
    const double d = 0.99 * u(rng);
    CHECK(lemma1_error_bound(s2, 0.0, 1 + std::floor(500 * u(rng)), k, d) ==
          doctest::Approx(k * s2 / (1.0 - d)).epsilon(1e-15));
  }
}

TEST_CASE("gershgorin estimate dominates the largest eigenvalue") {
  Matrix sigma(3, 3);
  sigma << 1.0, 0.1, -0.1, 0.1, 1.0, 0.1, -0.1, 0.1, 1.0;
  const double lmax = Eigen::SelfAdjointEigenSolver<Matrix>(sigma).eigenvalues().maxCoeff();
  CHECK(lmax <= 1.2 + 1e-15);
  CHECK(lemma1_error_bound(1.0, 0.1, 3, 1, 0.0) >= lmax);

  Rng rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const Index m = 2 + static_cast<Index>(rng() % 40);
    const double s2 = 0.1 + std::abs(u(rng));
    const double corr = 0.2 * std::abs(u(rng)) * s2;
    Matrix a = Matrix::Constant(m, m, 0.0);
    for (Index i = 0; i < m; ++i) {
      a(i, i) = s2;
      for (Index j = i + 1; j < m; ++j) a(i, j) = a(j, i) = corr * u(rng);
    }
    const double top = Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues().maxCoeff();
    CHECK(top <= s2 + (m - 1) * corr + 1e-12);
    CHECK(lemma1_error_bound(s2, corr, static_cast<double>(m), 1.0, 0.0) >= top - 1e-12);
  }
}
