#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "qcslab/error.hpp"
#include "qcslab/quantize.hpp"

using namespace qcslab;
using qcslab::test::gaussian_integral;
using qcslab::test::integrate;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Vector gaussian_samples(Index n, double sigma, Rng& rng) {
  std::normal_distribution<double> g(0.0, sigma);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

}  // namespace

TEST_CASE("dynamic range examples") {
  CHECK(dynamic_range(vec({-0.2, 0.7, -0.9})) == 0.9);
  try {
    dynamic_range(vec({0.0}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateRange);
  }
}

TEST_CASE("dynamic range of gaussian vectors follows the order statistics") {
  // E[max |g_i|] = integral over t > 0 of 1 - (2 Phi(t) - 1)^n.
  auto expected_max = [](int n) {
    return integrate(
        [n](double t) { return 1.0 - std::pow(std::erf(t / std::numbers::sqrt2), n); }, 0.0,
        12.0, 1e-10);
  };
  Rng rng(31);
  double prev = 0.0;
  for (int n : {300, 3000}) {
    const int reps = 400;
    double s = 0.0;
    double s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const double t = dynamic_range(gaussian_samples(n, 1.0, rng));
      s += t;
      s2 += t * t;
    }
    const double mean = s / reps;
    const double se = std::sqrt((s2 / reps - mean * mean) / reps);
    CHECK(std::abs(mean - expected_max(n)) <= 4.0 * se);
    CHECK(mean > prev);
    prev = mean;
  }
}

TEST_CASE("uniform quantizer examples") {
  CHECK(uniform_quantize(vec({0.3}), 1.0, 2)(0) == doctest::Approx(0.25));
  CHECK(uniform_quantize(vec({5.0}), 1.0, 2)(0) == doctest::Approx(0.75));
  CHECK(uniform_quantize(vec({-5.0}), 1.0, 2)(0) == doctest::Approx(-0.75));
  CHECK(UniformQuantizer{1.0, 3}.step() == 0.25);
  CHECK_THROWS_AS(uniform_quantize(vec({std::nan("")}), 1.0, 2), Error);
  CHECK_THROWS_AS(uniform_quantize(vec({std::numeric_limits<double>::infinity()}), 1.0, 2),
                  Error);
  CHECK_THROWS_AS(uniform_quantize(vec({0.1}), 1.0, 0), Error);
  CHECK_THROWS_AS(uniform_quantize(vec({0.1}), 1.0, 33), Error);
  CHECK_THROWS_AS(uniform_quantize(vec({0.1}), 0.0, 3), Error);
}

TEST_CASE("uniform quantizer error is at most half a step on an exhaustive grid") {
  for (int bits = 1; bits <= 8; ++bits) {
    for (double range : {1.0, 0.37, 12.5}) {
      const double step = range * std::ldexp(1.0, 1 - bits);
      const int cells = 1 << bits;
      const int per_cell = 64;
      // Every cell boundary, points just either side of it, and a dense
      // interior grid.
      std::vector<double> pts;
      for (int c = 0; c <= cells; ++c) {
        const double edge = -range + step * c;
        pts.push_back(edge);
        pts.push_back(std::nextafter(edge, -1e300));
        pts.push_back(std::nextafter(edge, 1e300));
        if (c < cells)
          for (int j = 1; j < per_cell; ++j) pts.push_back(edge + step * j / per_cell);
      }
      Vector v(static_cast<Index>(pts.size()));
      for (Index i = 0; i < v.size(); ++i) v(i) = std::clamp(pts[static_cast<size_t>(i)], -range, range);
      const Vector q = uniform_quantize(v, range, bits);
      double worst = 0.0;
      std::set<double> alphabet;
      for (Index i = 0; i < v.size(); ++i) {
        worst = std::max(worst, std::abs(v(i) - q(i)));
        alphabet.insert(q(i));
        // The output must be a cell midpoint.
        const double idx = (q(i) + range) / step - 0.5;
        CHECK(std::abs(idx - std::round(idx)) <= 1e-9);
      }
      CHECK(worst <= step / 2.0 * (1.0 + 1e-12));
      CHECK(alphabet.size() <= static_cast<size_t>(cells));
      CHECK(alphabet.size() == static_cast<size_t>(cells));
    }
  }
}

TEST_CASE("uniform quantizer is idempotent and saturates") {
  Rng rng(4);
  for (int bits = 1; bits <= 12; ++bits) {
    const Vector v = gaussian_samples(500, 2.0, rng);
    const Vector q = uniform_quantize(v, 3.0, bits);
    CHECK(uniform_quantize(q, 3.0, bits) == q);
    const double step = 3.0 * std::ldexp(1.0, 1 - bits);
    CHECK(q.cwiseAbs().maxCoeff() <= 3.0 - step / 2.0 + 1e-12);
  }
}

TEST_CASE("uniform quantizer at 32 bits stays within half a step") {
  Rng rng(5);
  const Vector v = gaussian_samples(1000, 1.0, rng);
  const double range = dynamic_range(v);
  const Vector q = uniform_quantize(v, range, 32);
  CHECK((v - q).cwiseAbs().maxCoeff() <= range * std::ldexp(1.0, -32) * (1.0 + 1e-6));
}

TEST_CASE("lloyd-max one bit matches the half-gaussian mean") {
  const LloydMaxResult r = lloyd_max(1, 1.0);
  const double c = std::sqrt(2.0 / std::numbers::pi);
  REQUIRE(r.quantizer.levels.size() == 2);
  CHECK(std::abs(r.quantizer.levels[0] + c) <= 1e-6);
  CHECK(std::abs(r.quantizer.levels[1] - c) <= 1e-6);
  CHECK(std::abs(r.quantizer.thresholds[0]) <= 1e-12);
  CHECK(r.converged);
  CHECK(r.quantizer.bits() == 1);
  CHECK(r.distortion == doctest::Approx(1.0 - 2.0 / std::numbers::pi).epsilon(1e-9));

  const LloydMaxResult r4 = lloyd_max(1, 4.0);
  CHECK(r4.quantizer.levels[1] == doctest::Approx(2.0 * r.quantizer.levels[1]).epsilon(1e-9));
  CHECK(r4.distortion == doctest::Approx(4.0 * r.distortion).epsilon(1e-9));
}

TEST_CASE("lloyd-max fixed points satisfy the centroid and midpoint conditions") {
  for (int bits = 1; bits <= 5; ++bits) {
    CAPTURE(bits);
    const LloydMaxResult r = lloyd_max(bits, 1.0, 1e-12);
    CHECK(r.converged);
    const auto& lv = r.quantizer.levels;
    const auto& th = r.quantizer.thresholds;
    REQUIRE(lv.size() == (size_t{1} << bits));
    for (size_t i = 0; i < th.size(); ++i)
      CHECK(std::abs(th[i] - 0.5 * (lv[i] + lv[i + 1])) <= 1e-12);

    double mse = 0.0;
    for (size_t i = 0; i < lv.size(); ++i) {
      const double a = i == 0 ? -std::numeric_limits<double>::infinity() : th[i - 1];
      const double b = i + 1 == lv.size() ? std::numeric_limits<double>::infinity() : th[i];
      const double mass = gaussian_integral([](double) { return 1.0; }, a, b);
      const double first = gaussian_integral([](double t) { return t; }, a, b);
      CHECK(std::abs(first / mass - lv[i]) <= 1e-7);
      const double c = lv[i];
      mse += gaussian_integral([c](double t) { return (t - c) * (t - c); }, a, b);
    }
    CHECK(std::abs(mse - r.distortion) <= 1e-9);
    CHECK(std::abs(gaussian_distortion(r.quantizer, 1.0) - r.distortion) <= 1e-12);
  }
}

TEST_CASE("lloyd-max two bit distortion") {
  const LloydMaxResult r = lloyd_max(2, 1.0);
  CHECK(std::abs(r.distortion - 0.1175) <= 1e-4);
  CHECK(r.quantizer.levels[3] == doctest::Approx(1.510).epsilon(1e-3));
  CHECK(r.quantizer.thresholds[2] == doctest::Approx(0.9816).epsilon(1e-3));
}

TEST_CASE("lloyd-max distortion is non-increasing across iterations") {
  for (int bits : {2, 3, 5}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= 40; ++it) {
      const LloydMaxResult r = lloyd_max(bits, 1.0, 0.0, it);
      CHECK(r.distortion <= prev * (1.0 + 1e-14));
      prev = r.distortion;
    }
  }
  const LloydMaxResult capped = lloyd_max(4, 1.0, 0.0, 3);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 3);
}

TEST_CASE("lloyd-max distortion strictly decreases with bit depth") {
  double prev = std::numeric_limits<double>::infinity();
  for (int bits = 1; bits <= 8; ++bits) {
    const double d = lloyd_max(bits, 1.0).distortion;
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("empirical lloyd-max distortion on a million samples decreases with bit depth") {
  Rng rng(100);
  const Vector v = gaussian_samples(1000000, 1.0, rng);
  double prev = std::numeric_limits<double>::infinity();
  for (int bits = 1; bits <= 8; ++bits) {
    const double d = distortion(v, apply_codebook(v, lloyd_max(bits, 1.0).quantizer));
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("lloyd-max beats a uniform quantizer on [-4 sigma, 4 sigma]") {
  Rng rng(7);
  const double sigma = 1.7;
  const Vector v = gaussian_samples(200000, sigma, rng);
  for (int bits = 1; bits <= 6; ++bits) {
    const double lm = distortion(v, apply_codebook(v, lloyd_max(bits, sigma * sigma).quantizer));
    const double un = distortion(v, uniform_quantize(v, 4.0 * sigma, bits));
    CHECK(lm <= un);
  }
}

TEST_CASE("apply_codebook examples") {
  const Vector s = apply_codebook(vec({-0.1, 0.0, 2.0}), SignQuantizer{});
  CHECK(s == vec({-1.0, 1.0, 1.0}));

  const Vector l = apply_codebook(vec({0.3}), lloyd_max(1, 1.0).quantizer);
  CHECK(l(0) == doctest::Approx(0.7979).epsilon(1e-4));

  const Vector u = apply_codebook(vec({-1.0}), UniformQuantizer{1.0, 3});
  CHECK(u(0) == doctest::Approx(-0.875));
}

TEST_CASE("lloyd-max codebook maps to the nearest level") {
  Rng rng(8);
  const LloydMaxQuantizer q = lloyd_max(3, 1.0).quantizer;
  const Vector v = gaussian_samples(5000, 1.3, rng);
  const Vector out = apply_codebook(v, q);
  for (Index i = 0; i < v.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (double l : q.levels) best = std::min(best, std::abs(v(i) - l));
    CHECK(std::abs(v(i) - out(i)) == doctest::Approx(best).epsilon(1e-15));
  }
}

TEST_CASE("sign quantizer commutes with positive scaling") {
  Rng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    Vector v = gaussian_samples(64, 1.0, rng);
    v(0) = 0.0;
    const double c = std::exp(std::uniform_real_distribution<double>(-20.0, 20.0)(rng));
    CHECK(apply_codebook(c * v, SignQuantizer{}) == apply_codebook(v, SignQuantizer{}));
  }
}

TEST_CASE("codebook validation") {
  CHECK_NOTHROW(validate(QuantizerSpec{UniformQuantizer{1.0, 8}}));
  CHECK_THROWS_AS(validate(QuantizerSpec{UniformQuantizer{-1.0, 8}}), Error);
  LloydMaxQuantizer bad;
  bad.levels = {1.0, 0.0};
  bad.thresholds = {0.5};
  CHECK_THROWS_AS(validate(QuantizerSpec{bad}), Error);
  bad.levels = {0.0, 1.0, 2.0};
  bad.thresholds = {0.5, 1.5};
  CHECK_THROWS_AS(validate(QuantizerSpec{bad}), Error);
}

TEST_CASE("distortion examples") {
  CHECK(distortion(vec({1.0, 2.0}), vec({1.0, 2.0})) == 0.0);
  CHECK(distortion(vec({1.0, -1.0}), vec({0.0, 0.0})) == 1.0);
  CHECK_THROWS_AS(distortion(vec({1.0}), vec({1.0, 2.0})), Error);
}
