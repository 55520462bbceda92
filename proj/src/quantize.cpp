#include "qcslab/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qcslab/error.hpp"

namespace qcslab {

namespace {

void check_bits(int bits) {
  if (bits < 1 || bits > kMaxBits) {
    throw Error(ErrorKind::InvalidParameter,
                "bit depth " + std::to_string(bits) + " outside [1, 32]");
  }
}

double quantize_one(double v, double range, double step, double cells) {
  const double clamped = std::clamp(v, -range, range);
  double cell = std::floor((clamped + range) / step);
  cell = std::clamp(cell, 0.0, cells - 1.0);
  return -range + step * (cell + 0.5);
}

// Standard normal density and upper tail, with +-inf handled.
double pdf(double t) {
  if (std::isinf(t)) return 0.0;
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
}

double cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

// Probability mass and first moment of N(0,1) over [a, b]. The mass uses the
// tail that keeps erfc away from cancellation.
struct CellMoments {
  double mass;
  double first;
};

CellMoments cell_moments(double a, double b) {
  double mass;
  if (a >= 0.0) {
    mass = cdf(-a) - cdf(-b);
  } else if (b <= 0.0) {
    mass = cdf(b) - cdf(a);
  } else {
    mass = 1.0 - cdf(a) - cdf(-b);
  }
  return {mass, pdf(a) - pdf(b)};
}

}  // namespace

double UniformQuantizer::step() const { return range * std::ldexp(1.0, 1 - bits); }

int LloydMaxQuantizer::bits() const {
  int b = 0;
  while ((std::size_t{1} << b) < levels.size()) ++b;
  return b;
}

void validate(const QuantizerSpec& spec) {
  if (const auto* u = std::get_if<UniformQuantizer>(&spec)) {
    check_bits(u->bits);
    if (!(u->range > 0.0) || !std::isfinite(u->range)) {
      throw Error(ErrorKind::InvalidParameter, "uniform quantizer range must be positive");
    }
  } else if (const auto* lm = std::get_if<LloydMaxQuantizer>(&spec)) {
    const std::size_t L = lm->levels.size();
    if (L < 2 || (L & (L - 1)) != 0 || lm->thresholds.size() != L - 1) {
      throw Error(ErrorKind::InvalidParameter,
                  "Lloyd-Max codebook needs 2^B levels and 2^B - 1 thresholds");
    }
    for (std::size_t i = 1; i < L; ++i) {
      if (!(lm->levels[i] > lm->levels[i - 1])) {
        throw Error(ErrorKind::InvalidParameter, "Lloyd-Max levels must increase");
      }
    }
    for (std::size_t i = 1; i + 1 < L; ++i) {
      if (!(lm->thresholds[i] > lm->thresholds[i - 1])) {
        throw Error(ErrorKind::InvalidParameter, "Lloyd-Max thresholds must increase");
      }
    }
  }
}

double dynamic_range(const Vector& y) {
  if (y.size() == 0) throw Error(ErrorKind::InvalidParameter, "empty measurement vector");
  const double t = y.cwiseAbs().maxCoeff();
  if (!std::isfinite(t)) throw Error(ErrorKind::InvalidValue, "non-finite measurement");
  if (t == 0.0) throw Error(ErrorKind::DegenerateRange, "all-zero measurements give T = 0");
  return t;
}

Vector uniform_quantize(const Vector& v, double range, int bits) {
  check_bits(bits);
  if (!(range > 0.0) || !std::isfinite(range)) {
    throw Error(ErrorKind::InvalidParameter, "quantizer range must be positive and finite");
  }
  const double step = range * std::ldexp(1.0, 1 - bits);
  const double cells = std::ldexp(1.0, bits);
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw Error(ErrorKind::InvalidValue, "non-finite quantizer input at " + std::to_string(i));
    }
    out[i] = quantize_one(v[i], range, step, cells);
  }
  return out;
}

double gaussian_distortion(const LloydMaxQuantizer& q, double sigma2) {
  const double sigma = std::sqrt(sigma2);
  const std::size_t L = q.levels.size();
  double total = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    const double a = i == 0 ? -INFINITY : q.thresholds[i - 1] / sigma;
    const double b = i + 1 == L ? INFINITY : q.thresholds[i] / sigma;
    const double l = q.levels[i] / sigma;
    const auto [mass, first] = cell_moments(a, b);
    const double a_pdf = std::isinf(a) ? 0.0 : a * pdf(a);
    const double b_pdf = std::isinf(b) ? 0.0 : b * pdf(b);
    const double second = mass + a_pdf - b_pdf;
    total += second - 2.0 * l * first + l * l * mass;
  }
  return sigma2 * total;
}

LloydMaxResult lloyd_max(int bits, double sigma2, double tol, int max_iter) {
  check_bits(bits);
  if (!(sigma2 > 0.0)) throw Error(ErrorKind::InvalidParameter, "variance must be positive");
  if (bits > 16) {
    throw Error(ErrorKind::InvalidParameter, "Lloyd-Max design is limited to 16 bits");
  }
  const std::size_t L = std::size_t{1} << bits;

  // Work in units of sigma; start from a uniform codebook over a range that
  // grows like the largest expected order statistic.
  std::vector<double> levels(L), thr(L - 1);
  const double span = 1.0 + std::sqrt(2.0 * std::log(static_cast<double>(L)));
  for (std::size_t i = 0; i < L; ++i) {
    levels[i] = -span + 2.0 * span * (static_cast<double>(i) + 0.5) / static_cast<double>(L);
  }

  LloydMaxResult result;
  int it = 0;
  bool converged = false;
  while (it < max_iter) {
    ++it;
    for (std::size_t i = 0; i + 1 < L; ++i) thr[i] = 0.5 * (levels[i] + levels[i + 1]);
    double moved = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      const double a = i == 0 ? -INFINITY : thr[i - 1];
      const double b = i + 1 == L ? INFINITY : thr[i];
      const auto [mass, first] = cell_moments(a, b);
      if (mass > 0.0) {
        const double c = first / mass;
        moved = std::max(moved, std::abs(c - levels[i]));
        levels[i] = c;
      }
    }
    if (moved <= tol) {
      converged = true;
      break;
    }
  }
  for (std::size_t i = 0; i + 1 < L; ++i) thr[i] = 0.5 * (levels[i] + levels[i + 1]);

  const double sigma = std::sqrt(sigma2);
  for (double& l : levels) l *= sigma;
  for (double& t : thr) t *= sigma;
  result.quantizer.levels = std::move(levels);
  result.quantizer.thresholds = std::move(thr);
  result.distortion = gaussian_distortion(result.quantizer, sigma2);
  result.iterations = it;
  result.converged = converged;
  return result;
}

Vector apply_codebook(const Vector& v, const QuantizerSpec& spec) {
  validate(spec);
  Vector out(v.size());
  if (const auto* u = std::get_if<UniformQuantizer>(&spec)) {
    return uniform_quantize(v, u->range, u->bits);
  }
  if (const auto* lm = std::get_if<LloydMaxQuantizer>(&spec)) {
    for (Index i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i])) throw Error(ErrorKind::InvalidValue, "non-finite input");
      // Cell index = number of thresholds strictly below v.
      const auto it = std::lower_bound(lm->thresholds.begin(), lm->thresholds.end(), v[i]);
      out[i] = lm->levels[static_cast<std::size_t>(it - lm->thresholds.begin())];
    }
    return out;
  }
  for (Index i = 0; i < v.size(); ++i) out[i] = v[i] < 0.0 ? -1.0 : 1.0;
  return out;
}

double distortion(const Vector& v, const Vector& q) {
  if (v.size() != q.size()) {
    throw Error(ErrorKind::DimensionMismatch, "distortion: length mismatch");
  }
  if (v.size() == 0) return 0.0;
  return (v - q).squaredNorm() / static_cast<double>(v.size());
}

}  // namespace qcslab
