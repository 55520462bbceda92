#pragma once

#include <variant>
#include <vector>

#include "qcslab/signal_model.hpp"

namespace qcslab {

inline constexpr int kMaxBits = 32;

/// Midrise quantizer on [-range, range] with 2^bits cells of width
/// range * 2^(1 - bits); inputs outside the range saturate.
struct UniformQuantizer {
  double range = 1.0;
  int bits = 1;

  double step() const;
};

struct LloydMaxQuantizer {
  std::vector<double> levels;      // 2^B, increasing
  std::vector<double> thresholds;  // 2^B - 1, increasing

  int bits() const;
};

/// sign(v) with sign(0) = +1.
struct SignQuantizer {};

using QuantizerSpec = std::variant<UniformQuantizer, LloydMaxQuantizer, SignQuantizer>;

/// Checks the invariants of a spec; throws InvalidParameter.
void validate(const QuantizerSpec& spec);

/// max_i |y_i|. Throws DegenerateRange when that is zero.
double dynamic_range(const Vector& y);

Vector uniform_quantize(const Vector& v, double range, int bits);

struct LloydMaxResult {
  LloydMaxQuantizer quantizer;
  double distortion = 0.0;  // exact Gaussian MSE of the returned codebook
  int iterations = 0;
  bool converged = false;
};

/// MSE-optimal scalar quantizer for N(0, sigma2) by Lloyd iteration. Stops
/// when no level moves by more than tol (in units of sigma).
LloydMaxResult lloyd_max(int bits, double sigma2, double tol = 1e-10, int max_iter = 200000);

/// E[(g - Q(g))^2] for g ~ N(0, sigma2), evaluated in closed form per cell.
double gaussian_distortion(const LloydMaxQuantizer& q, double sigma2);

Vector apply_codebook(const Vector& v, const QuantizerSpec& spec);

/// Mean squared difference.
double distortion(const Vector& v, const Vector& q);

}  // namespace qcslab
