#include "qcslab/bound.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcslab/error.hpp"

namespace qcslab {

namespace {

void check_delta(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "RIP constant must lie in [0, 1)");
  }
}

}  // namespace

BoundParams bound_params_for_isnr(double isnr_db, double n, double k, double sigma_x2,
                                  double budget) {
  BoundParams p;
  p.n = n;
  p.k = k;
  p.sigma_x2 = sigma_x2;
  p.budget = budget;
  p.sigma_n2 = std::isinf(isnr_db) && isnr_db > 0
                   ? 0.0
                   : k * sigma_x2 / n * std::pow(10.0, -isnr_db / 10.0);
  return p;
}

double bound_inner_term(int bits, const BoundParams& p) {
  if (bits < 2) {
    throw Error(ErrorKind::OutOfDomain,
                "bound requires B > 1 (got " + std::to_string(bits) + ")");
  }
  const double b = bits;
  const double q = std::ldexp(1.0, -2 * bits);
  return p.k * p.sigma_x2 * b * q + p.n * p.sigma_n2 * b * (1.0 + q);
}

double theorem1_bound(int bits, const BoundParams& p) {
  check_delta(p.delta);
  if (!(p.budget >= 2.0)) throw Error(ErrorKind::InvalidParameter, "bit budget must be >= 2");
  const double scale = 2.0 * p.k / (p.budget * (1.0 - p.delta));
  const double corr = p.k / (1.0 - p.delta) * (p.budget / bits - 1.0) * p.corr_s;
  return scale * bound_inner_term(bits, p) + corr;
}

BoundCurve optimal_bitdepth(const BoundParams& p, int b_min, int b_max, BoundMode mode) {
  if (b_min < 2 || b_max < b_min || b_max > 32) {
    throw Error(ErrorKind::InvalidParameter, "bit grid must satisfy 2 <= b_min <= b_max <= 32");
  }
  BoundCurve curve;
  for (int b = b_min; b <= b_max; ++b) {
    curve.bit_grid.push_back(b);
    curve.values.push_back(mode == BoundMode::InnerTerm ? bound_inner_term(b, p)
                                                        : theorem1_bound(b, p));
  }
  // min_element returns the first minimum, i.e. the smallest B on ties.
  const auto best = std::min_element(curve.values.begin(), curve.values.end());
  curve.argmin_b = curve.bit_grid[static_cast<std::size_t>(best - curve.values.begin())];
  curve.boundary_argmin = b_min < b_max && (curve.argmin_b == b_min || curve.argmin_b == b_max);
  return curve;
}

double envelope_optimal_b(double norm_x2, double sigma_n2, double m, double n) {
  if (!(norm_x2 > 0.0 && sigma_n2 > 0.0 && m > 0.0 && n > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "envelope_optimal_b: arguments must be positive");
  }
  return 0.5 * std::log2(norm_x2 / sigma_n2 * m / n);
}

double envelope_regime_relation(double budget, double m) {
  if (!(m >= 1.0) || budget < m) {
    throw Error(ErrorKind::InvalidParameter, "envelope_regime_relation: need m >= 1, budget >= m");
  }
  return 2.0 * budget / m - std::log2(m);
}

double estimate_corr_s(const Matrix& samples) {
  if (samples.rows() < 2 || samples.cols() < 2) {
    throw Error(ErrorKind::InvalidParameter, "estimate_corr_s needs >= 2 samples and >= 2 measurements");
  }
  const Matrix second = samples.transpose() * samples / static_cast<double>(samples.rows());
  double worst = 0.0;
  for (Index j = 0; j < second.cols(); ++j) {
    for (Index i = 0; i < second.rows(); ++i) {
      if (i != j) worst = std::max(worst, std::abs(second(i, j)));
    }
  }
  return worst;
}

double estimate_rip_delta(const SensingMatrix& phi, Index k, int trials, Rng& rng) {
  if (k < 1 || k > phi.rows() || k > phi.cols()) {
    throw Error(ErrorKind::InvalidParameter, "estimate_rip_delta: need 1 <= k <= rows");
  }
  if (trials < 1) throw Error(ErrorKind::InvalidParameter, "estimate_rip_delta: trials must be positive");
  double delta = 0.0;
  Matrix sub(phi.rows(), k);
  for (int t = 0; t < trials; ++t) {
    const auto support = sample_support(phi.cols(), k, rng);
    for (Index c = 0; c < k; ++c) sub.col(c) = phi.entries.col(support[static_cast<std::size_t>(c)]);
    // Squared singular values are the Gram eigenvalues.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sub.transpose() * sub, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    delta = std::max({delta, 1.0 - lo, hi - 1.0});
  }
  return delta;
}

double lemma1_error_bound(double sigma_diag, double corr_s, double m, double k, double delta) {
  check_delta(delta);
  return k / (1.0 - delta) * (sigma_diag + (m - 1.0) * corr_s);
}

}  // namespace qcslab
