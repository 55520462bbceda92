#pragma once

#include <vector>

#include "qcslab/signal_model.hpp"

namespace qcslab {

/// Parameters of the fixed-budget oracle error bound. Defaults are
/// placeholders (only the input SNR affects the bit-depth argmin).
struct BoundParams {
  double n = 1000.0;
  double k = 10.0;
  double sigma_x2 = 1.0;
  double sigma_n2 = 0.0;
  double budget = 3000.0;  // total bits
  double delta = 0.0;      // RIP constant, in [0, 1)
  double corr_s = 0.0;     // max pairwise correlation of quantized measurements
};

/// BoundParams with sigma_n2 chosen for the requested input SNR.
BoundParams bound_params_for_isnr(double isnr_db, double n = 1000.0, double k = 10.0,
                                  double sigma_x2 = 1.0, double budget = 3000.0);

enum class BoundMode { InnerTerm, Full };

struct BoundCurve {
  std::vector<int> bit_grid;
  std::vector<double> values;
  int argmin_b = 0;
  bool boundary_argmin = false;  // argmin sits on an end of the grid
};

/// K sigma_x^2 B 2^-2B + N sigma_n^2 B (1 + 2^-2B). Requires B >= 2.
double bound_inner_term(int bits, const BoundParams& p);

/// 2K / (budget (1 - delta)) * inner + K / (1 - delta) * (budget / B - 1) * S,
/// with budget / B evaluated as a real number.
double theorem1_bound(int bits, const BoundParams& p);

/// Evaluates the bound on {b_min..b_max}; ties resolve to the smaller B.
BoundCurve optimal_bitdepth(const BoundParams& p, int b_min = 2, int b_max = 12,
                            BoundMode mode = BoundMode::InnerTerm);

/// Bit depth balancing quantizer distortion against folded noise:
/// 0.5 log2(||x||^2 / sigma_n^2 * m / n). May be negative.
double envelope_optimal_b(double norm_x2, double sigma_n2, double m, double n);

/// 2 budget / m - log2(m); compare against log2 of the per-element input SNR.
double envelope_regime_relation(double budget, double m);

/// Rows are sample vectors, columns are measurement indices. Returns the
/// largest |mean of q_i q_j| over i != j.
double estimate_corr_s(const Matrix& samples);

/// Monte-Carlo lower estimate of the order-k RIP constant from the extreme
/// singular values of random k-column submatrices.
double estimate_rip_delta(const SensingMatrix& phi, Index k, int trials, Rng& rng);

/// K / (1 - delta) * (sigma_z^2 + (m - 1) S): the oracle error bound with a
/// Gershgorin estimate of the noise covariance's largest eigenvalue.
double lemma1_error_bound(double sigma_diag, double corr_s, double m, double k, double delta);

}  // namespace qcslab
