#pragma once

#include <optional>
#include <span>

#include "qcslab/signal_model.hpp"

namespace qcslab {

/// Reported when the reconstruction is exact; keeps tables finite.
inline constexpr double kRsnrCapDb = 300.0;

struct SolverOptions {
  int max_iter = 2000;
  double step_tau = 1.0;
  double tol = 1e-6;
  Index k = 0;          // sparsity for BIHT
  bool debias = false;  // BPDN: least squares on the detected support
};

struct ReconResult {
  Vector estimate;
  int iterations = 0;
  bool converged = false;
  std::optional<double> consistency_hamming;  // 1-bit solvers only
  bool zero_estimate = false;
};

/// Least squares on the given support, zero elsewhere. Throws
/// DegenerateSupport when phi restricted to the support is rank deficient.
Vector oracle_ls(const SensingMatrix& phi, const Vector& y, std::span<const Index> support);

/// Keeps the k largest magnitudes (ties go to the lower index).
Vector hard_threshold(const Vector& v, Index k);

/// min ||x||_1 s.t. ||y - phi x||_2 <= eps.
///
/// Follows the lasso regularization path from lambda = ||phi^T y||_inf
/// downwards; the residual norm is monotone along the path, so the solution is
/// the path point where it meets eps. Each segment is solved exactly, which
/// gives a KKT-exact answer rather than an approximate one. opts.max_iter caps
/// the number of path breakpoints.
ReconResult bpdn(const SensingMatrix& phi, const Vector& y, double eps,
                 const SolverOptions& opts = {});

enum class BihtVariant { OneSidedL1, OneSidedL2 };

const char* to_string(BihtVariant v);

/// Binary iterative hard thresholding on sign measurements. The estimate is
/// returned with unit l2 norm.
ReconResult biht(const SensingMatrix& phi, const Vector& y_sign, BihtVariant variant,
                 const SolverOptions& opts);

/// 10 log10(||x||^2 / ||x - x_hat||^2), capped at kRsnrCapDb. With
/// rescale_1bit, x_hat is first scaled to the norm of x.
double rsnr_db(const Vector& x_true, const Vector& x_hat, bool rescale_1bit = false);

/// Fraction of measurements whose sign under x_hat disagrees with y_sign.
double hamming_consistency(const Vector& y_sign, const SensingMatrix& phi, const Vector& x_hat);

}  // namespace qcslab
