#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qcslab/rng.hpp"

namespace qcslab {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class MatrixKind { IidGaussian, TightFrame };

const char* to_string(MatrixKind kind);

struct SparseSignal {
  Vector values;
  std::vector<Index> support;  // sorted ascending
  double sigma_x2 = 1.0;

  Index n() const { return values.size(); }
  Index k() const { return static_cast<Index>(support.size()); }
};

struct SensingMatrix {
  Matrix entries;
  MatrixKind kind = MatrixKind::IidGaussian;

  Index rows() const { return entries.rows(); }
  Index cols() const { return entries.cols(); }
};

/// Per-entry variances of the signal noise n and the measurement noise e.
struct NoiseSpec {
  double sigma_n2 = 0.0;
  double sigma_e2 = 0.0;
};

/// Uniformly random k-subset of {0..n-1}, sorted.
std::vector<Index> sample_support(Index n, Index k, Rng& rng);

/// Support drawn uniformly, nonzero amplitudes iid N(0, sigma_x2).
SparseSignal gen_sparse_signal(Index n, Index k, double sigma_x2, Rng& rng);

/// Signal-noise variance giving the requested input SNR (expected powers).
double sigma_n_for_isnr(Index k, double sigma_x2, Index n, double isnr_db);

/// Entries iid N(0, 1/m). Entries are drawn row by row, so for a fixed
/// generator state the first rows of a taller matrix coincide (up to the
/// 1/sqrt(m) scale) with a shorter one.
SensingMatrix gen_gaussian_matrix(Index m, Index n, Rng& rng);

/// Same row space as phi with phi * phi^T = (n/m) I. Requires m <= n and
/// full row rank.
SensingMatrix make_tight_frame(const SensingMatrix& phi);

/// phi (x + n) + e with fresh white Gaussian n, e. Zero variances draw nothing.
Vector measure(const SensingMatrix& phi, const Vector& x, const NoiseSpec& noise,
               Rng& rng);

/// Variance of phi n for a tight frame: (n/m) sigma_n2.
double noise_fold_variance(Index n, Index m, double sigma_n2);

/// 10 log10(k sigma_x2 / (n sigma_n2)); +inf when sigma_n2 == 0.
double isnr_db(const SparseSignal& x, double sigma_n2);

}  // namespace qcslab
