#include "qcslab/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qcslab/error.hpp"

namespace qcslab {

const char* to_string(MatrixKind kind) {
  return kind == MatrixKind::IidGaussian ? "iid_gaussian" : "tight_frame";
}

std::vector<Index> sample_support(Index n, Index k, Rng& rng) {
  if (k < 0 || k > n) {
    throw Error(ErrorKind::InvalidParameter,
                "support size " + std::to_string(k) + " outside [0, " +
                    std::to_string(n) + "]");
  }
  // Partial Fisher-Yates.
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

SparseSignal gen_sparse_signal(Index n, Index k, double sigma_x2, Rng& rng) {
  if (k < 1 || k > n) {
    throw Error(ErrorKind::InvalidParameter,
                "sparsity must satisfy 1 <= k <= n (k=" + std::to_string(k) +
                    ", n=" + std::to_string(n) + ")");
  }
  if (!(sigma_x2 > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "sigma_x2 must be positive");
  }
  SparseSignal x;
  x.sigma_x2 = sigma_x2;
  x.support = sample_support(n, k, rng);
  x.values = Vector::Zero(n);
  std::normal_distribution<double> amp(0.0, std::sqrt(sigma_x2));
  for (Index j : x.support) x.values[j] = amp(rng);
  return x;
}

double sigma_n_for_isnr(Index k, double sigma_x2, Index n, double isnr_db) {
  if (k <= 0 || n <= 0 || !(sigma_x2 > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "sigma_n_for_isnr: k, n, sigma_x2 must be positive");
  }
  if (std::isinf(isnr_db) && isnr_db > 0) return 0.0;
  return (static_cast<double>(k) * sigma_x2 / static_cast<double>(n)) *
         std::pow(10.0, -isnr_db / 10.0);
}

SensingMatrix gen_gaussian_matrix(Index m, Index n, Rng& rng) {
  if (m < 1 || n < 1) {
    throw Error(ErrorKind::InvalidParameter, "matrix dimensions must be positive");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  SensingMatrix phi;
  phi.kind = MatrixKind::IidGaussian;
  phi.entries.resize(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) phi.entries(i, j) = gauss(rng);
  }
  phi.entries /= std::sqrt(static_cast<double>(m));
  return phi;
}

SensingMatrix make_tight_frame(const SensingMatrix& phi) {
  const Index m = phi.rows();
  const Index n = phi.cols();
  if (m > n) {
    throw Error(ErrorKind::InvalidParameter,
                "tight frame requires rows <= cols (" + std::to_string(m) + " > " +
                    std::to_string(n) + ")");
  }
  // Orthonormal basis for the row space from a QR of the transpose.
  Eigen::HouseholderQR<Matrix> qr(phi.entries.transpose());
  const auto& r = qr.matrixQR();
  double rmax = 0.0;
  for (Index i = 0; i < m; ++i) rmax = std::max(rmax, std::abs(r(i, i)));
  const double cutoff = rmax * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
  for (Index i = 0; i < m; ++i) {
    if (!(std::abs(r(i, i)) > cutoff)) {
      throw Error(ErrorKind::DegenerateMatrix, "sensing matrix is not full row rank");
    }
  }
  Matrix q = qr.householderQ() * Matrix::Identity(n, m);
  SensingMatrix out;
  out.kind = MatrixKind::TightFrame;
  out.entries = std::sqrt(static_cast<double>(n) / static_cast<double>(m)) * q.transpose();
  return out;
}

Vector measure(const SensingMatrix& phi, const Vector& x, const NoiseSpec& noise,
               Rng& rng) {
  if (x.size() != phi.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "signal length " + std::to_string(x.size()) + " != matrix cols " +
                    std::to_string(phi.cols()));
  }
  if (noise.sigma_n2 < 0.0 || noise.sigma_e2 < 0.0) {
    throw Error(ErrorKind::InvalidParameter, "noise variances must be nonnegative");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector y;
  if (noise.sigma_n2 > 0.0) {
    const double s = std::sqrt(noise.sigma_n2);
    Vector noisy = x;
    for (Index j = 0; j < noisy.size(); ++j) noisy[j] += s * gauss(rng);
    y = phi.entries * noisy;
  } else {
    y = phi.entries * x;
  }
  if (noise.sigma_e2 > 0.0) {
    const double s = std::sqrt(noise.sigma_e2);
    for (Index i = 0; i < y.size(); ++i) y[i] += s * gauss(rng);
  }
  return y;
}

double noise_fold_variance(Index n, Index m, double sigma_n2) {
  if (m < 1 || m > n) {
    throw Error(ErrorKind::InvalidParameter, "noise folding requires 1 <= m <= n");
  }
  return static_cast<double>(n) / static_cast<double>(m) * sigma_n2;
}

double isnr_db(const SparseSignal& x, double sigma_n2) {
  if (sigma_n2 < 0.0) throw Error(ErrorKind::InvalidParameter, "negative noise variance");
  if (sigma_n2 == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(static_cast<double>(x.k()) * x.sigma_x2 /
                           (static_cast<double>(x.n()) * sigma_n2));
}

}  // namespace qcslab
