#include <cmath>

#include "qcslab/error.hpp"
#include "qcslab/reconstruct.hpp"

namespace qcslab {

const char* to_string(BihtVariant v) {
  return v == BihtVariant::OneSidedL1 ? "biht_l1" : "biht_l2";
}

namespace {

Index count_mismatches(const Vector& y_sign, const Vector& proj) {
  Index bad = 0;
  for (Index i = 0; i < proj.size(); ++i) {
    if ((proj[i] < 0.0 ? -1.0 : 1.0) != y_sign[i]) ++bad;
  }
  return bad;
}

}  // namespace

ReconResult biht(const SensingMatrix& phi, const Vector& y_sign, BihtVariant variant,
                 const SolverOptions& opts) {
  const Index m = phi.rows();
  const Index n = phi.cols();
  if (y_sign.size() != m) throw Error(ErrorKind::DimensionMismatch, "biht: measurement length mismatch");
  for (Index i = 0; i < m; ++i) {
    if (y_sign[i] != 1.0 && y_sign[i] != -1.0) {
      throw Error(ErrorKind::InvalidValue, "biht: measurements must be +-1");
    }
  }
  if (opts.k < 1 || opts.k > n) throw Error(ErrorKind::InvalidParameter, "biht: sparsity k not set");
  if (opts.max_iter < 1 || !(opts.step_tau > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "biht: max_iter and step_tau must be positive");
  }
  const Matrix& a = phi.entries;

  ReconResult result;
  Vector x = hard_threshold(a.transpose() * y_sign, opts.k);
  double nrm = x.norm();
  if (nrm == 0.0) {
    result.estimate = Vector::Zero(n);
    result.zero_estimate = true;
    result.consistency_hamming = hamming_consistency(y_sign, phi, result.estimate);
    return result;
  }
  x /= nrm;

  Vector proj = a * x;
  Index best_bad = count_mismatches(y_sign, proj);
  Vector best = x;
  int it = 0;
  bool consistent = best_bad == 0;
  while (!consistent && it < opts.max_iter) {
    ++it;
    Vector g(m);
    if (variant == BihtVariant::OneSidedL1) {
      // (1/2)(sign(phi x) - y): -y on inconsistent entries, 0 elsewhere.
      for (Index i = 0; i < m; ++i) {
        const double s = proj[i] < 0.0 ? -1.0 : 1.0;
        g[i] = 0.5 * (s - y_sign[i]);
      }
    } else {
      for (Index i = 0; i < m; ++i) g[i] = y_sign[i] * std::min(y_sign[i] * proj[i], 0.0);
    }
    x = hard_threshold(x - opts.step_tau * (a.transpose() * g), opts.k);
    if (x.squaredNorm() == 0.0) {
      result.zero_estimate = true;
      break;
    }
    proj = a * x;
    const Index bad = count_mismatches(y_sign, proj);
    if (bad <= best_bad) {
      best_bad = bad;
      best = x;
    }
    consistent = bad == 0;
  }

  result.estimate = best / best.norm();
  result.iterations = it;
  result.converged = best_bad == 0;
  result.consistency_hamming = static_cast<double>(best_bad) / static_cast<double>(m);
  return result;
}

}  // namespace qcslab
