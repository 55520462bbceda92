#include <cmath>

#include "qcslab/error.hpp"
#include "qcslab/reconstruct.hpp"

namespace qcslab {

double rsnr_db(const Vector& x_true, const Vector& x_hat, bool rescale_1bit) {
  if (x_true.size() != x_hat.size()) {
    throw Error(ErrorKind::DimensionMismatch, "rsnr_db: length mismatch");
  }
  const double signal = x_true.squaredNorm();
  if (!(signal > 0.0)) throw Error(ErrorKind::InvalidParameter, "rsnr_db: zero reference signal");
  Vector est = x_hat;
  if (rescale_1bit) {
    const double nrm = est.norm();
    if (nrm > 0.0) est *= std::sqrt(signal) / nrm;
  }
  const double err = (x_true - est).squaredNorm();
  if (err == 0.0) return kRsnrCapDb;
  return std::min(kRsnrCapDb, 10.0 * std::log10(signal / err));
}

double hamming_consistency(const Vector& y_sign, const SensingMatrix& phi, const Vector& x_hat) {
  if (y_sign.size() != phi.rows() || x_hat.size() != phi.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "hamming_consistency: dimension mismatch");
  }
  if (y_sign.size() == 0) return 0.0;
  const Vector proj = phi.entries * x_hat;
  Index mismatches = 0;
  for (Index i = 0; i < proj.size(); ++i) {
    const double s = proj[i] < 0.0 ? -1.0 : 1.0;
    if (s != y_sign[i]) ++mismatches;
  }
  return static_cast<double>(mismatches) / static_cast<double>(y_sign.size());
}

}  // namespace qcslab
