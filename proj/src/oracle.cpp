#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "qcslab/error.hpp"
#include "qcslab/reconstruct.hpp"

namespace qcslab {

Vector oracle_ls(const SensingMatrix& phi, const Vector& y, std::span<const Index> support) {
  if (y.size() != phi.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "oracle_ls: measurement length mismatch");
  }
  const Index k = static_cast<Index>(support.size());
  if (k > phi.rows()) {
    throw Error(ErrorKind::DegenerateSupport,
                "support size " + std::to_string(k) + " exceeds measurement count " +
                    std::to_string(phi.rows()));
  }
  Vector x = Vector::Zero(phi.cols());
  if (k == 0) return x;

  Matrix sub(phi.rows(), k);
  for (Index c = 0; c < k; ++c) {
    const Index j = support[static_cast<std::size_t>(c)];
    if (j < 0 || j >= phi.cols()) {
      throw Error(ErrorKind::InvalidParameter, "support index out of range");
    }
    sub.col(c) = phi.entries.col(j);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(sub);
  if (qr.rank() < k) {
    throw Error(ErrorKind::DegenerateSupport, "restricted matrix is rank deficient");
  }
  const Vector coef = qr.solve(y);
  for (Index c = 0; c < k; ++c) x[support[static_cast<std::size_t>(c)]] = coef[c];
  return x;
}

Vector hard_threshold(const Vector& v, Index k) {
  const Index n = v.size();
  if (k < 1 || k > n) {
    throw Error(ErrorKind::InvalidParameter, "hard_threshold: k outside [1, len]");
  }
  if (k == n) return v;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), [&](Index a, Index b) {
    const double fa = std::abs(v[a]);
    const double fb = std::abs(v[b]);
    return fa > fb || (fa == fb && a < b);
  });
  Vector out = Vector::Zero(n);
  for (Index i = 0; i < k; ++i) out[order[i]] = v[order[i]];
  return out;
}

}  // namespace qcslab
