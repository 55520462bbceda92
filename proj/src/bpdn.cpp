#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qcslab/error.hpp"
#include "qcslab/reconstruct.hpp"

namespace qcslab {

namespace {

// Active set with an incrementally grown Cholesky factor of its Gram matrix.
class ActiveSet {
 public:
  ActiveSet(const Matrix& phi, Index capacity)
      : phi_(phi), member_(static_cast<std::size_t>(phi.cols()), 0),
        gram_(capacity, capacity), chol_(capacity, capacity) {}

  Index size() const { return static_cast<Index>(cols_.size()); }
  const std::vector<Index>& cols() const { return cols_; }
  bool contains(Index j) const { return member_[static_cast<std::size_t>(j)] != 0; }

  // Returns false when the column is (numerically) in the span of the set.
  bool add(Index j) {
    const Index s = size();
    if (s >= gram_.rows()) return false;
    const auto col = phi_.col(j);
    Vector b(s);
    for (Index i = 0; i < s; ++i) b[i] = phi_.col(cols_[i]).dot(col);
    const double diag = col.squaredNorm();
    Vector w = b;
    if (s > 0) chol_.topLeftCorner(s, s).triangularView<Eigen::Lower>().solveInPlace(w);
    const double d2 = diag - w.squaredNorm();
    if (!(d2 > 1e-12 * diag)) return false;
    gram_.block(s, 0, 1, s) = b.transpose();
    gram_.block(0, s, s, 1) = b;
    gram_(s, s) = diag;
    chol_.block(s, 0, 1, s) = w.transpose();
    chol_(s, s) = std::sqrt(d2);
    cols_.push_back(j);
    member_[static_cast<std::size_t>(j)] = 1;
    return true;
  }

  void remove(Index pos) {
    const Index s = size();
    for (Index i = pos; i + 1 < s; ++i) {
      gram_.row(i).head(s) = gram_.row(i + 1).head(s);
    }
    for (Index i = pos; i + 1 < s; ++i) {
      gram_.col(i).head(s - 1) = gram_.col(i + 1).head(s - 1);
    }
    member_[static_cast<std::size_t>(cols_[pos])] = 0;
    cols_.erase(cols_.begin() + pos);
    const Index t = s - 1;
    if (t > 0) {
      Eigen::LLT<Matrix> llt(gram_.topLeftCorner(t, t));
      chol_.topLeftCorner(t, t) = llt.matrixL();
    }
  }

  Vector solve(const Vector& rhs) const {
    const Index s = size();
    Vector out = rhs;
    const auto l = chol_.topLeftCorner(s, s).triangularView<Eigen::Lower>();
    l.solveInPlace(out);
    l.transpose().solveInPlace(out);
    return out;
  }

 private:
  const Matrix& phi_;
  std::vector<Index> cols_;
  std::vector<char> member_;
  Matrix gram_;
  Matrix chol_;
};

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

ReconResult bpdn(const SensingMatrix& phi, const Vector& y, double eps, const SolverOptions& opts) {
  const Index m = phi.rows();
  const Index n = phi.cols();
  if (y.size() != m) throw Error(ErrorKind::DimensionMismatch, "bpdn: measurement length mismatch");
  if (!(eps >= 0.0)) throw Error(ErrorKind::InvalidParameter, "bpdn: eps must be nonnegative");
  if (opts.max_iter < 1 || !(opts.tol > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "bpdn: max_iter and tol must be positive");
  }
  const Matrix& a = phi.entries;

  ReconResult result;
  result.estimate = Vector::Zero(n);
  if (y.norm() <= eps) {
    result.converged = true;
    return result;
  }

  Vector x = Vector::Zero(n);
  Vector r = y;
  Vector corr = a.transpose() * r;
  Index first = 0;
  corr.cwiseAbs().maxCoeff(&first);
  double lambda = std::abs(corr[first]);

  ActiveSet active(a, std::min(m, n));
  std::vector<double> signs;
  std::vector<char> blocked(static_cast<std::size_t>(n), 0);
  active.add(first);
  signs.push_back(sgn(corr[first]));

  const double eps2 = eps * eps;
  // Breakpoints this close to lambda = 0 are rounding artifacts of the last
  // segment; the path end takes precedence over them.
  const double lambda_tail = 1e-13 * lambda;
  Index just_dropped = -1;
  bool reached = false;
  int it = 0;
  while (it < opts.max_iter && lambda > 0.0) {
    ++it;
    const Index s = active.size();
    const auto& cols = active.cols();
    Vector sv(s);
    for (Index i = 0; i < s; ++i) sv[i] = signs[static_cast<std::size_t>(i)];
    const Vector dir = active.solve(sv);
    Vector v = Vector::Zero(m);
    for (Index i = 0; i < s; ++i) v += dir[i] * a.col(cols[i]);
    const Vector av = a.transpose() * v;

    // Step in lambda to the next event; the path ends at lambda = 0.
    double gamma = lambda;
    enum class Event { End, Enter, Drop, Residual } event = Event::End;
    Index which = -1;

    const double floor_gamma = 1e-14 * lambda;
    const double ceil_gamma = lambda - lambda_tail;
    for (Index j = 0; j < n; ++j) {
      if (blocked[j] || j == just_dropped || active.contains(j)) continue;
      const double c = corr[j];
      const double aj = av[j];
      if (1.0 - aj > 0.0) {
        const double g = (lambda - c) / (1.0 - aj);
        if (g > floor_gamma && g < gamma && g < ceil_gamma) {
          gamma = g, event = Event::Enter, which = j;
        }
      }
      if (1.0 + aj > 0.0) {
        const double g = (lambda + c) / (1.0 + aj);
        if (g > floor_gamma && g < gamma && g < ceil_gamma) {
          gamma = g, event = Event::Enter, which = j;
        }
      }
    }
    for (Index i = 0; i < s; ++i) {
      const double xi = x[cols[i]];
      if (dir[i] != 0.0) {
        const double g = -xi / dir[i];
        if (g > floor_gamma && g < gamma && g < ceil_gamma) gamma = g, event = Event::Drop, which = i;
      }
    }
    // ||r - g v||^2 = eps^2, smallest positive root. The discriminant
    // rv^2 - vv (rr - eps^2) equals vv (eps^2 - ||p||^2) with p the part of r
    // orthogonal to v; that form avoids cancellation when r is nearly
    // parallel to v, as it is on the last segment of a noiseless path.
    const double vv = v.squaredNorm();
    const double rv = r.dot(v);
    const double cc = r.squaredNorm() - eps2;
    if (vv > 0.0) {
      const double perp2 = (r - (rv / vv) * v).squaredNorm();
      const double disc = vv * (eps2 - perp2);
      if (disc >= 0.0) {
        const double g = cc <= 0.0 ? 0.0 : cc / (rv + std::sqrt(disc));
        if (g >= 0.0 && g <= gamma) gamma = g, event = Event::Residual;
      }
    }

    for (Index i = 0; i < s; ++i) x[cols[i]] += gamma * dir[i];
    lambda = event == Event::End ? 0.0 : lambda - gamma;
    just_dropped = -1;

    if (event == Event::Residual) {
      reached = true;
      break;
    }
    if (event == Event::Drop) {
      const Index j = cols[which];
      x[j] = 0.0;
      active.remove(which);
      signs.erase(signs.begin() + which);
      just_dropped = j;
    }

    // Refresh residual and correlations from x to keep drift out of the path.
    r = y - a * x;
    corr = a.transpose() * r;

    if (event == Event::Enter) {
      if (active.add(which)) {
        signs.push_back(sgn(corr[which]));
      } else {
        blocked[which] = 1;
      }
    }
    if (event == Event::End) break;
    if (active.size() == 0) break;
  }

  if (opts.debias && active.size() > 0) {
    x = oracle_ls(phi, y, active.cols());
  }
  const double res = (y - a * x).norm();
  // With eps at or below the rounding floor of y - phi x, an exact fit is the
  // best attainable.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * y.norm();
  const bool path_done = reached || lambda == 0.0;
  result.estimate = std::move(x);
  result.iterations = it;
  result.converged = (res <= eps * (1.0 + opts.tol) && (reached || res <= eps)) ||
                     (path_done && res <= floor);
  return result;
}

}  // namespace qcslab
