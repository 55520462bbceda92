#include "qcslab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include "qcslab/error.hpp"
#include "qcslab/quantize.hpp"

namespace qcslab {

namespace {

// Stream tags keep the per-trial generators independent of each other.
enum StreamTag : std::uint64_t { kSignal = 1, kNoise = 2, kMatrix = 3, kMeasNoise = 4 };

constexpr int kMaxLloydBits = 10;

const LloydMaxQuantizer& unit_lloyd_max(int bits) {
  static std::mutex mu;
  static std::map<int, LloydMaxQuantizer> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(bits);
  if (it == cache.end()) {
    it = cache.emplace(bits, lloyd_max(bits, 1.0, 1e-9, 500000).quantizer).first;
  }
  return it->second;
}

LloydMaxQuantizer scaled(const LloydMaxQuantizer& unit, double sigma) {
  LloydMaxQuantizer q = unit;
  for (double& l : q.levels) l *= sigma;
  for (double& t : q.thresholds) t *= sigma;
  return q;
}

// The matrix depends only on (seed, m, n, kind). Sweeps visit the ISNR values
// of a (budget, B, trial) back to back, so one cached matrix per thread saves
// regenerating it for each ISNR.
const SensingMatrix& trial_matrix(std::uint64_t seed, Index m, Index n, MatrixKind kind) {
  struct Entry {
    std::uint64_t seed = 0;
    Index m = -1;
    Index n = -1;
    MatrixKind kind = MatrixKind::IidGaussian;
    SensingMatrix phi;
  };
  thread_local Entry cache;
  if (cache.seed != seed || cache.m != m || cache.n != n || cache.kind != kind) {
    Rng rng(seed);
    cache.phi = gen_gaussian_matrix(m, n, rng);
    if (kind == MatrixKind::TightFrame) cache.phi = make_tight_frame(cache.phi);
    cache.seed = seed;
    cache.m = m;
    cache.n = n;
    cache.kind = kind;
  }
  return cache.phi;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::OracleLS: return "oracle_ls";
    case Algorithm::BPDN: return "bpdn";
    case Algorithm::BihtL1: return "biht_l1";
    case Algorithm::BihtL2: return "biht_l2";
  }
  return "?";
}

const char* to_string(QuantizerKind q) {
  switch (q) {
    case QuantizerKind::Uniform: return "uniform";
    case QuantizerKind::LloydMax: return "lloyd_max";
    case QuantizerKind::None: return "none";
  }
  return "?";
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::QuantizationCompression: return "QC";
    case Regime::Transition: return "transition";
    case Regime::MeasurementCompression: return "MC";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  for (Algorithm a : {Algorithm::OracleLS, Algorithm::BPDN, Algorithm::BihtL1, Algorithm::BihtL2}) {
    if (s == to_string(a)) return a;
  }
  throw Error(ErrorKind::Schema, "unknown algorithm '" + s + "'");
}

QuantizerKind parse_quantizer_kind(const std::string& s) {
  for (QuantizerKind q : {QuantizerKind::Uniform, QuantizerKind::LloydMax, QuantizerKind::None}) {
    if (s == to_string(q)) return q;
  }
  throw Error(ErrorKind::Schema, "unknown quantizer '" + s + "'");
}

MatrixKind parse_matrix_kind(const std::string& s) {
  if (s == "iid_gaussian") return MatrixKind::IidGaussian;
  if (s == "tight_frame") return MatrixKind::TightFrame;
  throw Error(ErrorKind::Schema, "unknown matrix kind '" + s + "'");
}

Index measurements_for(Index budget, int bits) {
  if (bits < 1) throw Error(ErrorKind::InvalidParameter, "bit depth must be positive");
  return budget / bits;
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& field, const std::string& msg) {
    throw Error(ErrorKind::Schema, field + ": " + msg);
  };
  if (cfg.n < 1) fail("n", "must be >= 1");
  if (cfg.k < 1 || cfg.k > cfg.n) fail("k", "must satisfy 1 <= k <= n");
  if (!(cfg.sigma_x2 > 0.0)) fail("sigma_x2", "must be positive");
  if (!(cfg.sigma_e2 >= 0.0)) fail("sigma_e2", "must be nonnegative");
  if (cfg.trials < 1) fail("trials", "must be >= 1");
  if (cfg.budgets.empty()) fail("budgets", "must be nonempty");
  if (cfg.bit_grid.empty()) fail("bit_grid", "must be nonempty");
  if (cfg.isnr_list.empty()) fail("isnr_list", "must be nonempty");
  if (cfg.algorithms.empty()) fail("algorithms", "must be nonempty");
  for (std::size_t i = 0; i < cfg.bit_grid.size(); ++i) {
    const int b = cfg.bit_grid[i];
    if (b < 1 || b > 32) fail("bit_grid[" + std::to_string(i) + "]", "must lie in [1, 32]");
  }
  for (std::size_t i = 0; i < cfg.isnr_list.size(); ++i) {
    const double s = cfg.isnr_list[i];
    if (std::isnan(s) || (std::isinf(s) && s < 0)) {
      fail("isnr_list[" + std::to_string(i) + "]", "must be finite or +inf");
    }
  }
  for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
    const Index budget = cfg.budgets[i].resolve(cfg.n);
    for (int b : cfg.bit_grid) {
      if (measurements_for(budget, b) < 1) {
        fail("budgets[" + std::to_string(i) + "]",
             "budget " + std::to_string(budget) + " affords no measurement at B=" + std::to_string(b));
      }
    }
  }
}

std::vector<TupleId> enumerate_tuples(const ExperimentConfig& cfg) {
  std::vector<TupleId> out;
  for (const auto& bs : cfg.budgets) {
    const Index budget = bs.resolve(cfg.n);
    for (int b : cfg.bit_grid) {
      for (double isnr : cfg.isnr_list) {
        out.push_back(TupleId{cfg.n, cfg.k, budget, b, measurements_for(budget, b), isnr});
      }
    }
  }
  return out;
}

bool applicable(const ExperimentConfig& cfg, const TupleId& t, Algorithm a, std::string* reason) {
  auto no = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  if (cfg.matrix_kind == MatrixKind::TightFrame && t.m > t.n) {
    return no("tight frame needs M <= N");
  }
  const bool one_bit = t.bit_depth == 1 && cfg.quantizer != QuantizerKind::None;
  switch (a) {
    case Algorithm::OracleLS:
      if (one_bit) return no("oracle_ls needs multi-bit measurements");
      if (t.m < t.k) return no("M < K");
      return true;
    case Algorithm::BPDN:
      if (one_bit) return no("bpdn needs multi-bit measurements");
      return true;
    case Algorithm::BihtL1:
    case Algorithm::BihtL2:
      if (!one_bit) return no("biht needs sign measurements");
      return true;
  }
  return no("unknown algorithm");
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial_index) {
  return derive_seed(cfg.master_seed, cfg.n, cfg.k, trial_index);
}

TrialOutcome run_trial(const ExperimentConfig& cfg, const TupleId& tuple, int trial_index) {
  using Clock = std::chrono::steady_clock;
  TrialOutcome out;
  const std::uint64_t root = trial_seed(cfg, trial_index);

  std::vector<Algorithm> algos;
  for (Algorithm a : cfg.algorithms) {
    if (applicable(cfg, tuple, a, nullptr)) algos.push_back(a);
  }
  if (algos.empty()) return out;

  Rng signal_rng(derive_seed(root, kSignal));
  const SparseSignal x = gen_sparse_signal(cfg.n, cfg.k, cfg.sigma_x2, signal_rng);

  // Unit-variance noise direction, scaled to the tuple's ISNR.
  const double sigma_n2 = sigma_n_for_isnr(cfg.k, cfg.sigma_x2, cfg.n, tuple.isnr_db);
  Vector noise = Vector::Zero(cfg.n);
  {
    Rng noise_rng(derive_seed(root, kNoise));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Index j = 0; j < cfg.n; ++j) noise[j] = gauss(noise_rng);
    noise *= std::sqrt(sigma_n2);
  }

  const SensingMatrix& phi = trial_matrix(derive_seed(root, kMatrix), tuple.m, cfg.n, cfg.matrix_kind);

  const Vector clean = phi.entries * x.values;
  Vector y = sigma_n2 > 0.0 ? Vector(phi.entries * (x.values + noise)) : clean;
  if (cfg.sigma_e2 > 0.0) {
    Rng e_rng(derive_seed(root, kMeasNoise, tuple.m));
    std::normal_distribution<double> gauss(0.0, std::sqrt(cfg.sigma_e2));
    for (Index i = 0; i < tuple.m; ++i) y[i] += gauss(e_rng);
  }

  auto record = [&](Algorithm a, const Vector& est, bool rescale, std::optional<double> hamming,
                    bool converged, Clock::time_point start) {
    TrialResult r;
    r.params = tuple;
    r.trial_index = trial_index;
    r.algorithm = a;
    Vector e = est;
    if (rescale && e.norm() > 0.0) e *= x.values.norm() / e.norm();
    r.rsnr_db = rsnr_db(x.values, e, false);
    r.recon_mse = (x.values - e).squaredNorm();
    r.hamming = hamming;
    r.wall_time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    r.seed = root;
    r.converged = converged;
    out.rows.push_back(r);
  };

  const bool one_bit = tuple.bit_depth == 1 && cfg.quantizer != QuantizerKind::None;
  if (one_bit) {
    const Vector y_sign = apply_codebook(y, SignQuantizer{});
    for (Algorithm a : algos) {
      const auto start = Clock::now();
      try {
        SolverOptions o = cfg.biht;
        o.k = cfg.k;
        const auto variant = a == Algorithm::BihtL1 ? BihtVariant::OneSidedL1 : BihtVariant::OneSidedL2;
        const ReconResult res = biht(phi, y_sign, variant, o);
        record(a, res.estimate, true, hamming_consistency(y_sign, phi, res.estimate), res.converged,
               start);
      } catch (const Error& err) {
        out.failures.push_back({tuple, a, trial_index, err.what()});
      }
    }
    return out;
  }

  Vector yq;
  try {
    switch (cfg.quantizer) {
      case QuantizerKind::Uniform:
        yq = uniform_quantize(y, dynamic_range(clean), tuple.bit_depth);
        break;
      case QuantizerKind::LloydMax: {
        if (tuple.bit_depth > kMaxLloydBits) {
          throw Error(ErrorKind::InvalidParameter, "Lloyd-Max pipeline limited to 10 bits");
        }
        // Designed for the expected per-measurement variance of phi (x + n).
        const double var = (static_cast<double>(cfg.k) * cfg.sigma_x2 +
                            static_cast<double>(cfg.n) * sigma_n2) /
                           static_cast<double>(tuple.m);
        yq = apply_codebook(y, scaled(unit_lloyd_max(tuple.bit_depth), std::sqrt(var)));
        break;
      }
      case QuantizerKind::None:
        yq = y;
        break;
    }
  } catch (const Error& err) {
    for (Algorithm a : algos) out.failures.push_back({tuple, a, trial_index, err.what()});
    return out;
  }
  const double eps = (y - yq).norm();

  for (Algorithm a : algos) {
    const auto start = Clock::now();
    try {
      if (a == Algorithm::OracleLS) {
        record(a, oracle_ls(phi, yq, x.support), false, std::nullopt, true, start);
      } else {
        const ReconResult res = bpdn(phi, yq, eps, cfg.bpdn);
        record(a, res.estimate, false, std::nullopt, res.converged, start);
      }
    } catch (const Error& err) {
      out.failures.push_back({tuple, a, trial_index, err.what()});
    }
  }
  return out;
}

std::vector<Aggregate> aggregate(const std::vector<TrialResult>& rows) {
  if (rows.empty()) throw Error(ErrorKind::InvalidParameter, "aggregate: no rows");
  struct Group {
    TupleId params;
    Algorithm algorithm;
    std::vector<double> rsnr;
    double mse_sum = 0.0;
  };
  std::vector<Group> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.params == r.params && g.algorithm == r.algorithm;
    });
    if (it == groups.end()) {
      groups.push_back({r.params, r.algorithm, {}, 0.0});
      it = groups.end() - 1;
    }
    it->rsnr.push_back(r.rsnr_db);
    it->mse_sum += r.recon_mse;
  }
  std::vector<Aggregate> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    Aggregate a;
    a.params = g.params;
    a.algorithm = g.algorithm;
    a.trials = static_cast<int>(g.rsnr.size());
    const double cnt = static_cast<double>(g.rsnr.size());
    double sum = 0.0;
    for (double v : g.rsnr) sum += v;
    a.rsnr_mean = sum / cnt;
    double ss = 0.0;
    for (double v : g.rsnr) ss += (v - a.rsnr_mean) * (v - a.rsnr_mean);
    a.rsnr_std = g.rsnr.size() > 1 ? std::sqrt(ss / (cnt - 1.0)) : 0.0;
    a.rsnr_median = median_of(g.rsnr);
    a.mse_mean = g.mse_sum / cnt;
    out.push_back(a);
  }
  return out;
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QCSLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ResultTable run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts) {
  validate(cfg);
  const auto tuples = enumerate_tuples(cfg);

  ResultTable table;
  for (const auto& t : tuples) {
    for (Algorithm a : cfg.algorithms) {
      std::string why;
      if (!applicable(cfg, t, a, &why)) table.skips.push_back({t, a, -1, why});
    }
  }

  // Results are stored tuple-major; execution runs ISNR-innermost so that
  // consecutive tasks reuse the same sensing matrix.
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t n_isnr = cfg.isnr_list.size();
  const std::size_t tasks = tuples.size() * trials;
  std::vector<TrialOutcome> outcomes(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t step = next++; step < tasks; step = next++) {
      const std::size_t s = step % n_isnr;
      const std::size_t trial_u = (step / n_isnr) % trials;
      const std::size_t group = step / (n_isnr * trials);
      const std::size_t tuple_index = group * n_isnr + s;
      const std::size_t i = tuple_index * trials + trial_u;
      const auto& tuple = tuples[tuple_index];
      const int trial = static_cast<int>(trial_u);
      try {
        outcomes[i] = run_trial(cfg, tuple, trial);
      } catch (const std::exception& err) {
        for (Algorithm a : cfg.algorithms) {
          if (applicable(cfg, tuple, a, nullptr)) {
            outcomes[i].failures.push_back({tuple, a, trial, err.what()});
          }
        }
      }
    }
  };
  const int threads = std::min<int>(resolve_thread_count(opts.threads),
                                    static_cast<int>(std::max<std::size_t>(tasks, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (auto& o : outcomes) {
    table.rows.insert(table.rows.end(), o.rows.begin(), o.rows.end());
    table.failures.insert(table.failures.end(), o.failures.begin(), o.failures.end());
  }
  if (!table.rows.empty()) table.aggregates = aggregate(table.rows);
  return table;
}

std::vector<RegimePoint> regime_map_from_table(const ResultTable& table, Index budget) {
  std::vector<double> isnrs;
  for (const auto& a : table.aggregates) {
    if (a.params.budget != budget) continue;
    if (std::find(isnrs.begin(), isnrs.end(), a.params.isnr_db) == isnrs.end()) {
      isnrs.push_back(a.params.isnr_db);
    }
  }
  std::vector<RegimePoint> out;
  for (double isnr : isnrs) {
    const Aggregate* best = nullptr;
    for (const auto& a : table.aggregates) {
      if (a.params.budget != budget || a.params.isnr_db != isnr) continue;
      if (!best || a.rsnr_mean > best->rsnr_mean ||
          (a.rsnr_mean == best->rsnr_mean && a.params.bit_depth < best->params.bit_depth)) {
        best = &a;
      }
    }
    RegimePoint p;
    p.isnr_db = isnr;
    p.best_b = best->params.bit_depth;
    p.best_m = best->params.m;
    p.best_rsnr = best->rsnr_mean;
    p.best_algorithm = best->algorithm;
    p.regime = p.best_b <= 2   ? Regime::QuantizationCompression
               : p.best_b >= 5 ? Regime::MeasurementCompression
                               : Regime::Transition;
    out.push_back(p);
  }
  return out;
}

std::vector<RegimePoint> regime_map(const ExperimentConfig& cfg, const BudgetSpec& budget,
                                    const SweepOptions& opts) {
  if (cfg.isnr_list.empty()) throw Error(ErrorKind::Schema, "isnr_list: must be nonempty");
  ExperimentConfig one = cfg;
  one.budgets = {budget};
  const ResultTable table = run_sweep(one, opts);
  return regime_map_from_table(table, budget.resolve(cfg.n));
}

}  // namespace qcslab
