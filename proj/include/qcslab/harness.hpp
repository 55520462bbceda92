#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qcslab/reconstruct.hpp"
#include "qcslab/signal_model.hpp"

namespace qcslab {

enum class Algorithm { OracleLS, BPDN, BihtL1, BihtL2 };
enum class QuantizerKind { Uniform, LloydMax, None };

const char* to_string(Algorithm a);
const char* to_string(QuantizerKind q);
Algorithm parse_algorithm(const std::string& s);
QuantizerKind parse_quantizer_kind(const std::string& s);
MatrixKind parse_matrix_kind(const std::string& s);

/// A bit budget either in bits or as a multiple of the signal length ("3N").
struct BudgetSpec {
  double value = 1.0;
  bool relative = true;

  Index resolve(Index n) const;
  std::string str() const;
  static BudgetSpec parse(const std::string& s);
};

struct ExperimentConfig {
  Index n = 1000;
  Index k = 10;
  double sigma_x2 = 1.0;
  double sigma_e2 = 0.0;
  std::vector<BudgetSpec> budgets;
  std::vector<int> bit_grid;
  std::vector<double> isnr_list;  // +inf means no signal noise
  int trials = 100;
  std::uint64_t master_seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::OracleLS};
  MatrixKind matrix_kind = MatrixKind::IidGaussian;
  QuantizerKind quantizer = QuantizerKind::Uniform;
  SolverOptions bpdn{2000, 1.0, 1e-6, 0, false};
  SolverOptions biht{100, 1.0, 1e-6, 0, false};
};

/// Throws Error(Schema) describing the first violated invariant.
void validate(const ExperimentConfig& cfg);

struct TupleId {
  Index n = 0;
  Index k = 0;
  Index budget = 0;
  int bit_depth = 0;
  Index m = 0;
  double isnr_db = 0.0;

  friend bool operator==(const TupleId&, const TupleId&) = default;
};

/// floor(budget / bits): the most measurements the budget affords.
Index measurements_for(Index budget, int bits);

/// Every (budget, bit depth, ISNR) tuple of the config, budget-major.
std::vector<TupleId> enumerate_tuples(const ExperimentConfig& cfg);

struct TrialResult {
  TupleId params;
  int trial_index = 0;
  Algorithm algorithm = Algorithm::OracleLS;
  double rsnr_db = 0.0;
  double recon_mse = 0.0;  // ||x - x_hat||^2
  std::optional<double> hamming;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
  bool converged = true;
};

struct SkipRecord {
  TupleId params;
  Algorithm algorithm = Algorithm::OracleLS;
  int trial_index = -1;  // -1: the whole tuple was skipped
  std::string reason;
};

struct TrialOutcome {
  std::vector<TrialResult> rows;
  std::vector<SkipRecord> failures;
};

/// Whether an algorithm runs at a tuple; fills reason when it does not.
bool applicable(const ExperimentConfig& cfg, const TupleId& t, Algorithm a, std::string* reason);

/// Root of the random streams of a trial. Signal, signal noise and matrix
/// streams derive from it, so trials with the same index share x, the noise
/// direction and the leading rows of the matrix across budgets, bit depths
/// and ISNRs.
std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial_index);

/// One trial of the acquisition pipeline, one row per applicable algorithm.
TrialOutcome run_trial(const ExperimentConfig& cfg, const TupleId& tuple, int trial_index);

struct Aggregate {
  TupleId params;
  Algorithm algorithm = Algorithm::OracleLS;
  int trials = 0;
  double rsnr_mean = 0.0;
  double rsnr_median = 0.0;
  double rsnr_std = 0.0;
  double mse_mean = 0.0;
};

struct ResultTable {
  std::vector<TrialResult> rows;
  std::vector<Aggregate> aggregates;
  std::vector<SkipRecord> skips;     // algorithm not applicable to a tuple
  std::vector<SkipRecord> failures;  // trials that threw
};

/// Per (tuple, algorithm) statistics in first-appearance order.
std::vector<Aggregate> aggregate(const std::vector<TrialResult>& rows);

struct SweepOptions {
  int threads = 0;  // 0: QCSLAB_THREADS or hardware concurrency
};

int resolve_thread_count(int requested);

ResultTable run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts = {});

enum class Regime { QuantizationCompression, Transition, MeasurementCompression };

const char* to_string(Regime r);

struct RegimePoint {
  double isnr_db = 0.0;
  int best_b = 0;
  Index best_m = 0;
  double best_rsnr = 0.0;
  Algorithm best_algorithm = Algorithm::BPDN;
  Regime regime = Regime::Transition;
};

/// Best (M, B) per ISNR from an existing table, restricted to one budget.
std::vector<RegimePoint> regime_map_from_table(const ResultTable& table, Index budget);

/// Runs the sweep at a single budget and picks the best (M, B) per ISNR.
std::vector<RegimePoint> regime_map(const ExperimentConfig& cfg, const BudgetSpec& budget,
                                    const SweepOptions& opts = {});

// Persistence. CSV layouts are fixed; see README.
void write_results(const ResultTable& table, const std::filesystem::path& path,
                   bool include_timing = false);
void write_aggregates(const ResultTable& table, const std::filesystem::path& path);
std::vector<TrialResult> read_results(const std::filesystem::path& path);
std::vector<Aggregate> read_aggregates(const std::filesystem::path& path);

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig read_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);
void write_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

}  // namespace qcslab
