#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcslab/bound.hpp"
#include "qcslab/harness.hpp"

namespace qcslab {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitRuntime = 2,
  kExitPartial = 3,
};

/// "a..b" or "a,b,c".
std::vector<int> parse_int_list(const std::string& text);
/// Comma separated decimals; "inf" allowed.
std::vector<double> parse_double_list(const std::string& text);
std::vector<BudgetSpec> parse_budget_list(const std::string& text);

/// File-name fragment for an ISNR value ("35", "7.5", "inf").
std::string isnr_tag(double isnr_db);

struct BoundCurveArgs {
  std::vector<double> isnr{35.0, 20.0, 10.0, 5.0};
  int b_min = 2;
  int b_max = 12;
  BoundMode mode = BoundMode::InnerTerm;
  double delta = 0.0;
  double corr_s = 0.0;
  double n = 1000.0;
  double k = 10.0;
  double sigma_x2 = 1.0;
  BudgetSpec budget{3.0, true};
  std::filesystem::path out = ".";
};

/// One CSV and one SVG per ISNR, minimum marked.
std::vector<BoundCurve> cmd_bound_curve(const BoundCurveArgs& args);

struct SweepArgs {
  ExperimentConfig cfg;
  std::filesystem::path out = ".";
  bool timing = false;
  int threads = 0;
};

/// results.csv, aggregates.csv, failures.csv and RSNR-vs-budget plots.
ResultTable cmd_sweep(const SweepArgs& args);

struct RegimeArgs {
  ExperimentConfig cfg;
  std::vector<BudgetSpec> budgets;
  std::filesystem::path out = ".";
  int threads = 0;
};

struct RegimeRun {
  Index budget = 0;
  std::vector<RegimePoint> points;
  ResultTable table;
};

std::vector<RegimeRun> cmd_regime_map(const RegimeArgs& args);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcslab
