#include "qcslab/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include "qcslab/error.hpp"
#include "qcslab/plot.hpp"
#include "qcslab/presets.hpp"

namespace qcslab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw Error(ErrorKind::InvalidParameter, "bad integer '" + s + "'");
  return v;
}

std::string g(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return os;
}

void write_failures(const ResultTable& table, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "n,k,budget,bit_depth,m,isnr_db,algorithm,trial,kind,reason\n";
  auto emit = [&](const SkipRecord& s, const char* kind) {
    std::string reason = s.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    os << s.params.n << ',' << s.params.k << ',' << s.params.budget << ',' << s.params.bit_depth
       << ',' << s.params.m << ',' << g(s.params.isnr_db) << ',' << to_string(s.algorithm) << ','
       << s.trial_index << ',' << kind << ',' << reason << '\n';
  };
  for (const auto& s : table.skips) emit(s, "skip");
  for (const auto& f : table.failures) emit(f, "failure");
}

// RSNR against budget (in units of N), one series per (bit depth, algorithm).
void plot_rsnr_vs_budget(const ResultTable& table, const ExperimentConfig& cfg,
                         const std::filesystem::path& out) {
  for (double isnr : cfg.isnr_list) {
    PlotSpec spec;
    spec.title = "RSNR vs bit budget, ISNR " + isnr_tag(isnr) + " dB";
    spec.x_label = "bit budget / N";
    spec.y_label = "mean RSNR (dB)";
    for (int b : cfg.bit_grid) {
      for (Algorithm a : cfg.algorithms) {
        PlotSeries s;
        s.label = "B=" + std::to_string(b) + " " + to_string(a);
        for (const auto& agg : table.aggregates) {
          if (agg.params.isnr_db != isnr || agg.params.bit_depth != b || agg.algorithm != a) continue;
          s.x.push_back(static_cast<double>(agg.params.budget) / static_cast<double>(cfg.n));
          s.y.push_back(agg.rsnr_mean);
        }
        if (!s.x.empty()) spec.series.push_back(std::move(s));
      }
    }
    if (!spec.series.empty()) render_svg(spec, out / ("rsnr_vs_budget_isnr" + isnr_tag(isnr) + ".svg"));
  }
}

// Mean squared error against bit depth per budget and algorithm, argmin marked.
void plot_error_vs_bits(const ResultTable& table, const ExperimentConfig& cfg,
                        const std::filesystem::path& out) {
  for (const auto& bs : cfg.budgets) {
    const Index budget = bs.resolve(cfg.n);
    for (double isnr : cfg.isnr_list) {
      PlotSpec spec;
      spec.title = "Reconstruction error, budget " + std::to_string(budget) + ", ISNR " +
                   isnr_tag(isnr) + " dB";
      spec.x_label = "bit depth B";
      spec.y_label = "mean squared error";
      for (Algorithm a : cfg.algorithms) {
        PlotSeries s;
        s.label = to_string(a);
        double best = std::numeric_limits<double>::infinity();
        PlotMarker mk;
        for (const auto& agg : table.aggregates) {
          if (agg.params.budget != budget || agg.params.isnr_db != isnr || agg.algorithm != a) continue;
          s.x.push_back(agg.params.bit_depth);
          s.y.push_back(agg.mse_mean);
          if (agg.mse_mean < best) {
            best = agg.mse_mean;
            mk = {static_cast<double>(agg.params.bit_depth), agg.mse_mean, false};
          }
        }
        if (s.x.empty()) continue;
        spec.series.push_back(std::move(s));
        spec.markers.push_back(mk);
      }
      if (!spec.series.empty()) {
        render_svg(spec, out / ("error_vs_bits_budget" + std::to_string(budget) + "_isnr" +
                                isnr_tag(isnr) + ".svg"));
      }
    }
  }
}

void print_summary(const ResultTable& table, std::ostream& out) {
  out << "rows: " << table.rows.size() << ", aggregates: " << table.aggregates.size()
      << ", skipped (tuple, algorithm) pairs: " << table.skips.size()
      << ", failed trials: " << table.failures.size() << '\n';
  std::size_t unconverged = 0;
  for (const auto& r : table.rows) unconverged += r.converged ? 0 : 1;
  if (unconverged > 0) out << "unconverged solver runs: " << unconverged << '\n';
  const std::size_t shown = std::min<std::size_t>(table.failures.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& f = table.failures[i];
    out << "  failure: B=" << f.params.bit_depth << " M=" << f.params.m << " ISNR=" << g(f.params.isnr_db)
        << " " << to_string(f.algorithm) << " trial " << f.trial_index << ": " << f.reason << '\n';
  }
}

int exit_code_for(const ResultTable& table) {
  if (table.rows.empty()) return kExitRuntime;
  return table.failures.empty() ? kExitOk : kExitPartial;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  const std::string t = trim(text);
  const auto dots = t.find("..");
  std::vector<int> out;
  if (dots != std::string::npos) {
    const int lo = to_int(trim(t.substr(0, dots)));
    const int hi = to_int(trim(t.substr(dots + 2)));
    if (hi < lo) throw Error(ErrorKind::InvalidParameter, "empty range '" + text + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  for (const auto& part : split(t, ',')) out.push_back(to_int(part));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(trim(text), ',')) {
    if (part == "inf") {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != part.size()) throw Error(ErrorKind::InvalidParameter, "bad number '" + part + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<BudgetSpec> parse_budget_list(const std::string& text) {
  std::vector<BudgetSpec> out;
  for (const auto& part : split(trim(text), ',')) out.push_back(BudgetSpec::parse(part));
  return out;
}

std::string isnr_tag(double isnr_db) {
  if (std::isinf(isnr_db)) return isnr_db > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", isnr_db);
  return buf;
}

std::vector<BoundCurve> cmd_bound_curve(const BoundCurveArgs& args) {
  if (args.isnr.empty()) throw Error(ErrorKind::InvalidParameter, "no ISNR values given");
  std::filesystem::create_directories(args.out);
  std::vector<BoundCurve> curves;
  const double budget = static_cast<double>(args.budget.resolve(static_cast<Index>(args.n)));
  for (double isnr : args.isnr) {
    BoundParams p = bound_params_for_isnr(isnr, args.n, args.k, args.sigma_x2, budget);
    p.delta = args.delta;
    p.corr_s = args.corr_s;
    const BoundCurve curve = optimal_bitdepth(p, args.b_min, args.b_max, args.mode);

    const std::string stem = "bound_isnr" + isnr_tag(isnr);
    {
      auto os = open_out(args.out / (stem + ".csv"));
      os << "bit_depth,value,is_min\n";
      for (std::size_t i = 0; i < curve.bit_grid.size(); ++i) {
        os << curve.bit_grid[i] << ',' << g(curve.values[i]) << ','
           << (curve.bit_grid[i] == curve.argmin_b ? 1 : 0) << '\n';
      }
    }
    PlotSpec spec;
    spec.title = "ISNR = " + isnr_tag(isnr) + " dB, optimal bit-depth = " + std::to_string(curve.argmin_b);
    spec.x_label = "bit depth B";
    spec.y_label = args.mode == BoundMode::InnerTerm ? "bound (inner term)" : "MSE bound";
    PlotSeries s;
    s.label = args.mode == BoundMode::InnerTerm ? "inner term" : "full bound";
    for (std::size_t i = 0; i < curve.bit_grid.size(); ++i) {
      s.x.push_back(curve.bit_grid[i]);
      s.y.push_back(curve.values[i]);
    }
    spec.series.push_back(std::move(s));
    const auto idx = static_cast<std::size_t>(curve.argmin_b - curve.bit_grid.front());
    spec.markers.push_back({static_cast<double>(curve.argmin_b), curve.values[idx], false});
    render_svg(spec, args.out / (stem + ".svg"));
    curves.push_back(curve);
  }
  return curves;
}

ResultTable cmd_sweep(const SweepArgs& args) {
  validate(args.cfg);
  std::filesystem::create_directories(args.out);
  SweepOptions opts;
  opts.threads = args.threads;
  ResultTable table = run_sweep(args.cfg, opts);
  write_results(table, args.out / "results.csv", args.timing);
  write_aggregates(table, args.out / "aggregates.csv");
  write_failures(table, args.out / "failures.csv");
  plot_rsnr_vs_budget(table, args.cfg, args.out);
  plot_error_vs_bits(table, args.cfg, args.out);
  return table;
}

std::vector<RegimeRun> cmd_regime_map(const RegimeArgs& args) {
  validate(args.cfg);
  if (args.budgets.empty()) throw Error(ErrorKind::InvalidParameter, "no budget given");
  std::filesystem::create_directories(args.out);
  std::vector<RegimeRun> runs;
  for (const auto& bs : args.budgets) {
    ExperimentConfig cfg = args.cfg;
    cfg.budgets = {bs};
    RegimeRun run;
    run.budget = bs.resolve(cfg.n);
    SweepOptions opts;
    opts.threads = args.threads;
    run.table = run_sweep(cfg, opts);
    run.points = regime_map_from_table(run.table, run.budget);

    const std::string stem = "regime_budget" + std::to_string(run.budget);
    {
      auto os = open_out(args.out / (stem + ".csv"));
      os << "isnr_db,best_b,best_m,best_rsnr,algorithm,regime\n";
      for (const auto& p : run.points) {
        os << g(p.isnr_db) << ',' << p.best_b << ',' << p.best_m << ',' << g(p.best_rsnr) << ','
           << to_string(p.best_algorithm) << ',' << to_string(p.regime) << '\n';
      }
    }
    write_aggregates(run.table, args.out / (stem + "_aggregates.csv"));
    write_failures(run.table, args.out / (stem + "_failures.csv"));

    PlotSpec spec;
    spec.title = "Best (M, B) at budget " + std::to_string(run.budget);
    spec.x_label = "ISNR (dB)";
    spec.y_label = "measurements M";
    spec.y2_label = "bit depth B";
    PlotSeries ms{"M", {}, {}, false, false};
    PlotSeries bsr{"B", {}, {}, true, true};
    for (const auto& p : run.points) {
      ms.x.push_back(p.isnr_db);
      ms.y.push_back(static_cast<double>(p.best_m));
      bsr.x.push_back(p.isnr_db);
      bsr.y.push_back(p.best_b);
    }
    spec.series = {ms, bsr};
    render_svg(spec, args.out / (stem + ".svg"));
    runs.push_back(std::move(run));
  }
  return runs;
}

namespace {

struct ExperimentFlags {
  std::string config;
  std::string preset;
  std::uint64_t seed = 0;
  int trials = 0;
  std::string isnr;
  std::string bits;
  std::string budget;
  std::string out = ".";

  void attach(CLI::App* app) {
    app->add_option("--config", config, "experiment config (JSON)");
    app->add_option("--preset", preset, "named preset (see 'presets list')");
    app->add_option("--seed", seed, "master seed override");
    app->add_option("--trials", trials, "trials per tuple override")->check(CLI::PositiveNumber);
    app->add_option("--isnr", isnr, "ISNR list, e.g. 35,20,10,5");
    app->add_option("--bits", bits, "bit depths, a..b or a,b,c");
    app->add_option("--budget", budget, "bit budgets, e.g. 2N or 3N,5000");
    app->add_option("--out", out, "output directory");
  }

  ExperimentConfig resolve(const CLI::App& app) const {
    ExperimentConfig cfg;
    if (!config.empty() && !preset.empty()) {
      throw Error(ErrorKind::InvalidParameter, "--config and --preset are mutually exclusive");
    }
    if (!config.empty()) {
      cfg = read_config(config);
    } else if (!preset.empty()) {
      auto p = preset_config(preset);
      if (!p) throw Error(ErrorKind::InvalidParameter, "preset '" + preset + "' is not a sweep preset");
      cfg = *p;
    } else {
      throw Error(ErrorKind::InvalidParameter, "one of --config or --preset is required");
    }
    if (app.count("--seed")) cfg.master_seed = seed;
    if (app.count("--trials")) cfg.trials = trials;
    if (!isnr.empty()) cfg.isnr_list = parse_double_list(isnr);
    if (!bits.empty()) cfg.bit_grid = parse_int_list(bits);
    if (!budget.empty()) cfg.budgets = parse_budget_list(budget);
    validate(cfg);
    return cfg;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qcslab: measurement count vs bit depth under a fixed bit budget"};
  app.require_subcommand(1);

  auto* bound = app.add_subcommand("bound-curve", "evaluate the fixed-budget error bound over bit depths");
  std::string b_isnr = "35,20,10,5", b_bits = "2..12", b_mode = "inner", b_budget = "3N", b_out = ".";
  std::string b_preset;
  double b_delta = 0.0, b_corr = 0.0;
  bound->add_option("--isnr", b_isnr, "ISNR list in dB");
  bound->add_option("--bits", b_bits, "bit range a..b");
  bound->add_option("--mode", b_mode, "inner | full")->check(CLI::IsMember({"inner", "full"}));
  bound->add_option("--delta", b_delta, "RIP constant for full mode");
  bound->add_option("--corr-s", b_corr, "correlation term for full mode");
  bound->add_option("--budget", b_budget, "bit budget for full mode");
  bound->add_option("--preset", b_preset, "fig1")->check(CLI::IsMember({"fig1"}));
  bound->add_option("--out", b_out, "output directory");

  auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep");
  ExperimentFlags s_flags;
  bool s_timing = false;
  s_flags.attach(sweep);
  sweep->add_flag("--timing", s_timing, "record wall-clock times (output no longer reproducible)");

  auto* regime = app.add_subcommand("regime-map", "best (M, B) per ISNR at fixed budgets");
  ExperimentFlags r_flags;
  r_flags.attach(regime);

  auto* presets = app.add_subcommand("presets", "preset utilities");
  presets->require_subcommand(1);
  auto* plist = presets->add_subcommand("list", "list presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  ResultTable* summary_table = nullptr;
  ResultTable sweep_table;
  try {
    if (bound->parsed()) {
      BoundCurveArgs a;
      a.isnr = parse_double_list(b_isnr);
      const auto grid = parse_int_list(b_bits);
      a.b_min = grid.front();
      a.b_max = grid.back();
      a.mode = b_mode == "full" ? BoundMode::Full : BoundMode::InnerTerm;
      a.delta = b_delta;
      a.corr_s = b_corr;
      a.budget = BudgetSpec::parse(b_budget);
      a.out = b_out;
      for (const auto& c : cmd_bound_curve(a)) {
        out << "bits " << c.bit_grid.front() << ".." << c.bit_grid.back() << ": argmin B = " << c.argmin_b
            << (c.boundary_argmin ? " (grid boundary)" : "") << '\n';
      }
      return kExitOk;
    }
    if (plist->parsed()) {
      for (const auto& p : preset_list()) out << p.name << "\t" << p.description << '\n';
      return kExitOk;
    }
    if (sweep->parsed()) {
      SweepArgs a;
      a.cfg = s_flags.resolve(*sweep);
      a.out = s_flags.out;
      a.timing = s_timing;
      sweep_table = cmd_sweep(a);
      summary_table = &sweep_table;
    } else if (regime->parsed()) {
      RegimeArgs a;
      a.cfg = r_flags.resolve(*regime);
      a.budgets = a.cfg.budgets;
      a.out = r_flags.out;
      int code = kExitOk;
      for (auto& run : cmd_regime_map(a)) {
        out << "budget " << run.budget << ":\n";
        for (const auto& p : run.points) {
          out << "  ISNR " << g(p.isnr_db) << " dB: B=" << p.best_b << " M=" << p.best_m << " RSNR "
              << p.best_rsnr << " dB (" << to_string(p.best_algorithm) << ", " << to_string(p.regime)
              << ")\n";
        }
        print_summary(run.table, out);
        code = std::max(code, exit_code_for(run.table));
      }
      return code;
    }
  } catch (const Error& e) {
    const bool usage = e.kind() == ErrorKind::InvalidParameter || e.kind() == ErrorKind::Schema;
    err << (usage ? "error: " : "runtime error: ") << e.what() << '\n';
    return usage ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  if (summary_table) {
    print_summary(*summary_table, out);
    return exit_code_for(*summary_table);
  }
  return kExitOk;
}

}  // namespace qcslab
