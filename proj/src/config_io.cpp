#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "qcslab/error.hpp"
#include "qcslab/harness.hpp"

namespace qcslab {

using json = nlohmann::json;

namespace {

const char* kResultsHeader =
    "n,k,budget,bit_depth,m,isnr_db,algorithm,trial,rsnr_db,recon_mse,hamming,wall_time_ms,seed";
const char* kAggregateHeader =
    "n,k,budget,bit_depth,m,isnr_db,algorithm,trials,rsnr_mean,rsnr_median,rsnr_std";

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw Error(ErrorKind::Schema, "bad number '" + s + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string tuple_prefix(const TupleId& t) {
  std::ostringstream os;
  os << t.n << ',' << t.k << ',' << t.budget << ',' << t.bit_depth << ',' << t.m << ','
     << fmt_double(t.isnr_db);
  return os.str();
}

TupleId parse_tuple(const std::vector<std::string>& f) {
  TupleId t;
  t.n = std::stoll(f[0]);
  t.k = std::stoll(f[1]);
  t.budget = std::stoll(f[2]);
  t.bit_depth = std::stoi(f[3]);
  t.m = std::stoll(f[4]);
  t.isnr_db = parse_double(f[5]);
  return t;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return os;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != header) {
    throw Error(ErrorKind::Schema, path.string() + ": unexpected header");
  }
  const std::size_t columns = split_csv_line(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != columns) throw Error(ErrorKind::Schema, path.string() + ": wrong column count");
    rows.push_back(std::move(f));
  }
  return rows;
}

// Field accessors that name the offending path in their errors.
const json& require(const json& j, const std::string& key) {
  if (!j.contains(key)) throw Error(ErrorKind::Schema, "missing required field '" + key + "'");
  return j.at(key);
}

template <class T>
T as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Schema, "field '" + path + "' has the wrong type");
  }
}

std::vector<int> parse_bit_grid(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto dots = s.find("..");
    if (dots == std::string::npos) throw Error(ErrorKind::Schema, "field 'bit_grid' range must be 'a..b'");
    int lo = 0, hi = 0;
    try {
      lo = std::stoi(s.substr(0, dots));
      hi = std::stoi(s.substr(dots + 2));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Schema, "field 'bit_grid' range must be 'a..b'");
    }
    std::vector<int> out;
    for (int b = lo; b <= hi; ++b) out.push_back(b);
    return out;
  }
  if (!j.is_array()) throw Error(ErrorKind::Schema, "field 'bit_grid' must be a list or 'a..b'");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as<int>(j[i], "bit_grid[" + std::to_string(i) + "]"));
  return out;
}

SolverOptions parse_solver(const json& j, SolverOptions base, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorKind::Schema, "field '" + path + "' must be an object");
  if (j.contains("max_iter")) base.max_iter = as<int>(j["max_iter"], path + ".max_iter");
  if (j.contains("step_tau")) base.step_tau = as<double>(j["step_tau"], path + ".step_tau");
  if (j.contains("tol")) base.tol = as<double>(j["tol"], path + ".tol");
  if (j.contains("debias")) base.debias = as<bool>(j["debias"], path + ".debias");
  return base;
}

json solver_json(const SolverOptions& o) {
  return json{{"max_iter", o.max_iter}, {"step_tau", o.step_tau}, {"tol", o.tol}, {"debias", o.debias}};
}

}  // namespace

Index BudgetSpec::resolve(Index n) const {
  return relative ? static_cast<Index>(std::llround(value * static_cast<double>(n)))
                  : static_cast<Index>(value);
}

std::string BudgetSpec::str() const {
  if (!relative) return std::to_string(static_cast<long long>(value));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf) + "N";
}

BudgetSpec BudgetSpec::parse(const std::string& raw) {
  std::string s = raw;
  BudgetSpec b;
  if (!s.empty() && (s.back() == 'N' || s.back() == 'n')) {
    s.pop_back();
    if (!s.empty() && (s.back() == 'x' || s.back() == '*')) s.pop_back();
    b.relative = true;
    b.value = 1.0;
    if (!s.empty()) {
      std::size_t pos = 0;
      try {
        b.value = std::stod(s, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != s.size() || pos == 0) throw Error(ErrorKind::Schema, "bad budget '" + raw + "'");
    }
  } else {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || pos == 0) throw Error(ErrorKind::Schema, "bad budget '" + raw + "'");
    b.relative = false;
    b.value = static_cast<double>(v);
  }
  if (!(b.value > 0.0)) throw Error(ErrorKind::Schema, "budget must be positive: '" + raw + "'");
  return b;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Schema, "config must be a JSON object");

  ExperimentConfig cfg;
  cfg.n = as<Index>(require(j, "n"), "n");
  cfg.k = as<Index>(require(j, "k"), "k");
  cfg.trials = as<int>(require(j, "trials"), "trials");
  if (j.contains("sigma_x2")) cfg.sigma_x2 = as<double>(j["sigma_x2"], "sigma_x2");
  if (j.contains("sigma_e2")) cfg.sigma_e2 = as<double>(j["sigma_e2"], "sigma_e2");
  if (j.contains("master_seed")) cfg.master_seed = as<std::uint64_t>(j["master_seed"], "master_seed");

  const json& budgets = require(j, "budgets");
  if (!budgets.is_array()) throw Error(ErrorKind::Schema, "field 'budgets' must be a list");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    const std::string path = "budgets[" + std::to_string(i) + "]";
    if (budgets[i].is_string()) {
      cfg.budgets.push_back(BudgetSpec::parse(budgets[i].get<std::string>()));
    } else {
      const auto v = as<long long>(budgets[i], path);
      cfg.budgets.push_back(BudgetSpec{static_cast<double>(v), false});
    }
  }
  cfg.bit_grid = parse_bit_grid(require(j, "bit_grid"));

  const json& isnr = require(j, "isnr_list");
  if (!isnr.is_array()) throw Error(ErrorKind::Schema, "field 'isnr_list' must be a list");
  for (std::size_t i = 0; i < isnr.size(); ++i) {
    const std::string path = "isnr_list[" + std::to_string(i) + "]";
    if (isnr[i].is_string() && isnr[i].get<std::string>() == "inf") {
      cfg.isnr_list.push_back(std::numeric_limits<double>::infinity());
    } else {
      cfg.isnr_list.push_back(as<double>(isnr[i], path));
    }
  }

  if (j.contains("algorithms")) {
    cfg.algorithms.clear();
    const json& algos = j["algorithms"];
    if (!algos.is_array()) throw Error(ErrorKind::Schema, "field 'algorithms' must be a list");
    for (std::size_t i = 0; i < algos.size(); ++i) {
      cfg.algorithms.push_back(parse_algorithm(as<std::string>(algos[i], "algorithms[" + std::to_string(i) + "]")));
    }
  }
  if (j.contains("matrix_kind")) cfg.matrix_kind = parse_matrix_kind(as<std::string>(j["matrix_kind"], "matrix_kind"));
  if (j.contains("quantizer")) cfg.quantizer = parse_quantizer_kind(as<std::string>(j["quantizer"], "quantizer"));
  if (j.contains("bpdn")) cfg.bpdn = parse_solver(j["bpdn"], cfg.bpdn, "bpdn");
  if (j.contains("biht")) cfg.biht = parse_solver(j["biht"], cfg.biht, "biht");

  validate(cfg);
  return cfg;
}

ExperimentConfig read_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["k"] = cfg.k;
  j["sigma_x2"] = cfg.sigma_x2;
  j["sigma_e2"] = cfg.sigma_e2;
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  json budgets = json::array();
  for (const auto& b : cfg.budgets) {
    if (b.relative) {
      budgets.push_back(b.str());
    } else {
      budgets.push_back(static_cast<long long>(b.value));
    }
  }
  j["budgets"] = budgets;
  j["bit_grid"] = cfg.bit_grid;
  json isnr = json::array();
  for (double v : cfg.isnr_list) {
    if (std::isinf(v)) {
      isnr.push_back("inf");
    } else {
      isnr.push_back(v);
    }
  }
  j["isnr_list"] = isnr;
  json algos = json::array();
  for (Algorithm a : cfg.algorithms) algos.push_back(to_string(a));
  j["algorithms"] = algos;
  j["matrix_kind"] = to_string(cfg.matrix_kind);
  j["quantizer"] = to_string(cfg.quantizer);
  j["bpdn"] = solver_json(cfg.bpdn);
  j["biht"] = solver_json(cfg.biht);
  return j.dump(2) + "\n";
}

void write_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << config_to_json(cfg);
}

void write_results(const ResultTable& table, const std::filesystem::path& path, bool include_timing) {
  auto os = open_out(path);
  os << kResultsHeader << '\n';
  for (const auto& r : table.rows) {
    os << tuple_prefix(r.params) << ',' << to_string(r.algorithm) << ',' << r.trial_index << ','
       << fmt_double(r.rsnr_db) << ',' << fmt_double(r.recon_mse) << ','
       << (r.hamming ? fmt_double(*r.hamming) : std::string()) << ','
       << fmt_double(include_timing ? r.wall_time_ms : 0.0) << ',' << r.seed << '\n';
  }
  if (!os) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

void write_aggregates(const ResultTable& table, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << kAggregateHeader << '\n';
  for (const auto& a : table.aggregates) {
    os << tuple_prefix(a.params) << ',' << to_string(a.algorithm) << ',' << a.trials << ','
       << fmt_double(a.rsnr_mean) << ',' << fmt_double(a.rsnr_median) << ','
       << fmt_double(a.rsnr_std) << '\n';
  }
  if (!os) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

std::vector<TrialResult> read_results(const std::filesystem::path& path) {
  std::vector<TrialResult> out;
  for (const auto& f : read_csv(path, kResultsHeader)) {
    TrialResult r;
    r.params = parse_tuple(f);
    r.algorithm = parse_algorithm(f[6]);
    r.trial_index = std::stoi(f[7]);
    r.rsnr_db = parse_double(f[8]);
    r.recon_mse = parse_double(f[9]);
    if (!f[10].empty()) r.hamming = parse_double(f[10]);
    r.wall_time_ms = parse_double(f[11]);
    r.seed = std::stoull(f[12]);
    out.push_back(r);
  }
  return out;
}

std::vector<Aggregate> read_aggregates(const std::filesystem::path& path) {
  std::vector<Aggregate> out;
  for (const auto& f : read_csv(path, kAggregateHeader)) {
    Aggregate a;
    a.params = parse_tuple(f);
    a.algorithm = parse_algorithm(f[6]);
    a.trials = std::stoi(f[7]);
    a.rsnr_mean = parse_double(f[8]);
    a.rsnr_median = parse_double(f[9]);
    a.rsnr_std = parse_double(f[10]);
    out.push_back(a);
  }
  return out;
}

}  // namespace qcslab
