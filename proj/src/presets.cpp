#include "qcslab/presets.hpp"

namespace qcslab {

namespace {

ExperimentConfig base(Index n, Index k) {
  ExperimentConfig c;
  c.n = n;
  c.k = k;
  c.trials = 100;
  c.master_seed = 20120901;
  c.isnr_list = {35.0, 20.0, 10.0, 5.0};
  return c;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int b = lo; b <= hi; ++b) v.push_back(b);
  return v;
}

}  // namespace

std::vector<PresetInfo> preset_list() {
  return {
      {"fig1", "bound curves: inner term on B=2..12 at ISNR 35,20,10,5 dB"},
      {"fig2", "oracle LS, N=1000 K=10, budget 3N, B=2..12, ISNR 35,20,10,5 dB, 100 trials"},
      {"fig3", "BPDN + BIHT, N=1000 K=10, budgets N/2..7N, B=1,2,4,6,8,10,12, 100 trials"},
      {"fig4", "regime map, N=1000 K=10, budgets N,2N,5N, ISNR 5..45 dB, B=1..12, 100 trials"},
      {"ci", "reduced regime map, N=256 K=4, budget 2N, B=1..12, ISNR 35,20,10,5 dB, 30 trials"},
      {"k60", "fig3 layout with K=60"},
  };
}

std::optional<ExperimentConfig> preset_config(std::string_view name) {
  if (name == "fig2") {
    auto c = base(1000, 10);
    c.budgets = {BudgetSpec{3.0, true}};
    c.bit_grid = range(2, 12);
    c.algorithms = {Algorithm::OracleLS};
    return c;
  }
  if (name == "fig3" || name == "k60") {
    auto c = base(1000, name == "k60" ? 60 : 10);
    c.budgets = {BudgetSpec{0.5, true}, BudgetSpec{1.0, true}, BudgetSpec{2.0, true},
                 BudgetSpec{3.0, true}, BudgetSpec{4.0, true}, BudgetSpec{5.0, true},
                 BudgetSpec{6.0, true}, BudgetSpec{7.0, true}};
    c.bit_grid = {1, 2, 4, 6, 8, 10, 12};
    c.algorithms = {Algorithm::BPDN, Algorithm::BihtL1, Algorithm::BihtL2};
    return c;
  }
  if (name == "fig4") {
    auto c = base(1000, 10);
    c.budgets = {BudgetSpec{1.0, true}, BudgetSpec{2.0, true}, BudgetSpec{5.0, true}};
    c.bit_grid = range(1, 12);
    c.isnr_list.clear();
    for (int s = 5; s <= 45; s += 2) c.isnr_list.push_back(s);
    c.algorithms = {Algorithm::BPDN, Algorithm::BihtL1, Algorithm::BihtL2};
    return c;
  }
  if (name == "ci") {
    auto c = base(256, 4);
    c.trials = 30;
    c.budgets = {BudgetSpec{2.0, true}};
    c.bit_grid = range(1, 12);
    c.algorithms = {Algorithm::BPDN, Algorithm::BihtL1, Algorithm::BihtL2};
    return c;
  }
  return std::nullopt;
}

}  // namespace qcslab
