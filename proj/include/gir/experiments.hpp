#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gir/infer.hpp"
#include "gir/types.hpp"

namespace gir {

/// Coefficient of interest: entry (row, col) of Phi_lag^{(h)}, all 1-based.
struct TargetSpec {
  int lag = 1;
  int row = 1;
  int col = 1;
  std::string label() const;
};

struct MethodSpec {
  FitMethod method = FitMethod::two_stage;
  int delta = 0;
  bool bootstrap = false;  // percentile-t intervals instead of z
  std::string label() const;
};

MethodSpec parse_method(const std::string& name);
TargetSpec parse_target(const std::string& name);

struct McConfig {
  DgpSpec dgp;
  int sample_size = 250;
  int replications = 1000;
  int bootstrap_draws = 500;
  int burn_in = 0;
  std::vector<int> horizons;
  std::vector<MethodSpec> methods;
  std::vector<TargetSpec> targets;
  double level = 0.95;
  std::uint64_t master_seed = 42;
  bool intercept = true;
  int hac_bandwidth = -1;

  void validate() const;
};

struct McCell {
  std::string method;
  std::string target;
  int horizon = 0;
  double true_value = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double empirical_size = 0.0;
  double coverage = 0.0;
  double avg_ci_width = 0.0;
  int n_used = 0;
  int n_failed = 0;
  bool flagged = false;  // more than 5% of replications failed
};

struct McSummary {
  McConfig config;
  std::vector<McCell> cells;

  const McCell& cell(const std::string& method, const std::string& target, int horizon) const;
};

/// Replication-parallel Monte Carlo study; output is identical for any
/// worker count under a fixed master seed.
McSummary run_mc(const McConfig& config, int threads = 1);

enum class EfficiencyCategory { ls_better, g2s_0_10, g2s_10_30, g2s_30plus };

const char* efficiency_category_name(EfficiencyCategory c);

struct EfficiencyCell {
  double rho1 = 0.0;
  double rho2 = 0.0;
  int h = 1;
  int target_lag = 1;  // 1 or 2: which AR(2) projection coefficient
  double sd_ls = 0.0;
  double sd_2s = 0.0;
  double ratio = 0.0;  // sd_2s / sd_ls
  EfficiencyCategory category = EfficiencyCategory::ls_better;
  bool skipped = false;
  std::string skip_reason;
};

/// Closed-form asymptotic standard deviations on the AR(2) grid.
std::vector<EfficiencyCell> efficiency_grid(const std::vector<double>& rho2_values, double rho1_lo,
                                            double rho1_hi, double rho1_step,
                                            const std::vector<int>& horizons);

/// Aligned text report shaped like the study tables (methods x horizons,
/// one block per metric panel and target).
std::string compare_methods_report(const McSummary& summary);

/// Per-panel CSVs (value, bias, rmse, size, coverage, width).
void write_mc_csv(const McSummary& summary, const std::string& out_dir);

void write_efficiency_csv(const std::vector<EfficiencyCell>& cells, const std::string& path);

}  // namespace gir
