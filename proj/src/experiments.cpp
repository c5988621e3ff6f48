#include "gir/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gir/model.hpp"
#include "gir/parallel.hpp"
#include "gir/simulate.hpp"
#include "gir/stats.hpp"

namespace gir {

std::string TargetSpec::label() const {
  std::ostringstream os;
  os << "phi" << lag << "[" << row << "," << col << "]";
  return os.str();
}

std::string MethodSpec::label() const {
  switch (method) {
    case FitMethod::rc_var: return "rc_var";
    case FitMethod::ls_proj: return "ls_proj";
    case FitMethod::two_stage_infeasible: return "2s_infeasible(" + std::to_string(delta) + ")";
    case FitMethod::two_stage: break;
  }
  std::string s = "2s(" + std::to_string(delta) + ")";
  if (bootstrap) s += "b";
  return s;
}

MethodSpec parse_method(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '_') s += static_cast<char>(std::tolower(c));
  }
  MethodSpec m;
  if (s == "rcvar") {
    m.method = FitMethod::rc_var;
    return m;
  }
  if (s == "lsproj") {
    m.method = FitMethod::ls_proj;
    return m;
  }
  if (s.rfind("2s(", 0) == 0 && s.size() >= 5 && s[4] == ')') {
    m.method = FitMethod::two_stage;
    m.delta = s[3] - '0';
    if (m.delta < 0 || m.delta > 2) fail(ErrorCode::invalid_config, "bad lag augmentation in " + name);
    std::string tail = s.substr(5);
    if (tail == "b") {
      m.bootstrap = true;
    } else if (!tail.empty()) {
      fail(ErrorCode::invalid_config, "unknown method: " + name);
    }
    return m;
  }
  fail(ErrorCode::invalid_config, "unknown method: " + name);
}

TargetSpec parse_target(const std::string& name) {
  // phi<lag>[<row>,<col>]
  TargetSpec t;
  if (std::sscanf(name.c_str(), "phi%d[%d,%d]", &t.lag, &t.row, &t.col) != 3) {
    fail(ErrorCode::invalid_config, "bad target descriptor: " + name + " (expect phi<lag>[<row>,<col>])");
  }
  if (t.lag < 1 || t.row < 1 || t.col < 1) fail(ErrorCode::invalid_config, "target indices are 1-based");
  return t;
}

void McConfig::validate() const {
  if (replications < 1) fail(ErrorCode::invalid_config, "replications must be >= 1");
  if (horizons.empty()) fail(ErrorCode::invalid_config, "no horizons configured");
  if (methods.empty()) fail(ErrorCode::invalid_config, "no methods configured");
  if (targets.empty()) fail(ErrorCode::invalid_config, "no targets configured");
  int hmax = *std::max_element(horizons.begin(), horizons.end());
  int p = static_cast<int>(dgp.roots.size());
  for (int h : horizons) {
    if (h < 1) fail(ErrorCode::invalid_config, "horizons must be >= 1");
  }
  if (sample_size <= hmax + p) fail(ErrorCode::invalid_config, "sample size must exceed max horizon + p");
  if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::invalid_config, "level must be in (0,1)");
  if (bootstrap_draws < 100) {
    for (const MethodSpec& m : methods) {
      if (m.bootstrap) fail(ErrorCode::invalid_config, "bootstrap methods need bootstrap_draws >= 100");
    }
  }
}

const McCell& McSummary::cell(const std::string& method, const std::string& target, int horizon) const {
  for (const McCell& c : cells) {
    if (c.method == method && c.target == target && c.horizon == horizon) return c;
  }
  fail(ErrorCode::invalid_spec, "no such cell: " + method + " / " + target + " / h=" + std::to_string(horizon));
}

namespace {

struct RepRecord {
  double estimate = 0.0;
  double width = 0.0;
  char covered = 0;
  char rejected = 0;
  char failed = 1;
};

}  // namespace

McSummary run_mc(const McConfig& config, int threads) {
  config.validate();
  VarParams truth = dgp_from_roots(config.dgp);
  const int p = truth.p, k = truth.k;
  const int hmax = *std::max_element(config.horizons.begin(), config.horizons.end());
  auto girs = gir_recursion(truth, hmax);

  const int n_methods = static_cast<int>(config.methods.size());
  const int n_targets = static_cast<int>(config.targets.size());
  const int n_horizons = static_cast<int>(config.horizons.size());
  const int n_cells = n_methods * n_horizons * n_targets;
  auto cell_index = [&](int mi, int hi, int ti) { return (mi * n_horizons + hi) * n_targets + ti; };

  for (const TargetSpec& t : config.targets) {
    if (t.lag > p || t.row > k || t.col > k) fail(ErrorCode::invalid_config, "target outside the DGP shape");
  }

  std::vector<double> true_values(n_horizons * n_targets);
  for (int hi = 0; hi < n_horizons; ++hi) {
    for (int ti = 0; ti < n_targets; ++ti) {
      const TargetSpec& t = config.targets[ti];
      true_values[hi * n_targets + ti] = girs[config.horizons[hi] - 1].coeffs[t.lag - 1](t.row - 1, t.col - 1);
    }
  }

  const double zcrit = normal_quantile(0.5 * (1.0 + config.level));
  std::vector<RepRecord> records(static_cast<std::size_t>(config.replications) * n_cells);

  parallel_for(config.replications, threads, [&](std::int64_t rep) {
    RngStream rep_rng(config.master_seed, static_cast<std::uint64_t>(rep));
    RngStream sim_rng = rep_rng.substream(0);
    SeriesPanel panel = simulate_var(truth, config.sample_size, config.dgp.innovation, sim_rng, config.burn_in);
    RepRecord* rec = records.data() + static_cast<std::size_t>(rep) * n_cells;

    VarFit var_fit;
    bool var_ok = true;
    try {
      var_fit = fit_var_ls(panel, p, config.intercept);
    } catch (const Error&) {
      var_ok = false;
    }

    for (int mi = 0; mi < n_methods; ++mi) {
      const MethodSpec& m = config.methods[mi];
      for (int hi = 0; hi < n_horizons; ++hi) {
        const int h = config.horizons[hi];
        // One fit per distinct target row.
        for (int ti = 0; ti < n_targets; ++ti) {
          const TargetSpec& tgt = config.targets[ti];
          RepRecord& r = rec[cell_index(mi, hi, ti)];
          const double tv = true_values[hi * n_targets + ti];
          const int coeff = (tgt.lag - 1) * k + (tgt.col - 1);
          try {
            if (!var_ok) fail(ErrorCode::collinearity, "first-stage VAR failed");
            const int row = tgt.row - 1;
            if (m.bootstrap) {
              EstimatorSpec es;
              es.method = FitMethod::two_stage;
              es.p = p;
              es.delta = m.delta;
              es.target_row = row;
              es.intercept = config.intercept;
              Vec w = Vec::Zero(p * k);
              w(coeff) = 1.0;
              RngStream boot_rng = rep_rng.substream(1 + static_cast<std::uint64_t>(mi) * 64 + hi);
              CiResult ci = bootstrap_ti(panel, es, h, w, config.bootstrap_draws, config.level, boot_rng, 1);
              ProjectionFit pf = two_stage_with_fit(panel, var_fit, h, m.delta, row, config.intercept);
              r.estimate = pf.beta(coeff);
              r.width = ci.upper - ci.lower;
              r.covered = (tv >= ci.lower && tv <= ci.upper) ? 1 : 0;
              r.rejected = r.covered ? 0 : 1;
            } else {
              ProjectionFit pf;
              switch (m.method) {
                case FitMethod::rc_var:
                  pf = rc_var_gir(var_fit, h, row);
                  break;
                case FitMethod::ls_proj:
                  pf = ls_projection(panel, p, h, row, config.intercept, config.hac_bandwidth);
                  break;
                case FitMethod::two_stage:
                case FitMethod::two_stage_infeasible:
                  pf = two_stage_with_fit(panel, var_fit, h, m.delta, row, config.intercept);
                  break;
              }
              double se = pf.se(coeff);
              r.estimate = pf.beta(coeff);
              r.width = 2.0 * zcrit * se;
              double zstat = se > 0.0 ? (pf.beta(coeff) - tv) / se : (pf.beta(coeff) == tv ? 0.0 : 1e300);
              r.rejected = std::fabs(zstat) > zcrit ? 1 : 0;
              r.covered = r.rejected ? 0 : 1;
            }
            r.failed = 0;
          } catch (const Error&) {
            r.failed = 1;
          }
        }
      }
    }
  });

  McSummary summary;
  summary.config = config;
  summary.cells.reserve(n_cells);
  for (int mi = 0; mi < n_methods; ++mi) {
    for (int hi = 0; hi < n_horizons; ++hi) {
      for (int ti = 0; ti < n_targets; ++ti) {
        McCell cell;
        cell.method = config.methods[mi].label();
        cell.target = config.targets[ti].label();
        cell.horizon = config.horizons[hi];
        cell.true_value = true_values[hi * n_targets + ti];
        double sum = 0.0, sumsq = 0.0, wsum = 0.0;
        int used = 0, covered = 0, rejected = 0;
        for (int rep = 0; rep < config.replications; ++rep) {
          const RepRecord& r = records[static_cast<std::size_t>(rep) * n_cells + cell_index(mi, hi, ti)];
          if (r.failed) continue;
          ++used;
          double dev = r.estimate - cell.true_value;
          sum += dev;
          sumsq += dev * dev;
          wsum += r.width;
          covered += r.covered;
          rejected += r.rejected;
        }
        cell.n_used = used;
        cell.n_failed = config.replications - used;
        cell.flagged = cell.n_failed * 20 > config.replications;
        if (used > 0) {
          cell.bias = sum / used;
          cell.rmse = std::sqrt(sumsq / used);
          cell.empirical_size = static_cast<double>(rejected) / used;
          cell.coverage = static_cast<double>(covered) / used;
          cell.avg_ci_width = wsum / used;
        }
        summary.cells.push_back(std::move(cell));
      }
    }
  }
  return summary;
}

const char* efficiency_category_name(EfficiencyCategory c) {
  switch (c) {
    case EfficiencyCategory::ls_better: return "ls_better";
    case EfficiencyCategory::g2s_0_10: return "2s_0_10";
    case EfficiencyCategory::g2s_10_30: return "2s_10_30";
    case EfficiencyCategory::g2s_30plus: return "2s_30plus";
  }
  return "?";
}

std::vector<EfficiencyCell> efficiency_grid(const std::vector<double>& rho2_values, double rho1_lo,
                                            double rho1_hi, double rho1_step,
                                            const std::vector<int>& horizons) {
  if (rho1_step <= 0.0) fail(ErrorCode::invalid_spec, "rho1 step must be positive");
  std::vector<EfficiencyCell> cells;
  for (double rho2 : rho2_values) {
    for (double rho1 = rho1_lo; rho1 <= rho1_hi + 1e-12; rho1 += rho1_step) {
      VarParams ar2;
      ar2.k = 1;
      ar2.p = 2;
      ar2.phi = {Mat::Constant(1, 1, rho1 + rho2), Mat::Constant(1, 1, -rho1 * rho2)};
      ar2.sigma_u = Mat::Identity(1, 1);
      bool explosive = std::fabs(rho1) >= 1.0 || std::fabs(rho2) >= 1.0;
      for (int h : horizons) {
        for (int lag = 1; lag <= 2; ++lag) {
          EfficiencyCell cell;
          cell.rho1 = rho1;
          cell.rho2 = rho2;
          cell.h = h;
          cell.target_lag = lag;
          if (explosive) {
            cell.skipped = true;
            cell.skip_reason = "root on or outside the unit circle";
            cells.push_back(cell);
            continue;
          }
          Mat ols = omega_ls_closed(ar2, h);
          Mat o2s = omega_beta_closed(ar2, h);
          cell.sd_ls = std::sqrt(ols(lag - 1, lag - 1));
          cell.sd_2s = std::sqrt(o2s(lag - 1, lag - 1));
          cell.ratio = cell.sd_2s / cell.sd_ls;
          if (cell.ratio >= 1.0) {
            cell.category = EfficiencyCategory::ls_better;
          } else if (cell.ratio > 0.9) {
            cell.category = EfficiencyCategory::g2s_0_10;
          } else if (cell.ratio > 0.7) {
            cell.category = EfficiencyCategory::g2s_10_30;
          } else {
            cell.category = EfficiencyCategory::g2s_30plus;
          }
          cells.push_back(cell);
        }
      }
    }
  }
  return cells;
}

namespace {

const char* kPanelNames[] = {"bias", "rmse", "size", "coverage", "width"};

double panel_value(const McCell& c, int panel) {
  switch (panel) {
    case 0: return c.bias;
    case 1: return c.rmse;
    case 2: return c.empirical_size;
    case 3: return c.coverage;
    default: return c.avg_ci_width;
  }
}

}  // namespace

std::string compare_methods_report(const McSummary& summary) {
  if (summary.cells.empty()) fail(ErrorCode::invalid_spec, "empty summary");
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  for (const TargetSpec& tgt : summary.config.targets) {
    os << "target " << tgt.label() << "  (true value per horizon)\n";
    os << std::setw(12) << "h";
    for (int h : summary.config.horizons) os << std::setw(10) << h;
    os << "\n" << std::setw(12) << "value";
    for (int h : summary.config.horizons) {
      os << std::setw(10) << summary.cell(summary.config.methods.front().label(), tgt.label(), h).true_value;
    }
    os << "\n";
    for (int panel = 0; panel < 5; ++panel) {
      os << "-- " << kPanelNames[panel] << "\n";
      for (const MethodSpec& m : summary.config.methods) {
        os << std::setw(12) << m.label();
        for (int h : summary.config.horizons) {
          const McCell& c = summary.cell(m.label(), tgt.label(), h);
          os << std::setw(10) << panel_value(c, panel);
        }
        os << "\n";
      }
    }
    os << "\n";
  }
  int failed = 0;
  for (const McCell& c : summary.cells) failed += c.n_failed;
  if (failed > 0) os << "replication failures across cells: " << failed << "\n";
  return os.str();
}

void write_mc_csv(const McSummary& summary, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (int panel = 0; panel < 5; ++panel) {
    std::ofstream f(fs::path(out_dir) / ("mc_" + std::string(kPanelNames[panel]) + ".csv"));
    f << "method,target";
    for (int h : summary.config.horizons) f << ",h" << h;
    f << "\n";
    f << std::setprecision(10);
    for (const MethodSpec& m : summary.config.methods) {
      for (const TargetSpec& t : summary.config.targets) {
        f << m.label() << "," << t.label();
        for (int h : summary.config.horizons) f << "," << panel_value(summary.cell(m.label(), t.label(), h), panel);
        f << "\n";
      }
    }
  }
  std::ofstream f(fs::path(out_dir) / "mc_true_values.csv");
  f << "target";
  for (int h : summary.config.horizons) f << ",h" << h;
  f << "\n" << std::setprecision(10);
  for (const TargetSpec& t : summary.config.targets) {
    f << t.label();
    for (int h : summary.config.horizons) {
      f << "," << summary.cell(summary.config.methods.front().label(), t.label(), h).true_value;
    }
    f << "\n";
  }
}

void write_efficiency_csv(const std::vector<EfficiencyCell>& cells, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::parse_error, "cannot open " + path);
  f << "rho1,rho2,h,target_lag,sd_ls,sd_2s,ratio,category\n";
  f << std::setprecision(10);
  for (const EfficiencyCell& c : cells) {
    f << c.rho1 << "," << c.rho2 << "," << c.h << "," << c.target_lag << ",";
    if (c.skipped) {
      f << ",,,skipped:" << c.skip_reason << "\n";
    } else {
      f << c.sd_ls << "," << c.sd_2s << "," << c.ratio << "," << efficiency_category_name(c.category) << "\n";
    }
  }
}

}  // namespace gir
