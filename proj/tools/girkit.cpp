#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gir/io.hpp"
#include "gir/model.hpp"
#include "gir/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream f(path);
  if (!f) gir::fail(gir::ErrorCode::parse_error, "cannot write " + path.string());
  f << text;
}

void emit_result(const std::string& out_dir, const std::string& command,
                 const std::map<std::string, std::string>& echo, std::uint64_t seed,
                 const Timer& timer, const json& outputs) {
  write_file(fs::path(out_dir) / "result.json",
             gir::result_document(command, echo, seed, timer.seconds(), outputs.dump()));
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&]() {
    if (!cur.empty()) {
      out.push_back(std::stoi(cur));
      cur.clear();
    }
  };
  for (char c : s) {
    if (c == ',' || c == ' ') {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

gir::Mat parse_matrix_arg(const std::string& text) {
  gir::ConfigMap m = gir::ConfigMap::parse_string("m = " + text, "<arg>");
  gir::Mat out = m.get_matrix("m");
  m.finish();
  return out;
}

json ci_json(const gir::CiResult& ci) {
  return json{{"lower", ci.lower}, {"upper", ci.upper}, {"level", ci.level}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage estimation and HAC-free inference for multi-horizon projections"};
  app.require_subcommand(1);

  std::string config_path, csv_path, out_dir = "out";
  std::uint64_t seed = 42;
  int threads = 1;
  double level = 0.95;
  int bandwidth = -1;
  int delta = 0;
  int p_order = 2;
  int horizon = 1;
  int sample_size = 250;
  int draws = 500;
  bool no_intercept = false;
  bool bias_correct = false;
  std::string orders_arg = "12,15,18";
  std::string horizons_arg = "1";
  std::string coeff_arg = "phi1[1,1]";
  std::vector<std::string> phi_args;
  std::string dgp_arg;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--threads", threads, "worker threads");
    cmd->add_option("--level", level, "confidence level");
    cmd->add_flag("--no-intercept", no_intercept, "fit without intercepts");
  };

  CLI::App* c_sim = app.add_subcommand("simulate", "simulate a DGP and write the panel CSV");
  c_sim->add_option("--config", config_path, "dgp config file")->required();
  c_sim->add_option("--T", sample_size, "sample size");
  add_common(c_sim);

  CLI::App* c_fit = app.add_subcommand("fit", "LS VAR fit with residual diagnostics");
  c_fit->add_option("--csv", csv_path, "input panel")->required();
  c_fit->add_option("--p", p_order, "lag order");
  c_fit->add_flag("--bias-correct", bias_correct, "apply the slope bias correction");
  add_common(c_fit);

  CLI::App* c_gir = app.add_subcommand("gir", "projection coefficients for given VAR matrices");
  c_gir->add_option("--phi", phi_args, "coefficient matrices, e.g. --phi \"[1.1 -0.2; 0.2 1.1]\"");
  c_gir->add_option("--config", config_path, "dgp config file (alternative to --phi)");
  c_gir->add_option("--h", horizon, "max horizon")->required();
  add_common(c_gir);

  CLI::App* c_caus = app.add_subcommand("causality", "single-order non-causality tests per pair and horizon");
  c_caus->add_option("--csv", csv_path, "input panel")->required();
  c_caus->add_option("--p", p_order, "VAR order");
  c_caus->add_option("--horizons", horizons_arg, "horizons, e.g. 1,3,6 or a max via 1-36");
  c_caus->add_option("--delta", delta, "lag augmentation");
  add_common(c_caus);

  CLI::App* c_mc = app.add_subcommand("mc", "Monte Carlo study from a config file");
  c_mc->add_option("--config", config_path, "mc config file")->required();
  bool seed_given = false;
  c_mc->add_option("--seed", seed, "master seed (overrides config)")->each([&](const std::string&) {
    seed_given = true;
  });
  c_mc->add_option("--out", out_dir, "output directory");
  c_mc->add_option("--threads", threads, "worker threads");

  CLI::App* c_eff = app.add_subcommand("efficiency", "asymptotic efficiency grid (AR(2) closed forms)");
  c_eff->add_option("--h-max", horizon, "max horizon (default 36)");
  add_common(c_eff);

  CLI::App* c_boot = app.add_subcommand("bootstrap", "wild-bootstrap percentile-t interval");
  c_boot->add_option("--csv", csv_path, "input panel")->required();
  c_boot->add_option("--p", p_order, "VAR order");
  c_boot->add_option("--h", horizon, "horizon");
  c_boot->add_option("--delta", delta, "lag augmentation");
  c_boot->add_option("--coeff", coeff_arg, "coefficient, e.g. phi1[1,2]");
  c_boot->add_option("--draws", draws, "bootstrap draws");
  c_boot->add_flag("--bias-correct", bias_correct, "bias-correct the bootstrap VAR (default on)");
  add_common(c_boot);

  CLI::App* c_emp = app.add_subcommand("empirical", "multi-order causality robustness pipeline");
  c_emp->add_option("--csv", csv_path, "input panel")->required();
  c_emp->add_option("--orders", orders_arg, "VAR orders, e.g. 12,15,18");
  c_emp->add_option("--horizons", horizons_arg, "max horizon H (tests h = 1..H)");
  c_emp->add_option("--delta", delta, "lag augmentation");
  add_common(c_emp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  horizon = std::max(horizon, 1);
  Timer timer;
  try {
    if (c_sim->parsed()) {
      gir::ConfigMap cfg = gir::ConfigMap::parse_file(config_path);
      gir::DgpSpec dgp = gir::dgp_from_config(cfg);
      if (cfg.has("mc.sample_size") && sample_size == 250) {
        sample_size = static_cast<int>(cfg.get_int("mc.sample_size"));
      }
      gir::VarParams params = gir::dgp_from_roots(dgp);
      gir::RngStream rng(seed, 0);
      gir::SeriesPanel panel = gir::simulate_var(params, sample_size, dgp.innovation, rng);
      fs::create_directories(out_dir);
      gir::save_csv(panel, (fs::path(out_dir) / "panel.csv").string());
      json out = {{"rows", panel.T()}, {"cols", panel.k()},
                  {"persistence_class", gir::persistence_class(dgp)},
                  {"panel_csv", (fs::path(out_dir) / "panel.csv").string()}};
      emit_result(out_dir, "simulate", {{"config", config_path}, {"T", std::to_string(sample_size)}},
                  seed, timer, out);
      std::cout << "wrote " << (fs::path(out_dir) / "panel.csv").string() << "\n";
    } else if (c_fit->parsed()) {
      gir::SeriesPanel panel = gir::load_csv(csv_path);
      gir::VarFit fit = gir::fit_var_ls(panel, p_order, !no_intercept);
      if (bias_correct) fit = gir::pope_bias_correct(fit);
      json phis = json::array();
      for (const gir::Mat& m : fit.params_hat.phi) {
        json rows = json::array();
        for (int r = 0; r < m.rows(); ++r) {
          json row = json::array();
          for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
          rows.push_back(row);
        }
        phis.push_back(rows);
      }
      json sig = json::array();
      for (int r = 0; r < fit.params_hat.sigma_u.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < fit.params_hat.sigma_u.cols(); ++c) row.push_back(fit.params_hat.sigma_u(r, c));
        sig.push_back(row);
      }
      json out = {{"phi", phis}, {"sigma_u", sig}, {"bias_corrected", fit.bias_corrected},
                  {"bias_correction_skipped", fit.bias_correction_skipped}, {"T", fit.sample_size}};
      fs::create_directories(out_dir);
      gir::SeriesPanel resid;
      resid.data = fit.residuals;
      resid.origin = gir::SeriesPanel::Origin::simulated;
      for (int j = 0; j < fit.params_hat.k; ++j) resid.names.push_back("u" + std::to_string(j + 1));
      gir::save_csv(resid, (fs::path(out_dir) / "residuals.csv").string());
      emit_result(out_dir, "fit", {{"csv", csv_path}, {"p", std::to_string(p_order)}}, seed, timer, out);
      std::cout << out.dump(2) << "\n";
    } else if (c_gir->parsed()) {
      gir::VarParams params;
      if (!phi_args.empty()) {
        for (const std::string& s : phi_args) params.phi.push_back(parse_matrix_arg(s));
        params.p = static_cast<int>(params.phi.size());
        params.k = static_cast<int>(params.phi.front().rows());
        params.sigma_u = gir::Mat::Identity(params.k, params.k);
      } else if (!config_path.empty()) {
        gir::ConfigMap cfg = gir::ConfigMap::parse_file(config_path);
        params = gir::dgp_from_roots(gir::dgp_from_config(cfg));
      } else {
        gir::fail(gir::ErrorCode::usage, "gir needs --phi or --config");
      }
      auto girs = gir::gir_recursion(params, horizon);
      fs::create_directories(out_dir);
      std::ofstream f(fs::path(out_dir) / "gir.csv");
      f << "h,lag,row,col,value\n" << std::setprecision(10);
      for (const gir::GirSet& g : girs) {
        for (int lag = 1; lag <= params.p; ++lag) {
          for (int r = 0; r < params.k; ++r) {
            for (int c = 0; c < params.k; ++c) {
              f << g.h << "," << lag << "," << r + 1 << "," << c + 1 << ","
                << g.coeffs[lag - 1](r, c) << "\n";
            }
          }
        }
      }
      emit_result(out_dir, "gir", {{"h", std::to_string(horizon)}}, seed, timer,
                  json{{"gir_csv", (fs::path(out_dir) / "gir.csv").string()}});
      std::cout << "wrote " << (fs::path(out_dir) / "gir.csv").string() << "\n";
    } else if (c_caus->parsed()) {
      gir::SeriesPanel panel = gir::load_csv(csv_path);
      gir::EstimatorSpec spec;
      spec.p = p_order;
      spec.delta = delta;
      spec.intercept = !no_intercept;
      std::vector<int> hs = parse_int_list(horizons_arg);
      int hmax = hs.size() == 1 ? hs[0] : *std::max_element(hs.begin(), hs.end());
      gir::CausalityMap map = gir::empirical_causality(panel, {p_order}, hmax, spec, level, threads);
      fs::create_directories(out_dir);
      gir::write_causality_csv(map, (fs::path(out_dir) / "causality.csv").string());
      emit_result(out_dir, "causality", {{"csv", csv_path}, {"p", std::to_string(p_order)}}, seed,
                  timer, json{{"causality_csv", (fs::path(out_dir) / "causality.csv").string()}});
      std::cout << "wrote " << (fs::path(out_dir) / "causality.csv").string() << "\n";
    } else if (c_mc->parsed()) {
      gir::McConfig mc = gir::mc_config_from_file(config_path);
      if (seed_given) mc.master_seed = seed;
      gir::McSummary summary = gir::run_mc(mc, threads);
      fs::create_directories(out_dir);
      gir::write_mc_csv(summary, out_dir);
      std::string report = gir::compare_methods_report(summary);
      write_file(fs::path(out_dir) / "mc_report.txt", report);
      emit_result(out_dir, "mc", {{"config", config_path}}, mc.master_seed, timer,
                  json{{"panels", "mc_*.csv"}, {"report", "mc_report.txt"}});
      std::cout << report;
    } else if (c_eff->parsed()) {
      std::vector<int> horizons;
      for (int h = 1; h <= std::max(horizon, 36); ++h) horizons.push_back(h);
      auto cells = gir::efficiency_grid({0.8, 0.5, 0.2, -0.5}, 0.01, 0.99, 0.01, horizons);
      fs::create_directories(out_dir);
      gir::write_efficiency_csv(cells, (fs::path(out_dir) / "grid.csv").string());
      emit_result(out_dir, "efficiency", {}, seed, timer,
                  json{{"grid_csv", (fs::path(out_dir) / "grid.csv").string()}, {"cells", cells.size()}});
      std::cout << "wrote " << (fs::path(out_dir) / "grid.csv").string() << " (" << cells.size()
                << " cells)\n";
    } else if (c_boot->parsed()) {
      gir::SeriesPanel panel = gir::load_csv(csv_path);
      gir::TargetSpec tgt = gir::parse_target(coeff_arg);
      gir::EstimatorSpec spec;
      spec.p = p_order;
      spec.delta = delta;
      spec.target_row = tgt.row - 1;
      spec.intercept = !no_intercept;
      gir::Vec w = gir::Vec::Zero(p_order * panel.k());
      w((tgt.lag - 1) * panel.k() + tgt.col - 1) = 1.0;
      gir::RngStream rng(seed, 0);
      gir::CiResult ci = gir::bootstrap_ti(panel, spec, horizon, w, draws, level, rng, threads);
      json out = {{"coefficient", coeff_arg}, {"h", horizon}, {"ci", ci_json(ci)}};
      fs::create_directories(out_dir);
      emit_result(out_dir, "bootstrap", {{"csv", csv_path}, {"coeff", coeff_arg}}, seed, timer, out);
      std::cout << out.dump(2) << "\n";
    } else if (c_emp->parsed()) {
      gir::SeriesPanel panel = gir::load_csv(csv_path);
      gir::EstimatorSpec spec;
      spec.delta = delta;
      spec.intercept = !no_intercept;
      std::vector<int> orders = parse_int_list(orders_arg);
      std::vector<int> hs = parse_int_list(horizons_arg);
      int hmax = hs.size() == 1 ? hs[0] : *std::max_element(hs.begin(), hs.end());
      gir::CausalityMap map = gir::empirical_causality(panel, orders, hmax, spec, level, threads);
      fs::create_directories(out_dir);
      gir::write_causality_csv(map, (fs::path(out_dir) / "causality_map.csv").string());
      // Months with significant causality across all configured orders.
      std::ofstream f(fs::path(out_dir) / "significant_months.csv");
      f << "cause,effect,min_p_months,all_orders_months\n";
      for (int cause = 0; cause < panel.k(); ++cause) {
        for (int effect = 0; effect < panel.k(); ++effect) {
          f << map.names[cause] << "," << map.names[effect] << ","
            << map.significant_months(cause, effect, level, false) << ","
            << map.significant_months(cause, effect, level, true) << "\n";
        }
      }
      emit_result(out_dir, "empirical", {{"csv", csv_path}, {"orders", orders_arg}}, seed, timer,
                  json{{"causality_map", "causality_map.csv"}, {"months", "significant_months.csv"}});
      std::cout << "wrote " << (fs::path(out_dir) / "causality_map.csv").string() << "\n";
    }
  } catch (const gir::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == gir::ErrorCode::usage ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
