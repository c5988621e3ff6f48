#include "gir/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "gir/parallel.hpp"

namespace gir {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_number(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

bool looks_like_date_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return name == "date" || name == "time" || name == "month" || name == "period" || name == "day";
}

std::vector<std::string> tokenize(const std::string& s) {
  // Separators are spaces and commas, except inside [...] literals.
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (depth == 0 && (std::isspace(static_cast<unsigned char>(c)) || c == ',')) {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

SeriesPanel load_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::parse_error, "cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) fail(ErrorCode::parse_error, path + ": empty file");
  if (!line.empty() && static_cast<unsigned char>(line[0]) == 0xEF && line.size() >= 3) {
    line = line.substr(3);  // UTF-8 BOM
  }
  std::vector<std::string> header = split_csv_line(line);
  if (header.empty()) fail(ErrorCode::parse_error, path + ": missing header row");
  for (std::size_t i = 0; i < header.size(); ++i) {
    for (std::size_t j = i + 1; j < header.size(); ++j) {
      if (header[i] == header[j]) {
        fail(ErrorCode::parse_error, path + ": duplicate header '" + header[i] + "'");
      }
    }
  }
  std::vector<std::vector<std::string>> rows;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      fail(ErrorCode::parse_error,
           path + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
               " cells, expected " + std::to_string(header.size()));
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) fail(ErrorCode::parse_error, path + ": no data rows");

  // Leading date column: flagged by name, or by non-numeric content.
  bool drop_first = false;
  if (looks_like_date_name(header[0])) {
    drop_first = true;
  } else {
    double tmp;
    if (!parse_number(rows[0][0], &tmp)) drop_first = true;
  }
  const int first_col = drop_first ? 1 : 0;
  const int k = static_cast<int>(header.size()) - first_col;
  if (k < 1) fail(ErrorCode::parse_error, path + ": no numeric columns");

  SeriesPanel panel;
  panel.origin = SeriesPanel::Origin::loaded;
  panel.names.assign(header.begin() + first_col, header.end());
  panel.data.resize(static_cast<int>(rows.size()), k);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < k; ++c) {
      const std::string& cell = rows[r][first_col + c];
      if (cell.empty()) {
        fail(ErrorCode::parse_error,
             path + ": missing value at data row " + std::to_string(r + 1) + ", column '" +
                 panel.names[c] + "'");
      }
      double v;
      if (!parse_number(cell, &v)) {
        fail(ErrorCode::parse_error, path + ": line " + std::to_string(r + 2) + ": non-numeric cell '" +
                                         cell + "'");
      }
      panel.data(static_cast<int>(r), c) = v;
    }
  }
  panel.validate();
  return panel;
}

void save_csv(const SeriesPanel& panel, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::parse_error, "cannot open " + path + " for writing");
  for (int c = 0; c < panel.k(); ++c) {
    if (c) f << ",";
    f << (c < static_cast<int>(panel.names.size()) ? panel.names[c] : "y" + std::to_string(c + 1));
  }
  f << "\n";
  char buf[64];
  for (int r = 0; r < panel.T(); ++r) {
    for (int c = 0; c < panel.k(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", panel.data(r, c));
      if (c) f << ",";
      f << buf;
    }
    f << "\n";
  }
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::parse_error, "cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_string(ss.str(), path);
}

ConfigMap ConfigMap::parse_string(const std::string& text, const std::string& origin) {
  ConfigMap cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::parse_error, origin + ": line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(ErrorCode::parse_error, origin + ": line " + std::to_string(lineno) + ": empty key");
    if (cfg.values_.count(key)) {
      fail(ErrorCode::parse_error, origin + ": duplicate key '" + key + "'");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

bool ConfigMap::has(const std::string& key) const { return values_.count(key) > 0; }

std::string ConfigMap::take(const std::string& key) {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::invalid_config, origin_ + ": missing key '" + key + "'");
  consumed_.insert(key);
  return it->second;
}

std::string ConfigMap::get_string(const std::string& key) { return take(key); }

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) {
  if (!has(key)) return fallback;
  return take(key);
}

double ConfigMap::get_double(const std::string& key, std::optional<double> fallback) {
  if (!has(key) && fallback) return *fallback;
  std::string v = take(key);
  double out;
  if (!parse_number(v, &out)) fail(ErrorCode::invalid_config, origin_ + ": key '" + key + "' is not a number");
  return out;
}

std::int64_t ConfigMap::get_int(const std::string& key, std::optional<std::int64_t> fallback) {
  if (!has(key) && fallback) return *fallback;
  double v = get_double(key);
  auto iv = static_cast<std::int64_t>(v);
  if (static_cast<double>(iv) != v) fail(ErrorCode::invalid_config, origin_ + ": key '" + key + "' is not an integer");
  return iv;
}

bool ConfigMap::get_bool(const std::string& key, std::optional<bool> fallback) {
  if (!has(key) && fallback) return *fallback;
  std::string v = take(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorCode::invalid_config, origin_ + ": key '" + key + "' is not a boolean");
}

Mat ConfigMap::get_matrix(const std::string& key) {
  std::string v = take(key);
  std::string body = trim(v);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
    fail(ErrorCode::invalid_config, origin_ + ": key '" + key + "' is not a matrix literal [a b; c d]");
  }
  body = body.substr(1, body.size() - 2);
  std::vector<std::vector<double>> rows;
  std::istringstream rs(body);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::vector<double> vals;
    for (const std::string& tok : tokenize(row)) {
      double d;
      if (!parse_number(tok, &d)) {
        fail(ErrorCode::invalid_config, origin_ + ": key '" + key + "': bad entry '" + tok + "'");
      }
      vals.push_back(d);
    }
    if (!vals.empty()) rows.push_back(std::move(vals));
  }
  if (rows.empty()) fail(ErrorCode::invalid_config, origin_ + ": key '" + key + "': empty matrix");
  Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      fail(ErrorCode::invalid_config, origin_ + ": key '" + key + "': ragged matrix rows");
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
  }
  return m;
}

std::vector<double> ConfigMap::get_list(const std::string& key) {
  std::vector<double> out;
  for (const std::string& tok : tokenize(take(key))) {
    double d;
    if (!parse_number(tok, &d)) fail(ErrorCode::invalid_config, origin_ + ": key '" + key + "': bad entry '" + tok + "'");
    out.push_back(d);
  }
  return out;
}

std::vector<std::string> ConfigMap::get_tokens(const std::string& key) { return tokenize(take(key)); }

void ConfigMap::finish() const {
  for (const auto& kv : values_) {
    if (!consumed_.count(kv.first)) {
      fail(ErrorCode::invalid_config, origin_ + ": unknown key '" + kv.first + "'");
    }
  }
}

DgpSpec dgp_from_config(ConfigMap& cfg) {
  DgpSpec dgp;
  dgp.roots.push_back(cfg.get_matrix("dgp.root_a"));
  if (cfg.has("dgp.root_b")) dgp.roots.push_back(cfg.get_matrix("dgp.root_b"));
  if (cfg.has("dgp.rotation")) dgp.rotation = cfg.get_matrix("dgp.rotation");
  dgp.sigma_u = cfg.get_matrix("dgp.sigma_u");
  std::string law = cfg.get_string("dgp.innovation", "gaussian");
  if (law == "gaussian") {
    dgp.innovation.law = InnovationLaw::gaussian;
  } else if (law.rfind("t(", 0) == 0 && law.back() == ')') {
    dgp.innovation.law = InnovationLaw::scaled_t;
    dgp.innovation.df = std::atoi(law.substr(2, law.size() - 3).c_str());
    if (dgp.innovation.df <= 2) fail(ErrorCode::invalid_config, "t innovations need df > 2");
  } else {
    fail(ErrorCode::invalid_config, "unknown innovation law: " + law);
  }
  return dgp;
}

McConfig mc_config_from_file(const std::string& path) {
  ConfigMap cfg = ConfigMap::parse_file(path);
  McConfig mc;
  mc.dgp = dgp_from_config(cfg);
  mc.sample_size = static_cast<int>(cfg.get_int("mc.sample_size", 250));
  mc.replications = static_cast<int>(cfg.get_int("mc.replications", 1000));
  mc.bootstrap_draws = static_cast<int>(cfg.get_int("mc.bootstrap_draws", 500));
  mc.burn_in = static_cast<int>(cfg.get_int("mc.burn_in", 0));
  for (double h : cfg.get_list("mc.horizons")) mc.horizons.push_back(static_cast<int>(h));
  for (const std::string& m : cfg.get_tokens("mc.methods")) mc.methods.push_back(parse_method(m));
  for (const std::string& t : cfg.get_tokens("mc.targets")) mc.targets.push_back(parse_target(t));
  mc.level = cfg.get_double("mc.level", 0.95);
  mc.master_seed = static_cast<std::uint64_t>(cfg.get_int("mc.seed", 42));
  mc.intercept = cfg.get_bool("mc.intercept", true);
  mc.hac_bandwidth = static_cast<int>(cfg.get_int("mc.hac_bandwidth", -1));
  cfg.finish();
  mc.validate();
  return mc;
}

const CausalityCell& CausalityMap::cell(int cause, int effect, int horizon) const {
  for (const CausalityCell& c : cells) {
    if (c.cause == cause && c.effect == effect && c.horizon == horizon) return c;
  }
  fail(ErrorCode::invalid_spec, "no such causality cell");
}

bool CausalityMap::significant(int cause, int effect, int horizon, double level) const {
  return cell(cause, effect, horizon).min_p <= 1.0 - level;
}

bool CausalityMap::significant_all_orders(int cause, int effect, int horizon, double level) const {
  const CausalityCell& c = cell(cause, effect, horizon);
  if (!c.all_orders_available) return false;
  for (double p : c.p_by_order) {
    if (p > 1.0 - level) return false;
  }
  return true;
}

std::string CausalityMap::significant_months(int cause, int effect, double level, bool all_orders) const {
  std::vector<int> months;
  for (int h = 1; h <= horizon_max; ++h) {
    bool sig = all_orders ? significant_all_orders(cause, effect, h, level)
                          : significant(cause, effect, h, level);
    if (sig) months.push_back(h);
  }
  std::ostringstream os;
  std::size_t i = 0;
  while (i < months.size()) {
    std::size_t j = i;
    while (j + 1 < months.size() && months[j + 1] == months[j] + 1) ++j;
    if (os.tellp() > 0) os << ",";
    if (j == i) {
      os << months[i];
    } else {
      os << months[i] << "-" << months[j];
    }
    i = j + 1;
  }
  return months.empty() ? "-" : os.str();
}

CausalityMap empirical_causality(const SeriesPanel& panel, const std::vector<int>& orders,
                                 int horizon_max, const EstimatorSpec& spec, double level,
                                 int threads) {
  (void)level;
  panel.validate();
  if (orders.empty()) fail(ErrorCode::invalid_spec, "no VAR orders given");
  if (horizon_max < 1) fail(ErrorCode::invalid_horizon, "horizon_max must be >= 1");
  const int k = panel.k();
  int max_order = *std::max_element(orders.begin(), orders.end());
  if (panel.T() < max_order + horizon_max + max_order * k + 2) {
    fail(ErrorCode::insufficient_data, "panel too short for max order and horizon");
  }
  CausalityMap map;
  map.names = panel.names;
  map.orders = orders;
  map.horizon_max = horizon_max;
  map.cells.resize(static_cast<std::size_t>(k) * k * horizon_max);
  auto cell_at = [&](int cause, int effect, int h) -> CausalityCell& {
    return map.cells[(static_cast<std::size_t>(cause) * k + effect) * horizon_max + (h - 1)];
  };
  for (int cause = 0; cause < k; ++cause) {
    for (int effect = 0; effect < k; ++effect) {
      for (int h = 1; h <= horizon_max; ++h) {
        CausalityCell& c = cell_at(cause, effect, h);
        c.cause = cause;
        c.effect = effect;
        c.horizon = h;
        c.p_by_order.assign(orders.size(), 1.0);
      }
    }
  }

  // One fit per (order, effect, horizon); every cause reuses it.
  struct Task {
    int oi, effect, h;
  };
  std::vector<Task> tasks;
  for (int oi = 0; oi < static_cast<int>(orders.size()); ++oi) {
    for (int effect = 0; effect < k; ++effect) {
      for (int h = 1; h <= horizon_max; ++h) tasks.push_back({oi, effect, h});
    }
  }
  std::vector<std::vector<double>> task_p(tasks.size());
  std::vector<char> task_ok(tasks.size(), 0);
  std::vector<VarFit> first_stage(orders.size());
  for (int oi = 0; oi < static_cast<int>(orders.size()); ++oi) {
    first_stage[oi] = fit_var_ls(panel, orders[oi], spec.intercept);
  }
  parallel_for(static_cast<std::int64_t>(tasks.size()), threads, [&](std::int64_t ti) {
    const Task& task = tasks[ti];
    const int order = orders[task.oi];
    try {
      ProjectionFit fit = two_stage_with_fit(panel, first_stage[task.oi], task.h,
                                             spec.delta, task.effect, spec.intercept);
      std::vector<int> lags(order);
      for (int l = 0; l < order; ++l) lags[l] = l + 1;
      std::vector<double> ps(k);
      for (int cause = 0; cause < k; ++cause) {
        ps[cause] = wald_causality(fit, cause, lags).p_value;
      }
      task_p[ti] = std::move(ps);
      task_ok[ti] = 1;
    } catch (const Error&) {
      task_ok[ti] = 0;
    }
  });
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const Task& task = tasks[ti];
    for (int cause = 0; cause < k; ++cause) {
      CausalityCell& c = cell_at(cause, task.effect, task.h);
      if (task_ok[ti]) {
        c.p_by_order[task.oi] = task_p[ti][cause];
      } else {
        c.p_by_order[task.oi] = 1.0;
        c.all_orders_available = false;
      }
    }
  }
  for (CausalityCell& c : map.cells) {
    c.min_p = *std::min_element(c.p_by_order.begin(), c.p_by_order.end());
  }
  return map;
}

void write_causality_csv(const CausalityMap& map, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::parse_error, "cannot open " + path);
  f << "cause,effect,horizon";
  for (int o : map.orders) f << ",p_order" << o;
  f << ",min_p,sig90,sig95,sig99,all_orders95\n";
  f << std::setprecision(10);
  for (const CausalityCell& c : map.cells) {
    f << map.names[c.cause] << "," << map.names[c.effect] << "," << c.horizon;
    for (double p : c.p_by_order) f << "," << p;
    f << "," << c.min_p;
    f << "," << (c.min_p <= 0.10 ? 1 : 0) << "," << (c.min_p <= 0.05 ? 1 : 0) << ","
      << (c.min_p <= 0.01 ? 1 : 0);
    bool all95 = c.all_orders_available;
    for (double p : c.p_by_order) all95 = all95 && p <= 0.05;
    f << "," << (all95 ? 1 : 0) << "\n";
  }
}

std::string result_document(const std::string& command, const std::map<std::string, std::string>& config_echo,
                            std::uint64_t seed, double elapsed_seconds, const std::string& outputs_json) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["command"] = command;
  doc["config"] = config_echo;
  doc["seed"] = seed;
  doc["elapsed_seconds"] = elapsed_seconds;
  doc["outputs"] = outputs_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(outputs_json);
  return doc.dump(2);
}

}  // namespace gir
