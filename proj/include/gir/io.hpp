#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gir/experiments.hpp"

namespace gir {

/// CSV ingestion: UTF-8, comma separated, header row, '.' decimal. An
/// optional leading date column (detected by name or non-numeric content) is
/// excluded from the numeric panel.
SeriesPanel load_csv(const std::string& path);

/// Full-precision CSV (17 significant digits, round-trip exact).
void save_csv(const SeriesPanel& panel, const std::string& path);

/// Flat-plus-nested key/value configuration. Keys must all be consumed by
/// the reader; leftovers are reported as unknown-key errors.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, std::optional<double> fallback = std::nullopt);
  std::int64_t get_int(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt);
  bool get_bool(const std::string& key, std::optional<bool> fallback = std::nullopt);
  Mat get_matrix(const std::string& key);               // [a b; c d]
  std::vector<double> get_list(const std::string& key);  // space/comma separated
  std::vector<std::string> get_tokens(const std::string& key);

  /// Throws invalid-config when any key was never read.
  void finish() const;
  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  std::string take(const std::string& key);
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
  std::string origin_;
};

DgpSpec dgp_from_config(ConfigMap& cfg);
McConfig mc_config_from_file(const std::string& path);

/// Per ordered (cause, effect) pair and horizon: non-causality p-values for
/// each fitted VAR order plus the min-p aggregate.
struct CausalityCell {
  int cause = 0;   // 0-based series index
  int effect = 0;
  int horizon = 1;
  std::vector<double> p_by_order;
  double min_p = 1.0;
  bool all_orders_available = true;
};

struct CausalityMap {
  std::vector<std::string> names;
  std::vector<int> orders;
  int horizon_max = 1;
  std::vector<CausalityCell> cells;

  const CausalityCell& cell(int cause, int effect, int horizon) const;
  bool significant(int cause, int effect, int horizon, double level) const;       // min-p rule
  bool significant_all_orders(int cause, int effect, int horizon, double level) const;
  /// Horizon list formatted like "1-6,31-32".
  std::string significant_months(int cause, int effect, double level, bool all_orders) const;
};

/// Lag-order robustness pipeline: a two-stage fit and non-causality Wald test
/// per (effect, horizon, order), aggregated by min-p across orders.
CausalityMap empirical_causality(const SeriesPanel& panel, const std::vector<int>& orders,
                                 int horizon_max, const EstimatorSpec& spec, double level = 0.95,
                                 int threads = 1);

void write_causality_csv(const CausalityMap& map, const std::string& path);

/// Machine-readable run record: schema version, command echo, seed, timing,
/// and the run outputs; serialized as JSON (lossless double round-trip).
std::string result_document(const std::string& command, const std::map<std::string, std::string>& config_echo,
                            std::uint64_t seed, double elapsed_seconds, const std::string& outputs_json);

}  // namespace gir
