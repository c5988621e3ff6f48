#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gir/io.hpp"
#include "gir/model.hpp"
#include "gir/simulate.hpp"

using namespace gir;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  fs::path dir = fs::temp_directory_path() / "girkit_test";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream f(p);
  f << text;
  return p.string();
}

}  // namespace

TEST_CASE("csv loading") {
  SUBCASE("plain numeric file") {
    std::string p = write_temp("a.csv", "x,y\n1,2\n3,4\n5,6\n");
    SeriesPanel panel = load_csv(p);
    CHECK(panel.T() == 3);
    CHECK(panel.k() == 2);
    CHECK(panel.names[0] == "x");
    CHECK(panel.data(2, 1) == 6.0);
    CHECK(panel.origin == SeriesPanel::Origin::loaded);
  }
  SUBCASE("leading date column by name") {
    std::string p = write_temp("b.csv", "date,CFNAI,JNL,Unemp,Inflation,FFR\n1974-01-01,1,2,3,4,5\n1974-02-01,2,3,4,5,6\n");
    SeriesPanel panel = load_csv(p);
    CHECK(panel.k() == 5);
    CHECK(panel.names[0] == "CFNAI");
    CHECK(panel.data(1, 4) == 6.0);
  }
  SUBCASE("leading date column by content") {
    std::string p = write_temp("c.csv", "when,y\n2001-05-01,1.5\n2001-06-01,2.5\n");
    SeriesPanel panel = load_csv(p);
    CHECK(panel.k() == 1);
    CHECK(panel.data(1, 0) == 2.5);
  }
  SUBCASE("missing cell names the row") {
    std::string p = write_temp("d.csv", "x,y\n1,2\n3,\n");
    try {
      load_csv(p);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::parse_error);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }
  SUBCASE("ragged row names the line") {
    std::string p = write_temp("e.csv", "x,y\n1,2\n3,4,5\n");
    try {
      load_csv(p);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("duplicate headers rejected") {
    std::string p = write_temp("f.csv", "x,x\n1,2\n");
    CHECK_THROWS_AS(load_csv(p), Error);
  }
  SUBCASE("non-numeric cell rejected") {
    std::string p = write_temp("g.csv", "x,y\n1,2\n3,oops\n");
    CHECK_THROWS_AS(load_csv(p), Error);
  }
}

TEST_CASE("csv round trip is exact") {
  VarParams wn;
  wn.k = 3;
  wn.p = 1;
  wn.phi = {Mat::Zero(3, 3)};
  wn.sigma_u = Mat::Identity(3, 3);
  RngStream rng(77, 0);
  SeriesPanel panel = simulate_var(wn, 50, InnovationSpec{}, rng);
  panel.data *= 1.0 / 3.0;  // force non-terminating decimals
  fs::path dir = fs::temp_directory_path() / "girkit_test";
  fs::create_directories(dir);
  std::string p = (dir / "roundtrip.csv").string();
  save_csv(panel, p);
  SeriesPanel back = load_csv(p);
  REQUIRE(back.T() == panel.T());
  CHECK(back.data == panel.data);  // bitwise
  save_csv(back, p);
  SeriesPanel again = load_csv(p);
  CHECK(again.data == back.data);
}

TEST_CASE("config parsing") {
  SUBCASE("values, matrices and lists") {
    ConfigMap cfg = ConfigMap::parse_string(
        "# comment\n"
        "a = 3\n"
        "b = [1 2; 3 4]\n"
        "c = 1, 2, 3\n"
        "d = hello\n"
        "e = true\n");
    CHECK(cfg.get_int("a") == 3);
    Mat b = cfg.get_matrix("b");
    CHECK(b(1, 0) == 3.0);
    CHECK(cfg.get_list("c").size() == 3);
    CHECK(cfg.get_string("d") == "hello");
    CHECK(cfg.get_bool("e"));
    cfg.finish();
  }
  SUBCASE("unknown keys are errors") {
    ConfigMap cfg = ConfigMap::parse_string("a = 1\nmystery = 2\n");
    CHECK(cfg.get_int("a") == 1);
    try {
      cfg.finish();
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_config);
      CHECK(std::string(e.what()).find("mystery") != std::string::npos);
    }
  }
  SUBCASE("duplicate keys are errors") {
    CHECK_THROWS_AS(ConfigMap::parse_string("a = 1\na = 2\n"), Error);
  }
  SUBCASE("full mc config file") {
    std::string p = write_temp("mc.cfg",
                               "dgp.root_a = [0.7 -0.2; 0 0.7]\n"
                               "dgp.root_b = [0.4 0; 0.2 0.4]\n"
                               "dgp.sigma_u = [1 0.5; 0.5 1]\n"
                               "mc.sample_size = 250\n"
                               "mc.replications = 10\n"
                               "mc.horizons = 1 3\n"
                               "mc.methods = rc_var, 2s(0)\n"
                               "mc.targets = phi1[1,2]\n"
                               "mc.seed = 9\n");
    McConfig mc = mc_config_from_file(p);
    CHECK(mc.sample_size == 250);
    CHECK(mc.replications == 10);
    CHECK(mc.methods.size() == 2);
    CHECK(mc.master_seed == 9);
    CHECK(mc.level == 0.95);
  }
}

TEST_CASE("result document") {
  std::string doc = result_document("mc", {{"config", "x.cfg"}}, 42, 1.5, "{\"cells\": 3}");
  auto j = nlohmann::json::parse(doc);
  CHECK(j["schema_version"] == 1);
  CHECK(j["command"] == "mc");
  CHECK(j["seed"] == 42);
  CHECK(j["outputs"]["cells"] == 3);
  // Doubles survive the round trip losslessly.
  double v = 0.1234567891234567;
  std::string doc2 = result_document("x", {}, 1, v, "{}");
  auto j2 = nlohmann::json::parse(doc2);
  CHECK(j2["elapsed_seconds"].get<double>() == v);
}

TEST_CASE("empirical causality pipeline") {
  VarParams wn;
  wn.k = 3;
  wn.p = 1;
  wn.phi = {Mat::Zero(3, 3)};
  wn.sigma_u = Mat::Identity(3, 3);
  RngStream rng(123, 0);
  SeriesPanel panel = simulate_var(wn, 400, InnovationSpec{}, rng);
  EstimatorSpec spec;
  spec.intercept = true;

  SUBCASE("single order min-p is the per-order p") {
    CausalityMap map = empirical_causality(panel, {3}, 4, spec, 0.95, 2);
    for (const CausalityCell& c : map.cells) {
      REQUIRE(c.p_by_order.size() == 1);
      CHECK(c.min_p == c.p_by_order[0]);
    }
  }
  SUBCASE("min-p bounds every per-order p") {
    CausalityMap map = empirical_causality(panel, {2, 4}, 3, spec, 0.95, 2);
    for (const CausalityCell& c : map.cells) {
      for (double p : c.p_by_order) CHECK(c.min_p <= p);
    }
  }
  SUBCASE("white-noise size is near nominal") {
    // Larger panel for a sharper size check; off-diagonal pairs only.
    RngStream rng2(124, 0);
    SeriesPanel big = simulate_var(wn, 600, InnovationSpec{}, rng2);
    CausalityMap map = empirical_causality(big, {3}, 12, spec, 0.95, 2);
    int n = 0, sig = 0;
    for (const CausalityCell& c : map.cells) {
      if (c.cause == c.effect) continue;
      ++n;
      if (c.min_p <= 0.05) ++sig;
    }
    double rate = static_cast<double>(sig) / n;
    CHECK(rate <= 0.13);
  }
  SUBCASE("csv output round trip") {
    CausalityMap map = empirical_causality(panel, {2}, 3, spec, 0.95, 1);
    fs::path dir = fs::temp_directory_path() / "girkit_test";
    fs::create_directories(dir);
    std::string p = (dir / "caus.csv").string();
    write_causality_csv(map, p);
    std::ifstream f(p);
    std::string header;
    std::getline(f, header);
    CHECK(header.find("min_p") != std::string::npos);
  }
}

TEST_CASE("significant month formatting") {
  CausalityMap map;
  map.names = {"a", "b"};
  map.orders = {2};
  map.horizon_max = 8;
  for (int h = 1; h <= 8; ++h) {
    CausalityCell c;
    c.cause = 0;
    c.effect = 1;
    c.horizon = h;
    bool sig = (h >= 1 && h <= 3) || h == 6 || h == 7;
    c.p_by_order = {sig ? 0.01 : 0.5};
    c.min_p = c.p_by_order[0];
    map.cells.push_back(c);
    CausalityCell d = c;
    d.effect = 0;
    d.p_by_order = {0.9};
    d.min_p = 0.9;
    map.cells.push_back(d);
  }
  CHECK(map.significant_months(0, 1, 0.95, false) == "1-3,6-7");
  CHECK(map.significant_months(0, 0, 0.95, false) == "-");
}
