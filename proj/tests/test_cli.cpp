#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "sinrldp/cli.hpp"
#include "sinrldp/csv.hpp"

using namespace sinrldp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p =
      fs::temp_directory_path() / ("sinrldp_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_json(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

int cli(const std::string& args) {
  const std::string cmd = std::string(SINRLDP_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error(const json& j) {
  try {
    parse_config_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("csv formatting") {
  CHECK(render_csv({}, {"a", "b"}) == "a,b\n");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()).empty());
  CHECK(render_csv({{std::int64_t{-3}, std::uint64_t{4}, 2.5, std::string("x")}},
                   {"i", "u", "d", "s"}) == "i,u,d,s\n-3,4,2.5,x\n");
  CHECK_THROWS_AS(render_csv({{1.0}}, {"a", "b"}), std::invalid_argument);
}

TEST_CASE("csv round trip of measures") {
  ModelConfig c;
  const PartitionSpec part = make_partition(c, {2, 2}, std::vector<double>{1.0});
  const BinnedMeasure ref = reference_power_measure(c, part);
  const fs::path dir = scratch("measure_rt");
  const CsvTable t = measure_table(ref, part);
  write_csv(t.records, t.schema, dir / "m.csv");
  const BinnedMeasure back = read_measure_csv(dir / "m.csv", BinnedMeasure::Support::cells, part);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(back[i] == ref[i]);
}

TEST_CASE("config parsing") {
  const ParsedInput in = parse_config_json(json{{"lambda", 100}});
  CHECK(in.config.model.lambda == 100.0);
  CHECK(in.config.model.dimension == 2);
  CHECK(in.config.partition.spatial_bins == std::vector<std::size_t>{4, 4});
  CHECK(config_error(json{{"lambda", -1}}).find("lambda > 0") != std::string::npos);
  CHECK(config_error(json{{"lamda", 100}}).find("unknown key 'lamda'") != std::string::npos);
  CHECK(config_error(json{{"lambda", "many"}}).find("lambda") != std::string::npos);
  CHECK(config_error(json{{"experiment", {{"trails", 3}}}}).find("experiment.trails") !=
        std::string::npos);
}

TEST_CASE("config json round trip") {
  json doc = {{"lambda", 250},
              {"noise", 0.2},
              {"edge_mode", "limit"},
              {"h_star", {{"kind", "constant"}, {"value", 1.5}}},
              {"partition", {{"spatial_bins", {3, 2}}, {"power_edges", {0.5, 1.5}}}},
              {"experiment", {{"trials", 17}, {"lambda_grid", {10, 20}}}}};
  const RunConfig a = parse_config_json(doc).config;
  const json ja = to_json(a);
  const RunConfig b = parse_config_json(ja).config;
  CHECK(to_json(b) == ja);
  CHECK(b.model.h_star->value == 1.5);
  CHECK(*b.experiment.trials == 17);
}

TEST_CASE("json numbers") {
  CHECK(json_number(1.5) == json(1.5));
  CHECK(json_number(std::numeric_limits<double>::infinity()) == json("inf"));
  CHECK(json_number(std::numeric_limits<double>::quiet_NaN()).is_null());
}

TEST_CASE("sample is reproducible") {
  const fs::path dir = scratch("sample");
  write_json(dir / "c.json", {{"lambda", 80}, {"tau_base", 0.1}});
  REQUIRE(cli("sample --config " + (dir / "c.json").string() + " --seed 4 --out " +
              (dir / "a").string()) == 0);
  REQUIRE(cli("sample --config " + (dir / "c.json").string() + " --seed 4 --out " +
              (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "points.csv") == slurp(dir / "b" / "points.csv"));
  CHECK(slurp(dir / "a" / "edges.csv") == slurp(dir / "b" / "edges.csv"));
  CHECK(slurp(dir / "a" / "points.csv").rfind("index,x0,x1,power\n", 0) == 0);

  // Re-running from the manifest reproduces the outputs.
  REQUIRE(cli("sample --config " + (dir / "a" / "manifest.json").string() + " --out " +
              (dir / "m").string()) == 0);
  CHECK(slurp(dir / "a" / "points.csv") == slurp(dir / "m" / "points.csv"));
  const json manifest = json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest["seed"] == 4);
  CHECK(manifest["tool_version"] == kToolVersion);
}

TEST_CASE("rates vanish on the typical outputs") {
  const fs::path dir = scratch("rates");
  write_json(dir / "t.json", {{"lambda", 100},
                              {"noise", 0.1},
                              {"tau_base", 0.4},
                              {"edge_mode", "limit"},
                              {"h_star", {{"kind", "constant"}, {"value", 2}}},
                              {"partition", {{"spatial_bins", {2, 2}}}}});
  REQUIRE(cli("typical --config " + (dir / "t.json").string() + " --out " + (dir / "t").string()) ==
          0);
  json rates = json::parse(slurp(dir / "t.json"));
  rates["experiment"] = {{"sigma", (dir / "t" / "sigma_ref.csv").string()},
                         {"omega", (dir / "t" / "omega_ref.csv").string()},
                         {"nu", (dir / "t" / "nu_ref.csv").string()}};
  write_json(dir / "r.json", rates);
  REQUIRE(cli("rates --config " + (dir / "r.json").string() + " --out " + (dir / "r").string()) ==
          0);
  const json out = json::parse(slurp(dir / "r" / "rates.json"));
  REQUIRE(out.contains("J_star"));
  CHECK(out["J_star"]["total"].get<double>() <= 1e-9);
  CHECK(out["I"]["total"].get<double>() <= 1e-9);
}

TEST_CASE("verify-prop1 exit codes") {
  const fs::path dir = scratch("prop1");
  write_json(dir / "p.json", {{"lambda", 200},
                              {"recenter_interference", true},
                              {"experiment",
                               {{"trials", 3000},
                                {"tune_target", 0.5},
                                {"fallback_lambda", 0},
                                {"planted", {{"redraw_powers", true}}}}}});
  CHECK(cli("verify-prop1 --config " + (dir / "p.json").string() + " --out " +
            (dir / "o").string()) == 0);
  const json report = json::parse(slurp(dir / "o" / "report.json"));
  CHECK(report["pass"] == true);
  CHECK(fs::exists(dir / "o" / "report.csv"));

  write_json(dir / "bad.json", {{"lambda", 0}});
  CHECK(cli("verify-prop1 --config " + (dir / "bad.json").string() + " --out " +
            (dir / "bad").string()) == 1);
  CHECK(cli("nonsense --config " + (dir / "p.json").string()) == 1);
}
