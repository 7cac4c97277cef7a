#include "sinrldp/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "sinrldp/csv.hpp"
#include "sinrldp/measures.hpp"
#include "sinrldp/model.hpp"

namespace sinrldp {

using nlohmann::json;

namespace {

// Typed access to one JSON object; remembers which keys were read so that the rest
// can be rejected as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& k) const { return j_.contains(k); }

  double number(const std::string& k, double def) {
    const auto v = opt_number(k);
    return v ? *v : def;
  }

  std::optional<double> opt_number(const std::string& k) {
    const json* v = get(k);
    if (v == nullptr) return std::nullopt;
    return as_number(*v, k);
  }

  std::uint64_t count(const std::string& k, std::uint64_t def) {
    const auto v = opt_count(k);
    return v ? *v : def;
  }

  std::optional<std::uint64_t> opt_count(const std::string& k) {
    const json* v = get(k);
    if (v == nullptr) return std::nullopt;
    return as_count(*v, k);
  }

  std::string str(const std::string& k, const std::string& def) {
    const auto v = opt_str(k);
    return v ? *v : def;
  }

  std::optional<std::string> opt_str(const std::string& k) {
    const json* v = get(k);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) fail(k, "expected a string");
    return v->get<std::string>();
  }

  bool boolean(const std::string& k, bool def) {
    const json* v = get(k);
    if (v == nullptr) return def;
    if (!v->is_boolean()) fail(k, "expected true or false");
    return v->get<bool>();
  }

  std::optional<std::vector<double>> numbers(const std::string& k) {
    const json* v = get(k);
    if (v == nullptr) return std::nullopt;
    if (!v->is_array()) fail(k, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) out.push_back(as_number(e, k));
    return out;
  }

  std::optional<std::vector<std::size_t>> counts(const std::string& k) {
    const json* v = get(k);
    if (v == nullptr) return std::nullopt;
    if (!v->is_array()) fail(k, "expected an array of nonnegative integers");
    std::vector<std::size_t> out;
    for (const auto& e : *v) out.push_back(static_cast<std::size_t>(as_count(e, k)));
    return out;
  }

  std::optional<Section> child(const std::string& k) {
    const json* v = get(k);
    if (v == nullptr) return std::nullopt;
    return Section(*v, qualified(k));
  }

  template <class Enum>
  Enum choice(const std::string& k, Enum def, std::initializer_list<std::pair<const char*, Enum>> opts) {
    const auto s = opt_str(k);
    if (!s) return def;
    std::string allowed;
    for (const auto& [name, value] : opts) {
      if (*s == name) return value;
      allowed += allowed.empty() ? "" : ", ";
      allowed += name;
    }
    fail(k, "expected one of {" + allowed + "}, got '" + *s + "'");
  }

  /// Throws on any key that was never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) {
        throw ConfigError("unknown key '" + qualified(it.key()) + "'");
      }
    }
  }

  [[noreturn]] void fail(const std::string& k, const std::string& what) const {
    throw ConfigError("key '" + qualified(k) + "': " + what);
  }

 private:
  const json* get(const std::string& k) {
    used_.insert(k);
    const auto it = j_.find(k);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  double as_number(const json& v, const std::string& k) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
    }
    fail(k, "expected a number");
  }

  std::uint64_t as_count(const json& v, const std::string& k) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    fail(k, "expected a nonnegative integer");
  }

  std::string qualified(const std::string& k) const {
    if (k.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? k : path_ + "." + k;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

GridField parse_grid(Section& s) {
  GridField g;
  const auto bins = s.counts("bins");
  const auto values = s.numbers("values");
  if (!bins) s.fail("bins", "required");
  if (!values) s.fail("values", "required");
  g.bins = *bins;
  g.values = *values;
  s.finish();
  return g;
}

HStar parse_hstar(Section& s) {
  HStar h;
  h.kind = s.choice<HStarKind>("kind", HStarKind::constant,
                               {{"constant", HStarKind::constant},
                                {"product", HStarKind::product},
                                {"tabulated", HStarKind::tabulated}});
  switch (h.kind) {
    case HStarKind::constant: {
      const auto v = s.opt_number("value");
      if (!v) s.fail("value", "required for kind constant");
      h.value = *v;
      break;
    }
    case HStarKind::product: {
      if (auto f = s.child("f")) h.f = parse_grid(*f);
      if (auto g = s.child("g")) {
        PiecewiseConstant1D pc;
        pc.edges = g->numbers("edges").value_or(std::vector<double>{});
        const auto values = g->numbers("values");
        if (!values) g->fail("values", "required");
        pc.values = *values;
        g->finish();
        h.g = pc;
      }
      break;
    }
    case HStarKind::tabulated: {
      const auto bins = s.counts("spatial_bins");
      const auto table = s.numbers("table");
      if (!bins) s.fail("spatial_bins", "required for kind tabulated");
      if (!table) s.fail("table", "required for kind tabulated");
      h.spatial_bins = *bins;
      h.power_edges = s.numbers("power_edges").value_or(std::vector<double>{});
      h.table = *table;
      break;
    }
  }
  s.finish();
  return h;
}

ModelConfig parse_model(Section& root) {
  ModelConfig c;
  c.dimension = static_cast<std::size_t>(root.count("dimension", 2));
  if (c.dimension < 1) root.fail("dimension", "dimension >= 1");
  c.window = Box::unit(c.dimension);
  if (auto w = root.child("window")) {
    const auto lo = w->numbers("lo");
    const auto hi = w->numbers("hi");
    if (!lo || !hi) w->fail(lo ? "hi" : "lo", "required");
    if (lo->size() != c.dimension || hi->size() != c.dimension) {
      w->fail("", "lo and hi need one entry per dimension");
    }
    c.window = Box{*lo, *hi};
    w->finish();
  }
  c.lambda = root.number("lambda", c.lambda);
  if (auto e = root.child("eta")) {
    c.eta.kind = e->choice<EtaKind>("kind", EtaKind::uniform,
                                    {{"uniform", EtaKind::uniform}, {"grid", EtaKind::grid}});
    if (c.eta.kind == EtaKind::uniform) {
      c.eta.mass = e->number("mass", 1.0);
    } else {
      const auto bins = e->counts("bins");
      const auto values = e->numbers("values");
      if (!bins) e->fail("bins", "required for kind grid");
      if (!values) e->fail("values", "required for kind grid");
      c.eta.grid = GridField{*bins, *values};
    }
    e->finish();
  }
  c.power_rate = root.number("power_rate", c.power_rate);
  c.path_loss_exponent = root.number("path_loss_exponent", c.path_loss_exponent);
  c.noise = root.number("noise", c.noise);
  c.tau_base = root.number("tau_base", c.tau_base);
  c.gamma_base = root.number("gamma_base", c.gamma_base);
  c.tau_power_exponent = root.number("tau_power_exponent", c.tau_power_exponent);
  c.threshold_scaling = root.choice<ThresholdScaling>(
      "threshold_scaling", c.threshold_scaling,
      {{"fixed", ThresholdScaling::fixed}, {"log-over-lambda", ThresholdScaling::log_over_lambda}});
  c.threshold_indexing = root.choice<ThresholdIndexing>(
      "threshold_indexing", c.threshold_indexing,
      {{"far", ThresholdIndexing::far}, {"near", ThresholdIndexing::near}});
  c.scaling_regime = root.choice<ScalingRegime>("scaling_regime", c.scaling_regime,
                                                {{"critical", ScalingRegime::critical},
                                                 {"subcritical", ScalingRegime::subcritical},
                                                 {"supercritical", ScalingRegime::supercritical}});
  c.edge_mode = root.choice<EdgeMode>("edge_mode", c.edge_mode,
                                      {{"physical", EdgeMode::physical}, {"limit", EdgeMode::limit}});
  c.recenter_interference = root.boolean("recenter_interference", c.recenter_interference);
  if (auto h = root.child("h_star")) c.h_star = parse_hstar(*h);
  c.sinr_reference_power = root.opt_number("sinr_reference_power");
  c.validate();
  return c;
}

PoweredPoint parse_point(Section& s, std::size_t dim) {
  PoweredPoint p;
  const auto loc = s.numbers("location");
  if (!loc) s.fail("location", "required");
  if (loc->size() != dim) s.fail("location", "one coordinate per dimension required");
  p.location = *loc;
  p.power = s.number("power", 1.0);
  if (!(p.power > 0.0)) s.fail("power", "power > 0");
  s.finish();
  return p;
}

std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal().string();
}

ExperimentOptions parse_experiment(Section& s, const ModelConfig& model,
                                   const std::filesystem::path& base) {
  ExperimentOptions e;
  e.trials = s.opt_count("trials");
  e.lambda_grid = s.numbers("lambda_grid").value_or(std::vector<double>{});
  for (double l : e.lambda_grid) {
    if (!(std::isfinite(l) && l > 0.0)) s.fail("lambda_grid", "every lambda > 0");
  }
  e.trial = s.count("trial", 0);
  if (model.dimension != 2) {
    e.planted.first.location.assign(model.dimension, 0.3);
    e.planted.second.location.assign(model.dimension, 0.7);
  }
  if (auto p = s.child("planted")) {
    auto first = p->child("first");
    auto second = p->child("second");
    if (first) e.planted.first = parse_point(*first, model.dimension);
    if (second) e.planted.second = parse_point(*second, model.dimension);
    e.planted.redraw_powers = p->boolean("redraw_powers", false);
    p->finish();
  }
  e.tune_target = s.opt_number("tune_target");
  if (e.tune_target && !(*e.tune_target > 0.0 && *e.tune_target < 1.0)) {
    s.fail("tune_target", "tune_target in (0, 1)");
  }
  e.fallback_lambda = s.opt_number("fallback_lambda");
  if (e.fallback_lambda && !(*e.fallback_lambda >= 0.0)) {
    s.fail("fallback_lambda", "fallback_lambda >= 0");
  }
  e.tolerance = s.number("tolerance", e.tolerance);
  if (!(e.tolerance > 0.0)) s.fail("tolerance", "tolerance > 0");
  if (auto p = s.child("phi")) {
    e.phi.rule = p->choice<PhiRule>("rule", e.phi.rule,
                                    {{"cell-average", PhiRule::cell_average},
                                     {"cell-center", PhiRule::cell_center}});
    e.phi.order = static_cast<std::size_t>(p->count("order", e.phi.order));
    if (e.phi.order < 1) p->fail("order", "order >= 1");
    p->finish();
  }
  if (auto p = s.child("surrogate")) {
    e.surrogate_h_star = p->number("h_star", e.surrogate_h_star);
    e.surrogate_mass = p->number("mass", e.surrogate_mass);
    if (!(e.surrogate_h_star >= 0.0)) p->fail("h_star", "h_star >= 0");
    if (!(e.surrogate_mass > 0.0 && e.surrogate_mass <= 1.0)) p->fail("mass", "mass in (0, 1]");
    p->finish();
  }
  e.threshold = s.opt_number("threshold");
  e.threshold_factor = s.number("threshold_factor", e.threshold_factor);
  if (!(e.threshold_factor >= 0.0)) s.fail("threshold_factor", "threshold_factor >= 0");
  if (auto v = s.opt_str("sigma")) e.sigma = resolve_path(*v, base);
  if (auto v = s.opt_str("omega")) e.omega = resolve_path(*v, base);
  if (auto v = s.opt_str("nu")) e.nu = resolve_path(*v, base);
  s.finish();
  return e;
}

json point_json(const PoweredPoint& p) {
  return {{"location", p.location}, {"power", p.power}};
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::vector<double> parse_grid_flag(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty() || !(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("--lambda-grid: expected comma-separated lambdas > 0, got '" + s + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--lambda-grid: empty grid");
  return out;
}

const std::vector<std::string> kReportSchema = {"experiment", "group",     "lambda",
                                                "trials",     "statistic", "estimate",
                                                "std_error",  "oracle",    "z_score",
                                                "gap"};

std::vector<CsvRecord> report_records(const ExperimentReport& r) {
  std::vector<CsvRecord> out;
  for (const auto& row : r.rows) {
    out.push_back({row.experiment, row.group, row.lambda, std::uint64_t{row.trials},
                   row.statistic, row.estimate, row.std_error, row.oracle, row.z_score,
                   row.gap});
  }
  return out;
}

struct Outputs {
  std::filesystem::path dir;
  std::vector<std::string> files;

  void csv(const std::string& name, const CsvTable& t) {
    write_csv(t.records, t.schema, dir / name);
    files.push_back(name);
  }
  void csv(const std::string& name, const std::vector<CsvRecord>& records,
           const std::vector<std::string>& schema) {
    write_csv(records, schema, dir / name);
    files.push_back(name);
  }
  void json_file(const std::string& name, const json& j) {
    write_json(dir / name, j);
    files.push_back(name);
  }
  void report(const ExperimentReport& r) {
    json_file("report.json", to_json(r));
    csv("report.csv", report_records(r), kReportSchema);
  }
};

const std::vector<std::string> kRateSchema = {"rate",      "power_term", "link_term",
                                              "sinr_term", "total",      "infinite",
                                              "infinite_component"};

CsvRecord rate_record(const std::string& name, const RateReport& r) {
  return {name,    r.power_term, r.link_term, r.sinr_term, r.total,
          std::string(r.infinite ? "true" : "false"), r.infinite_component};
}

std::vector<double> grid_or(const ExperimentOptions& e, std::vector<double> def) {
  return e.lambda_grid.empty() ? def : e.lambda_grid;
}

}  // namespace

// ---------------------------------------------------------------------------

json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json to_json(const ModelConfig& c) {
  json j;
  j["dimension"] = c.dimension;
  j["window"] = {{"lo", c.window.lo}, {"hi", c.window.hi}};
  j["lambda"] = c.lambda;
  if (c.eta.kind == EtaKind::uniform) {
    j["eta"] = {{"kind", "uniform"}, {"mass", c.eta.mass}};
  } else {
    j["eta"] = {{"kind", "grid"}, {"bins", c.eta.grid.bins}, {"values", c.eta.grid.values}};
  }
  j["power_rate"] = c.power_rate;
  j["path_loss_exponent"] = c.path_loss_exponent;
  j["noise"] = c.noise;
  j["tau_base"] = c.tau_base;
  j["gamma_base"] = c.gamma_base;
  j["tau_power_exponent"] = c.tau_power_exponent;
  j["threshold_scaling"] = to_string(c.threshold_scaling);
  j["threshold_indexing"] = to_string(c.threshold_indexing);
  j["scaling_regime"] = to_string(c.scaling_regime);
  j["edge_mode"] = to_string(c.edge_mode);
  j["recenter_interference"] = c.recenter_interference;
  if (c.h_star) {
    const HStar& h = *c.h_star;
    json hj;
    switch (h.kind) {
      case HStarKind::constant:
        hj = {{"kind", "constant"}, {"value", h.value}};
        break;
      case HStarKind::product:
        hj = {{"kind", "product"}};
        if (h.f) hj["f"] = {{"bins", h.f->bins}, {"values", h.f->values}};
        if (h.g) hj["g"] = {{"edges", h.g->edges}, {"values", h.g->values}};
        break;
      case HStarKind::tabulated:
        hj = {{"kind", "tabulated"},
              {"spatial_bins", h.spatial_bins},
              {"power_edges", h.power_edges},
              {"table", h.table}};
        break;
    }
    j["h_star"] = hj;
  }
  if (c.sinr_reference_power) j["sinr_reference_power"] = *c.sinr_reference_power;
  return j;
}

json to_json(const PartitionSpec& p) {
  return {{"window", {{"lo", p.window.lo}, {"hi", p.window.hi}}},
          {"spatial_bins", p.spatial_bins},
          {"power_edges", p.power_edges},
          {"sinr_edges", p.sinr_edges}};
}

json to_json(const RunConfig& c) {
  json j = to_json(c.model);
  json part;
  part["spatial_bins"] = c.partition.spatial_bins;
  if (c.partition.power_edges) part["power_edges"] = *c.partition.power_edges;
  if (c.partition.sinr_edges) part["sinr_edges"] = *c.partition.sinr_edges;
  j["partition"] = part;
  const ExperimentOptions& e = c.experiment;
  json ex;
  if (e.trials) ex["trials"] = *e.trials;
  ex["lambda_grid"] = e.lambda_grid;
  ex["trial"] = e.trial;
  ex["planted"] = {{"first", point_json(e.planted.first)},
                   {"second", point_json(e.planted.second)},
                   {"redraw_powers", e.planted.redraw_powers}};
  if (e.tune_target) ex["tune_target"] = *e.tune_target;
  if (e.fallback_lambda) ex["fallback_lambda"] = *e.fallback_lambda;
  ex["tolerance"] = e.tolerance;
  ex["phi"] = {{"rule", e.phi.rule == PhiRule::cell_average ? "cell-average" : "cell-center"},
               {"order", e.phi.order}};
  ex["surrogate"] = {{"h_star", e.surrogate_h_star}, {"mass", e.surrogate_mass}};
  if (e.threshold) ex["threshold"] = *e.threshold;
  ex["threshold_factor"] = e.threshold_factor;
  if (e.sigma) ex["sigma"] = *e.sigma;
  if (e.omega) ex["omega"] = *e.omega;
  if (e.nu) ex["nu"] = *e.nu;
  j["experiment"] = ex;
  return j;
}

json to_json(const RateReport& r) {
  json j;
  j["power_term"] = json_number(r.power_term);
  j["link_term"] = json_number(r.link_term);
  j["sinr_term"] = json_number(r.sinr_term);
  j["total"] = json_number(r.total);
  j["infinite"] = r.infinite;
  if (r.infinite) {
    j["infinite_component"] = r.infinite_component;
  } else {
    j["infinite_component"] = nullptr;
  }
  return j;
}

json to_json(const ExperimentReport& r) {
  json j;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["pass"] = r.pass;
  j["note"] = r.note;
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"observed", json_number(c.observed)},
                      {"bound", json_number(c.bound)},
                      {"pass", c.pass}});
  }
  j["checks"] = checks;
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"experiment", row.experiment},
                    {"group", row.group},
                    {"lambda", json_number(row.lambda)},
                    {"trials", row.trials},
                    {"statistic", row.statistic},
                    {"estimate", json_number(row.estimate)},
                    {"std_error", json_number(row.std_error)},
                    {"oracle", json_number(row.oracle)},
                    {"z_score", json_number(row.z_score)},
                    {"gap", json_number(row.gap)}});
  }
  j["rows"] = rows;
  j["model"] = to_json(r.config);
  return j;
}

ParsedInput parse_config_json(const json& doc, const std::filesystem::path& base_dir) {
  ParsedInput out;
  const json* cfg = &doc;
  if (doc.is_object() && doc.contains("resolved_config")) {
    Section manifest(doc, "");
    out.manifest_seed = manifest.opt_count("seed");
    // The remaining manifest fields describe the run, not its inputs.
    cfg = &doc["resolved_config"];
  }
  Section root(*cfg, "");
  out.config.model = parse_model(root);
  const ModelConfig& model = out.config.model;
  out.config.partition.spatial_bins.assign(model.dimension, 4);
  if (auto p = root.child("partition")) {
    if (auto bins = p->counts("spatial_bins")) out.config.partition.spatial_bins = *bins;
    out.config.partition.power_edges = p->numbers("power_edges");
    out.config.partition.sinr_edges = p->numbers("sinr_edges");
    p->finish();
  }
  // Resolve once so partition errors surface as configuration errors.
  out.config.partition.resolve(model);
  if (auto e = root.child("experiment")) {
    out.config.experiment = parse_experiment(*e, model, base_dir);
  } else {
    json empty = json::object();
    Section s(empty, "experiment");
    out.config.experiment = parse_experiment(s, model, base_dir);
  }
  root.finish();
  return out;
}

ParsedInput parse_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  return parse_config_json(doc, path.parent_path());
}

// ---------------------------------------------------------------------------

int run(const RunRequest& req) {
  static const std::set<std::string> known = {"sample",       "measures",   "rates",
                                              "typical",      "verify-prop1", "verify-lln",
                                              "verify-kernel", "verify-ldp"};
  try {
    if (!known.count(req.subcommand)) {
      throw ConfigError("unknown subcommand '" + req.subcommand + "'");
    }
    if (req.threads < 1) throw ConfigError("--threads >= 1");
    const std::string started = timestamp();
    ParsedInput in = parse_config(req.config_path);
    RunConfig& rc = in.config;
    if (req.trials) rc.experiment.trials = *req.trials;
    if (req.lambda_grid) rc.experiment.lambda_grid = *req.lambda_grid;
    const std::uint64_t seed = req.seed ? *req.seed : in.manifest_seed.value_or(1);
    const unsigned threads = req.threads;
    ModelConfig model = rc.model;
    const ExperimentOptions& ex = rc.experiment;

    std::filesystem::create_directories(req.out_dir);
    Outputs out{req.out_dir, {}};
    bool verified = true;
    const std::string& sub = req.subcommand;
    const PartitionSpec part = rc.partition.resolve(model);
    json extra = json::object();

    if (sub == "sample") {
      const SinrNetwork net = generate_network(model, seed, ex.trial);
      std::vector<std::string> schema{"index"};
      for (std::size_t a = 0; a < model.dimension; ++a) schema.push_back("x" + std::to_string(a));
      schema.push_back("power");
      std::vector<CsvRecord> pts;
      for (std::size_t i = 0; i < net.points.size(); ++i) {
        CsvRecord r{std::uint64_t{i}};
        for (double x : net.points[i].location) r.emplace_back(x);
        r.emplace_back(net.points[i].power);
        pts.push_back(std::move(r));
      }
      out.csv("points.csv", pts, schema);
      std::vector<CsvRecord> edges;
      for (const auto& e : net.edges) {
        edges.push_back({std::uint64_t{e.first}, std::uint64_t{e.second}});
      }
      out.csv("edges.csv", edges, {"i", "j"});
    } else if (sub == "measures") {
      const SinrNetwork net = generate_network(model, seed, ex.trial);
      out.csv("sigma.csv", measure_table(empirical_power_measure(net, part), part));
      out.csv("omega.csv", measure_table(empirical_link_measure(net, part), part));
      out.csv("nu.csv", profile_table(empirical_sinr_measure(net, part), part));
    } else if (sub == "rates") {
      if (!ex.sigma) throw ConfigError("key 'experiment.sigma': required for rates");
      const RateEvaluator eval(model, part, ex.phi);
      const BinnedMeasure sigma = read_measure_csv(*ex.sigma, BinnedMeasure::Support::cells, part);
      json j;
      std::vector<CsvRecord> rows;
      auto add = [&](const std::string& name, const RateReport& r) {
        j[name] = to_json(r);
        rows.push_back(rate_record(name, r));
      };
      add("I1", eval.I1(sigma));
      if (ex.omega) {
        const BinnedMeasure omega =
            read_measure_csv(*ex.omega, BinnedMeasure::Support::cell_pairs, part);
        add("I_sigma", eval.I_sigma(omega, sigma));
        add("I", eval.I(sigma, omega));
        if (ex.nu) {
          const SinrProfile nu = read_profile_csv(*ex.nu, part);
          add("J_tilde", eval.J_tilde(nu, sigma, omega));
          add("J_star", eval.J_star(sigma, omega, nu));
        }
      } else if (ex.nu) {
        throw ConfigError("key 'experiment.nu': requires experiment.omega");
      }
      out.json_file("rates.json", j);
      out.csv("rates.csv", rows, kRateSchema);
    } else if (sub == "typical") {
      if (!model.h_star) throw ConfigError("key 'h_star': required for typical");
      out.csv("typical.csv", profile_table(typical_sinr_measure(model, part), part));
      const RateEvaluator eval(model, part, ex.phi);
      const BinnedMeasure& sigma = eval.reference();
      const BinnedMeasure omega = eval.link_reference(sigma);
      out.csv("sigma_ref.csv", measure_table(sigma, part));
      out.csv("omega_ref.csv", measure_table(omega, part));
      out.csv("nu_ref.csv", profile_table(eval.kernel(sigma, omega), part));
    } else if (sub == "verify-prop1") {
      if (ex.tune_target) model.tau_base = tune_tau_base(model, ex.planted, *ex.tune_target);
      const double fallback = ex.fallback_lambda.value_or(2.0 * model.lambda);
      ExperimentReport rep = verify_prop1(model, ex.planted, ex.trials.value_or(20000), seed,
                                          threads, fallback);
      out.report(rep);
      extra["tau_base"] = model.tau_base;
      if (!ex.lambda_grid.empty()) {
        std::vector<CsvRecord> rows;
        for (const auto& r :
             h_star_diagnostic(ex.planted.first.location, ex.planted.first.power,
                               ex.planted.second.location, ex.planted.second.power, model,
                               ex.lambda_grid)) {
          rows.push_back({r.lambda, r.h, r.p, r.value});
        }
        out.csv("h_diagnostic.csv", rows, {"lambda", "h", "p", "lambda2_a_p"});
      }
      verified = rep.pass;
    } else if (sub == "verify-lln") {
      const auto grid = grid_or(ex, {100.0, 400.0, 1600.0});
      const ExperimentReport rep =
          verify_lln(model, rc.partition, grid, ex.trials.value_or(100), seed, threads, ex.phi);
      out.report(rep);
      verified = rep.pass;
    } else if (sub == "verify-kernel") {
      const ExperimentReport rep = verify_sinr_kernel(model, part, ex.trials.value_or(20), seed,
                                                      threads, ex.tolerance, ex.phi);
      out.report(rep);
      verified = rep.pass;
    } else if (sub == "verify-ldp") {
      TwoCellSurrogate s;
      s.h_star = ex.surrogate_h_star;
      s.mass = ex.surrogate_mass;
      const double threshold = ex.threshold.value_or(ex.threshold_factor * s.typical_edge_mass());
      const auto grid = grid_or(ex, {20.0, 40.0, 80.0, 160.0});
      ExperimentReport rep = verify_ldp_surrogate(s, grid, threshold, threads);
      rep.seed = seed;
      out.report(rep);
      extra["threshold"] = threshold;
      verified = rep.pass;
    }

    json manifest;
    manifest["subcommand"] = sub;
    manifest["tool_version"] = kToolVersion;
    manifest["seed"] = seed;
    manifest["threads"] = threads;
    manifest["resolved_config"] = to_json(rc);
    manifest["partition_spec"] = to_json(part);
    manifest["outputs"] = out.files;
    if (!extra.empty()) manifest["derived"] = extra;
    manifest["started_at"] = started;
    manifest["finished_at"] = timestamp();
    write_json(req.out_dir / "manifest.json", manifest);

    if (!verified) {
      std::cerr << sub << ": verification failed (see " << (req.out_dir / "report.json").string()
                << ")\n";
      return kExitVerifyFailed;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Powered SINR networks: sampling, empirical measures, rate functions and checks"};
  RunRequest req;
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::string grid;
  app.add_option("subcommand", req.subcommand,
                 "sample | measures | rates | typical | verify-prop1 | verify-lln | "
                 "verify-kernel | verify-ldp")
      ->required();
  app.add_option("--config", config, "JSON configuration or a manifest.json")->required();
  auto* seed_opt = app.add_option("--seed", seed, "master seed (default 1, or the manifest's)");
  app.add_option("--out", out_dir, "output directory");
  auto* trials_opt = app.add_option("--trials", trials, "trial / repetition count");
  auto* grid_opt = app.add_option("--lambda-grid", grid, "comma-separated lambda grid");
  app.add_option("--threads", req.threads, "worker threads (does not change outputs)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }
  req.config_path = config;
  req.out_dir = out_dir;
  if (seed_opt->count() > 0) req.seed = seed;
  if (trials_opt->count() > 0) req.trials = trials;
  if (grid_opt->count() > 0) {
    try {
      req.lambda_grid = parse_grid_flag(grid);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitError;
    }
  }
  return run(req);
}

}  // namespace sinrldp
