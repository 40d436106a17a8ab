#include "zdr/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "zdr/covering.hpp"
#include "zdr/density.hpp"
#include "zdr/experiments.hpp"
#include "zdr/kernels.hpp"
#include "zdr/noncompact.hpp"
#include "zdr/rates.hpp"
#include "zdr/sampling.hpp"
#include "zdr_schema.hpp"

namespace zdr::cli {

using nlohmann::json;

namespace {

/// A configuration problem detected before or during setup (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void emit(std::ostream& diag, const std::string& level, const std::string& code, const std::string& message,
          json extra = json::object()) {
  extra["level"] = level;
  extra["code"] = code;
  extra["message"] = message;
  diag << extra.dump() << '\n';
}

// Files are produced in memory and written only once the whole command succeeded.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  std::string stdout_text;
};

struct Config {
  json j;

  bool has(const char* key) const { return j.contains(key); }

  template <class T>
  T get(const char* key, T fallback) const {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
  }
  template <class T>
  T require(const char* key, const std::string& command) const {
    if (!j.contains(key)) throw ConfigError(command + ": missing required key '" + key + "'");
    return j.at(key).get<T>();
  }
  std::string format() const { return get<std::string>("format", "csv"); }
};

void require_format(const Config& cfg, const std::string& command, std::initializer_list<const char*> allowed) {
  const std::string f = cfg.format();
  for (const char* a : allowed) {
    if (f == a) return;
  }
  throw ConfigError(command + ": format '" + f + "' is not supported");
}

DensityModel model_of(const Config& cfg, const std::string& command) {
  return catalog_model(cfg.require<std::string>("model", command));
}

RateSchedule schedule_of(const Config& cfg) {
  return {cfg.get<double>("eta", 0.21), cfg.get<double>("psi", 0.01), cfg.get<double>("xi", 0.0),
          cfg.get<double>("M_r", 0.4), cfg.get<double>("M_eps", 0.4)};
}

struct DetectionSetup {
  Box region;
  double r;
  double eps;
  std::optional<double> truncation_B;
};

// Region, radius and eps for a covering of `model`. Compact models use their
// support; tail models the (1 - delta(n))-support [-B(n), B(n)].
DetectionSetup setup_of(const Config& cfg, const DensityModel& model, std::uint64_t n, const std::string& command) {
  std::optional<double> B;
  std::optional<Box> region = model.support().box();
  if (!region) {
    if (n == 0) throw ConfigError(command + ": tail models need n >= 1 to size the (1-delta)-support");
    const auto trunc = build_truncation_schedule(model, cfg.get<double>("eta", 0.3), cfg.get<double>("xi", 0.1),
                                                 cfg.has("M_delta") ? std::optional<double>(cfg.get<double>("M_delta", 0.0))
                                                                    : std::nullopt);
    B = trunc.B(static_cast<double>(n));
    region = Box::cube(model.dim(), -*B, *B);
  }
  double r, eps;
  if (cfg.has("r") || cfg.has("eps")) {
    r = cfg.require<double>("r", command);
    eps = cfg.require<double>("eps", command);
    if (eps < 2.0 * r || eps >= 1.0) {
      throw InfeasibleError(command + ": explicit (r, eps) must satisfy 2 r <= eps < 1", std::nullopt);
    }
  } else {
    if (n == 0) throw ConfigError(command + ": give r and eps, or n >= 1 with the rate schedule");
    const auto v = schedule_values(schedule_of(cfg), n);
    r = v.r;
    eps = v.eps;
  }
  return {*region, r, eps, B};
}

json occupancy_json(const OccupancyCounts& occ) {
  json j = json::object();
  constexpr BallClass order[] = {BallClass::EpsInside, BallClass::EpsNeighboring, BallClass::EpsOutside};
  for (BallClass c : order) {
    const auto& o = occ[c];
    j[std::string(to_string(c))] = {{"n_balls", o.balls}, {"n_nonempty", o.nonempty}, {"fraction", o.fraction}};
  }
  return j;
}

json distance_json(double v) { return std::isfinite(v) ? json(v) : json("inf"); }

// ---- subcommands ---------------------------------------------------------

Outputs cmd_sample(const Config& cfg) {
  require_format(cfg, "sample", {"csv", "json"});
  const DensityModel model = model_of(cfg, "sample");
  const auto n = cfg.require<std::uint64_t>("n", "sample");
  if (n < 1) throw ConfigError("sample: n must be >= 1");
  const SampleBatch batch = sample(model, static_cast<std::size_t>(n), cfg.get<std::uint64_t>("seed", 0));
  Outputs out;
  if (cfg.format() == "csv") {
    std::ostringstream os;
    write_samples_csv(os, batch);
    out.files.emplace_back("samples.csv", os.str());
  } else {
    json pts = json::array();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto p = batch.point(i);
      pts.push_back(std::vector<double>(p.begin(), p.end()));
    }
    out.files.emplace_back("samples.json",
                           json{{"model", batch.model_id}, {"seed", batch.seed}, {"dim", batch.dim}, {"points", pts}}.dump(1) + "\n");
  }
  return out;
}

Outputs cmd_cover(const Config& cfg) {
  require_format(cfg, "cover", {"csv", "json"});
  const DensityModel model = model_of(cfg, "cover");
  const auto n = cfg.get<std::uint64_t>("n", 0);
  const DetectionSetup st = setup_of(cfg, model, n, "cover");
  if (!model.zero_set()) throw ConfigError("cover: model " + model.id() + " declares no zero set");
  const GridCovering cov(st.region, st.r);
  const ClassifiedCovering cc = classify_covering(cov, *model.zero_set(), st.eps);
  std::vector<std::uint32_t> counts;
  if (n > 0) counts = count_occupancy(cc, sample(model, n, cfg.get<std::uint64_t>("seed", 0))).points_per_ball;
  Outputs out;
  if (cfg.format() == "csv") {
    std::ostringstream os;
    write_covering_csv(os, cc, counts);
    out.files.emplace_back("covering.csv", os.str());
  } else {
    json balls = json::array();
    for (std::size_t i = 0; i < cov.size(); ++i) {
      const auto c = cov.center(i);
      balls.push_back({{"center", std::vector<double>(c.begin(), c.end())},
                       {"class", std::string(to_string(cc.classes[i]))},
                       {"n_points", counts.empty() ? 0u : counts[i]}});
    }
    out.files.emplace_back("covering.json",
                           json{{"model", model.id()}, {"radius", st.r}, {"eps", st.eps}, {"balls", balls}}.dump(1) + "\n");
  }
  return out;
}

Outputs cmd_detect(const Config& cfg) {
  require_format(cfg, "detect", {"csv", "json"});
  const DensityModel model = model_of(cfg, "detect");
  const auto n = cfg.require<std::uint64_t>("n", "detect");
  const DetectionSetup st = setup_of(cfg, model, n, "detect");
  const auto seed = cfg.get<std::uint64_t>("seed", 0);
  const DetectResult res = run_detect(model, st.region, n, st.r, st.eps, seed);

  json summary = {{"model", model.id()},
                  {"n", n},
                  {"seed", seed},
                  {"r", st.r},
                  {"eps", st.eps},
                  {"n_balls", res.classified.covering.size()},
                  {"classes", occupancy_json(res.occupancy)},
                  {"event_A", res.occupancy.event_a},
                  {"event_B", res.occupancy.event_b},
                  {"estimate_size", res.reconstruction.empty_ball_centers.size()},
                  {"directed_hausdorff_to_S0", distance_json(res.reconstruction.directed_hausdorff_to_S0)},
                  {"directed_hausdorff_from_S0", distance_json(res.reconstruction.directed_hausdorff_from_S0)}};
  if (st.truncation_B) summary["truncation_B"] = *st.truncation_B;

  Outputs out;
  out.files.emplace_back("detect.json", summary.dump(1) + "\n");
  if (cfg.format() == "csv") {
    std::ostringstream os;
    write_covering_csv(os, res.classified, res.occupancy.points_per_ball);
    out.files.emplace_back("covering.csv", os.str());
  }
  out.stdout_text = summary.dump() + "\n";
  return out;
}

Outputs cmd_sweep(const Config& cfg, std::ostream& diag) {
  require_format(cfg, "sweep", {"csv", "json", "svg"});
  SweepConfig sc;
  sc.model_id = cfg.require<std::string>("model", "sweep");
  sc.ns = cfg.get<std::vector<std::uint64_t>>("ns", {100, 1000, 10000});
  const std::vector<double> grid = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40};
  sc.m_r_values = cfg.get<std::vector<double>>("M_r_values", grid);
  sc.m_eps_values = cfg.get<std::vector<double>>("M_eps_values", grid);
  sc.eta = cfg.get<double>("eta", 0.21);
  sc.psi = cfg.get<double>("psi", 0.01);
  sc.replications = cfg.get<std::size_t>("replications", 1);
  sc.base_seed = cfg.get<std::uint64_t>("seed", 0);
  if (!catalog_model(sc.model_id).support().compact()) throw ConfigError("sweep: model must have compact support");

  const SweepResult res = run_sweep(sc);
  for (const auto& s : res.skipped) {
    emit(diag, "warning", "cell_skipped", s.reason, {{"n", s.n}, {"M_r", s.m_r}, {"M_eps", s.m_eps}});
  }
  Outputs out;
  if (cfg.format() == "csv") {
    std::ostringstream os;
    write_sweep_csv(os, res);
    out.files.emplace_back("sweep.csv", os.str());
  } else if (cfg.format() == "json") {
    json rows = json::array();
    for (const auto& s : summarize_sweep(res)) {
      rows.push_back({{"n", s.n},
                      {"M_r", s.m_r},
                      {"M_eps", s.m_eps},
                      {"replications", s.replications},
                      {"mean_fraction_inside", s.mean_fraction[static_cast<std::size_t>(BallClass::EpsInside)]},
                      {"mean_fraction_neighboring", s.mean_fraction[static_cast<std::size_t>(BallClass::EpsNeighboring)]},
                      {"mean_fraction_outside", s.mean_fraction[static_cast<std::size_t>(BallClass::EpsOutside)]},
                      {"p_event_A", s.p_event_a},
                      {"p_event_B", s.p_event_b}});
    }
    out.files.emplace_back("sweep.json", rows.dump(1) + "\n");
  }
  std::ostringstream svg;
  write_sweep_svg(svg, res);
  out.files.emplace_back("sweep.svg", svg.str());
  return out;
}

Outputs cmd_heatmap(const Config& cfg) {
  require_format(cfg, "heatmap", {"csv", "svg"});
  const auto ids = cfg.get<std::vector<std::string>>("models", {"f_quadratic", "g_twobumps", "h_parabolic"});
  const auto n = cfg.get<std::uint64_t>("n", 10000);
  const auto bins = cfg.get<std::size_t>("bins", 100);
  const auto seed = cfg.get<std::uint64_t>("seed", 0);
  if (n < 1) throw ConfigError("heatmap: n must be >= 1");
  std::vector<HeatmapRow> rows;
  for (const auto& id : ids) rows.push_back({id, heatmap_1d(catalog_model(id), n, bins, seed)});
  Outputs out;
  if (cfg.format() == "csv") {
    std::ostringstream os;
    os << "model,bin,lower,upper,occupied\n";
    for (const auto& row : rows) {
      for (std::size_t b = 0; b < row.occupied.size(); ++b) {
        const double w = 2.0 / static_cast<double>(bins);
        os << row.label << ',' << b << ',' << num(-1.0 + w * static_cast<double>(b)) << ','
           << num(-1.0 + w * static_cast<double>(b + 1)) << ',' << int(row.occupied[b]) << '\n';
      }
    }
    out.files.emplace_back("heatmap.csv", os.str());
  }
  std::ostringstream svg;
  write_heatmap_svg(svg, rows);
  out.files.emplace_back("heatmap.svg", svg.str());
  return out;
}

Outputs cmd_rates_check(const Config& cfg) {
  require_format(cfg, "rates check", {"csv", "json"});
  const RateSchedule s = schedule_of(cfg);
  std::size_t d;
  std::vector<ComponentOrders> comps;
  if (cfg.has("components")) {
    d = cfg.require<std::size_t>("d", "rates check");
    for (const auto& c : cfg.j.at("components")) {
      comps.push_back({c.at("d0").get<int>(), c.at("upper_order").get<double>(), c.at("lower_order").get<double>()});
    }
  } else {
    const DensityModel model = model_of(cfg, "rates check");
    if (!model.zero_set()) throw ConfigError("rates check: model declares no zero set");
    const SmoothnessOrders o = smoothness_orders(model);
    d = cfg.get<std::size_t>("d", model.dim());
    for (const auto& c : model.zero_set()->components()) {
      comps.push_back({c.intrinsic_dimension(), o.upper_order, o.lower_order});
    }
  }
  json j;
  try {
    j = to_json(check_corollary1(d, comps, s));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!cfg.has("xi")) j["xi_condition_value"] = nullptr, j["xi_condition_holds"] = nullptr;
  Outputs out;
  out.stdout_text = j.dump(2) + "\n";
  if (cfg.has("output_dir")) out.files.emplace_back("rates_check.json", j.dump(2) + "\n");
  return out;
}

Outputs cmd_tail_support(const Config& cfg) {
  require_format(cfg, "tail-support", {"csv", "json"});
  const DensityModel model = model_of(cfg, "tail-support");
  if (!model.is_tail()) throw ConfigError("tail-support: model must be a tail model");
  std::optional<double> md;
  if (cfg.has("M_delta")) md = cfg.get<double>("M_delta", 0.0);
  const auto sched = build_truncation_schedule(model, cfg.get<double>("eta", 0.3), cfg.get<double>("xi", 0.1), md);
  const auto ns = cfg.get<std::vector<std::uint64_t>>("ns", {1000, 10000, 100000, 1000000});
  std::vector<double> nd(ns.begin(), ns.end());

  json table = json::array();
  std::ostringstream csv;
  csv << "n,delta,B,eps,m\n";
  for (auto n : ns) {
    const double x = static_cast<double>(n);
    const double delta = sched.delta(x), B = sched.B(x), eps = sched.eps(x), m = sched.m_value(x);
    csv << n << ',' << num(delta) << ',' << num(B) << ',' << num(eps) << ',' << num(m) << '\n';
    table.push_back({{"n", n}, {"delta", delta}, {"B", B}, {"eps", eps}, {"m", m}});
  }
  json summary = {{"model", model.id()},
                  {"eta", sched.eta()},
                  {"xi", sched.xi()},
                  {"gamma1", sched.gamma1()},
                  {"psi", sched.psi()},
                  {"M_delta", sched.m_delta()},
                  {"delta_exponent", sched.delta_exponent()},
                  {"N1", sched.threshold_n1()}};
  bool two_decades = nd.size() >= 2 && *std::max_element(nd.begin(), nd.end()) >= 100.0 * *std::min_element(nd.begin(), nd.end());
  summary["m_decay_slope"] = two_decades ? json(validate_m_decay(sched, nd)) : json(nullptr);

  Outputs out;
  if (cfg.format() == "csv") {
    out.files.emplace_back("tail_support.csv", csv.str());
  } else {
    json all = summary;
    all["table"] = table;
    out.files.emplace_back("tail_support.json", all.dump(1) + "\n");
  }
  out.stdout_text = summary.dump() + "\n";
  return out;
}

ZeroSet zero_set_from_json(const json& arr) {
  std::vector<ZeroSetPrimitive> prims;
  auto pt = [](const json& c, const char* key) {
    if (!c.contains(key)) throw ConfigError(std::string("zero_set: component lacks '") + key + "'");
    return Point(c.at(key).get<std::vector<double>>());
  };
  for (const auto& c : arr) {
    const auto type = c.at("type").get<std::string>();
    if (type == "point") prims.push_back(ZeroSetPrimitive::point(pt(c, "at")));
    else if (type == "segment") prims.push_back(ZeroSetPrimitive::segment(pt(c, "a"), pt(c, "b")));
    else prims.push_back(ZeroSetPrimitive::box(pt(c, "lower"), pt(c, "upper")));
  }
  return ZeroSet(std::move(prims));
}

Outputs cmd_boxdim(const Config& cfg) {
  require_format(cfg, "boxdim", {"csv", "json"});
  std::optional<ZeroSet> s;
  if (cfg.has("zero_set")) {
    try {
      s = zero_set_from_json(cfg.j.at("zero_set"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("boxdim: ") + e.what());
    }
  } else {
    s = model_of(cfg, "boxdim").zero_set();
    if (!s) throw ConfigError("boxdim: model declares no zero set");
  }
  const auto deltas = cfg.get<std::vector<double>>("deltas", {0.05, 0.025, 0.0125, 0.00625});
  BoxCountingResult r;
  try {
    r = box_counting_dimension(*s, deltas);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  json j = {{"upper_estimate", r.upper_estimate},
            {"lower_estimate", r.lower_estimate},
            {"declared_dimension", s->declared_dimension()},
            {"deltas", r.deltas},
            {"counts", r.counts},
            {"lower_counts", r.lower_counts}};
  Outputs out;
  out.stdout_text = j.dump() + "\n";
  if (cfg.format() == "csv") {
    std::ostringstream os;
    os << "delta,count_upper,count_lower\n";
    for (std::size_t i = 0; i < r.deltas.size(); ++i) {
      os << num(r.deltas[i]) << ',' << num(r.counts[i]) << ',' << num(r.lower_counts[i]) << '\n';
    }
    out.files.emplace_back("boxdim.csv", os.str());
  } else {
    out.files.emplace_back("boxdim.json", j.dump(1) + "\n");
  }
  return out;
}

// ---- schema ----------------------------------------------------------------

bool type_matches(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "integer") return v.is_number_integer() || (v.is_number_float() && std::trunc(v.get<double>()) == v.get<double>());
  if (t == "number") return v.is_number();
  if (t == "null") return v.is_null();
  return false;
}

}  // namespace

const json& config_schema() {
  static const json schema = json::parse(generated::kConfigSchema);
  return schema;
}

std::vector<std::string> validate_against_schema(const json& v, const json& schema, const std::string& pointer) {
  std::vector<std::string> errs;
  const std::string where = pointer.empty() ? "/" : pointer;
  if (schema.contains("type") && !type_matches(v, schema.at("type").get<std::string>())) {
    errs.push_back(where + ": expected " + schema.at("type").get<std::string>());
    return errs;
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema.at("enum")) found = found || e == v;
    if (!found) errs.push_back(where + ": value " + v.dump() + " not in enum");
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (schema.contains("minimum") && x < schema.at("minimum").get<double>()) errs.push_back(where + ": below minimum");
    if (schema.contains("maximum") && x > schema.at("maximum").get<double>()) errs.push_back(where + ": above maximum");
    if (schema.contains("exclusiveMinimum") && !(x > schema.at("exclusiveMinimum").get<double>())) {
      errs.push_back(where + ": must exceed " + schema.at("exclusiveMinimum").dump());
    }
    if (schema.contains("exclusiveMaximum") && !(x < schema.at("exclusiveMaximum").get<double>())) {
      errs.push_back(where + ": must be below " + schema.at("exclusiveMaximum").dump());
    }
  }
  if (v.is_string() && schema.contains("minLength") &&
      v.get<std::string>().size() < schema.at("minLength").get<std::size_t>()) {
    errs.push_back(where + ": string too short");
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema.at("minItems").get<std::size_t>()) {
      errs.push_back(where + ": needs at least " + schema.at("minItems").dump() + " items");
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        auto sub = validate_against_schema(v[i], schema.at("items"), pointer + "/" + std::to_string(i));
        errs.insert(errs.end(), sub.begin(), sub.end());
      }
    }
  }
  if (v.is_object()) {
    const json empty = json::object();
    const json& props = schema.contains("properties") ? schema.at("properties") : empty;
    if (schema.contains("required")) {
      for (const auto& k : schema.at("required")) {
        if (!v.contains(k.get<std::string>())) errs.push_back(where + ": missing required key '" + k.get<std::string>() + "'");
      }
    }
    const bool closed = schema.contains("additionalProperties") && schema.at("additionalProperties") == false;
    for (const auto& [key, val] : v.items()) {
      if (props.contains(key)) {
        auto sub = validate_against_schema(val, props.at(key), pointer + "/" + key);
        errs.insert(errs.end(), sub.begin(), sub.end());
      } else if (closed) {
        errs.push_back(where + ": unknown key '" + key + "'");
      }
    }
  }
  return errs;
}

json to_json(const ConditionReport& rep) {
  json comps = json::array();
  for (const auto& c : rep.components) {
    comps.push_back({{"d0", c.d0}, {"upper_order", c.upper_order}, {"lower_order", c.lower_order}});
  }
  return {{"d", rep.d},
          {"eta", rep.schedule.eta},
          {"psi", rep.schedule.psi},
          {"xi", rep.schedule.xi},
          {"components", comps},
          {"condition_A_value", rep.condition_a_value},
          {"condition_A_holds", rep.condition_a_holds},
          {"condition_A_binding_component", rep.binding_a},
          {"condition_B_value", rep.condition_b_value},
          {"condition_B_holds", rep.condition_b_holds},
          {"condition_B_binding_component", rep.binding_b},
          {"xi_condition_value", rep.xi_condition_value},
          {"xi_condition_holds", rep.xi_condition_holds}};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& diag) {
  CLI::App app{"Zero-density region detection by ball coverings", "zdr"};
  app.require_subcommand(1);

  std::string config_path;
  int threads = 0;
  json flags = json::object();

  auto common = [&](CLI::App* sc) {
    sc->add_option("--config", config_path, "JSON configuration file");
    sc->add_option("--threads", threads, "Cap on worker threads")->check(CLI::PositiveNumber);
    auto str = [&](const char* flag, const char* key) {
      sc->add_option_function<std::string>(flag, [&flags, key](const std::string& v) { flags[key] = v; });
    };
    auto real = [&](const char* flag, const char* key) {
      sc->add_option_function<double>(flag, [&flags, key](const double& v) { flags[key] = v; });
    };
    auto integer = [&](const char* flag, const char* key) {
      sc->add_option_function<std::int64_t>(flag, [&flags, key](const std::int64_t& v) { flags[key] = v; });
    };
    str("--model", "model");
    str("--output-dir", "output_dir");
    str("--format", "format");
    integer("--seed", "seed");
    integer("--n", "n");
    integer("--replications", "replications");
    integer("--bins", "bins");
    integer("--d", "d");
    real("--eta", "eta");
    real("--psi", "psi");
    real("--xi", "xi");
    real("--m-r", "M_r");
    real("--m-eps", "M_eps");
    real("--r", "r");
    real("--eps", "eps");
    real("--m-delta", "M_delta");
  };

  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"sample", "cover", "detect", "sweep", "heatmap", "tail-support", "boxdim"}) {
    subs[name] = app.add_subcommand(name);
    common(subs[name]);
  }
  subs["sample"]->description("Draw a sample and write it as CSV");
  subs["cover"]->description("Build and classify a grid covering");
  subs["detect"]->description("Single detection trial with S0 reconstruction");
  subs["sweep"]->description("Filled-fraction sweep over n, M_r and M_eps");
  subs["heatmap"]->description("1D bin-occupancy strips");
  subs["tail-support"]->description("(1-delta)-support schedule for tail models");
  subs["boxdim"]->description("Box-counting dimension of a zero set");
  CLI::App* rates = app.add_subcommand("rates", "Rate-condition tools");
  rates->require_subcommand(1);
  CLI::App* check = rates->add_subcommand("check", "Evaluate the detection rate conditions");
  common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, diag);
    emit(diag, "error", "config_invalid", e.what());
    return kConfigInvalid;
  }

  Config cfg;
  try {
    cfg.j = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file " + config_path);
      cfg.j = json::parse(in);
    }
    if (!cfg.j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : flags.items()) cfg.j[k] = v;
    const auto errs = validate_against_schema(cfg.j, config_schema());
    if (!errs.empty()) {
      std::string msg = errs.front();
      for (std::size_t i = 1; i < errs.size(); ++i) msg += "; " + errs[i];
      throw ConfigError("config fails schema: " + msg);
    }
  } catch (const ConfigError& e) {
    emit(diag, "error", "config_invalid", e.what());
    return kConfigInvalid;
  } catch (const json::exception& e) {
    emit(diag, "error", "config_invalid", std::string("config is not valid JSON: ") + e.what());
    return kConfigInvalid;
  }

  if (threads > 0) kernels::set_threads(threads);

  Outputs result;
  try {
    if (subs["sample"]->parsed()) result = cmd_sample(cfg);
    else if (subs["cover"]->parsed()) result = cmd_cover(cfg);
    else if (subs["detect"]->parsed()) result = cmd_detect(cfg);
    else if (subs["sweep"]->parsed()) result = cmd_sweep(cfg, diag);
    else if (subs["heatmap"]->parsed()) result = cmd_heatmap(cfg);
    else if (subs["tail-support"]->parsed()) result = cmd_tail_support(cfg);
    else if (subs["boxdim"]->parsed()) result = cmd_boxdim(cfg);
    else result = cmd_rates_check(cfg);
  } catch (const InfeasibleError& e) {
    json extra = json::object();
    if (e.minimal_n()) extra["minimal_n"] = *e.minimal_n();
    emit(diag, "error", "infeasible", e.what(), extra);
    return kInfeasible;
  } catch (const ConfigError& e) {
    emit(diag, "error", "config_invalid", e.what());
    return kConfigInvalid;
  } catch (const std::invalid_argument& e) {
    emit(diag, "error", "config_invalid", e.what());
    return kConfigInvalid;
  } catch (const json::exception& e) {
    emit(diag, "error", "config_invalid", e.what());
    return kConfigInvalid;
  } catch (const std::exception& e) {
    emit(diag, "error", "internal", e.what());
    return kInternalError;
  }

  if (!result.files.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.get<std::string>("output_dir", "out");
    try {
      fs::create_directories(dir);
      for (const auto& [name, content] : result.files) {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        f << content;
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        emit(diag, "info", "wrote", (dir / name).string());
      }
    } catch (const std::exception& e) {
      emit(diag, "error", "io", e.what());
      return kInternalError;
    }
  }
  out << result.stdout_text;
  return kOk;
}

}  // namespace zdr::cli
