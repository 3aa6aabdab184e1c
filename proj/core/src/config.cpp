#include "eikograph/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace eikograph {

using nlohmann::json;

namespace {

std::vector<double> as_doubles(const json& j) {
  std::vector<double> v;
  for (const auto& e : j) v.push_back(e.get<double>());
  return v;
}

ManifoldSpec parse_manifold(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sphere" || kind == "unit-sphere") {
    return ManifoldSpec::sphere(j.value("intrinsic_dim", 2),
                                j.value("radius", 1.0));
  }
  if (kind == "flat-torus" || kind == "torus")
    return ManifoldSpec::flat_torus(as_doubles(j.at("periods")));
  if (kind == "euclidean-box" || kind == "box")
    return ManifoldSpec::box(as_doubles(j.at("lower")), as_doubles(j.at("upper")));
  throw ConfigError("unknown manifold kind: " + kind);
}

BoundarySpec parse_boundary(const json& j, const ManifoldSpec& spec) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "point-set") {
    std::vector<std::vector<double>> pts;
    for (const auto& p : j.at("points")) pts.push_back(as_doubles(p));
    return BoundarySpec::point_set(std::move(pts));
  }
  if (kind == "cap")
    return BoundarySpec::cap(as_doubles(j.at("center")), j.at("radius").get<double>());
  if (kind == "sublevel") {
    auto g = BoundarySpec::sublevel(j.value("function", std::string("coordinate")),
                                    j.value("axis", 0), j.at("threshold").get<double>());
    return materialize_boundary(spec, g, j.value("sample_count", std::size_t{4096}));
  }
  throw ConfigError("unknown boundary kind: " + kind);
}

json manifold_json(const ManifoldSpec& spec) {
  json j;
  j["kind"] = spec.kind_name();
  j["intrinsic_dim"] = spec.intrinsic_dim;
  switch (spec.kind) {
    case ManifoldKind::Sphere:
      j["radius"] = spec.radius;
      break;
    case ManifoldKind::FlatTorus:
      j["periods"] = spec.periods;
      break;
    case ManifoldKind::Box:
      j["lower"] = spec.lower;
      j["upper"] = spec.upper;
      break;
  }
  return j;
}

json boundary_json(const BoundarySpec& g) {
  json j;
  switch (g.kind) {
    case BoundarySpec::Kind::PointSet:
      if (g.level_sample_count > 0) {
        j["kind"] = "sublevel";
        j["function"] = g.level_function;
        j["axis"] = g.level_axis;
        j["threshold"] = g.level_threshold;
        j["sample_count"] = g.level_sample_count;
        j["sample_spacing"] = g.level_sample_spacing;
      } else {
        j["kind"] = "point-set";
        j["points"] = g.points;
      }
      break;
    case BoundarySpec::Kind::Cap:
      j["kind"] = "cap";
      j["center"] = g.cap_center;
      j["radius"] = g.cap_radius;
      break;
    case BoundarySpec::Kind::Sublevel:
      j["kind"] = "sublevel";
      j["function"] = g.level_function;
      j["axis"] = g.level_axis;
      j["threshold"] = g.level_threshold;
      break;
  }
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config parse error: ") + ex.what());
  }
  RunConfig cfg;
  try {
    cfg.sweep.manifold = parse_manifold(j.at("manifold"));
    cfg.sweep.boundary = parse_boundary(j.at("boundary"), cfg.sweep.manifold);

    const json jk = j.value("kernel", json{{"profile", "triangular"}});
    std::optional<double> a_override;
    if (jk.contains("a")) a_override = jk.at("a").get<double>();
    cfg.sweep.kernel =
        make_kernel(jk.value("profile", std::string("triangular")),
                    jk.contains("params") ? as_doubles(jk.at("params"))
                                          : std::vector<double>{},
                    a_override);

    const json jp = j.value("potential", json{{"id", "constant"}, {"params", {1.0}}});
    cfg.sweep.potential_id = jp.value("id", std::string("constant"));
    cfg.sweep.potential_params =
        jp.contains("params") ? as_doubles(jp.at("params")) : std::vector<double>{1.0};

    const json ji = j.value("initial", json{{"id", "zero"}});
    cfg.sweep.initial_id = ji.value("id", std::string("zero"));
    cfg.sweep.initial_params =
        ji.contains("params") ? as_doubles(ji.at("params")) : std::vector<double>{};

    const json jd = j.value("density", json{{"id", "uniform"}});
    cfg.sweep.density_id = jd.value("id", std::string("uniform"));
    cfg.sweep.density_params =
        jd.contains("params") ? as_doubles(jd.at("params")) : std::vector<double>{};

    const json js = j.value("sweep", json::object());
    if (js.contains("n_list"))
      for (const auto& e : js.at("n_list"))
        cfg.sweep.n_list.push_back(e.get<std::size_t>());
    cfg.sweep.nu = js.value("nu", 0.5);
    cfg.sweep.xi = js.value("xi", 0.5);
    cfg.sweep.zeta = js.value("zeta", 0.5);
    cfg.sweep.tau = js.value("tau", 1.0);
    cfg.sweep.trials_per_n = js.value("trials_per_n", std::size_t{5});
    cfg.sweep.T = js.value("T", 2.0);
    cfg.sweep.seed_base = js.value("seed_base", std::uint64_t{0});
    if (js.contains("k1") && !js.at("k1").is_null())
      cfg.sweep.k1 = js.at("k1").get<double>();
    cfg.sweep.calibration_trials = js.value("calibration_trials", std::size_t{50});
    cfg.sweep.probe_count = js.value("probe_count", std::size_t{1000});
    cfg.sweep.boundary_sample_count =
        js.value("boundary_sample_count", std::size_t{512});
    cfg.sweep.record_runtime = js.value("record_runtime", false);

    const json jv = j.value("solver", json::object());
    cfg.solver.epsilon = jv.value("epsilon", 0.2);
    cfg.solver.dt = jv.value("dt", 0.0);
    cfg.solver.T = jv.value("T", cfg.sweep.T);
    const std::string mode = jv.value("cfl_mode", std::string("strict-reject"));
    if (mode == "strict-reject")
      cfg.solver.cfl_mode = CflMode::StrictReject;
    else if (mode == "auto-clamp")
      cfg.solver.cfl_mode = CflMode::AutoClamp;
    else
      throw ConfigError("unknown cfl_mode: " + mode);
    cfg.solver.steady_tol = jv.value("steady_tol", 1e-10);
    cfg.solver.potential_id = cfg.sweep.potential_id;
    cfg.solver.potential_params = cfg.sweep.potential_params;
    cfg.solver.initial_id = cfg.sweep.initial_id;
    cfg.solver.initial_params = cfg.sweep.initial_params;
    cfg.sweep.steady_tol = cfg.solver.steady_tol;

    const json jsm = j.value("sample", json::object());
    cfg.sample_n = jsm.value("n", std::size_t{1000});

    const json jmc = j.value("mc", json::object());
    cfg.mc_n = jmc.value("n", std::size_t{2000});
    cfg.mc_trials = jmc.value("trials", std::size_t{200});
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config field error: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("config value error: ") + ex.what());
  }

  // Canonical echo with defaults applied; nlohmann objects serialize with
  // sorted keys, which makes the hash stable.
  json canon;
  canon["manifold"] = manifold_json(cfg.sweep.manifold);
  canon["boundary"] = boundary_json(cfg.sweep.boundary);
  canon["kernel"] = {{"profile", to_string(cfg.sweep.kernel.profile)},
                     {"params", cfg.sweep.kernel.params},
                     {"a", cfg.sweep.kernel.a}};
  canon["potential"] = {{"id", cfg.sweep.potential_id},
                        {"params", cfg.sweep.potential_params}};
  canon["initial"] = {{"id", cfg.sweep.initial_id},
                      {"params", cfg.sweep.initial_params}};
  canon["density"] = {{"id", cfg.sweep.density_id},
                      {"params", cfg.sweep.density_params}};
  canon["sweep"] = {{"n_list", cfg.sweep.n_list},
                    {"nu", cfg.sweep.nu},
                    {"xi", cfg.sweep.xi},
                    {"zeta", cfg.sweep.zeta},
                    {"tau", cfg.sweep.tau},
                    {"trials_per_n", cfg.sweep.trials_per_n},
                    {"T", cfg.sweep.T},
                    {"seed_base", cfg.sweep.seed_base},
                    {"calibration_trials", cfg.sweep.calibration_trials},
                    {"probe_count", cfg.sweep.probe_count},
                    {"boundary_sample_count", cfg.sweep.boundary_sample_count},
                    {"record_runtime", cfg.sweep.record_runtime}};
  if (cfg.sweep.k1) canon["sweep"]["k1"] = *cfg.sweep.k1;
  canon["solver"] = {{"epsilon", cfg.solver.epsilon},
                     {"dt", cfg.solver.dt},
                     {"T", cfg.solver.T},
                     {"cfl_mode", cfg.solver.cfl_mode == CflMode::StrictReject
                                      ? "strict-reject"
                                      : "auto-clamp"},
                     {"steady_tol", cfg.solver.steady_tol}};
  canon["sample"] = {{"n", cfg.sample_n}};
  canon["mc"] = {{"n", cfg.mc_n}, {"trials", cfg.mc_trials}};
  cfg.canonical = canon.dump(2) + "\n";
  cfg.hash = hash_hex(fnv1a_hash(cfg.canonical));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace eikograph
