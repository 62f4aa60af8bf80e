#include "cmnls/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmnls/errors.hpp"

namespace cmnls {

using nlohmann::json;

namespace {

json box_json(const Box& b) { return json::array({b.re_min, b.re_max, b.im_min, b.im_max}); }

Box box_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ConfigError("a box is [re_min, re_max, im_min, im_max]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json pulse_json(const GaussianPulse& p) {
  return {{"amplitude", p.amplitude}, {"center", p.center}, {"width", p.width}};
}

GaussianPulse pulse_from(const json& j) {
  return {j.at("amplitude").get<double>(), j.at("center").get<double>(),
          j.at("width").get<double>()};
}

json to_json(const RunConfig& c) {
  const Tolerances& t = c.tol;
  const SpectralSettings& s = c.spectral;
  json j;
  j["params"] = {{"delta", c.params.delta},
                 {"gamma", c.params.gamma},
                 {"epsilon", c.calibrate_epsilon ? json("calibrate") : json(c.params.epsilon)}};
  j["grid"] = {{"L", c.grid.L},   {"T", c.grid.T},
               {"dx", c.grid.dx}, {"dt", c.grid.dt},
               {"store_stride", c.grid.store_stride}, {"c_stab", c.grid.c_stab}};
  j["initial"] = {{"u", pulse_json(c.u0)}, {"v", pulse_json(c.v0)}};
  j["refinement_dx"] = c.refinement_dx;
  j["tolerances"] = {{"corner", t.fields.corner},
                     {"decay", t.fields.decay},
                     {"mass_drift", t.mass_drift},
                     {"pde_order", t.pde_order},
                     {"plane_wave_order", t.plane_wave_order},
                     {"det", t.det},
                     {"det_algebraic", t.det_algebraic},
                     {"path_independence_factor", t.path_independence_factor},
                     {"symmetry", t.symmetry},
                     {"discrimination", t.discrimination},
                     {"jump", t.jump},
                     {"asymptotic", t.asymptotic},
                     {"global_relation", t.global_relation},
                     {"residue", t.residue},
                     {"reconstruction", t.reconstruction},
                     {"boundary", t.boundary},
                     {"singular", t.singular}};
  j["spectral"] = {{"c_h", s.c_h},
                   {"guard_exponent", s.guard_exponent},
                   {"region_box", box_json(s.region_box)},
                   {"raster", s.raster},
                   {"classify_samples", s.classify_samples},
                   {"det_samples", s.det_samples},
                   {"det_radius", s.det_radius},
                   {"boundary_samples", s.boundary_samples},
                   {"boundary_radius", s.boundary_radius},
                   {"symmetry_samples", s.symmetry_samples},
                   {"symmetry_radius", s.symmetry_radius},
                   {"global_samples", s.global_samples},
                   {"global_radius", s.global_radius},
                   {"global_margin", s.global_margin},
                   {"perturbation", s.perturbation},
                   {"radii", s.radii},
                   {"ray_angle", s.ray_angle ? json(*s.ray_angle) : json(nullptr)},
                   {"probe_x", s.probe_x},
                   {"probe_t", s.probe_t},
                   {"residue_radius", s.residue_radius},
                   {"residue_nodes", s.residue_nodes},
                   {"zero_search_box", box_json(s.zero_search_box)}};
  j["dataset"] = c.dataset;
  j["out_dir"] = c.out_dir;
  j["suites"] = c.suites;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["override_domain_guard"] = c.override_domain_guard;
  return j;
}

RunConfig from_json(const json& j) {
  RunConfig c;
  const json& p = j.at("params");
  c.params.delta = p.at("delta").get<double>();
  c.params.gamma = p.at("gamma").get<double>();
  if (p.at("epsilon").is_string()) {
    if (p.at("epsilon").get<std::string>() != "calibrate")
      throw ConfigError("params.epsilon must be 1, -1 or \"calibrate\"");
    c.calibrate_epsilon = true;
  } else {
    c.calibrate_epsilon = false;
    c.params.epsilon = p.at("epsilon").get<int>();
  }
  const json& g = j.at("grid");
  c.grid.L = g.at("L").get<double>();
  c.grid.T = g.at("T").get<double>();
  c.grid.dx = g.at("dx").get<double>();
  c.grid.dt = g.at("dt").get<double>();
  c.grid.store_stride = g.at("store_stride").get<std::size_t>();
  c.grid.c_stab = g.at("c_stab").get<double>();
  c.u0 = pulse_from(j.at("initial").at("u"));
  c.v0 = pulse_from(j.at("initial").at("v"));
  c.refinement_dx = j.at("refinement_dx").get<std::vector<double>>();
  const json& t = j.at("tolerances");
  Tolerances& tol = c.tol;
  tol.fields.corner = t.at("corner").get<double>();
  tol.fields.decay = t.at("decay").get<double>();
  tol.mass_drift = t.at("mass_drift").get<double>();
  tol.pde_order = t.at("pde_order").get<double>();
  tol.plane_wave_order = t.at("plane_wave_order").get<double>();
  tol.det = t.at("det").get<double>();
  tol.det_algebraic = t.at("det_algebraic").get<double>();
  tol.path_independence_factor = t.at("path_independence_factor").get<double>();
  tol.symmetry = t.at("symmetry").get<double>();
  tol.discrimination = t.at("discrimination").get<double>();
  tol.jump = t.at("jump").get<double>();
  tol.asymptotic = t.at("asymptotic").get<double>();
  tol.global_relation = t.at("global_relation").get<double>();
  tol.residue = t.at("residue").get<double>();
  tol.reconstruction = t.at("reconstruction").get<double>();
  tol.boundary = t.at("boundary").get<double>();
  tol.singular = t.at("singular").get<double>();
  const json& s = j.at("spectral");
  SpectralSettings& sp = c.spectral;
  sp.c_h = s.at("c_h").get<double>();
  sp.guard_exponent = s.at("guard_exponent").get<double>();
  sp.region_box = box_from(s.at("region_box"));
  sp.raster = s.at("raster").get<std::size_t>();
  sp.classify_samples = s.at("classify_samples").get<std::size_t>();
  sp.det_samples = s.at("det_samples").get<std::size_t>();
  sp.det_radius = s.at("det_radius").get<double>();
  sp.boundary_samples = s.at("boundary_samples").get<std::size_t>();
  sp.boundary_radius = s.at("boundary_radius").get<double>();
  sp.symmetry_samples = s.at("symmetry_samples").get<std::size_t>();
  sp.symmetry_radius = s.at("symmetry_radius").get<double>();
  sp.global_samples = s.at("global_samples").get<std::size_t>();
  sp.global_radius = s.at("global_radius").get<double>();
  sp.global_margin = s.at("global_margin").get<double>();
  sp.perturbation = s.at("perturbation").get<double>();
  sp.radii = s.at("radii").get<std::vector<double>>();
  if (!s.at("ray_angle").is_null()) sp.ray_angle = s.at("ray_angle").get<double>();
  sp.probe_x = s.at("probe_x").get<std::vector<double>>();
  sp.probe_t = s.at("probe_t").get<std::vector<double>>();
  sp.residue_radius = s.at("residue_radius").get<double>();
  sp.residue_nodes = s.at("residue_nodes").get<int>();
  sp.zero_search_box = box_from(s.at("zero_search_box"));
  c.dataset = j.at("dataset").get<std::string>();
  c.out_dir = j.at("out_dir").get<std::string>();
  c.suites = j.at("suites").get<std::vector<std::string>>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.threads = j.at("threads").get<int>();
  c.override_domain_guard = j.at("override_domain_guard").get<bool>();
  return c;
}

// overlay `user` on `base`, refusing keys the defaults do not know
void overlay(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError("config section " + path + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key " + key);
    json& dst = base[it.key()];
    if (dst.is_object() && it->is_object())
      overlay(dst, *it, key);
    else
      dst = *it;
  }
}

}  // namespace

const std::string& default_config_text() {
  static const std::string text = config_to_text(RunConfig{});
  return text;
}

std::string config_to_text(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

RunConfig config_from_text(const std::string& text) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  json merged = to_json(RunConfig{});
  overlay(merged, user, "");
  RunConfig c;
  try {
    c = from_json(merged);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path, bool dataset_is_input) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = config_from_text(ss.str());
  if (!c.dataset.empty()) {
    // relative dataset paths are taken relative to the config file
    std::filesystem::path d(c.dataset);
    if (d.is_relative()) c.dataset = (std::filesystem::path(path).parent_path() / d).string();
    if (dataset_is_input && !std::filesystem::exists(c.dataset))
      throw ConfigError("dataset " + c.dataset + " does not exist");
  }
  return c;
}

void validate_config(const RunConfig& c) {
  try {
    c.params.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  const Tolerances& t = c.tol;
  for (double v : {t.fields.corner, t.fields.decay, t.mass_drift, t.pde_order, t.plane_wave_order,
                   t.det, t.det_algebraic, t.path_independence_factor, t.symmetry,
                   t.discrimination, t.jump, t.asymptotic, t.global_relation, t.residue,
                   t.reconstruction, t.boundary, t.singular})
    if (!(v > 0)) throw ConfigError("tolerances must be positive");
  for (const Box& b : {c.spectral.region_box, c.spectral.zero_search_box})
    if (!(b.re_max > b.re_min && b.im_max > b.im_min)) throw ConfigError("degenerate lambda box");
  const GridSettings& g = c.grid;
  if (!(g.L > 0 && g.T > 0 && g.dx > 0 && g.dt > 0 && g.store_stride > 0 && g.c_stab > 0))
    throw ConfigError("grid settings must be positive");
  if (c.spectral.radii.size() < 3) throw ConfigError("at least three ray radii are needed");
  for (std::size_t i = 1; i < c.spectral.radii.size(); ++i)
    if (!(c.spectral.radii[i] > c.spectral.radii[i - 1]))
      throw ConfigError("ray radii must increase");
  if (c.refinement_dx.size() < 2) throw ConfigError("refinement needs at least two grids");
  if (!(c.spectral.c_h > 0 && c.spectral.guard_exponent > 0))
    throw ConfigError("step and guard settings must be positive");
}

}  // namespace cmnls
