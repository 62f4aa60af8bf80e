#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmnls/fields.hpp"
#include "cmnls/regions.hpp"

namespace cmnls {

// a exp(-((x - center)/width)^2)
struct GaussianPulse {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;
};

struct GridSettings {
  double L = 20.0;  // line [-L, L]; half-line data on [0, L]
  double T = 1.0;
  double dx = 0.025;
  double dt = 1.25e-4;
  std::size_t store_stride = 20;
  double c_stab = 0.2;
};

struct Tolerances {
  FieldTolerances fields;
  double mass_drift = 1e-8;
  double pde_order = 2.0;
  double plane_wave_order = 4.0;
  double det = 1e-8;
  double det_algebraic = 1e-10;
  double path_independence_factor = 5.0;
  double symmetry = 1e-6;
  double discrimination = 10.0;
  double jump = 1e-10;
  double asymptotic = 1e-4;
  double global_relation = 1e-4;
  double residue = 1e-6;
  double reconstruction = 1e-3;
  double boundary = kBoundaryTol;
  double singular = 1e-10;
};

struct SpectralSettings {
  double c_h = 0.1;
  double guard_exponent = 20.0;
  Box region_box{-3, 3, -3, 3};
  std::size_t raster = 600;
  std::size_t classify_samples = 10000;
  std::size_t det_samples = 200;
  double det_radius = 2.0;
  std::size_t boundary_samples = 50;  // per boundary arc
  double boundary_radius = 2.0;
  std::size_t symmetry_samples = 8;
  double symmetry_radius = 1.0;
  std::size_t global_samples = 40;
  double global_radius = 1.2;
  double global_margin = 0.05;
  double perturbation = 1e-2;
  std::vector<double> radii{4, 8, 16, 32};
  std::optional<double> ray_angle;
  std::vector<double> probe_x{1, 2, 3, 4, 5, 6, 7};
  std::vector<double> probe_t{0, 0.25, 0.5, 0.75, 1.0};
  double residue_radius = 0.05;
  int residue_nodes = 128;
  // the spectral scalars of a dataset grow like e^{2 |Im k| L} off their
  // region, which bounds how far out a search can evaluate them
  Box zero_search_box{-1.5, 1.5, -1.5, 1.5};
};

struct RunConfig {
  ModelParams params;
  bool calibrate_epsilon = true;  // otherwise params.epsilon is taken as given
  GridSettings grid;
  GaussianPulse u0{0.3, 5.0, 1.0};
  GaussianPulse v0{0.2, 5.0, 1.0};
  std::vector<double> refinement_dx{0.1, 0.05, 0.025};
  Tolerances tol;
  SpectralSettings spectral;
  std::string dataset;
  std::string out_dir = "out";
  std::vector<std::string> suites;  // empty: all
  std::uint64_t seed = 20261016;
  int threads = 0;  // 0: OpenMP default
  bool override_domain_guard = false;
};

// The member initializers above are the single table of defaults;
// default_config_text() renders them as a config document.
const std::string& default_config_text();

// Parses a config document and overlays it on the defaults. Unknown keys,
// non-positive tolerances and degenerate boxes raise ConfigError.
RunConfig config_from_text(const std::string& text);
// Relative dataset paths resolve against the config file's directory; the
// dataset must exist unless it is an output (generate).
RunConfig load_config(const std::string& path, bool dataset_is_input = true);
std::string config_to_text(const RunConfig& cfg);

void validate_config(const RunConfig& cfg);

}  // namespace cmnls
