#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cmnls/lax.hpp"

namespace cmnls {

struct UniformGrid {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  double at(std::size_t i) const { return start + step * static_cast<double>(i); }
  double back() const { return at(count - 1); }
};

// Builds a grid from explicit node values; throws GridError unless the nodes
// are sorted and uniform to relative tolerance rel_tol.
UniformGrid uniform_grid_from_nodes(const std::vector<double>& nodes, double rel_tol = 1e-9);

struct FieldTolerances {
  double corner = 1e-6;
  double decay = 1e-6;
};

// Anything the eigenfunction integrator can walk through: gridded data or a
// closed-form solution.
class FieldSampler {
 public:
  virtual ~FieldSampler() = default;
  virtual FieldPoint sample(double x, double t) const = 0;
  virtual bool contains(double x, double t) const = 0;
  // Right edge of the spatial data; the base point of mu3.
  virtual double x_max() const = 0;
  virtual double t_max() const = 0;
  // Steps never straddle a multiple of these spacings (data nodes).
  virtual double node_spacing_x() const = 0;
  virtual double node_spacing_t() const = 0;
  virtual const ModelParams& params() const = 0;
  // The same data on a grid coarser by a factor 2, for data-resolution error
  // estimates; null when not applicable.
  virtual std::unique_ptr<FieldSampler> coarse_copy() const { return nullptr; }
};

struct FieldData : FieldSampler {
  UniformGrid x_grid, t_grid;
  std::vector<cplx> u0, v0;          // on x_grid
  std::vector<cplx> g0, h0, g1, h1;  // on t_grid
  struct Interior {
    std::vector<cplx> u, v;  // row-major, index it * nx + ix
  };
  std::optional<Interior> interior;
  ModelParams model;
  FieldTolerances tolerances;
  std::map<std::string, std::string> metadata;

  FieldPoint sample(double x, double t) const override;
  bool contains(double x, double t) const override;
  double x_max() const override { return x_grid.back(); }
  double t_max() const override { return t_grid.back(); }
  double node_spacing_x() const override { return x_grid.step; }
  double node_spacing_t() const override { return t_grid.step; }
  const ModelParams& params() const override { return model; }
  std::unique_ptr<FieldSampler> coarse_copy() const override;
};

struct RawFieldInput {
  std::vector<double> x_nodes, t_nodes;
  std::vector<cplx> u0, v0, g0, h0, g1, h1;
  std::optional<FieldData::Interior> interior;
};

// Validates lengths, grid uniformity, corner compatibility and decay.
FieldData build_field_data(const RawFieldInput& raw, const ModelParams& params,
                           const FieldTolerances& tolerances = {});
// Same checks on an already-populated FieldData.
void check_field_data(const FieldData& fd);

// One-sided 5-point derivative at the first node, 4th order.
cplx one_sided_derivative(const cplx* f, double h);

// Piecewise-cubic (4-point Lagrange) sampling. x = 0 reads the boundary traces,
// t = 0 reads the initial data, anything else needs the interior.
FieldPoint sample_fields(const FieldData& fd, double x, double t);

// u = a e^{i(kappa x - omega t)}, omega = kappa^2 - delta a^2 + gamma kappa a^2.
class PlaneWave : public FieldSampler {
 public:
  enum class Channel { U, V };
  PlaneWave(double a, double kappa, const ModelParams& params, Channel channel = Channel::U,
            double x_extent = 20.0, double t_extent = 1.0, double spacing = 0.05);

  double omega() const { return omega_; }
  FieldPoint sample(double x, double t) const override;
  bool contains(double, double) const override { return true; }
  double x_max() const override { return x_extent_; }
  double t_max() const override { return t_extent_; }
  double node_spacing_x() const override { return spacing_; }
  double node_spacing_t() const override { return spacing_; }
  const ModelParams& params() const override { return params_; }

 private:
  double a_, kappa_, omega_;
  ModelParams params_;
  Channel channel_;
  double x_extent_, t_extent_, spacing_;
};

PlaneWave plane_wave_solution(double a, double kappa, const ModelParams& params,
                              PlaneWave::Channel channel = PlaneWave::Channel::U);

struct DecayReport {
  std::vector<double> window_fractions;  // trailing fraction of the x-grid
  std::vector<double> tail_norms;        // max(|u0|,|v0|) over each window
  double fitted_rate = 0.0;              // envelope ~ exp(-rate x) on the last half
  bool zero_tail = false;                // nothing above underflow to fit
  bool decays = false;                   // tail over the last 10% below tolerance
};

DecayReport decay_report(const FieldData& fd);

// Keeps every factor-th node in x and t. The node counts minus one must be
// divisible by the factors.
FieldData coarsen(const FieldData& fd, std::size_t factor_x, std::size_t factor_t);

// Tabulates a sampler onto grids (interior included when requested).
FieldData tabulate(const FieldSampler& src, const UniformGrid& x_grid, const UniformGrid& t_grid,
                   bool with_interior, const FieldTolerances& tolerances = {});

LaxStencil make_lax_stencil(const FieldSampler& src, double x, double t, double h);

}  // namespace cmnls
