#pragma once

#include "cmnls/config.hpp"
#include "cmnls/pde.hpp"
#include "cmnls/residues.hpp"
#include "cmnls/scattering.hpp"

namespace cmnls {

// Gaussian initial data on [-L, L] solved to T at spacing dx (dt scaled with
// dx^2 from the configured pair, capped by the CFL bound). The store stride
// scales like 1/dx so the stored time spacing scales like dx.
LineSolution solve_configured(const RunConfig& cfg, double dx, Exec exec = Exec::Parallel);

struct EpsilonCalibration {
  int epsilon = 1;
  double residual_plus = 0.0;   // max symmetry residual with eps = +1
  double residual_minus = 0.0;  // and with eps = -1
};

// Symmetry residual of s(lambda) for both signs over a fixed lambda sample.
EpsilonCalibration calibrate_epsilon(const FieldSampler& f, const RunConfig& cfg);

// Solve, restrict to the half-line, calibrate epsilon and record provenance
// in the metadata.
FieldData generate_dataset(const RunConfig& cfg, Exec exec = Exec::Parallel);

ScatteringOptions scattering_options(const RunConfig& cfg);

// Zeros of the region scalar of each D_n within zero_search_box. A search
// that fails is reported in `error` for that region instead of thrown.
struct ZeroCensus {
  std::array<std::vector<ZeroLocus>, 4> zeros;
  std::array<std::string, 4> error;
};

ZeroCensus zero_census(const FieldData& f, const RunConfig& cfg, Exec exec = Exec::Parallel);

}  // namespace cmnls
