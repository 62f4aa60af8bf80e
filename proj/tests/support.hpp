#pragma once

#include <complex>
#include <random>

#include "cmnls/config.hpp"
#include "cmnls/fields.hpp"
#include "cmnls/matrix3.hpp"
#include "cmnls/pipeline.hpp"

namespace cmnls::test {

// Hand-rolled generators; every property test seeds its own engine.
inline cplx random_complex(std::mt19937_64& g, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return {n(g), n(g)};
}

inline cplx random_in_disk(std::mt19937_64& g, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  for (;;) {
    const cplx z(u(g), u(g));
    if (std::abs(z) <= radius) return z;
  }
}

inline Matrix3C random_matrix(std::mt19937_64& g, double scale = 1.0) {
  Matrix3C m;
  for (auto& e : m.a) e = random_complex(g, scale);
  return m;
}

inline Matrix3C random_unimodular(std::mt19937_64& g) {
  const Matrix3C m = random_matrix(g);
  return std::pow(det(m), -1.0 / 3.0) * m;
}

inline FieldPoint random_field_point(std::mt19937_64& g) {
  return {random_complex(g), random_complex(g), random_complex(g), random_complex(g)};
}

// Zero initial and boundary data on [0, L] x [0, T], interior included.
inline FieldData zero_dataset(double L = 10.0, double T = 1.0, double h = 0.1) {
  RawFieldInput raw;
  const auto nx = static_cast<std::size_t>(std::llround(L / h)) + 1;
  const auto nt = static_cast<std::size_t>(std::llround(T / h)) + 1;
  for (std::size_t i = 0; i < nx; ++i) raw.x_nodes.push_back(i * h);
  for (std::size_t i = 0; i < nt; ++i) raw.t_nodes.push_back(i * h);
  raw.u0 = raw.v0 = std::vector<cplx>(nx);
  raw.g0 = raw.h0 = raw.g1 = raw.h1 = std::vector<cplx>(nt);
  raw.interior = FieldData::Interior{std::vector<cplx>(nx * nt), std::vector<cplx>(nx * nt)};
  return build_field_data(raw, ModelParams{});
}

// The shipped Gaussian pulse on a coarse grid: cheap enough for unit tests.
inline RunConfig coarse_config() {
  RunConfig c;
  c.grid.dx = 0.1;
  c.grid.dt = 0.002;
  c.grid.store_stride = 5;
  return c;
}

inline const FieldData& coarse_gaussian() {
  static const FieldData fd = generate_dataset(coarse_config(), Exec::Serial);
  return fd;
}

// The same pulse at half the spacing, for data-refinement checks.
inline const FieldData& fine_gaussian() {
  static const FieldData fd = [] {
    RunConfig c = coarse_config();
    c.grid.dx = 0.05;
    c.grid.dt = 0.0005;
    c.grid.store_stride = 10;
    return generate_dataset(c, Exec::Serial);
  }();
  return fd;
}

}  // namespace cmnls::test
