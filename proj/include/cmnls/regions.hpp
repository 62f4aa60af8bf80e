#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cmnls/lax.hpp"
#include "cmnls/pde.hpp"

namespace cmnls {

// D1..D4 are the k-plane quadrants: D1 Im k > 0, Im k^2 > 0 (Re k > 0),
// D2 Im k > 0, Im k^2 < 0, D3 Im k < 0, Im k^2 > 0, D4 Im k < 0, Im k^2 < 0.
enum class Region : std::uint8_t { Boundary = 0, D1 = 1, D2 = 2, D3 = 3, D4 = 4 };

struct RegionId {
  Region tag = Region::Boundary;
  double margin = 0.0;  // min(|Im k|, |Im k^2|)
};

inline constexpr double kBoundaryTol = 1e-9;

RegionId classify_region(cplx lambda, const ModelParams& params, double boundary_tol = kBoundaryTol);

int region_index(Region r);  // D1 -> 1 ... D4 -> 4, Boundary -> 0
Region region_from_index(int n);
const char* region_name(Region r);

// Bitmask over D1..D4 (bit n-1 for Dn).
using RegionSet = std::uint8_t;
constexpr RegionSet region_bit(Region r) {
  return r == Region::Boundary ? 0 : static_cast<RegionSet>(1u << (static_cast<int>(r) - 1));
}
constexpr RegionSet operator|(Region a, Region b) { return region_bit(a) | region_bit(b); }
inline bool contains(RegionSet s, Region r) { return (s & region_bit(r)) != 0; }

// Regions whose closure contains lambda (within tol on Re k, Im k).
RegionSet adjacent_regions(cplx lambda, const ModelParams& params, double tol = kBoundaryTol);

struct Box {
  double re_min = -3, re_max = 3, im_min = -3, im_max = 3;
};

struct Polyline {
  std::vector<cplx> points;
  bool closed = false;
};

struct RegionRaster {
  Box box;
  std::size_t nx = 0, ny = 0;  // samples along Re, Im
  std::vector<Region> tags;    // row-major in Im, index iy * nx + ix
  std::vector<Polyline> im_k_zero;   // {Im k = 0}
  std::vector<Polyline> im_k2_zero;  // {Im k^2 = 0}

  cplx point(std::size_t ix, std::size_t iy) const;
  Region at(std::size_t ix, std::size_t iy) const { return tags[iy * nx + ix]; }
};

RegionRaster region_map_grid(const Box& box, std::size_t nx, std::size_t ny,
                             const ModelParams& params, Exec exec = Exec::Parallel);

// Contour assignment gamma^n_ij in {1,2,3} (gamma_1, gamma_2, gamma_3).
using GammaMatrix = std::array<std::array<int, 3>, 3>;
using GammaTable = std::array<GammaMatrix, 4>;

const GammaTable& gamma_table();
// The same table derived from the exponent ordering at a point inside D_n.
GammaMatrix derive_gamma(cplx lambda_in_region, const ModelParams& params);

// Deterministic sample of n points in |lambda| <= radius whose margin
// exceeds min_margin.
std::vector<cplx> disk_sample(std::size_t n, double radius, double min_margin, std::uint64_t seed,
                              const ModelParams& params);

// Bisector of the sector Region r occupies on a large circle (first arc found
// scanning counter-clockwise from arg 0).
double default_ray_angle(Region r, const ModelParams& params);

}  // namespace cmnls
