#pragma once

#include <complex>
#include <vector>

#include "cmnls/regions.hpp"

namespace cmnls {

// Zero level set of a sampled scalar field by marching squares. values is
// row-major (iy * nx + ix) on a uniform raster over box; segments are joined
// into polylines. Saddle cells are split by the cell-centre average.
std::vector<Polyline> marching_squares(const std::vector<double>& values, std::size_t nx,
                                       std::size_t ny, const Box& box);

}  // namespace cmnls
