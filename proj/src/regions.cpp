#include "cmnls/regions.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cmnls/contour.hpp"
#include "cmnls/errors.hpp"

namespace cmnls {

RegionId classify_region(cplx lambda, const ModelParams& params, double boundary_tol) {
  const cplx k = make_spectral_point(lambda, params).k;
  const double ik = k.imag(), ik2 = (k * k).imag();
  RegionId r;
  r.margin = std::min(std::abs(ik), std::abs(ik2));
  if (r.margin <= boundary_tol) return r;
  if (ik > 0)
    r.tag = ik2 > 0 ? Region::D1 : Region::D2;
  else
    r.tag = ik2 > 0 ? Region::D3 : Region::D4;
  return r;
}

int region_index(Region r) { return static_cast<int>(r); }

Region region_from_index(int n) {
  if (n < 0 || n > 4) throw ParameterError("region index out of range");
  return static_cast<Region>(n);
}

const char* region_name(Region r) {
  switch (r) {
    case Region::D1: return "D1";
    case Region::D2: return "D2";
    case Region::D3: return "D3";
    case Region::D4: return "D4";
    default: return "Boundary";
  }
}

RegionSet adjacent_regions(cplx lambda, const ModelParams& params, double tol) {
  const cplx k = make_spectral_point(lambda, params).k;
  RegionSet s = 0;
  const bool up = k.imag() >= -tol, down = k.imag() <= tol;
  const bool right = k.real() >= -tol, left = k.real() <= tol;
  if (up && right) s |= region_bit(Region::D1);
  if (up && left) s |= region_bit(Region::D2);
  if (down && left) s |= region_bit(Region::D3);
  if (down && right) s |= region_bit(Region::D4);
  return s;
}

cplx RegionRaster::point(std::size_t ix, std::size_t iy) const {
  const double re = nx > 1 ? box.re_min + (box.re_max - box.re_min) * double(ix) / double(nx - 1)
                           : box.re_min;
  const double im = ny > 1 ? box.im_min + (box.im_max - box.im_min) * double(iy) / double(ny - 1)
                           : box.im_min;
  return {re, im};
}

RegionRaster region_map_grid(const Box& box, std::size_t nx, std::size_t ny,
                             const ModelParams& params, Exec exec) {
  params.validate();
  RegionRaster r;
  r.box = box;
  r.nx = nx;
  r.ny = ny;
  r.tags.resize(nx * ny);
  std::vector<double> imk(nx * ny), imk2(nx * ny);
  const long total = static_cast<long>(nx * ny);
  auto body = [&](long n) {
    const cplx lam = r.point(static_cast<std::size_t>(n) % nx, static_cast<std::size_t>(n) / nx);
    const cplx k = make_spectral_point(lam, params).k;
    imk[n] = k.imag();
    imk2[n] = (k * k).imag();
    r.tags[n] = classify_region(lam, params).tag;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long n = 0; n < total; ++n) body(n);
  } else {
    for (long n = 0; n < total; ++n) body(n);
  }
  r.im_k_zero = marching_squares(imk, nx, ny, box);
  r.im_k2_zero = marching_squares(imk2, nx, ny, box);
  return r;
}

const GammaTable& gamma_table() {
  static const GammaTable t{{
      {{{3, 1, 1}, {3, 3, 3}, {3, 3, 3}}},
      {{{3, 2, 2}, {3, 3, 3}, {3, 3, 3}}},
      {{{3, 3, 3}, {2, 3, 3}, {2, 3, 3}}},
      {{{3, 3, 3}, {1, 3, 3}, {1, 3, 3}}},
  }};
  return t;
}

GammaMatrix derive_gamma(cplx lambda, const ModelParams& params) {
  const SpectralPoint sp = make_spectral_point(lambda, params);
  GammaMatrix g{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double li = sp.l[i].real(), lj = sp.l[j].real();
      const double zi = sp.z[i].real(), zj = sp.z[j].real();
      if (li < lj)
        g[i][j] = zi >= zj ? 1 : 2;
      else
        g[i][j] = 3;
    }
  return g;
}

double default_ray_angle(Region r, const ModelParams& params) {
  constexpr int kSamples = 7200;
  const double radius = 1e3 * (1.0 + std::abs(params.delta));
  std::vector<Region> ring(kSamples);
  for (int m = 0; m < kSamples; ++m) {
    const double a = 2.0 * std::numbers::pi * m / kSamples;
    ring[m] = classify_region(std::polar(radius, a), params).tag;
  }
  // start the scan at a sample outside r so an arc through arg 0 stays whole
  int start = 0;
  while (start < kSamples && ring[start] == r) ++start;
  if (start == kSamples) throw ParameterError("region covers the whole circle");
  for (int off = 0; off < kSamples; ++off) {
    const int m = (start + off) % kSamples;
    if (ring[m] != r) continue;
    int len = 0;
    while (ring[(m + len) % kSamples] == r) ++len;
    const double mid = (m + 0.5 * (len - 1)) * 2.0 * std::numbers::pi / kSamples;
    return std::remainder(mid, 2.0 * std::numbers::pi);
  }
  throw ParameterError(std::string("region ") + region_name(r) + " not found on the ray circle");
}

std::vector<cplx> disk_sample(std::size_t n, double radius, double min_margin, std::uint64_t seed,
                              const ModelParams& params) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-radius, radius);
  std::vector<cplx> out;
  out.reserve(n);
  while (out.size() < n) {
    const cplx l(U(rng), U(rng));
    if (std::abs(l) > radius) continue;
    if (classify_region(l, params, min_margin).tag == Region::Boundary) continue;
    out.push_back(l);
  }
  return out;
}

}  // namespace cmnls
