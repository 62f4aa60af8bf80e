#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "cmnls/regions.hpp"
#include "support.hpp"

using namespace cmnls;

namespace {

// Quadrant of k, computed without the library.
Region oracle(cplx lambda, const ModelParams& p) {
  const cplx k = (lambda * lambda + p.delta / 2.0) / p.gamma;
  if (std::abs(k.real()) < 1e-9 || std::abs(k.imag()) < 1e-9) return Region::Boundary;
  if (k.imag() > 0) return k.real() > 0 ? Region::D1 : Region::D2;
  return k.real() < 0 ? Region::D3 : Region::D4;
}

Region mirror(Region r) {
  switch (r) {
    case Region::D1: return Region::D4;
    case Region::D2: return Region::D3;
    case Region::D3: return Region::D2;
    case Region::D4: return Region::D1;
    default: return Region::Boundary;
  }
}

ModelParams random_params(std::mt19937_64& g) {
  return {std::uniform_real_distribution<double>(-3, 3)(g),
          std::uniform_real_distribution<double>(0.3, 3)(g), 1};
}

}  // namespace

TEST(Classify, Examples) {
  const ModelParams p;
  EXPECT_EQ(classify_region({2.0, 0.1}, p).tag, Region::D1);
  EXPECT_EQ(classify_region({0.1, 2.0}, p).tag, Region::D2);
  EXPECT_EQ(classify_region({0.1, -2.0}, p).tag, Region::D3);
  EXPECT_EQ(classify_region({2.0, -0.1}, p).tag, Region::D4);
  for (double x : {-2.0, -0.3, 0.0, 0.7, 5.0}) EXPECT_EQ(classify_region(x, p).tag, Region::Boundary);
  for (double y : {-2.0, 0.3, 3.0}) EXPECT_EQ(classify_region({0.0, y}, p).tag, Region::Boundary);
  // Re k = 0 on (Re lambda)^2 - (Im lambda)^2 = -delta/2
  EXPECT_EQ(classify_region({1.0, std::sqrt(2.0)}, p).tag, Region::Boundary);
  EXPECT_NEAR(classify_region({2.0, 0.1}, p).margin, 0.4, 1e-12);
}

TEST(Classify, BruteOracleProperty) {
  std::mt19937_64 g(31);
  for (int n = 0; n < 20000; ++n) {
    const ModelParams p = random_params(g);
    const cplx lam = test::random_in_disk(g, 3.0);
    const Region want = oracle(lam, p);
    if (want == Region::Boundary) continue;
    EXPECT_EQ(classify_region(lam, p).tag, want) << lam;
  }
}

TEST(Classify, NegationAndConjugationProperty) {
  std::mt19937_64 g(32);
  for (int n = 0; n < 5000; ++n) {
    const ModelParams p = random_params(g);
    const cplx lam = test::random_in_disk(g, 3.0);
    const Region r = classify_region(lam, p).tag;
    EXPECT_EQ(classify_region(-lam, p).tag, r);
    EXPECT_EQ(classify_region(std::conj(lam), p).tag, mirror(r));
  }
}

TEST(Classify, TriplePointTouchesAllRegions) {
  const ModelParams p;
  EXPECT_EQ(adjacent_regions(I_unit, p), 0x0F);
  EXPECT_EQ(adjacent_regions(-I_unit, p), 0x0F);
  EXPECT_EQ(adjacent_regions({2.0, 0.1}, p), region_bit(Region::D1));
  const RegionSet real_axis = adjacent_regions(2.0, p);
  EXPECT_TRUE(contains(real_axis, Region::D1));
  EXPECT_TRUE(contains(real_axis, Region::D4));
  EXPECT_FALSE(contains(real_axis, Region::D2));
}

TEST(Classify, IndexRoundTrip) {
  for (int n = 0; n <= 4; ++n) EXPECT_EQ(region_index(region_from_index(n)), n);
  EXPECT_STREQ(region_name(Region::D3), "D3");
}

TEST(Raster, MatchesPointwiseClassification) {
  const ModelParams p;
  const RegionRaster r = region_map_grid({-3, 3, -3, 3}, 61, 61, p, Exec::Serial);
  std::set<Region> seen;
  for (std::size_t iy = 0; iy < r.ny; ++iy)
    for (std::size_t ix = 0; ix < r.nx; ++ix) {
      EXPECT_EQ(r.at(ix, iy), classify_region(r.point(ix, iy), p).tag);
      seen.insert(r.at(ix, iy));
    }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_FALSE(r.im_k_zero.empty());
  EXPECT_FALSE(r.im_k2_zero.empty());
  const RegionRaster par = region_map_grid({-3, 3, -3, 3}, 61, 61, p, Exec::Parallel);
  EXPECT_EQ(par.tags, r.tags);
}

TEST(Raster, PolylinesLieOnBoundaries) {
  const ModelParams p;
  const RegionRaster r = region_map_grid({-3, 3, -3, 3}, 201, 201, p);
  for (const auto& pl : r.im_k2_zero)
    for (cplx z : pl.points) {
      const cplx k = (z * z + 1.0);
      EXPECT_LT(std::min(std::abs(k.real()), std::abs(k.imag())), 0.1) << z;
    }
}

TEST(Gamma, TableMatchesExponentOrdering) {
  // gamma_ij = 3 unless Re l_i < Re l_j; then 1 if Re z_i >= Re z_j, else 2.
  const ModelParams p;
  const cplx inside[4] = {{2.0, 0.1}, {0.1, 2.0}, {0.1, -2.0}, {2.0, -0.1}};
  const GammaTable& t = gamma_table();
  for (int n = 0; n < 4; ++n) {
    const cplx k = inside[n] * inside[n] + 1.0;
    const double l[3] = {-k.imag(), k.imag(), k.imag()};  // Re(ik Lambda-ish)
    const double z[3] = {(-2.0 * I_unit * k * k).real(), (2.0 * I_unit * k * k).real(),
                         (2.0 * I_unit * k * k).real()};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int want = l[i] < l[j] ? (z[i] >= z[j] ? 1 : 2) : 3;
        EXPECT_EQ(t[n][i][j], want) << "D" << n + 1 << " (" << i << "," << j << ")";
      }
    EXPECT_EQ(derive_gamma(inside[n], p), t[n]);
  }
}

TEST(Gamma, LiteralEntries) {
  const GammaTable& t = gamma_table();
  EXPECT_EQ(t[0][0][1], 1);
  EXPECT_EQ(t[1][0][2], 2);
  EXPECT_EQ(t[2][1][0], 2);
  EXPECT_EQ(t[3][2][0], 1);
  for (int n = 0; n < 4; ++n)
    for (int i = 0; i < 3; ++i) EXPECT_EQ(t[n][i][i], 3);
}

TEST(Sample, DiskSampleRespectsMarginAndSeed) {
  const ModelParams p;
  const auto a = disk_sample(300, 1.5, 0.05, 7, p);
  const auto b = disk_sample(300, 1.5, 0.05, 7, p);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 300u);
  for (cplx l : a) {
    EXPECT_LE(std::abs(l), 1.5);
    EXPECT_GT(classify_region(l, p).margin, 0.05);
  }
  EXPECT_NE(disk_sample(5, 1.5, 0.05, 8, p), std::vector<cplx>(a.begin(), a.begin() + 5));
}

TEST(Ray, DefaultAngleInsideRegion) {
  std::mt19937_64 g(33);
  for (int trial = 0; trial < 5; ++trial) {
    const ModelParams p = trial == 0 ? ModelParams{} : random_params(g);
    for (int n = 1; n <= 4; ++n) {
      const Region r = region_from_index(n);
      const double a = default_ray_angle(r, p);
      for (double rad : {4.0, 16.0, 64.0}) EXPECT_EQ(classify_region(std::polar(rad, a), p).tag, r);
    }
  }
}
