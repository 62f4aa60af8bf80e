#include <gtest/gtest.h>

#include "cmnls/errors.hpp"
#include "cmnls/residues.hpp"
#include "support.hpp"

using namespace cmnls;

namespace {

const ModelParams kP;

Box box_around(cplx z, double h) { return {z.real() - h, z.real() + h, z.imag() - h, z.imag() + h}; }

}  // namespace

TEST(Theta, HandValues) {
  const SpectralPoint sp = make_spectral_point(0.0, kP);  // k = 1
  EXPECT_LT(std::abs(theta(1, 2, 1.0, 0.0, sp) - 2.0 * I_unit), 1e-15);
  EXPECT_LT(std::abs(theta(1, 3, 0.0, 1.0, sp) + 4.0 * I_unit), 1e-15);
  EXPECT_EQ(theta(2, 3, 1.7, 0.4, sp), 0.0);
}

TEST(Theta, AntisymmetryProperty) {
  std::mt19937_64 g(61);
  for (int n = 0; n < 200; ++n) {
    const SpectralPoint sp = make_spectral_point(test::random_complex(g), kP);
    const double x = std::uniform_real_distribution<double>(0, 5)(g);
    const double t = std::uniform_real_distribution<double>(0, 1)(g);
    for (int i = 1; i <= 3; ++i) {
      EXPECT_EQ(theta(i, i, x, t, sp), 0.0);
      for (int j = 1; j <= 3; ++j)
        EXPECT_LT(std::abs(theta(i, j, x, t, sp) + theta(j, i, x, t, sp)), 1e-12);
    }
    // e^{theta_1j} matches the conjugation factor on entry (1, j)
    Matrix3C B;
    B(0, 1) = 1.0;
    const cplx phi = -I_unit * sp.k * x + 2.0 * I_unit * sp.k * sp.k * t;
    if (std::abs(theta(1, 2, x, t, sp).real()) < 50)
      EXPECT_LT(std::abs(conjugation_action(phi, B)(0, 1) - std::exp(theta(1, 2, x, t, sp))),
                1e-10 * std::abs(std::exp(theta(1, 2, x, t, sp))));
  }
}

TEST(Scalars, NamesAndRegions) {
  EXPECT_EQ(scalar_for_region(Region::D2), ScalarKind::S11);
  EXPECT_EQ(scalar_for_region(Region::D3), ScalarKind::M11);
  std::mt19937_64 g(62);
  const Matrix3C s = test::random_unimodular(g), S = test::random_unimodular(g);
  EXPECT_EQ(eval_scalar(ScalarKind::S11, s, S), s(0, 0));
  EXPECT_LT(std::abs(eval_scalar(ScalarKind::M11, s, S) - (s(1, 1) * s(2, 2) - s(1, 2) * s(2, 1))),
            1e-13);
}

TEST(Winding, CountsZeros) {
  const ScalarFunction f = [](cplx l) { return (l - cplx(0.2, 0.1)) * (l - cplx(-0.3, 0.4)); };
  EXPECT_EQ(winding_number(f, {-1, 1, -1, 1}), 2);
  EXPECT_EQ(winding_number(f, {0, 1, -1, 1}), 1);
  EXPECT_EQ(winding_number(f, {0.5, 1, -1, 1}), 0);
  const ScalarFunction pole = [](cplx l) { return 1.0 / (l - 0.1); };
  EXPECT_EQ(winding_number(pole, {-1, 1, -1, 1}), -1);
  const ScalarFunction on_edge = [](cplx l) { return l - cplx(1.0, 0.0); };
  EXPECT_THROW(winding_number(on_edge, {-1, 1, -1, 1}), UnresolvedZeroError);
}

TEST(ZeroSearch, SimpleZero) {
  const cplx z0(1.0, 1.0);  // D1
  const ScalarFunction f = [&](cplx l) { return l - z0; };
  const auto zs = find_zeros(f, ScalarKind::SigmaD1, Region::D1, {0, 2, 0, 2}, kP);
  ASSERT_EQ(zs.size(), 1u);
  EXPECT_LT(std::abs(zs[0].lambda - z0), 1e-12);
  EXPECT_EQ(zs[0].multiplicity, 1);
  EXPECT_EQ(zs[0].region, Region::D1);
  EXPECT_FALSE(zs[0].assumption_violation);
  // the same zero is not reported for a region it does not lie in
  EXPECT_TRUE(find_zeros(f, ScalarKind::S11, Region::D2, {0, 2, 0, 2}, kP).empty());
}

TEST(ZeroSearch, DoubleZeroFlagged) {
  const cplx z0(1.0, 1.0);
  const ScalarFunction f = [&](cplx l) { return (l - z0) * (l - z0); };
  const auto zs = find_zeros(f, ScalarKind::SigmaD1, Region::D1, {0, 2, 0, 2}, kP);
  ASSERT_EQ(zs.size(), 1u);
  EXPECT_EQ(zs[0].multiplicity, 2);
  EXPECT_TRUE(zs[0].assumption_violation);
  EXPECT_LT(std::abs(zs[0].lambda - z0), 1e-6);
}

TEST(ZeroSearch, SeveralZerosProperty) {
  std::mt19937_64 g(63);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<cplx> roots;
    while (roots.size() < 3) {
      const cplx z(std::uniform_real_distribution<double>(0.3, 1.7)(g),
                   std::uniform_real_distribution<double>(0.1, 0.9)(g));
      if (classify_region(z, kP).tag == Region::D1 && classify_region(z, kP).margin > 0.05)
        roots.push_back(z);
    }
    const ScalarFunction f = [&](cplx l) {
      cplx p = 1.0;
      for (cplx r : roots) p *= l - r;
      return p;
    };
    const auto zs = find_zeros(f, ScalarKind::SigmaD1, Region::D1, {0.05, 2.05, 0.03, 1.03}, kP);
    ASSERT_EQ(zs.size(), 3u);
    for (cplx r : roots) {
      double best = 1e9;
      for (const auto& z : zs) best = std::min(best, std::abs(z.lambda - r));
      EXPECT_LT(best, 1e-10);
    }
  }
}

TEST(Derivative, FourthOrder) {
  const ScalarFunction f = [](cplx z) { return std::exp(2.0 * z); };
  const cplx z(0.3, -0.2);
  EXPECT_LT(std::abs(complex_derivative(f, z, 1e-3) - 2.0 * f(z)), 1e-10);
}

TEST(Contour, PoleFreeIntegralVanishes) {
  const MatrixFunction M = [](cplx l) {
    Matrix3C m = Matrix3C::identity();
    m(0, 1) = std::exp(l);
    m(2, 1) = l * l * l;
    return m;
  };
  const Vec3C r = contour_integral_column(M, 2, {0.5, 0.5}, 0.1, 128);
  for (cplx c : r) EXPECT_LT(std::abs(c), 1e-10);
}

TEST(Contour, SimplePoleResidue) {
  const MatrixFunction M = [](cplx l) {
    Matrix3C m;
    m(1, 2) = 3.0 / (l - cplx(0.5, 0.5)) + l;
    return m;
  };
  const Vec3C r = contour_integral_column(M, 3, {0.5, 0.5}, 0.1, 128);
  EXPECT_LT(std::abs(r[1] - 3.0), 1e-12);
}

TEST(Residue, RationalD2Oracle) {
  // s11 = (lambda - lambda0)/(lambda + i), the other entries constant, S = I:
  // column 2 coefficient m33(s) / (s11' s21), column 3 m32(s) / (s11' s21).
  const cplx l0(0.6, 1.4);
  ASSERT_EQ(classify_region(l0, kP).tag, Region::D2);
  Matrix3C c;
  c.a = {0.0, 0.7, -0.2, 1.3, 0.9, 0.4, 0.5, -0.6, 1.1};
  const MatrixFunction s = [&](cplx l) {
    Matrix3C m = c;
    m(0, 0) = (l - l0) / (l + I_unit);
    return m;
  };
  const MatrixFunction S = [](cplx) { return Matrix3C::identity(); };
  ZeroLocus z;
  z.lambda = l0;
  z.which = ScalarKind::S11;
  z.region = Region::D2;
  const double x = 0.8, t = 0.3;
  const auto recs = residue_coefficients(s, S, z, x, t, kP);
  ASSERT_EQ(recs.size(), 2u);
  const cplx sdot = 1.0 / (l0 + I_unit);
  const cplx m33 = -c(0, 1) * c(1, 0);  // s11 s22 - s12 s21 at the zero
  const cplx m32 = -c(0, 2) * c(1, 0);  // s11 s23 - s13 s21
  const cplx den = sdot * c(1, 0);
  EXPECT_EQ(recs[0].column, 2);
  EXPECT_EQ(recs[1].column, 3);
  ASSERT_EQ(recs[0].terms.size(), 1u);
  EXPECT_EQ(recs[0].terms[0].source, 1);
  EXPECT_LT(std::abs(recs[0].terms[0].coefficient - m33 / den), 1e-8 * std::abs(m33 / den));
  EXPECT_LT(std::abs(recs[1].terms[0].coefficient - m32 / den), 1e-8 * std::abs(m32 / den));
  const cplx k = l0 * l0 + 1.0;
  EXPECT_LT(std::abs(recs[0].theta_value - (2.0 * I_unit * k * x - 4.0 * I_unit * k * k * t)),
            1e-12);
}

TEST(Residue, DegenerateSecondaryDenominator) {
  const cplx l0(0.6, 1.4);
  const MatrixFunction s = [&](cplx l) {
    Matrix3C m = Matrix3C::identity();  // s21 = 0
    m(0, 0) = l - l0;
    return m;
  };
  const MatrixFunction S = [](cplx) { return Matrix3C::identity(); };
  ZeroLocus z;
  z.lambda = l0;
  z.region = Region::D2;
  EXPECT_THROW(residue_coefficients(s, S, z, 0.5, 0.2, kP), DegenerateZeroError);
}

TEST(Residue, ManufacturedAllRegions) {
  const cplx planted[4] = {{1.0, 0.3}, {0.6, 1.4}, {0.6, -1.4}, {1.0, -0.3}};
  for (int r = 1; r <= 4; ++r) {
    const Region reg = region_from_index(r);
    const ManufacturedData d = make_manufactured(reg, planted[r - 1], 100 + r, kP);
    const ScalarKind kind = scalar_for_region(reg);
    const ScalarFunction g = [&](cplx l) { return eval_scalar(kind, d.s(l), d.S(l)); };
    ZeroSearchOptions zo;
    zo.cells_x = zo.cells_y = 4;
    const auto zs = find_zeros(g, kind, reg, box_around(planted[r - 1], 0.5), kP, zo);
    ASSERT_EQ(zs.size(), 1u) << region_name(reg);
    EXPECT_LT(std::abs(zs[0].lambda - planted[r - 1]), 1e-10);
    const MatrixFunction M = [&](cplx l) { return d.M(l, 0.7, 0.3); };
    const auto recs = residue_coefficients(d.s, d.S, zs[0], 0.7, 0.3, kP);
    EXPECT_EQ(recs.size(), r <= 2 ? 2u : 1u);
    for (const auto& rec : recs) {
      EXPECT_LT(verify_residue_contour(M, rec, 0.05, kP), 1e-6) << region_name(reg);
      EXPECT_LT(verify_residue_contour(M, rec, 0.025, kP), 1e-6) << region_name(reg);
    }
    // a circle reaching across the boundary is refused
    EXPECT_THROW(verify_residue_contour(M, recs[0], 2.0, kP), CircleLeavesRegionError);
  }
}

TEST(GlobalRelation, ZeroDataIsExact) {
  const FieldData z = test::zero_dataset();
  const auto rep = global_relation_residual(z, disk_sample(10, 1.2, 0.05, 64, kP));
  EXPECT_EQ(rep.samples.size(), 10u);
  EXPECT_LT(rep.max_residual, 1e-14);
}

TEST(GlobalRelation, DecreasesUnderDataRefinement) {
  // integration steps never straddle a data node, so the data spacing sets the error
  const auto lams = disk_sample(10, 0.8, 0.05, 65, kP);
  const double ra = global_relation_residual(test::coarse_gaussian(), lams).max_relative;
  const double rb = global_relation_residual(test::fine_gaussian(), lams).max_relative;
  EXPECT_GT(ra / rb, 4.0) << ra << " " << rb;
}

TEST(GlobalRelation, SerialMatchesParallel) {
  const FieldData& f = test::coarse_gaussian();
  const auto lams = disk_sample(6, 0.8, 0.05, 66, kP);
  const auto a = global_relation_residual(f, lams, {}, Exec::Serial);
  const auto b = global_relation_residual(f, lams, {}, Exec::Parallel);
  EXPECT_EQ(a.max_residual, b.max_residual);
  EXPECT_EQ(a.median_residual, b.median_residual);
}
