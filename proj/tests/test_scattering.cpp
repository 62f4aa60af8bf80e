#include <gtest/gtest.h>

#include "cmnls/errors.hpp"
#include "cmnls/scattering.hpp"
#include "support.hpp"

using namespace cmnls;

namespace {

FieldData scaled(const FieldData& fd, double a) {
  FieldData s = fd;
  for (auto* v : {&s.u0, &s.v0, &s.g0, &s.h0, &s.g1, &s.h1, &s.interior->u, &s.interior->v})
    for (auto& z : *v) z *= a;
  return s;
}

// Points away from the boundaries where every column of s and S passes the guard.
std::vector<cplx> guarded_sample(const FieldData& f, std::size_t n, std::uint64_t seed) {
  std::vector<cplx> out;
  for (cplx l : disk_sample(4 * n, 1.2, 0.05, seed, f.params())) {
    try {
      compute_s(f, l);
      compute_S(f, l);
      out.push_back(l);
    } catch (const DomainViolationError&) {
    }
    if (out.size() == n) break;
  }
  return out;
}

}  // namespace

TEST(Eigenfunction, ZeroDataGivesIdentity) {
  const FieldData z = test::zero_dataset();
  for (cplx l : {cplx(0.5, 0.0), cplx(0.4, 0.3), cplx(-1.0, 0.2)}) {
    ScatteringOptions o;
    o.override_domain_guard = true;
    EXPECT_LT(norm_max(compute_s(z, l, o) - Matrix3C::identity()), 1e-15);
    EXPECT_LT(norm_max(compute_S(z, l, o) - Matrix3C::identity()), 1e-15);
    EXPECT_LT(norm_max(compute_c(z, l, o) - Matrix3C::identity()), 1e-15);
  }
}

TEST(Eigenfunction, UnimodularOnData) {
  const FieldData& f = test::coarse_gaussian();
  const auto lams = guarded_sample(f, 30, 41);
  ASSERT_GE(lams.size(), 20u);
  ScatteringOptions o;
  o.estimate_error = true;
  for (cplx l : lams) {
    EXPECT_LT(std::abs(det(compute_s(f, l, o)) - 1.0), 1e-8) << l;
    EXPECT_LT(std::abs(det(compute_S(f, l, o)) - 1.0), 1e-8) << l;
  }
}

TEST(Eigenfunction, AdjugateSolvesAdjointSystem) {
  const FieldData& f = test::coarse_gaussian();
  ScatteringOptions o;
  o.estimate_error = true;
  for (double l : {0.3, -0.8, 1.1}) {
    const auto mu = integrate_eigenfunction(f, {Eigenfunction::Mu3, false}, 1.0, 0.5, l, o).value;
    const auto muA = integrate_eigenfunction(f, {Eigenfunction::Mu3, true}, 1.0, 0.5, l, o).value;
    EXPECT_LT(norm_max(muA - adjugate_eigenfunction(mu)), 1e-8);
  }
}

TEST(Eigenfunction, FirstBornApproximation) {
  // With data of size a, s_12 = -lambda int_0^L e^{-2ikx} u0(x) dx + O(a^2).
  const double a = 1e-3;
  const FieldData f = scaled(test::coarse_gaussian(), a);
  for (cplx lam : {cplx(0.7, 0.0), cplx(0.7, -0.2), cplx(-0.1, 0.9)}) {
    const cplx k = lam * lam + 1.0;
    ASSERT_LE(k.imag(), 0.0);
    // Simpson on the data nodes
    const std::size_t n = f.x_grid.count;
    ASSERT_EQ(n % 2, 1u);
    const double h = f.x_grid.step;
    cplx s12{}, s13{};
    for (std::size_t i = 0; i < n; ++i) {
      const double w = (i == 0 || i + 1 == n) ? 1 : (i % 2 ? 4 : 2);
      const double x = f.x_grid.at(i);
      const Matrix3C U1 = u1_matrix({f.u0[i], f.v0[i], 0.0, 0.0});
      s12 += w * std::exp(-2.0 * I_unit * k * x) * U1(0, 1);
      s13 += w * std::exp(-2.0 * I_unit * k * x) * U1(0, 2);
    }
    s12 *= -lam * h / 3.0;
    s13 *= -lam * h / 3.0;
    ScatteringOptions o;
    o.columns = {false, true, true};
    const Matrix3C s = compute_s(f, lam, o);
    EXPECT_LT(std::abs(s(0, 1) - s12), 2e-3 * std::abs(s12)) << lam;
    EXPECT_LT(std::abs(s(0, 2) - s13), 2e-3 * std::abs(s13)) << lam;
    EXPECT_GT(std::abs(s12), 1e-6);
  }
}

TEST(Eigenfunction, SymmetryOnDataSelectsSign) {
  const FieldData& f = test::coarse_gaussian();
  ScatteringOptions o;
  o.estimate_error = true;
  for (cplx l : {cplx(0.5, 0.0), cplx(0.3, 0.02), cplx(-0.9, 0.0)}) {
    const double plus = symmetry_residual(f, l, +1, {}, 0, 0, o);
    const double minus = symmetry_residual(f, l, -1, {}, 0, 0, o);
    EXPECT_LT(plus, 1e-6) << l;
    EXPECT_GT(minus, 100 * plus) << l;
  }
}

TEST(Eigenfunction, SymmetryResidualAlgebra) {
  // mu = exp of an A-skew generator satisfies the relation exactly
  EXPECT_LT(symmetry_residual(Matrix3C::identity(), Matrix3C::identity(), 1), 1e-15);
  Matrix3C m = Matrix3C::identity();
  m(0, 1) = 0.5;
  EXPECT_GT(symmetry_residual(m, m, 1), 0.1);
}

TEST(Domains, ValidityTables) {
  using enum Region;
  auto mu3 = validity_domains({Eigenfunction::Mu3, false}, false);
  EXPECT_EQ(mu3[0], D1 | D2);
  EXPECT_EQ(mu3[1], D3 | D4);
  EXPECT_EQ(mu3[2], D3 | D4);
  auto mu1 = validity_domains({Eigenfunction::Mu1, false}, false);
  EXPECT_EQ(mu1[0], region_bit(D4));
  EXPECT_EQ(mu1[1], region_bit(D1));
  auto mu2 = validity_domains({Eigenfunction::Mu2, false}, false);
  EXPECT_EQ(mu2[0], region_bit(D3));
  EXPECT_EQ(mu2[2], region_bit(D2));
  EXPECT_EQ(validity_domains({Eigenfunction::Mu1, false}, true)[0], D2 | D4);
  EXPECT_EQ(validity_domains({Eigenfunction::Mu2, false}, true)[1], D2 | D4);
}

TEST(Domains, AdjugateSwapsConjugateRegions) {
  const auto swap = [](RegionSet s) {
    RegionSet r = 0;
    if (s & 1) r |= 8;
    if (s & 8) r |= 1;
    if (s & 2) r |= 4;
    if (s & 4) r |= 2;
    return r;
  };
  for (auto j : {Eigenfunction::Mu1, Eigenfunction::Mu2, Eigenfunction::Mu3})
    for (bool x0 : {false, true}) {
      const auto d = validity_domains({j, false}, x0), a = validity_domains({j, true}, x0);
      for (int c = 0; c < 3; ++c) EXPECT_EQ(a[c], swap(d[c]));
    }
}

TEST(Domains, GrowthAgreesWithValidity) {
  // inside its validity domain a column picks up no growth along the path
  const FieldData& f = test::coarse_gaussian();
  const cplx inside[4] = {{1.0, 0.3}, {0.6, 1.4}, {0.6, -1.4}, {1.0, -0.3}};
  for (auto j : {Eigenfunction::Mu1, Eigenfunction::Mu2, Eigenfunction::Mu3})
    for (bool adj : {false, true}) {
      const EigenfunctionId id{j, adj};
      const auto legs = eigenfunction_path(id, 1.0, 0.5, f);
      const auto dom = validity_domains(id, false);
      for (int n = 0; n < 4; ++n) {
        const auto g = path_growth(id, legs, make_spectral_point(inside[n], f.params()));
        for (int c = 0; c < 3; ++c)
          if (contains(dom[c], region_from_index(n + 1))) EXPECT_LT(g[c], 1e-12);
      }
    }
}

TEST(Guard, DomainViolationAndOverride) {
  const FieldData& f = test::coarse_gaussian();
  const cplx l(1.0, 1.0);  // k = 1 + 2i: columns 2, 3 of mu3 grow like e^{4 L}
  try {
    compute_s(f, l);
    FAIL() << "guard did not trip";
  } catch (const DomainViolationError& e) {
    EXPECT_EQ(e.column(), 2);
    EXPECT_NEAR(e.growth(), 80.0, 1e-9);
  }
  ScatteringOptions o;
  o.columns = {true, false, false};
  EXPECT_NO_THROW(compute_s(f, l, o));
  o.columns = kAllColumns;
  o.override_domain_guard = true;
  EXPECT_NO_THROW(compute_s(f, l, o));
}

TEST(Guard, OutOfDomainTarget) {
  const FieldData& f = test::coarse_gaussian();
  EXPECT_THROW(integrate_eigenfunction(f, {}, f.x_max() + 1, 0.0, 0.5), OutOfDomainError);
  EXPECT_THROW(integrate_eigenfunction(f, {}, 1.0, 2.0, 0.5), OutOfDomainError);
}

TEST(Sweep, SerialMatchesParallel) {
  const FieldData& f = test::coarse_gaussian();
  const auto lams = guarded_sample(f, 12, 42);
  const auto a = spectral_sweep(f, lams, {}, false, Exec::Serial);
  const auto b = spectral_sweep(f, lams, {}, false, Exec::Parallel);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].s.a, b[i].s.a);
    EXPECT_EQ(a[i].S.a, b[i].S.a);
    EXPECT_LT(norm_max(a[i].sA - cofactor_matrix(a[i].s)), 1e-15);
  }
}

TEST(Sweep, PropagatesErrors) {
  const FieldData& f = test::coarse_gaussian();
  EXPECT_THROW(spectral_sweep(f, {0.5, cplx(1.0, 1.0)}, {}, false), DomainViolationError);
}

TEST(Sweep, RefinementConverges) {
  const FieldData& f = test::coarse_gaussian();
  ScatteringOptions a, b, c;
  b.step.refine = 2;
  c.step.refine = 4;
  const cplx l(0.5, 0.0);
  const double e1 = norm_max(compute_s(f, l, a) - compute_s(f, l, c));
  const double e2 = norm_max(compute_s(f, l, b) - compute_s(f, l, c));
  EXPECT_GT(e1 / e2, 8.0);
}
