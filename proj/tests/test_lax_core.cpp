#include <gtest/gtest.h>

#include <numbers>

#include "cmnls/errors.hpp"
#include "cmnls/fields.hpp"
#include "cmnls/lax.hpp"
#include "support.hpp"

using namespace cmnls;

namespace {

void expect_near(cplx a, cplx b, double tol = 1e-14) { EXPECT_LT(std::abs(a - b), tol) << a << " vs " << b; }

// Cofactor by brute 2x2 expansion, written independently of the library.
Matrix3C brute_cofactor(const Matrix3C& b) {
  Matrix3C c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      cplx sub[4];
      int n = 0;
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s)
          if (r != i && s != j) sub[n++] = b(r, s);
      c(i, j) = ((i + j) % 2 ? -1.0 : 1.0) * (sub[0] * sub[3] - sub[1] * sub[2]);
    }
  return c;
}

}  // namespace

TEST(SpectralPoint, ValuesAtZero) {
  const SpectralPoint sp = make_spectral_point(0.0, ModelParams{});
  expect_near(sp.k, 1.0);
  expect_near(sp.l[0], I_unit);
  expect_near(sp.l[1], -I_unit);
  expect_near(sp.l[2], -I_unit);
  expect_near(sp.z[0], -2.0 * I_unit);
  expect_near(sp.z[1], 2.0 * I_unit);
  expect_near(sp.z[2], 2.0 * I_unit);
}

TEST(SpectralPoint, HandArithmetic) {
  expect_near(make_spectral_point({2.0, 0.1}, ModelParams{}).k, {4.99, 0.4}, 1e-14);
  const SpectralPoint sp = make_spectral_point(I_unit, ModelParams{});
  expect_near(sp.k, 0.0);
  for (int i = 0; i < 3; ++i) {
    expect_near(sp.l[i], 0.0);
    expect_near(sp.z[i], 0.0);
  }
}

TEST(SpectralPoint, ExponentStructureProperty) {
  std::mt19937_64 g(1);
  for (int n = 0; n < 200; ++n) {
    const ModelParams p{std::uniform_real_distribution<double>(-3, 3)(g),
                        std::uniform_real_distribution<double>(0.2, 3)(g), 1};
    const cplx lam = test::random_complex(g, 2.0);
    const SpectralPoint sp = make_spectral_point(lam, p);
    expect_near(sp.k, (lam * lam + p.delta / 2.0) / p.gamma, 1e-12 * (1 + std::norm(lam)));
    EXPECT_EQ(sp.l[1], sp.l[2]);
    EXPECT_EQ(sp.l[1], -sp.l[0]);
    EXPECT_EQ(sp.z[1], sp.z[2]);
    EXPECT_EQ(sp.z[1], -sp.z[0]);
  }
}

TEST(ModelParams, Validation) {
  EXPECT_THROW((ModelParams{2.0, 0.0, 1}).validate(), ParameterError);
  EXPECT_THROW((ModelParams{2.0, 1.0, 0}).validate(), ParameterError);
  EXPECT_NO_THROW((ModelParams{-1.0, 2.0, -1}).validate());
}

TEST(LaxU, ZeroField) {
  const ModelParams p;
  const Matrix3C U = eval_U(FieldPoint{}, make_spectral_point(0.0, p), p);
  EXPECT_LT(norm_max(U - Matrix3C::diag(I_unit, -I_unit, -I_unit)), 1e-15);
}

TEST(LaxU, SparsityOfU1) {
  const ModelParams p;
  const SpectralPoint sp = make_spectral_point(1.0, p);
  const Matrix3C d = eval_U(FieldPoint{1.0, 0.0, 0.0, 0.0}, sp, p) +
                     (I_unit * sp.k) * lambda_matrix();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const bool hot = (i == 0 && j == 1) || (i == 1 && j == 0);
      expect_near(d(i, j), hot ? 1.0 : 0.0);
    }
}

TEST(LaxU, ConjugateSymmetryForRealLambda) {
  std::mt19937_64 g(2);
  const ModelParams p;
  for (int n = 0; n < 50; ++n) {
    const FieldPoint fp = test::random_field_point(g);
    const SpectralPoint sp = make_spectral_point(std::normal_distribution<double>()(g), p);
    const Matrix3C V1 = eval_V1(fp, sp);
    expect_near(V1(1, 0), std::conj(V1(0, 1)), 1e-14);
    expect_near(V1(2, 0), std::conj(V1(0, 2)), 1e-14);
  }
}

TEST(LaxV, ZeroField) {
  const ModelParams p;
  const SpectralPoint sp = make_spectral_point({0.3, 0.7}, p);
  EXPECT_LT(norm_max(eval_V(FieldPoint{}, sp, p) - (2.0 * I_unit * sp.k * sp.k) * lambda_matrix()),
            1e-15);
}

TEST(LaxV, SpecimenEntries) {
  const ModelParams p;
  const FieldPoint fp{1.0, 0.0, 0.0, 0.0};
  expect_near(u3_matrix(fp, p)(0, 1), 3.0);
  EXPECT_LT(norm_max(u2_matrix(fp) - Matrix3C::diag(-1.0, 1.0, 0.0)), 1e-15);
}

TEST(LaxV, TraceAndSparsityProperty) {
  std::mt19937_64 g(3);
  const ModelParams p;
  for (int n = 0; n < 200; ++n) {
    const FieldPoint fp = test::random_field_point(g);
    const SpectralPoint sp = make_spectral_point(test::random_complex(g), p);
    const Matrix3C U = eval_U(fp, sp, p), V = eval_V(fp, sp, p);
    expect_near(U(0, 0) + U(1, 1) + U(2, 2) + I_unit * sp.k, 0.0, 1e-12);
    expect_near(V(0, 0) + V(1, 1) + V(2, 2), 2.0 * I_unit * sp.k * sp.k, 1e-10);
    const Matrix3C U1 = u1_matrix(fp), U2 = u2_matrix(fp), U3 = u3_matrix(fp, p);
    // U1, U3 off the first row/column vanish; U2 has zero first row/column off the diagonal
    for (int i = 0; i < 3; ++i) expect_near(U1(i, i), 0.0);
    expect_near(U1(1, 2), 0.0);
    expect_near(U1(2, 1), 0.0);
    for (int i = 0; i < 3; ++i) expect_near(U3(i, i), 0.0);
    expect_near(U3(1, 2), 0.0);
    expect_near(U3(2, 1), 0.0);
    expect_near(U2(0, 1), 0.0);
    expect_near(U2(0, 2), 0.0);
    expect_near(U2(1, 0), 0.0);
    expect_near(U2(2, 0), 0.0);
    expect_near(U2(0, 0) + U2(1, 1) + U2(2, 2), 0.0, 1e-12);
  }
}

TEST(Conjugation, Examples) {
  std::mt19937_64 g(4);
  const Matrix3C I3 = Matrix3C::identity();
  EXPECT_LT(norm_max(conjugation_action(test::random_complex(g), I3) - I3), 1e-15);
  Matrix3C B;
  B(0, 1) = 1.0;
  expect_near(conjugation_action(I_unit * (std::numbers::pi / 2), B)(0, 1), -1.0, 1e-15);
}

TEST(Conjugation, GroupAndHomomorphismProperty) {
  std::mt19937_64 g(5);
  for (int n = 0; n < 200; ++n) {
    const cplx th = test::random_complex(g);
    const Matrix3C A = test::random_matrix(g), B = test::random_matrix(g);
    EXPECT_LT(norm_max(conjugation_action(-th, conjugation_action(th, A)) - A), 1e-12 * norm_max(A));
    const Matrix3C lhs = conjugation_action(th, A * B);
    const Matrix3C rhs = conjugation_action(th, A) * conjugation_action(th, B);
    EXPECT_LT(norm_max(lhs - rhs), 1e-12 * norm_max(lhs));
  }
}

TEST(Conjugation, Overflow) {
  Matrix3C B;
  B(1, 0) = 1.0;
  EXPECT_THROW(conjugation_action(400.0, B), OverflowError);
  // entries the exponent does not touch stay representable
  EXPECT_NO_THROW(conjugation_action(400.0, Matrix3C::identity()));
}

TEST(Cofactor, Examples) {
  EXPECT_LT(norm_max(cofactor_matrix(Matrix3C::identity()) - Matrix3C::identity()), 1e-15);
  EXPECT_LT(norm_max(cofactor_matrix(Matrix3C::diag(1, 2, 3)) - Matrix3C::diag(6, 3, 2)), 1e-15);
}

TEST(Cofactor, IdentityProperty) {
  std::mt19937_64 g(6);
  for (int n = 0; n < 1000; ++n) {
    const Matrix3C B = test::random_matrix(g);
    const Matrix3C C = cofactor_matrix(B);
    EXPECT_LT(norm_max(C - brute_cofactor(B)), 1e-13 * norm_max(B) * norm_max(B));
    const Matrix3C r = B * transpose(C) - det(B) * Matrix3C::identity();
    EXPECT_LT(norm_max(r), 1e-12 * norm_max(B) * norm_max(B) * norm_max(B));
  }
}

TEST(Cofactor, InverseTransposeForUnimodular) {
  std::mt19937_64 g(7);
  for (int n = 0; n < 100; ++n) {
    const Matrix3C B = test::random_unimodular(g);
    EXPECT_LT(norm_max(cofactor_matrix(B) - transpose(inverse(B))), 1e-10 * norm_max(B) * norm_max(B));
  }
}

TEST(Matrix, SingularInverse) {
  EXPECT_THROW(inverse(Matrix3C{}), SingularityError);
}

TEST(Matrix, CrossProductIsCofactorColumn) {
  std::mt19937_64 g(8);
  const Matrix3C B = test::random_matrix(g);
  const Vec3C c = cross(B.column(1), B.column(2));
  const Matrix3C C = cofactor_matrix(B);
  for (int i = 0; i < 3; ++i) expect_near(c[i], C(i, 0), 1e-12);
}

TEST(ZeroCurvature, ZeroField) {
  const ModelParams p;
  LaxStencil st;
  st.hx = st.ht = 0.1;
  EXPECT_EQ(zero_curvature_residual(st, make_spectral_point({0.4, 0.2}, p), p), 0.0);
}

TEST(ZeroCurvature, PlaneWaveSecondOrder) {
  const ModelParams p;
  const PlaneWave w = plane_wave_solution(0.3, 1.0, p);
  EXPECT_NEAR(w.omega(), 0.91, 1e-15);
  const SpectralPoint sp = make_spectral_point({0.6, 0.3}, p);
  std::vector<double> r;
  for (double h : {0.04, 0.02, 0.01}) r.push_back(zero_curvature_residual(make_lax_stencil(w, 1.3, 0.4, h), sp, p));
  EXPECT_NEAR(std::log2(r[0] / r[1]), 2.0, 0.05);
  EXPECT_NEAR(std::log2(r[1] / r[2]), 2.0, 0.05);
}

// u = a e^{i(kappa x - (omega + 1) t)} is not a solution: the residual stays O(1).
class DetunedWave : public FieldSampler {
 public:
  FieldPoint sample(double x, double t) const override {
    const cplx u = 0.3 * std::exp(I_unit * (x - (w_.omega() + 1.0) * t));
    return {u, 0.0, I_unit * u, 0.0};
  }
  bool contains(double, double) const override { return true; }
  double x_max() const override { return 20; }
  double t_max() const override { return 1; }
  double node_spacing_x() const override { return 0.05; }
  double node_spacing_t() const override { return 0.05; }
  const ModelParams& params() const override { return p_; }

 private:
  ModelParams p_;
  PlaneWave w_ = plane_wave_solution(0.3, 1.0, ModelParams{});
};

TEST(ZeroCurvature, WrongFrequencyStaysAway) {
  const ModelParams p;
  const DetunedWave w;
  const SpectralPoint sp = make_spectral_point({0.6, 0.3}, p);
  for (double h : {0.04, 0.01, 0.0025})
    EXPECT_GT(zero_curvature_residual(make_lax_stencil(w, 1.3, 0.4, h), sp, p), 0.05);
}
