#pragma once

#include <array>

#include "cmnls/matrix3.hpp"

namespace cmnls {

struct ModelParams {
  double delta = 2.0;
  double gamma = 1.0;
  int epsilon = 1;

  void validate() const;
};

// lambda plus the derived k = (lambda^2 + delta/2)/gamma and the diagonals
// l of -ik Lambda and z of 2ik^2 Lambda.
struct SpectralPoint {
  cplx lambda;
  cplx k;
  std::array<cplx, 3> l;
  std::array<cplx, 3> z;
};

struct FieldPoint {
  cplx u, v, ux, vx;
};

inline constexpr std::array<double, 3> kLambdaDiag{-1.0, 1.0, 1.0};

SpectralPoint make_spectral_point(cplx lambda, const ModelParams& params);

Matrix3C lambda_matrix();
Matrix3C u1_matrix(const FieldPoint& fp);
Matrix3C u2_matrix(const FieldPoint& fp);
Matrix3C u3_matrix(const FieldPoint& fp, const ModelParams& params);

// V1 = lambda U1 and V2 = -(2/gamma) lambda^3 U1 + i lambda^2 U2 - lambda U3.
Matrix3C eval_V1(const FieldPoint& fp, const SpectralPoint& sp);
Matrix3C eval_V2(const FieldPoint& fp, const SpectralPoint& sp, const ModelParams& params);

// Full x-part U = -ik Lambda + V1 and t-part V = 2ik^2 Lambda + V2.
Matrix3C eval_U(const FieldPoint& fp, const SpectralPoint& sp, const ModelParams& params);
Matrix3C eval_V(const FieldPoint& fp, const SpectralPoint& sp, const ModelParams& params);

// exp(theta ad Lambda) B = e^{theta Lambda} B e^{-theta Lambda}. Entry (i,j) picks
// up e^{theta (Lambda_i - Lambda_j)}. Throws OverflowError when a nonzero entry
// would leave the double range.
Matrix3C conjugation_action(cplx theta, const Matrix3C& B);

// Same scaling restricted to column j of B.
Vec3C conjugation_action_column(cplx theta, const Vec3C& col, int j);

// Five-point space-time stencil of field values around (x,t).
struct LaxStencil {
  double x = 0.0, t = 0.0, hx = 0.0, ht = 0.0;
  FieldPoint center{}, x_minus{}, x_plus{}, t_minus{}, t_plus{};
};

// || U_t - V_x + [U,V] ||_max with centred differences on the stencil.
double zero_curvature_residual(const LaxStencil& st, const SpectralPoint& sp,
                               const ModelParams& params);

}  // namespace cmnls
