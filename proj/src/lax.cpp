#include "cmnls/lax.hpp"

#include <cmath>
#include <string>

#include "cmnls/errors.hpp"

namespace cmnls {

namespace {
// log(DBL_MAX) is about 709.78; leave a little headroom for the entry itself.
constexpr double kMaxExponent = 700.0;
}  // namespace

void ModelParams::validate() const {
  if (gamma == 0.0 || !std::isfinite(gamma))
    throw ParameterError("gamma must be finite and nonzero");
  if (!std::isfinite(delta)) throw ParameterError("delta must be finite");
  if (epsilon != 1 && epsilon != -1) throw ParameterError("epsilon must be +1 or -1");
}

SpectralPoint make_spectral_point(cplx lambda, const ModelParams& params) {
  if (params.gamma == 0.0) throw ParameterError("gamma = 0: the Lax pair divides by gamma");
  SpectralPoint sp;
  sp.lambda = lambda;
  sp.k = (lambda * lambda + params.delta / 2.0) / params.gamma;
  const cplx ik = I_unit * sp.k;
  const cplx z1 = 2.0 * I_unit * sp.k * sp.k;
  for (int i = 0; i < 3; ++i) {
    sp.l[i] = -ik * kLambdaDiag[i];
    sp.z[i] = z1 * kLambdaDiag[i];
  }
  return sp;
}

Matrix3C lambda_matrix() { return Matrix3C::diag(-1.0, 1.0, 1.0); }

Matrix3C u1_matrix(const FieldPoint& fp) {
  Matrix3C m;
  m(0, 1) = fp.u;
  m(0, 2) = fp.v;
  m(1, 0) = std::conj(fp.u);
  m(2, 0) = std::conj(fp.v);
  return m;
}

Matrix3C u2_matrix(const FieldPoint& fp) {
  const double q = std::norm(fp.u) + std::norm(fp.v);
  Matrix3C m;
  m(0, 0) = -q;
  m(1, 1) = std::norm(fp.u);
  m(1, 2) = std::conj(fp.u) * fp.v;
  m(2, 1) = fp.u * std::conj(fp.v);
  m(2, 2) = std::norm(fp.v);
  return m;
}

Matrix3C u3_matrix(const FieldPoint& fp, const ModelParams& params) {
  const double q = std::norm(fp.u) + std::norm(fp.v);
  const double c = params.delta / params.gamma;
  const double g = params.gamma;
  Matrix3C m;
  m(0, 1) = c * fp.u + g * fp.u * q - I_unit * fp.ux;
  m(0, 2) = c * fp.v + g * fp.v * q - I_unit * fp.vx;
  m(1, 0) = c * std::conj(fp.u) + g * std::conj(fp.u) * q + I_unit * std::conj(fp.ux);
  m(2, 0) = c * std::conj(fp.v) + g * std::conj(fp.v) * q + I_unit * std::conj(fp.vx);
  return m;
}

Matrix3C eval_V1(const FieldPoint& fp, const SpectralPoint& sp) {
  return sp.lambda * u1_matrix(fp);
}

Matrix3C eval_V2(const FieldPoint& fp, const SpectralPoint& sp, const ModelParams& params) {
  const cplx lam = sp.lambda;
  const cplx lam2 = lam * lam;
  return (-2.0 / params.gamma * lam2 * lam) * u1_matrix(fp) + (I_unit * lam2) * u2_matrix(fp) -
         lam * u3_matrix(fp, params);
}

Matrix3C eval_U(const FieldPoint& fp, const SpectralPoint& sp, const ModelParams&) {
  Matrix3C m = eval_V1(fp, sp);
  for (int i = 0; i < 3; ++i) m(i, i) += sp.l[i];
  return m;
}

Matrix3C eval_V(const FieldPoint& fp, const SpectralPoint& sp, const ModelParams& params) {
  Matrix3C m = eval_V2(fp, sp, params);
  for (int i = 0; i < 3; ++i) m(i, i) += sp.z[i];
  return m;
}

Matrix3C conjugation_action(cplx theta, const Matrix3C& B) {
  const double growth = 2.0 * std::abs(theta.real());
  const cplx up = std::exp(-2.0 * theta);
  const cplx down = std::exp(2.0 * theta);
  Matrix3C r = B;
  for (int j = 1; j < 3; ++j) {
    if (growth > kMaxExponent && (B(0, j) != 0.0 || B(j, 0) != 0.0))
      throw OverflowError("conjugation_action: |Re theta| = " + std::to_string(growth / 2) +
                          " exceeds the representable range");
    r(0, j) = B(0, j) == 0.0 ? cplx{} : B(0, j) * up;
    r(j, 0) = B(j, 0) == 0.0 ? cplx{} : B(j, 0) * down;
  }
  if (!all_finite(r)) throw OverflowError("conjugation_action produced a non-finite entry");
  return r;
}

Vec3C conjugation_action_column(cplx theta, const Vec3C& col, int j) {
  Vec3C r = col;
  for (int i = 0; i < 3; ++i) {
    const double d = kLambdaDiag[i] - kLambdaDiag[j];
    if (d == 0.0 || col[i] == 0.0) continue;
    if (std::abs(d * theta.real()) > kMaxExponent)
      throw OverflowError("conjugation_action_column: exponent out of range");
    r[i] = col[i] * std::exp(d * theta);
  }
  return r;
}

double zero_curvature_residual(const LaxStencil& st, const SpectralPoint& sp,
                               const ModelParams& params) {
  const Matrix3C U = eval_U(st.center, sp, params);
  const Matrix3C V = eval_V(st.center, sp, params);
  const Matrix3C Ut =
      (1.0 / (2.0 * st.ht)) * (eval_U(st.t_plus, sp, params) - eval_U(st.t_minus, sp, params));
  const Matrix3C Vx =
      (1.0 / (2.0 * st.hx)) * (eval_V(st.x_plus, sp, params) - eval_V(st.x_minus, sp, params));
  return norm_max(Ut - Vx + commutator(U, V));
}

}  // namespace cmnls
