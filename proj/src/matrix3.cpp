#include "cmnls/matrix3.hpp"

#include <cmath>

#include "cmnls/errors.hpp"

namespace cmnls {

Matrix3C Matrix3C::identity() { return diag(1.0, 1.0, 1.0); }

Matrix3C Matrix3C::diag(cplx d0, cplx d1, cplx d2) {
  Matrix3C m;
  m(0, 0) = d0;
  m(1, 1) = d1;
  m(2, 2) = d2;
  return m;
}

Matrix3C operator+(const Matrix3C& x, const Matrix3C& y) {
  Matrix3C r;
  for (int n = 0; n < 9; ++n) r.a[n] = x.a[n] + y.a[n];
  return r;
}

Matrix3C operator-(const Matrix3C& x, const Matrix3C& y) {
  Matrix3C r;
  for (int n = 0; n < 9; ++n) r.a[n] = x.a[n] - y.a[n];
  return r;
}

Matrix3C operator-(const Matrix3C& x) {
  Matrix3C r;
  for (int n = 0; n < 9; ++n) r.a[n] = -x.a[n];
  return r;
}

Matrix3C operator*(const Matrix3C& x, const Matrix3C& y) {
  Matrix3C r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
  return r;
}

Matrix3C operator*(cplx s, const Matrix3C& x) {
  Matrix3C r;
  for (int n = 0; n < 9; ++n) r.a[n] = s * x.a[n];
  return r;
}

Vec3C operator*(const Matrix3C& x, const Vec3C& v) {
  return {x(0, 0) * v[0] + x(0, 1) * v[1] + x(0, 2) * v[2],
          x(1, 0) * v[0] + x(1, 1) * v[1] + x(1, 2) * v[2],
          x(2, 0) * v[0] + x(2, 1) * v[1] + x(2, 2) * v[2]};
}

Matrix3C& operator+=(Matrix3C& x, const Matrix3C& y) {
  for (int n = 0; n < 9; ++n) x.a[n] += y.a[n];
  return x;
}

Matrix3C transpose(const Matrix3C& x) {
  Matrix3C r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = x(j, i);
  return r;
}

Matrix3C conj(const Matrix3C& x) {
  Matrix3C r;
  for (int n = 0; n < 9; ++n) r.a[n] = std::conj(x.a[n]);
  return r;
}

Matrix3C adjoint(const Matrix3C& x) { return conj(transpose(x)); }

Matrix3C commutator(const Matrix3C& x, const Matrix3C& y) { return x * y - y * x; }

cplx minor(const Matrix3C& x, int i, int j) {
  int r[2], c[2];
  for (int n = 0, p = 0, q = 0; n < 3; ++n) {
    if (n != i) r[p++] = n;
    if (n != j) c[q++] = n;
  }
  return x(r[0], c[0]) * x(r[1], c[1]) - x(r[0], c[1]) * x(r[1], c[0]);
}

cplx det(const Matrix3C& x) {
  return x(0, 0) * minor(x, 0, 0) - x(0, 1) * minor(x, 0, 1) + x(0, 2) * minor(x, 0, 2);
}

Matrix3C cofactor_matrix(const Matrix3C& x) {
  Matrix3C r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = ((i + j) % 2 ? -1.0 : 1.0) * minor(x, i, j);
  return r;
}

Matrix3C inverse(const Matrix3C& x) {
  const cplx d = det(x);
  if (d == 0.0) throw SingularityError("inverse of a singular matrix", d);
  return (1.0 / d) * transpose(cofactor_matrix(x));
}

double norm_max(const Matrix3C& x) {
  double m = 0.0;
  for (const auto& e : x.a) m = std::max(m, std::abs(e));
  return m;
}

double norm_fro(const Matrix3C& x) {
  double s = 0.0;
  for (const auto& e : x.a) s += std::norm(e);
  return std::sqrt(s);
}

bool all_finite(const Matrix3C& x) {
  for (const auto& e : x.a)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  return true;
}

Vec3C cross(const Vec3C& p, const Vec3C& q) {
  return {p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]};
}

cplx dot(const Vec3C& p, const Vec3C& q) { return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]; }

double norm(const Vec3C& v) {
  return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

}  // namespace cmnls
