#pragma once

#include <array>
#include <complex>

namespace cmnls {

using cplx = std::complex<double>;
using Vec3C = std::array<cplx, 3>;

inline constexpr cplx I_unit{0.0, 1.0};

// Dense 3x3 complex matrix, row-major. Indices are zero-based throughout the
// code; the mathematical (1,2) entry is m(0,1).
struct Matrix3C {
  std::array<cplx, 9> a{};

  cplx& operator()(int i, int j) { return a[3 * i + j]; }
  const cplx& operator()(int i, int j) const { return a[3 * i + j]; }

  static Matrix3C identity();
  static Matrix3C diag(cplx d0, cplx d1, cplx d2);

  Vec3C column(int j) const { return {(*this)(0, j), (*this)(1, j), (*this)(2, j)}; }
  void set_column(int j, const Vec3C& c) {
    for (int i = 0; i < 3; ++i) (*this)(i, j) = c[i];
  }
};

Matrix3C operator+(const Matrix3C& x, const Matrix3C& y);
Matrix3C operator-(const Matrix3C& x, const Matrix3C& y);
Matrix3C operator-(const Matrix3C& x);
Matrix3C operator*(const Matrix3C& x, const Matrix3C& y);
Matrix3C operator*(cplx s, const Matrix3C& x);
Vec3C operator*(const Matrix3C& x, const Vec3C& v);
Matrix3C& operator+=(Matrix3C& x, const Matrix3C& y);

Matrix3C transpose(const Matrix3C& x);
Matrix3C conj(const Matrix3C& x);
Matrix3C adjoint(const Matrix3C& x);
Matrix3C commutator(const Matrix3C& x, const Matrix3C& y);

// m_ij: determinant of the 2x2 block left after deleting row i and column j.
cplx minor(const Matrix3C& x, int i, int j);
cplx det(const Matrix3C& x);
// Signed-minor matrix: entry (i,j) is (-1)^(i+j) m_ij. B (B^A)^T = det(B) I.
Matrix3C cofactor_matrix(const Matrix3C& x);
// Inverse through the cofactor matrix; throws SingularityError if det is zero.
Matrix3C inverse(const Matrix3C& x);

double norm_max(const Matrix3C& x);
double norm_fro(const Matrix3C& x);
bool all_finite(const Matrix3C& x);

Vec3C cross(const Vec3C& p, const Vec3C& q);
cplx dot(const Vec3C& p, const Vec3C& q);  // bilinear, no conjugation
double norm(const Vec3C& v);

}  // namespace cmnls
