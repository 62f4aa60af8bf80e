#pragma once

#include <vector>

#include "cmnls/regions.hpp"
#include "cmnls/scattering.hpp"

namespace cmnls {

inline constexpr double kSingularTol = 1e-10;

// S_n(lambda) from s and S. Throws SingularityError when the region's
// denominator is at most singular_tol in modulus.
Matrix3C assemble_Sn(const Matrix3C& s, const Matrix3C& S, Region n,
                     double singular_tol = kSingularTol);

// The scalar whose zeros make S_n singular:
// D1 (s^T S^A)_11, D2 s_11, D3 m_11(s), D4 (S^T s^A)_11.
cplx sn_denominator(const Matrix3C& s, const Matrix3C& S, Region n);

struct JumpRecord {
  Region m, n;
  cplx lambda;
  double x, t;
  Matrix3C J;
};

// J_mn = e^{(-ikx + 2ik^2 t) Lambda-hat}(S_m^{-1} S_n).
JumpRecord jump_matrix(Region m, Region n, const Matrix3C& s, const Matrix3C& S, double x, double t,
                       cplx lambda, const ModelParams& params,
                       double singular_tol = kSingularTol);

// Exponent of the conjugation that takes S_n to M_n.
cplx phase_exponent(const SpectralPoint& sp, double x, double t);

enum class AssemblyRoute {
  // mu2 e^{..} S_n literally; needs all of mu2, s, S, so only usable where
  // their unbounded columns stay representable (moderate |lambda|).
  Product,
  // Every column of M_n from eigenfunction columns that are bounded in D_n.
  // Algebraically equal to Product.
  ColumnStable,
};

struct MOptions {
  ScatteringOptions scattering;
  AssemblyRoute route = AssemblyRoute::ColumnStable;
  double boundary_tol = kBoundaryTol;
  double singular_tol = kSingularTol;
};

struct MEvaluation {
  Matrix3C M;
  Region region = Region::Boundary;
  double quad_error = 0.0;
};

// M(x,t,lambda) in the region containing lambda.
MEvaluation assemble_M(const FieldSampler& f, double x, double t, cplx lambda,
                       const MOptions& opts = {});
// The same with the region formula chosen by the caller; lambda may sit on
// the boundary of D_n (used for jump identities).
MEvaluation assemble_M_in(const FieldSampler& f, double x, double t, cplx lambda, Region n,
                          const MOptions& opts = {});

struct AsymptoticFit {
  Matrix3C C0, C1;
  double residual = 0.0;  // max entry misfit over the samples
};

// Least squares M ~ C0 + C1 / lambda, entrywise. Needs at least 3 samples.
AsymptoticFit asymptotic_fit(const std::vector<cplx>& lambdas, const std::vector<Matrix3C>& Ms);

struct RaySample {
  cplx lambda;
  Matrix3C M;
  double quad_error = 0.0;
};

struct Reconstruction {
  Region region = Region::Boundary;
  double ray_angle = 0.0;
  std::vector<RaySample> samples;
  // 2i lim lambda M_12, 2i lim lambda M_13.
  cplx u = 0.0, v = 0.0;
  double u_error = 0.0, v_error = 0.0;
  // -2i lim lambda M_1,(2:3) P^{-1}, P = lim of the lower 2x2 block of M:
  // removes the gauge that M carries at infinity.
  cplx u_normalized = 0.0, v_normalized = 0.0;
  double u_normalized_error = 0.0, v_normalized_error = 0.0;
};

struct ReconstructionOptions {
  std::optional<double> ray_angle;  // default: bisector ray of D2
  std::vector<double> radii{4.0, 8.0, 16.0, 32.0};
  MOptions m;
};

// Evaluates M along a ray and extrapolates in 1/lambda (terms 1/lambda and
// 1/lambda^2 eliminated). Error estimate: change of the limit when the
// smallest radius is dropped. Throws RayCrossesBoundaryError if the ray
// leaves a single region.
Reconstruction reconstruct_uv(const FieldSampler& f, double x, double t,
                              const ReconstructionOptions& opts = {});

// a + b w + c w^2 through three points, returns a.
cplx richardson_limit(const std::array<cplx, 3>& w, const std::array<cplx, 3>& f);

}  // namespace cmnls
