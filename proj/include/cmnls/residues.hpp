#pragma once

#include <functional>
#include <vector>

#include "cmnls/regions.hpp"
#include "cmnls/scattering.hpp"

namespace cmnls {

// theta_ij = (l_i - l_j) x + (z_i - z_j) t, 1-based indices. With this sign
// e^{theta_1j} is the factor e^{phi Lambda-hat} puts on entry (1,j).
cplx theta(int i, int j, double x, double t, const SpectralPoint& sp);

using ScalarFunction = std::function<cplx(cplx)>;
using MatrixFunction = std::function<Matrix3C(cplx)>;

// The scalars whose zeros are assigned to D1..D4.
enum class ScalarKind { SigmaD1, S11, M11, SigmaD4 };
const char* scalar_name(ScalarKind k);
ScalarKind scalar_for_region(Region r);
cplx eval_scalar(ScalarKind k, const Matrix3C& s, const Matrix3C& S);

struct ZeroLocus {
  cplx lambda;
  ScalarKind which = ScalarKind::S11;
  Region region = Region::Boundary;
  int multiplicity = 1;
  double newton_residual = 0.0;
  // set for multiple zeros and zeros on a region boundary
  bool assumption_violation = false;
};

struct ZeroSearchOptions {
  int cells_x = 8, cells_y = 8;  // initial subdivision of the box
  int max_depth = 8;             // bisection depth per cell
  int edge_nodes = 16;           // initial samples per cell edge
  double newton_tol = 1e-12;
  int newton_max_iter = 40;
  double boundary_tol = kBoundaryTol;
};

// Counts zeros of f in one rectangle by the argument principle. Throws
// UnresolvedZeroError when f nearly vanishes on the edge or the phase
// cannot be tracked.
int winding_number(const ScalarFunction& f, const Box& box, int edge_nodes = 16);

// Zeros of f in box whose refined location lies in `region`. Cells whose
// corners and centre all lie outside the closure of the region are skipped,
// so f only needs to be evaluable near the region. Throws
// UnresolvedZeroError when the winding count and the refined loci disagree.
std::vector<ZeroLocus> find_zeros(const ScalarFunction& f, ScalarKind which, Region region,
                                  const Box& box, const ModelParams& params,
                                  const ZeroSearchOptions& opts = {});

// Fourth-order central difference of an analytic function.
cplx complex_derivative(const ScalarFunction& f, cplx z, double h);

struct ResidueTerm {
  int source;  // 1-based column of M(lambda_j)
  cplx coefficient;
};

// Res_{lambda_j}[M]_column = e^{theta} sum_terms coefficient [M(lambda_j)]_source,
// theta = theta_13 (D1, D2) or theta_31 (D3, D4) at (x,t).
struct ResidueRecord {
  ZeroLocus locus;
  int column = 1;
  std::vector<ResidueTerm> terms;
  cplx theta_value;
  double x = 0.0, t = 0.0;
};

struct ResidueOptions {
  double step_scale = 1e-4;  // derivative step = max(step_scale (1 + |lambda|), noise^(1/5))
  double singular_tol = 1e-10;
};

// D1, D2 give two records (columns 2 and 3); D3, D4 one record with two terms.
// Throws DegenerateZeroError when a secondary denominator vanishes.
std::vector<ResidueRecord> residue_coefficients(const MatrixFunction& s, const MatrixFunction& S,
                                                const ZeroLocus& locus, double x, double t,
                                                const ModelParams& params,
                                                const ResidueOptions& opts = {});

// (1/2 pi i) \oint f over the circle |lambda - c| = r, trapezoid rule.
Vec3C contour_integral_column(const MatrixFunction& M, int column, cplx centre, double radius,
                              int nodes);

// Relative discrepancy between the contour residue of [M]_column and the
// record's formula. Throws CircleLeavesRegionError if the circle leaves the
// locus region.
double verify_residue_contour(const MatrixFunction& M, const ResidueRecord& rec, double radius,
                              const ModelParams& params, int nodes = 128);

// Rational spectral data with one planted simple zero of the region's scalar
// at lambda0, and a meromorphic M = mu(lambda) e^{phi Lambda-hat} S_n built
// with an analytic unimodular mu.
struct ManufacturedData {
  Region region;
  cplx lambda0;
  MatrixFunction s, S;
  MatrixFunction mu;
  ModelParams params;
  Matrix3C M(cplx lambda, double x, double t) const;
};

ManufacturedData make_manufactured(Region region, cplx lambda0, std::uint64_t seed,
                                   const ModelParams& params = {});

struct GlobalRelationSample {
  cplx lambda;
  Region region = Region::Boundary;
  std::array<double, 3> residual{};
  // residual / max(1, |column of the conjugated c|): the conjugation scales
  // c by up to e^{4 |Im k^2| T}, and data errors in c with it
  std::array<double, 3> relative{};
  std::array<bool, 3> valid{};
  double quad_error = 0.0;
};

struct GlobalRelationReport {
  std::vector<GlobalRelationSample> samples;
  double max_residual = 0.0;
  double median_residual = 0.0;
  double max_relative = 0.0;
};

// Columns (1; 2; 3) are compared on (D1 u D2; D3 u D4; D3 u D4). s, S and c
// are computed in full, so lambda should stay where their growth is mild.
GlobalRelationReport global_relation_residual(const FieldSampler& f,
                                              const std::vector<cplx>& lambdas,
                                              const ScatteringOptions& opts = {},
                                              Exec exec = Exec::Parallel);

}  // namespace cmnls
