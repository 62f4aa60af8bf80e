#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cmnls/integrator.hpp"
#include "cmnls/regions.hpp"

namespace cmnls {

enum class Eigenfunction { Mu1 = 1, Mu2 = 2, Mu3 = 3 };

struct EigenfunctionId {
  Eigenfunction j = Eigenfunction::Mu3;
  bool adjugate = false;
};

// Canonical: mu1 (0,T)->(0,t)->(x,t), mu2 (0,0)->(0,t)->(x,t), mu3 (L,t)->(x,t).
// Alternate swaps the order of the two legs for mu1 and mu2.
enum class PathVariant { Canonical, Alternate };

std::vector<Leg> eigenfunction_path(const EigenfunctionId& id, double x, double t,
                                    const FieldSampler& f,
                                    PathVariant variant = PathVariant::Canonical,
                                    std::optional<double> mu3_base = std::nullopt);

// Column domains of boundedness. at_x0 gives the enlarged domains of mu1, mu2
// (and their adjugates) on the boundary x = 0.
std::array<RegionSet, 3> validity_domains(const EigenfunctionId& id, bool at_x0);

// Worst-case e-folding of each column along the path from its diagonal rates.
std::array<double, 3> path_growth(const EigenfunctionId& id, const std::vector<Leg>& legs,
                                  const SpectralPoint& sp);

struct ScatteringOptions {
  ColumnMask columns = kAllColumns;
  bool override_domain_guard = false;
  double guard_exponent = 20.0;  // refuse columns whose growth exceeds e^guard
  StepControl step;
  bool estimate_error = false;     // halved-step re-integration
  bool truncation_term = false;    // mu3 base at L vs 0.9 L
  bool data_resolution_term = false;  // re-run on data coarsened by 2
  PathVariant path = PathVariant::Canonical;
};

struct EigenfunctionResult {
  Matrix3C value;
  ColumnMask columns = kAllColumns;
  double quad_error = 0.0;
  std::array<double, 3> growth{};
};

// Integrates mu_j (or mu_j^A) to (x,t). Throws DomainViolationError for a
// requested column whose growth exceeds the guard, unless overridden.
EigenfunctionResult integrate_eigenfunction(const FieldSampler& f, const EigenfunctionId& id,
                                            double x, double t, cplx lambda,
                                            const ScatteringOptions& opts = {});

// s = mu3(0,0), S = mu1(0,0), c = mu3(0,T).
Matrix3C compute_s(const FieldSampler& f, cplx lambda, const ScatteringOptions& opts = {});
Matrix3C compute_S(const FieldSampler& f, cplx lambda, const ScatteringOptions& opts = {});
Matrix3C compute_c(const FieldSampler& f, cplx lambda, const ScatteringOptions& opts = {});

// Cofactor matrix; for det mu = 1 this is the inverse transpose.
Matrix3C adjugate_eigenfunction(const Matrix3C& mu);

// || mu(lambda)^{-1} - A conj(mu(conj lambda))^T A ||_max with A = diag(-1, eps, eps).
double symmetry_residual(const Matrix3C& mu_lambda, const Matrix3C& mu_conj_lambda, int epsilon);
double symmetry_residual(const FieldSampler& f, cplx lambda, int epsilon,
                         const EigenfunctionId& id = {}, double x = 0.0, double t = 0.0,
                         const ScatteringOptions& opts = {});

struct SpectralSample {
  cplx lambda;
  Matrix3C s, S, sA, SA;
  std::optional<Matrix3C> c;
  double quad_error = 0.0;
};

// Data-parallel lambda sweep (Exec::Serial is the reference implementation).
std::vector<SpectralSample> spectral_sweep(const FieldSampler& f, const std::vector<cplx>& lambdas,
                                           const ScatteringOptions& opts, bool with_c,
                                           Exec exec = Exec::Parallel);

}  // namespace cmnls
