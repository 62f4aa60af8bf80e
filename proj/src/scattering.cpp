#include "cmnls/scattering.hpp"

#include <cassert>
#include <cmath>
#include <exception>
#include <sstream>

#include "cmnls/errors.hpp"

namespace cmnls {

namespace {

constexpr Region D1 = Region::D1, D2 = Region::D2, D3 = Region::D3, D4 = Region::D4;

double masked_diff(const Matrix3C& a, const Matrix3C& b, const ColumnMask& cols) {
  double m = 0.0;
  for (int j = 0; j < 3; ++j)
    if (cols[j])
      for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

Matrix3C run_path(const FieldSampler& f, const EigenfunctionId& id, const std::vector<Leg>& legs,
                  const SpectralPoint& sp, const ColumnMask& cols, const StepControl& ctl) {
  Matrix3C m = Matrix3C::identity();
  for (const Leg& leg : legs) m = propagate_leg(f, sp, leg, m, cols, id.adjugate, ctl);
  return m;
}

}  // namespace

std::vector<Leg> eigenfunction_path(const EigenfunctionId& id, double x, double t,
                                    const FieldSampler& f, PathVariant variant,
                                    std::optional<double> mu3_base) {
  const double T = f.t_max();
  std::vector<Leg> legs;
  auto add = [&](Leg l) {
    if (l.from != l.to) legs.push_back(l);
  };
  switch (id.j) {
    case Eigenfunction::Mu1:
      if (variant == PathVariant::Canonical) {
        add({LegAxis::T, 0.0, T, t});
        add({LegAxis::X, t, 0.0, x});
      } else {
        add({LegAxis::X, T, 0.0, x});
        add({LegAxis::T, x, T, t});
      }
      break;
    case Eigenfunction::Mu2:
      if (variant == PathVariant::Canonical) {
        add({LegAxis::T, 0.0, 0.0, t});
        add({LegAxis::X, t, 0.0, x});
      } else {
        add({LegAxis::X, 0.0, 0.0, x});
        add({LegAxis::T, x, 0.0, t});
      }
      break;
    case Eigenfunction::Mu3:
      add({LegAxis::X, t, mu3_base.value_or(f.x_max()), x});
      break;
  }
  return legs;
}

std::array<RegionSet, 3> validity_domains(const EigenfunctionId& id, bool at_x0) {
  std::array<RegionSet, 3> d{};
  switch (id.j) {
    case Eigenfunction::Mu1:
      d = at_x0 ? std::array<RegionSet, 3>{D2 | D4, D1 | D3, D1 | D3}
                : std::array<RegionSet, 3>{region_bit(D4), region_bit(D1), region_bit(D1)};
      break;
    case Eigenfunction::Mu2:
      d = at_x0 ? std::array<RegionSet, 3>{D1 | D3, D2 | D4, D2 | D4}
                : std::array<RegionSet, 3>{region_bit(D3), region_bit(D2), region_bit(D2)};
      break;
    case Eigenfunction::Mu3:
      d = {D1 | D2, D3 | D4, D3 | D4};
      break;
  }
  if (id.adjugate) {
    // negating the diagonal rates swaps D1 with D4 and D2 with D3
    for (auto& s : d) {
      RegionSet r = 0;
      if (s & region_bit(D1)) r |= region_bit(D4);
      if (s & region_bit(D4)) r |= region_bit(D1);
      if (s & region_bit(D2)) r |= region_bit(D3);
      if (s & region_bit(D3)) r |= region_bit(D2);
      s = r;
    }
  }
  return d;
}

std::array<double, 3> path_growth(const EigenfunctionId& id, const std::vector<Leg>& legs,
                                  const SpectralPoint& sp) {
  std::array<double, 3> g{};
  for (const Leg& leg : legs)
    for (int c = 0; c < 3; ++c) g[c] += leg_growth(sp, leg, c, id.adjugate);
  return g;
}

EigenfunctionResult integrate_eigenfunction(const FieldSampler& f, const EigenfunctionId& id,
                                            double x, double t, cplx lambda,
                                            const ScatteringOptions& opts) {
  if (!f.contains(x, t)) {
    std::ostringstream os;
    os << "eigenfunction target (" << x << ", " << t << ") outside the data box";
    throw OutOfDomainError(os.str());
  }
  const SpectralPoint sp = make_spectral_point(lambda, f.params());
  const std::vector<Leg> legs = eigenfunction_path(id, x, t, f, opts.path);

  EigenfunctionResult res;
  res.columns = opts.columns;
  res.growth = path_growth(id, legs, sp);
  if (!opts.override_domain_guard)
    for (int c = 0; c < 3; ++c)
      if (opts.columns[c] && res.growth[c] > opts.guard_exponent) {
        std::ostringstream os;
        os << "column " << c + 1 << " of mu" << static_cast<int>(id.j) << (id.adjugate ? "^A" : "")
           << " at lambda = " << lambda << " grows like e^" << res.growth[c]
           << " (guard e^" << opts.guard_exponent << ")";
        throw DomainViolationError(os.str(), c + 1, res.growth[c]);
      }

  res.value = run_path(f, id, legs, sp, opts.columns, opts.step);
  if (opts.estimate_error) {
    StepControl fine = opts.step;
    fine.refine *= 2;
    const Matrix3C better = run_path(f, id, legs, sp, opts.columns, fine);
    res.quad_error += masked_diff(better, res.value, opts.columns);
    res.value = better;
  }
  if (opts.truncation_term && id.j == Eigenfunction::Mu3) {
    const double base = 0.9 * f.x_max();
    if (base > x) {
      const auto short_legs = eigenfunction_path(id, x, t, f, opts.path, base);
      res.quad_error +=
          masked_diff(run_path(f, id, short_legs, sp, opts.columns, opts.step), res.value,
                      opts.columns);
    }
  }
  if (opts.data_resolution_term) {
    if (auto coarse = f.coarse_copy()) {
      const auto clegs = eigenfunction_path(id, x, t, *coarse, opts.path);
      const Matrix3C mc = run_path(*coarse, id, clegs, sp, opts.columns, opts.step);
      // cubic data: Richardson estimate of the fine-data error from the
      // coarse/fine difference
      res.quad_error += masked_diff(mc, res.value, opts.columns) / 7.0;
    }
  }
  return res;
}

Matrix3C compute_s(const FieldSampler& f, cplx lambda, const ScatteringOptions& opts) {
  return integrate_eigenfunction(f, {Eigenfunction::Mu3, false}, 0.0, 0.0, lambda, opts).value;
}

Matrix3C compute_S(const FieldSampler& f, cplx lambda, const ScatteringOptions& opts) {
  return integrate_eigenfunction(f, {Eigenfunction::Mu1, false}, 0.0, 0.0, lambda, opts).value;
}

Matrix3C compute_c(const FieldSampler& f, cplx lambda, const ScatteringOptions& opts) {
  return integrate_eigenfunction(f, {Eigenfunction::Mu3, false}, 0.0, f.t_max(), lambda, opts)
      .value;
}

Matrix3C adjugate_eigenfunction(const Matrix3C& mu) {
  assert(std::abs(det(mu) - 1.0) < 1e-6);
  return cofactor_matrix(mu);
}

double symmetry_residual(const Matrix3C& mu, const Matrix3C& mu_conj, int epsilon) {
  const Matrix3C A = Matrix3C::diag(-1.0, double(epsilon), double(epsilon));
  return norm_max(inverse(mu) - A * adjoint(mu_conj) * A);
}

double symmetry_residual(const FieldSampler& f, cplx lambda, int epsilon,
                         const EigenfunctionId& id, double x, double t,
                         const ScatteringOptions& opts) {
  const Matrix3C a = integrate_eigenfunction(f, id, x, t, lambda, opts).value;
  const Matrix3C b = integrate_eigenfunction(f, id, x, t, std::conj(lambda), opts).value;
  return symmetry_residual(a, b, epsilon);
}

std::vector<SpectralSample> spectral_sweep(const FieldSampler& f, const std::vector<cplx>& lambdas,
                                           const ScatteringOptions& opts, bool with_c,
                                           Exec exec) {
  std::vector<SpectralSample> out(lambdas.size());
  std::vector<std::exception_ptr> errors(lambdas.size());
  auto body = [&](long n) {
    try {
      SpectralSample& smp = out[n];
      smp.lambda = lambdas[n];
      const auto s = integrate_eigenfunction(f, {Eigenfunction::Mu3, false}, 0.0, 0.0,
                                             smp.lambda, opts);
      const auto S = integrate_eigenfunction(f, {Eigenfunction::Mu1, false}, 0.0, 0.0,
                                             smp.lambda, opts);
      smp.s = s.value;
      smp.S = S.value;
      smp.sA = cofactor_matrix(smp.s);
      smp.SA = cofactor_matrix(smp.S);
      smp.quad_error = std::max(s.quad_error, S.quad_error);
      if (with_c) {
        const auto c = integrate_eigenfunction(f, {Eigenfunction::Mu3, false}, 0.0, f.t_max(),
                                               smp.lambda, opts);
        smp.c = c.value;
        smp.quad_error = std::max(smp.quad_error, c.quad_error);
      }
    } catch (...) {
      errors[n] = std::current_exception();
    }
  };
  const long N = static_cast<long>(lambdas.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long n = 0; n < N; ++n) body(n);
  } else {
    for (long n = 0; n < N; ++n) body(n);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace cmnls
