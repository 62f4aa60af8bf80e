#include "cmnls/rh.hpp"

#include <sstream>

#include "cmnls/errors.hpp"

namespace cmnls {

namespace {

// signed minor m_ij (1-based, as written in the formulas) from the cofactor matrix
cplx m_of(const Matrix3C& cof, int i, int j) {
  const cplx c = cof(i - 1, j - 1);
  return ((i + j) % 2 == 0) ? c : -c;
}

void check_denominator(cplx d, Region n, double tol) {
  if (std::abs(d) <= tol) {
    std::ostringstream os;
    os << "S_" << region_index(n) << " denominator " << d << " vanishes";
    throw SingularityError(os.str(), d);
  }
}

cplx denominator_from_parts(const Matrix3C& s, const Matrix3C& sA, const Matrix3C& S,
                            const Matrix3C& SA, Region n) {
  switch (n) {
    case Region::D1: return dot(s.column(0), SA.column(0));
    case Region::D2: return s(0, 0);
    case Region::D3: return sA(0, 0);
    case Region::D4: return dot(S.column(0), sA.column(0));
    default: throw ParameterError("S_n needs a region D1..D4");
  }
}

// S_n from the entries of s, s^A, S, S^A that its formula reads. Only the
// columns bounded in D_n are touched, so callers may leave the rest unset.
Matrix3C sn_from_parts(const Matrix3C& s, const Matrix3C& sA, const Matrix3C& S,
                       const Matrix3C& SA, Region n, double tol) {
  const cplx d = denominator_from_parts(s, sA, S, SA, n);
  check_denominator(d, n, tol);
  Matrix3C r{};
  switch (n) {
    case Region::D1: {
      auto m = [&](int i, int j) { return m_of(sA, i, j); };
      auto M = [&](int i, int j) { return m_of(SA, i, j); };
      r.set_column(0, s.column(0));
      r(0, 1) = (m(3, 3) * M(2, 1) - m(2, 3) * M(3, 1)) / d;
      r(1, 1) = (m(3, 3) * M(1, 1) - m(1, 3) * M(3, 1)) / d;
      r(2, 1) = (m(2, 3) * M(1, 1) - m(1, 3) * M(2, 1)) / d;
      r(0, 2) = (m(3, 2) * M(2, 1) - m(2, 2) * M(3, 1)) / d;
      r(1, 2) = (m(3, 2) * M(1, 1) - m(1, 2) * M(3, 1)) / d;
      r(2, 2) = (m(2, 2) * M(1, 1) - m(1, 2) * M(2, 1)) / d;
      break;
    }
    case Region::D2: {
      auto m = [&](int i, int j) { return m_of(sA, i, j); };
      r.set_column(0, s.column(0));
      r(1, 1) = m(3, 3) / d;
      r(1, 2) = m(3, 2) / d;
      r(2, 1) = m(2, 3) / d;
      r(2, 2) = m(2, 2) / d;
      break;
    }
    case Region::D3:
      r(0, 0) = 1.0 / d;
      r.set_column(1, s.column(1));
      r.set_column(2, s.column(2));
      break;
    case Region::D4:
      r.set_column(0, {S(0, 0) / d, S(1, 0) / d, S(2, 0) / d});
      r.set_column(1, s.column(1));
      r.set_column(2, s.column(2));
      break;
    default: break;
  }
  return r;
}

Region require_region(cplx lambda, const MOptions& opts, const ModelParams& params) {
  const RegionId id = classify_region(lambda, params, opts.boundary_tol);
  if (id.tag == Region::Boundary) {
    std::ostringstream os;
    os << "lambda = " << lambda << " lies on a region boundary (margin " << id.margin << ")";
    throw OutOfDomainError(os.str());
  }
  return id.tag;
}

struct Partial {
  Matrix3C value;
  double err;
};

Partial eval(const FieldSampler& f, Eigenfunction j, bool adj, double x, double t, cplx lambda,
             ColumnMask cols, const ScatteringOptions& base) {
  ScatteringOptions o = base;
  o.columns = cols;
  const auto r = integrate_eigenfunction(f, {j, adj}, x, t, lambda, o);
  return {r.value, r.quad_error};
}

constexpr ColumnMask kFirst{true, false, false};
constexpr ColumnMask kLast{false, true, true};

MEvaluation product_route(const FieldSampler& f, double x, double t, cplx lambda, Region n,
                          const MOptions& opts) {
  const ScatteringOptions& so = opts.scattering;
  const auto mu2 = eval(f, Eigenfunction::Mu2, false, x, t, lambda, kAllColumns, so);
  const auto s = eval(f, Eigenfunction::Mu3, false, 0.0, 0.0, lambda, kAllColumns, so);
  const auto S = eval(f, Eigenfunction::Mu1, false, 0.0, 0.0, lambda, kAllColumns, so);
  const Matrix3C Sn = assemble_Sn(s.value, S.value, n, opts.singular_tol);
  const SpectralPoint sp = make_spectral_point(lambda, f.params());
  MEvaluation out;
  out.M = mu2.value * conjugation_action(phase_exponent(sp, x, t), Sn);
  out.region = n;
  out.quad_error = std::max({mu2.err, s.err, S.err});
  return out;
}

MEvaluation column_route(const FieldSampler& f, double x, double t, cplx lambda, Region n,
                         const MOptions& opts) {
  const ScatteringOptions& so = opts.scattering;
  MEvaluation out;
  out.region = n;
  Matrix3C& M = out.M;
  double err = 0.0;
  auto track = [&](const Partial& p) {
    err = std::max(err, p.err);
    return p.value;
  };
  switch (n) {
    case Region::D1: {
      const Matrix3C mu3 = track(eval(f, Eigenfunction::Mu3, false, x, t, lambda, kFirst, so));
      const Matrix3C mu1 = track(eval(f, Eigenfunction::Mu1, false, x, t, lambda, kLast, so));
      const Matrix3C s = track(eval(f, Eigenfunction::Mu3, false, 0, 0, lambda, kFirst, so));
      const Matrix3C sA = track(eval(f, Eigenfunction::Mu3, true, 0, 0, lambda, kLast, so));
      const Matrix3C S = track(eval(f, Eigenfunction::Mu1, false, 0, 0, lambda, kLast, so));
      Matrix3C SA{};
      SA.set_column(0, cross(S.column(1), S.column(2)));
      const Matrix3C S1 = sn_from_parts(s, sA, S, SA, n, opts.singular_tol);
      // cols 2,3 of S^{-1} S_1 have a zero first row; recover their lower
      // block from span{S_2, S_3} without touching the unbounded S_1
      const Vec3C c1 = SA.column(0);
      const double c1n = norm(c1) * norm(c1);
      auto proj = [&](const Vec3C& w) { return dot(w, {std::conj(c1[0]), std::conj(c1[1]), std::conj(c1[2])}) / c1n; };
      M.set_column(0, mu3.column(0));
      for (int j = 1; j < 3; ++j) {
        const Vec3C w = S1.column(j);
        const cplx r2 = proj(cross(w, S.column(2)));
        const cplx r3 = proj(cross(S.column(1), w));
        for (int i = 0; i < 3; ++i) M(i, j) = mu1(i, 1) * r2 + mu1(i, 2) * r3;
      }
      break;
    }
    case Region::D2: {
      const Matrix3C mu3 = track(eval(f, Eigenfunction::Mu3, false, x, t, lambda, kFirst, so));
      const Matrix3C mu2 = track(eval(f, Eigenfunction::Mu2, false, x, t, lambda, kLast, so));
      const Matrix3C s = track(eval(f, Eigenfunction::Mu3, false, 0, 0, lambda, kFirst, so));
      const Matrix3C sA = track(eval(f, Eigenfunction::Mu3, true, 0, 0, lambda, kLast, so));
      const Matrix3C S2 = sn_from_parts(s, sA, Matrix3C{}, Matrix3C{}, n, opts.singular_tol);
      M.set_column(0, mu3.column(0));
      for (int j = 1; j < 3; ++j)
        for (int i = 0; i < 3; ++i) M(i, j) = mu2(i, 1) * S2(1, j) + mu2(i, 2) * S2(2, j);
      break;
    }
    case Region::D3: {
      const Matrix3C mu3 = track(eval(f, Eigenfunction::Mu3, false, x, t, lambda, kLast, so));
      const Matrix3C mu2 = track(eval(f, Eigenfunction::Mu2, false, x, t, lambda, kFirst, so));
      const Matrix3C sA = track(eval(f, Eigenfunction::Mu3, true, 0, 0, lambda, kFirst, so));
      const cplx d = sA(0, 0);
      check_denominator(d, n, opts.singular_tol);
      for (int i = 0; i < 3; ++i) M(i, 0) = mu2(i, 0) / d;
      M.set_column(1, mu3.column(1));
      M.set_column(2, mu3.column(2));
      break;
    }
    case Region::D4: {
      const Matrix3C mu3 = track(eval(f, Eigenfunction::Mu3, false, x, t, lambda, kLast, so));
      const Matrix3C mu1 = track(eval(f, Eigenfunction::Mu1, false, x, t, lambda, kFirst, so));
      const Matrix3C sA = track(eval(f, Eigenfunction::Mu3, true, 0, 0, lambda, kFirst, so));
      const Matrix3C S = track(eval(f, Eigenfunction::Mu1, false, 0, 0, lambda, kFirst, so));
      const cplx d = dot(S.column(0), sA.column(0));
      check_denominator(d, n, opts.singular_tol);
      for (int i = 0; i < 3; ++i) M(i, 0) = mu1(i, 0) / d;
      M.set_column(1, mu3.column(1));
      M.set_column(2, mu3.column(2));
      break;
    }
    default: throw ParameterError("M needs a region D1..D4");
  }
  out.quad_error = err;
  return out;
}

}  // namespace

cplx sn_denominator(const Matrix3C& s, const Matrix3C& S, Region n) {
  return denominator_from_parts(s, cofactor_matrix(s), S, cofactor_matrix(S), n);
}

Matrix3C assemble_Sn(const Matrix3C& s, const Matrix3C& S, Region n, double singular_tol) {
  return sn_from_parts(s, cofactor_matrix(s), S, cofactor_matrix(S), n, singular_tol);
}

cplx phase_exponent(const SpectralPoint& sp, double x, double t) {
  return -I_unit * sp.k * x + 2.0 * I_unit * sp.k * sp.k * t;
}

JumpRecord jump_matrix(Region m, Region n, const Matrix3C& s, const Matrix3C& S, double x, double t,
                       cplx lambda, const ModelParams& params, double singular_tol) {
  const SpectralPoint sp = make_spectral_point(lambda, params);
  const Matrix3C Sm = assemble_Sn(s, S, m, singular_tol);
  const Matrix3C Sn = assemble_Sn(s, S, n, singular_tol);
  return {m, n, lambda, x, t, conjugation_action(phase_exponent(sp, x, t), inverse(Sm) * Sn)};
}

MEvaluation assemble_M_in(const FieldSampler& f, double x, double t, cplx lambda, Region n,
                          const MOptions& opts) {
  if (n == Region::Boundary) throw ParameterError("M needs a region D1..D4");
  return opts.route == AssemblyRoute::Product ? product_route(f, x, t, lambda, n, opts)
                                              : column_route(f, x, t, lambda, n, opts);
}

MEvaluation assemble_M(const FieldSampler& f, double x, double t, cplx lambda,
                       const MOptions& opts) {
  return assemble_M_in(f, x, t, lambda, require_region(lambda, opts, f.params()), opts);
}

AsymptoticFit asymptotic_fit(const std::vector<cplx>& lambdas, const std::vector<Matrix3C>& Ms) {
  if (lambdas.size() < 3 || lambdas.size() != Ms.size())
    throw ParameterError("asymptotic fit needs at least 3 samples");
  // normal equations of the 2-parameter complex least squares in w = 1/lambda
  cplx a11 = 0.0, a12 = 0.0, a22 = 0.0;
  for (cplx l : lambdas) {
    const cplx w = 1.0 / l;
    a11 += 1.0;
    a12 += w;
    a22 += std::norm(w);
  }
  const cplx a21 = std::conj(a12);
  const cplx detA = a11 * a22 - a12 * a21;
  AsymptoticFit fit;
  for (int e = 0; e < 9; ++e) {
    cplx b1 = 0.0, b2 = 0.0;
    for (std::size_t n = 0; n < lambdas.size(); ++n) {
      const cplx w = 1.0 / lambdas[n];
      b1 += Ms[n].a[e];
      b2 += std::conj(w) * Ms[n].a[e];
    }
    fit.C0.a[e] = (a22 * b1 - a12 * b2) / detA;
    fit.C1.a[e] = (a11 * b2 - a21 * b1) / detA;
  }
  for (std::size_t n = 0; n < lambdas.size(); ++n)
    fit.residual =
        std::max(fit.residual, norm_max(Ms[n] - fit.C0 - (1.0 / lambdas[n]) * fit.C1));
  return fit;
}

cplx richardson_limit(const std::array<cplx, 3>& w, const std::array<cplx, 3>& f) {
  // Lagrange interpolation in w evaluated at w = 0
  cplx a = 0.0;
  for (int i = 0; i < 3; ++i) {
    cplx li = 1.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) li *= (0.0 - w[j]) / (w[i] - w[j]);
    a += li * f[i];
  }
  return a;
}

namespace {

struct Limits {
  cplx u, v, un, vn;
};

Limits limits_from(const std::vector<RaySample>& smp, std::size_t first) {
  std::array<cplx, 3> w;
  for (int i = 0; i < 3; ++i) w[i] = 1.0 / smp[first + i].lambda;
  auto lim = [&](auto&& g) {
    std::array<cplx, 3> f;
    for (int i = 0; i < 3; ++i) f[i] = g(smp[first + i]);
    return richardson_limit(w, f);
  };
  Limits out;
  const cplx q2 = lim([](const RaySample& r) { return r.lambda * r.M(0, 1); });
  const cplx q3 = lim([](const RaySample& r) { return r.lambda * r.M(0, 2); });
  out.u = 2.0 * I_unit * q2;
  out.v = 2.0 * I_unit * q3;
  cplx P[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      P[a][b] = lim([&](const RaySample& r) { return r.M(a + 1, b + 1); });
  const cplx dP = P[0][0] * P[1][1] - P[0][1] * P[1][0];
  if (std::abs(dP) == 0.0) throw SingularityError("gauge block at infinity is singular", dP);
  // (un, vn) P = -2i (q2, q3)
  const cplx r2 = -2.0 * I_unit * q2, r3 = -2.0 * I_unit * q3;
  out.un = (r2 * P[1][1] - r3 * P[1][0]) / dP;
  out.vn = (r3 * P[0][0] - r2 * P[0][1]) / dP;
  return out;
}

}  // namespace

Reconstruction reconstruct_uv(const FieldSampler& f, double x, double t,
                              const ReconstructionOptions& opts) {
  if (opts.radii.size() < 3) throw ParameterError("reconstruction needs at least 3 radii");
  for (std::size_t i = 1; i < opts.radii.size(); ++i)
    if (!(opts.radii[i] > opts.radii[i - 1]))
      throw ParameterError("reconstruction radii must increase");
  Reconstruction rec;
  rec.ray_angle = opts.ray_angle ? *opts.ray_angle : default_ray_angle(Region::D2, f.params());
  const cplx dir = std::polar(1.0, rec.ray_angle);
  for (std::size_t i = 0; i < opts.radii.size(); ++i) {
    const cplx lam = opts.radii[i] * dir;
    const RegionId id = classify_region(lam, f.params(), opts.m.boundary_tol);
    if (id.tag == Region::Boundary || (i > 0 && id.tag != rec.region)) {
      std::ostringstream os;
      os << "ray at angle " << rec.ray_angle << " leaves a single region at radius "
         << opts.radii[i];
      throw RayCrossesBoundaryError(os.str());
    }
    rec.region = id.tag;
  }
  rec.samples.resize(opts.radii.size());
  for (std::size_t i = 0; i < opts.radii.size(); ++i) {
    const cplx lam = opts.radii[i] * dir;
    const MEvaluation m = assemble_M_in(f, x, t, lam, rec.region, opts.m);
    rec.samples[i] = {lam, m.M, m.quad_error};
  }
  const std::size_t n = rec.samples.size();
  const Limits best = limits_from(rec.samples, n - 3);
  rec.u = best.u;
  rec.v = best.v;
  rec.u_normalized = best.un;
  rec.v_normalized = best.vn;
  if (n >= 4) {
    const Limits prev = limits_from(rec.samples, n - 4);
    rec.u_error = std::abs(best.u - prev.u);
    rec.v_error = std::abs(best.v - prev.v);
    rec.u_normalized_error = std::abs(best.un - prev.un);
    rec.v_normalized_error = std::abs(best.vn - prev.vn);
  } else {
    const RaySample& last = rec.samples.back();
    rec.u_error = std::abs(best.u - 2.0 * I_unit * last.lambda * last.M(0, 1));
    rec.v_error = std::abs(best.v - 2.0 * I_unit * last.lambda * last.M(0, 2));
    rec.u_normalized_error = rec.u_error;
    rec.v_normalized_error = rec.v_error;
  }
  return rec;
}

}  // namespace cmnls
