#include "cmnls/residues.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <sstream>

#include "cmnls/errors.hpp"
#include "cmnls/rh.hpp"

namespace cmnls {

namespace {

constexpr double kPi = std::numbers::pi;

cplx m_of(const Matrix3C& cof, int i, int j) {
  const cplx c = cof(i - 1, j - 1);
  return ((i + j) % 2 == 0) ? c : -c;
}

cplx at(const Box& b, double fx, double fy) {
  return {b.re_min + fx * (b.re_max - b.re_min), b.im_min + fy * (b.im_max - b.im_min)};
}

// accumulated phase change of f from a to b, bisecting until each piece
// turns by less than pi/4
double phase_change(const ScalarFunction& f, cplx a, cplx fa, cplx b, cplx fb, int depth) {
  const double d = std::arg(fb / fa);
  if (std::abs(d) < kPi / 4) return d;
  if (depth > 16) throw UnresolvedZeroError("phase of f cannot be tracked along a cell edge");
  const cplx m = 0.5 * (a + b);
  const cplx fm = f(m);
  if (fm == 0.0 || !std::isfinite(std::abs(fm)))
    throw UnresolvedZeroError("f vanishes or overflows on a cell edge");
  return phase_change(f, a, fa, m, fm, depth + 1) + phase_change(f, m, fm, b, fb, depth + 1);
}

double cell_size(const Box& b) { return std::max(b.re_max - b.re_min, b.im_max - b.im_min); }

bool inside(const Box& b, cplx z, double slack) {
  return z.real() >= b.re_min - slack && z.real() <= b.re_max + slack &&
         z.imag() >= b.im_min - slack && z.imag() <= b.im_max + slack;
}

bool touches_region(const Box& b, Region r, const ModelParams& params) {
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j) {
      const RegionSet s = adjacent_regions(at(b, i / 4.0, j / 4.0), params, 0.0);
      if (contains(s, r)) return true;
      if (classify_region(at(b, i / 4.0, j / 4.0), params, 0.0).tag == r) return true;
    }
  return false;
}

struct Search {
  const ScalarFunction& f;
  ScalarKind which;
  Region region;
  const ModelParams& params;
  const ZeroSearchOptions& opts;
  int outside = 0;  // winding of cells set aside as lying off the region
  std::vector<ZeroLocus> found;

  bool newton(cplx& z, int mult, double size, double& residual) const {
    const double h = 1e-3 * size;
    const cplx start = z;
    double step = 0.0;
    for (int it = 0; it < opts.newton_max_iter; ++it) {
      const cplx fz = f(z);
      const cplx dz = complex_derivative(f, z, h);
      if (dz == 0.0) return false;
      const cplx delta = double(mult) * fz / dz;
      z -= delta;
      // an iterate that leaves the cell's neighbourhood is abandoned; the
      // caller bisects instead
      if (std::abs(z - start) > 2.0 * size) return false;
      step = std::abs(delta);
      if (step <= opts.newton_tol * (1.0 + std::abs(z))) break;
    }
    residual = std::abs(f(z));
    return step <= std::max(opts.newton_tol * (1.0 + std::abs(z)), 1e-6 * size);
  }

  // Returns the winding count of b after accounting for every zero in it.
  int cell(const Box& b, int depth) {
    const int w = winding_number(f, b, opts.edge_nodes);
    if (w == 0) return 0;
    if (w < 0) throw UnresolvedZeroError("negative winding count: f has a pole in the search box");
    if (!touches_region(b, region, params)) {
      outside += w;
      return w;
    }
    const double size = cell_size(b);
    const bool last = depth >= opts.max_depth;
    if (w == 1 || last) {
      cplx z = at(b, 0.5, 0.5);
      double res = 0.0;
      const bool ok = newton(z, w, size, res);
      if (ok && inside(b, z, 1e-9 * (1.0 + size))) {
        ZeroLocus loc;
        loc.lambda = z;
        loc.which = which;
        loc.multiplicity = w;
        loc.newton_residual = res;
        loc.assumption_violation = w > 1;
        found.push_back(loc);
        return w;
      }
      if (last) {
        // a cell this small whose centre is off the region only straddles
        // its edge; the zero is someone else's
        const cplx c = at(b, 0.5, 0.5);
        const double k_tol = size * (1.0 + 2.0 * std::abs(c) / std::abs(params.gamma));
        if (!contains(adjacent_regions(c, params, k_tol), region)) {
          outside += w;
          return w;
        }
        std::ostringstream os;
        os << "winding count " << w << " near " << at(b, 0.5, 0.5)
           << " but Newton refinement did not settle inside the cell";
        throw UnresolvedZeroError(os.str());
      }
    }
    // split the longer side slightly off centre so split lines avoid
    // symmetric zero placements
    constexpr double kSplit = 0.4913;
    Box lo = b, hi = b;
    if (b.re_max - b.re_min >= b.im_max - b.im_min) {
      const double m = b.re_min + kSplit * (b.re_max - b.re_min);
      lo.re_max = m;
      hi.re_min = m;
    } else {
      const double m = b.im_min + kSplit * (b.im_max - b.im_min);
      lo.im_max = m;
      hi.im_min = m;
    }
    if (cell(lo, depth + 1) + cell(hi, depth + 1) != w)
      throw UnresolvedZeroError("sub-cell winding counts do not add up");
    return w;
  }
};

}  // namespace

cplx theta(int i, int j, double x, double t, const SpectralPoint& sp) {
  if (i < 1 || i > 3 || j < 1 || j > 3) throw ParameterError("theta indices must be 1..3");
  return (sp.l[i - 1] - sp.l[j - 1]) * x + (sp.z[i - 1] - sp.z[j - 1]) * t;
}

const char* scalar_name(ScalarKind k) {
  switch (k) {
    case ScalarKind::SigmaD1: return "(s^T S^A)_11";
    case ScalarKind::S11: return "s_11";
    case ScalarKind::M11: return "m_11(s)";
    case ScalarKind::SigmaD4: return "(S^T s^A)_11";
  }
  return "?";
}

ScalarKind scalar_for_region(Region r) {
  switch (r) {
    case Region::D1: return ScalarKind::SigmaD1;
    case Region::D2: return ScalarKind::S11;
    case Region::D3: return ScalarKind::M11;
    case Region::D4: return ScalarKind::SigmaD4;
    default: throw ParameterError("no spectral scalar on the boundary");
  }
}

cplx eval_scalar(ScalarKind k, const Matrix3C& s, const Matrix3C& S) {
  switch (k) {
    case ScalarKind::SigmaD1: return sn_denominator(s, S, Region::D1);
    case ScalarKind::S11: return s(0, 0);
    case ScalarKind::M11: return minor(s, 0, 0);
    case ScalarKind::SigmaD4: return sn_denominator(s, S, Region::D4);
  }
  return 0.0;
}

int winding_number(const ScalarFunction& f, const Box& b, int edge_nodes) {
  const int n = std::max(4, edge_nodes);
  std::vector<cplx> pts;
  pts.reserve(4 * n + 1);
  const cplx c[4] = {at(b, 0, 0), at(b, 1, 0), at(b, 1, 1), at(b, 0, 1)};
  for (int e = 0; e < 4; ++e)
    for (int k = 0; k < n; ++k) pts.push_back(c[e] + (c[(e + 1) % 4] - c[e]) * (double(k) / n));
  pts.push_back(c[0]);
  std::vector<cplx> vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    vals[i] = i + 1 == pts.size() ? vals[0] : f(pts[i]);
    if (vals[i] == 0.0 || !std::isfinite(std::abs(vals[i])))
      throw UnresolvedZeroError("f vanishes or overflows on a cell edge");
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += phase_change(f, pts[i], vals[i], pts[i + 1], vals[i + 1], 0);
  const double w = total / (2 * kPi);
  if (std::abs(w - std::round(w)) > 0.1) throw UnresolvedZeroError("non-integer winding count");
  return static_cast<int>(std::lround(w));
}

std::vector<ZeroLocus> find_zeros(const ScalarFunction& f, ScalarKind which, Region region,
                                  const Box& box, const ModelParams& params,
                                  const ZeroSearchOptions& opts) {
  Search search{f, which, region, params, opts, 0, {}};
  int total_winding = 0;
  // interior grid lines nudged off the uniform positions
  auto line = [](double lo, double hi, int i, int n) {
    if (i == 0) return lo;
    if (i == n) return hi;
    return lo + (hi - lo) * (i + 0.0731) / n;
  };
  for (int i = 0; i < opts.cells_x; ++i)
    for (int j = 0; j < opts.cells_y; ++j) {
      Box c{line(box.re_min, box.re_max, i, opts.cells_x),
            line(box.re_min, box.re_max, i + 1, opts.cells_x),
            line(box.im_min, box.im_max, j, opts.cells_y),
            line(box.im_min, box.im_max, j + 1, opts.cells_y)};
      if (!touches_region(c, region, params)) continue;
      total_winding += search.cell(c, 0);
    }
  int refined = search.outside;
  for (const auto& z : search.found) refined += z.multiplicity;
  if (refined != total_winding)
    throw UnresolvedZeroError("winding count and refined zeros disagree");

  std::vector<ZeroLocus> out;
  for (ZeroLocus z : search.found) {
    const RegionId id = classify_region(z.lambda, params, opts.boundary_tol);
    if (id.tag == Region::Boundary) {
      if (!contains(adjacent_regions(z.lambda, params, 1e-6), region)) continue;
      z.region = Region::Boundary;
      z.assumption_violation = true;
    } else if (id.tag != region) {
      continue;
    } else {
      z.region = region;
    }
    out.push_back(z);
  }
  std::sort(out.begin(), out.end(), [](const ZeroLocus& a, const ZeroLocus& b) {
    return a.lambda.real() != b.lambda.real() ? a.lambda.real() < b.lambda.real()
                                              : a.lambda.imag() < b.lambda.imag();
  });
  return out;
}

cplx complex_derivative(const ScalarFunction& f, cplx z, double h) {
  return (f(z - 2.0 * h) - 8.0 * f(z - h) + 8.0 * f(z + h) - f(z + 2.0 * h)) / (12.0 * h);
}

std::vector<ResidueRecord> residue_coefficients(const MatrixFunction& sf, const MatrixFunction& Sf,
                                                const ZeroLocus& locus, double x, double t,
                                                const ModelParams& params,
                                                const ResidueOptions& opts) {
  if (locus.multiplicity != 1 || locus.region == Region::Boundary)
    throw ParameterError("residue conditions need a simple zero inside a region");
  const cplx lj = locus.lambda;
  const ScalarFunction g = [&](cplx l) { return eval_scalar(locus.which, sf(l), Sf(l)); };
  const double noise = std::max(locus.newton_residual, 1e-16);
  const double h = std::max(opts.step_scale * (1.0 + std::abs(lj)), std::pow(noise, 0.2));
  const cplx gdot = complex_derivative(g, lj, h);

  const Matrix3C s = sf(lj), S = Sf(lj);
  const Matrix3C sA = cofactor_matrix(s), SA = cofactor_matrix(S);
  auto m = [&](int i, int j) { return m_of(sA, i, j); };
  auto M = [&](int i, int j) { return m_of(SA, i, j); };
  auto se = [&](int i, int j) { return s(i - 1, j - 1); };
  auto Se = [&](int i, int j) { return S(i - 1, j - 1); };
  auto secondary = [&](cplx d, const char* name) {
    if (std::abs(d) <= opts.singular_tol) {
      std::ostringstream os;
      os << name << " vanishes at the zero " << lj;
      throw DegenerateZeroError(os.str());
    }
  };

  const SpectralPoint sp = make_spectral_point(lj, params);
  ResidueRecord base;
  base.locus = locus;
  base.x = x;
  base.t = t;
  std::vector<ResidueRecord> out;
  switch (locus.region) {
    case Region::D1:
    case Region::D2: {
      secondary(se(2, 1), "s_21");
      const cplx den = gdot * se(2, 1);
      base.theta_value = theta(1, 3, x, t, sp);
      cplx c2, c3;
      if (locus.region == Region::D1) {
        c2 = (m(3, 3) * M(1, 1) - m(1, 3) * M(3, 1)) / den;
        c3 = (m(3, 2) * M(1, 1) - m(1, 2) * M(3, 1)) / den;
      } else {
        c2 = m(3, 3) / den;
        c3 = m(3, 2) / den;
      }
      ResidueRecord r2 = base, r3 = base;
      r2.column = 2;
      r2.terms = {{1, c2}};
      r3.column = 3;
      r3.terms = {{1, c3}};
      out = {r2, r3};
      break;
    }
    case Region::D3: {
      secondary(m(2, 1), "m_21(s)");
      const cplx den = gdot * m(2, 1);
      base.theta_value = theta(3, 1, x, t, sp);
      base.column = 1;
      base.terms = {{2, se(3, 3) / den}, {3, -se(3, 2) / den}};
      out = {base};
      break;
    }
    case Region::D4: {
      secondary(m(1, 1), "m_11(s)");
      const cplx den = gdot * m(1, 1);
      base.theta_value = theta(3, 1, x, t, sp);
      base.column = 1;
      base.terms = {{2, (se(3, 3) * Se(2, 1) - se(2, 3) * Se(3, 1)) / den},
                    {3, (se(2, 2) * Se(3, 1) - se(3, 2) * Se(2, 1)) / den}};
      out = {base};
      break;
    }
    default: break;
  }
  return out;
}

Vec3C contour_integral_column(const MatrixFunction& M, int column, cplx centre, double radius,
                              int nodes) {
  Vec3C acc{};
  for (int n = 0; n < nodes; ++n) {
    const cplx e = std::polar(1.0, 2 * kPi * n / nodes);
    const Matrix3C m = M(centre + radius * e);
    for (int i = 0; i < 3; ++i) acc[i] += m(i, column - 1) * e;
  }
  for (auto& a : acc) a *= radius / nodes;
  return acc;
}

double verify_residue_contour(const MatrixFunction& M, const ResidueRecord& rec, double radius,
                              const ModelParams& params, int nodes) {
  nodes = std::max(nodes, 64);
  const cplx c = rec.locus.lambda;
  for (int n = 0; n < nodes; ++n) {
    const cplx p = c + radius * std::polar(1.0, 2 * kPi * n / nodes);
    if (classify_region(p, params).tag != rec.locus.region) {
      std::ostringstream os;
      os << "circle of radius " << radius << " around " << c << " leaves "
         << region_name(rec.locus.region);
      throw CircleLeavesRegionError(os.str());
    }
  }
  // one pass over the circle: the residue of [M]_column and, by the mean
  // value property, the analytic source columns at the centre (M itself
  // may not be evaluable at the zero)
  Vec3C integral{};
  Matrix3C Mj{};
  for (int n = 0; n < nodes; ++n) {
    const cplx e = std::polar(1.0, 2 * kPi * n / nodes);
    const Matrix3C m = M(c + radius * e);
    for (int i = 0; i < 3; ++i) integral[i] += m(i, rec.column - 1) * e * (radius / nodes);
    Mj += (1.0 / nodes) * m;
  }
  const cplx e = std::exp(rec.theta_value);
  Vec3C predicted{};
  for (const auto& term : rec.terms)
    for (int i = 0; i < 3; ++i) predicted[i] += e * term.coefficient * Mj(i, term.source - 1);
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    diff = std::max(diff, std::abs(integral[i] - predicted[i]));
    scale = std::max(scale, std::abs(predicted[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

Matrix3C ManufacturedData::M(cplx lambda, double x, double t) const {
  const SpectralPoint sp = make_spectral_point(lambda, params);
  const Matrix3C Sn = assemble_Sn(s(lambda), S(lambda), region, 0.0);
  return mu(lambda) * conjugation_action(phase_exponent(sp, x, t), Sn);
}

ManufacturedData make_manufactured(Region region, cplx lambda0, std::uint64_t seed,
                                   const ModelParams& params) {
  if (region == Region::Boundary) throw ParameterError("manufactured zero needs a region");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  auto rc = [&] { return cplx(U(rng), U(rng)); };
  // unit lower / upper triangular factors with entries linear in lambda
  std::array<cplx, 6> g1a, g1b, g2a, g2b;
  for (int i = 0; i < 6; ++i) {
    g1a[i] = rc();
    g1b[i] = 0.2 * rc();
    g2a[i] = rc();
    g2b[i] = 0.2 * rc();
  }
  std::array<cplx, 3> ha, hb;
  for (int i = 0; i < 3; ++i) {
    ha[i] = rc();
    hb[i] = 0.2 * rc();
  }
  // the zero's partner pole sits in the conjugate region
  const cplx pole = std::conj(lambda0);
  auto unimodular = [=](cplx l) {
    // G1 X G2, det = 1, (1,1) entry (l - lambda0)/(l - pole)
    const cplx fz = (l - lambda0) / (l - pole);
    Matrix3C G1 = Matrix3C::identity(), G2 = Matrix3C::identity(), X{};
    G1(1, 0) = g1a[0] + g1b[0] * l;
    G1(2, 0) = g1a[1] + g1b[1] * l;
    G1(2, 1) = g1a[2] + g1b[2] * l;
    G2(0, 1) = g2a[0] + g2b[0] * l;
    G2(0, 2) = g2a[1] + g2b[1] * l;
    G2(1, 2) = g2a[2] + g2b[2] * l;
    X(0, 0) = fz;
    X(0, 1) = 1.0;
    X(1, 0) = -1.0;
    X(2, 2) = 1.0;
    return G1 * X * G2;
  };
  auto other = [=](cplx l) {
    // generic unimodular companion: lower * upper unit triangular
    Matrix3C Lo = Matrix3C::identity(), Up = Matrix3C::identity();
    Lo(1, 0) = g1a[3] + g1b[3] * l;
    Lo(2, 0) = g1a[4] + g1b[4] * l;
    Lo(2, 1) = g1a[5] + g1b[5] * l;
    Up(0, 1) = g2a[3] + g2b[3] * l;
    Up(0, 2) = g2a[4] + g2b[4] * l;
    Up(1, 2) = g2a[5] + g2b[5] * l;
    return Lo * Up;
  };
  ManufacturedData d;
  d.region = region;
  d.lambda0 = lambda0;
  d.params = params;
  switch (region) {
    case Region::D1:  // (s^T S^A)_11 = (S^{-1} s)_11
      d.S = other;
      d.s = [=](cplx l) { return other(l) * unimodular(l); };
      break;
    case Region::D2:
      d.s = unimodular;
      d.S = other;
      break;
    case Region::D3:  // m_11(cof(Y)) = Y_11 when det Y = 1
      d.s = [=](cplx l) { return cofactor_matrix(unimodular(l)); };
      d.S = other;
      break;
    case Region::D4:  // (S^T s^A)_11 = (s^{-1} S)_11
      d.s = other;
      d.S = [=](cplx l) { return other(l) * unimodular(l); };
      break;
    default: break;
  }
  d.mu = [=](cplx l) {
    Matrix3C m = Matrix3C::identity();
    m(0, 1) = ha[0] + hb[0] * l;
    m(2, 0) = ha[1] + hb[1] * l * l;
    m(1, 2) = ha[2] + hb[2] * l;
    return m;
  };
  return d;
}

GlobalRelationReport global_relation_residual(const FieldSampler& f,
                                              const std::vector<cplx>& lambdas,
                                              const ScatteringOptions& opts, Exec exec) {
  GlobalRelationReport rep;
  rep.samples.resize(lambdas.size());
  std::vector<std::exception_ptr> errors(lambdas.size());
  ScatteringOptions o = opts;
  o.columns = kAllColumns;
  o.override_domain_guard = true;
  const double T = f.t_max();
  auto body = [&](long n) {
    try {
      GlobalRelationSample& g = rep.samples[n];
      g.lambda = lambdas[n];
      g.region = classify_region(g.lambda, f.params()).tag;
      g.valid = {contains(Region::D1 | Region::D2, g.region),
                 contains(Region::D3 | Region::D4, g.region),
                 contains(Region::D3 | Region::D4, g.region)};
      if (g.region == Region::Boundary) return;
      const auto s = integrate_eigenfunction(f, {Eigenfunction::Mu3}, 0.0, 0.0, g.lambda, o);
      const auto S = integrate_eigenfunction(f, {Eigenfunction::Mu1}, 0.0, 0.0, g.lambda, o);
      const auto c = integrate_eigenfunction(f, {Eigenfunction::Mu3}, 0.0, T, g.lambda, o);
      const SpectralPoint sp = make_spectral_point(g.lambda, f.params());
      const Matrix3C ec = conjugation_action(-2.0 * I_unit * sp.k * sp.k * T, c.value);
      const Matrix3C d = inverse(S.value) * s.value - ec;
      for (int j = 0; j < 3; ++j) {
        double scale = 1.0;
        for (int i = 0; i < 3; ++i) {
          g.residual[j] = std::max(g.residual[j], std::abs(d(i, j)));
          scale = std::max(scale, std::abs(ec(i, j)));
        }
        g.relative[j] = g.residual[j] / scale;
      }
      g.quad_error = std::max({s.quad_error, S.quad_error, c.quad_error});
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

  std::vector<double> all;
  for (const auto& g : rep.samples)
    for (int j = 0; j < 3; ++j)
      if (g.valid[j]) {
        all.push_back(g.residual[j]);
        rep.max_relative = std::max(rep.max_relative, g.relative[j]);
      }
  if (!all.empty()) {
    rep.max_residual = *std::max_element(all.begin(), all.end());
    std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
    rep.median_residual = all[all.size() / 2];
  }
  return rep;
}

}  // namespace cmnls
