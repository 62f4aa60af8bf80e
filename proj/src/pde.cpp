#include "cmnls/pde.hpp"

#include <cmath>
#include <sstream>

#include "cmnls/errors.hpp"

namespace cmnls {

namespace {

struct Stencil {
  const cplx* f;
  std::size_t n;
  bool periodic;

  cplx at(long j) const {
    const long N = static_cast<long>(n);
    if (periodic) return f[((j % N) + N) % N];
    return (j < 0 || j >= N) ? cplx{} : f[j];
  }
};

inline cplx d1(const Stencil& s, long j, double inv12dx) {
  return (-s.at(j + 2) + 8.0 * s.at(j + 1) - 8.0 * s.at(j - 1) + s.at(j - 2)) * inv12dx;
}

inline cplx d2(const Stencil& s, long j, double inv12dx2) {
  return (-s.at(j + 2) + 16.0 * s.at(j + 1) - 30.0 * s.at(j) + 16.0 * s.at(j - 1) -
          s.at(j - 2)) *
         inv12dx2;
}

inline void rhs_point(long j, const Stencil& U, const Stencil& V, const Stencil& Q,
                      const Stencil& QU, const Stencil& QV, double inv12dx, double inv12dx2,
                      const ModelParams& p, cplx* du, cplx* dv) {
  const cplx u = U.at(j), v = V.at(j);
  const double q = Q.at(j).real();
  const cplx dq = d1(Q, j, inv12dx);
  const cplx nu = 0.5 * (d1(QU, j, inv12dx) + q * d1(U, j, inv12dx) + u * dq);
  const cplx nv = 0.5 * (d1(QV, j, inv12dx) + q * d1(V, j, inv12dx) + v * dq);
  du[j] = I_unit * (d2(U, j, inv12dx2) + p.delta * q * u) - p.gamma * nu;
  dv[j] = I_unit * (d2(V, j, inv12dx2) + p.delta * q * v) - p.gamma * nv;
}

double l2(std::span<const cplx> u, std::span<const cplx> v) {
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += std::norm(u[j]) + std::norm(v[j]);
  return std::sqrt(s);
}

}  // namespace

void cmnls_rhs(std::span<const cplx> u, std::span<const cplx> v, std::span<cplx> du,
               std::span<cplx> dv, double dx, const ModelParams& params, bool periodic,
               Exec exec) {
  const std::size_t n = u.size();
  std::vector<cplx> q(n), qu(n), qv(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double qq = std::norm(u[j]) + std::norm(v[j]);
    q[j] = qq;
    qu[j] = qq * u[j];
    qv[j] = qq * v[j];
  }
  const Stencil U{u.data(), n, periodic}, V{v.data(), n, periodic}, Q{q.data(), n, periodic},
      QU{qu.data(), n, periodic}, QV{qv.data(), n, periodic};
  const double inv12dx = 1.0 / (12.0 * dx);
  const double inv12dx2 = 1.0 / (12.0 * dx * dx);
  const long N = static_cast<long>(n);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long j = 0; j < N; ++j)
      rhs_point(j, U, V, Q, QU, QV, inv12dx, inv12dx2, params, du.data(), dv.data());
  } else {
    for (long j = 0; j < N; ++j)
      rhs_point(j, U, V, Q, QU, QV, inv12dx, inv12dx2, params, du.data(), dv.data());
  }
}

LineSolution solve_line_ivp(std::span<const cplx> u0, std::span<const cplx> v0,
                            const UniformGrid& x_grid, double T, double dt,
                            const ModelParams& params, const SolverOptions& opts) {
  params.validate();
  const std::size_t n = x_grid.count;
  if (u0.size() != n || v0.size() != n) throw GridError("initial data length != grid length");
  if (n < 5) throw GridError("line grid needs at least 5 nodes");
  const double dx = x_grid.step;
  if (!(dt > 0.0) || !(T >= 0.0)) throw ParameterError("dt must be positive and T >= 0");
  if (dt > opts.c_stab * dx * dx * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violation: dt = " << dt << " > " << opts.c_stab << " dx^2 = "
       << opts.c_stab * dx * dx;
    throw CflError(os.str());
  }
  const std::size_t stride = std::max<std::size_t>(1, opts.store_stride);
  std::size_t nsteps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  nsteps = (nsteps + stride - 1) / stride * stride;
  const double h = nsteps ? T / static_cast<double>(nsteps) : 0.0;

  LineSolution ls;
  ls.x_grid = x_grid;
  ls.t_grid = {0.0, h * static_cast<double>(stride), nsteps / stride + 1};
  ls.params = params;
  ls.periodic = opts.periodic;
  ls.dt = h;
  ls.u.reserve(n * ls.t_grid.count);
  ls.v.reserve(n * ls.t_grid.count);

  std::vector<cplx> u(u0.begin(), u0.end()), v(v0.begin(), v0.end());
  std::vector<cplx> ut(n), vt(n), k1u(n), k1v(n), k2u(n), k2v(n), k3u(n), k3v(n), k4u(n), k4v(n);
  auto rhs = [&](const std::vector<cplx>& a, const std::vector<cplx>& b, std::vector<cplx>& da,
                 std::vector<cplx>& db) {
    cmnls_rhs(a, b, da, db, dx, params, opts.periodic, opts.exec);
  };
  auto store = [&] {
    ls.u.insert(ls.u.end(), u.begin(), u.end());
    ls.v.insert(ls.v.end(), v.begin(), v.end());
  };
  const double norm0 = l2(u, v);
  store();
  for (std::size_t s = 1; s <= nsteps; ++s) {
    rhs(u, v, k1u, k1v);
    for (std::size_t j = 0; j < n; ++j) {
      ut[j] = u[j] + 0.5 * h * k1u[j];
      vt[j] = v[j] + 0.5 * h * k1v[j];
    }
    rhs(ut, vt, k2u, k2v);
    for (std::size_t j = 0; j < n; ++j) {
      ut[j] = u[j] + 0.5 * h * k2u[j];
      vt[j] = v[j] + 0.5 * h * k2v[j];
    }
    rhs(ut, vt, k3u, k3v);
    for (std::size_t j = 0; j < n; ++j) {
      ut[j] = u[j] + h * k3u[j];
      vt[j] = v[j] + h * k3v[j];
    }
    rhs(ut, vt, k4u, k4v);
    for (std::size_t j = 0; j < n; ++j) {
      u[j] += h / 6.0 * (k1u[j] + 2.0 * k2u[j] + 2.0 * k3u[j] + k4u[j]);
      v[j] += h / 6.0 * (k1v[j] + 2.0 * k2v[j] + 2.0 * k3v[j] + k4v[j]);
    }
    if (s % stride == 0) {
      const double nrm = l2(u, v);
      if (!std::isfinite(nrm) || nrm > opts.growth_limit * norm0 + 1e-300) {
        std::ostringstream os;
        os << "instability at t = " << h * static_cast<double>(s) << ": ||q|| = " << nrm
           << " vs initial " << norm0;
        throw InstabilityError(os.str());
      }
      store();
    }
  }
  ls.mass = conserved_mass(ls);
  return ls;
}

FieldData extract_halfline_data(const LineSolution& ls, const FieldTolerances& tolerances) {
  const double dx = ls.x_grid.step;
  const double p = -ls.x_grid.start / dx;
  const auto j0 = static_cast<std::size_t>(std::llround(p));
  if (std::abs(p - std::round(p)) > 1e-9 || p < 0 || j0 + 5 > ls.x_grid.count)
    throw GridError("x = 0 is not a node of the line grid");
  const std::size_t n = ls.x_grid.count, nt = ls.t_grid.count, nx = n - j0;

  FieldData fd;
  fd.x_grid = {0.0, dx, nx};
  fd.t_grid = {0.0, ls.t_grid.step, nt};
  fd.model = ls.params;
  fd.tolerances = tolerances;
  fd.u0.assign(ls.u_row(0) + j0, ls.u_row(0) + n);
  fd.v0.assign(ls.v_row(0) + j0, ls.v_row(0) + n);
  FieldData::Interior in;
  in.u.reserve(nx * nt);
  in.v.reserve(nx * nt);
  for (std::size_t it = 0; it < nt; ++it) {
    const cplx* u = ls.u_row(it) + j0;
    const cplx* v = ls.v_row(it) + j0;
    fd.g0.push_back(u[0]);
    fd.h0.push_back(v[0]);
    fd.g1.push_back(one_sided_derivative(u, dx));
    fd.h1.push_back(one_sided_derivative(v, dx));
    in.u.insert(in.u.end(), u, u + nx);
    in.v.insert(in.v.end(), v, v + nx);
  }
  fd.interior = std::move(in);
  check_field_data(fd);
  return fd;
}

double pde_residual(const LineSolution& ls, std::size_t stride) {
  const std::size_t n = ls.x_grid.count, nt = ls.t_grid.count;
  if (nt < 3 || n < 3) return 0.0;
  stride = std::max<std::size_t>(1, stride);
  const double dx = ls.x_grid.step, dt = ls.t_grid.step;
  const ModelParams& p = ls.params;
  double r = 0.0;
  for (std::size_t it = 1; it + 1 < nt; ++it) {
    const cplx* um = ls.u_row(it - 1);
    const cplx* uc = ls.u_row(it);
    const cplx* up = ls.u_row(it + 1);
    const cplx* vm = ls.v_row(it - 1);
    const cplx* vc = ls.v_row(it);
    const cplx* vp = ls.v_row(it + 1);
    for (std::size_t j = 1; j + 1 < n; j += stride) {
      auto q = [&](std::size_t i) { return std::norm(uc[i]) + std::norm(vc[i]); };
      const double ql = q(j - 1), qc = q(j), qr = q(j + 1);
      const cplx ru = I_unit * (up[j] - um[j]) / (2 * dt) +
                      (uc[j + 1] - 2.0 * uc[j] + uc[j - 1]) / (dx * dx) + p.delta * qc * uc[j] +
                      I_unit * p.gamma * (qr * uc[j + 1] - ql * uc[j - 1]) / (2 * dx);
      const cplx rv = I_unit * (vp[j] - vm[j]) / (2 * dt) +
                      (vc[j + 1] - 2.0 * vc[j] + vc[j - 1]) / (dx * dx) + p.delta * qc * vc[j] +
                      I_unit * p.gamma * (qr * vc[j + 1] - ql * vc[j - 1]) / (2 * dx);
      r = std::max({r, std::abs(ru), std::abs(rv)});
    }
  }
  return r;
}

std::vector<double> conserved_mass(const LineSolution& ls) {
  const std::size_t n = ls.x_grid.count;
  std::vector<double> m(ls.t_grid.count);
  for (std::size_t it = 0; it < ls.t_grid.count; ++it) {
    const cplx* u = ls.u_row(it);
    const cplx* v = ls.v_row(it);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::norm(u[j]) + std::norm(v[j]);
    if (!ls.periodic) s -= 0.5 * (std::norm(u[0]) + std::norm(v[0]) + std::norm(u[n - 1]) +
                                  std::norm(v[n - 1]));
    m[it] = s * ls.x_grid.step;
  }
  return m;
}

}  // namespace cmnls
