#include "cmnls/fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmnls/errors.hpp"

namespace cmnls {

namespace {

constexpr double kNodeSnap = 1e-10;

struct Weights {
  std::size_t base = 0;
  double w[4] = {0, 0, 0, 0};
  double dw[4] = {0, 0, 0, 0};
};

// 4-point Lagrange weights for position p (in units of the grid step) on a
// grid of n >= 4 nodes. The stencil is centred on the containing cell and
// shifted inwards at the edges.
Weights cubic_weights(double p, std::size_t n, double h) {
  Weights wt;
  const double pr = std::round(p);
  if (std::abs(p - pr) < kNodeSnap) p = pr;
  auto cell = static_cast<long>(std::floor(p));
  cell = std::clamp<long>(cell, 0, static_cast<long>(n) - 2);
  const long base = std::clamp<long>(cell - 1, 0, static_cast<long>(n) - 4);
  wt.base = static_cast<std::size_t>(base);
  const double s = p - static_cast<double>(base);
  const double a = s, b = s - 1.0, c = s - 2.0, d = s - 3.0;
  wt.w[0] = -b * c * d / 6.0;
  wt.w[1] = a * c * d / 2.0;
  wt.w[2] = -a * b * d / 2.0;
  wt.w[3] = a * b * c / 6.0;
  wt.dw[0] = -(c * d + b * d + b * c) / 6.0 / h;
  wt.dw[1] = (c * d + a * d + a * c) / 2.0 / h;
  wt.dw[2] = -(b * d + a * d + a * b) / 2.0 / h;
  wt.dw[3] = (b * c + a * c + a * b) / 6.0 / h;
  if (p == pr) {
    for (double& w : wt.w) w = 0.0;
    wt.w[static_cast<std::size_t>(pr) - wt.base] = 1.0;
  }
  return wt;
}

Weights grid_weights(const UniformGrid& g, double s) {
  if (g.count < 4) throw GridError("interpolation needs at least 4 grid nodes");
  return cubic_weights((s - g.start) / g.step, g.count, g.step);
}

cplx apply(const Weights& w, const std::vector<cplx>& f) {
  return w.w[0] * f[w.base] + w.w[1] * f[w.base + 1] + w.w[2] * f[w.base + 2] +
         w.w[3] * f[w.base + 3];
}

cplx apply_d(const Weights& w, const std::vector<cplx>& f) {
  return w.dw[0] * f[w.base] + w.dw[1] * f[w.base + 1] + w.dw[2] * f[w.base + 2] +
         w.dw[3] * f[w.base + 3];
}

void require_length(const std::vector<cplx>& v, std::size_t n, const char* name) {
  if (v.size() != n) {
    std::ostringstream os;
    os << "array " << name << " has length " << v.size() << ", grid has " << n;
    throw GridError(os.str());
  }
}

}  // namespace

UniformGrid uniform_grid_from_nodes(const std::vector<double>& nodes, double rel_tol) {
  if (nodes.size() < 2) throw GridError("grid needs at least two nodes");
  UniformGrid g{nodes.front(), (nodes.back() - nodes.front()) / double(nodes.size() - 1),
                nodes.size()};
  if (!(g.step > 0.0)) throw GridError("grid must be strictly increasing");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (std::abs(nodes[i] - g.at(i)) > rel_tol * std::max(1.0, std::abs(g.back()))) {
      std::ostringstream os;
      os << "non-uniform grid at node " << i << " (" << nodes[i] << ")";
      throw GridError(os.str());
    }
  }
  return g;
}

cplx one_sided_derivative(const cplx* f, double h) {
  return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
}

void check_field_data(const FieldData& fd) {
  fd.model.validate();
  const std::size_t nx = fd.x_grid.count, nt = fd.t_grid.count;
  if (nx < 5 || nt < 5) throw GridError("grids need at least 5 nodes");
  if (fd.x_grid.start != 0.0 || fd.t_grid.start != 0.0)
    throw GridError("x and t grids must start at 0");
  require_length(fd.u0, nx, "u0");
  require_length(fd.v0, nx, "v0");
  require_length(fd.g0, nt, "g0");
  require_length(fd.h0, nt, "h0");
  require_length(fd.g1, nt, "g1");
  require_length(fd.h1, nt, "h1");
  if (fd.interior) {
    require_length(fd.interior->u, nx * nt, "interior.u");
    require_length(fd.interior->v, nx * nt, "interior.v");
  }

  const double tol = fd.tolerances.corner;
  auto corner = [&](cplx a, cplx b, const char* where) {
    const double m = std::abs(a - b);
    if (!(m <= tol)) {
      std::ostringstream os;
      os << "corner compatibility violated at " << where << ": mismatch " << m << " > " << tol;
      throw CornerMismatchError(os.str(), where, m);
    }
  };
  corner(fd.u0[0], fd.g0[0], "u0(0)=g0(0)");
  corner(fd.v0[0], fd.h0[0], "v0(0)=h0(0)");
  corner(one_sided_derivative(fd.u0.data(), fd.x_grid.step), fd.g1[0], "u0'(0)=g1(0)");
  corner(one_sided_derivative(fd.v0.data(), fd.x_grid.step), fd.h1[0], "v0'(0)=h1(0)");

  const std::size_t first = nx - std::max<std::size_t>(1, nx / 10);
  for (std::size_t i = first; i < nx; ++i) {
    const double m = std::max(std::abs(fd.u0[i]), std::abs(fd.v0[i]));
    if (!(m <= fd.tolerances.decay)) {
      std::ostringstream os;
      os << "initial data does not decay: |q| = " << m << " at x = " << fd.x_grid.at(i);
      throw DecayViolationError(os.str(), fd.x_grid.at(i), m);
    }
  }
}

FieldData build_field_data(const RawFieldInput& raw, const ModelParams& params,
                           const FieldTolerances& tolerances) {
  FieldData fd;
  fd.x_grid = uniform_grid_from_nodes(raw.x_nodes);
  fd.t_grid = uniform_grid_from_nodes(raw.t_nodes);
  fd.x_grid.start = 0.0;
  fd.t_grid.start = 0.0;
  if (std::abs(raw.x_nodes.front()) > 1e-12 || std::abs(raw.t_nodes.front()) > 1e-12)
    throw GridError("x and t grids must start at 0");
  fd.u0 = raw.u0;
  fd.v0 = raw.v0;
  fd.g0 = raw.g0;
  fd.h0 = raw.h0;
  fd.g1 = raw.g1;
  fd.h1 = raw.h1;
  fd.interior = raw.interior;
  fd.model = params;
  fd.tolerances = tolerances;
  check_field_data(fd);
  return fd;
}

bool FieldData::contains(double x, double t) const {
  const double ex = 1e-12 * std::max(1.0, x_max()), et = 1e-12 * std::max(1.0, t_max());
  return x >= -ex && x <= x_max() + ex && t >= -et && t <= t_max() + et;
}

FieldPoint FieldData::sample(double x, double t) const { return sample_fields(*this, x, t); }

std::unique_ptr<FieldSampler> FieldData::coarse_copy() const {
  const std::size_t nx = x_grid.count, nt = t_grid.count;
  if ((nx - 1) % 2 || (nt - 1) % 2 || nx < 9 || nt < 9) return nullptr;
  return std::make_unique<FieldData>(coarsen(*this, 2, 2));
}

FieldPoint sample_fields(const FieldData& fd, double x, double t) {
  if (!fd.contains(x, t)) {
    std::ostringstream os;
    os << "sample point (" << x << ", " << t << ") outside [0," << fd.x_max() << "]x[0,"
       << fd.t_max() << "]";
    throw OutOfDomainError(os.str());
  }
  FieldPoint fp{};
  const double ex = 1e-12 * std::max(1.0, fd.x_max());
  const double et = 1e-12 * std::max(1.0, fd.t_max());
  if (std::abs(x) <= ex) {
    const Weights w = grid_weights(fd.t_grid, t);
    fp.u = apply(w, fd.g0);
    fp.v = apply(w, fd.h0);
    fp.ux = apply(w, fd.g1);
    fp.vx = apply(w, fd.h1);
    return fp;
  }
  const Weights wx = grid_weights(fd.x_grid, x);
  if (std::abs(t) <= et) {
    fp.u = apply(wx, fd.u0);
    fp.v = apply(wx, fd.v0);
    fp.ux = apply_d(wx, fd.u0);
    fp.vx = apply_d(wx, fd.v0);
    return fp;
  }
  if (!fd.interior) throw InteriorMissingError("interior data required off the axes");
  const Weights wt = grid_weights(fd.t_grid, t);
  const std::size_t nx = fd.x_grid.count;
  for (int r = 0; r < 4; ++r) {
    const double tw = wt.w[r];
    if (tw == 0.0) continue;
    const std::size_t row = (wt.base + r) * nx + wx.base;
    const cplx* u = fd.interior->u.data() + row;
    const cplx* v = fd.interior->v.data() + row;
    cplx su{}, sv{}, sux{}, svx{};
    for (int c = 0; c < 4; ++c) {
      su += wx.w[c] * u[c];
      sv += wx.w[c] * v[c];
      sux += wx.dw[c] * u[c];
      svx += wx.dw[c] * v[c];
    }
    fp.u += tw * su;
    fp.v += tw * sv;
    fp.ux += tw * sux;
    fp.vx += tw * svx;
  }
  return fp;
}

PlaneWave::PlaneWave(double a, double kappa, const ModelParams& params, Channel channel,
                     double x_extent, double t_extent, double spacing)
    : a_(a),
      kappa_(kappa),
      omega_(kappa * kappa - params.delta * a * a + params.gamma * kappa * a * a),
      params_(params),
      channel_(channel),
      x_extent_(x_extent),
      t_extent_(t_extent),
      spacing_(spacing) {}

FieldPoint PlaneWave::sample(double x, double t) const {
  const cplx w = a_ * std::exp(I_unit * (kappa_ * x - omega_ * t));
  const cplx wx = I_unit * kappa_ * w;
  if (channel_ == Channel::U) return {w, 0.0, wx, 0.0};
  return {0.0, w, 0.0, wx};
}

PlaneWave plane_wave_solution(double a, double kappa, const ModelParams& params,
                              PlaneWave::Channel channel) {
  return PlaneWave(a, kappa, params, channel);
}

DecayReport decay_report(const FieldData& fd) {
  DecayReport r;
  const std::size_t n = fd.x_grid.count;
  auto env = [&](std::size_t i) { return std::max(std::abs(fd.u0[i]), std::abs(fd.v0[i])); };
  for (double frac : {0.1, 0.05, 0.025}) {
    const std::size_t first = n - std::max<std::size_t>(1, static_cast<std::size_t>(frac * n));
    double m = 0.0;
    for (std::size_t i = first; i < n; ++i) m = std::max(m, env(i));
    r.window_fractions.push_back(frac);
    r.tail_norms.push_back(m);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t i = n / 2; i < n; ++i) {
    const double e = env(i);
    if (e < 1e-300) continue;
    const double x = fd.x_grid.at(i), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) {
    const double den = cnt * sxx - sx * sx;
    r.fitted_rate = den > 0 ? -(cnt * sxy - sx * sy) / den : 0.0;
  } else {
    r.zero_tail = true;
  }
  r.decays = r.tail_norms.front() <= fd.tolerances.decay;
  return r;
}

FieldData coarsen(const FieldData& fd, std::size_t fx, std::size_t ft) {
  const std::size_t nx = fd.x_grid.count, nt = fd.t_grid.count;
  if (fx == 0 || ft == 0 || (nx - 1) % fx || (nt - 1) % ft)
    throw GridError("coarsening factor does not divide the grid");
  FieldData c = fd;
  c.x_grid = {0.0, fd.x_grid.step * fx, (nx - 1) / fx + 1};
  c.t_grid = {0.0, fd.t_grid.step * ft, (nt - 1) / ft + 1};
  auto pick = [](const std::vector<cplx>& v, std::size_t f) {
    std::vector<cplx> r;
    for (std::size_t i = 0; i < v.size(); i += f) r.push_back(v[i]);
    return r;
  };
  c.u0 = pick(fd.u0, fx);
  c.v0 = pick(fd.v0, fx);
  c.g0 = pick(fd.g0, ft);
  c.h0 = pick(fd.h0, ft);
  c.g1 = pick(fd.g1, ft);
  c.h1 = pick(fd.h1, ft);
  if (fd.interior) {
    FieldData::Interior in;
    for (std::size_t it = 0; it < nt; it += ft)
      for (std::size_t ix = 0; ix < nx; ix += fx) {
        in.u.push_back(fd.interior->u[it * nx + ix]);
        in.v.push_back(fd.interior->v[it * nx + ix]);
      }
    c.interior = std::move(in);
  }
  return c;
}

FieldData tabulate(const FieldSampler& src, const UniformGrid& xg, const UniformGrid& tg,
                   bool with_interior, const FieldTolerances& tolerances) {
  FieldData fd;
  fd.x_grid = xg;
  fd.t_grid = tg;
  fd.model = src.params();
  fd.tolerances = tolerances;
  for (std::size_t i = 0; i < xg.count; ++i) {
    const FieldPoint p = src.sample(xg.at(i), 0.0);
    fd.u0.push_back(p.u);
    fd.v0.push_back(p.v);
  }
  for (std::size_t i = 0; i < tg.count; ++i) {
    const FieldPoint p = src.sample(0.0, tg.at(i));
    fd.g0.push_back(p.u);
    fd.h0.push_back(p.v);
    fd.g1.push_back(p.ux);
    fd.h1.push_back(p.vx);
  }
  if (with_interior) {
    FieldData::Interior in;
    in.u.reserve(xg.count * tg.count);
    in.v.reserve(xg.count * tg.count);
    for (std::size_t it = 0; it < tg.count; ++it)
      for (std::size_t ix = 0; ix < xg.count; ++ix) {
        const FieldPoint p = src.sample(xg.at(ix), tg.at(it));
        in.u.push_back(p.u);
        in.v.push_back(p.v);
      }
    fd.interior = std::move(in);
  }
  return fd;
}

LaxStencil make_lax_stencil(const FieldSampler& src, double x, double t, double h) {
  if (!(h > 0.0)) throw OutOfDomainError("stencil spacing must be positive");
  for (auto [px, pt] : {std::pair{x - h, t}, std::pair{x + h, t}, std::pair{x, t - h},
                        std::pair{x, t + h}})
    if (!src.contains(px, pt)) throw OutOfDomainError("Lax stencil out of range");
  LaxStencil st;
  st.x = x;
  st.t = t;
  st.hx = st.ht = h;
  st.center = src.sample(x, t);
  st.x_minus = src.sample(x - h, t);
  st.x_plus = src.sample(x + h, t);
  st.t_minus = src.sample(x, t - h);
  st.t_plus = src.sample(x, t + h);
  return st;
}

}  // namespace cmnls
