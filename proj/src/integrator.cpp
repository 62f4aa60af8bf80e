#include "cmnls/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "cmnls/errors.hpp"

namespace cmnls {

namespace {

constexpr double kMaxExponent = 700.0;

cplx phi_series(cplx z, int k) {
  // sum_{n>=0} z^n/(n+k)!, |z| < 1
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  cplx term = 1.0 / fact, sum = term;
  for (int n = 1; n < 24; ++n) {
    term *= z / static_cast<double>(n + k);
    sum += term;
  }
  return sum;
}

Matrix3C coupling(const FieldSampler& f, const SpectralPoint& sp, LegAxis axis, double fixed,
                  double s, bool adjugate) {
  Matrix3C B;
  if (axis == LegAxis::X)
    B = eval_V1(f.sample(s, fixed), sp);
  else
    B = eval_V2(f.sample(fixed, s), sp, f.params());
  return adjugate ? -transpose(B) : B;
}

double row_sum_norm(const Matrix3C& B) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    m = std::max(m, std::abs(B(i, 0)) + std::abs(B(i, 1)) + std::abs(B(i, 2)));
  return m;
}

// ETDRK4 coefficients for the three distinct diagonal rates 0, 2a, -2a.
struct EtdCoeffs {
  cplx E[3], E2[3], Q[3], f1[3], f2[3], f3[3];
};

EtdCoeffs make_coeffs(cplx a, double h, const std::array<bool, 3>& used) {
  EtdCoeffs c{};
  const cplx rates[3] = {0.0, 2.0 * a, -2.0 * a};
  for (int r = 0; r < 3; ++r) {
    if (!used[r]) continue;
    const cplx z = rates[r] * h;
    if (z.real() > kMaxExponent) throw OverflowError("integrator step exponent out of range");
    const cplx p1 = phi1(z), p2 = phi2(z), p3 = phi3(z);
    c.E[r] = std::exp(z);
    c.E2[r] = std::exp(0.5 * z);
    c.Q[r] = 0.5 * h * phi1(0.5 * z);
    c.f1[r] = h * (p1 - 3.0 * p2 + 4.0 * p3);
    c.f2[r] = h * (p2 - 2.0 * p3);
    c.f3[r] = h * (4.0 * p3 - p2);
  }
  return c;
}

// Index of the rate of entry (i,c): Lambda_i - Lambda_c in {0, 2, -2}.
inline int rate_index(int i, int c) {
  const double d = kLambdaDiag[i] - kLambdaDiag[c];
  return d == 0.0 ? 0 : (d > 0 ? 1 : 2);
}

}  // namespace

cplx phi1(cplx z) { return std::abs(z) < 1.0 ? phi_series(z, 1) : (std::exp(z) - 1.0) / z; }

cplx phi2(cplx z) {
  return std::abs(z) < 1.0 ? phi_series(z, 2) : (std::exp(z) - 1.0 - z) / (z * z);
}

cplx phi3(cplx z) {
  return std::abs(z) < 1.0 ? phi_series(z, 3) : (std::exp(z) - 1.0 - z - 0.5 * z * z) / (z * z * z);
}

cplx leg_rate(const SpectralPoint& sp, LegAxis axis, bool adjugate) {
  const cplx a = axis == LegAxis::X ? -I_unit * sp.k : 2.0 * I_unit * sp.k * sp.k;
  return adjugate ? -a : a;
}

double leg_growth(const SpectralPoint& sp, const Leg& leg, int column, bool adjugate) {
  const cplx a = leg_rate(sp, leg.axis, adjugate);
  const double len = leg.to - leg.from;
  double g = 0.0;
  for (int i = 0; i < 3; ++i)
    g = std::max(g, (a * (kLambdaDiag[i] - kLambdaDiag[column])).real() * len);
  return g;
}

Matrix3C propagate_leg(const FieldSampler& f, const SpectralPoint& sp, const Leg& leg,
                       const Matrix3C& init, const ColumnMask& cols, bool adjugate,
                       const StepControl& ctl) {
  if (leg.from == leg.to) return init;
  const double node = leg.axis == LegAxis::X ? f.node_spacing_x() : f.node_spacing_t();
  const double lo = std::min(leg.from, leg.to), hi = std::max(leg.from, leg.to);

  // sup ||B|| over the nodes of the leg and its end points
  double bmax = 0.0;
  {
    const auto first = static_cast<long>(std::ceil(lo / node - 1e-9));
    const auto last = static_cast<long>(std::floor(hi / node + 1e-9));
    const long count = last - first + 1;
    const long every = std::max<long>(1, count / 4000);
    for (long m = first; m <= last; m += every)
      bmax = std::max(bmax, row_sum_norm(coupling(f, sp, leg.axis, leg.fixed, m * node, adjugate)));
    bmax = std::max(bmax, row_sum_norm(coupling(f, sp, leg.axis, leg.fixed, lo, adjugate)));
    bmax = std::max(bmax, row_sum_norm(coupling(f, sp, leg.axis, leg.fixed, hi, adjugate)));
  }
  const double h_target = std::min(node, ctl.c_h / std::max(bmax, 1e-300)) /
                          static_cast<double>(std::max(1, ctl.refine));
  const double per_node = std::ceil(node / h_target - 1e-9);

  const cplx a = leg_rate(sp, leg.axis, adjugate);
  std::array<bool, 3> used{};
  for (int col = 0; col < 3; ++col)
    if (cols[col])
      for (int i = 0; i < 3; ++i) used[rate_index(i, col)] = true;
  const double dir = leg.to > leg.from ? 1.0 : -1.0;
  Matrix3C Y = init;
  Matrix3C Nu, Na, Nb, Nc, A, Bm, C;
  double s = leg.from;
  Matrix3C B0 = coupling(f, sp, leg.axis, leg.fixed, s, adjugate);

  while (dir * (leg.to - s) > 1e-14 * std::max(1.0, std::abs(leg.to))) {
    // next node boundary in the direction of travel
    double next = dir > 0 ? (std::floor(s / node + 1e-9) + 1.0) * node
                          : (std::ceil(s / node - 1e-9) - 1.0) * node;
    if (dir * (next - leg.to) > 0) next = leg.to;
    const double seg = next - s;
    const int nsub = std::max(1, static_cast<int>(std::ceil(std::abs(seg) / node * per_node - 1e-9)));
    const double h = seg / nsub;
    const EtdCoeffs c = make_coeffs(a, h, used);

    for (int step = 0; step < nsub; ++step) {
      const double s1 = step + 1 == nsub ? next : s + h;
      const Matrix3C Bh = coupling(f, sp, leg.axis, leg.fixed, s + 0.5 * h, adjugate);
      const Matrix3C B1 = coupling(f, sp, leg.axis, leg.fixed, s1, adjugate);
      for (int col = 0; col < 3; ++col) {
        if (!cols[col]) continue;
        auto mul = [&](const Matrix3C& B, const Matrix3C& X, Matrix3C& out) {
          for (int i = 0; i < 3; ++i)
            out(i, col) = B(i, 0) * X(0, col) + B(i, 1) * X(1, col) + B(i, 2) * X(2, col);
        };
        mul(B0, Y, Nu);
        for (int i = 0; i < 3; ++i) {
          const int r = rate_index(i, col);
          A(i, col) = c.E2[r] * Y(i, col) + c.Q[r] * Nu(i, col);
        }
        mul(Bh, A, Na);
        for (int i = 0; i < 3; ++i) {
          const int r = rate_index(i, col);
          Bm(i, col) = c.E2[r] * Y(i, col) + c.Q[r] * Na(i, col);
        }
        mul(Bh, Bm, Nb);
        for (int i = 0; i < 3; ++i) {
          const int r = rate_index(i, col);
          C(i, col) = c.E2[r] * A(i, col) + c.Q[r] * (2.0 * Nb(i, col) - Nu(i, col));
        }
        mul(B1, C, Nc);
        for (int i = 0; i < 3; ++i) {
          const int r = rate_index(i, col);
          Y(i, col) = c.E[r] * Y(i, col) + c.f1[r] * Nu(i, col) +
                      2.0 * c.f2[r] * (Na(i, col) + Nb(i, col)) + c.f3[r] * Nc(i, col);
        }
      }
      B0 = B1;
      s = s1;
    }
  }
  if (!all_finite(Y)) throw OverflowError("eigenfunction integration overflowed");
  return Y;
}

}  // namespace cmnls
