#pragma once

#include <array>

#include "cmnls/fields.hpp"

namespace cmnls {

enum class LegAxis { X, T };

// Straight path segment: an x-leg runs from `from` to `to` at t = fixed,
// a t-leg at x = fixed.
struct Leg {
  LegAxis axis;
  double fixed;
  double from;
  double to;
};

using ColumnMask = std::array<bool, 3>;
inline constexpr ColumnMask kAllColumns{true, true, true};

struct StepControl {
  double c_h = 0.1;  // h <= c_h / sup||B|| on the leg
  int refine = 1;    // extra subdivision factor (2 for the halved-step estimate)
};

// Diagonal rate a of the commutator term on a leg: the column-c ODE reads
// y_i' = a (Lambda_i - Lambda_c) y_i + (B y)_i.
cplx leg_rate(const SpectralPoint& sp, LegAxis axis, bool adjugate);

// Largest e-folding a column can pick up on the leg from its diagonal rates:
// sum over i of max(0, Re(a (Lambda_i - Lambda_c)) * (to - from)).
double leg_growth(const SpectralPoint& sp, const Leg& leg, int column, bool adjugate);

// phi_k(z) = sum_n z^n / (n+k)!, k = 1..3.
cplx phi1(cplx z);
cplx phi2(cplx z);
cplx phi3(cplx z);

// Integrates the conjugated Lax system (or its adjugate) along one leg with
// exponential time differencing RK4: the diagonal e^{a(Lambda_i - Lambda_c)s}
// factors are applied exactly and the field coupling B(s) is stepped
// explicitly. Steps never straddle a data node. Only masked columns are
// advanced; the others are returned unchanged.
Matrix3C propagate_leg(const FieldSampler& f, const SpectralPoint& sp, const Leg& leg,
                       const Matrix3C& init, const ColumnMask& cols, bool adjugate,
                       const StepControl& ctl = {});

}  // namespace cmnls
