#pragma once

#include <span>
#include <vector>

#include "cmnls/fields.hpp"

namespace cmnls {

enum class Exec { Serial, Parallel };

struct SolverOptions {
  double c_stab = 0.2;          // dt <= c_stab dx^2
  std::size_t store_stride = 1; // time steps between stored rows
  bool periodic = false;        // periodic stencil (plane-wave checks only)
  double growth_limit = 10.0;   // abort when ||q||_2 grows past this factor
  Exec exec = Exec::Parallel;
};

struct LineSolution {
  UniformGrid x_grid;  // [-L, L], or [0, P) when periodic
  UniformGrid t_grid;  // stored times
  std::vector<cplx> u, v;  // row-major, it * nx + ix
  std::vector<double> mass;
  ModelParams params;
  bool periodic = false;
  double dt = 0.0;  // integration step actually used

  const cplx* u_row(std::size_t it) const { return u.data() + it * x_grid.count; }
  const cplx* v_row(std::size_t it) const { return v.data() + it * x_grid.count; }
};

// Right-hand side of the method of lines: u_t = i u_xx + i delta Q u - gamma d_x(Q u)
// with 4th-order centred differences and the skew form
// d_x(Q u) ~ (D(Qu) + Q Du + u DQ)/2, which conserves the discrete mass.
// Values beyond the ends are zero unless periodic.
void cmnls_rhs(std::span<const cplx> u, std::span<const cplx> v, std::span<cplx> du,
               std::span<cplx> dv, double dx, const ModelParams& params, bool periodic,
               Exec exec);

LineSolution solve_line_ivp(std::span<const cplx> u0, std::span<const cplx> v0,
                            const UniformGrid& x_grid, double T, double dt,
                            const ModelParams& params, const SolverOptions& opts = {});

FieldData extract_halfline_data(const LineSolution& ls, const FieldTolerances& tolerances = {});

// Max-norm residual of both equations with second-order centred differences,
// evaluated at every stride-th interior node of every interior stored row.
double pde_residual(const LineSolution& ls, std::size_t stride = 1);

std::vector<double> conserved_mass(const LineSolution& ls);

}  // namespace cmnls
