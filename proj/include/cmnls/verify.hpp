#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cmnls/config.hpp"
#include "cmnls/fields.hpp"
#include "cmnls/pde.hpp"

namespace cmnls {

enum class Relation { AtMost, AtLeast, Equal };

struct Metric {
  std::string suite;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::AtMost;
  bool pass = false;
  bool gating = true;  // informational metrics never fail a suite
  int criterion = 0;   // acceptance item the metric belongs to
  std::string note;
};

Metric make_metric(std::string suite, std::string name, double value, double tolerance,
                   Relation rel, int criterion, bool gating = true, std::string note = {});

struct VerifyContext {
  const FieldData& data;  // the consistent dataset under test
  const RunConfig& cfg;
  Exec exec = Exec::Parallel;
};

using SuiteFn = std::function<std::vector<Metric>(const VerifyContext&)>;

struct Suite {
  std::string name;
  int criterion;
  SuiteFn run;
};

// pde, eigen, symmetry, regions, algebra, asymptotics, global, residues,
// reconstruction (acceptance items 1..9 in that order).
const std::vector<Suite>& suites();
const Suite& find_suite(const std::string& name);  // throws ConfigError

bool suite_passed(const std::vector<Metric>& metrics);

// Independent classification from the exponent ordering: Re l1 < Re l2 and
// Re z1 > Re z2 decide the region directly.
Region brute_region(cplx lambda, const ModelParams& params);

// n points on each boundary arc inside |lambda| <= radius: the positive real
// and imaginary half-axes (Im k = 0, skipping the triple point) and the two
// upper branches of Re k = 0.
std::vector<cplx> boundary_arc_sample(double radius, std::size_t n, const ModelParams& params);

// g0 += amplitude * exp(-((t - T/2)/(0.1 T))^2); corner data untouched.
FieldData perturb_boundary(const FieldData& fd, double amplitude);

// (1/2) int_x^L (|u|^2 + |v|^2)(xi, t) dxi: the phase M_11 tends to at infinity.
double asymptotic_phase(const FieldSampler& f, double x, double t);

}  // namespace cmnls
