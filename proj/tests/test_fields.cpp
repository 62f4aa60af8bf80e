#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cmnls/errors.hpp"
#include "cmnls/field_io.hpp"
#include "cmnls/fields.hpp"
#include "support.hpp"

using namespace cmnls;

namespace {

// Cubic in x and in t separately, so 4-point Lagrange reproduces it exactly.
class Bicubic : public FieldSampler {
 public:
  static cplx f(double x) { return {1 + x - 0.5 * x * x + 0.25 * x * x * x, 0.3 * x * x}; }
  static cplx df(double x) { return {1 - x + 0.75 * x * x, 0.6 * x}; }
  static cplx g(double t) { return {1 - t * t * t, 2 * t}; }
  FieldPoint sample(double x, double t) const override {
    return {f(x) * g(t), I_unit * f(x) * g(t), df(x) * g(t), I_unit * df(x) * g(t)};
  }
  bool contains(double, double) const override { return true; }
  double x_max() const override { return 2; }
  double t_max() const override { return 1; }
  double node_spacing_x() const override { return 0.1; }
  double node_spacing_t() const override { return 0.1; }
  const ModelParams& params() const override { return p_; }

 private:
  ModelParams p_;
};

FieldData bicubic_table() {
  return tabulate(Bicubic{}, {0, 0.1, 21}, {0, 0.1, 11}, true, {1e-6, 1e300});
}

void expect_same(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].real(), b[i].real());
    EXPECT_EQ(a[i].imag(), b[i].imag());
  }
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST(Grid, UniformNodes) {
  const UniformGrid g = uniform_grid_from_nodes({0, 0.5, 1.0, 1.5});
  EXPECT_EQ(g.count, 4u);
  EXPECT_DOUBLE_EQ(g.step, 0.5);
  EXPECT_THROW(uniform_grid_from_nodes({0, 0.5, 1.1, 1.5}), GridError);
  EXPECT_THROW(uniform_grid_from_nodes({0, 0.5, 0.4}), GridError);
  EXPECT_THROW(uniform_grid_from_nodes({0}), GridError);
}

TEST(Interpolation, ReproducesCubicsOffGrid) {
  const FieldData fd = bicubic_table();
  EXPECT_NO_THROW(check_field_data(fd));
  const Bicubic exact;
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ux(0, 2), ut(0, 1);
  for (int n = 0; n < 500; ++n) {
    const double x = ux(gen), t = n % 5 == 0 ? 0.0 : ut(gen);
    const FieldPoint a = fd.sample(x, t), b = exact.sample(x, t);
    EXPECT_LT(std::abs(a.u - b.u), 1e-12);
    EXPECT_LT(std::abs(a.v - b.v), 1e-12);
    EXPECT_LT(std::abs(a.ux - b.ux), 1e-11);
    EXPECT_LT(std::abs(a.vx - b.vx), 1e-11);
  }
}

TEST(Interpolation, BoundaryTraceAtXZero) {
  const FieldData fd = bicubic_table();
  const FieldPoint p = fd.sample(0.0, 0.37);
  EXPECT_LT(std::abs(p.u - Bicubic::g(0.37)), 1e-13);
  EXPECT_LT(std::abs(p.ux - Bicubic::g(0.37)), 1e-13);
}

TEST(Interpolation, OutsideAndMissingInterior) {
  FieldData fd = bicubic_table();
  EXPECT_THROW(fd.sample(2.5, 0.5), OutOfDomainError);
  EXPECT_THROW(fd.sample(1.0, -0.1), OutOfDomainError);
  fd.interior.reset();
  EXPECT_NO_THROW(fd.sample(1.0, 0.0));
  EXPECT_THROW(fd.sample(1.0, 0.5), InteriorMissingError);
}

TEST(OneSidedDerivative, ExactOnQuartic) {
  std::vector<cplx> f;
  const double h = 0.1;
  for (int i = 0; i < 5; ++i) {
    const double x = i * h;
    f.push_back({2 - 3 * x + x * x * x * x, x * x});
  }
  EXPECT_LT(std::abs(one_sided_derivative(f.data(), h) - (-3.0)), 1e-12);
}

TEST(Validation, CornerMismatch) {
  FieldData fd = bicubic_table();
  fd.g0[0] += 1e-3;
  try {
    check_field_data(fd);
    FAIL() << "corner mismatch not detected";
  } catch (const CornerMismatchError& e) {
    EXPECT_EQ(e.location(), "u0(0)=g0(0)");
    EXPECT_NEAR(e.magnitude(), 1e-3, 1e-12);
  }
  fd = bicubic_table();
  fd.h1[0] += 1e-3;
  EXPECT_THROW(check_field_data(fd), CornerMismatchError);
}

TEST(Validation, DecayAndLengths) {
  FieldData fd = bicubic_table();
  fd.tolerances.decay = 1e-6;
  EXPECT_THROW(check_field_data(fd), DecayViolationError);
  fd = bicubic_table();
  fd.v0.pop_back();
  EXPECT_THROW(check_field_data(fd), GridError);
}

TEST(Validation, DecayReport) {
  const FieldData& fd = test::coarse_gaussian();
  const DecayReport r = decay_report(fd);
  EXPECT_TRUE(r.decays);
  EXPECT_EQ(r.tail_norms.size(), 3u);
  FieldData zero = test::zero_dataset();
  EXPECT_TRUE(decay_report(zero).zero_tail);
}

TEST(Io, Base64RoundTripProperty) {
  std::mt19937_64 g(12);
  for (std::size_t n : {0, 1, 2, 3, 17, 1000}) {
    std::vector<cplx> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(test::random_complex(g, 1e3));
    expect_same(decode_base64(encode_base64(v)), v);
  }
  EXPECT_THROW(decode_base64("abc"), SchemaError);
  EXPECT_THROW(decode_base64("AAAA"), SchemaError);
}

TEST(Io, JsonRoundTripBitExact) {
  const FieldData& fd = test::coarse_gaussian();
  for (ComplexEncoding enc : {ComplexEncoding::Base64, ComplexEncoding::Pairs}) {
    const FieldData back = field_data_from_json(field_data_to_json(fd, enc));
    expect_same(back.u0, fd.u0);
    expect_same(back.h1, fd.h1);
    ASSERT_TRUE(back.interior);
    expect_same(back.interior->v, fd.interior->v);
    EXPECT_EQ(back.x_grid.count, fd.x_grid.count);
    EXPECT_EQ(back.t_grid.step, fd.t_grid.step);
    EXPECT_EQ(back.model.epsilon, fd.model.epsilon);
    EXPECT_EQ(back.metadata, fd.metadata);
  }
}

TEST(Io, FileRoundTripAndCorruption) {
  const std::string path = temp_path("cmnls_test_fields.json");
  save_field_data(test::zero_dataset(), path);
  EXPECT_EQ(load_field_data(path).u0.size(), 101u);
  {
    std::ofstream out(path);
    out << "{\"format\":\"cmnls-fielddata\",\"version\":1,\"params\":";
  }
  EXPECT_THROW(load_field_data(path), SchemaError);
  {
    std::ofstream out(path);
    out << "{\"format\":\"something-else\",\"version\":1}";
  }
  EXPECT_THROW(load_field_data(path), SchemaError);
  std::remove(path.c_str());
}

TEST(PlaneWave, DispersionRelation) {
  const ModelParams p;
  EXPECT_NEAR(plane_wave_solution(0.3, 1.0, p).omega(), 0.91, 1e-15);
  EXPECT_NEAR(plane_wave_solution(0.5, -2.0, ModelParams{1.0, 3.0, 1}).omega(),
              4 - 0.25 - 1.5, 1e-15);
  const auto w = plane_wave_solution(0.3, 1.0, p, PlaneWave::Channel::V).sample(0.4, 0.2);
  EXPECT_EQ(w.u, 0.0);
  EXPECT_NEAR(std::abs(w.v), 0.3, 1e-15);
}

TEST(Coarsen, KeepsEveryOtherNode) {
  const FieldData& fd = test::coarse_gaussian();
  const FieldData c = coarsen(fd, 2, 2);
  EXPECT_EQ(c.x_grid.count, (fd.x_grid.count - 1) / 2 + 1);
  EXPECT_DOUBLE_EQ(c.t_grid.step, 2 * fd.t_grid.step);
  EXPECT_EQ(c.u0[7], fd.u0[14]);
  EXPECT_EQ(c.interior->u[3 * c.x_grid.count + 5], fd.interior->u[6 * fd.x_grid.count + 10]);
  EXPECT_THROW(coarsen(fd, 3, 7), GridError);
  EXPECT_NE(fd.coarse_copy(), nullptr);
}

TEST(Superposition, InterpolationIsLinear) {
  // sampling commutes with adding tables node by node
  const FieldData a = bicubic_table();
  FieldData b = test::coarse_gaussian();
  b = tabulate(b, {0, 0.1, 21}, {0, 0.1, 11}, true, {1e-6, 1e300});
  FieldData s = a;
  for (std::size_t i = 0; i < s.interior->u.size(); ++i) s.interior->u[i] += b.interior->u[i];
  std::mt19937_64 g(13);
  std::uniform_real_distribution<double> ux(0.05, 1.95), ut(0.05, 0.95);
  for (int n = 0; n < 100; ++n) {
    const double x = ux(g), t = ut(g);
    EXPECT_LT(std::abs(s.sample(x, t).u - a.sample(x, t).u - b.sample(x, t).u), 1e-13);
  }
}

TEST(Stencil, RejectsOutOfRange) {
  const FieldData fd = bicubic_table();
  EXPECT_THROW(make_lax_stencil(fd, 0.05, 0.5, 0.1), OutOfDomainError);
  EXPECT_THROW(make_lax_stencil(fd, 1.0, 0.5, 0.0), OutOfDomainError);
  EXPECT_NO_THROW(make_lax_stencil(fd, 1.0, 0.5, 0.1));
}
