#include "memheat/error.hpp"
#include "memheat/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace memheat;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
Field sample(const Mesh& m, F f) {
  Field u(m, 1);
  for (int j = 0; j < m.interior(1); ++j) {
    for (int i = 0; i < m.interior(0); ++i) {
      const double x = m.coord(0, i);
      const double y = m.dim == 2 ? m.coord(1, j) : 0.0;
      u.at(static_cast<std::size_t>(j) * m.interior(0) + i, 0) = f(x, y);
    }
  }
  return u;
}

double sine_lap_error(int cells) {
  const Mesh m = build_mesh(1, 1.0, cells);
  const Field u = sample(m, [](double x, double) { return std::sin(kPi * x); });
  const Field l = apply_laplacian(u);
  double err = 0.0;
  for (int i = 0; i < m.interior(0); ++i) {
    err = std::max(err, std::abs(l.values[i] + kPi * kPi * std::sin(kPi * m.coord(0, i))));
  }
  return err;
}

}  // namespace

TEST(Mesh, Build1D) {
  const Mesh m = build_mesh(1, 1.0, 8);
  EXPECT_DOUBLE_EQ(m.h[0], 0.125);
  EXPECT_EQ(m.node_count(), 7u);
  EXPECT_EQ(m.edge_count(), 8u);
}

TEST(Mesh, Build2D) {
  const Mesh m = build_mesh(2, 1.0, 8);
  EXPECT_EQ(m.node_count(), 49u);
  EXPECT_EQ(m.edge_count(), 2u * 8u * 7u);
}

TEST(Mesh, TooCoarse) {
  try {
    build_mesh(1, 1.0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooCoarse);
  }
  EXPECT_THROW(build_mesh(3, 1.0, 8), Error);
  EXPECT_THROW(build_mesh(1, 0.0, 8), Error);
}

TEST(Laplacian, ExactOnQuadratic) {
  const Mesh m = build_mesh(1, 1.0, 16);
  const Field l = apply_laplacian(sample(m, [](double x, double) { return x * (1 - x); }));
  for (double v : l.values) EXPECT_NEAR(v, -2.0, 1e-12);
}

TEST(Laplacian, ExactOnQuadratic2D) {
  const Mesh m = build_mesh(2, 1.0, 10);
  const Field l =
      apply_laplacian(sample(m, [](double x, double y) { return x * (1 - x) * y * (1 - y); }));
  for (int j = 0; j < m.interior(1); ++j) {
    for (int i = 0; i < m.interior(0); ++i) {
      const double x = m.coord(0, i), y = m.coord(1, j);
      EXPECT_NEAR(l.values[j * m.interior(0) + i], -2 * y * (1 - y) - 2 * x * (1 - x), 1e-12);
    }
  }
}

TEST(Laplacian, ZeroField) {
  const Mesh m = build_mesh(2, 1.0, 6);
  for (double v : apply_laplacian(Field(m, 2)).values) EXPECT_EQ(v, 0.0);
}

TEST(Laplacian, SecondOrderOnSine) {
  const double e1 = sine_lap_error(128);
  const double e2 = sine_lap_error(256);
  EXPECT_LE(e2, 1e-3);
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
}

TEST(GradSq, Quadratic) {
  // int_0^1 (1 - 2x)^2 dx = 1/3
  for (int cells : {64, 128}) {
    const Mesh m = build_mesh(1, 1.0, cells);
    const double g = grad_sq_norm(sample(m, [](double x, double) { return x * (1 - x); }));
    EXPECT_NEAR(g, 1.0 / 3.0, 2.0 * m.h[0] * m.h[0]);
  }
}

TEST(GradSq, SineAndGreenIdentity) {
  const Mesh m = build_mesh(1, 1.0, 256);
  const Field u = sample(m, [](double x, double) { return std::sin(kPi * x); });
  EXPECT_NEAR(grad_sq_norm(u), kPi * kPi / 2.0, 1e-4);
  EXPECT_NEAR(grad_sq_norm(u), -inner(apply_laplacian(u), u), 1e-12);
  EXPECT_EQ(grad_sq_norm(Field(m, 1)), 0.0);
}

TEST(GradSq, GreenIdentity2DTwoComponents) {
  const Mesh m = build_mesh(2, {1.0, 2.0}, {8, 12});
  const Field u = make_initial_field(m, 2, parse_initial_condition("random(5)"));
  EXPECT_NEAR(grad_sq_norm(u), -inner(apply_laplacian(u), u), 1e-10 * grad_sq_norm(u));
}

TEST(NormPow, Values) {
  const Mesh m = build_mesh(1, 1.0, 64);
  Field two(m, 1);
  for (double& v : two.values) v = 2.0;
  // interior nodes only: (cells - 1) h * 2^3
  EXPECT_NEAR(l2_norm_pow(two, 3.0), 8.0 * (1.0 - m.h[0]), 1e-12);
  EXPECT_EQ(l2_norm_pow(Field(m, 1), 4.0), 0.0);
  const Field q = sample(m, [](double x, double) { return x * (1 - x); });
  EXPECT_NEAR(l2_norm_pow(q, 2.0), 1.0 / 30.0, m.h[0] * m.h[0]);
}

TEST(NormPow, EuclideanAcrossComponents) {
  const Mesh m = build_mesh(1, 1.0, 8);
  Field v(m, 2);
  for (std::size_t n = 0; n < v.nodes(); ++n) {
    v.at(n, 0) = 3.0;
    v.at(n, 1) = 4.0;
  }
  EXPECT_NEAR(l2_norm_pow(v, 3.0), 125.0 * 7 * m.h[0], 1e-12);
}

TEST(Admissibility, G3) {
  EXPECT_TRUE(g3_admissible(2.0, 1));
  EXPECT_TRUE(g3_admissible(7.0, 2));
  EXPECT_FALSE(g3_admissible(1.5, 1));
}

TEST(InitialCondition, ParseAndDeterminism) {
  EXPECT_EQ(parse_initial_condition("sine").kind, InitialCondition::Kind::Sine);
  EXPECT_EQ(parse_initial_condition("random(42)").seed, 42u);
  EXPECT_THROW(parse_initial_condition("wave"), Error);
  const Mesh m = build_mesh(1, 1.0, 16);
  const auto ic = parse_initial_condition("random(9)");
  EXPECT_EQ(make_initial_field(m, 1, ic).values, make_initial_field(m, 1, ic).values);
}

TEST(FieldOps, ShapeMismatch) {
  const Field a(build_mesh(1, 1.0, 8), 1);
  const Field b(build_mesh(1, 1.0, 16), 1);
  EXPECT_THROW(a + b, Error);
}
