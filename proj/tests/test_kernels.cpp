#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "wiener/kernels.hpp"

using namespace wiener;

namespace {

std::shared_ptr<const ConeContext> half3() {
  static auto ctx = make_context(DomainSpec{3, Shape::half_sphere, std::numbers::pi / 2}, PotentialSpec{});
  return ctx;
}

Point cart(double x, double y, double z) { return from_cartesian({x, y, z}); }

Point random_interior(std::mt19937_64& rng, double rlo, double rhi) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> lr(std::log(rlo), std::log(rhi));
  std::vector<double> u(3);
  double l;
  do {
    for (double& x : u) x = g(rng);
    l = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  } while (l == 0.0);
  const double r = std::exp(lr(rng));
  for (double& x : u) x *= r / l;
  u[2] = std::abs(u[2]) + 1e-6 * r;
  return from_cartesian(u);
}

}  // namespace

TEST(Oracle, AxisPairValue) {
  EXPECT_NEAR(halfspace_green_oracle(cart(0, 0, 1), cart(0, 0, 3)), 1.0 / (16.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(1.0 / (16.0 * std::numbers::pi), 0.0198944, 1e-7);
}

TEST(Oracle, DiagonalAndBoundary) {
  EXPECT_TRUE(std::isinf(halfspace_green_oracle(cart(0, 0, 1), cart(0, 0, 1))));
  EXPECT_EQ(halfspace_green_oracle(cart(0.5, 0, 1), cart(2, 0, 0)), 0.0);
  EXPECT_THROW(halfspace_green_oracle(cart(0, 0, 1), cart(0, 0, -1)), DomainError);
}

TEST(Oracle, MatchesImageFormulaDirectly) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Point P = random_interior(rng, 0.1, 10), Q = random_interior(rng, 0.1, 10);
    const auto x = to_cartesian(P), y = to_cartesian(Q);
    const std::vector<double> ys = {y[0], y[1], -y[2]};
    const double direct = (1.0 / distance(x, y) - 1.0 / distance(x, ys)) / (4.0 * std::numbers::pi);
    EXPECT_NEAR(halfspace_green_oracle(P, Q), direct, 1e-9 * std::abs(direct) + 1e-14);
  }
}

TEST(Martin, InfinityAndOrigin) {
  const auto ctx = half3();
  const Point P = axis_point(3, 2.0);
  EXPECT_NEAR(martin_infinity(*ctx, P), 1.381977, 1e-5);
  EXPECT_NEAR(martin_origin(*ctx, P), 0.172747, 1e-6);
  EXPECT_NEAR(martin_infinity(*ctx, axis_point(3, 1.0)), std::sqrt(6.0 / (4.0 * std::numbers::pi)), 1e-9);
  Point B;
  B.r = 2.0;
  B.theta = {std::numbers::pi / 2, 0.3};
  EXPECT_EQ(martin_infinity(*ctx, B), 0.0);
  EXPECT_EQ(martin_origin(*ctx, B), 0.0);
  double prev = 1e300;
  for (double r = 0.5; r < 1e3; r *= 1.7) {
    const double v = martin_origin(*ctx, axis_point(3, r));
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Surrogate, SymmetricAndNonnegative) {
  KernelModel m(half3());
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const Point P = random_interior(rng, 0.05, 50), Q = random_interior(rng, 0.05, 50);
    const double a = green(m, P, Q), b = green(m, Q, P);
    EXPECT_NEAR(a, b, 1e-13 * std::max(1.0, std::abs(a)));
    EXPECT_GE(a, 0.0);
  }
}

TEST(Surrogate, ExactProductWhenSeparated) {
  KernelModel m(half3());
  m.c_mid = 1.7;
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 100) {
    const Point P = random_interior(rng, 0.01, 100), Q = random_interior(rng, 0.01, 100);
    if (!radially_separated(P.r, Q.r)) continue;
    ++checked;
    const double lo = std::min(P.r, Q.r), hi = std::max(P.r, Q.r);
    const double c = std::sqrt(6.0 / (4.0 * std::numbers::pi));
    const double prod = lo / (hi * hi) * c * std::cos(P.colatitude()) * c * std::cos(Q.colatitude());
    EXPECT_NEAR(green(m, P, Q), 1.7 * prod, 1e-6 * 1.7 * prod);
    const auto [l, u] = green_bounds(m, P, Q);
    EXPECT_LE(l, green(m, P, Q));
    EXPECT_GE(u, green(m, P, Q));
  }
}

TEST(Surrogate, BoundsNotApplicableForEqualRadii) {
  KernelModel m(half3());
  EXPECT_THROW(green_bounds(m, cart(0, 0, 2), cart(2, 0, 0.01)), NotApplicable);
}

TEST(Surrogate, VanishesOnBoundary) {
  KernelModel m(half3());
  Point Q;
  Q.r = 3.0;
  Q.theta = {std::numbers::pi / 2, 0.0};
  EXPECT_EQ(green(m, cart(0, 0, 1), Q), 0.0);
  EXPECT_EQ(green(m, cart(0.2, 0, 2.9), Q), 0.0);
  double prev = 1e300;
  for (double y = 0.5; y > 1e-6; y *= 0.5) {
    const double g = green(m, cart(0, 0, 5), cart(3, 0, y));
    EXPECT_LT(g, prev);
    prev = g;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(Surrogate, MonotoneTail) {
  KernelModel m(half3());
  const Point P = cart(0.3, 0, 1.0);
  double prev = 1e300;
  for (double t = 1.25 * P.r; t < 1e3; t *= 1.3) {
    const double g = green(m, P, from_cartesian({0.2 * t, 0.0, 0.9 * t}));
    EXPECT_LT(g, prev);
    prev = g;
  }
}

TEST(Surrogate, MatrixIsPositiveDefiniteOnLattice) {
  for (const DomainSpec& d : {DomainSpec{3, Shape::half_sphere, std::numbers::pi / 2},
                              DomainSpec{2, Shape::arc, 1.5}, DomainSpec{3, Shape::cap, 1.0}}) {
    auto ctx = make_context(d, PotentialSpec{});
    KernelModel m(ctx);
    std::vector<Node> nodes;
    const double h = 0.25;
    const int n = d.n;
    for (double x = -1.9; x <= 2.0; x += h)
      for (double z = 0.05; z <= 2.0; z += h) {
        std::vector<double> c = n == 2 ? std::vector<double>{x, z} : std::vector<double>{x, 0.3, z};
        const Point p = from_cartesian(c);
        if (p.r < 1.0 || p.r >= 2.0 || phi_of_colatitude(ctx->eigen, p.colatitude()) <= 0.0) continue;
        nodes.push_back(m.node(p, h));
      }
    ASSERT_GT(nodes.size(), 10u);
    Eigen::LLT<Eigen::MatrixXd> llt(m.matrix(nodes));
    EXPECT_EQ(llt.info(), Eigen::Success) << to_string(d.shape);
  }
}

TEST(Surrogate, MinFormStaysBelowNewtonianAndProduct) {
  KernelModel m(half3());
  m.form = SurrogateForm::min;
  const Point P = cart(0, 0, 2), Q = cart(0.1, 0, 2.1);
  const Node a = m.node(P), b = m.node(Q);
  const double g = green(m, P, Q);
  EXPECT_LE(g, KernelModel::product(a, b) + 1e-15);
  EXPECT_LE(g, m.image(distance(P, Q), a.delta, b.delta) + 1e-15);
}

TEST(Oracle, UnsupportedConfigurations) {
  auto ctx2 = make_context(DomainSpec{2, Shape::arc, 1.0}, PotentialSpec{});
  EXPECT_THROW(KernelModel(ctx2, KernelMode::halfspace_oracle), UnsupportedConfiguration);
  PotentialSpec kp;
  kp.kappa = 1.0;
  auto ctxk = make_context(DomainSpec{3, Shape::half_sphere, 0}, kp);
  EXPECT_THROW(KernelModel(ctxk, KernelMode::halfspace_oracle), UnsupportedConfiguration);
  EXPECT_NO_THROW(KernelModel(half3(), KernelMode::halfspace_oracle));
}

TEST(Poisson, SeparatedProductForm) {
  KernelModel m(half3());
  const Point Q = cart(1, 0, 0);
  const Point P = cart(0.3, 0.2, 1.9);  // t / r ~ 1/2
  const double c = std::sqrt(6.0 / (4.0 * std::numbers::pi));
  const double expect = (1.0 / (P.r * P.r)) * c * std::cos(P.colatitude()) * c / Q.r;
  EXPECT_NEAR(poisson_surrogate(m, P, Q), expect, 1e-6 * expect);
  // difference quotient of the surrogate Green function along the inward normal
  const double eps = 1e-5;
  const double dq = green(m, P, cart(1.0, 0.0, eps)) / eps;
  EXPECT_NEAR(dq / poisson_surrogate(m, P, Q), 1.0, 0.5);
}

TEST(Poisson, MiddleBandDerivativeAndDecay) {
  KernelModel m(half3());
  const Point Q = cart(1, 0, 0);
  const Point P = cart(0.9, 0.3, 0.4);
  const double eps = 1e-6;
  const double dq = green(m, P, cart(1.0, 0.0, eps)) / eps;
  EXPECT_NEAR(dq / poisson_surrogate(m, P, Q), 1.0, 1e-3);
  // mirrored P across the symmetry plane through Q
  EXPECT_NEAR(poisson_surrogate(m, cart(0.9, -0.3, 0.4), Q), poisson_surrogate(m, P, Q), 1e-14);
  double prev = 1e300;
  for (double t = 10; t < 1e4; t *= 3) {
    Point Qf = Q;
    Qf.r = t;
    const double v = poisson_surrogate(m, from_cartesian({0.9 * t, 0.0, 0.3 * t}), Qf);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_THROW(poisson_surrogate(m, cart(0.5, 0, 0.5), cart(0, 0, 1)), DomainError);
}

TEST(Poisson, OracleMartinBoundaryNormalized) {
  KernelModel m(half3(), KernelMode::halfspace_oracle);
  const Point Q = cart(1, 0, 0);
  EXPECT_NEAR(martin_boundary(m, half3()->P0, Q), 1.0, 1e-14);
  const Point P = cart(1.0, 0.0, 0.1);
  EXPECT_NEAR(poisson_kernel(m, P, Q), 0.1 / (2.0 * std::numbers::pi * 1e-3), 1e-9);
}
