#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "wiener/radial.hpp"
#include "wiener/spherical.hpp"

using namespace wiener;

namespace {
DomainSpec half(int n) {
  DomainSpec d;
  d.n = n;
  d.shape = Shape::half_sphere;
  return d;
}
DomainSpec cap(double a) {
  DomainSpec d;
  d.n = 3;
  d.shape = Shape::cap;
  d.alpha = a;
  return d;
}
DomainSpec arc(double a) {
  DomainSpec d;
  d.n = 2;
  d.shape = Shape::arc;
  d.alpha = a;
  return d;
}
}  // namespace

TEST(SolveEigen, HalfSphereClosedForm) {
  for (int n : {2, 3, 4, 5}) {
    const SphericalEigen e = solve_eigen(half(n));
    EXPECT_DOUBLE_EQ(e.lambda, n - 1.0);
    const double c = std::sqrt(2.0 * n / sphere_area(static_cast<std::size_t>(n)));
    std::vector<double> th(static_cast<std::size_t>(n - 1), 0.3);
    EXPECT_NEAR(eval_phi(e, th), c * std::cos(0.3), 1e-12);
    EXPECT_LE(e.normalization_residual, 1e-6);
  }
  const SphericalEigen e3 = solve_eigen(half(3));
  EXPECT_NEAR(eval_phi(e3, {0.0, 0.0}), 0.690988, 1e-6);
  EXPECT_NEAR(e3.J_Omega, 0.690988, 1e-6);
}

TEST(SolveEigen, ArcClosedForm) {
  const SphericalEigen e = solve_eigen(arc(std::numbers::pi));
  EXPECT_NEAR(e.lambda, 1.0, 1e-14);
  // psi measured from the first edge ray
  EXPECT_NEAR(eval_phi(e, {arc_theta(std::numbers::pi / 2, std::numbers::pi)}), 0.797885, 1e-6);
  for (double psi : {0.2, 0.9, 2.5}) {
    const double expect = std::sqrt(2.0 / std::numbers::pi) * std::sin(psi);
    EXPECT_NEAR(eval_phi(e, {arc_theta(psi, std::numbers::pi)}), expect, 1e-12);
  }
  const SphericalEigen e2 = solve_eigen(arc(1.0));
  EXPECT_NEAR(e2.lambda, std::pow(std::numbers::pi, 2), 1e-12);
  EXPECT_LE(e2.normalization_residual, 1e-6);
}

TEST(SolveEigen, CapOfRightAngleIsHalfSphere) {
  const SphericalEigen c = solve_eigen(cap(std::numbers::pi / 2));
  const SphericalEigen h = solve_eigen(half(3));
  EXPECT_NEAR(c.lambda, 2.0, 1e-6);
  EXPECT_NEAR(c.nu, 1.0, 1e-6);
  for (double t : {0.0, 0.4, 1.2})
    EXPECT_NEAR(eval_phi(c, {t, 0.0}), eval_phi(h, {t, 0.0}), 1e-6);
}

TEST(SolveEigen, CapLambdaDecreasesWithAngle) {
  double prev = 1e300;
  for (double a = 0.3; a < 3.0; a += 0.3) {
    const SphericalEigen e = solve_eigen(cap(a));
    EXPECT_LT(e.lambda, prev);
    EXPECT_LE(e.normalization_residual, 1e-6);
    EXPECT_NEAR(e.nu * (e.nu + 1.0), e.lambda, 1e-10);
    EXPECT_NEAR(exponents(3, 0.0, e.lambda).iota_plus, e.nu, 1e-8);
    prev = e.lambda;
  }
}

TEST(EvalPhi, BoundaryAndOutside) {
  for (const DomainSpec& d : {half(3), cap(1.0), arc(2.0)}) {
    const SphericalEigen e = solve_eigen(d);
    std::vector<double> th(static_cast<std::size_t>(d.n - 1), 0.0);
    th[0] = d.boundary_colatitude();
    EXPECT_EQ(eval_phi(e, th), 0.0);
    th[0] = d.boundary_colatitude() + 0.1;
    EXPECT_THROW(eval_phi(e, th), DomainError);
    th[0] = 0.5 * d.boundary_colatitude();
    EXPECT_GT(eval_phi(e, th), 0.0);
    EXPECT_LE(eval_phi(e, th), e.J_Omega + 1e-12);
  }
}

TEST(BoundaryDerivative, ClosedForms) {
  const SphericalEigen a = solve_eigen(arc(std::numbers::pi));
  EXPECT_NEAR(boundary_normal_derivative(a, {arc_theta(0.0, std::numbers::pi)}), 0.797885, 1e-6);
  const SphericalEigen h = solve_eigen(half(3));
  EXPECT_NEAR(boundary_normal_derivative(h, {std::numbers::pi / 2, 0.0}),
              std::sqrt(6.0 / (4.0 * std::numbers::pi)), 1e-12);
  EXPECT_THROW(boundary_normal_derivative(h, {1.0, 0.0}), DomainError);
  for (double al : {0.5, 1.5, 2.8}) EXPECT_GT(boundary_normal_derivative(solve_eigen(cap(al))), 0.0);
}

TEST(DomainSpec, Validation) {
  EXPECT_THROW(solve_eigen(arc(0.0)), DomainError);
  EXPECT_THROW(solve_eigen(cap(std::numbers::pi)), DomainError);
  DomainSpec bad = cap(1.0);
  bad.n = 4;
  EXPECT_THROW(solve_eigen(bad), DomainError);
}
