#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "wiener/sets.hpp"

using namespace wiener;

namespace {

std::shared_ptr<const ConeContext> half3() {
  static auto ctx = make_context(DomainSpec{3, Shape::half_sphere, std::numbers::pi / 2}, PotentialSpec{});
  return ctx;
}

SetSpec ball_set(double height, double radius) {
  return SetSpec{"ball", {Ball{axis_point(3, height), radius}}};
}

std::set<std::vector<double>> cloud(const Block& b) {
  std::set<std::vector<double>> out;
  for (const auto& p : b.points) out.insert(to_cartesian(p));
  return out;
}

}  // namespace

TEST(BlockIndex, Examples) {
  EXPECT_EQ(block_index(4.0), 2);
  EXPECT_EQ(block_index(1.0), 0);
  EXPECT_EQ(block_index(0.3), -2);
  EXPECT_EQ(block_index(7.999), 2);
  EXPECT_EQ(block_index(std::ldexp(1.0, -30)), -30);
  EXPECT_THROW(block_index(0.0), DomainError);
}

TEST(Discretize, BallPointsLandInTheirBlocks) {
  const auto d = discretize(ball_set(4.0, 0.5), *half3(), 0.125, 0, 4);
  // the ball straddles r = 4, so it fills blocks 1 and 2
  EXPECT_FALSE(d.blocks.at(1).empty());
  EXPECT_FALSE(d.blocks.at(2).empty());
  for (const auto& [k, blk] : d.blocks)
    for (const auto& p : blk.points) {
      EXPECT_EQ(block_index(p), k);
      EXPECT_LE(distance(p, axis_point(3, 4.0)), 0.5 + 1e-12);
    }
}

TEST(Discretize, BallInsideOneBlock) {
  const auto d = discretize(ball_set(6.0, 0.5), *half3(), 0.125, 0, 4);
  for (const auto& [k, blk] : d.blocks) EXPECT_EQ(blk.empty(), k != 2) << k;
}

TEST(Discretize, EmptySpec) {
  const auto d = discretize(SetSpec{"empty", {}}, *half3(), 0.25, 0, 12);
  EXPECT_EQ(d.blocks.size(), 13u);
  EXPECT_EQ(d.total_points(), 0u);
  EXPECT_TRUE(in_subcone(d, *half3(), 0.5));
}

TEST(Discretize, ShellCountMatchesVolume) {
  const double res = 0.25;
  const auto d = discretize(SetSpec{"shell", {ShellSector{3, 3, std::numbers::pi}}}, *half3(), res, 0, 6);
  const double h = res * 8.0;
  const double volume = 2.0 / 3.0 * std::numbers::pi * (std::pow(16.0, 3) - std::pow(8.0, 3));
  const double expect = volume / (h * h * h);
  const double got = static_cast<double>(d.blocks.at(3).size());
  EXPECT_NEAR(got / expect, 1.0, 0.2) << got << " vs " << expect;
  for (const auto& [k, blk] : d.blocks)
    if (k != 3) EXPECT_TRUE(blk.empty());
}

TEST(Discretize, PointsInOpenConeAndSpacingBounded) {
  const double res = 0.25;
  const SetSpec spec{"mix",
                     {ShellSector{1, 2, 1.0}, AxisBeads{0.5, 0, 5}, ball_set(20.0, 3.0).shapes[0]}};
  const auto d = discretize(spec, *half3(), res, 0, 6);
  for (const auto& [k, blk] : d.blocks)
    for (std::size_t i = 0; i < blk.size(); ++i) {
      EXPECT_GT(phi_of_colatitude(half3()->eigen, blk.points[i].colatitude()), 0.0);
      EXPECT_LE(blk.h[i], res * std::ldexp(1.0, k) * (1 + 1e-12));
    }
}

TEST(Discretize, OutsideConeIsSkippedWithWarning) {
  const SetSpec spec{"below", {Ball{from_cartesian({0.0, 0.0, -5.0}), 1.0}}};
  const auto d = discretize(spec, *half3(), 0.25, 0, 6);
  EXPECT_EQ(d.total_points(), 0u);
  EXPECT_EQ(d.warnings.size(), 1u);
}

TEST(Discretize, Deterministic) {
  const SetSpec spec{"mix", {ShellSector{1, 2, 0.8}, AxisBeads{0.5, 0, 5}}};
  std::ostringstream a, b;
  write_decomposition_csv(a, discretize(spec, *half3(), 0.2, 0, 6), 3);
  write_decomposition_csv(b, discretize(spec, *half3(), 0.2, 0, 6), 3);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "k,r,theta_1,theta_2,h");
}

TEST(Discretize, SubsetMonotonicity) {
  const Primitive p1 = AxisBeads{1.0, 0, 6}, p2 = ShellSector{2, 3, 0.7}, p3 = ball_set(5.0, 2.0).shapes[0];
  const auto a = discretize(SetSpec{"a", {p1}}, *half3(), 0.25, 0, 6);
  const auto b = discretize(SetSpec{"b", {p1, p2, p3}}, *half3(), 0.25, 0, 6);
  for (const auto& [k, blk] : a.blocks) {
    const auto ca = cloud(blk), cb = cloud(b.blocks.at(k));
    for (const auto& x : ca) EXPECT_TRUE(cb.count(x)) << "block " << k;
  }
}

TEST(Discretize, RefinementAtLeastDoubles) {
  for (const SetSpec& spec : {ball_set(6.0, 1.5), SetSpec{"shell", {ShellSector{1, 3, 1.0}}}}) {
    const auto c = discretize(spec, *half3(), 0.3, 0, 4);
    const auto f = discretize(spec, *half3(), 0.15, 0, 4);
    for (const auto& [k, blk] : c.blocks)
      if (!blk.empty()) EXPECT_GE(f.blocks.at(k).size(), 2 * blk.size()) << spec.name << " k=" << k;
  }
}

TEST(Discretize, CapCoarsensAndFlags) {
  const auto d = discretize(SetSpec{"shell", {ShellSector{2, 2, std::numbers::pi}}}, *half3(), 0.1, 0, 4, 500);
  EXPECT_LE(d.blocks.at(2).size(), 500u);
  EXPECT_TRUE(d.blocks.at(2).coarsened);
  EXPECT_FALSE(d.blocks.at(1).coarsened);
}

TEST(Discretize, Validation) {
  EXPECT_THROW(discretize(SetSpec{}, *half3(), 0.0, 0, 4), DomainError);
  EXPECT_THROW(discretize(SetSpec{}, *half3(), 1.0, 0, 4), DomainError);
  EXPECT_THROW(discretize(SetSpec{}, *half3(), 0.2, 5, 4), DomainError);
}

TEST(Subcone, Examples) {
  const auto beads = discretize(SetSpec{"beads", {AxisBeads{0.5, 1, 8}}}, *half3(), 0.25, 0, 10);
  EXPECT_GT(beads.total_points(), 0u);
  EXPECT_TRUE(in_subcone(beads, *half3(), 0.5));
  const auto shell = discretize(SetSpec{"shell", {ShellSector{0, 3, std::numbers::pi}}}, *half3(), 0.25, 0, 10);
  EXPECT_FALSE(in_subcone(shell, *half3(), 0.5));
}

TEST(Discretize, OtherDomains) {
  for (const DomainSpec& dom : {DomainSpec{2, Shape::arc, 1.0}, DomainSpec{3, Shape::cap, 0.8},
                                DomainSpec{4, Shape::half_sphere, 0}}) {
    auto ctx = make_context(dom, PotentialSpec{});
    const auto d = discretize(SetSpec{"s", {ShellSector{1, 1, std::numbers::pi}, AxisBeads{0.4, 2, 3}}},
                              *ctx, 0.3, 0, 4);
    EXPECT_GT(d.blocks.at(1).size(), 0u);
    EXPECT_GT(d.blocks.at(2).size(), 0u);
    for (const auto& [k, blk] : d.blocks)
      for (const auto& p : blk.points) {
        EXPECT_EQ(static_cast<int>(p.dim()), dom.n);
        EXPECT_EQ(block_index(p), k);
        EXPECT_GT(phi_of_colatitude(ctx->eigen, p.colatitude()), 0.0);
      }
  }
}
