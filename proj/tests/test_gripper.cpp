#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace disf;
using namespace disf::testing;

TEST(TransformPointNormal, IdentityLeavesPointUnchanged) {
  const PointNormal pn{Vec3(0.1, -0.2, 0.3), UnitVec3(1, 2, 3)};
  for (Finger j : {Finger::kFirst, Finger::kSecond}) {
    const auto out = transform_point_normal(pn, Mat3::Identity(), Vec3::Zero(), 0.0,
                                            UnitVec3(0, 1, 0), j);
    EXPECT_EQ(out.point, pn.point);
    EXPECT_EQ(out.normal.vec(), pn.normal.vec());
  }
}

TEST(TransformPointNormal, ApertureMovesFingersInOppositeDirections) {
  const PointNormal pn{Vec3::Zero(), UnitVec3(0, 0, 1)};
  const UnitVec3 v(0, 1, 0);
  const auto p1 = transform_point_normal(pn, Mat3::Identity(), Vec3::Zero(), 0.02, v,
                                         Finger::kFirst);
  const auto p2 = transform_point_normal(pn, Mat3::Identity(), Vec3::Zero(), 0.02, v,
                                         Finger::kSecond);
  EXPECT_LT((p1.point - Vec3(0, -0.01, 0)).norm(), 1e-15);
  EXPECT_LT((p2.point - Vec3(0, 0.01, 0)).norm(), 1e-15);
}

TEST(TransformPointNormal, FingerSeparationChangesByExactlyDd) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int i = 0; i < 200; ++i) {
    const PointNormal pn{random_vec(rng), random_unit(rng)};
    const Mat3 r = rodrigues(random_omega(rng, std::numbers::pi));
    const Vec3 t = random_vec(rng);
    const UnitVec3 v = random_unit(rng);
    const double dd = u(rng);
    const auto a = transform_point_normal(pn, r, t, dd, v, Finger::kFirst);
    const auto b = transform_point_normal(pn, r, t, dd, v, Finger::kSecond);
    EXPECT_NEAR((b.point - a.point).norm(), std::abs(dd), 1e-12);
    EXPECT_NEAR(a.normal.vec().norm(), 1.0, 1e-12);
  }
}

TEST(TransformSurface, EmptyStaysEmpty) {
  EXPECT_TRUE(transform_surface({}, Mat3::Identity(), Vec3::Ones(), 0.1,
                                UnitVec3(0, 1, 0), Finger::kFirst)
                  .empty());
}

TEST(TransformSurface, CentroidIsTransformedCentroidWhenDdIsZero) {
  std::mt19937_64 rng(22);
  const auto s = random_surface(rng, 40);
  const Mat3 r = rodrigues(Vec3(0.3, 0.1, -0.7));
  const Vec3 t(0.1, 0.2, 0.3);
  const auto out = transform_surface(s, r, t, 0.0, UnitVec3(0, 1, 0), Finger::kSecond);
  EXPECT_LT((centroid(out) - (r * centroid(s) + t)).norm(), 1e-12);
}

TEST(TransformSurface, MatchesPerPointApplication) {
  std::mt19937_64 rng(23);
  const auto s = random_surface(rng, 50);
  const Mat3 r = rodrigues(random_omega(rng, 2.0));
  const Vec3 t = random_vec(rng);
  const UnitVec3 v = random_unit(rng);
  const auto out = transform_surface(s, r, t, 0.013, v, Finger::kFirst);
  ASSERT_EQ(out.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    // Written out from the gripper transform: R p + t - 0.5 R v dd.
    const Vec3 expected = r * s[i].point + t - 0.5 * 0.013 * (r * v.vec());
    EXPECT_LT((out[i].point - expected).norm(), 1e-12);
    EXPECT_LT((out[i].normal.vec() - r * s[i].normal.vec()).norm(), 1e-12);
  }
}

TEST(TransformSurface, CompositionOfRigidTransforms) {
  std::mt19937_64 rng(24);
  const auto s = random_surface(rng, 30);
  const UnitVec3 v(0, 1, 0);
  for (int i = 0; i < 20; ++i) {
    const Mat3 r1 = rodrigues(random_omega(rng, 3.0)), r2 = rodrigues(random_omega(rng, 3.0));
    const Vec3 t1 = random_vec(rng), t2 = random_vec(rng);
    const auto twice = transform_surface(transform_surface(s, r1, t1, 0, v, Finger::kFirst),
                                         r2, t2, 0, v, Finger::kFirst);
    const auto once = transform_surface(s, r2 * r1, r2 * t1 + t2, 0, v, Finger::kFirst);
    for (std::size_t k = 0; k < s.size(); ++k)
      EXPECT_LT((twice[k].point - once[k].point).norm(), 1e-9);
  }
}

TEST(TransformSurface, ApertureKeepsMidpointsFixed) {
  std::mt19937_64 rng(25);
  const auto s = random_surface(rng, 30);
  const UnitVec3 v(0, 1, 0);
  for (double dd : {-0.05, 0.01, 0.07}) {
    const auto a = transform_surface(s, Mat3::Identity(), Vec3::Zero(), dd, v, Finger::kFirst);
    const auto b = transform_surface(s, Mat3::Identity(), Vec3::Zero(), dd, v, Finger::kSecond);
    for (std::size_t k = 0; k < s.size(); ++k)
      EXPECT_LT((0.5 * (a[k].point + b[k].point) - s[k].point).norm(), 1e-15);
  }
}

TEST(DefaultGripper, TwentyFivePointsPerPadWithInwardNormals) {
  const GripperModel g = default_parallel_gripper();
  ASSERT_EQ(g.fingers[0].size(), 25u);
  ASSERT_EQ(g.fingers[1].size(), 25u);
  for (const auto& pn : g.fingers[0]) EXPECT_EQ(pn.normal.vec(), g.v0.vec());
  for (const auto& pn : g.fingers[1]) EXPECT_EQ(pn.normal.vec(), (-g.v0).vec());
}

TEST(DefaultGripper, PadCentroidsAreSeparatedByRestAperture) {
  const GripperModel g = default_parallel_gripper();
  EXPECT_NEAR((centroid(g.fingers[1]) - centroid(g.fingers[0])).norm(), 0.091, 1e-15);
  EXPECT_LT(combined_centroid(g.fingers).norm(), 1e-15);
}

TEST(DefaultGripper, MirroredPadsHaveZeroNormalError) {
  const GripperModel g = default_parallel_gripper();
  const OrientedSurface object = mirror_of(g.fingers);
  const auto corr = match_nearest(g.fingers, object);
  EXPECT_EQ(corr.size(), 50u);
  EXPECT_EQ(normal_misalignment(corr), 0.0);
  EXPECT_EQ(surface_distance(corr), 0.0);
}

TEST(DefaultGripper, PadsSpanConfiguredExtent) {
  PadConfig cfg;
  cfg.width = 0.03;
  cfg.height = 0.01;
  cfg.columns = 4;
  cfg.rows = 3;
  const GripperModel g = default_parallel_gripper(cfg);
  ASSERT_EQ(g.fingers[0].size(), 12u);
  double xmin = 1, xmax = -1, zmin = 1, zmax = -1;
  for (const auto& pn : g.fingers[0]) {
    xmin = std::min(xmin, pn.point.x());
    xmax = std::max(xmax, pn.point.x());
    zmin = std::min(zmin, pn.point.z());
    zmax = std::max(zmax, pn.point.z());
  }
  EXPECT_NEAR(xmax - xmin, 0.03, 1e-15);
  EXPECT_NEAR(zmax - zmin, 0.01, 1e-15);
}

TEST(DefaultGripper, RejectsNonPositivePads) {
  PadConfig cfg;
  cfg.width = 0.0;
  EXPECT_THROW(default_parallel_gripper(cfg), InvalidInput);
  cfg = PadConfig{};
  cfg.rows = 0;
  EXPECT_THROW(default_parallel_gripper(cfg), InvalidInput);
  cfg = PadConfig{};
  cfg.height = -0.01;
  EXPECT_THROW(default_parallel_gripper(cfg), InvalidInput);
}

TEST(GripperModel, ValidatesLimitsAndAxes) {
  GripperModel g = default_parallel_gripper();
  g.d_min = 0.1;
  EXPECT_THROW(g.validate(), InvalidInput);
  g = default_parallel_gripper();
  g.n_z0 = UnitVec3(0, 1, 0);
  EXPECT_THROW(g.validate(), InvalidInput);
  g = default_parallel_gripper();
  g.fingers[1].clear();
  EXPECT_THROW(g.validate(), InvalidInput);
}
