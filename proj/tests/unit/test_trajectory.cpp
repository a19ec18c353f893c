#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "elicit/errors.hpp"
#include "elicit/trajectory.hpp"
#include "oracles.hpp"

using namespace elicit;

namespace {

void expect_frames_near(const Trajectory& a, const Trajectory& b, double tol) {
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t f = 0; f < a.frames.size(); ++f) {
    ASSERT_EQ(a.frames[f].joints.size(), b.frames[f].joints.size());
    for (std::size_t j = 0; j < a.frames[f].joints.size(); ++j)
      for (int c = 0; c < 3; ++c)
        EXPECT_NEAR(a.frames[f].joints[j][c], b.frames[f].joints[j][c], tol) << f << "," << j;
  }
}

Trajectory single_joint(std::vector<Point3> points, double fps = 25.0) {
  Trajectory t{"P1", "r", 0, {}, fps};
  for (const auto& p : points) t.frames.push_back(Frame{{p}});
  return t;
}

}  // namespace

TEST(Preprocess, DecimatesFiftyHertzToTwentyFive) {
  Trajectory t{"P1", "r", 0, {}, 50.0};
  for (int f = 0; f < 50; ++f) {
    const double x = f;
    t.frames.push_back(Frame{{{0, 0, 0}, {x, 1.0 + 0.01 * x, 0}}});
  }
  PreprocessConfig cfg;
  cfg.normalize_height = false;
  const auto out = preprocess(t, cfg);
  EXPECT_EQ(out.frames.size(), 25u);
  EXPECT_DOUBLE_EQ(out.frame_rate, 25.0);
  expect_frames_near(Trajectory{"", "", 0, {out.frames.front()}, 0},
                     Trajectory{"", "", 0, {t.frames.front()}, 0}, 1e-12);
  expect_frames_near(Trajectory{"", "", 0, {out.frames.back()}, 0},
                     Trajectory{"", "", 0, {t.frames.back()}, 0}, 1e-12);
}

TEST(Preprocess, NormalizedTrajectoryIsAFixedPoint) {
  Trajectory t{"P1", "r", 0, {}, 25.0};
  for (int f = 0; f < 20; ++f) {
    const double s = f / 19.0;
    t.frames.push_back(Frame{{{0, 0, 0}, {0.2 * s, 0.6, 0.1}, {-0.1, -0.4 + 0.1 * s, 0.3 * s}}});
  }
  const auto out = preprocess(t);
  expect_frames_near(out, t, 1e-9);
}

TEST(Preprocess, IdempotentOnRandomTrajectories) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    auto t = oracle::random_trajectory(rng, 4, 10, 60);
    t.frame_rate = 30.0;
    const auto once = preprocess(t);
    const auto twice = preprocess(once);
    expect_frames_near(once, twice, 1e-9);
  }
}

TEST(Preprocess, InvariantToUniformScaling) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto t = oracle::random_trajectory(rng, 5, 20, 40);
    auto scaled = t;
    for (auto& f : scaled.frames)
      for (auto& p : f.joints)
        for (auto& c : p) c *= 2.0;
    expect_frames_near(preprocess(t), preprocess(scaled), 1e-12);
  }
}

TEST(Preprocess, RejectsDegenerateSkeleton) {
  const auto flat = single_joint({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  try {
    preprocess(flat);
    FAIL() << "expected an error";
  } catch (const AnalysisError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate skeleton"), std::string::npos);
  }
}

TEST(Preprocess, RejectsBadConfiguration) {
  const auto t = single_joint({{0, 0, 0}, {0, 1, 0}});
  PreprocessConfig cfg;
  cfg.reference_joint = 3;
  EXPECT_THROW(preprocess(t, cfg), AnalysisError);
  cfg = {};
  cfg.target_fps = 0;
  EXPECT_THROW(preprocess(t, cfg), AnalysisError);
  EXPECT_THROW(preprocess(single_joint({{0, 0, 0}})), AnalysisError);
}

TEST(Dtw, IdentityIsZero) {
  std::mt19937_64 rng(9);
  const auto g = oracle::random_trajectory(rng, 3, 5, 30);
  EXPECT_EQ(dtw_distance(g, g), 0.0);
}

TEST(Dtw, TwoFrameOffsetMatchesHandEvaluation) {
  const Point3 d{0.3, -1.2, 0.4};
  const double norm = std::sqrt(0.09 + 1.44 + 0.16);
  const auto a = single_joint({{0, 0, 0}, {1, 2, 3}});
  const auto b = single_joint({{d[0], d[1], d[2]}, {1 + d[0], 2 + d[1], 3 + d[2]}});
  // Table: D11 = |d|, D12 = D21 = |d| + c(off-diagonal), D22 = |d| + |d|.
  EXPECT_NEAR(dtw_distance(a, b), 2.0 * norm, 1e-12);
  DtwOptions normalized{true};
  EXPECT_NEAR(dtw_distance(a, b, normalized), norm, 1e-12);
}

TEST(Dtw, SymmetricAndNonNegativeOnRandomPairs) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_trajectory(rng, 3, 4, 25);
    const auto b = oracle::random_trajectory(rng, 3, 4, 25);
    const double ab = dtw_distance(a, b);
    EXPECT_EQ(ab, dtw_distance(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_EQ(dtw_distance(a, b, {true}), dtw_distance(b, a, {true}));
  }
}

TEST(Dtw, AgreesWithFullTableReference) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = oracle::random_trajectory(rng, 2, 1, 20);
    const auto b = oracle::random_trajectory(rng, 2, 1, 20);
    EXPECT_NEAR(dtw_distance(a, b), oracle::reference_dtw(a, b), 1e-9);
  }
}

TEST(Dtw, RejectsJointCountMismatch) {
  const auto a = single_joint({{0, 0, 0}, {1, 1, 1}});
  Trajectory b{"P2", "r", 0, {Frame{{{0, 0, 0}, {1, 1, 1}}}, Frame{{{0, 0, 0}, {1, 1, 1}}}}, 25};
  EXPECT_THROW(dtw_distance(a, b), AnalysisError);
}

TEST(FrameDistance, SumsJointEuclideanDistances) {
  const Frame a{{{0, 0, 0}, {1, 1, 1}}};
  const Frame b{{{3, 4, 0}, {1, 1, 2}}};
  EXPECT_DOUBLE_EQ(frame_distance(a, b), 6.0);
}
