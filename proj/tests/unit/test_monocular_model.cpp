#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "depthfuse/errors.hpp"
#include "depthfuse/monocular_model.hpp"

using namespace depthfuse;

namespace {

KeypointFrame frame(Pixel s, Pixel h) {
  KeypointFrame f;
  f.shoulder_mid = s;
  f.hip_mid = h;
  return f;
}

}  // namespace

TEST(ShPixelDistance, AxisAligned) {
  EXPECT_DOUBLE_EQ(sh_pixel_distance(frame({100, 100}, {100, 300})), 200.0);
}

TEST(ShPixelDistance, ThreeFourFive) {
  EXPECT_DOUBLE_EQ(sh_pixel_distance(frame({0, 0}, {3, 4})), 5.0);
}

TEST(ShPixelDistance, FractionalCoordinates) {
  EXPECT_NEAR(sh_pixel_distance(frame({50.5, 60.5}, {50.5, 260.7})), 200.2, 1e-9);
}

TEST(ShPixelDistance, InvalidFrameThrows) {
  auto f = frame({0, 0}, {0, 10});
  f.valid = false;
  EXPECT_THROW(sh_pixel_distance(f), InvalidFrameError);
}

TEST(ShPixelDistance, CoincidentPointsThrow) {
  EXPECT_THROW(sh_pixel_distance(frame({7, 7}, {7, 7})), DomainError);
}

TEST(ShPixelDistance, TranslationInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.0, 1000.0), off(-300.0, 300.0);
  for (int i = 0; i < 200; ++i) {
    const Pixel s{pos(rng), pos(rng)}, h{pos(rng), pos(rng)};
    const double du = off(rng), dv = off(rng);
    EXPECT_NEAR(sh_pixel_distance(frame(s, h)),
                sh_pixel_distance(frame({s.u + du, s.v + dv}, {h.u + du, h.v + dv})), 1e-9);
  }
}

TEST(MonocularEstimate, HandValues) {
  EXPECT_NEAR(monocular_cb_estimate(190.0), 287.60, 0.01);
  EXPECT_NEAR(monocular_cb_estimate(250.0), 181.12, 0.01);
}

TEST(MonocularEstimate, SecondBranchFarPixelLength) {
  const double expected = -240.2 * std::log(400.0 - 47.3) + 1457.0;
  EXPECT_NEAR(expected, 48.0786, 1e-4);
  EXPECT_NEAR(monocular_cb_estimate(400.0), expected, 1e-9);
}

TEST(MonocularEstimate, LogArgumentOutOfDomain) {
  EXPECT_THROW(monocular_cb_estimate(179.4), DomainError);
  EXPECT_THROW(monocular_cb_estimate(150.0), DomainError);
}

TEST(MonocularEstimate, NonPositiveResultThrows) {
  // Branch 2 reaches zero near x = 47.3 + exp(1457 / 240.2) ~ 478.6 px.
  EXPECT_NO_THROW(monocular_cb_estimate(470.0));
  EXPECT_THROW(monocular_cb_estimate(500.0), DomainError);
}

TEST(MonocularEstimate, StrictlyDecreasingOnEachBranch) {
  std::vector<std::pair<double, double>> branches = {{179.5, 199.999}, {200.0, 478.0}};
  for (const auto& [lo, hi] : branches) {
    double prev = monocular_cb_estimate(lo);
    for (int i = 1; i <= 2000; ++i) {
      const double x = lo + (hi - lo) * i / 2000.0;
      const double f = monocular_cb_estimate(x);
      EXPECT_LT(f, prev) << "x = " << x;
      prev = f;
    }
  }
}

TEST(MonocularEstimate, ParametersAreData) {
  MonocularModelParams p;
  p.branch2_offset += 10.0;
  EXPECT_NEAR(monocular_cb_estimate(250.0, p) - monocular_cb_estimate(250.0), 10.0, 1e-9);
}

TEST(MonocularInverse, HandValues) {
  EXPECT_NEAR(monocular_cb_inverse(181.12), 250.0, 0.01);
  EXPECT_NEAR(monocular_cb_inverse(287.60), 190.0, 0.01);
}

TEST(MonocularInverse, RoundTrip350) {
  EXPECT_NEAR(monocular_cb_estimate(monocular_cb_inverse(350.0)), 350.0, 1e-6);
}

TEST(MonocularInverse, RoundTripBothBranches) {
  const BranchSeam seam = branch_seam();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> near_branch(20.0, seam.above_cm);
  std::uniform_real_distribution<double> far_branch(std::nextafter(seam.below_cm, 1e9), 900.0);
  for (int i = 0; i < 1000; ++i) {
    const double d2 = near_branch(rng);
    const double x2 = monocular_cb_inverse(d2);
    EXPECT_GE(x2, 200.0);
    EXPECT_LT(std::abs(monocular_cb_estimate(x2) - d2), 1e-6);

    const double d1 = far_branch(rng);
    const double x1 = monocular_cb_inverse(d1);
    EXPECT_LT(x1, 200.0);
    EXPECT_LT(std::abs(monocular_cb_estimate(x1) - d1), 1e-6);
  }
}

TEST(MonocularInverse, SeamDistancesThrow) {
  const BranchSeam seam = branch_seam();
  EXPECT_THROW(monocular_cb_inverse(0.5 * (seam.below_cm + seam.above_cm)), DomainError);
}

TEST(MonocularInverse, OutOfRangeThrows) {
  EXPECT_THROW(monocular_cb_inverse(-5.0), OutOfRangeError);
  EXPECT_THROW(monocular_cb_inverse(20.0, {}, 300.0), OutOfRangeError);
}

TEST(BranchSeam, GapNearSixAndAHalfCentimeters) {
  const BranchSeam seam = branch_seam();
  const double below = -48.03 * std::log(200.0 - 179.4) + 401.0;
  const double above = -240.2 * std::log(200.0 - 47.3) + 1457.0;
  EXPECT_NEAR(seam.below_cm, below, 1e-9);
  EXPECT_NEAR(seam.above_cm, above, 1e-9);
  EXPECT_NEAR(seam.gap_cm(), 6.5, 0.5);
}

TEST(MonocularSensitivity, MatchesNumericalDerivative) {
  for (double x : {181.0, 190.0, 199.0, 210.0, 300.0, 450.0}) {
    const double h = 1e-5;
    const double numeric =
        std::abs(monocular_cb_estimate(x + h) - monocular_cb_estimate(x - h)) / (2.0 * h);
    EXPECT_NEAR(monocular_sensitivity(x), numeric, 1e-4 * numeric) << "x = " << x;
  }
}

TEST(ShOutlierCheck, ThresholdArithmetic) {
  std::vector<ShSample> h;
  for (int k = 0; k <= 10; ++k) h.push_back({double(k), 200.0 + 0.10 * k});
  auto with_next = [&](double rate) {
    auto v = h;
    v.push_back({11.0, h.back().sh_px + rate});
    return v;
  };
  EXPECT_TRUE(sh_outlier_check(with_next(0.13)));
  EXPECT_FALSE(sh_outlier_check(with_next(0.12)));
}

TEST(ShOutlierCheck, WarmUpNeverFlags) {
  const std::vector<ShSample> h = {{0, 200}, {1, 200.1}, {2, 200.2}, {3, 260.0}};
  EXPECT_FALSE(sh_outlier_check(h));
}

TEST(ShOutlierCheck, NeedsTwoSamples) {
  const std::vector<ShSample> one = {{0.0, 200.0}};
  EXPECT_THROW(sh_outlier_check(one), InsufficientHistoryError);
}

TEST(ShOutlierCheck, ScaleConsistent) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> jump(0.0, 6.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ShSample> h;
    double v = 220.0;
    for (int k = 0; k < 16; ++k) {
      v += noise(rng);
      h.push_back({k / 30.0, v});
    }
    h.push_back({16 / 30.0, v + jump(rng)});
    const bool base = sh_outlier_check(h);
    for (double scale : {0.5, 3.0, 17.0}) {
      auto scaled = h;
      for (auto& s : scaled) s.sh_px *= scale;
      EXPECT_EQ(sh_outlier_check(scaled), base) << "trial " << trial << " scale " << scale;
    }
  }
}
