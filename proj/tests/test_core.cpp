#include <gtest/gtest.h>

#include <thread>
#include <vector>

#include "ncrec/core.hpp"

namespace ncrec {
namespace {

TEST(ValidateParams, EmptyListsGiveCommutativeLimit) {
  const DeformationParams p = validate_params({}, {});
  for (std::size_t k = 0; k < 16; ++k) {
    EXPECT_EQ(p.lambda.a[k], 0.0);
    EXPECT_EQ(p.alpha.a[k], 0.0);
    EXPECT_EQ(p.gamma.a[k], 0.0);
  }
  EXPECT_TRUE(p.is_commutative());
}

TEST(ValidateParams, AntisymmetricCompletionAndGamma) {
  const DeformationParams p = validate_params({{2, 3, 0.1}}, {{2, 3, 0.2}});
  EXPECT_DOUBLE_EQ(p.lambda(1, 2), 0.1);
  EXPECT_DOUBLE_EQ(p.lambda(2, 1), -0.1);
  EXPECT_DOUBLE_EQ(p.alpha(1, 2), 0.2);
  EXPECT_DOUBLE_EQ(p.alpha(2, 1), -0.2);
  // gamma_22 = (1/4) sum_k alpha_2k lambda_2k = (1/4)(0.2)(0.1) = 0.005
  EXPECT_DOUBLE_EQ(p.gamma(1, 1), 0.005);
  EXPECT_FALSE(p.is_commutative());
}

TEST(ValidateParams, BitExactAntisymmetry) {
  const DeformationParams p =
      validate_params({{2, 3, 0.1}, {2, 4, -0.7}, {3, 4, 0.3}}, {{2, 4, 1e-3}});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(p.lambda(i, j), -p.lambda(j, i));
      EXPECT_EQ(p.alpha(i, j), -p.alpha(j, i));
    }
}

TEST(ValidateParams, Errors) {
  try {
    validate_params({{1, 2, 0.3}}, {});
    FAIL() << "expected FirstRowNonzero";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FirstRowNonzero);
  }
  try {
    validate_params({{2, 5, 0.3}}, {});
    FAIL() << "expected IndexOutOfRange";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
  try {
    validate_params({{3, 3, 0.3}}, {});
    FAIL() << "expected IndexOutOfRange for diagonal entry";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
  try {
    validate_params({{2, 3, 0.1}, {3, 2, -0.1}}, {});
    FAIL() << "expected DuplicatePair";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicatePair);
  }
}

TEST(Theta, CommutativeLimitIsUnity) {
  const ThetaVector t = theta(validate_params({}, {}));
  for (double v : t.theta) EXPECT_EQ(v, 1.0);
}

TEST(Theta, DeformedValues) {
  const ThetaVector t = theta(validate_params({{2, 3, 0.1}}, {{2, 3, 0.2}}));
  EXPECT_DOUBLE_EQ(t.theta[0], 1.0);
  EXPECT_NEAR(t.theta[1], 1.005, 1e-15);
  EXPECT_NEAR(t.theta[2], 1.005, 1e-15);
  EXPECT_DOUBLE_EQ(t.theta[3], 1.0);
}

TEST(Theta, ThetaEqualsOnePlusGammaDiagonal) {
  const DeformationParams p =
      validate_params({{2, 3, 0.1}, {2, 4, -0.4}, {3, 4, 0.25}}, {{2, 3, 0.2}, {3, 4, -0.5}});
  const ThetaVector t = theta(p);
  for (std::size_t nu = 0; nu < 4; ++nu)
    EXPECT_NEAR(t.theta[nu], 1.0 + p.gamma(nu, nu), 1e-15);
}

TEST(Theta, DegenerateRejected) {
  // lambda23 = 2, alpha23 = -2 makes theta2 = theta3 = 0 exactly.
  const DeformationParams p = validate_params({{2, 3, 2.0}}, {{2, 3, -2.0}});
  try {
    theta(p);
    FAIL() << "expected DegenerateTheta";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateTheta);
  }
}

TEST(SamplePoints, DeterministicAcrossRuns) {
  const DeformationParams p = validate_params({}, {});
  const auto a = sample_points(42, 3, p);
  const auto b = sample_points(42, 3, p);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_EQ(a[i].q[c], b[i].q[c]);
      EXPECT_EQ(a[i].p[c], b[i].p[c]);
    }
  }
}

TEST(SamplePoints, RangeAndInvariantScan) {
  const DeformationParams p = validate_params({}, {});
  const auto pts = sample_points(42, 1000, p);
  for (const PhasePoint& x : pts) {
    EXPECT_GE(x.p[0], 0.5);
    EXPECT_LE(x.p[0], 2.0);
    EXPECT_TRUE(x.is_valid());
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_GE(x.q[c], -1.0);
      EXPECT_LE(x.q[c], 1.0);
    }
    for (std::size_t c = 1; c < 4; ++c) {
      EXPECT_GE(x.p[c], -1.0);
      EXPECT_LE(x.p[c], 1.0);
    }
  }
}

TEST(SamplePoints, OrderIndependentAcrossThreads) {
  // Each point is a pure function of (seed, index): generating disjoint
  // chunks concurrently must reproduce the serial list.
  const DeformationParams p = validate_params({}, {});
  const auto serial = sample_points(7, 256, p);
  std::vector<PhasePoint> parallel(256);
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&parallel, w]() {
      for (std::size_t i = static_cast<std::size_t>(w); i < 256; i += 4)
        parallel[i] = sample_point(7, i);
    });
  }
  for (auto& th : workers) th.join();
  for (std::size_t i = 0; i < 256; ++i) {
    EXPECT_EQ(serial[i].q, parallel[i].q);
    EXPECT_EQ(serial[i].p, parallel[i].p);
  }
}

TEST(SamplePoints, RejectsZeroCount) {
  EXPECT_THROW(sample_points(1, 0, validate_params({}, {})), Error);
}

}  // namespace
}  // namespace ncrec
