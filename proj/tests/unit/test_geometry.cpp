#include <gtest/gtest.h>

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <numbers>

#include "ite/geometry/kdtree.hpp"
#include "ite/geometry/knn.hpp"
#include "ite/geometry/mst.hpp"
#include "ite/geometry/rank.hpp"
#include "ite/geometry/special.hpp"
#include "support.hpp"

using namespace ite;
using namespace ite::geometry;
namespace ts = testing_support;

TEST(Knn, SmallLineBySelfExclusion) {
  const Sample p = Sample::column({0.0, 1.0, 3.0});
  const auto t1 = knn_distances(p, 1);
  EXPECT_EQ(t1.dists(0, 0), 1.0);
  EXPECT_EQ(t1.dists(1, 0), 1.0);
  EXPECT_EQ(t1.dists(2, 0), 2.0);
  const auto t2 = knn_distances(p, 2);
  EXPECT_EQ(t2.dists(0, 1), 3.0);
  EXPECT_EQ(t2.dists(1, 1), 2.0);
  EXPECT_EQ(t2.dists(2, 1), 3.0);
  EXPECT_TRUE(t2.self_excluded);
}

TEST(Knn, Errors) {
  const Sample p = Sample::column({0.0, 1.0, 3.0});
  try {
    (void)knn_distances(p, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KTooLarge);
  }
  EXPECT_THROW((void)knn_distances(p, p, 4, false), Error);
  EXPECT_THROW((void)knn_distances(p, ts::gaussian(3, 2, 1), 1, false), Error);
}

TEST(Knn, TranslationOfBothSetsKeepsTable) {
  const Sample p = ts::gaussian(150, 3, 4);
  ite::Vector c(3);
  c << 0.5, -2.0, 4.0;
  const Sample shifted = ts::isometry(p, Matrix::Identity(3, 3), c);
  const auto a = knn_distances(p, p, 1, false);
  const auto b = knn_distances(shifted, shifted, 1, false);
  EXPECT_LE((a.dists - b.dists).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(a.dists.maxCoeff(), 0.0);  // every query finds itself
}

TEST(Knn, RowPermutationAndIsometryInvariance) {
  const Sample p = ts::gaussian(200, 4, 9);
  const auto base = knn_distances(p, 4);
  const Sample rotated = ts::isometry(p, ts::rotation(4, 3), ite::Vector::Constant(4, 1.5));
  EXPECT_LE((knn_distances(rotated, 4).dists - base.dists).cwiseAbs().maxCoeff(), 1e-12);
  // permuting the reference points leaves every query's distances unchanged
  const auto perm = knn_distances(ts::shuffled(p, 1), p, 4, false);
  const auto same = knn_distances(p, p, 4, false);
  EXPECT_EQ(perm.dists, same.dists);
}

TEST(Knn, RowsNondecreasingAndPositiveForDistinctPoints) {
  const auto t = knn_distances(ts::uniform(300, 2, 2), 6);
  for (Index i = 0; i < t.dists.rows(); ++i) {
    EXPECT_GT(t.dists(i, 0), 0.0);
    for (Index j = 1; j < t.k; ++j) EXPECT_LE(t.dists(i, j - 1), t.dists(i, j));
  }
}

TEST(Knn, ExactAgainstBruteForceOracle) {
  ite::Rng rng(77);
  std::uniform_int_distribution<Index> size(20, 200);
  std::uniform_int_distribution<Index> dim(1, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = size(rng);
    const Index d = dim(rng);
    const Index k = 1 + trial % 7;
    const Sample p = ts::gaussian(n, d, derive_seed(5, trial));
    const Sample q = ts::uniform(n / 2 + 1, d, derive_seed(6, trial), -2.0, 2.0);
    EXPECT_EQ(knn_distances(p, k).dists, ts::brute_knn(p, p, k, true)) << "trial " << trial;
    EXPECT_EQ(knn_distances(p, q, k, false).dists, ts::brute_knn(p, q, k, false)) << "trial " << trial;
  }
}

TEST(Knn, HighDimensionUsesExhaustiveScan) {
  const Sample p = ts::gaussian(120, 25, 3);
  EXPECT_EQ(knn_distances(p, 3).dists, ts::brute_knn(p, p, 3, true));
}

TEST(Knn, DuplicatePointsGiveZeroDistances) {
  const Sample p = Sample::column({1.0, 1.0, 2.0});
  EXPECT_EQ(knn_distances(p, 1).dists(0, 0), 0.0);
}

TEST(Mst, SmallExamples) {
  const Sample line = Sample::column({0.0, 1.0, 3.0});
  EXPECT_DOUBLE_EQ(euclidean_mst_weight(line, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(euclidean_mst_weight(line, 2.0), 5.0);
  const Sample square = Sample::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  EXPECT_DOUBLE_EQ(euclidean_mst_weight(square, 1.0), 3.0);
  EXPECT_EQ(euclidean_mst(square).size(), 3u);
}

TEST(Mst, Errors) {
  try {
    (void)euclidean_mst_weight(Sample::column({1.0}), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewPoints);
  }
  EXPECT_THROW((void)euclidean_mst_weight(Sample::column({1.0, 2.0}), 0.0), Error);
}

TEST(Mst, ExactAgainstDensePrimOracle) {
  ite::Rng rng(99);
  std::uniform_int_distribution<Index> size(2, 200);
  std::uniform_int_distribution<Index> dim(1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const Sample p = ts::gaussian(size(rng), dim(rng), derive_seed(8, trial));
    const auto oracle = ts::prim_oracle(p);
    const auto edges = euclidean_mst(p);
    ASSERT_EQ(edges.size(), oracle.size());
    for (std::size_t e = 0; e < edges.size(); ++e) EXPECT_EQ(edges[e].sq, oracle[e]) << "trial " << trial;
    double expected = 0.0;
    for (double sq : oracle) expected += std::pow(std::sqrt(sq), 1.5);
    EXPECT_EQ(euclidean_mst_weight(p, 1.5), expected);
  }
}

TEST(Mst, HighDimensionFallbackMatchesOracle) {
  const Sample p = ts::gaussian(80, 24, 4);
  const auto oracle = ts::prim_oracle(p);
  const auto edges = euclidean_mst(p);
  for (std::size_t e = 0; e < edges.size(); ++e) EXPECT_EQ(edges[e].sq, oracle[e]);
}

TEST(Mst, ScalingLaw) {
  const Sample p = ts::uniform(500, 2, 12);
  for (double gamma : {0.5, 1.0, 1.7}) {
    const double a = 3.7;
    EXPECT_NEAR(euclidean_mst_weight(p.scaled(a), gamma), std::pow(a, gamma) * euclidean_mst_weight(p, gamma),
                1e-10 * euclidean_mst_weight(p.scaled(a), gamma));
  }
}

TEST(Special, DigammaKnownValues) {
  EXPECT_NEAR(digamma(1.0), -0.5772156649015329, 1e-12);
  EXPECT_NEAR(digamma(2.0), 0.4227843350984671, 1e-12);
  EXPECT_NEAR(digamma(0.5), -1.9635100260214235, 1e-12);
  EXPECT_THROW(digamma(0.0), Error);
  EXPECT_THROW(digamma(-1.5), Error);
}

TEST(Special, DigammaAgainstBoost) {
  for (double x = 0.01; x < 200.0; x *= 1.13) {
    const double ref = boost::math::digamma(x);
    EXPECT_NEAR(digamma(x), ref, 1e-12 * std::max(1.0, std::abs(ref))) << x;
  }
}

TEST(Special, UnitBallVolume) {
  EXPECT_NEAR(log_unit_ball_volume(1), std::log(2.0), 1e-14);
  EXPECT_NEAR(log_unit_ball_volume(2), std::log(std::numbers::pi), 1e-14);
  EXPECT_NEAR(log_unit_ball_volume(3), std::log(4.0 * std::numbers::pi / 3.0), 1e-14);
  EXPECT_THROW(log_unit_ball_volume(0), Error);
}

TEST(Rank, Examples) {
  const Sample r = rank_transform(Sample::column({10.0, 30.0, 20.0}));
  EXPECT_DOUBLE_EQ(r.data()(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(r.data()(1, 0), 0.75);
  EXPECT_DOUBLE_EQ(r.data()(2, 0), 0.50);
  const Sample t = rank_transform(Sample::column({5.0, 5.0}));
  EXPECT_DOUBLE_EQ(t.data()(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(t.data()(1, 0), 0.5);
}

TEST(Rank, MonotoneTransformInvariant) {
  const Sample x = ts::gaussian(100, 2, 3);
  RowMatrix m = x.data();
  m.col(0) = m.col(0).array().exp();
  m.col(1) = m.col(1).array().pow(3) * 2.0 + 1.0;
  EXPECT_EQ(rank_transform(x).data(), rank_transform(Sample(m)).data());
}
