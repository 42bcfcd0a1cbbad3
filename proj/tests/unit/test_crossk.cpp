#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "ite/crossk.hpp"
#include "ite/divergence.hpp"
#include "ite/entropy.hpp"
#include "support.hpp"

using namespace ite;
using namespace ite::crossk;
namespace ts = testing_support;

namespace {

const double kNormalEntropy = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);

divergence::DivergenceFn js_member(std::uint64_t seed) {
  return [seed](const Sample& a, const Sample& b) {
    return divergence::jensen_shannon(a, b, {}, [](const Sample& z) { return entropy::shannon_knn_k(z, 3); }, seed);
  };
}

}  // namespace

TEST(CrossEntropy, OraclesAndIdentity) {
  std::vector<double> same, gap;
  for (int s = 0; s < 10; ++s) {
    const Sample x = ts::gaussian(10000, 1, 2 * s);
    const Sample y = ts::gaussian(10000, 1, 2 * s + 1);
    const Sample q = ts::gaussian(10000, 1, 100 + s, 1.0);
    same.push_back(cross_entropy_knn_k(x, y));
    gap.push_back(cross_entropy_knn_k(x, q) - entropy::shannon_knn_k(x) - divergence::kl_knn_k(x, q));
  }
  EXPECT_NEAR(ts::median(same), kNormalEntropy, 0.05);
  EXPECT_NEAR(ts::median(gap), 0.0, 0.05);
}

TEST(CrossEntropy, ScalingLawAndErrors) {
  const Sample x = ts::gaussian(400, 2, 1);
  const Sample y = ts::gaussian(300, 2, 2);
  const double base = cross_entropy_knn_k(x, y);
  for (double a : {0.3, 2.0, 9.0}) EXPECT_NEAR(cross_entropy_knn_k(x.scaled(a), y.scaled(a)), base + 2 * std::log(a), 1e-10);
  EXPECT_THROW((void)cross_entropy_knn_k(x, ts::gaussian(10, 3, 1)), Error);
  EXPECT_THROW((void)cross_entropy_knn_k(x, ts::gaussian(3, 2, 1), 5), Error);
  EXPECT_THROW((void)cross_entropy_knn_k(x, x, 1), Error);
}

TEST(ExpectedKernel, RangeSymmetryAndDiagonal) {
  const Sample x = ts::gaussian(200, 2, 1);
  const Sample y = ts::gaussian(150, 2, 2, 3.0);
  const double kxy = expected_kernel(x, y, 1.0);
  EXPECT_EQ(kxy, expected_kernel(y, x, 1.0));
  EXPECT_GT(kxy, 0.0);
  EXPECT_LE(kxy, 1.0);
  EXPECT_GE(expected_kernel(x, x, 0.01), 1.0 / 200.0);
  EXPECT_NEAR(kxy, ts::kernel_mean(x, y, 1.0), 1e-13);
  EXPECT_THROW((void)expected_kernel(x, y, 0.0), Error);
  EXPECT_THROW((void)expected_kernel(x, ts::gaussian(5, 1, 1), 1.0), Error);
}

TEST(EjsKernel, RangeNearOneAndDeterminism) {
  const Sample x = ts::gaussian(3000, 1, 1);
  for (double shift : {0.0, 1.0, 100.0}) {
    const double k = ejs_kernel(x, ts::gaussian(3000, 1, 2, shift), 2.0, js_member(5));
    EXPECT_GE(k, std::pow(2.0, -2.0));
    EXPECT_LE(k, 1.0);
  }
  const double same = ejs_kernel(ts::gaussian(10000, 1, 3), ts::gaussian(10000, 1, 4), 1.0, js_member(1));
  EXPECT_GE(same, std::exp(-0.05));
  EXPECT_EQ(ejs_kernel(x, x.scaled(1.5), 1.0, js_member(3)), ejs_kernel(x, x.scaled(1.5), 1.0, js_member(3)));
  EXPECT_THROW((void)ejs_kernel(x, x, 0.0, js_member(1)), Error);
}

TEST(Gram, SymmetryPerPairSeedsAndSingleSet) {
  std::vector<Sample> sets;
  for (int s = 0; s < 5; ++s) sets.push_back(ts::gaussian(100 + 10 * s, 2, s, 0.2 * s));
  std::vector<std::tuple<Index, Index, std::uint64_t>> calls;
  const PairKernelFn kernel = [&](const Sample& a, const Sample& b, std::uint64_t seed) {
    calls.emplace_back(a.n(), b.n(), seed);
    return expected_kernel(a, b, 1.0);
  };
  const auto g = gram_matrix(sets, kernel, 9, "expected");
  EXPECT_EQ(calls.size(), 15u);
  EXPECT_EQ(g.values, g.values.transpose());
  for (const auto& [na, nb, seed] : calls) {
    const auto i = static_cast<std::uint64_t>((na - 100) / 10);
    const auto j = static_cast<std::uint64_t>((nb - 100) / 10);
    EXPECT_EQ(seed, derive_seed(9, i, j));
  }
  const auto one = gram_matrix(std::vector<Sample>{sets[0]}, kernel, 0);
  EXPECT_EQ(one.values.rows(), 1);
  EXPECT_TRUE(psd_check(one, 1e-12).psd);
}

TEST(Gram, ExpectedKernelIsPsdAndRepeatedSetIsRankOne) {
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Sample> sets;
    for (int s = 0; s < 10; ++s) sets.push_back(ts::gaussian(200, 2, derive_seed(trial, s), 0.3 * s));
    const auto g = gram_matrix(sets, [](const Sample& a, const Sample& b, std::uint64_t) {
      return expected_kernel(a, b, 1.0);
    }, 0);
    const auto r = psd_check(g, 1e-6);
    EXPECT_TRUE(r.psd);
    EXPECT_GE(r.min_eigenvalue, -1e-8);
  }
  const Sample x = ts::gaussian(300, 2, 1);
  const std::vector<Sample> repeated(4, x);
  const auto g = gram_matrix(repeated, [](const Sample& a, const Sample& b, std::uint64_t) {
    return expected_kernel(a, b, 1.0);
  }, 0);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(g.values);
  EXPECT_NEAR(es.eigenvalues()(3), 4.0 * expected_kernel(x, x, 1.0), 1e-12);
  EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-12);
}

TEST(Psd, SmallMatricesAndErrors) {
  const auto id = psd_check(Matrix::Identity(3, 3), 1e-12);
  EXPECT_TRUE(id.psd);
  EXPECT_NEAR(id.min_eigenvalue, 1.0, 1e-15);
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  const auto r = psd_check(m, 1e-6);
  EXPECT_FALSE(r.psd);
  EXPECT_NEAR(r.min_eigenvalue, -1.0, 1e-12);
  m(0, 1) = 2.1;
  try {
    (void)psd_check(m, 1e-6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonSymmetric);
  }
  EXPECT_THROW((void)psd_check(Matrix(2, 3), 1e-6), Error);
}
