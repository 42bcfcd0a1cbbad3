#include <gtest/gtest.h>

#include <algorithm>

#include "ite/estimators.hpp"
#include "support.hpp"

using namespace ite;
namespace ts = testing_support;

namespace {

ErrorCode code_of(const Result<EstimatorConfig>& r) { return r.status().code; }

}  // namespace

TEST(Initialize, MetaCarriesMemberConfiguration) {
  const auto cfg = initialize(MeasureKind::Divergence, "jdistance", true);
  ASSERT_TRUE(cfg.ok());
  EXPECT_EQ(cfg->name(), "jdistance");
  ASSERT_EQ(cfg->members().size(), 1u);
  EXPECT_EQ(cfg->member().name(), "kl_knn_k");
  EXPECT_EQ(cfg->member().kind(), MeasureKind::Divergence);
  EXPECT_EQ(cfg->member().integer("k"), 5);
  EXPECT_TRUE(cfg->member().mult());
}

TEST(Initialize, Errors) {
  EXPECT_EQ(code_of(initialize(MeasureKind::Entropy, "no_such_estimator")), ErrorCode::UnknownEstimator);
  EXPECT_EQ(code_of(initialize(MeasureKind::Entropy, "kl_knn_k")), ErrorCode::UnknownEstimator);
  EXPECT_EQ(code_of(initialize(MeasureKind::Entropy, "shannon_knn_k", true, {{"kk", std::int64_t{3}}})),
            ErrorCode::UnknownParameter);
  EXPECT_EQ(code_of(initialize(MeasureKind::Entropy, "shannon_knn_k", true, {{"k", std::int64_t{0}}})),
            ErrorCode::InvalidParameterValue);
  EXPECT_EQ(code_of(initialize(MeasureKind::Entropy, "renyi_knn_k", true, {{"alpha", 1.0}})),
            ErrorCode::InvalidParameterValue);
  EXPECT_EQ(code_of(initialize(MeasureKind::Entropy, "shannon_knn_k", true, {{"k", std::string("three")}})),
            ErrorCode::InvalidParameterValue);
  EXPECT_EQ(code_of(initialize(MeasureKind::Divergence, "jdistance", true,
                               {{"member", std::string("shannon_knn_k")}})),
            ErrorCode::UnknownEstimator);
  EXPECT_EQ(code_of(initialize(MeasureKind::Divergence, "jdistance", true, {{"other.k", std::int64_t{3}}})),
            ErrorCode::UnknownParameter);
  EXPECT_EQ(code_of(initialize(MeasureKind::Divergence, "jensen_shannon", true, {{"w1", 0.7}})),
            ErrorCode::WeightError);
}

TEST(Initialize, StringOverridesAreCoerced) {
  const auto cfg = initialize(MeasureKind::Entropy, "renyi_knn_k", true,
                              {{"k", std::string("7")}, {"alpha", std::string("0.8")}});
  ASSERT_TRUE(cfg.ok());
  EXPECT_EQ(cfg->integer("k"), 7);
  EXPECT_EQ(cfg->real("alpha"), 0.8);
}

TEST(Registry, ListingIsCompleteAndSorted) {
  const auto entropies = list_estimators(MeasureKind::Entropy);
  std::vector<std::string> names;
  for (const auto& d : entropies) names.push_back(d.name);
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
  for (const char* n : {"shannon_knn_k", "renyi_knn_k", "tsallis_knn_k", "renyi_mst"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  std::size_t total = 0;
  for (MeasureKind k : kAllKinds) {
    const auto listed = list_estimators(k);
    EXPECT_FALSE(listed.empty()) << to_string(k);
    for (const auto& d : listed) EXPECT_EQ(d.kind, k);
    total += listed.size();
  }
  EXPECT_EQ(total, default_registry().all().size());
}

TEST(Estimate, ArityMismatchIsReported) {
  const Sample x = ts::gaussian(100, 1, 1);
  const auto h = initialize(MeasureKind::Entropy, "shannon_knn_k").value();
  const auto kl = initialize(MeasureKind::Divergence, "kl_knn_k").value();
  const auto mi = initialize(MeasureKind::MutualInformation, "hsic").value();
  EXPECT_EQ(estimate(h, x, x).status().code, ErrorCode::ArityMismatch);
  EXPECT_EQ(estimate(kl, x).status().code, ErrorCode::ArityMismatch);
  EXPECT_EQ(estimate(mi, x).status().code, ErrorCode::ArityMismatch);
  EXPECT_FALSE(estimate(kl, std::span<const Sample>()).ok());
}

TEST(Estimate, NumericalErrorsBecomeStatuses) {
  const auto h = initialize(MeasureKind::Entropy, "shannon_knn_k").value();
  const auto r = estimate(h, ts::gaussian(3, 1, 1));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.status().code, ErrorCode::KTooLarge);
  EXPECT_THROW((void)r.value(), Error);
}

TEST(Estimate, MetaMatchesDirectComposition) {
  const Sample x = ts::gaussian(800, 2, 1);
  const Sample y = ts::gaussian(700, 2, 2, 0.5);
  const auto j = initialize(MeasureKind::Divergence, "jdistance").value();
  const auto kl = initialize(MeasureKind::Divergence, "kl_knn_k").value();
  const double direct = estimate(kl, x, y).value() + estimate(kl, y, x).value();
  EXPECT_NEAR(estimate(j, x, y).value(), direct, 1e-12);

  const auto mi = initialize(MeasureKind::MutualInformation, "shannon_mi").value();
  const auto h = initialize(MeasureKind::Entropy, "shannon_knn_k").value();
  const Sample joint = ts::correlated(600, 0.5, 3);
  const Sample blocks[2] = {joint.columns(0, 1), joint.columns(1, 1)};
  const double composed =
      estimate(h, blocks[0]).value() + estimate(h, blocks[1]).value() - estimate(h, joint).value();
  EXPECT_NEAR(estimate(mi, blocks).value(), composed, 1e-12);
}

TEST(Estimate, MemberOverridesReachTheMember) {
  const Sample x = ts::gaussian(600, 1, 1);
  const Sample y = ts::gaussian(600, 1, 2, 0.3);
  const auto j = initialize(MeasureKind::Divergence, "jdistance", true,
                            {{"member", std::string("renyi_knn_k")}, {"member.alpha", 0.8}})
                     .value();
  EXPECT_EQ(j.member().name(), "renyi_knn_k");
  EXPECT_EQ(j.member().real("alpha"), 0.8);
  const double direct = divergence::renyi_knn_k(x, y, 5, 0.8) + divergence::renyi_knn_k(y, x, 5, 0.8);
  EXPECT_NEAR(estimate(j, x, y).value(), direct, 1e-12);
}

TEST(Mult, OnlyMstUsesTheFlag) {
  const Sample x = ts::uniform(500, 2, 4);
  for (const auto* d : default_registry().all()) {
    if (d->name == "renyi_mst") {
      EXPECT_TRUE(d->uses_mult);
    } else {
      EXPECT_FALSE(d->uses_mult) << d->name;
    }
  }
  const auto on = initialize(MeasureKind::Entropy, "renyi_mst", true).value();
  const auto off = initialize(MeasureKind::Entropy, "renyi_mst", false).value();
  const double gap = estimate(on, x).value() - estimate(off, x).value();
  EXPECT_NEAR(gap, entropy::renyi_mst_calibration(2, 0.5), 1e-12);
  const auto h1 = initialize(MeasureKind::Entropy, "shannon_knn_k", true).value();
  const auto h0 = initialize(MeasureKind::Entropy, "shannon_knn_k", false).value();
  EXPECT_EQ(estimate(h1, x).value(), estimate(h0, x).value());
}

TEST(Mult, PropagatesToMembers) {
  const auto js = initialize(MeasureKind::Divergence, "jensen_shannon", false,
                             {{"member", std::string("renyi_mst")}})
                      .value();
  EXPECT_FALSE(js.member().mult());
  const auto ejs = initialize(MeasureKind::DistributionKernel, "ejs", false).value();
  EXPECT_FALSE(ejs.member().member().mult());
}

TEST(Config, ImmutableAndRepeatable) {
  const Sample x = ts::gaussian(400, 2, 1);
  const Sample y = ts::gaussian(400, 2, 2);
  const auto cfg = initialize(MeasureKind::Divergence, "mmd").value();
  const EstimatorConfig before = cfg;
  const double a = estimate(cfg, x, y).value();
  const double b = estimate(cfg, x, y).value();
  EXPECT_EQ(a, b);
  EXPECT_EQ(cfg.params(), before.params());
  const auto other = cfg.with_param("bandwidth", 2.0);
  EXPECT_EQ(cfg.text("bandwidth"), "median");
  EXPECT_EQ(other.real("bandwidth"), 2.0);
  EXPECT_NE(estimate(other, x, y).value(), a);
}

TEST(Config, SeedOnlyWhereDeclared) {
  const auto js = initialize(MeasureKind::Divergence, "jensen_shannon").value();
  EXPECT_EQ(js.with_seed(17).seed(), 17u);
  const auto kl = initialize(MeasureKind::Divergence, "kl_knn_k").value();
  EXPECT_EQ(kl.with_seed(17).params(), kl.params());
}
