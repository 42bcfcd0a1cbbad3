// Meta estimators built from members, and what `mult` changes.

#include <cstdio>
#include <random>

#include "ite/ite.hpp"

int main() {
  using ite::MeasureKind;
  ite::Rng rng(7);
  std::normal_distribution<double> normal;
  ite::RowMatrix joint(4000, 2);
  for (ite::Index i = 0; i < joint.rows(); ++i) {
    const double a = normal(rng);
    joint(i, 0) = a;
    joint(i, 1) = 0.6 * a + 0.8 * normal(rng);
  }
  const ite::Sample s(std::move(joint));
  const ite::Sample blocks[2] = {s.columns(0, 1), s.columns(1, 1)};

  for (const char* member : {"shannon_knn_k", "renyi_knn_k"}) {
    const auto mi = ite::initialize(MeasureKind::MutualInformation, "shannon_mi", true,
                                    {{"member", std::string(member)}})
                        .value();
    std::printf("shannon_mi with member %-14s %.4f\n", member, ite::estimate(mi, blocks).value());
  }

  const auto j = ite::initialize(MeasureKind::Divergence, "jdistance", true,
                                 {{"member", std::string("renyi_knn_k")}, {"member.alpha", 0.8}})
                     .value();
  std::printf("jdistance over renyi_knn_k(alpha=0.8): %.4f\n", ite::estimate(j, blocks[0], blocks[1]).value());

  for (bool mult : {true, false}) {
    const auto h = ite::initialize(MeasureKind::Entropy, "renyi_mst", mult).value();
    std::printf("renyi_mst mult=%d: %.4f\n", mult ? 1 : 0, ite::estimate(h, blocks[0]).value());
  }
  return 0;
}
