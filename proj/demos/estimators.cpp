// Base estimators on Gaussian samples, next to their closed forms.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "ite/ite.hpp"

namespace {

ite::Sample normal_sample(ite::Index n, ite::Index d, double mean, std::uint64_t seed) {
  ite::Rng rng(seed);
  std::normal_distribution<double> normal(mean, 1.0);
  ite::RowMatrix m(n, d);
  for (ite::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return ite::Sample(std::move(m));
}

}  // namespace

int main() {
  using ite::MeasureKind;
  const auto x = normal_sample(5000, 2, 0.0, 1);
  const auto y = normal_sample(5000, 2, 1.0, 2);

  const double h_true = std::log(2.0 * std::numbers::pi * std::numbers::e);
  const auto h = ite::initialize(MeasureKind::Entropy, "shannon_knn_k").value();
  std::printf("H(N(0, I_2))        estimate %8.4f   exact %8.4f\n", ite::estimate(h, x).value(), h_true);

  const auto kl = ite::initialize(MeasureKind::Divergence, "kl_knn_k").value();
  std::printf("KL(N(0,I)||N(1,I))  estimate %8.4f   exact %8.4f\n", ite::estimate(kl, x, y).value(), 1.0);

  const auto mmd = ite::initialize(MeasureKind::Divergence, "mmd", true, {{"variant", std::string("unbiased")}}).value();
  std::printf("MMD^2 (unbiased)    estimate %8.4f\n", ite::estimate(mmd, x, y).value());

  const auto bad = ite::initialize(MeasureKind::Entropy, "renyi_knn_k", true, {{"alpha", 1.0}});
  if (!bad) std::printf("rejected config: %s\n", bad.status().message.c_str());
  return 0;
}
