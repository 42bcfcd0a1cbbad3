#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ite/crossk.hpp"
#include "ite/dependence.hpp"
#include "ite/divergence.hpp"
#include "ite/entropy.hpp"
#include "ite/framework.hpp"

namespace ite {

namespace builtin {

inline void require_param(bool ok, const std::string& message) {
  ite::detail::require(ok, ErrorCode::InvalidParameterValue, message);
}

inline void validate_k(const EstimatorConfig& c, std::int64_t min_k = 1) {
  require_param(c.integer("k") >= min_k, "k must be >= " + std::to_string(min_k));
}

inline void validate_alpha(const EstimatorConfig& c) {
  const double a = c.real("alpha");
  require_param(std::isfinite(a) && a > 0.0 && a != 1.0, "alpha must be positive and != 1");
}

inline Bandwidth bandwidth_param(const EstimatorConfig& c, std::string_view key) {
  const auto& v = c.param(key);
  if (const auto* s = std::get_if<std::string>(&v)) {
    ite::detail::require(*s == "median", ErrorCode::InvalidParameterValue,
                    std::string(key) + " must be a positive number or 'median'");
    return Bandwidth::median();
  }
  return Bandwidth::fixed(c.real(key));
}

inline divergence::MixtureWeights weights_param(const EstimatorConfig& c) {
  return {c.real("w1"), c.real("w2")};
}

inline Index k_of(const EstimatorConfig& c) { return static_cast<Index>(c.integer("k")); }

/// Member estimator as a plain callable.
inline divergence::EntropyFn entropy_member(const Registry& r, const EstimatorConfig& m) {
  return [&r, m](const Sample& s) { return r.run(m, std::span<const Sample>(&s, 1)); };
}

inline divergence::DivergenceFn two_sample_member(const Registry& r, const EstimatorConfig& m) {
  return [&r, m](const Sample& x, const Sample& y) {
    const Sample args[2] = {x, y};
    return r.run(m, args);
  };
}

inline void require_two_blocks(std::span<const Sample> args) {
  ite::detail::require(args.size() == 2, ErrorCode::BlockError,
                  "this estimator is defined for exactly two blocks");
  dependence::check_blocks(args);
}

inline void register_entropy(Registry& r) {
  r.add({MeasureKind::Entropy, "shannon_knn_k", Arity::One, {{"k", std::int64_t{3}}}, {}, false,
         "Kozachenko-Leonenko k-nearest-neighbor Shannon entropy",
         [](const EstimatorConfig& c) { validate_k(c); },
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           return entropy::shannon_knn_k(a[0], k_of(c));
         }});
  auto renyi_validate = [](const EstimatorConfig& c) {
    validate_k(c);
    validate_alpha(c);
    require_param(static_cast<double>(c.integer("k")) + 1.0 - c.real("alpha") > 0.0,
                  "k must exceed alpha - 1");
  };
  r.add({MeasureKind::Entropy, "renyi_knn_k", Arity::One,
         {{"k", std::int64_t{5}}, {"alpha", 0.99}}, {}, false,
         "k-nearest-neighbor Renyi entropy of order alpha", renyi_validate,
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           return entropy::renyi_knn_k(a[0], k_of(c), c.real("alpha"));
         }});
  r.add({MeasureKind::Entropy, "tsallis_knn_k", Arity::One,
         {{"k", std::int64_t{5}}, {"alpha", 0.99}}, {}, false,
         "k-nearest-neighbor Tsallis entropy of order alpha", renyi_validate,
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           return entropy::tsallis_knn_k(a[0], k_of(c), c.real("alpha"));
         }});
  r.add({MeasureKind::Entropy, "renyi_mst", Arity::One, {{"alpha", 0.5}}, {}, true,
         "minimum-spanning-tree Renyi entropy; mult=0 omits the unknown additive constant",
         [](const EstimatorConfig& c) {
           const double a = c.real("alpha");
           require_param(a > 0.0 && a < 1.0, "alpha must lie in (0, 1)");
         },
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           return entropy::renyi_mst(a[0], c.real("alpha"), c.mult());
         }});
}

inline void register_divergence(Registry& r) {
  r.add({MeasureKind::Divergence, "kl_knn_k", Arity::Two, {{"k", std::int64_t{5}}}, {}, false,
         "k-nearest-neighbor Kullback-Leibler divergence",
         [](const EstimatorConfig& c) { validate_k(c); },
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           return divergence::kl_knn_k(a[0], a[1], k_of(c));
         }});
  auto alpha_validate = [](const EstimatorConfig& c) {
    validate_k(c);
    validate_alpha(c);
    const auto k = static_cast<double>(c.integer("k"));
    const double al = c.real("alpha");
    require_param(k - al + 1.0 > 0.0 && k + al - 1.0 > 0.0, "k must exceed |alpha - 1|");
  };
  r.add({MeasureKind::Divergence, "renyi_knn_k", Arity::Two,
         {{"k", std::int64_t{5}}, {"alpha", 0.99}}, {}, false,
         "k-nearest-neighbor Renyi divergence of order alpha", alpha_validate,
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           return divergence::renyi_knn_k(a[0], a[1], k_of(c), c.real("alpha"));
         }});
  r.add({MeasureKind::Divergence, "tsallis_knn_k", Arity::Two,
         {{"k", std::int64_t{5}}, {"alpha", 0.99}}, {}, false,
         "k-nearest-neighbor Tsallis divergence of order alpha", alpha_validate,
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           return divergence::tsallis_knn_k(a[0], a[1], k_of(c), c.real("alpha"));
         }});
  r.add({MeasureKind::Divergence, "l2_knn_k", Arity::Two, {{"k", std::int64_t{5}}}, {}, false,
         "k-nearest-neighbor L2 divergence, symmetric, clipped at zero",
         [](const EstimatorConfig& c) { validate_k(c, 2); },
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           return divergence::l2_knn_k(a[0], a[1], k_of(c));
         }});
  r.add({MeasureKind::Divergence, "mmd", Arity::Two,
         {{"bandwidth", std::string("median")}, {"variant", std::string("biased")}, {"seed", std::int64_t{0}}},
         {}, false,
         "Gaussian-kernel maximum mean discrepancy (biased: MMD; unbiased: signed MMD^2)",
         [](const EstimatorConfig& c) {
           (void)bandwidth_param(c, "bandwidth");
           const auto v = c.text("variant");
           require_param(v == "biased" || v == "unbiased", "variant must be biased or unbiased");
         },
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           const auto variant = c.text("variant") == "unbiased" ? divergence::MmdVariant::Unbiased
                                                                 : divergence::MmdVariant::Biased;
           return divergence::mmd(a[0], a[1], bandwidth_param(c, "bandwidth"), variant, c.seed());
         }});
  r.add({MeasureKind::Divergence, "energy", Arity::Two, {}, {}, false,
         "energy distance (V-statistic)", nullptr,
         [](const Registry&, const EstimatorConfig&, std::span<const Sample> a) {
           return divergence::energy_distance(a[0], a[1]);
         }});
  r.add({MeasureKind::Divergence, "jdistance", Arity::Two,
         {{"member", std::string("kl_knn_k")}},
         {{"member", MeasureKind::Divergence}}, false,
         "J-distance: member(X,Y) + member(Y,X)", nullptr,
         [](const Registry& reg, const EstimatorConfig& c, std::span<const Sample> a) {
           return divergence::jdistance(a[0], a[1], two_sample_member(reg, c.member()));
         }});
  r.add({MeasureKind::Divergence, "jensen_shannon", Arity::Two,
         {{"member", std::string("shannon_knn_k")}, {"w1", 0.5}, {"w2", 0.5}, {"seed", std::int64_t{0}}},
         {{"member", MeasureKind::Entropy}}, false,
         "Jensen-Shannon divergence H(mixture) - w1 H(X) - w2 H(Y)",
         [](const EstimatorConfig& c) { divergence::check_weights(weights_param(c)); },
         [](const Registry& reg, const EstimatorConfig& c, std::span<const Sample> a) {
           return divergence::jensen_shannon(a[0], a[1], weights_param(c),
                                             entropy_member(reg, c.member()), c.seed());
         }});
}

inline void register_dependence(Registry& r) {
  r.add({MeasureKind::MutualInformation, "shannon_mi", Arity::Blocks,
         {{"member", std::string("shannon_knn_k")}},
         {{"member", MeasureKind::Entropy}}, false,
         "Shannon mutual information sum_m H(y^m) - H(y)", nullptr,
         [](const Registry& reg, const EstimatorConfig& c, std::span<const Sample> a) {
           return dependence::shannon_mi(a, entropy_member(reg, c.member()));
         }});
  r.add({MeasureKind::MutualInformation, "hsic", Arity::Blocks,
         {{"bandwidth1", std::string("median")}, {"bandwidth2", std::string("median")}, {"seed", std::int64_t{0}}},
         {}, false, "Hilbert-Schmidt independence criterion (biased, Gaussian kernels)",
         [](const EstimatorConfig& c) {
           (void)bandwidth_param(c, "bandwidth1");
           (void)bandwidth_param(c, "bandwidth2");
         },
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           require_two_blocks(a);
           return dependence::hsic(a[0], a[1], bandwidth_param(c, "bandwidth1"),
                                   bandwidth_param(c, "bandwidth2"), c.seed());
         }});
  r.add({MeasureKind::MutualInformation, "dcov", Arity::Blocks, {}, {}, false,
         "distance covariance", nullptr,
         [](const Registry&, const EstimatorConfig&, std::span<const Sample> a) {
           require_two_blocks(a);
           return dependence::distance_covariance(a[0], a[1]);
         }});
  r.add({MeasureKind::MutualInformation, "dcor", Arity::Blocks, {}, {}, false,
         "distance correlation", nullptr,
         [](const Registry&, const EstimatorConfig&, std::span<const Sample> a) {
           require_two_blocks(a);
           return dependence::distance_correlation(a[0], a[1]);
         }});
  r.add({MeasureKind::Association, "spearman_rho", Arity::One, {{"variant", std::string("rho3")}},
         {}, false, "multivariate Spearman's rho on the empirical copula",
         [](const EstimatorConfig& c) {
           const auto v = c.text("variant");
           require_param(v == "rho1" || v == "rho2" || v == "rho3", "variant must be rho1, rho2 or rho3");
         },
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           const auto v = c.text("variant");
           const auto variant = v == "rho1"   ? dependence::SpearmanVariant::Rho1
                                : v == "rho2" ? dependence::SpearmanVariant::Rho2
                                              : dependence::SpearmanVariant::Rho3;
           return dependence::spearman_rho(a[0], variant);
         }});
  r.add({MeasureKind::Association, "blomqvist_beta", Arity::One, {}, {}, false,
         "multivariate Blomqvist's beta", nullptr,
         [](const Registry&, const EstimatorConfig&, std::span<const Sample> a) {
           return dependence::blomqvist_beta(a[0]);
         }});
}

inline void register_crossk(Registry& r) {
  r.add({MeasureKind::CrossQuantity, "cross_entropy_knn_k", Arity::Two, {{"k", std::int64_t{5}}},
         {}, false, "k-nearest-neighbor cross-entropy",
         [](const EstimatorConfig& c) { validate_k(c); },
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           return crossk::cross_entropy_knn_k(a[0], a[1], k_of(c));
         }});
  r.add({MeasureKind::DistributionKernel, "expected", Arity::Two, {{"bandwidth", 1.0}}, {}, false,
         "expected kernel (mean Gaussian kernel between samples)",
         [](const EstimatorConfig& c) { (void)Bandwidth::fixed(c.real("bandwidth")); },
         [](const Registry&, const EstimatorConfig& c, std::span<const Sample> a) {
           return crossk::expected_kernel(a[0], a[1], c.real("bandwidth"));
         }});
  r.add({MeasureKind::DistributionKernel, "ejs", Arity::Two,
         {{"u", 1.0}, {"member", std::string("jensen_shannon")}, {"seed", std::int64_t{0}}},
         {{"member", MeasureKind::Divergence}}, false,
         "exponentiated Jensen-Shannon kernel exp(-u JS)",
         [](const EstimatorConfig& c) { require_param(c.real("u") > 0.0, "u must be positive"); },
         [](const Registry& reg, const EstimatorConfig& c, std::span<const Sample> a) {
           const EstimatorConfig js = c.member().with_seed(c.seed());
           return crossk::ejs_kernel(a[0], a[1], c.real("u"), two_sample_member(reg, js));
         }});
}

}  // namespace builtin

/// Registry holding every estimator shipped with the library.
inline const Registry& default_registry() {
  static const Registry registry = [] {
    Registry r;
    builtin::register_entropy(r);
    builtin::register_divergence(r);
    builtin::register_dependence(r);
    builtin::register_crossk(r);
    return r;
  }();
  return registry;
}

/// Builds an immutable estimator configuration, e.g.
///   initialize(MeasureKind::Divergence, "jdistance", true)
inline Result<EstimatorConfig> initialize(const Registry& registry, MeasureKind kind,
                                          std::string_view name, bool mult = true,
                                          const ParamMap& overrides = {}) {
  return capture([&] { return registry.build(kind, name, mult, overrides); });
}

inline Result<EstimatorConfig> initialize(MeasureKind kind, std::string_view name, bool mult = true,
                                          const ParamMap& overrides = {}) {
  return initialize(default_registry(), kind, name, mult, overrides);
}

/// Same call shape for base and meta estimators.
inline Result<double> estimate(const Registry& registry, const EstimatorConfig& config,
                               std::span<const Sample> args) {
  return capture([&] { return registry.run(config, args); });
}

inline Result<double> estimate(const EstimatorConfig& config, std::span<const Sample> args) {
  return estimate(default_registry(), config, args);
}

inline Result<double> estimate(const EstimatorConfig& config, const Sample& x) {
  return estimate(config, std::span<const Sample>(&x, 1));
}

inline Result<double> estimate(const EstimatorConfig& config, const Sample& x, const Sample& y) {
  const Sample args[2] = {x, y};
  return estimate(config, args);
}

inline std::vector<EstimatorDescriptor> list_estimators(MeasureKind kind) {
  return default_registry().list(kind);
}

}  // namespace ite
