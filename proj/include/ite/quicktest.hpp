#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ite/estimators.hpp"
#include "ite/io.hpp"
#include "json.hpp"

/// Analytic value vs. estimate battery. Every case draws fresh samples per
/// seed; the reported estimate and error are medians over seeds.
namespace ite::quicktest {

namespace sampling {

inline Sample gaussian(Index n, Index d, double mean, Rng& rng) {
  std::normal_distribution<double> normal(mean, 1.0);
  RowMatrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = normal(rng);
  return Sample(std::move(m));
}

inline Sample uniform(Index n, Index d, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  RowMatrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = u(rng);
  return Sample(std::move(m));
}

/// Standard bivariate Gaussian with correlation rho.
inline Sample correlated_pair(Index n, double rho, Rng& rng) {
  std::normal_distribution<double> normal;
  RowMatrix m(n, 2);
  const double s = std::sqrt(1.0 - rho * rho);
  for (Index i = 0; i < n; ++i) {
    const double a = normal(rng);
    const double b = normal(rng);
    m(i, 0) = a;
    m(i, 1) = rho * a + s * b;
  }
  return Sample(std::move(m));
}

}  // namespace sampling

struct Case {
  std::string suite;
  std::string measure;  // kind/name
  std::string params;
  std::string distribution;
  double analytic;
  std::function<double(Index n, Rng& rng)> run;
};

namespace detail {

inline EstimatorConfig config(MeasureKind kind, std::string_view name, ParamMap overrides = {}) {
  return initialize(kind, name, true, std::move(overrides)).value();
}

inline std::function<double(Index, Rng&)> one_sample(EstimatorConfig cfg,
                                                     std::function<Sample(Index, Rng&)> draw) {
  return [cfg = std::move(cfg), draw = std::move(draw)](Index n, Rng& rng) {
    return estimate(cfg, draw(n, rng)).value();
  };
}

inline std::function<double(Index, Rng&)> two_sample(EstimatorConfig cfg,
                                                     std::function<Sample(Index, Rng&)> draw_x,
                                                     std::function<Sample(Index, Rng&)> draw_y) {
  return [cfg = std::move(cfg), dx = std::move(draw_x), dy = std::move(draw_y)](Index n, Rng& rng) {
    const Sample x = dx(n, rng);
    const Sample y = dy(n, rng);
    return estimate(cfg, x, y).value();
  };
}

inline std::function<double(Index, Rng&)> two_blocks(EstimatorConfig cfg,
                                                     std::function<Sample(Index, Rng&)> draw) {
  return [cfg = std::move(cfg), draw = std::move(draw)](Index n, Rng& rng) {
    const Sample joint = draw(n, rng);
    const auto blocks = dependence::split_blocks(joint, std::vector<Index>{1, 1});
    return estimate(cfg, blocks).value();
  };
}

inline auto gauss(Index d, double mean = 0.0) {
  return [d, mean](Index n, Rng& rng) { return sampling::gaussian(n, d, mean, rng); };
}
inline auto unif(Index d, double lo, double hi) {
  return [d, lo, hi](Index n, Rng& rng) { return sampling::uniform(n, d, lo, hi, rng); };
}
inline auto corr(double rho) {
  return [rho](Index n, Rng& rng) { return sampling::correlated_pair(n, rho, rng); };
}

}  // namespace detail

inline const std::vector<std::string>& suites() {
  static const std::vector<std::string> names{"entropy", "divergence", "mi"};
  return names;
}

/// The fixed battery of one suite ("all" concatenates every suite).
inline std::vector<Case> cases(std::string_view suite) {
  using detail::config;
  using K = MeasureKind;
  const double pi = std::numbers::pi;
  const double h_normal = 0.5 * std::log(2.0 * pi * std::numbers::e);
  std::vector<Case> out;
  const bool all = suite == "all";

  if (all || suite == "entropy") {
    const double a = 0.9;
    out.push_back({"entropy", "entropy/shannon_knn_k", "k=3", "N(0,1)", h_normal,
                   detail::one_sample(config(K::Entropy, "shannon_knn_k", {{"k", std::int64_t{3}}}),
                                      detail::gauss(1))});
    out.push_back({"entropy", "entropy/shannon_knn_k", "k=3", "N(0,I_3)", 3.0 * h_normal,
                   detail::one_sample(config(K::Entropy, "shannon_knn_k", {{"k", std::int64_t{3}}}),
                                      detail::gauss(3))});
    out.push_back({"entropy", "entropy/shannon_knn_k", "k=3", "U[0,1]^2", 0.0,
                   detail::one_sample(config(K::Entropy, "shannon_knn_k", {{"k", std::int64_t{3}}}),
                                      detail::unif(2, 0.0, 1.0))});
    out.push_back({"entropy", "entropy/renyi_knn_k", "k=5,alpha=0.9", "N(0,1)",
                   0.5 * std::log(2.0 * pi) - std::log(a) / (2.0 * (1.0 - a)),
                   detail::one_sample(config(K::Entropy, "renyi_knn_k", {{"k", std::int64_t{5}}, {"alpha", a}}),
                                      detail::gauss(1))});
    out.push_back({"entropy", "entropy/tsallis_knn_k", "k=5,alpha=2", "U[0,1]", 0.0,
                   detail::one_sample(config(K::Entropy, "tsallis_knn_k", {{"k", std::int64_t{5}}, {"alpha", 2.0}}),
                                      detail::unif(1, 0.0, 1.0))});
    out.push_back({"entropy", "entropy/tsallis_knn_k", "k=5,alpha=2", "U[0,2]", 0.5,
                   detail::one_sample(config(K::Entropy, "tsallis_knn_k", {{"k", std::int64_t{5}}, {"alpha", 2.0}}),
                                      detail::unif(1, 0.0, 2.0))});
    out.push_back({"entropy", "entropy/renyi_mst", "alpha=0.5,mult=1", "U[0,1]^2", 0.0,
                   detail::one_sample(config(K::Entropy, "renyi_mst", {{"alpha", 0.5}}), detail::unif(2, 0.0, 1.0))});
    out.push_back({"entropy", "cross/cross_entropy_knn_k", "k=5", "N(0,1) vs N(0,1)", h_normal,
                   detail::two_sample(config(K::CrossQuantity, "cross_entropy_knn_k"), detail::gauss(1),
                                      detail::gauss(1))});
  }
  if (all || suite == "divergence") {
    out.push_back({"divergence", "divergence/kl_knn_k", "k=5", "N(0,1) vs N(1,1)", 0.5,
                   detail::two_sample(config(K::Divergence, "kl_knn_k"), detail::gauss(1), detail::gauss(1, 1.0))});
    out.push_back({"divergence", "divergence/kl_knn_k", "k=5", "N(0,I_2) vs N(0,I_2)", 0.0,
                   detail::two_sample(config(K::Divergence, "kl_knn_k"), detail::gauss(2), detail::gauss(2))});
    out.push_back({"divergence", "divergence/renyi_knn_k", "k=5,alpha=0.5", "N(0,1) vs N(1,1)", 0.25,
                   detail::two_sample(config(K::Divergence, "renyi_knn_k", {{"alpha", 0.5}}), detail::gauss(1),
                                      detail::gauss(1, 1.0))});
    out.push_back({"divergence", "divergence/renyi_knn_k", "k=5,alpha=0.8", "N(0,1) vs N(0,1)", 0.0,
                   detail::two_sample(config(K::Divergence, "renyi_knn_k", {{"alpha", 0.8}}), detail::gauss(1),
                                      detail::gauss(1))});
    out.push_back({"divergence", "divergence/tsallis_knn_k", "k=5,alpha=2", "N(0,1) vs N(0.5,1)",
                   std::expm1(0.25),
                   detail::two_sample(config(K::Divergence, "tsallis_knn_k", {{"alpha", 2.0}}), detail::gauss(1),
                                      detail::gauss(1, 0.5))});
    out.push_back({"divergence", "divergence/l2_knn_k", "k=5", "U[0,1] vs U[0.5,1.5]", 1.0,
                   detail::two_sample(config(K::Divergence, "l2_knn_k"), detail::unif(1, 0.0, 1.0),
                                      detail::unif(1, 0.5, 1.5))});
    out.push_back({"divergence", "divergence/jdistance", "member=kl_knn_k", "N(0,1) vs N(1,1)", 1.0,
                   detail::two_sample(config(K::Divergence, "jdistance"), detail::gauss(1), detail::gauss(1, 1.0))});
    out.push_back({"divergence", "divergence/jensen_shannon", "w1=0.5,w2=0.5", "N(0,1) vs N(0,1)", 0.0,
                   detail::two_sample(config(K::Divergence, "jensen_shannon"), detail::gauss(1), detail::gauss(1))});
  }
  if (all || suite == "mi") {
    const double rho = 0.8;
    out.push_back({"mi", "mi/shannon_mi", "member=shannon_knn_k", "N(0,[1 .8;.8 1])",
                   -0.5 * std::log(1.0 - rho * rho),
                   detail::two_blocks(config(K::MutualInformation, "shannon_mi"), detail::corr(rho))});
    out.push_back({"mi", "mi/shannon_mi", "member=shannon_knn_k", "N(0,I_2)", 0.0,
                   detail::two_blocks(config(K::MutualInformation, "shannon_mi"), detail::corr(0.0))});
    out.push_back({"mi", "mi/hsic", "bandwidth=median", "N(0,I_2)", 0.0,
                   detail::two_blocks(config(K::MutualInformation, "hsic"), detail::corr(0.0))});
    out.push_back({"mi", "mi/dcor", "", "N(0,I_2)", 0.0,
                   detail::two_blocks(config(K::MutualInformation, "dcor"), detail::corr(0.0))});
    out.push_back({"mi", "association/spearman_rho", "variant=rho3", "N(0,[1 .8;.8 1])",
                   6.0 / pi * std::asin(rho / 2.0),
                   detail::one_sample(config(K::Association, "spearman_rho"), detail::corr(rho))});
    out.push_back({"mi", "association/blomqvist_beta", "", "N(0,[1 .8;.8 1])", 2.0 / pi * std::asin(rho),
                   detail::one_sample(config(K::Association, "blomqvist_beta"), detail::corr(rho))});
  }
  ite::detail::require(!out.empty(), ErrorCode::InvalidParameterValue,
                       "unknown suite '" + std::string(suite) + "'");
  return out;
}

struct Row {
  std::string measure;
  std::string params;
  std::string distribution;
  double analytic = 0.0;
  double estimate = 0.0;
  double abs_error = 0.0;
  bool pass = false;
  double runtime_ms = 0.0;
};

struct Report {
  std::string suite;
  Index n = 0;
  int seeds = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::vector<Row> rows;

  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass; });
  }
};

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Runs a suite. Case c, replicate s draws its data from derive_seed(seed, c, s).
inline Report run(std::string_view suite, Index n, int seeds, double tolerance, std::uint64_t seed = 0) {
  ite::detail::require(n >= 10, ErrorCode::InvalidParameterValue, "n must be at least 10");
  ite::detail::require(seeds >= 1, ErrorCode::InvalidParameterValue, "need at least one seed");
  ite::detail::require(tolerance >= 0.0, ErrorCode::InvalidParameterValue, "tolerance must be nonnegative");
  Report report{std::string(suite), n, seeds, seed, tolerance, {}};
  const auto battery = cases(suite);
  for (std::size_t c = 0; c < battery.size(); ++c) {
    const auto& tc = battery[c];
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> estimates;
    std::vector<double> errors;
    for (int s = 0; s < seeds; ++s) {
      Rng rng(derive_seed(seed, c, static_cast<std::uint64_t>(s)));
      const double v = tc.run(n, rng);
      estimates.push_back(v);
      errors.push_back(std::abs(v - tc.analytic));
    }
    Row row{tc.measure, tc.params, tc.distribution, tc.analytic, median(estimates), median(errors), false, 0.0};
    row.pass = row.abs_error <= tolerance;
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.rows.push_back(row);
  }
  return report;
}

/// CSV report. Runtimes vary between runs, so they are only included on request.
inline std::string to_csv(const Report& r, bool timing = false) {
  std::string out = "measure,params,distribution,analytic,estimate,abs_error,pass";
  out += timing ? ",runtime_ms\n" : "\n";
  auto quote = [](const std::string& s) { return "\"" + s + "\""; };
  for (const auto& row : r.rows) {
    out += row.measure + "," + quote(row.params) + "," + quote(row.distribution) + "," +
           io::format_real(row.analytic) + "," + io::format_real(row.estimate) + "," +
           io::format_real(row.abs_error) + "," + (row.pass ? "true" : "false");
    if (timing) out += "," + io::format_real(row.runtime_ms);
    out += "\n";
  }
  return out;
}

inline nlohmann::ordered_json to_json(const Report& r, bool timing = false) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["suite"] = r.suite;
  j["n"] = r.n;
  j["seeds"] = r.seeds;
  j["seed"] = r.seed;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.all_pass();
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json e;
    e["measure"] = row.measure;
    e["params"] = row.params;
    e["distribution"] = row.distribution;
    e["analytic"] = row.analytic;
    e["estimate"] = row.estimate;
    e["abs_error"] = row.abs_error;
    e["pass"] = row.pass;
    if (timing) e["runtime_ms"] = row.runtime_ms;
    rows.push_back(std::move(e));
  }
  return j;
}

}  // namespace ite::quicktest
