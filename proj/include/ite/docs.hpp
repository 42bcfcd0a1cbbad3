#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ite/estimators.hpp"

/// Structured math notes for every registered estimator, rendered to markdown.
namespace ite::docs {

struct ParamDoc {
  std::string name;
  std::string description;
};

struct EstimatorDoc {
  MeasureKind kind;
  std::string name;
  std::string formula;
  std::vector<ParamDoc> params;
  std::string constants;  // known constants, the role of `mult`
  std::vector<std::string> references;
};

inline std::vector<EstimatorDoc> builtin_docs() {
  const std::string kl87 =
      "L. F. Kozachenko, N. N. Leonenko. Sample estimate of the entropy of a random vector. "
      "Problems of Information Transmission 23(2):95-101, 1987.";
  const std::string lps08 =
      "N. Leonenko, L. Pronzato, V. Savani. A class of Renyi information estimators for "
      "multidimensional densities. Annals of Statistics 36(5):2153-2182, 2008.";
  const std::string ps11 =
      "B. Poczos, J. Schneider. On the estimation of alpha-divergences. AISTATS, 2011.";
  const std::string pxs11 =
      "B. Poczos, L. Xiong, J. Schneider. Nonparametric divergence estimation with applications "
      "to machine learning on distributions. UAI, 2011.";
  const std::string srb07 =
      "G. J. Szekely, M. L. Rizzo, N. K. Bakirov. Measuring and testing dependence by correlation "
      "of distances. Annals of Statistics 35(6):2769-2794, 2007.";
  const std::string cover =
      "T. M. Cover, J. A. Thomas. Elements of Information Theory, 2nd ed. Wiley, 2006.";
  const std::string known = "All constants are known and applied; `mult` is accepted and ignored.";

  using K = MeasureKind;
  return {
      {K::Entropy, "shannon_knn_k",
       "H = psi(n) - psi(k) + log c_d + (d/n) sum_i log eps_k(i), where eps_k(i) is the distance from "
       "x_i to its k-th nearest neighbour among the other points and c_d = pi^(d/2) / Gamma(d/2 + 1) is "
       "the volume of the unit ball.",
       {{"k", "neighbour order, 1 <= k < n"}},
       known + " Repeated rows (zero neighbour distance) are rejected.",
       {kl87,
        "M. N. Goria, N. N. Leonenko, V. V. Mergel, P. L. Novi Inverardi. A new class of random "
        "vector entropy estimators and its applications. J. Nonparametric Statistics 17(3):277-297, 2005."}},
      {K::Entropy, "renyi_knn_k",
       "H_alpha = log(I) / (1 - alpha) with I = (1/n) sum_i [(n - 1) C_k c_d eps_k(i)^d]^(1 - alpha) and "
       "C_k = [Gamma(k) / Gamma(k + 1 - alpha)]^(1 / (1 - alpha)).",
       {{"k", "neighbour order"}, {"alpha", "order, alpha != 1 and k + 1 - alpha > 0"}},
       known + " I is accumulated in log space.", {lps08}},
      {K::Entropy, "tsallis_knn_k",
       "H_alpha = (1 - I) / (alpha - 1) with the same estimate I of the integral of f^alpha as renyi_knn_k, "
       "so that H_Tsallis = (1 - exp((1 - alpha) H_Renyi)) / (alpha - 1).",
       {{"k", "neighbour order"}, {"alpha", "order, alpha != 1 and k + 1 - alpha > 0"}}, known, {lps08}},
      {K::Entropy, "renyi_mst",
       "H_alpha = (1 / (1 - alpha)) log(L_gamma / n^alpha) + c(d, alpha), where L_gamma is the sum of "
       "Euclidean edge lengths raised to gamma = d (1 - alpha) over the minimum spanning tree.",
       {{"alpha", "order in (0, 1)"}},
       "The constant c(d, alpha) is not known in closed form. With mult = 0 it is omitted. With mult = 1 it "
       "is calibrated once per (d, alpha) as minus the mean uncalibrated estimate on 20 samples of 20000 "
       "points from Uniform[0,1]^d, whose Renyi entropy is 0.",
       {"A. O. Hero, O. J. J. Michel. Asymptotic theory of greedy approximations to minimal k-point random "
        "graphs. IEEE Trans. Information Theory 45(6):1921-1938, 1999.",
        "A. O. Hero, B. Ma, O. J. J. Michel, J. Gorman. Applications of entropic spanning graphs. IEEE "
        "Signal Processing Magazine 19(5):85-95, 2002."}},

      {K::Divergence, "kl_knn_k",
       "D(P||Q) = (d/n) sum_i log(nu_k(i) / rho_k(i)) + log(m / (n - 1)), where rho_k(i) is the k-th "
       "neighbour distance of x_i within X and nu_k(i) its k-th neighbour distance in Y.",
       {{"k", "neighbour order"}}, known,
       {"Q. Wang, S. R. Kulkarni, S. Verdu. Divergence estimation for multidimensional densities via "
        "k-nearest-neighbor distances. IEEE Trans. Information Theory 55(5):2392-2405, 2009."}},
      {K::Divergence, "renyi_knn_k",
       "D_alpha = log(I) / (alpha - 1) with I = B_{k,alpha} (1/n) sum_i [(n - 1) rho_k(i)^d / (m nu_k(i)^d)]^(1 - alpha) "
       "and B_{k,alpha} = Gamma(k)^2 / (Gamma(k - alpha + 1) Gamma(k + alpha - 1)).",
       {{"k", "neighbour order"}, {"alpha", "order, alpha != 1 and both Gamma arguments positive"}}, known,
       {ps11, pxs11}},
      {K::Divergence, "tsallis_knn_k",
       "D_alpha = (I - 1) / (alpha - 1) with the same I as renyi_knn_k.",
       {{"k", "neighbour order"}, {"alpha", "order, alpha != 1"}}, known, {ps11, pxs11}},
      {K::Divergence, "l2_knn_k",
       "L2 = sqrt(max(0, int p^2 - 2 int pq + int q^2)). Each integral is a mean of kNN density estimates "
       "(k - 1) / (N c_d r_k^d) at sample points; the cross term averages the estimates taken from X and from Y.",
       {{"k", "neighbour order, k >= 2"}}, known, {pxs11}},
      {K::Divergence, "mmd",
       "Gaussian kernel k(a, b) = exp(-|a - b|^2 / (2 sigma^2)). Biased: sqrt of the V-statistic "
       "EK(X,X) + EK(Y,Y) - 2 EK(X,Y). Unbiased: the U-statistic estimate of MMD^2 (signed, no square root).",
       {{"bandwidth", "sigma > 0, or `median` for the median pairwise distance of the pooled sample "
                      "(subsampled to 2000 points)"},
        {"variant", "`biased` or `unbiased`"},
        {"seed", "seed of the median-heuristic subsample"}},
       known,
       {"A. Gretton, K. M. Borgwardt, M. J. Rasch, B. Scholkopf, A. Smola. A kernel two-sample test. "
        "JMLR 13:723-773, 2012."}},
      {K::Divergence, "energy",
       "E = 2 mean|x_i - y_j| - mean|x_i - x_j| - mean|y_i - y_j| (V-statistic over all index pairs).", {}, known,
       {"G. J. Szekely, M. L. Rizzo. Testing for equal distributions in high dimension. InterStat 5, 2004.",
        "L. Baringhaus, C. Franz. On a new multivariate two-sample test. J. Multivariate Analysis "
        "88(1):190-206, 2004."}},
      {K::Divergence, "jdistance",
       "J(P, Q) = D(P||Q) + D(Q||P) with any registered divergence as member.",
       {{"member", "divergence estimator used for both directions"}},
       "Meta estimator; `mult` propagates to the member.",
       {"H. Jeffreys. An invariant form for the prior probability in estimation problems. Proc. Royal "
        "Society A 186:453-461, 1946."}},
      {K::Divergence, "jensen_shannon",
       "JS = H(w1 P + w2 Q) - w1 H(P) - w2 H(Q). The mixture sample has min(n, m) rows: round(w1 min(n, m)) "
       "drawn without replacement from X and the rest from Y (all from X when X and Y are the same sample).",
       {{"member", "entropy estimator"}, {"w1", "mixture weight of P"}, {"w2", "mixture weight of Q, w1 + w2 = 1"},
        {"seed", "seed of the mixture subsample"}},
       "Meta estimator; `mult` propagates to the member.",
       {"J. Lin. Divergence measures based on the Shannon entropy. IEEE Trans. Information Theory "
        "37(1):145-151, 1991."}},

      {K::MutualInformation, "shannon_mi",
       "I(y^1, ..., y^M) = sum_m H(y^m) - H([y^1, ..., y^M]) with any registered entropy as member.",
       {{"member", "entropy estimator"}}, "Meta estimator; `mult` propagates to the member.", {cover}},
      {K::MutualInformation, "hsic",
       "HSIC = (1/n^2) trace(K H L H) with Gaussian Gram matrices K, L of the two blocks and centering "
       "H = I - 11^T/n, computed as sum K_ij L_ij - (2/n) sum_i k_i l_i + (sum K)(sum L)/n^2 without "
       "storing the Gram matrices.",
       {{"bandwidth1", "kernel width of block 1 or `median`"},
        {"bandwidth2", "kernel width of block 2 or `median`"},
        {"seed", "seed of the median-heuristic subsample"}},
       known + " Exactly two blocks.",
       {"A. Gretton, O. Bousquet, A. Smola, B. Scholkopf. Measuring statistical dependence with "
        "Hilbert-Schmidt norms. ALT, 2005."}},
      {K::MutualInformation, "dcov",
       "V_n(X, Y) = sqrt((1/n^2) sum_ij A_ij B_ij) with double-centered Euclidean distance matrices A, B.",
       {}, known + " Exactly two blocks.", {srb07}},
      {K::MutualInformation, "dcor",
       "R_n = V_n(X, Y) / sqrt(V_n(X, X) V_n(Y, Y)), clamped to [0, 1]; 0 when a block is constant.", {},
       known + " Exactly two blocks.", {srb07}},

      {K::Association, "spearman_rho",
       "On the empirical copula U_ij = rank_ij / (n + 1) with h(d) = (d + 1) / (2^d - d - 1): "
       "rho1 = h(d) [(2^d/n) sum_i prod_j (1 - U_ij) - 1], rho2 = h(d) [(2^d/n) sum_i prod_j U_ij - 1], "
       "rho3 = (rho1 + rho2) / 2.",
       {{"variant", "`rho1`, `rho2` or `rho3`"}}, known + " Ties receive average ranks.",
       {"F. Schmid, R. Schmidt. Multivariate extensions of Spearman's rho and related statistics. "
        "Statistics & Probability Letters 77(4):407-416, 2007."}},
      {K::Association, "blomqvist_beta",
       "beta = h(d) (C_n(1/2) + Cbar_n(1/2) - 2^(1-d)), h(d) = 2^(d-1) / (2^(d-1) - 1), where C_n(1/2) is the "
       "fraction of rows with every U_ij <= 1/2 and Cbar_n(1/2) the fraction with every U_ij > 1/2.",
       {}, known,
       {"F. Schmid, R. Schmidt. Nonparametric inference on multivariate versions of Blomqvist's beta and "
        "related measures of tail dependence. Metrika 66(3):323-354, 2007."}},

      {K::CrossQuantity, "cross_entropy_knn_k",
       "H(P, Q) = log c_d + log m - psi(k) + (d/n) sum_i log nu_k(i), with nu_k(i) the k-th neighbour "
       "distance of x_i in Y.",
       {{"k", "neighbour order"}}, known, {lps08}},

      {K::DistributionKernel, "expected",
       "K(P, Q) = (1/(nm)) sum_ij exp(-|x_i - y_j|^2 / (2 sigma^2)), the inner product of the empirical "
       "kernel mean embeddings.",
       {{"bandwidth", "sigma > 0"}}, known + " Gram matrices are positive semi-definite by construction.",
       {"K. Muandet, K. Fukumizu, F. Dinuzzo, B. Scholkopf. Learning from distributions via support measure "
        "machines. NIPS, 2012."}},
      {K::DistributionKernel, "ejs",
       "K(P, Q) = exp(-u JS(P, Q)) with the Jensen-Shannon estimate clipped to [0, log 2].",
       {{"u", "scale, u > 0"}, {"member", "Jensen-Shannon estimator"}, {"seed", "seed passed to the member"}},
       "Meta estimator; `mult` propagates to the member. Positive definite in population; estimated Gram "
       "matrices can have small negative eigenvalues.",
       {"A. F. T. Martins, N. A. Smith, E. P. Xing, P. M. Q. Aguiar, M. A. T. Figueiredo. Nonextensive "
        "information theoretic kernels on measures. JMLR 10:935-975, 2009."}},
  };
}

struct CompletenessReport {
  bool pass = true;
  std::vector<std::string> problems;
};

/// Every registered estimator must have exactly one doc entry, every entry
/// at least one reference, and every declared parameter a description.
inline CompletenessReport docs_completeness_check(const Registry& registry,
                                                  const std::vector<EstimatorDoc>& docs) {
  CompletenessReport report;
  std::map<std::pair<MeasureKind, std::string>, int> seen;
  for (const auto& doc : docs) ++seen[{doc.kind, doc.name}];
  for (const auto* dp : registry.all()) {
    const auto& d = *dp;
    const std::string label = std::string(to_string(d.kind)) + "/" + d.name;
    const auto it = seen.find({d.kind, d.name});
    if (it == seen.end()) {
      report.problems.push_back(label + ": no doc entry");
      continue;
    }
    if (it->second > 1) report.problems.push_back(label + ": duplicate doc entries");
    const auto doc = std::find_if(docs.begin(), docs.end(),
                                  [&](const EstimatorDoc& e) { return e.kind == d.kind && e.name == d.name; });
    for (const auto& [param, value] : d.defaults) {
      const bool documented = std::any_of(doc->params.begin(), doc->params.end(),
                                          [&](const ParamDoc& p) { return p.name == param; });
      if (!documented) report.problems.push_back(label + ": parameter '" + param + "' undocumented");
    }
  }
  for (const auto& doc : docs) {
    const std::string label = std::string(to_string(doc.kind)) + "/" + doc.name;
    if (doc.references.empty()) report.problems.push_back(label + ": no reference");
    if (registry.find(doc.kind, doc.name) == nullptr)
      report.problems.push_back(label + ": documented but not registered");
  }
  report.pass = report.problems.empty();
  return report;
}

inline std::string_view kind_title(MeasureKind k) {
  switch (k) {
    case MeasureKind::Entropy: return "Entropy";
    case MeasureKind::MutualInformation: return "Mutual information";
    case MeasureKind::Divergence: return "Divergence";
    case MeasureKind::Association: return "Association";
    case MeasureKind::CrossQuantity: return "Cross quantities";
    case MeasureKind::DistributionKernel: return "Distribution kernels";
  }
  return "";
}

/// Markdown catalogue: one section per kind, estimators sorted by name.
inline std::string render_markdown(const Registry& registry, const std::vector<EstimatorDoc>& docs) {
  std::string out = "# Estimator reference\n\n"
                    "Generated by `ite docs`. Do not edit by hand.\n\n"
                    "Notation: X = (x_1..x_n) and Y = (y_1..y_m) are samples in R^d, psi is the digamma "
                    "function, c_d the volume of the d-dimensional unit ball. Values are in nats.\n";
  for (MeasureKind kind : kAllKinds) {
    const auto list = registry.list(kind);
    if (list.empty()) continue;
    out += "\n## " + std::string(kind_title(kind)) + " (`" + std::string(to_string(kind)) + "`)\n";
    for (const auto& d : list) {
      const auto doc = std::find_if(docs.begin(), docs.end(),
                                    [&](const EstimatorDoc& e) { return e.kind == kind && e.name == d.name; });
      out += "\n### `" + d.name + "`\n\n";
      if (doc == docs.end()) {
        out += "Undocumented.\n";
        continue;
      }
      out += doc->formula + "\n\n";
      if (!d.defaults.empty()) {
        out += "| parameter | default | meaning |\n|---|---|---|\n";
        for (const auto& [param, value] : d.defaults) {
          std::string meaning;
          for (const auto& p : doc->params)
            if (p.name == param) meaning = p.description;
          out += "| `" + param + "` | `" + format_param(value) + "` | " + meaning + " |\n";
        }
        out += "\n";
      }
      out += doc->constants + "\n\nReferences:\n\n";
      for (const auto& ref : doc->references) out += "- " + ref + "\n";
    }
  }
  return out;
}

}  // namespace ite::docs
