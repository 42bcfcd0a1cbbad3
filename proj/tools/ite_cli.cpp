// Command-line front end: estimate, quicktest, gram, isa, docs, list.
// Exit codes: 0 ok, 2 invalid input or flags, 3 estimation failure,
// 4 quicktest / PSD / docs-check failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ite/ite.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ite;

enum Exit : int { kOk = 0, kInputError = 2, kEstimationError = 3, kCheckFailed = 4 };

/// Error raised while reading flags or files; reported with exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename F>
auto as_input(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw InputError(std::string(to_string(e.code())) + ": " + e.message());
  }
}

char delimiter_of(const std::string& s) {
  if (s == "\\t" || s == "tab") return '\t';
  if (s.size() != 1) throw InputError("delimiter must be a single character");
  return s[0];
}

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--param expects key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

std::vector<Index> parse_widths(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    Index v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || v < 1)
      throw InputError("invalid width list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError("empty width list");
  return out;
}

Sample jitter(const Sample& s, double eps, std::uint64_t seed) {
  if (eps == 0.0) return s;
  Rng rng(derive_seed(seed, 0x6a17));
  std::uniform_real_distribution<double> u(-eps, eps);
  RowMatrix m = s.data();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) += u(rng);
  return Sample(std::move(m));
}

std::string format12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

EstimatorConfig build_config(MeasureKind kind, const std::string& name, bool mult, const ParamMap& params,
                             std::optional<std::uint64_t> seed) {
  return as_input([&] {
    EstimatorConfig cfg = initialize(kind, name, mult, params).value();
    return seed ? cfg.with_seed(*seed) : cfg;
  });
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string kind;
  std::string name;
  std::vector<std::string> inputs;
  std::string blocks;
  std::vector<std::string> params;
  int mult = 1;
  std::optional<std::uint64_t> seed;
  double jitter = 0.0;
  std::string delimiter = ",";
};

int cmd_estimate(const EstimateArgs& a) {
  const auto kind = parse_kind(a.kind);
  if (!kind) throw InputError("unknown kind '" + a.kind + "'");
  const EstimatorConfig cfg = build_config(*kind, a.name, a.mult != 0, parse_params(a.params), a.seed);
  const Arity arity = default_registry().at(*kind, a.name).arity;
  const char delim = delimiter_of(a.delimiter);

  std::vector<Sample> samples;
  for (const auto& path : a.inputs)
    samples.push_back(jitter(as_input([&] { return io::read_csv(path, delim); }), a.jitter,
                             derive_seed(a.seed.value_or(0), samples.size())));

  std::vector<Sample> args;
  switch (arity) {
    case Arity::One:
      if (samples.size() != 1) throw InputError(a.name + " needs exactly one --input");
      args = samples;
      break;
    case Arity::Two:
      if (samples.size() != 2) throw InputError(a.name + " needs exactly two --input files");
      args = samples;
      break;
    case Arity::Blocks:
      if (samples.size() == 1) {
        if (a.blocks.empty()) throw InputError(a.name + " needs --blocks for a single joint input");
        const auto widths = parse_widths(a.blocks);
        args = as_input([&] { return dependence::split_blocks(samples[0], widths); });
      } else if (samples.size() >= 2 && a.blocks.empty()) {
        args = samples;
      } else {
        throw InputError(a.name + " takes one joint --input with --blocks, or one --input per block");
      }
      break;
  }

  const auto result = estimate(cfg, args);
  if (!result.ok()) {
    std::cerr << "estimation failed: " << to_string(result.status().code) << ": " << result.status().message
              << "\n";
    return kEstimationError;
  }
  std::cout << format12(*result) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct QuicktestArgs {
  std::string suite = "all";
  Index n = 2000;
  int seeds = 5;
  double tol = 0.05;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool timing = false;
};

int cmd_quicktest(const QuicktestArgs& a) {
  if (a.suite != "all" && std::find(quicktest::suites().begin(), quicktest::suites().end(), a.suite) ==
                              quicktest::suites().end())
    throw InputError("unknown suite '" + a.suite + "'");
  const auto report = as_input([&] { return quicktest::run(a.suite, a.n, a.seeds, a.tol, a.seed); });
  if (a.format == "json")
    std::cout << quicktest::to_json(report, a.timing).dump(2) << "\n";
  else
    std::cout << quicktest::to_csv(report, a.timing);
  return report.all_pass() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------

struct GramArgs {
  std::string kernel = "expected";
  std::string inputs;
  double tol = 1e-6;
  std::vector<std::string> params;
  std::uint64_t seed = 0;
  std::string delimiter = ",";
  bool print_matrix = false;
};

int cmd_gram(const GramArgs& a) {
  if (!fs::is_directory(a.inputs)) throw InputError("'" + a.inputs + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.inputs))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no .csv files in '" + a.inputs + "'");
  const char delim = delimiter_of(a.delimiter);
  std::vector<Sample> samples;
  for (const auto& f : files) samples.push_back(as_input([&] { return io::read_csv(f.string(), delim); }));

  const EstimatorConfig cfg =
      build_config(MeasureKind::DistributionKernel, a.kernel, true, parse_params(a.params), std::nullopt);
  crossk::PairKernelFn fn = [&cfg](const Sample& x, const Sample& y, std::uint64_t s) {
    return default_registry().run(cfg.with_seed(s), std::vector<Sample>{x, y});
  };
  crossk::GramMatrix g;
  crossk::PsdResult psd;
  try {
    g = crossk::gram_matrix(samples, fn, a.seed, a.kernel);
    psd = crossk::psd_check(g, a.tol);
  } catch (const Error& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kEstimationError;
  }
  if (a.print_matrix) {
    for (Index i = 0; i < g.values.rows(); ++i) {
      for (Index j = 0; j < g.values.cols(); ++j) std::cout << (j ? "," : "") << format12(g.values(i, j));
      std::cout << "\n";
    }
  }
  std::cout << "sets " << samples.size() << "\nmin_eigenvalue " << format12(psd.min_eigenvalue) << "\n"
            << (psd.psd ? "PASS" : "FAIL") << "\n";
  return psd.psd ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------

struct IsaArgs {
  std::string input;
  std::string synthetic;
  std::string dims;
  Index groups = 0;
  std::string dep = "hsic";
  std::uint64_t seed = 0;
  std::string delimiter = ",";
};

struct SyntheticSpec {
  std::vector<Index> dims;
  isa::SourceFamily family = isa::SourceFamily::UniformGeometric;
  Index n = 5000;
};

SyntheticSpec parse_synthetic(const std::string& text) {
  SyntheticSpec spec;
  std::stringstream ss(text);
  std::string item;
  while (ss >> item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("--synthetic expects key=value items, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "dims") {
      spec.dims = parse_widths(value);
    } else if (key == "family") {
      const auto f = isa::parse_family(value);
      if (!f) throw InputError("unknown family '" + value + "'");
      spec.family = *f;
    } else if (key == "n") {
      try {
        std::size_t used = 0;
        spec.n = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw InputError("invalid n '" + value + "'");
      }
    } else {
      throw InputError("unknown --synthetic key '" + key + "'");
    }
  }
  if (spec.dims.empty()) throw InputError("--synthetic needs dims=...");
  return spec;
}

nlohmann::ordered_json partition_json(const isa::Partition& p) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& g : p.groups()) j.push_back(g);
  return j;
}

int cmd_isa(const IsaArgs& a) {
  if (a.input.empty() == a.synthetic.empty()) throw InputError("give exactly one of --input or --synthetic");
  if (!a.dims.empty() && a.groups != 0) throw InputError("give at most one of --dims or --groups");

  std::optional<isa::IsaProblem> problem;
  std::optional<Sample> data;
  if (!a.synthetic.empty()) {
    const auto spec = parse_synthetic(a.synthetic);
    problem = as_input([&] { return isa::generate_isa_problem(spec.dims, spec.family, spec.n, a.seed); });
    data = Sample(problem->observed);
  } else {
    data = as_input([&] { return io::read_csv(a.input, delimiter_of(a.delimiter)); });
  }

  isa::IsaConfig config;
  if (!a.dims.empty())
    config.target = isa::ClusterTarget::with_widths(parse_widths(a.dims));
  else if (a.groups != 0)
    config.target = isa::ClusterTarget::with_groups(a.groups);
  else if (problem)
    config.target = isa::ClusterTarget::with_widths(problem->dims);
  else
    throw InputError("--dims or --groups is required with --input");

  const std::map<std::string, std::string> dep_names{{"hsic", "hsic"}, {"shannon", "shannon_mi"}, {"dcor", "dcor"}};
  const auto dep = dep_names.find(a.dep);
  if (dep == dep_names.end()) throw InputError("--dep must be hsic, shannon or dcor");
  config.dependence = build_config(MeasureKind::MutualInformation, dep->second, true, {}, std::nullopt);
  config.objectives.mi = config.dependence;

  const Index d = data->d();
  const auto& t = config.target;
  if (!t.widths.empty()) {
    Index total = 0;
    for (Index w : t.widths) total += w;
    if (total != d) throw InputError("--dims sums to " + std::to_string(total) + " but the data has " +
                                     std::to_string(d) + " columns");
  } else if (t.groups < 1 || t.groups > d) {
    throw InputError("--groups must lie in [1, " + std::to_string(d) + "]");
  }

  isa::IsaResult r;
  try {
    r = isa::run_isa_pipeline(*data, config, a.seed, problem ? &*problem : nullptr);
  } catch (const Error& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kEstimationError;
  }

  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["seed"] = a.seed;
  j["n"] = data->n();
  j["d"] = d;
  j["dependence"] = dep->second;
  j["partition"] = partition_json(r.partition);
  j["objectives"] = r.diagnostics.objectives;
  nlohmann::ordered_json diag;
  diag["ica_converged"] = r.diagnostics.ica_converged;
  diag["ica_iterations"] = r.diagnostics.ica_iterations;
  diag["exhaustive_search"] = r.diagnostics.exhaustive_search;
  diag["degenerate_similarity"] = r.diagnostics.degenerate_similarity;
  diag["cut"] = r.diagnostics.cut;
  j["diagnostics"] = diag;
  if (problem) {
    j["truth"] = partition_json(problem->truth);
    j["amari_index"] = r.diagnostics.amari ? nlohmann::ordered_json(*r.diagnostics.amari) : nullptr;
    j["grouping_exact"] = r.diagnostics.grouping_exact.value_or(false);
  }
  std::cout << j.dump(2) << "\n";
  if (!r.diagnostics.ica_converged) std::cerr << "warning: ICA did not converge\n";
  if (r.diagnostics.degenerate_similarity) std::cerr << "warning: similarity matrix is all zero\n";
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_docs(const std::string& output, bool check) {
  const auto docs = docs::builtin_docs();
  if (check) {
    const auto report = docs::docs_completeness_check(default_registry(), docs);
    for (const auto& p : report.problems) std::cout << p << "\n";
    std::cout << (report.pass ? "PASS" : "FAIL") << "\n";
    return report.pass ? kOk : kCheckFailed;
  }
  const std::string md = docs::render_markdown(default_registry(), docs);
  if (output.empty() || output == "-") {
    std::cout << md;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw InputError("cannot write '" + output + "'");
    out << md;
  }
  return kOk;
}

int cmd_list(const std::string& kind_text) {
  for (MeasureKind kind : kAllKinds) {
    if (!kind_text.empty() && to_string(kind) != kind_text) continue;
    for (const auto& d : list_estimators(kind)) {
      std::cout << to_string(kind) << " " << d.name;
      for (const auto& [k, v] : d.defaults) std::cout << " " << k << "=" << format_param(v);
      std::cout << "\n";
    }
  }
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Nonparametric information-theoretic estimators"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Estimate one quantity from CSV samples");
  c_est->add_option("--kind", est.kind, "entropy|mi|divergence|association|cross|kernel")->required();
  c_est->add_option("--name", est.name, "Estimator name")->required();
  c_est->add_option("--input", est.inputs, "CSV file (repeat for two-sample kinds)")->required();
  c_est->add_option("--blocks", est.blocks, "Block widths for mi, e.g. 1,2");
  c_est->add_option("--param", est.params, "key=value override (repeatable)");
  c_est->add_option("--mult", est.mult, "1: exact constants, 0: up to a constant")->check(CLI::IsMember({0, 1}));
  c_est->add_option("--seed", est.seed, "Seed for subsampling estimators and jitter");
  c_est->add_option("--jitter", est.jitter, "Add uniform noise in [-eps, eps] to break ties")
      ->check(CLI::NonNegativeNumber);
  c_est->add_option("--delimiter", est.delimiter, "CSV delimiter");

  QuicktestArgs qt;
  auto* c_qt = app.add_subcommand("quicktest", "Analytic value vs. estimate battery");
  c_qt->add_option("--suite", qt.suite, "entropy|divergence|mi|all");
  c_qt->add_option("--n", qt.n, "Sample size per case");
  c_qt->add_option("--seeds", qt.seeds, "Replicates per case");
  c_qt->add_option("--tol", qt.tol, "Tolerance on the median absolute error");
  c_qt->add_option("--format", qt.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  c_qt->add_option("--seed", qt.seed, "Base seed");
  c_qt->add_flag("--timing", qt.timing, "Include per-case runtimes (not reproducible)");

  GramArgs gr;
  auto* c_gr = app.add_subcommand("gram", "Gram matrix of a distribution kernel and PSD check");
  c_gr->add_option("--kernel", gr.kernel, "expected|ejs")->check(CLI::IsMember({"expected", "ejs"}));
  c_gr->add_option("--inputs", gr.inputs, "Directory of CSV files, one sample each")->required();
  c_gr->add_option("--tol", gr.tol, "PSD tolerance on the smallest eigenvalue");
  c_gr->add_option("--param", gr.params, "Kernel key=value override (repeatable)");
  c_gr->add_option("--seed", gr.seed, "Seed for randomized kernels");
  c_gr->add_option("--delimiter", gr.delimiter, "CSV delimiter");
  c_gr->add_flag("--print-matrix", gr.print_matrix, "Print the Gram matrix");

  IsaArgs is;
  auto* c_isa = app.add_subcommand("isa", "Independent subspace analysis");
  c_isa->add_option("--input", is.input, "CSV file of mixed observations");
  c_isa->add_option("--synthetic", is.synthetic, "\"dims=2,2,2 family=uniform-geometric n=5000\"");
  c_isa->add_option("--dims", is.dims, "Known subspace widths, e.g. 2,2,2");
  c_isa->add_option("--groups", is.groups, "Number of subspaces");
  c_isa->add_option("--dep", is.dep, "hsic|shannon|dcor");
  c_isa->add_option("--seed", is.seed, "Pipeline seed");
  c_isa->add_option("--delimiter", is.delimiter, "CSV delimiter");

  std::string docs_out;
  bool docs_check = false;
  auto* c_docs = app.add_subcommand("docs", "Render the estimator reference as markdown");
  c_docs->add_option("--output", docs_out, "Output file (default stdout)");
  c_docs->add_flag("--check", docs_check, "Only run the documentation completeness check");

  std::string list_kind;
  auto* c_list = app.add_subcommand("list", "List registered estimators and defaults");
  c_list->add_option("--kind", list_kind, "Restrict to one kind");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*c_est) return cmd_estimate(est);
    if (*c_qt) return cmd_quicktest(qt);
    if (*c_gr) return cmd_gram(gr);
    if (*c_isa) return cmd_isa(is);
    if (*c_docs) return cmd_docs(docs_out, docs_check);
    if (*c_list) return cmd_list(list_kind);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kEstimationError;
  }
  return kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
  } catch (...) {
    std::cerr << "internal error\n";
  }
  return kEstimationError;
}
