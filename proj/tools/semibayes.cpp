#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "semibayes/common.hpp"
#include "semibayes/dataset.hpp"
#include "semibayes/design.hpp"
#include "semibayes/divergences.hpp"
#include "semibayes/lab.hpp"
#include "semibayes/log.hpp"
#include "semibayes/manifest.hpp"
#include "semibayes/mcmc.hpp"
#include "semibayes/parallel.hpp"
#include "semibayes/priors.hpp"
#include "semibayes/version.hpp"

namespace {

using namespace semibayes;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitBudget = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CommonArgs {
  std::string out = ".";
  int threads = hardware_threads();
  std::uint64_t seed = 0;
  bool seed_set = false;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int cmd_fit(const std::string& data_path, const std::string& prior_path,
            const std::string& mcmc_path, const CommonArgs& args) {
  Timer timer;
  const Dataset data = read_csv(data_path);
  const PriorConfig prior = PriorConfig::from_json_string(slurp(prior_path));
  McmcConfig mcmc = McmcConfig::from_json_string(slurp(mcmc_path));
  if (args.seed_set) mcmc.seed = args.seed;
  if (!validate_lambda(prior.lambda, data.n(), data.p()))
    logging::info("lambda outside the [sqrt(n)/p, sqrt(n log p)] window");

  const MultiChainResult result = run_chains(data, prior, mcmc, args.threads);

  std::filesystem::create_directories(args.out);
  RunManifest manifest;
  manifest.command = "fit";
  manifest.seed = mcmc.seed;
  {
    nlohmann::json cfg;
    cfg["prior"] = nlohmann::json::parse(prior.to_json_string());
    cfg["mcmc"] = nlohmann::json::parse(mcmc.to_json_string());
    manifest.config_json = cfg.dump();
  }
  manifest.add_input(data_path);
  manifest.add_input(prior_path);
  manifest.add_input(mcmc_path);

  // Samples: one file per chain (single chain keeps the plain name).
  std::vector<const Draw*> all_draws;
  for (std::size_t c = 0; c < result.chains.size(); ++c) {
    const std::string name = result.chains.size() == 1
                                 ? "samples.jsonl"
                                 : "samples_chain" + std::to_string(c) + ".jsonl";
    write_samples_jsonl(result.chains[c], args.out + "/" + name);
    manifest.outputs.push_back(name);
    for (const auto& d : result.chains[c].draws) all_draws.push_back(&d);
  }

  {
    std::ofstream w(args.out + "/weights.csv");
    w << "support,weight\n";
    for (const auto& [S, weight] : result.merged_weights.entries)
      w << support_to_string(S) << "," << format_double(weight) << "\n";
    manifest.outputs.push_back("weights.csv");
  }

  // Summary: per-coordinate median and credible bounds over pooled draws.
  {
    const int p = data.p();
    const std::size_t nd = all_draws.size();
    nlohmann::json summary;
    summary["n"] = data.n();
    summary["p"] = p;
    summary["chains"] = result.chains.size();
    summary["draws"] = nd;
    std::vector<double> med(static_cast<std::size_t>(p)), lo(static_cast<std::size_t>(p)),
        hi(static_cast<std::size_t>(p));
    std::vector<double> column(nd);
    for (int j = 0; j < p; ++j) {
      for (std::size_t d = 0; d < nd; ++d) {
        const auto& theta = all_draws[d]->theta;
        const auto it = std::lower_bound(theta.support().begin(), theta.support().end(), j);
        column[d] =
            (it != theta.support().end() && *it == j)
                ? theta.values()[static_cast<std::size_t>(it - theta.support().begin())]
                : 0.0;
      }
      med[static_cast<std::size_t>(j)] = quantile(column, 0.5);
      lo[static_cast<std::size_t>(j)] = quantile(column, 0.05);
      hi[static_cast<std::size_t>(j)] = quantile(column, 0.95);
    }
    summary["posterior_median"] = med;
    summary["ci05"] = lo;
    summary["ci95"] = hi;
    double mean_s = 0.0;
    for (const auto* d : all_draws) mean_s += d->theta.nnz();
    summary["mean_s"] = nd ? mean_s / static_cast<double>(nd) : 0.0;
    std::vector<std::pair<double, std::vector<int>>> ranked;
    for (const auto& [S, weight] : result.merged_weights.entries) ranked.push_back({weight, S});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    summary["top_models"] = nlohmann::json::array();
    for (std::size_t k = 0; k < std::min<std::size_t>(10, ranked.size()); ++k)
      summary["top_models"].push_back(
          {{"support", ranked[k].second}, {"weight", ranked[k].first}});
    write_file_atomic(args.out + "/summary.json", summary.dump(2) + "\n");
    manifest.outputs.push_back("summary.json");
  }

  manifest.wall_time_s = timer.seconds();
  manifest.write_atomic(args.out);
  return kExitOk;
}

int cmd_diagnose_design(const std::string& data_path, int smax, bool randomized,
                        const CommonArgs& args) {
  Timer timer;
  const Dataset data = read_csv(data_path);
  const GramSummary gram = GramSummary::from_design(data.X);
  const auto rows =
      design_table(gram, smax, randomized, CertBudget{}, args.seed_set ? args.seed : 1);
  std::ostringstream csv;
  csv << "s,phi,psi,exact_flag\n";
  for (const auto& r : rows)
    csv << r.s << "," << format_double(r.phi) << "," << format_double(r.psi) << ","
        << (r.exact ? 1 : 0) << "\n";
  std::fputs(csv.str().c_str(), stdout);
  std::filesystem::create_directories(args.out);
  write_file_atomic(args.out + "/design.csv", csv.str());
  RunManifest manifest;
  manifest.command = "diagnose design";
  manifest.seed = args.seed_set ? args.seed : 1;
  manifest.add_input(data_path);
  manifest.outputs.push_back("design.csv");
  manifest.wall_time_s = timer.seconds();
  manifest.write_atomic(args.out);
  return kExitOk;
}

std::vector<std::vector<int>> parse_supports(const std::string& text) {
  try {
    return nlohmann::json::parse(text).get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("supports JSON (expect [[0,1],[2],...]): ") + e.what());
  }
}

int cmd_diagnose_evidence(const std::string& data_path, const std::string& prior_path,
                          const std::string& truth_path, const std::string& supports_path,
                          const CommonArgs& args) {
  Timer timer;
  Dataset data = read_csv(data_path);
  const PriorConfig prior = PriorConfig::from_json_string(slurp(prior_path));
  data.truth = truth_from_json_string(slurp(truth_path));
  data.validate();
  const auto collection = parse_supports(slurp(supports_path));
  const auto grid = default_grid(data.truth->eta0);
  const ModelWeightTable table = hat_w(data, prior, data.truth->eta0, collection, grid);
  std::ostringstream csv;
  csv << "support,what_hat\n";
  for (const auto& [S, w] : table.entries)
    csv << support_to_string(S) << "," << format_double(w) << "\n";
  std::fputs(csv.str().c_str(), stdout);
  std::filesystem::create_directories(args.out);
  write_file_atomic(args.out + "/evidence.csv", csv.str());
  RunManifest manifest;
  manifest.command = "diagnose evidence";
  manifest.config_json = prior.to_json_string();
  manifest.add_input(data_path);
  manifest.add_input(prior_path);
  manifest.add_input(truth_path);
  manifest.add_input(supports_path);
  manifest.outputs.push_back("evidence.csv");
  manifest.wall_time_s = timer.seconds();
  manifest.write_atomic(args.out);
  return kExitOk;
}

int cmd_diagnose_bvm(const std::string& data_path, const std::string& truth_path,
                     const std::string& samples_path, const std::string& prior_path,
                     const CommonArgs& args) {
  Timer timer;
  Dataset data = read_csv(data_path);
  data.truth = truth_from_json_string(slurp(truth_path));
  data.validate();
  const PriorConfig prior = PriorConfig::from_json_string(slurp(prior_path));
  const auto draws = read_samples_jsonl(samples_path, data.p());
  if (draws.empty()) throw invalid_input("diagnose bvm: no draws in " + samples_path);
  const auto grid = default_grid(data.truth->eta0);
  const ModelWeightTable mcmc_w = model_weights(draws);
  // Full Lemma-7-style bound: approximant weighted by hat_w, so both the
  // weight misfit and the within-model shape misfit contribute.
  std::vector<std::vector<int>> collection;
  for (const auto& [S, w] : mcmc_w.entries) collection.push_back(S);
  const ModelWeightTable hat = hat_w(data, prior, data.truth->eta0, collection, grid);
  const auto approx = bvm_approximant(data, hat, data.truth->eta0, grid);
  const BvmReport report = tv_surrogate(draws, approx, data.truth->theta0, data.n());
  std::fputs((report.to_json_string() + "\n").c_str(), stdout);
  std::filesystem::create_directories(args.out);
  write_file_atomic(args.out + "/bvm.json", report.to_json_string() + "\n");
  RunManifest manifest;
  manifest.command = "diagnose bvm";
  manifest.config_json = prior.to_json_string();
  manifest.add_input(data_path);
  manifest.add_input(truth_path);
  manifest.add_input(samples_path);
  manifest.add_input(prior_path);
  manifest.outputs.push_back("bvm.json");
  manifest.wall_time_s = timer.seconds();
  manifest.write_atomic(args.out);
  return kExitOk;
}

int cmd_experiment(const std::string& name, const std::string& grid_path,
                   const std::string& format, const CommonArgs& args) {
  Timer timer;
  ExperimentGrid grid = ExperimentGrid::from_json_string(slurp(grid_path));
  if (args.seed_set) grid.seed = args.seed;
  ExperimentReport report;
  if (name == "dimension") {
    report = run_dimension_experiment(grid, args.threads);
  } else if (name == "contraction") {
    report = run_contraction_experiment(grid, args.threads);
  } else if (name == "selection") {
    report = run_selection_experiment(grid, args.threads);
  } else if (name == "bvm") {
    report = run_bvm_experiment(grid, args.threads);
  } else {
    throw invalid_input("unknown experiment name '" + name +
                        "' (expected dimension|contraction|selection|bvm)");
  }
  emit_report(report, args.out, format);
  RunManifest manifest;
  manifest.command = "experiment " + name;
  manifest.seed = grid.seed;
  manifest.config_json = grid.to_json_string();
  manifest.add_input(grid_path);
  if (format != "json") manifest.outputs.push_back("report.csv");
  if (format != "csv") manifest.outputs.push_back("report.json");
  manifest.wall_time_s = timer.seconds();
  manifest.write_atomic(args.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiparametric Bayesian sparse regression: fitting, design "
               "certificates, and posterior-asymptotics experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", semibayes::kVersion);

  CommonArgs common;
  std::string data_path, prior_path, mcmc_path, truth_path, samples_path, supports_path;
  std::string grid_path, experiment_name, format = "both";
  int smax = 12;
  bool randomized = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", common.out, "output directory")->capture_default_str();
    cmd->add_option("--threads", common.threads, "worker threads")->capture_default_str();
    cmd->add_option("--seed", common.seed, "seed override")
        ->each([&](const std::string&) { common.seed_set = true; });
  };

  CLI::App* fit = app.add_subcommand("fit", "sample the posterior on a dataset");
  fit->add_option("--data", data_path, "CSV with header y,x1..xp")->required();
  fit->add_option("--prior", prior_path, "prior config JSON")->required();
  fit->add_option("--mcmc", mcmc_path, "MCMC config JSON")->required();
  add_common(fit);

  CLI::App* diagnose = app.add_subcommand("diagnose", "design and posterior diagnostics");
  diagnose->require_subcommand(1);
  CLI::App* design = diagnose->add_subcommand("design", "phi/psi certificate table");
  design->add_option("--data", data_path)->required();
  design->add_option("--smax", smax, "largest sparsity level")->capture_default_str();
  design->add_flag("--randomized", randomized, "fall back to randomized upper bounds");
  add_common(design);
  CLI::App* evidence = diagnose->add_subcommand("evidence", "hat_w table for listed supports");
  evidence->add_option("--data", data_path)->required();
  evidence->add_option("--prior", prior_path)->required();
  evidence->add_option("--truth", truth_path, "truth JSON {theta0, eta0}")->required();
  evidence->add_option("--supports", supports_path, "JSON [[0,1],[2],...]")->required();
  add_common(evidence);
  CLI::App* bvm = diagnose->add_subcommand("bvm", "TV surrogate from saved samples");
  bvm->add_option("--data", data_path)->required();
  bvm->add_option("--truth", truth_path)->required();
  bvm->add_option("--samples", samples_path, "samples JSONL from fit")->required();
  bvm->add_option("--prior", prior_path)->required();
  add_common(bvm);

  CLI::App* experiment =
      app.add_subcommand("experiment", "run a posterior-asymptotics trend experiment");
  experiment->add_option("name", experiment_name, "dimension|contraction|selection|bvm")
      ->required();
  experiment->add_option("--grid", grid_path, "grid JSON")->required();
  experiment->add_option("--format", format, "csv|json|both")->capture_default_str();
  add_common(experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitInput;
  }

  try {
    if (fit->parsed()) return cmd_fit(data_path, prior_path, mcmc_path, common);
    if (design->parsed()) return cmd_diagnose_design(data_path, smax, randomized, common);
    if (evidence->parsed())
      return cmd_diagnose_evidence(data_path, prior_path, truth_path, supports_path, common);
    if (bvm->parsed())
      return cmd_diagnose_bvm(data_path, truth_path, samples_path, prior_path, common);
    if (experiment->parsed()) return cmd_experiment(experiment_name, grid_path, format, common);
  } catch (const semibayes::budget_exceeded& e) {
    semibayes::logging::error(e.what());
    return kExitBudget;
  } catch (const semibayes::numeric_error& e) {
    semibayes::logging::error(e.what());
    return kExitNumeric;
  } catch (const semibayes::invalid_input& e) {
    semibayes::logging::error(e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    semibayes::logging::error(e.what());
    return kExitNumeric;
  }
  return kExitInput;
}
