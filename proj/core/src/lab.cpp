#include "semibayes/lab.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "semibayes/common.hpp"
#include "semibayes/divergences.hpp"
#include "semibayes/log.hpp"
#include "semibayes/parallel.hpp"

namespace semibayes {

void ScenarioSpec::validate() const {
  if (n < 1 || p < 1) throw invalid_input("scenario: need n >= 1, p >= 1");
  if (s0 < 0 || s0 > p) throw invalid_input("scenario: infeasible s0 (need 0 <= s0 <= p)");
  if (design != "rademacher" && design != "uniform" && design != "equicorrelated")
    throw invalid_input("scenario: unknown design family '" + design + "'");
  if (!(L > 0.0)) throw invalid_input("scenario: L must be positive");
  if (design == "equicorrelated" && !(rho >= 0.0 && rho < 1.0))
    throw invalid_input("scenario: need 0 <= rho < 1");
  if (magnitude_rule != "constant" && magnitude_rule != "beta_min_multiple")
    throw invalid_input("scenario: unknown magnitude rule '" + magnitude_rule + "'");
  if (!(magnitude > 0.0)) throw invalid_input("scenario: magnitude must be positive");
  rates.validate();
}

GeneratedScenario generate_scenario(const ScenarioSpec& spec, Rng& rng) {
  spec.validate();
  GeneratedScenario out;
  Dataset& data = out.data;
  data.X.resize(spec.n, spec.p);
  long clipped = 0;
  if (spec.design == "rademacher") {
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.p; ++j) data.X(i, j) = rng.uniform() < 0.5 ? -1.0 : 1.0;
  } else if (spec.design == "uniform") {
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.p; ++j) data.X(i, j) = rng.uniform(-spec.L, spec.L);
  } else {
    const double a = std::sqrt(spec.rho);
    const double b = std::sqrt(1.0 - spec.rho);
    for (int i = 0; i < spec.n; ++i) {
      const double shared = rng.normal();
      for (int j = 0; j < spec.p; ++j) {
        double v = a * shared + b * rng.normal();
        if (v > spec.L) {
          v = spec.L;
          ++clipped;
        } else if (v < -spec.L) {
          v = -spec.L;
          ++clipped;
        }
        data.X(i, j) = v;
      }
    }
  }
  out.clip_rate = static_cast<double>(clipped) / (static_cast<double>(spec.n) * spec.p);

  // theta0: s0 coordinates without replacement, magnitudes by rule, random signs.
  std::vector<int> idx(static_cast<std::size_t>(spec.p));
  for (int j = 0; j < spec.p; ++j) idx[static_cast<std::size_t>(j)] = j;
  for (int k = 0; k < spec.s0; ++k) {
    const std::size_t pick =
        static_cast<std::size_t>(k) + rng.uniform_index(static_cast<std::size_t>(spec.p - k));
    std::swap(idx[static_cast<std::size_t>(k)], idx[pick]);
  }
  idx.resize(static_cast<std::size_t>(spec.s0));
  std::sort(idx.begin(), idx.end());
  double magnitude = spec.magnitude;
  if (spec.magnitude_rule == "beta_min_multiple") {
    const double s_n = spec.rates.s_n(spec.n, spec.s0);
    magnitude = spec.magnitude * spec.rates.K_theta / spec.psi_assumed *
                std::sqrt(s_n * std::log(static_cast<double>(spec.p)) / spec.n);
  }
  std::vector<double> values(static_cast<std::size_t>(spec.s0));
  for (int k = 0; k < spec.s0; ++k)
    values[static_cast<std::size_t>(k)] = rng.uniform() < 0.5 ? -magnitude : magnitude;
  SparseVector theta0(spec.p, idx, values);

  data.y.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    double dot = 0.0;
    for (int k = 0; k < spec.s0; ++k)
      dot += data.X(i, theta0.support()[static_cast<std::size_t>(k)]) *
             theta0.values()[static_cast<std::size_t>(k)];
    data.y[i] = dot + spec.eta0.sample(rng);
  }
  data.truth = Truth{std::move(theta0), spec.eta0};
  data.validate(spec.L);
  return out;
}

void ExperimentGrid::validate() const {
  if (cells.empty()) throw invalid_input("grid: no cells");
  if (replicates < 1) throw invalid_input("grid: replicates must be >= 1");
  for (const auto& c : cells) c.validate();
  mcmc.validate();
  prior.validate();
}

namespace {

ScenarioSpec cell_from_json(const nlohmann::json& j) {
  ScenarioSpec c;
  if (j.contains("n")) c.n = j["n"].get<int>();
  if (j.contains("p")) c.p = j["p"].get<int>();
  if (j.contains("s0")) c.s0 = j["s0"].get<int>();
  if (j.contains("design")) c.design = j["design"].get<std::string>();
  if (j.contains("L")) c.L = j["L"].get<double>();
  if (j.contains("rho")) c.rho = j["rho"].get<double>();
  if (j.contains("magnitude_rule")) c.magnitude_rule = j["magnitude_rule"].get<std::string>();
  if (j.contains("magnitude")) c.magnitude = j["magnitude"].get<double>();
  if (j.contains("eta0")) c.eta0 = SymmetricNormalMixture::from_json_string(j["eta0"].dump());
  if (j.contains("phi_assumed")) c.phi_assumed = j["phi_assumed"].get<double>();
  if (j.contains("psi_assumed")) c.psi_assumed = j["psi_assumed"].get<double>();
  if (j.contains("K_dim")) c.rates.K_dim = j["K_dim"].get<double>();
  if (j.contains("K_theta")) c.rates.K_theta = j["K_theta"].get<double>();
  if (j.contains("K_eta")) c.rates.K_eta = j["K_eta"].get<double>();
  return c;
}

nlohmann::json cell_to_json(const ScenarioSpec& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["p"] = c.p;
  j["s0"] = c.s0;
  j["design"] = c.design;
  j["L"] = c.L;
  j["rho"] = c.rho;
  j["magnitude_rule"] = c.magnitude_rule;
  j["magnitude"] = c.magnitude;
  j["eta0"] = nlohmann::json::parse(c.eta0.to_json_string());
  j["phi_assumed"] = c.phi_assumed;
  j["psi_assumed"] = c.psi_assumed;
  j["K_dim"] = c.rates.K_dim;
  j["K_theta"] = c.rates.K_theta;
  j["K_eta"] = c.rates.K_eta;
  return j;
}

}  // namespace

std::string ExperimentGrid::to_json_string() const {
  nlohmann::json j;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) j["cells"].push_back(cell_to_json(c));
  j["replicates"] = replicates;
  j["mcmc"] = nlohmann::json::parse(mcmc.to_json_string());
  j["prior"] = nlohmann::json::parse(prior.to_json_string());
  j["seed"] = seed;
  return j.dump();
}

ExperimentGrid ExperimentGrid::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("grid JSON parse error: ") + e.what());
  }
  ExperimentGrid g;
  try {
    if (!j.contains("cells") || !j["cells"].is_array() || j["cells"].empty())
      throw invalid_input("grid JSON: missing non-empty \"cells\" array");
    for (const auto& c : j["cells"]) g.cells.push_back(cell_from_json(c));
    if (j.contains("replicates")) g.replicates = j["replicates"].get<int>();
    if (j.contains("mcmc")) g.mcmc = McmcConfig::from_json_string(j["mcmc"].dump());
    if (j.contains("prior")) g.prior = PriorConfig::from_json_string(j["prior"].dump());
    if (j.contains("seed")) g.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("grid JSON: ") + e.what());
  }
  g.validate();
  return g;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw invalid_input("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size());
  std::size_t idx = rank <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(rank)) - 1;
  idx = std::min(idx, values.size() - 1);
  return values[idx];
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

namespace {

struct CellRun {
  const ScenarioSpec* cell;
  int cell_index;
  int replicate;
};

// Shared experiment skeleton: one MCMC run per (cell, replicate), metric
// extraction delegated to `analyze`, deterministic record order.
template <class Analyze>
ExperimentReport run_experiment(const ExperimentGrid& grid, int threads,
                                const std::string& name, Analyze&& analyze) {
  grid.validate();
  std::vector<CellRun> runs;
  for (std::size_t c = 0; c < grid.cells.size(); ++c)
    for (int r = 0; r < grid.replicates; ++r)
      runs.push_back({&grid.cells[c], static_cast<int>(c), r});

  std::vector<std::vector<ReportRecord>> slots(runs.size());
  parallel_for(static_cast<int>(runs.size()), threads, [&](int t) {
    const CellRun& run = runs[static_cast<std::size_t>(t)];
    const ScenarioSpec& cell = *run.cell;
    const std::uint64_t rep_seed =
        mix_seed(grid.seed, static_cast<std::uint64_t>(run.cell_index),
                 static_cast<std::uint64_t>(run.replicate));
    Rng scenario_rng(rep_seed);
    GeneratedScenario gen = generate_scenario(cell, scenario_rng);
    const Chain chain = run_mcmc(gen.data, grid.prior, grid.mcmc, mix_seed(rep_seed, 1));
    std::vector<ReportRecord> recs =
        analyze(cell, gen, chain, mix_seed(rep_seed, 2));
    if (cell.design == "equicorrelated") {
      ReportRecord clip;
      clip.metric = "clip_rate";
      clip.value = gen.clip_rate;
      recs.push_back(std::move(clip));
    }
    for (auto& rec : recs) {
      rec.cell = run.cell_index;
      rec.n = cell.n;
      rec.p = cell.p;
      rec.s0 = cell.s0;
      rec.design = cell.design;
      rec.replicate = run.replicate;
    }
    slots[static_cast<std::size_t>(t)] = std::move(recs);
  });

  ExperimentReport report;
  report.experiment = name;
  for (auto& s : slots)
    for (auto& r : s) report.records.push_back(std::move(r));
  return report;
}

double posterior_mass(const Chain& chain, const std::function<bool(const Draw&)>& pred) {
  long hits = 0;
  for (const auto& d : chain.draws)
    if (pred(d)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(chain.draws.size());
}

}  // namespace

ExperimentReport run_dimension_experiment(const ExperimentGrid& grid, int threads) {
  return run_experiment(
      grid, threads, "dimension",
      [](const ScenarioSpec& cell, const GeneratedScenario&, const Chain& chain,
         std::uint64_t) {
        std::vector<ReportRecord> recs;
        const std::pair<double, const char*> factors[] = {
            {1.5, "mass_sgt_1.5x"}, {2.0, "mass_sgt_2x"}, {3.0, "mass_sgt_3x"}};
        for (const auto& [c, name] : factors) {
          const double mass = posterior_mass(
              chain, [&](const Draw& d) { return d.theta.nnz() > c * cell.s0; });
          ReportRecord rec;
          rec.metric = name;
          rec.value = mass;
          recs.push_back(rec);
        }
        double mean_s = 0.0;
        for (const auto& d : chain.draws) mean_s += d.theta.nnz();
        ReportRecord ms;
        ms.metric = "mean_s";
        ms.value = mean_s / static_cast<double>(chain.draws.size());
        recs.push_back(std::move(ms));
        return recs;
      });
}

ExperimentReport run_contraction_experiment(const ExperimentGrid& grid, int threads) {
  return run_experiment(
      grid, threads, "contraction",
      [](const ScenarioSpec& cell, const GeneratedScenario& gen, const Chain& chain,
         std::uint64_t) {
        const SparseVector& theta0 = gen.data.truth->theta0;
        const double logp = std::log(static_cast<double>(cell.p));
        const double env_l1 =
            cell.s0 / cell.phi_assumed * std::sqrt(logp / cell.n);
        const double env_l2 = std::sqrt(cell.s0 * logp / cell.n) / cell.psi_assumed;
        const double s_n = cell.rates.s_n(cell.n, cell.s0);
        const double env_dh = std::sqrt(s_n * logp / cell.n);

        std::vector<double> l1s, l2s, preds, ss;
        for (const auto& d : chain.draws) {
          l1s.push_back(d.theta.l1_dist(theta0));
          l2s.push_back(d.theta.l2_dist(theta0));
          Eigen::VectorXd xd =
              gen.data.residuals(theta0) - gen.data.residuals(d.theta);
          preds.push_back(xd.norm());
          ss.push_back(d.theta.nnz());
        }
        // d_H(eta, eta0) on a thinned subset of kept draws (quadrature cost).
        std::vector<double> dhs;
        const std::size_t stride = std::max<std::size_t>(1, chain.draws.size() / 200);
        for (std::size_t k = 0; k < chain.draws.size(); k += stride) {
          const SymmetricNormalMixture eta(chain.draws[k].atoms);
          dhs.push_back(hellinger(eta, gen.data.truth->eta0));
        }
        std::vector<ReportRecord> recs;
        auto add = [&](const std::string& metric, double value) {
          ReportRecord rec;
          rec.metric = metric;
          rec.value = value;
          recs.push_back(rec);
        };
        add("q90_l1", quantile(l1s, 0.9));
        add("q90_l2", quantile(l2s, 0.9));
        add("q90_pred", quantile(preds, 0.9));
        add("q90_dh", quantile(dhs, 0.9));
        add("q90_s", quantile(ss, 0.9));
        add("ratio_l1", quantile(l1s, 0.9) / env_l1);
        add("ratio_l2", quantile(l2s, 0.9) / env_l2);
        add("ratio_dh", quantile(dhs, 0.9) / env_dh);
        return recs;
      });
}

ExperimentReport run_selection_experiment(const ExperimentGrid& grid, int threads) {
  ExperimentReport report = run_experiment(
      grid, threads, "selection",
      [](const ScenarioSpec&, const GeneratedScenario& gen, const Chain& chain,
         std::uint64_t) {
        const auto& s0_support = gen.data.truth->theta0.support();
        const ModelWeightTable table = model_weights(chain);
        double prob_s0 = 0.0, prob_superset = 0.0;
        for (const auto& [S, w] : table.entries) {
          if (S == s0_support) {
            prob_s0 += w;
          } else if (S.size() > s0_support.size() &&
                     std::includes(S.begin(), S.end(), s0_support.begin(),
                                   s0_support.end())) {
            prob_superset += w;
          }
        }
        std::vector<ReportRecord> recs;
        ReportRecord a;
        a.metric = "prob_S0";
        a.value = prob_s0;
        recs.push_back(a);
        ReportRecord b;
        b.metric = "prob_strict_superset";
        b.value = prob_superset;
        recs.push_back(b);
        return recs;
      });
  // Per-cell aggregate: fraction of replicates with prob_S0 > 0.9.
  for (std::size_t ci = 0; ci < grid.cells.size(); ++ci) {
    const auto& cell = grid.cells[ci];
    const auto vals = metric_values_for_cell(report, static_cast<int>(ci), "prob_S0");
    long hits = 0;
    for (double v : vals)
      if (v > 0.9) ++hits;
    ReportRecord rec;
    rec.cell = static_cast<int>(ci);
    rec.n = cell.n;
    rec.p = cell.p;
    rec.s0 = cell.s0;
    rec.design = cell.design;
    rec.replicate = -1;
    rec.metric = "frac_prob_gt_0.9";
    rec.value = vals.empty() ? 0.0 : static_cast<double>(hits) / vals.size();
    report.records.push_back(rec);
  }
  return report;
}

ExperimentReport run_bvm_experiment(const ExperimentGrid& grid, int threads) {
  return run_experiment(
      grid, threads, "bvm",
      [&grid](const ScenarioSpec&, const GeneratedScenario& gen, const Chain& chain,
              std::uint64_t) {
        const auto& truth = *gen.data.truth;
        const QuadratureGrid qgrid = default_grid(truth.eta0);
        const ModelWeightTable mcmc_w = model_weights(chain);
        // Approximant carries the chain's own weights: the surrogate then
        // isolates the Gaussian-shape misfit; hat_w accuracy is a separate
        // metric below.
        const auto approx = bvm_approximant(gen.data, mcmc_w, truth.eta0, qgrid);
        const BvmReport bvm =
            tv_surrogate(chain.draws, approx, truth.theta0, gen.data.n());
        std::vector<std::vector<int>> collection;
        for (const auto& [S, w] : mcmc_w.entries) collection.push_back(S);
        const ModelWeightTable hat = hat_w(gen.data, grid.prior, truth.eta0, collection, qgrid);
        std::vector<ReportRecord> recs;
        ReportRecord a;
        a.metric = "tv_surrogate";
        a.value = bvm.surrogate_tv;
        recs.push_back(a);
        ReportRecord b;
        b.metric = "weight_tv_hat_vs_mcmc";
        b.value = tv_distance(hat, mcmc_w);
        recs.push_back(b);
        return recs;
      });
}

void emit_report(const ExperimentReport& report, const std::string& dir,
                 const std::string& format) {
  if (format != "csv" && format != "json" && format != "both")
    throw invalid_input("emit_report: format must be csv, json or both");
  std::filesystem::create_directories(dir);
  if (format != "json") {
    std::ofstream csv(dir + "/report.csv");
    if (!csv) throw invalid_input("cannot write " + dir + "/report.csv");
    csv << "cell,n,p,s0,design,replicate,metric,value\n";
    csv.precision(17);
    for (const auto& r : report.records)
      csv << r.cell << ',' << r.n << ',' << r.p << ',' << r.s0 << ',' << r.design << ','
          << r.replicate << ',' << r.metric << ',' << r.value << "\n";
  }
  if (format != "csv") {
    nlohmann::json j;
    j["schema_version"] = report.schema_version;
    j["experiment"] = report.experiment;
    j["records"] = nlohmann::json::array();
    for (const auto& r : report.records)
      j["records"].push_back({{"cell", r.cell},
                              {"n", r.n},
                              {"p", r.p},
                              {"s0", r.s0},
                              {"design", r.design},
                              {"replicate", r.replicate},
                              {"metric", r.metric},
                              {"value", r.value}});
    std::ofstream json_out(dir + "/report.json");
    if (!json_out) throw invalid_input("cannot write " + dir + "/report.json");
    json_out << j.dump(2) << "\n";
  }
}

ExperimentReport read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open report: " + path);
  nlohmann::json j;
  try {
    in >> j;
    ExperimentReport report;
    report.schema_version = j.at("schema_version").get<std::string>();
    report.experiment = j.at("experiment").get<std::string>();
    for (const auto& r : j.at("records")) {
      ReportRecord rec;
      rec.cell = r.at("cell").get<int>();
      rec.n = r.at("n").get<int>();
      rec.p = r.at("p").get<int>();
      rec.s0 = r.at("s0").get<int>();
      rec.design = r.at("design").get<std::string>();
      rec.replicate = r.at("replicate").get<int>();
      rec.metric = r.at("metric").get<std::string>();
      rec.value = r.at("value").get<double>();
      report.records.push_back(std::move(rec));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("report JSON: ") + e.what());
  }
}

std::vector<double> metric_values(const ExperimentReport& report, int n, int p,
                                  const std::string& metric) {
  std::vector<double> out;
  for (const auto& r : report.records)
    if (r.n == n && r.p == p && r.metric == metric && r.replicate >= 0)
      out.push_back(r.value);
  return out;
}

std::vector<double> metric_values_for_cell(const ExperimentReport& report, int cell,
                                           const std::string& metric) {
  std::vector<double> out;
  for (const auto& r : report.records)
    if (r.cell == cell && r.metric == metric && r.replicate >= 0) out.push_back(r.value);
  return out;
}

}  // namespace semibayes
