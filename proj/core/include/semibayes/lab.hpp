#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semibayes/dataset.hpp"
#include "semibayes/design.hpp"
#include "semibayes/mcmc.hpp"
#include "semibayes/mixture.hpp"
#include "semibayes/priors.hpp"
#include "semibayes/rng.hpp"

namespace semibayes {

// One experiment cell: data-generating scenario honoring the design bound L.
struct ScenarioSpec {
  int n = 100;
  int p = 20;
  int s0 = 2;
  std::string design = "rademacher";  // rademacher | uniform | equicorrelated
  double L = 1.0;
  double rho = 0.5;                        // equicorrelated only
  std::string magnitude_rule = "constant";  // constant | beta_min_multiple
  double magnitude = 1.0;
  SymmetricNormalMixture eta0 = SymmetricNormalMixture::standard_normal();
  double phi_assumed = 1.0;  // envelope constants (exact certificates are
  double psi_assumed = 1.0;  // infeasible at experiment scale)
  RateConstants rates;

  void validate() const;
};

struct GeneratedScenario {
  Dataset data;
  double clip_rate = 0.0;  // equicorrelated designs: fraction of clipped entries
};

GeneratedScenario generate_scenario(const ScenarioSpec& spec, Rng& rng);

struct ExperimentGrid {
  std::vector<ScenarioSpec> cells;
  int replicates = 1;
  McmcConfig mcmc;
  PriorConfig prior;
  std::uint64_t seed = 1;

  void validate() const;
  std::string to_json_string() const;
  static ExperimentGrid from_json_string(const std::string& text);
};

struct ReportRecord {
  int cell = 0;  // grid cell index (cells may share n and p)
  int n = 0;
  int p = 0;
  int s0 = 0;
  std::string design;
  int replicate = 0;  // -1 marks per-cell aggregates
  std::string metric;
  double value = 0.0;

  bool operator==(const ReportRecord&) const = default;
};

struct ExperimentReport {
  std::string schema_version = "1";
  std::string experiment;
  std::vector<ReportRecord> records;

  bool operator==(const ExperimentReport&) const = default;
};

ExperimentReport run_dimension_experiment(const ExperimentGrid& grid, int threads = 1);
ExperimentReport run_contraction_experiment(const ExperimentGrid& grid, int threads = 1);
ExperimentReport run_selection_experiment(const ExperimentGrid& grid, int threads = 1);
ExperimentReport run_bvm_experiment(const ExperimentGrid& grid, int threads = 1);

// Writes report.csv (long format) and/or report.json into directory `dir`;
// format is "csv", "json" or "both".
void emit_report(const ExperimentReport& report, const std::string& dir,
                 const std::string& format = "both");
ExperimentReport read_report_json(const std::string& path);

// Values of `metric` across replicates of the cell, in replicate order.
std::vector<double> metric_values(const ExperimentReport& report, int n, int p,
                                  const std::string& metric);
std::vector<double> metric_values_for_cell(const ExperimentReport& report, int cell,
                                           const std::string& metric);

double quantile(std::vector<double> values, double q);  // nearest-rank
double median(std::vector<double> values);

}  // namespace semibayes
