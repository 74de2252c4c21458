/*
 Copyright 2026 The sacbp Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef SACBP_HARNESS_HPP
#define SACBP_HARNESS_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "sacbp/planner.hpp"
#include "sacbp/scenario.hpp"

namespace sacbp {

struct ExperimentConfig {
  std::string name;  // defaults to "<scenario>_<planner>"
  std::string scenario_id;
  nlohmann::json scenario_cfg;
  std::string planner_id;  // sacbp | greedy | mcts_dpw | nominal_only
  nlohmann::json planner_cfg;
  double sim_duration = 0.0;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = "results";
  int workers = 0;  // 0: SACBP_WORKERS env, else 1

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
};

/// Scenario factory: tracking | manipulation | linear1d_mixed | linear_fixture.
std::shared_ptr<ScenarioModel> make_scenario(const std::string& id,
                                             const nlohmann::json& cfg);

/// Planner factory; the returned updater owns its parameters. `run` carries
/// the shared grid parameters parsed from the planner config.
std::unique_ptr<ControlUpdater> make_updater(const std::string& planner_id,
                                             const nlohmann::json& planner_cfg,
                                             const ScenarioModel& model,
                                             RunParams* run);

struct SeedResult {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure_reason;
  std::map<std::string, double> final_metrics;
  double mean_update_seconds = 0.0;
  double max_update_seconds = 0.0;
  std::string csv_path;
};

struct ExperimentResult {
  std::vector<SeedResult> seeds;
  std::map<std::string, double> metric_means;
  std::map<std::string, double> metric_stds;
  std::string summary_path;
  bool any_failed = false;
  bool all_failed = false;
};

/// Executes receding_horizon_run for every seed (seeds in parallel), writes
/// one CSV per run (header `t,metric,value`, 17 significant digits) and one
/// JSON summary per experiment. Wall-clock statistics go to the summary
/// only, keeping the CSVs byte-identical across worker counts.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Runs one experiment per value of the dotted config path (e.g.
/// "planner.eps"), writing each run under its own subdirectory plus a
/// combined sweep summary.
std::vector<ExperimentResult> run_sweep(const ExperimentConfig& base,
                                        const std::string& param_path,
                                        const std::vector<std::string>& values);

// ---------------------------------------------------------------------------
// Verification suites.
// ---------------------------------------------------------------------------

struct VerifyCase {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Named property suites: adjoint-invariance | mode-insertion-fd |
/// filter-bounds | qp-bruteforce | kf-equivalence. Throws ConfigError for an
/// unknown suite id.
std::vector<VerifyCase> run_verify_suite(const std::string& suite_id);

std::vector<std::string> verify_suite_names();

/// Serializes metric rows with 17 significant digits.
std::string metrics_to_csv(const std::vector<MetricsRow>& rows);

}  // namespace sacbp

#endif  // SACBP_HARNESS_HPP
