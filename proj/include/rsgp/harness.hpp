#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rsgp/config.hpp"

namespace rsgp {

/// Closed-form reference points of one instance.
struct OracleReport {
  Vector x_star;    // minimizer over the regular nodes
  Vector x_attack;  // minimizer over all nodes (attacker's equilibrium)
  double lambda_min = 0.0;
  double attack_gradient_norm = 0.0;  // || sum_m g_m(x_attack) ||
  double bound = 0.0;                 // lambda_min * || x_attack - x_star ||
  /// (lhs - rhs) / rhs, 0 when both sides vanish.
  double relative_slack = 0.0;
  bool holds = true;
};

/// Throws SingularSystemError when the regular Hessian (or the full one) is
/// singular.
OracleReport oracle_check(const ObjectiveInstance& inst);

/// Independent generator for (trial, stream).
std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream);

enum : std::uint64_t { kGraphStream = 1, kInstanceStream = 2, kAlgorithmStream = 3 };

ObjectiveInstance make_instance(const ExperimentConfig& cfg, std::size_t trial);

struct TrialSetup {
  DynamicDigraph graph;
  ObjectiveInstance instance;
  std::mt19937_64 algorithm_rng;
  std::size_t graph_attempts = 0;
};

/// Graph realizations that are not strongly connected are redrawn from the
/// same stream, so trial k gets the same graph for every parameter value.
TrialSetup make_trial_setup(const ExperimentConfig& cfg, std::size_t trial);

struct TrialOutcome {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  std::size_t graph_attempts = 0;
  TrialReport report;
  double epsilon_attack = 0.0;  // mean || x_i - x_attack || over regular nodes
  std::vector<Vector> finals;   // every node, by id
};

struct TrialArtifacts {
  std::vector<TrajectorySample> samples;
  std::vector<SeverEvent> sever_log;
  DynamicDigraph initial_graph;
};

TrialOutcome run_one(const ExperimentConfig& cfg, std::size_t trial, TrialArtifacts* artifacts = nullptr);

struct MetricSummary {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

struct Aggregate {
  std::size_t trials = 0;
  std::size_t completed = 0;
  std::map<std::string, MetricSummary> metrics;
};

/// Metric names in output order.
const std::vector<std::string>& aggregate_metric_names();

/// Mean and standard error over the completed trials, in trial order.
Aggregate aggregate(const std::vector<TrialOutcome>& trials);

struct RunOptions {
  std::size_t parallel = 1;
  bool write_outputs = true;
};

struct CampaignResult {
  ExperimentConfig cfg;
  std::optional<OracleReport> oracle;  // set when the instance is fixed across trials
  std::vector<TrialOutcome> trials;
  Aggregate summary;
};

/// Runs cfg.trials independent trials; writes trials.csv, aggregate.csv,
/// report.json, instance.json and per-trial logs to cfg.output_dir.
CampaignResult run_campaign(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct SweepResult {
  std::string param;
  std::vector<double> values;
  std::vector<CampaignResult> points;
};

/// One campaign per grid value, each in its own subdirectory; sweep.csv at
/// the top.
SweepResult run_sweep(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Runs each config as a campaign under out/<k>_<algorithm> and writes
/// compare.csv to `out`.
std::vector<CampaignResult> compare(const std::vector<ExperimentConfig>& cfgs,
                                    const std::filesystem::path& out, const RunOptions& opts = {});

}  // namespace rsgp
