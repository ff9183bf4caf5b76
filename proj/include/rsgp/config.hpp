#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rsgp/baselines.hpp"
#include "rsgp/metrics.hpp"
#include "rsgp/objective.hpp"
#include "rsgp/protocol.hpp"

namespace rsgp {

enum class Algorithm { rsgp, sgp_plain, tv, trimmed };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

inline AttackSpec mean_shift_attack() {
  AttackSpec a;
  a.kind = AttackKind::mean_shift;
  return a;
}

struct SweepSpec {
  std::string param;  // beta | alpha | lambda | kappa
  std::vector<double> values;
};

struct ExperimentConfig {
  // graph
  std::size_t n = 20;
  std::optional<double> p;  // unset: 3 ln(n) / n
  NodeSet malicious{17, 18, 19};

  // instance
  std::size_t d = 2;
  Vector x_o = (Vector(2) << 0.0859, -1.4916).finished();
  double noise_sigma = 1.0;
  double h_sigma = 1.0;
  bool resample_instance = false;

  AttackSpec attack = mean_shift_attack();
  Algorithm algorithm = Algorithm::rsgp;
  ProtocolConfig protocol;
  TVConfig tv;
  TrimConfig trimmed;

  std::size_t trials = 50;
  std::uint64_t base_seed = 1;
  Round sample_stride = 0;
  CostIncreaseForm cost_form = CostIncreaseForm::per_node;
  std::optional<SweepSpec> sweep;
  std::filesystem::path output_dir = "out";

  double edge_probability() const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Copy with the named sweep parameter set to `value`.
  ExperimentConfig with_param(const std::string& param, double value) const;
};

/// Sectioned key = value text; see README for the schema. Unknown sections or
/// keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const ExperimentConfig& cfg);

}  // namespace rsgp
