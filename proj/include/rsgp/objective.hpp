#pragma once

#include <random>
#include <string>
#include <vector>

#include "rsgp/types.hpp"

namespace rsgp {

enum class AttackKind { none, spoof_shift, mean_shift, target_pull };

std::string to_string(AttackKind k);
AttackKind attack_kind_from_string(const std::string& s);

/// How the malicious nodes corrupt their local objective.
///  spoof_shift: s_m += delta_s
///  mean_shift:  h_m = mean(regular h) - shift, s_m = mean(regular s) + shift
///  target_pull: gradient replaced by gain * (x - target)
struct AttackSpec {
  AttackKind kind = AttackKind::none;
  double delta_s = 0.0;
  double shift = 5.0;
  Vector target;
  double gain = 1.0;
};

struct Observation {
  Vector h;
  double s = 0.0;
};

/// Per-node affine observation model s_i = h_i . x_o + w_i together with the
/// node partition and the attack overlay that was applied to it.
struct ObjectiveInstance {
  std::size_t d = 0;
  Vector x_o;
  double noise_sigma = 0.0;
  std::vector<Observation> rows;
  NodeSet malicious;
  AttackSpec attack;

  std::size_t size() const { return rows.size(); }
  bool is_malicious(NodeId i) const { return malicious.count(i) != 0; }
};

/// h_i ~ N(0, h_sigma^2 I), w_i ~ N(0, noise_sigma^2).
ObjectiveInstance sample_instance(std::size_t n, std::size_t d, const Vector& x_o,
                                  double noise_sigma, std::mt19937_64& rng,
                                  double h_sigma = 1.0);

/// (h_i . x - s_i)^2
double loss(const ObjectiveInstance& inst, NodeId i, const Vector& x);

/// True gradient 2 h_i (h_i . x - s_i), or gain * (x - target) for a malicious
/// node under target_pull. Writes into `out` to avoid allocation in the round
/// loop.
void gradient_into(const ObjectiveInstance& inst, NodeId i, const Vector& x, Vector& out);
Vector gradient(const ObjectiveInstance& inst, NodeId i, const Vector& x);

/// Returns a copy with the attack applied to the rows of `malicious`. For
/// target_pull the rows are untouched; only the overlay is recorded.
ObjectiveInstance apply_attack(const ObjectiveInstance& inst, const NodeSet& malicious,
                               const AttackSpec& attack);

/// Largest eigenvalue of node i's local Hessian: 2 |h_i|^2, or the pull gain.
double local_curvature(const ObjectiveInstance& inst, NodeId i);

/// Minimizer of sum_{i in subset} f_i via the normal equations.
/// Throws SingularSystemError if the stacked system is rank deficient.
Vector closed_form_solution(const ObjectiveInstance& inst, const NodeSet& subset);

/// Smallest eigenvalue of (1/|subset|) * sum of local Hessians.
double hessian_min_eigenvalue(const ObjectiveInstance& inst, const NodeSet& subset);

/// Per-node minimum-norm minimizer h_i s_i / |h_i|^2 (the local minimizer set
/// of a rank-one quadratic is a line; this is its point closest to 0).
Vector local_min_norm_minimizer(const ObjectiveInstance& inst, NodeId i);

NodeSet all_nodes(std::size_t n);
NodeSet regular_nodes(const ObjectiveInstance& inst);

}  // namespace rsgp
