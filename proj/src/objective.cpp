#include "rsgp/objective.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace rsgp {

namespace {

void check_dim(const ObjectiveInstance& inst, NodeId i, const Vector& x) {
  if (i >= inst.size()) throw std::invalid_argument("node index out of range");
  if (static_cast<std::size_t>(x.size()) != inst.d)
    throw std::invalid_argument("dimension mismatch: expected " + std::to_string(inst.d) +
                                ", got " + std::to_string(x.size()));
}

// Every local objective here is quadratic: grad f_i(x) = Q_i x - b_i.
void accumulate_quadratic(const ObjectiveInstance& inst, NodeId i, Eigen::MatrixXd& q,
                          Vector& b) {
  if (inst.attack.kind == AttackKind::target_pull && inst.is_malicious(i)) {
    q.diagonal().array() += inst.attack.gain;
    b += inst.attack.gain * inst.attack.target;
    return;
  }
  const auto& r = inst.rows[i];
  q.noalias() += 2.0 * r.h * r.h.transpose();
  b += 2.0 * r.s * r.h;
}

}  // namespace

std::string to_string(AttackKind k) {
  switch (k) {
    case AttackKind::none: return "none";
    case AttackKind::spoof_shift: return "spoof_shift";
    case AttackKind::mean_shift: return "mean_shift";
    case AttackKind::target_pull: return "target_pull";
  }
  return "none";
}

AttackKind attack_kind_from_string(const std::string& s) {
  if (s == "none") return AttackKind::none;
  if (s == "spoof_shift") return AttackKind::spoof_shift;
  if (s == "mean_shift") return AttackKind::mean_shift;
  if (s == "target_pull") return AttackKind::target_pull;
  throw std::invalid_argument("unknown attack kind '" + s + "'");
}

NodeSet all_nodes(std::size_t n) {
  NodeSet s;
  for (NodeId i = 0; i < n; ++i) s.insert(s.end(), i);
  return s;
}

NodeSet regular_nodes(const ObjectiveInstance& inst) {
  NodeSet s;
  for (NodeId i = 0; i < inst.size(); ++i)
    if (!inst.is_malicious(i)) s.insert(s.end(), i);
  return s;
}

ObjectiveInstance sample_instance(std::size_t n, std::size_t d, const Vector& x_o,
                                  double noise_sigma, std::mt19937_64& rng, double h_sigma) {
  if (n < 1 || d < 1) throw std::invalid_argument("sample_instance: n and d must be >= 1");
  if (static_cast<std::size_t>(x_o.size()) != d)
    throw std::invalid_argument("sample_instance: x_o has wrong dimension");
  if (noise_sigma < 0.0 || h_sigma < 0.0)
    throw std::invalid_argument("sample_instance: negative standard deviation");

  ObjectiveInstance inst;
  inst.d = d;
  inst.x_o = x_o;
  inst.noise_sigma = noise_sigma;
  inst.rows.resize(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& r : inst.rows) {
    r.h.resize(d);
    for (std::size_t k = 0; k < d; ++k) r.h[k] = h_sigma * normal(rng);
    // Draw the noise even when sigma is zero so the h stream does not depend on it.
    const double w = normal(rng);
    r.s = r.h.dot(x_o) + noise_sigma * w;
  }
  return inst;
}

double loss(const ObjectiveInstance& inst, NodeId i, const Vector& x) {
  check_dim(inst, i, x);
  const auto& r = inst.rows[i];
  const double e = r.h.dot(x) - r.s;
  return e * e;
}

void gradient_into(const ObjectiveInstance& inst, NodeId i, const Vector& x, Vector& out) {
  check_dim(inst, i, x);
  if (inst.attack.kind == AttackKind::target_pull && inst.is_malicious(i)) {
    out = inst.attack.gain * (x - inst.attack.target);
    return;
  }
  const auto& r = inst.rows[i];
  out = (2.0 * (r.h.dot(x) - r.s)) * r.h;
}

Vector gradient(const ObjectiveInstance& inst, NodeId i, const Vector& x) {
  Vector g(inst.d);
  gradient_into(inst, i, x, g);
  return g;
}

double local_curvature(const ObjectiveInstance& inst, NodeId i) {
  if (i >= inst.size()) throw std::invalid_argument("node index out of range");
  if (inst.attack.kind == AttackKind::target_pull && inst.is_malicious(i)) return inst.attack.gain;
  return 2.0 * inst.rows[i].h.squaredNorm();
}

ObjectiveInstance apply_attack(const ObjectiveInstance& inst, const NodeSet& malicious,
                               const AttackSpec& attack) {
  for (NodeId m : malicious)
    if (m >= inst.size()) throw std::invalid_argument("apply_attack: malicious node out of range");
  if (attack.kind == AttackKind::target_pull &&
      static_cast<std::size_t>(attack.target.size()) != inst.d)
    throw std::invalid_argument("apply_attack: target has wrong dimension");
  if (attack.kind == AttackKind::target_pull && !(attack.gain > 0.0))
    throw std::invalid_argument("apply_attack: target_pull gain must be > 0");

  ObjectiveInstance out = inst;
  out.malicious = malicious;
  out.attack = attack;

  switch (attack.kind) {
    case AttackKind::none:
    case AttackKind::target_pull:
      break;
    case AttackKind::spoof_shift:
      for (NodeId m : malicious) out.rows[m].s += attack.delta_s;
      break;
    case AttackKind::mean_shift: {
      Vector mean_h = Vector::Zero(inst.d);
      double mean_s = 0.0;
      std::size_t nr = 0;
      for (NodeId i = 0; i < inst.size(); ++i) {
        if (malicious.count(i)) continue;
        mean_h += inst.rows[i].h;
        mean_s += inst.rows[i].s;
        ++nr;
      }
      if (nr == 0) throw std::invalid_argument("apply_attack: mean_shift needs regular nodes");
      mean_h /= static_cast<double>(nr);
      mean_s /= static_cast<double>(nr);
      for (NodeId m : malicious) {
        out.rows[m].h = mean_h.array() - attack.shift;
        out.rows[m].s = mean_s + attack.shift;
      }
      break;
    }
  }
  return out;
}

Vector closed_form_solution(const ObjectiveInstance& inst, const NodeSet& subset) {
  if (subset.empty()) throw std::invalid_argument("closed_form_solution: empty subset");
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(inst.d, inst.d);
  Vector b = Vector::Zero(inst.d);
  for (NodeId i : subset) {
    if (i >= inst.size()) throw std::invalid_argument("closed_form_solution: node out of range");
    accumulate_quadratic(inst, i, q, b);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || lmin <= 1e-12 * lmax)
    throw SingularSystemError("normal equations are singular: the Hessian over the subset is "
                              "not positive definite");
  return q.ldlt().solve(b);
}

double hessian_min_eigenvalue(const ObjectiveInstance& inst, const NodeSet& subset) {
  if (subset.empty()) return 0.0;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(inst.d, inst.d);
  Vector b = Vector::Zero(inst.d);
  for (NodeId i : subset) accumulate_quadratic(inst, i, q, b);
  q /= static_cast<double>(subset.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Vector local_min_norm_minimizer(const ObjectiveInstance& inst, NodeId i) {
  const auto& r = inst.rows.at(i);
  const double hh = r.h.squaredNorm();
  if (hh == 0.0) return Vector::Zero(inst.d);
  return (r.s / hh) * r.h;
}

}  // namespace rsgp
