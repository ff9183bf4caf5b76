#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rsgp {

using NodeId = std::size_t;
using NodeSet = std::set<NodeId>;
using Round = std::int64_t;
using Vector = Eigen::VectorXd;

/// Raised when a linear system required by an oracle is singular
/// (the regular Hessian is not positive definite).
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the push-sum weight of a node collapses below the floor.
class NumericDegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndefinedRatioError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline std::vector<NodeId> complement(const NodeSet& s, std::size_t n) {
  std::vector<NodeId> out;
  out.reserve(n);
  for (NodeId i = 0; i < n; ++i)
    if (!s.count(i)) out.push_back(i);
  return out;
}

}  // namespace rsgp
