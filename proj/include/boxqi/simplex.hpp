#pragma once

// Exact two-phase revised simplex for  min c^T x  s.t.  A x = b, x >= 0,
// with Bland's rule for entering and leaving variables.

#include "boxqi/types.hpp"

#include <Eigen/Core>

#include <vector>

namespace boxqi {

using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

namespace lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  std::vector<Rational> x;  // primal solution, size = A.cols() when optimal
  Rational objective{0};
  int iterations = 0;       // phase I + phase II pivots
  int redundant_rows = 0;   // equality rows found linearly dependent
};

Result solve(const RationalMatrix& A, const RationalVector& b, const RationalVector& c);

const char* to_string(Status s);

}  // namespace lp
}  // namespace boxqi
