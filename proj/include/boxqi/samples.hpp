#pragma once

#include "boxqi/domain.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace boxqi {

/// Values f_beta at every data point M_beta, beta in [0, m+1]^3 (x fastest).
struct SampleField {
  DomainGrid grid;
  std::vector<double> values;

  SampleField() = default;
  explicit SampleField(const DomainGrid& g)
      : grid(g), values(static_cast<std::size_t>(DataPointSet(g).size()), 0.0) {}

  bool complete() const { return static_cast<std::int64_t>(values.size()) == DataPointSet(grid).size(); }

  double at(const MultiIndex& beta) const {
    return values[static_cast<std::size_t>(DataPointSet::linear(beta, grid))];
  }
  double& at(const MultiIndex& beta) {
    return values[static_cast<std::size_t>(DataPointSet::linear(beta, grid))];
  }
};

/// Samples f (a function of physical domain coordinates) at all data points.
SampleField sample(const DomainGrid& grid, const std::function<double(const Point3&)>& f);

}  // namespace boxqi
