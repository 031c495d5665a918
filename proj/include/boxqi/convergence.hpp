#pragma once

// Error and convergence-order studies on a uniform evaluation grid.

#include "boxqi/qi.hpp"
#include "boxqi/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace boxqi {

/// Default evaluation grid: 139 points per axis, both endpoints included.
inline constexpr int kDefaultEvalGrid = 139;

/// N^3 points covering [0, extent] per axis, endpoints included, x fastest.
std::vector<Point3> evaluation_grid(const Point3& extent, int n);

struct ErrorReport {
  double max_error = 0.0;
  Point3 argmax = Point3::Zero();  // domain coordinates
  std::size_t points = 0;
};

/// max |f - s| over the grid; f takes domain coordinates.
ErrorReport max_error(const QISpline& s, const std::function<double(const Point3&)>& f, int grid_n,
                      int threads = 0);
/// Same for a derivative D^order.
ErrorReport max_derivative_error(const QISpline& s, const std::function<double(const Point3&)>& df,
                                 const MultiIndex& order, int grid_n, int threads = 0);

struct ConvergenceRow {
  std::string fn;
  int m = 0;
  double error = 0.0;
  double rf = 0.0;      // log2(E(previous m) / E(m)); valid only when has_rf
  bool has_rf = false;
};

/// Samples, approximates and measures each m in order (m sorted ascending).
std::vector<ConvergenceRow> convergence(const std::string& fn, std::vector<int> ms, int grid_n = kDefaultEvalGrid,
                                        int threads = 0);

std::string to_csv(const std::vector<ConvergenceRow>& rows);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace boxqi
