#include "boxqi/convergence.hpp"

#include "boxqi/volume.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace boxqi {

std::vector<Point3> evaluation_grid(const Point3& extent, int n) {
  if (n < 2) throw std::invalid_argument("evaluation grid needs at least 2 points per axis");
  std::vector<Point3> pts;
  pts.reserve(static_cast<std::size_t>(n) * n * n);
  const double d = n - 1;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) pts.emplace_back(extent.x() * i / d, extent.y() * j / d, extent.z() * k / d);
  return pts;
}

namespace {

ErrorReport reduce(const std::vector<Point3>& pts, const std::vector<double>& v,
                   const std::function<double(const Point3&)>& f) {
  ErrorReport r;
  r.points = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double e = std::abs(v[i] - f(pts[i]));
    if (e > r.max_error) {
      r.max_error = e;
      r.argmax = pts[i];
    }
  }
  return r;
}

}  // namespace

ErrorReport max_error(const QISpline& s, const std::function<double(const Point3&)>& f, int grid_n, int threads) {
  const auto pts = evaluation_grid(s.grid().extent(), grid_n);
  return reduce(pts, eval_many(s, pts, threads), f);
}

ErrorReport max_derivative_error(const QISpline& s, const std::function<double(const Point3&)>& df,
                                 const MultiIndex& order, int grid_n, int threads) {
  const auto pts = evaluation_grid(s.grid().extent(), grid_n);
  return reduce(pts, eval_many_derivative(s, pts, order, threads), df);
}

std::vector<ConvergenceRow> convergence(const std::string& fn, std::vector<int> ms, int grid_n, int threads) {
  std::sort(ms.begin(), ms.end());
  std::vector<ConvergenceRow> rows;
  for (int m : ms) {
    if (m < kMinQuasiInterpolationCubes) throw std::invalid_argument("convergence: m must be at least 11");
    const SampledFunction sf = sample_test_function(fn, m);
    const QISpline s = approximate(sf.samples, library(), threads);
    ConvergenceRow row;
    row.fn = fn;
    row.m = m;
    row.error = max_error(s, [&](const Point3& x) { return sf.fn.f(sf.origin + x); }, grid_n, threads).max_error;
    if (!rows.empty() && row.error > 0) {
      row.rf = std::log2(rows.back().error / row.error);
      row.has_rf = true;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string to_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "fn,m,error,rf\n";
  for (const auto& r : rows)
    out << r.fn << ',' << r.m << ',' << format_double(r.error) << ',' << (r.has_rf ? format_double(r.rf) : "") << '\n';
  return out.str();
}

}  // namespace boxqi
