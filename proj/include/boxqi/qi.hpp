#pragma once

// The quasi-interpolant Qf = sum_alpha lambda_alpha(f) B_alpha: coefficients
// from samples, evaluation (direct and per-tetrahedron compiled), derivatives
// and a binary file format.

#include "boxqi/bernstein.hpp"
#include "boxqi/domain.hpp"
#include "boxqi/samples.hpp"
#include "boxqi/stencils.hpp"
#include "boxqi/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace boxqi {

class QISpline {
 public:
  QISpline() = default;
  explicit QISpline(const DomainGrid& grid);

  const DomainGrid& grid() const { return grid_; }

  /// a_alpha, zero for alpha outside A.
  double coefficient(const MultiIndex& alpha) const {
    return coeffs_[static_cast<std::size_t>(IndexSetA::storage_index(alpha, grid_))];
  }
  void set_coefficient(const MultiIndex& alpha, double v);
  /// Dense (m+4)^3 storage, x fastest, A' slots held at zero.
  const std::vector<double>& coefficients() const { return coeffs_; }

  // Output placement: physical = origin + spacing .* (domain coordinate).
  Point3 origin = Point3::Zero();
  Point3 spacing = Point3::Ones();
  std::string label;

  Point3 to_physical(const Point3& x) const { return origin + spacing.cwiseProduct(x); }

  /// Little-endian binary: "BQIS", u32 version, i32 m[3], f64 h, f64 origin[3],
  /// f64 spacing[3], u32 label length, label bytes, u64 count, f64 coefficients.
  void save(const std::string& path) const;
  static QISpline load(const std::string& path);

 private:
  DomainGrid grid_;
  std::vector<double> coeffs_;
};

/// a_alpha = lambda_alpha(f) for all alpha in A.
QISpline approximate(const SampleField& samples, const StencilLibrary& lib = library(), int threads = 0);

/// BB coefficients of the spline on one tetrahedron of the partition.
std::array<double, bb::kQuarticSize> assemble_patch(const QISpline& s, const TetraRef& where);

/// Sum of a_alpha B_alpha(p) over the translates whose support box holds p.
double eval_direct(const QISpline& s, const Point3& p);
inline double eval(const QISpline& s, const Point3& p) { return eval_direct(s, p); }

/// D^order (Qf)(p), |order| <= 3; one-sided on faces of the partition.
double eval_derivative(const QISpline& s, const Point3& p, const MultiIndex& order);

/// Below this many points eval_many calls eval_direct per point; above it,
/// points are grouped by tetrahedron and each needed patch is assembled once.
inline constexpr std::size_t kCompiledCrossover = 10000;

std::vector<double> eval_many(const QISpline& s, std::span<const Point3> points, int threads = 0);
std::vector<double> eval_many_derivative(const QISpline& s, std::span<const Point3> points,
                                         const MultiIndex& order, int threads = 0);

struct SizeError : std::runtime_error {
  SizeError(std::uint64_t bytes, std::uint64_t budget);
  std::uint64_t bytes, budget;
};

inline constexpr std::uint64_t kDefaultCompileBudget = std::uint64_t{1} << 30;

/// Per-tetrahedron patches for the cubes in [lo, hi) of the grid.
class CompiledSpline {
 public:
  CompiledSpline() = default;
  CompiledSpline(const QISpline& s, const MultiIndex& lo, const MultiIndex& hi,
                 std::uint64_t budget = kDefaultCompileBudget, int threads = 0);

  static std::uint64_t bytes_required(const MultiIndex& cube_count);

  const DomainGrid& grid() const { return grid_; }
  const MultiIndex& lo() const { return lo_; }
  const MultiIndex& hi() const { return hi_; }
  bool covers(const MultiIndex& cube) const {
    return (cube.array() >= lo_.array()).all() && (cube.array() < hi_.array()).all();
  }
  std::uint64_t bytes() const { return patches_.size() * sizeof(double); }

  std::span<const double, bb::kQuarticSize> patch(const TetraRef& where) const;

  /// p must lie in a covered cube.
  double eval(const Point3& p) const;
  double eval_derivative(const Point3& p, const MultiIndex& order) const;

 private:
  DomainGrid grid_;
  MultiIndex lo_ = MultiIndex::Zero(), hi_ = MultiIndex::Zero();
  std::vector<double> patches_;  // [cube (x fastest)][tet][35]
};

/// Whole-grid compile; throws SizeError when it does not fit the budget.
CompiledSpline compile(const QISpline& s, std::uint64_t budget = kDefaultCompileBudget, int threads = 0);

struct BlockCompileStats {
  std::int64_t blocks = 0;
  std::int64_t cubes = 0;
  std::uint64_t peak_bytes = 0;
};

/// Compiles the grid in blocks of whole cube rows, each within the budget,
/// handing every block to visit before the next is built.
BlockCompileStats compile_blocks(const QISpline& s, std::uint64_t budget,
                                 const std::function<void(const CompiledSpline&)>& visit, int threads = 0);

}  // namespace boxqi
