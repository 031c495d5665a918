#pragma once

// The seven-direction trivariate box spline B(.|X), a C^2 piecewise quartic on
// the type-6 partition of the integer cube grid.
//
// Two evaluation paths are provided and kept independent:
//   * eval_oracle: the de Boor-Hollig recurrence down to 3-direction
//     parallelepiped indicators (slow, valid off knot planes);
//   * eval: per-tetrahedron Bernstein patches (BBTable), fitted once from
//     oracle samples taken strictly inside every cell of the support.

#include "boxqi/bernstein.hpp"
#include "boxqi/partition.hpp"
#include "boxqi/types.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace boxqi::boxspline {

using Directions = Eigen::Matrix<int, 3, 7>;

/// e1..e7: (1,0,0),(0,1,0),(0,0,1),(1,1,1),(-1,1,1),(1,-1,1),(-1,-1,1).
const Directions& directions();

/// Center of the support.
inline Point3 center() { return {0.5, 0.5, 2.5}; }

/// Bounding box of the support, [-2,3]x[-2,3]x[0,5].
inline constexpr std::array<int, 3> kSupportLo{-2, -2, 0};
inline constexpr int kSupportWidth = 5;

/// Recurrence evaluation of B at x. x must avoid the knot planes
/// (x, y, z, x+-y, y+-z, x+-z integer); values there follow the half-open
/// convention of the base case and are not meaningful.
template <class Scalar>
Scalar eval_oracle(const Eigen::Matrix<Scalar, 3, 1>& x);

inline double eval_oracle(const Point3& x) { return eval_oracle<double>(x); }

/// Quartic Bernstein patches of B on every tetrahedron of its bounding box.
class BBTable {
 public:
  static constexpr int kSlots = kSupportWidth * kSupportWidth * kSupportWidth;

  BBTable() : coeffs_(static_cast<std::size_t>(kSlots) * kTetsPerCube * bb::kQuarticSize, 0.0),
              nonzero_(static_cast<std::size_t>(kSlots) * kTetsPerCube, 0) {}

  /// Slot of the unit cube with lower corner `offset`, or -1 outside the box.
  static int slot(const MultiIndex& offset) {
    int s = 0;
    for (int a = 0; a < 3; ++a) {
      const int o = offset[a] - kSupportLo[a];
      if (o < 0 || o >= kSupportWidth) return -1;
      s = s * kSupportWidth + o;
    }
    return s;
  }
  static MultiIndex offset_of(int slot) {
    MultiIndex o;
    for (int a = 2; a >= 0; --a) {
      o[a] = slot % kSupportWidth + kSupportLo[a];
      slot /= kSupportWidth;
    }
    return o;
  }

  std::span<const double, bb::kQuarticSize> patch(int slot, int tet) const {
    return std::span<const double, bb::kQuarticSize>(
        coeffs_.data() + (static_cast<std::size_t>(slot) * kTetsPerCube + tet) * bb::kQuarticSize,
        bb::kQuarticSize);
  }
  std::span<double, bb::kQuarticSize> patch(int slot, int tet) {
    return std::span<double, bb::kQuarticSize>(
        coeffs_.data() + (static_cast<std::size_t>(slot) * kTetsPerCube + tet) * bb::kQuarticSize,
        bb::kQuarticSize);
  }
  bool nonzero(int slot, int tet) const { return nonzero_[slot * kTetsPerCube + tet] != 0; }
  void set_nonzero(int slot, int tet, bool v) { nonzero_[slot * kTetsPerCube + tet] = v ? 1 : 0; }

  int nonzero_count() const;
  double shrink_factor() const { return shrink_; }
  void set_shrink_factor(double s) { shrink_ = s; }

  /// Little-endian binary cache ("BXBB", version, shrink, flags, coefficients).
  void save(const std::string& path) const;
  static BBTable load(const std::string& path);

  bool operator==(const BBTable&) const = default;

 private:
  std::vector<double> coeffs_;
  std::vector<std::uint8_t> nonzero_;
  double shrink_ = 0.0;
};

/// Fits every patch from oracle samples at domain points shrunk toward the
/// cell centroid. Retries with other shrink factors when the collocation
/// matrix is badly conditioned.
BBTable build_bb_table(double shrink = 0.83);

/// Shared table, built on first use (or loaded from $BOXQI_BBTABLE_CACHE when
/// that file exists and was written by save()).
const BBTable& table();

/// Exact-rational fit of one patch, for auditing the double table.
std::array<Rational, bb::kQuarticSize> exact_patch(const MultiIndex& offset, int tet,
                                                   const Rational& shrink = Rational(83, 100));

/// Table evaluation of B.
double eval(const Point3& x);

/// D^order B at x (|order| <= 3). Exact for the patch containing x; one-sided
/// on knot planes.
double eval_derivative(const Point3& x, const MultiIndex& order);

/// Argument of B for the scaled translate B_alpha at physical point x.
inline Point3 translate_argument(const MultiIndex& alpha, double h, const Point3& x) {
  return x / h - Point3(alpha.x() - 1, alpha.y() - 1, alpha.z() - 3);
}

double eval_translate(const MultiIndex& alpha, const DomainGrid& grid, const Point3& x);
double eval_translate_derivative(const MultiIndex& alpha, const DomainGrid& grid, const Point3& x,
                                 const MultiIndex& order);

/// Cartesian derivative directions for a derivative multi-index, in order
/// x..x y..y z..z.
std::vector<Point3> derivative_directions(const MultiIndex& order);

}  // namespace boxqi::boxspline
