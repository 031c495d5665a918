#pragma once

// Uniform type-6 tetrahedral partition of a box.
//
// Each cube is split into 24 tetrahedra: the six face pyramids (apex at the
// cube center) are each cut along both face diagonals. Tetrahedron ids are
// 4*face + quarter, with faces ordered (x-lo, x-hi, y-lo, y-hi, z-lo, z-hi)
// and quarters running around the face, so that for a face with normal axis a
// and tangent axes b=(a+1)%3, c=(a+2)%3 the quarters touch the face edges
// c=0, b=1, c=1, b=0 in that order. Vertex order inside every tetrahedron is
// (cube center, face center, corner q, corner q+1); all Bernstein tables in
// this library are indexed against that order.
//
// Internally everything is in grid units (x/h); physical coordinates appear
// only at the API boundary.

#include "boxqi/types.hpp"

#include <Eigen/Core>

#include <array>
#include <compare>
#include <cstdint>

namespace boxqi {

inline constexpr int kTetsPerCube = 24;

struct DomainGrid {
  MultiIndex m{1, 1, 1};
  double h = 1.0;

  DomainGrid() = default;
  DomainGrid(int m1, int m2, int m3, double h);
  DomainGrid(const MultiIndex& m, double h) : DomainGrid(m.x(), m.y(), m.z(), h) {}

  Point3 extent() const { return m.cast<double>() * h; }
  std::int64_t cube_count() const {
    return static_cast<std::int64_t>(m.x()) * m.y() * m.z();
  }
  bool contains_cube(const MultiIndex& c) const {
    return (c.array() >= 0).all() && (c.array() < m.array()).all();
  }
  bool contains(const Point3& p) const {
    return (p.array() >= 0.0).all() && (p.array() <= extent().array()).all();
  }
  bool operator==(const DomainGrid&) const = default;
};

struct TetraRef {
  MultiIndex cube;
  int tet = 0;

  friend bool operator==(const TetraRef& a, const TetraRef& b) {
    return a.cube == b.cube && a.tet == b.tet;
  }
  friend std::strong_ordering operator<=>(const TetraRef& a, const TetraRef& b) {
    for (int i = 0; i < 3; ++i)
      if (auto c = a.cube[i] <=> b.cube[i]; c != 0) return c;
    return a.tet <=> b.tet;
  }
};

using Barycentric4 = Eigen::Vector4d;
using Tetrahedron = std::array<Point3, 4>;

struct Location {
  TetraRef where;
  Barycentric4 bary;
};

struct LocalLocation {
  int tet = 0;
  Barycentric4 bary;
};

/// The 24 tetrahedra of the unit cube [0,1]^3 in canonical order.
const std::array<Tetrahedron, kTetsPerCube>& reference_tetrahedra();

/// Affine maps (1,u) -> barycentric coordinates for the reference tetrahedra.
const std::array<Eigen::Matrix4d, kTetsPerCube>& reference_barycentric_maps();

std::array<Tetrahedron, kTetsPerCube> tetrahedra_of_cube(const MultiIndex& cube,
                                                         const DomainGrid& grid);

double volume(const Tetrahedron& t);

Barycentric4 barycentric(const Tetrahedron& t, const Point3& p);

/// Locates u in the closed unit cube. Points on shared faces go to the
/// containing tetrahedron with the smallest id.
LocalLocation locate_in_unit_cube(const Point3& u);

/// Cube containing a point given in grid units, preferring the
/// lexicographically smallest cube on shared faces and clamping to the grid.
MultiIndex containing_cube(const Point3& grid_point, const MultiIndex& m);

/// Point location in the closed domain, physical coordinates.
Location locate(const Point3& p, const DomainGrid& grid);

/// Barycentric direction of a Cartesian direction (grid units) in a reference
/// tetrahedron.
Eigen::Vector4d barycentric_direction(int tet, const Point3& direction);

/// The 35 quartic domain points, ordered like bb::indices(4).
std::array<Point3, 35> domain_points(const Tetrahedron& t);

}  // namespace boxqi
