#include "boxqi/partition.hpp"

#include "boxqi/bernstein.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace boxqi {
namespace {

constexpr double kFaceTol = 1e-12;

std::array<Tetrahedron, kTetsPerCube> make_reference() {
  std::array<Tetrahedron, kTetsPerCube> out;
  const Point3 center(0.5, 0.5, 0.5);
  static constexpr int corner_b[4] = {0, 1, 1, 0};
  static constexpr int corner_c[4] = {0, 0, 1, 1};
  for (int f = 0; f < 6; ++f) {
    const int a = f / 2, side = f % 2;
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    Point3 face = center;
    face[a] = side;
    for (int q = 0; q < 4; ++q) {
      Point3 p0, p1;
      p0[a] = p1[a] = side;
      p0[b] = corner_b[q];
      p0[c] = corner_c[q];
      p1[b] = corner_b[(q + 1) % 4];
      p1[c] = corner_c[(q + 1) % 4];
      out[4 * f + q] = {center, face, p0, p1};
    }
  }
  return out;
}

Eigen::Matrix4d barycentric_map(const Tetrahedron& t) {
  Eigen::Matrix4d A;
  for (int v = 0; v < 4; ++v) {
    A(0, v) = 1.0;
    A.block<3, 1>(1, v) = t[v];
  }
  return A.inverse();
}

}  // namespace

DomainGrid::DomainGrid(int m1, int m2, int m3, double h_) : m(m1, m2, m3), h(h_) {
  if (m1 < 1 || m2 < 1 || m3 < 1)
    throw std::invalid_argument("DomainGrid: cube counts must be positive");
  if (!(h_ > 0.0) || !std::isfinite(h_))
    throw std::invalid_argument("DomainGrid: h must be positive and finite");
}

const std::array<Tetrahedron, kTetsPerCube>& reference_tetrahedra() {
  static const auto ref = make_reference();
  return ref;
}

const std::array<Eigen::Matrix4d, kTetsPerCube>& reference_barycentric_maps() {
  static const auto maps = [] {
    std::array<Eigen::Matrix4d, kTetsPerCube> out;
    const auto& ref = reference_tetrahedra();
    for (int t = 0; t < kTetsPerCube; ++t) out[t] = barycentric_map(ref[t]);
    return out;
  }();
  return maps;
}

std::array<Tetrahedron, kTetsPerCube> tetrahedra_of_cube(const MultiIndex& cube,
                                                         const DomainGrid& grid) {
  if (!grid.contains_cube(cube))
    throw std::out_of_range("tetrahedra_of_cube: cube index outside the grid");
  auto out = reference_tetrahedra();
  const Point3 origin = cube.cast<double>();
  for (auto& t : out)
    for (auto& v : t) v = (v + origin) * grid.h;
  return out;
}

double volume(const Tetrahedron& t) {
  Eigen::Matrix3d E;
  E.col(0) = t[1] - t[0];
  E.col(1) = t[2] - t[0];
  E.col(2) = t[3] - t[0];
  return std::abs(E.determinant()) / 6.0;
}

Barycentric4 barycentric(const Tetrahedron& t, const Point3& p) {
  Eigen::Vector4d rhs(1.0, p.x(), p.y(), p.z());
  return barycentric_map(t) * rhs;
}

LocalLocation locate_in_unit_cube(const Point3& u) {
  const Point3 d = u - Point3::Constant(0.5);
  int a = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(d[i]) > std::abs(d[a])) a = i;
  const int side = d[a] > 0.0 ? 1 : 0;
  const int b = (a + 1) % 3, c = (a + 2) % 3;
  int q;
  if (std::abs(d[c]) >= std::abs(d[b]))
    q = d[c] > 0.0 ? 2 : 0;
  else
    q = d[b] > 0.0 ? 1 : 3;

  const auto& maps = reference_barycentric_maps();
  const Eigen::Vector4d rhs(1.0, u.x(), u.y(), u.z());
  LocalLocation loc{4 * (2 * a + side) + q, maps[4 * (2 * a + side) + q] * rhs};
  if (loc.bary.minCoeff() > kFaceTol) return loc;

  // On (or numerically near) a shared face: smallest containing id wins.
  LocalLocation best = loc;
  for (int t = 0; t < kTetsPerCube; ++t) {
    Barycentric4 bt = maps[t] * rhs;
    if (bt.minCoeff() >= -kFaceTol) return {t, bt};
    if (bt.minCoeff() > best.bary.minCoeff()) best = {t, bt};
  }
  return best;
}

MultiIndex containing_cube(const Point3& g, const MultiIndex& m) {
  MultiIndex c;
  for (int a = 0; a < 3; ++a) {
    int ca = static_cast<int>(std::ceil(g[a])) - 1;
    c[a] = std::clamp(ca, 0, m[a] - 1);
  }
  return c;
}

Location locate(const Point3& p, const DomainGrid& grid) {
  const Point3 ext = grid.extent();
  const double slack = kFaceTol * ext.maxCoeff();
  if ((p.array() < -slack).any() || (p.array() > ext.array() + slack).any())
    throw std::out_of_range("locate: point outside the domain");
  const Point3 g = p / grid.h;
  const MultiIndex cube = containing_cube(g, grid.m);
  const LocalLocation loc = locate_in_unit_cube(g - cube.cast<double>());
  return {{cube, loc.tet}, loc.bary};
}

Eigen::Vector4d barycentric_direction(int tet, const Point3& direction) {
  const Eigen::Vector4d rhs(0.0, direction.x(), direction.y(), direction.z());
  return reference_barycentric_maps()[tet] * rhs;
}

std::array<Point3, 35> domain_points(const Tetrahedron& t) {
  if (volume(t) <= 1e-14 * std::pow((t[1] - t[0]).norm() + 1e-300, 3))
    throw std::invalid_argument("domain_points: degenerate tetrahedron");
  std::array<Point3, 35> out;
  const auto& ids = bb::indices(4);
  for (int p = 0; p < 35; ++p) {
    Point3 acc = Point3::Zero();
    for (int r = 0; r < 4; ++r) acc += (ids[p][r] / 4.0) * t[r];
    out[p] = acc;
  }
  return out;
}

}  // namespace boxqi
