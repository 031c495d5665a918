#include "boxqi/bernstein.hpp"
#include "boxqi/partition.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace boxqi;

TEST_CASE("unit cube splits into 24 tetrahedra of volume 1/24") {
  const auto& tets = reference_tetrahedra();
  double total = 0.0;
  for (const auto& t : tets) {
    CHECK(volume(t) == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
    total += volume(t);
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("vertices are corners, face centers and the body center") {
  std::set<std::array<int, 3>> verts;
  for (const auto& t : tetrahedra_of_cube(MultiIndex::Zero(), DomainGrid(1, 1, 1, 1.0)))
    for (const auto& v : t) verts.insert({int(std::lround(2 * v.x())), int(std::lround(2 * v.y())), int(std::lround(2 * v.z()))});
  CHECK(verts.size() == 15);
  CHECK(verts.count({1, 1, 1}) == 1);
  for (const auto& t : reference_tetrahedra()) {
    bool has_center = false;
    for (const auto& v : t) has_center = has_center || (v - Point3::Constant(0.5)).norm() < 1e-15;
    CHECK(has_center);
  }
}

TEST_CASE("cube center is a vertex with barycentric weight one") {
  const DomainGrid grid(3, 3, 3, 0.5);
  const Location loc = locate(Point3::Constant(0.25), grid);
  CHECK(loc.where.cube == MultiIndex::Zero());
  CHECK(loc.bary.maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("locate round-trips random points") {
  const DomainGrid grid(5, 4, 6, 0.3);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Point3 p = grid.extent().cwiseProduct(Point3(u(rng), u(rng), u(rng)));
    const Location loc = locate(p, grid);
    CHECK(loc.bary.minCoeff() >= -1e-12);
    const auto tets = tetrahedra_of_cube(loc.where.cube, grid);
    Point3 q = Point3::Zero();
    for (int k = 0; k < 4; ++k) q += loc.bary[k] * tets[static_cast<std::size_t>(loc.where.tet)][static_cast<std::size_t>(k)];
    worst = std::max(worst, (q - p).norm());
  }
  CHECK(worst <= 1e-12 * 0.3);
}

TEST_CASE("points strictly inside a tetrahedron have positive coordinates") {
  const auto& t = reference_tetrahedra()[5];
  const Point3 c = 0.25 * (t[0] + t[1] + t[2] + t[3]);
  const LocalLocation l = locate_in_unit_cube(c);
  CHECK(l.tet == 5);
  CHECK(l.bary.minCoeff() > 0.0);
}

TEST_CASE("quartic domain points") {
  const Tetrahedron s{Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(0, 0, 1)};
  const auto pts = domain_points(s);
  const auto& idx = bb::indices(4);
  CHECK(idx[0] == bb::Index4{4, 0, 0, 0});
  CHECK((pts[0] - s[0]).norm() == 0.0);
  const int centroid = bb::position({1, 1, 1, 1});
  CHECK((pts[static_cast<std::size_t>(centroid)] - Point3::Constant(0.25)).norm() < 1e-15);
  for (const auto& p : pts) CHECK(barycentric(s, p).minCoeff() >= -1e-15);
}

TEST_CASE("Bernstein positions and derivatives in every degree") {
  for (int d = 0; d <= bb::kMaxDegree; ++d) {
    const auto& I = bb::indices(d);
    CHECK(static_cast<int>(I.size()) == bb::size(d));
    for (std::size_t p = 0; p < I.size(); ++p) CHECK(bb::position(I[p]) == static_cast<int>(p));
  }
  // b0 as a quartic: value b0, derivative along e0 - e1 equal to 1.
  std::vector<double> c(bb::kQuarticSize);
  for (int i = 0; i < bb::kQuarticSize; ++i) c[static_cast<std::size_t>(i)] = bb::indices(4)[static_cast<std::size_t>(i)][0] / 4.0;
  const Eigen::Vector4d b(0.1, 0.2, 0.3, 0.4), dir(1, -1, 0, 0);
  CHECK(bb::evaluate<double>(std::span<const double>(c), 4, b) == doctest::Approx(0.1));
  CHECK(bb::derivative<double>(std::span<const double>(c), 4, b, std::span<const Eigen::Vector4d>(&dir, 1)) ==
        doctest::Approx(1.0));
  CHECK(bb::dot(std::span<const double, bb::kQuarticSize>(c.data(), bb::kQuarticSize), bb::quartic_basis(b)) ==
        doctest::Approx(0.1));
}
