#include "boxqi/domain.hpp"

#include <doctest.h>

#include <set>

using namespace boxqi;

TEST_CASE("index set size and exclusions") {
  const DomainGrid grid(11, 11, 11, 1.0);
  CHECK(IndexSetA(grid).size() == 3211);
  CHECK(static_cast<std::int64_t>(IndexSetA(grid).enumerate().size()) == 3211);
  CHECK_FALSE(in_index_set(MultiIndex(-1, -1, 0), grid));
  CHECK_FALSE(in_index_set(MultiIndex(-1, 0, -1), grid));
  CHECK(in_index_set(MultiIndex(0, 0, -1), grid));
  CHECK(in_index_set(MultiIndex(13, 5, 12), grid));
  CHECK_FALSE(in_index_set(MultiIndex(14, 5, 5), grid));
}

TEST_CASE("centers") {
  CHECK(center(MultiIndex(1, 1, 1), 1.0) == Point3(0.5, 0.5, 0.5));
  CHECK(center(MultiIndex(0, 0, -1), 2.0) == Point3(-1, -1, -3));
  // Reflection of (0,1,1) across x for m1 = 11 is (12,1,1) and mirrors the center.
  SymmetryTransform rx;
  rx.reflect = {true, false, false};
  const MultiIndex m(11, 11, 11);
  const MultiIndex a2 = rx.apply_index(MultiIndex(0, 1, 1), m);
  CHECK(a2 == MultiIndex(12, 1, 1));
  CHECK(center(a2, 1.0).x() == doctest::Approx(11.0 - center(MultiIndex(0, 1, 1), 1.0).x()));
}

TEST_CASE("data points") {
  const DomainGrid grid(11, 12, 13, 0.25);
  CHECK(data_coordinate(0, 11, 0.25) == 0.0);
  CHECK(data_coordinate(12, 11, 0.25) == doctest::Approx(11 * 0.25));
  CHECK(data_coordinate(3, 11, 0.25) == doctest::Approx(2.5 * 0.25));
  CHECK(DataPointSet(grid).size() == 13 * 14 * 15);
  // Lattice point at (-3/2 h, h/2, h/2) projects to M_(0,1,1).
  CHECK(project_lattice_index(MultiIndex(-1, 1, 1), grid) == MultiIndex(0, 1, 1));
  for (int i = -15; i < 30; ++i)
    for (int j = -15; j < 30; j += 7)
      CHECK(in_data_set(project_lattice_index(MultiIndex(i, j, i - j), grid), grid));
}

TEST_CASE("classification") {
  const DomainGrid grid(11, 11, 11, 1.0);
  {
    const Classification c = classify(MultiIndex(3, 3, 3), grid);
    CHECK(c.key == ClassKey{3, 3, 3});
    CHECK(c.transform.is_identity());
  }
  {
    const Classification c = classify(MultiIndex(0, 0, -1), grid);
    CHECK(c.key == ClassKey{0, 0, -1});
    CHECK(c.transform.is_identity());
  }
  {
    const Classification c = classify(MultiIndex(13, 5, 12), grid);
    CHECK(c.sorted_classes == MultiIndex(5, 0, -1));
    CHECK(c.key == ClassKey{2, 0, -1});
  }
  {
    // 7 reflects to 12 - 7 = 5, two steps beyond the deepest tabulated class.
    const Classification c = classify(MultiIndex(7, 0, 0), grid);
    CHECK(c.key == ClassKey{3, 0, 0});
    CHECK(c.shift == MultiIndex(2, 0, 0));
  }
  // Every alpha in A lands on one of the tabulated classes.
  int keys_hit = 0;
  std::set<ClassKey> seen;
  for (const auto& a : IndexSetA(grid).enumerate()) seen.insert(classify(a, grid).key);
  for (const auto& k : canonical_keys()) keys_hit += static_cast<int>(seen.count(k));
  CHECK(seen.size() == canonical_keys().size());
  CHECK(keys_hit == static_cast<int>(canonical_keys().size()));
}

TEST_CASE("symmetry transforms invert") {
  const MultiIndex m(11, 12, 13);
  for (const auto& t : SymmetryTransform::group()) {
    const MultiIndex c(2, 5, 1);
    CHECK(t.inverse_index(t.apply_index(c, m), m) == c);
    const MultiIndex cm = t.canonical_dims(m);
    for (int d = 0; d < 3; ++d) CHECK(cm[d] == m[t.perm[d]]);
  }
  CHECK(SymmetryTransform::group().size() == 48);
}
