#include "boxqi/domain.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace boxqi {

bool in_index_set(const MultiIndex& alpha, const DomainGrid& g) {
  int extreme = 0;
  for (int a = 0; a < 3; ++a) {
    if (alpha[a] < -1 || alpha[a] > g.m[a] + 2) return false;
    if (alpha[a] == -1 || alpha[a] == g.m[a] + 2) ++extreme;
  }
  return extreme <= 1;
}

std::int64_t IndexSetA::size() const {
  const auto m = grid_.m.cast<std::int64_t>();
  return (m.x() + 4) * (m.y() + 4) * (m.z() + 4) -
         (4 * (m.x() + 4) + 4 * (m.y() + 2) + 4 * (m.z() + 2));
}

std::vector<MultiIndex> IndexSetA::enumerate() const {
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int k = -1; k <= grid_.m.z() + 2; ++k)
    for (int j = -1; j <= grid_.m.y() + 2; ++j)
      for (int i = -1; i <= grid_.m.x() + 2; ++i)
        if (in_index_set({i, j, k}, grid_)) out.emplace_back(i, j, k);
  return out;
}

IndexSetA index_set(const DomainGrid& grid) { return IndexSetA(grid); }

double data_coordinate(int i, int m, double h) {
  if (i < 0 || i > m + 1) throw std::out_of_range("data_coordinate: index outside [0, m+1]");
  if (i == 0) return 0.0;
  if (i == m + 1) return m * h;
  return (i - 0.5) * h;
}

Point3 data_point(const MultiIndex& beta, const DomainGrid& g) {
  return {data_coordinate(beta.x(), g.m.x(), g.h), data_coordinate(beta.y(), g.m.y(), g.h),
          data_coordinate(beta.z(), g.m.z(), g.h)};
}

MultiIndex project_lattice_index(const MultiIndex& lattice, const DomainGrid& g) {
  MultiIndex out;
  for (int a = 0; a < 3; ++a) out[a] = std::clamp(lattice[a], 0, g.m[a] + 1);
  return out;
}

Point3 project_to_boundary(const Point3& p, const DomainGrid& g) {
  const Point3 ext = g.extent();
  return p.cwiseMax(Point3::Zero()).cwiseMin(ext);
}

DataPointSet data_points(const DomainGrid& grid) { return DataPointSet(grid); }

std::vector<SymmetryTransform> SymmetryTransform::group() {
  std::vector<SymmetryTransform> out;
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (int bits = 0; bits < 8; ++bits) {
      SymmetryTransform t;
      t.perm = perm;
      for (int a = 0; a < 3; ++a) t.reflect[a] = (bits >> a) & 1;
      out.push_back(t);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::string ClassKey::to_string() const {
  return "(" + std::to_string(p) + "," + std::to_string(q) + "," + std::to_string(r) + ")";
}

const std::vector<ClassKey>& canonical_keys() {
  static const std::vector<ClassKey> keys{
      {0, 0, -1}, {1, 0, -1}, {2, 0, -1}, {1, 1, -1}, {2, 1, -1}, {2, 2, -1},
      {0, 0, 0},  {1, 0, 0},  {2, 0, 0},  {3, 0, 0},  {1, 1, 0},  {2, 1, 0},
      {3, 1, 0},  {2, 2, 0},  {3, 2, 0},  {4, 2, 0},  {3, 3, 0},
      {1, 1, 1},  {2, 1, 1},  {3, 1, 1},  {2, 2, 1},
      {2, 2, 2},
      {3, 3, 3}};
  return keys;
}

ClassKey clamp_to_key(const MultiIndex& s) {
  int p = s.x(), q = s.y(), r = s.z();
  if (!(p >= q && q >= r) || r < -1)
    throw std::invalid_argument("clamp_to_key: classes must be sorted descending and >= -1");
  switch (r) {
    case -1:
      q = std::min(q, 2);
      p = std::min(p, 2);
      break;
    case 0:
      q = std::min(q, 3);
      p = std::min(p, q == 2 ? 4 : 3);
      break;
    case 1:
      q = std::min(q, 2);
      p = std::min(p, q == 1 ? 3 : 2);
      break;
    case 2:
      return {2, 2, 2};
    default:
      return {3, 3, 3};
  }
  return {p, q, r};
}

Classification classify(const MultiIndex& alpha, const DomainGrid& grid) {
  if ((grid.m.array() < kMinQuasiInterpolationCubes).any())
    throw std::invalid_argument("classify: every cube count must be at least 11");
  if (!in_index_set(alpha, grid)) throw std::out_of_range("classify: alpha not in the index set");

  Classification c;
  MultiIndex classes;
  for (int a = 0; a < 3; ++a) {
    const int half = (grid.m[a] + 2) / 2;  // ceil((m+1)/2)
    if (alpha[a] <= half) {
      classes[a] = alpha[a];
    } else {
      classes[a] = grid.m[a] + 1 - alpha[a];
      c.transform.reflect[a] = true;
    }
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int l, int r) { return classes[l] > classes[r]; });
  c.transform.perm = order;
  for (int d = 0; d < 3; ++d) c.sorted_classes[d] = classes[order[d]];
  c.key = clamp_to_key(c.sorted_classes);
  c.shift = c.sorted_classes - c.key.as_index();
  return c;
}

}  // namespace boxqi
