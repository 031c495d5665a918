#pragma once

// Bounded-domain bookkeeping for the quasi-interpolant: the index set A of
// translates meeting the domain, the data points M_beta, the centers C_alpha,
// and the box symmetry group used to reduce every alpha to one of the
// canonical boundary classes near the origin corner / edge.

#include "boxqi/partition.hpp"
#include "boxqi/types.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace boxqi {

/// Smallest cube count per axis for which the boundary functionals fit.
inline constexpr int kMinQuasiInterpolationCubes = 11;

// ---- index set A ---------------------------------------------------------

/// alpha in A: every coordinate in [-1, m+2] and at most one of them extreme
/// (-1 or m+2).
bool in_index_set(const MultiIndex& alpha, const DomainGrid& grid);

class IndexSetA {
 public:
  explicit IndexSetA(const DomainGrid& grid) : grid_(grid) {}

  bool contains(const MultiIndex& alpha) const { return in_index_set(alpha, grid_); }
  std::int64_t size() const;
  std::vector<MultiIndex> enumerate() const;
  const DomainGrid& grid() const { return grid_; }

  /// Dense storage: alpha -> (alpha + 1) in a (m+4)^3 box, x fastest.
  static MultiIndex storage_dims(const DomainGrid& g) { return g.m + MultiIndex::Constant(4); }
  static std::int64_t storage_index(const MultiIndex& alpha, const DomainGrid& g) {
    const MultiIndex d = storage_dims(g);
    return (static_cast<std::int64_t>(alpha.z() + 1) * d.y() + (alpha.y() + 1)) * d.x() + (alpha.x() + 1);
  }

 private:
  DomainGrid grid_;
};

IndexSetA index_set(const DomainGrid& grid);

/// C_alpha = ((i-1/2)h, (j-1/2)h, (k-1/2)h).
inline Point3 center(const MultiIndex& alpha, double h) {
  return (alpha.cast<double>() - Point3::Constant(0.5)) * h;
}

// ---- data points ---------------------------------------------------------

/// s_0 = 0, s_i = (i-1/2)h for 1 <= i <= m, s_{m+1} = m h.
double data_coordinate(int i, int m, double h);

inline bool in_data_set(const MultiIndex& beta, const DomainGrid& g) {
  return (beta.array() >= 0).all() && (beta.array() <= (g.m.array() + 1)).all();
}

Point3 data_point(const MultiIndex& beta, const DomainGrid& grid);

/// Data index of the clamp of the lattice point C_lattice into the domain.
MultiIndex project_lattice_index(const MultiIndex& lattice, const DomainGrid& grid);

/// Componentwise clamp of a point into the closed domain.
Point3 project_to_boundary(const Point3& p, const DomainGrid& grid);

class DataPointSet {
 public:
  explicit DataPointSet(const DomainGrid& grid) : grid_(grid) {}

  static MultiIndex dims(const DomainGrid& g) { return g.m + MultiIndex::Constant(2); }
  std::int64_t size() const { return dims(grid_).cast<std::int64_t>().prod(); }
  Point3 point(const MultiIndex& beta) const { return data_point(beta, grid_); }
  bool contains(const MultiIndex& beta) const { return in_data_set(beta, grid_); }

  /// Linear index, x fastest.
  static std::int64_t linear(const MultiIndex& beta, const DomainGrid& g) {
    const MultiIndex d = dims(g);
    return (static_cast<std::int64_t>(beta.z()) * d.y() + beta.y()) * d.x() + beta.x();
  }
  const DomainGrid& grid() const { return grid_; }

 private:
  DomainGrid grid_;
};

DataPointSet data_points(const DomainGrid& grid);

// ---- symmetry ------------------------------------------------------------

/// Element of the 48-element box symmetry group, acting from a canonical
/// frame to the frame of the domain: canonical axis d becomes axis perm[d],
/// then axis a is mirrored if reflect[a]. Index coordinates mirror as
/// i -> m_a + 1 - i (both for translates and data points), physical
/// coordinates as x -> m_a h - x.
struct SymmetryTransform {
  std::array<int, 3> perm{0, 1, 2};
  std::array<bool, 3> reflect{false, false, false};

  bool is_identity() const {
    return perm == std::array<int, 3>{0, 1, 2} && !reflect[0] && !reflect[1] && !reflect[2];
  }

  /// Cube counts of the canonical frame for a domain frame with counts m.
  MultiIndex canonical_dims(const MultiIndex& m) const {
    return {m[perm[0]], m[perm[1]], m[perm[2]]};
  }

  MultiIndex apply_index(const MultiIndex& canonical, const MultiIndex& m) const {
    MultiIndex out;
    for (int d = 0; d < 3; ++d) out[perm[d]] = canonical[d];
    for (int a = 0; a < 3; ++a)
      if (reflect[a]) out[a] = m[a] + 1 - out[a];
    return out;
  }

  MultiIndex inverse_index(const MultiIndex& framed, const MultiIndex& m) const {
    MultiIndex tmp = framed;
    for (int a = 0; a < 3; ++a)
      if (reflect[a]) tmp[a] = m[a] + 1 - tmp[a];
    MultiIndex out;
    for (int d = 0; d < 3; ++d) out[d] = tmp[perm[d]];
    return out;
  }

  Point3 apply_point(const Point3& canonical, const DomainGrid& grid) const {
    Point3 out;
    for (int d = 0; d < 3; ++d) out[perm[d]] = canonical[d];
    for (int a = 0; a < 3; ++a)
      if (reflect[a]) out[a] = grid.m[a] * grid.h - out[a];
    return out;
  }

  /// All 48 elements.
  static std::vector<SymmetryTransform> group();

  bool operator==(const SymmetryTransform&) const = default;
};

struct ClassKey {
  int p = 0, q = 0, r = 0;

  MultiIndex as_index() const { return {p, q, r}; }
  std::string to_string() const;
  auto operator<=>(const ClassKey&) const = default;
};

/// The canonical classes, in table order (k=-1, k=0, k=1, (2,2,2), (3,3,3)).
const std::vector<ClassKey>& canonical_keys();

struct Classification {
  ClassKey key;
  MultiIndex sorted_classes;  // per-axis classes sorted descending
  MultiIndex shift;           // sorted_classes - key, per canonical axis
  SymmetryTransform transform;
};

/// Maps alpha to its canonical class and the transform from the canonical
/// frame to alpha's frame.
Classification classify(const MultiIndex& alpha, const DomainGrid& grid);

/// Clamps a sorted class triple into the canonical key set.
ClassKey clamp_to_key(const MultiIndex& sorted_classes);

}  // namespace boxqi
