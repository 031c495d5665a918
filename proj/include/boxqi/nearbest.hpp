#pragma once

// Derivation of near-best coefficient functionals: octahedral data sets
// projected into the domain, the P3 exactness system anchored to the
// differential quasi-interpolant, and exact l1 minimisation.

#include "boxqi/domain.hpp"
#include "boxqi/polynomial.hpp"
#include "boxqi/simplex.hpp"
#include "boxqi/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace boxqi {

/// (2n+1)(2n^2+2n+3)/3: lattice points with |d|_1 <= n.
long centered_octahedral_number(int n);

struct OctahedronSet {
  MultiIndex alpha;
  int n = 0;
  DomainGrid grid;
  int lattice_count = 0;            // before projection
  std::vector<MultiIndex> points;   // projected data indices, deduplicated, sorted
};

OctahedronSet octahedron(const MultiIndex& alpha, int n, const DomainGrid& grid);

/// Exact data coordinate in units of h.
Rational exact_data_coordinate(int i, int m);

struct ConstraintSystem {
  MultiIndex alpha;
  DomainGrid grid;
  bool tied = false;
  std::vector<std::vector<MultiIndex>> columns;  // each column is an orbit of data indices
  std::vector<poly::Exponent> rows;              // one monomial per row
  RationalMatrix V;
  RationalVector b;
};

/// Builds V sigma = b over the given data indices. With tie_symmetry the
/// weights are tied over orbits of the stabiliser of alpha and monomials
/// related by it share a row. Coordinates are scaled by h (exact).
ConstraintSystem constraint_system(const MultiIndex& alpha, const DomainGrid& grid,
                                   const std::vector<MultiIndex>& points, bool tie_symmetry,
                                   const Rational& h = Rational(1));
ConstraintSystem constraint_system(const OctahedronSet& oct, bool tie_symmetry,
                                   const Rational& h = Rational(1));

enum class LpStatus { Optimal, Infeasible };

struct L1Solution {
  LpStatus status = LpStatus::Infeasible;
  Rational norm{0};
  std::vector<std::pair<MultiIndex, Rational>> weights;  // nonzero weights, sorted by index
  int iterations = 0;

  double norm_value() const { return norm.convert_to<double>(); }
};

L1Solution minimize_l1(const ConstraintSystem& sys);

/// Grid used to derive the canonical functional of a class: large enough
/// that the octahedron never reaches the far faces, and equal on all axes
/// so axis permutations fixing the key are symmetries.
DomainGrid canonical_grid(const ClassKey& key, int n);

L1Solution derive(const ClassKey& key, int n, bool tie_symmetry = true);

/// l1 solve restricted to a given canonical support (no tying).
L1Solution minimize_l1_on_support(const ClassKey& key, const std::vector<MultiIndex>& support);

struct NormTableRow {
  ClassKey key;
  std::vector<std::pair<int, std::optional<Rational>>> cells;  // n -> norm, nullopt if infeasible
};

std::vector<NormTableRow> norm_table(const std::vector<ClassKey>& classes, int n_lo, int n_hi,
                                     bool tie_symmetry = true);

/// Rounds to the given number of significant figures, as a printed table would.
double round_significant(double v, int digits);

/// Decimal string of v rounded up at the given significant figure, exactly.
/// This is how the published norm table prints its bounds.
std::string ceil_significant(const Rational& v, int digits);

}  // namespace boxqi
