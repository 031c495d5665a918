#include "boxqi/nearbest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace boxqi {

long centered_octahedral_number(int n) {
  const long k = n;
  return (2 * k + 1) * (2 * k * k + 2 * k + 3) / 3;
}

OctahedronSet octahedron(const MultiIndex& alpha, int n, const DomainGrid& grid) {
  if (n < 1) throw std::invalid_argument("octahedron: n must be >= 1");
  OctahedronSet out;
  out.alpha = alpha;
  out.n = n;
  out.grid = grid;
  std::set<MultiIndex, MultiIndexLess> pts;
  for (int dz = -n; dz <= n; ++dz)
    for (int dy = -n + std::abs(dz); dy <= n - std::abs(dz); ++dy) {
      const int rest = n - std::abs(dz) - std::abs(dy);
      for (int dx = -rest; dx <= rest; ++dx) {
        ++out.lattice_count;
        pts.insert(project_lattice_index(alpha + MultiIndex(dx, dy, dz), grid));
      }
    }
  out.points.assign(pts.begin(), pts.end());
  return out;
}

Rational exact_data_coordinate(int i, int m) {
  if (i < 0 || i > m + 1) throw std::out_of_range("exact_data_coordinate: index outside [0, m+1]");
  if (i == 0) return Rational(0);
  if (i == m + 1) return Rational(m);
  return Rational(2 * i - 1, 2);
}

namespace {

std::vector<SymmetryTransform> stabiliser(const MultiIndex& alpha, const DomainGrid& grid) {
  std::vector<SymmetryTransform> out;
  for (const auto& g : SymmetryTransform::group())
    if (g.canonical_dims(grid.m) == grid.m && g.apply_index(alpha, grid.m) == alpha) out.push_back(g);
  return out;
}

poly::Exponent act(const SymmetryTransform& g, const poly::Exponent& e) {
  poly::Exponent out{};
  for (int d = 0; d < 3; ++d) out[g.perm[d]] = e[d];
  return out;
}

bool has_reflection(const SymmetryTransform& g) { return g.reflect[0] || g.reflect[1] || g.reflect[2]; }

}  // namespace

ConstraintSystem constraint_system(const MultiIndex& alpha, const DomainGrid& grid,
                                   const std::vector<MultiIndex>& points, bool tie_symmetry,
                                   const Rational& h) {
  if (points.empty()) throw std::invalid_argument("constraint_system: empty point set");
  ConstraintSystem sys;
  sys.alpha = alpha;
  sys.grid = grid;

  std::vector<SymmetryTransform> stab;
  if (tie_symmetry) {
    stab = stabiliser(alpha, grid);
    // Reflections act on monomials with signs about a shifted origin; tying
    // only uses the pure axis permutations, which is all the canonical grid
    // ever produces.
    stab.erase(std::remove_if(stab.begin(), stab.end(), has_reflection), stab.end());
    const std::set<MultiIndex, MultiIndexLess> pset(points.begin(), points.end());
    for (const auto& g : stab)
      for (const auto& p : points)
        if (!pset.count(g.apply_index(p, grid.m)))
          throw std::invalid_argument("constraint_system: point set not closed under the stabiliser");
  }
  sys.tied = tie_symmetry && stab.size() > 1;

  if (sys.tied) {
    std::set<MultiIndex, MultiIndexLess> seen;
    for (const auto& p : points) {
      if (seen.count(p)) continue;
      std::set<MultiIndex, MultiIndexLess> orbit;
      for (const auto& g : stab) orbit.insert(g.apply_index(p, grid.m));
      seen.insert(orbit.begin(), orbit.end());
      sys.columns.emplace_back(orbit.begin(), orbit.end());
    }
    std::set<poly::Exponent> covered;
    for (const auto& e : poly::cubic_monomials()) {
      if (covered.count(e)) continue;
      for (const auto& g : stab) covered.insert(act(g, e));
      sys.rows.push_back(e);
    }
  } else {
    for (const auto& p : points) sys.columns.push_back({p});
    sys.rows.assign(poly::cubic_monomials().begin(), poly::cubic_monomials().end());
  }

  const int nr = static_cast<int>(sys.rows.size());
  const int nc = static_cast<int>(sys.columns.size());
  sys.V = RationalMatrix::Zero(nr, nc);
  sys.b = RationalVector::Zero(nr);
  const Eigen::Matrix<Rational, 3, 1> c((Rational(2 * alpha.x() - 1, 2)) * h,
                                        (Rational(2 * alpha.y() - 1, 2)) * h,
                                        (Rational(2 * alpha.z() - 1, 2)) * h);
  for (int r = 0; r < nr; ++r) {
    sys.b[r] = poly::differential_target<Rational>(sys.rows[r], c, h);
    for (int j = 0; j < nc; ++j) {
      Rational acc(0);
      for (const auto& beta : sys.columns[j]) {
        const Eigen::Matrix<Rational, 3, 1> x(exact_data_coordinate(beta.x(), grid.m.x()) * h,
                                              exact_data_coordinate(beta.y(), grid.m.y()) * h,
                                              exact_data_coordinate(beta.z(), grid.m.z()) * h);
        acc += poly::monomial<Rational>(sys.rows[r], x);
      }
      sys.V(r, j) = acc;
    }
  }
  return sys;
}

ConstraintSystem constraint_system(const OctahedronSet& oct, bool tie_symmetry, const Rational& h) {
  return constraint_system(oct.alpha, oct.grid, oct.points, tie_symmetry, h);
}

L1Solution minimize_l1(const ConstraintSystem& sys) {
  // sigma = u - v, u, v >= 0; a tied column carries |orbit| copies of its weight.
  const int nr = static_cast<int>(sys.V.rows());
  const int nc = static_cast<int>(sys.V.cols());
  RationalMatrix A(nr, 2 * nc);
  RationalVector c(2 * nc);
  for (int j = 0; j < nc; ++j) {
    A.col(2 * j) = sys.V.col(j);
    A.col(2 * j + 1) = -sys.V.col(j);
    c[2 * j] = c[2 * j + 1] = Rational(static_cast<long>(sys.columns[j].size()));
  }
  const lp::Result r = lp::solve(A, sys.b, c);
  L1Solution out;
  out.iterations = r.iterations;
  if (r.status != lp::Status::Optimal) {
    // Unbounded cannot happen (costs are positive); treat any failure as infeasible.
    out.status = LpStatus::Infeasible;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.norm = r.objective;
  for (int j = 0; j < nc; ++j) {
    const Rational w = r.x[2 * j] - r.x[2 * j + 1];
    if (w == 0) continue;
    for (const auto& beta : sys.columns[j]) out.weights.emplace_back(beta, w);
  }
  std::sort(out.weights.begin(), out.weights.end(),
            [](const auto& a, const auto& b) { return MultiIndexLess{}(a.first, b.first); });
  return out;
}

DomainGrid canonical_grid(const ClassKey& key, int n) {
  const int reach = std::max({key.p, key.q, key.r}) + n + 1;
  const int m = std::max(kMinQuasiInterpolationCubes, reach);
  return DomainGrid{MultiIndex::Constant(m), 1.0};
}

L1Solution derive(const ClassKey& key, int n, bool tie_symmetry) {
  const DomainGrid grid = canonical_grid(key, n);
  return minimize_l1(constraint_system(octahedron(key.as_index(), n, grid), tie_symmetry));
}

L1Solution minimize_l1_on_support(const ClassKey& key, const std::vector<MultiIndex>& support) {
  int reach = 0;
  for (const auto& b : support) reach = std::max(reach, b.maxCoeff());
  const DomainGrid grid{MultiIndex::Constant(std::max(kMinQuasiInterpolationCubes, reach + 1)), 1.0};
  return minimize_l1(constraint_system(key.as_index(), grid, support, false));
}

std::vector<NormTableRow> norm_table(const std::vector<ClassKey>& classes, int n_lo, int n_hi,
                                     bool tie_symmetry) {
  std::vector<NormTableRow> out;
  for (const auto& key : classes) {
    NormTableRow row{key, {}};
    for (int n = n_lo; n <= n_hi; ++n) {
      const L1Solution s = derive(key, n, tie_symmetry);
      if (s.status == LpStatus::Optimal)
        row.cells.emplace_back(n, s.norm);
      else
        row.cells.emplace_back(n, std::nullopt);
    }
    out.push_back(std::move(row));
  }
  return out;
}

double round_significant(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  const double e = std::floor(std::log10(std::abs(v)));
  const double scale = std::pow(10.0, digits - 1 - e);
  return std::round(v * scale) / scale;
}

std::string ceil_significant(const Rational& v, int digits) {
  if (v <= 0) throw std::invalid_argument("ceil_significant: value must be positive");
  // Exponent of the leading digit, found exactly.
  int e = 0;
  Rational t = v;
  while (t >= 10) t /= 10, ++e;
  while (t < 1) t *= 10, --e;
  const int decimals = digits - 1 - e;
  Rational scale(1);
  for (int i = 0; i < decimals; ++i) scale *= 10;
  for (int i = 0; i < -decimals; ++i) scale /= 10;
  const Rational scaled = v * scale;
  boost::multiprecision::mpz_int q = numerator(scaled) / denominator(scaled);
  if (Rational(q) < scaled) q += 1;
  std::string s = q.str();
  if (decimals <= 0) return s + std::string(static_cast<std::size_t>(-decimals), '0');
  if (s.size() <= static_cast<std::size_t>(decimals)) s.insert(0, decimals + 1 - s.size(), '0');
  s.insert(s.size() - decimals, ".");
  return s;
}

}  // namespace boxqi
