#include "boxqi/boxspline.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>

namespace boxqi::boxspline {
namespace {

constexpr int kDirs = 7;
constexpr int kMasks = 1 << kDirs;
constexpr int kStates = 2187;  // 3^7

template <class Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <class Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

template <class Scalar>
Scalar det3(const Mat3<Scalar>& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

template <class Scalar>
Mat3<Scalar> adjugate3(const Mat3<Scalar>& a) {
  Mat3<Scalar> c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      c(j, i) = a(i1, j1) * a(i2, j2) - a(i1, j2) * a(i2, j1);
    }
  return c;
}

// Per-subset data for the recurrence: pseudo-inverse for representing x in
// terms of the subset (minimum-norm coefficients), or the inverse of the
// basis at the 3-direction level.
template <class Scalar>
struct SubsetData {
  int count = 0;
  bool spans = false;
  std::array<int, kDirs> members{};
  Eigen::Matrix<Scalar, Eigen::Dynamic, 3> coeff_map;  // count x 3
  Scalar inv_abs_det{0};
  MultiIndex lo = MultiIndex::Zero(), hi = MultiIndex::Zero();
};

template <class Scalar>
struct OracleTables {
  std::array<SubsetData<Scalar>, kMasks> subsets;
  std::array<Vec3<Scalar>, kDirs> dirs;

  OracleTables() {
    const Directions& X = directions();
    for (int d = 0; d < kDirs; ++d) dirs[d] = X.col(d).cast<Scalar>();
    for (int mask = 1; mask < kMasks; ++mask) {
      auto& s = subsets[mask];
      s.count = std::popcount(static_cast<unsigned>(mask));
      int n = 0;
      for (int d = 0; d < kDirs; ++d)
        if (mask & (1 << d)) s.members[n++] = d;
      Eigen::Matrix<Scalar, 3, Eigen::Dynamic> Y(3, s.count);
      for (int c = 0; c < s.count; ++c) Y.col(c) = dirs[s.members[c]];
      for (int c = 0; c < s.count; ++c)
        for (int a = 0; a < 3; ++a) {
          const int v = X(a, s.members[c]);
          if (v < 0) s.lo[a] += v;
          if (v > 0) s.hi[a] += v;
        }
      const Mat3<Scalar> G = Y * Y.transpose();
      const Scalar g = det3<Scalar>(G);
      s.spans = g != Scalar(0);
      if (!s.spans) continue;
      if (s.count == 3) {
        const Mat3<Scalar> Z = Y.template leftCols<3>();
        const Scalar dz = det3<Scalar>(Z);
        s.coeff_map = adjugate3<Scalar>(Z) / dz;
        s.inv_abs_det = Scalar(1) / (dz < Scalar(0) ? -dz : dz);
      } else {
        s.coeff_map = Y.transpose() * (adjugate3<Scalar>(G) / g);
      }
    }
  }
};

template <class Scalar>
const OracleTables<Scalar>& oracle_tables() {
  static const OracleTables<Scalar> t;
  return t;
}

// Memoised recurrence. A state is (remaining directions, directions removed
// through the shifted branch); the evaluation point is x minus the shifted
// directions. There are at most 3^7 reachable states.
template <class Scalar>
class Recurrence {
 public:
  explicit Recurrence(const Vec3<Scalar>& x) : x_(x), t_(oracle_tables<Scalar>()) {}

  Scalar value(int mask, int shifted) {
    auto& slot = memo_[state_index(mask, shifted)];
    if (slot) return *slot;
    slot = compute(mask, shifted);
    return *slot;
  }

 private:
  Scalar compute(int mask, int shifted) {
    const auto& s = t_.subsets[mask];
    Vec3<Scalar> y = x_;
    for (int d = 0; d < kDirs; ++d)
      if (shifted & (1 << d)) y -= t_.dirs[d];
    for (int a = 0; a < 3; ++a)
      if (y[a] < Scalar(s.lo[a]) || y[a] > Scalar(s.hi[a])) return Scalar(0);
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> t = s.coeff_map * y;
    if (s.count == 3) {
      for (int c = 0; c < 3; ++c)
        if (t[c] < Scalar(0) || t[c] >= Scalar(1)) return Scalar(0);
      return s.inv_abs_det;
    }
    Scalar sum(0);
    for (int c = 0; c < s.count; ++c) {
      const int bit = 1 << s.members[c];
      const int rest = mask ^ bit;
      // Dropping this direction leaves a planar set whose box spline is a
      // measure on a knot plane: zero off the planes.
      if (!t_.subsets[rest].spans) continue;
      if (t[c] != Scalar(0)) sum += t[c] * value(rest, shifted);
      if (t[c] != Scalar(1)) sum += (Scalar(1) - t[c]) * value(rest, shifted | bit);
    }
    return sum / Scalar(s.count - 3);
  }

  // Base-3 digit per direction: remaining, removed, removed-and-shifted.
  static int state_index(int mask, int shifted) {
    int idx = 0;
    for (int d = kDirs - 1; d >= 0; --d) {
      const int digit = (mask & (1 << d)) ? 0 : ((shifted & (1 << d)) ? 2 : 1);
      idx = idx * 3 + digit;
    }
    return idx;
  }

  Vec3<Scalar> x_;
  const OracleTables<Scalar>& t_;
  std::vector<std::optional<Scalar>> memo_ = std::vector<std::optional<Scalar>>(kStates);
};

// Collocation points: quartic domain points shrunk toward the centroid.
template <class Scalar>
std::array<Eigen::Matrix<Scalar, 4, 1>, bb::kQuarticSize> sample_barycentrics(const Scalar& shrink) {
  std::array<Eigen::Matrix<Scalar, 4, 1>, bb::kQuarticSize> out;
  const auto& ids = bb::indices(4);
  const Scalar rest = (Scalar(1) - shrink) / Scalar(4);
  for (int p = 0; p < bb::kQuarticSize; ++p)
    for (int r = 0; r < 4; ++r) out[p][r] = shrink * Scalar(ids[p][r]) / Scalar(4) + rest;
  return out;
}

template <class Scalar>
Scalar bernstein_value(const bb::Index4& I, const Eigen::Matrix<Scalar, 4, 1>& b) {
  static constexpr int fact[5] = {1, 1, 2, 6, 24};
  Scalar v(24 / (fact[I[0]] * fact[I[1]] * fact[I[2]] * fact[I[3]]));
  for (int r = 0; r < 4; ++r)
    for (int e = 0; e < I[r]; ++e) v *= b[r];
  return v;
}

// Gauss-Jordan elimination with exact arithmetic; solves A X = B in place.
void exact_solve(std::vector<std::vector<Rational>>& A, std::vector<Rational>& rhs) {
  const std::size_t n = A.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && A[piv][col] == 0) ++piv;
    if (piv == n) throw std::runtime_error("exact_solve: singular collocation matrix");
    std::swap(A[piv], A[col]);
    std::swap(rhs[piv], rhs[col]);
    const Rational inv = Rational(1) / A[col][col];
    for (std::size_t j = col; j < n; ++j) A[col][j] *= inv;
    rhs[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      const Rational f = A[r][col];
      for (std::size_t j = col; j < n; ++j) A[r][j] -= f * A[col][j];
      rhs[r] -= f * rhs[col];
    }
  }
}

}  // namespace

const Directions& directions() {
  static const Directions X = [] {
    Directions d;
    d << 1, 0, 0, 1, -1, 1, -1,  //
        0, 1, 0, 1, 1, -1, -1,   //
        0, 0, 1, 1, 1, 1, 1;
    return d;
  }();
  return X;
}

template <class Scalar>
Scalar eval_oracle(const Eigen::Matrix<Scalar, 3, 1>& x) {
  Recurrence<Scalar> rec(x);
  return rec.value(kMasks - 1, 0);
}

template double eval_oracle<double>(const Point3&);
template Rational eval_oracle<Rational>(const Eigen::Matrix<Rational, 3, 1>&);

int BBTable::nonzero_count() const {
  int n = 0;
  for (auto v : nonzero_) n += v;
  return n;
}

void BBTable::save(const std::string& path) const {
  // Written beside the target and renamed, so concurrent readers never see a
  // partial file.
  const std::string tmp = path + ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("BBTable::save: cannot open " + tmp);
    const char magic[4] = {'B', 'X', 'B', 'B'};
    const std::uint32_t version = 1;
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&shrink_), sizeof shrink_);
    out.write(reinterpret_cast<const char*>(nonzero_.data()), static_cast<std::streamsize>(nonzero_.size()));
    out.write(reinterpret_cast<const char*>(coeffs_.data()),
              static_cast<std::streamsize>(coeffs_.size() * sizeof(double)));
    if (!out) throw std::runtime_error("BBTable::save: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

BBTable BBTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("BBTable::load: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0;
  BBTable t;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (!in || std::string(magic, 4) != "BXBB" || version != 1)
    throw std::runtime_error("BBTable::load: not a box-spline table: " + path);
  in.read(reinterpret_cast<char*>(&t.shrink_), sizeof t.shrink_);
  in.read(reinterpret_cast<char*>(t.nonzero_.data()), static_cast<std::streamsize>(t.nonzero_.size()));
  in.read(reinterpret_cast<char*>(t.coeffs_.data()),
          static_cast<std::streamsize>(t.coeffs_.size() * sizeof(double)));
  if (!in) throw std::runtime_error("BBTable::load: truncated file " + path);
  return t;
}

BBTable build_bb_table(double shrink) {
  static constexpr double kMinRcond = 1e-10;
  const double candidates[] = {shrink, 0.77, 0.71, 0.9};
  const auto& ids = bb::indices(4);

  for (double s : candidates) {
    const auto samples = sample_barycentrics<double>(s);
    Eigen::Matrix<double, bb::kQuarticSize, bb::kQuarticSize> A;
    for (int p = 0; p < bb::kQuarticSize; ++p)
      for (int q = 0; q < bb::kQuarticSize; ++q) A(p, q) = bernstein_value<double>(ids[q], samples[p]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rcond() < kMinRcond) continue;

    BBTable table;
    table.set_shrink_factor(s);
    const auto& ref = reference_tetrahedra();
    for (int slot = 0; slot < BBTable::kSlots; ++slot) {
      const Point3 origin = BBTable::offset_of(slot).cast<double>();
      for (int t = 0; t < kTetsPerCube; ++t) {
        const Tetrahedron& T = ref[t];
        const Point3 centroid = origin + (T[0] + T[1] + T[2] + T[3]) / 4.0;
        // Cells are either inside the support or disjoint from it.
        if (eval_oracle(centroid) == 0.0) continue;
        Eigen::Matrix<double, bb::kQuarticSize, 1> values;
        for (int p = 0; p < bb::kQuarticSize; ++p) {
          Point3 x = origin;
          for (int r = 0; r < 4; ++r) x += samples[p][r] * T[r];
          values[p] = eval_oracle(x);
        }
        const Eigen::VectorXd c = lu.solve(values);
        auto dst = table.patch(slot, t);
        for (int p = 0; p < bb::kQuarticSize; ++p) dst[p] = c[p];
        table.set_nonzero(slot, t, true);
      }
    }
    return table;
  }
  throw std::runtime_error("build_bb_table: no shrink factor gives a well-conditioned fit");
}

const BBTable& table() {
  static const BBTable t = [] {
    if (const char* path = std::getenv("BOXQI_BBTABLE_CACHE")) {
      std::ifstream probe(path, std::ios::binary);
      if (probe) return BBTable::load(path);
      BBTable built = build_bb_table();
      built.save(path);
      return built;
    }
    return build_bb_table();
  }();
  return t;
}

std::array<Rational, bb::kQuarticSize> exact_patch(const MultiIndex& offset, int tet,
                                                   const Rational& shrink) {
  if (BBTable::slot(offset) < 0) throw std::out_of_range("exact_patch: offset outside support box");
  if (tet < 0 || tet >= kTetsPerCube) throw std::out_of_range("exact_patch: tet id");
  const auto samples = sample_barycentrics<Rational>(shrink);
  const auto& ids = bb::indices(4);
  // Reference vertices are in {0, 1/2, 1}: exact as rationals.
  const auto& T = reference_tetrahedra()[tet];
  std::array<Eigen::Matrix<Rational, 3, 1>, 4> V;
  for (int r = 0; r < 4; ++r)
    for (int a = 0; a < 3; ++a) V[r][a] = Rational(static_cast<int>(std::lround(2 * T[r][a])), 2);

  std::vector<std::vector<Rational>> A(bb::kQuarticSize, std::vector<Rational>(bb::kQuarticSize));
  std::vector<Rational> rhs(bb::kQuarticSize);
  for (int p = 0; p < bb::kQuarticSize; ++p) {
    for (int q = 0; q < bb::kQuarticSize; ++q) A[p][q] = bernstein_value<Rational>(ids[q], samples[p]);
    Eigen::Matrix<Rational, 3, 1> x = offset.cast<int>().unaryExpr([](int v) { return Rational(v); });
    for (int r = 0; r < 4; ++r) x += samples[p][r] * V[r];
    rhs[p] = eval_oracle<Rational>(x);
  }
  exact_solve(A, rhs);
  std::array<Rational, bb::kQuarticSize> out;
  for (int p = 0; p < bb::kQuarticSize; ++p) out[p] = rhs[p];
  return out;
}

namespace {

struct TableHit {
  int slot = -1;
  int tet = 0;
  Barycentric4 bary;
};

TableHit find(const Point3& x) {
  TableHit hit;
  MultiIndex cube;
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor(x[a]);
    if (f < kSupportLo[a] || f >= kSupportLo[a] + kSupportWidth) return hit;
    cube[a] = static_cast<int>(f);
  }
  const LocalLocation loc = locate_in_unit_cube(x - cube.cast<double>());
  hit.slot = BBTable::slot(cube);
  hit.tet = loc.tet;
  hit.bary = loc.bary;
  return hit;
}

}  // namespace

double eval(const Point3& x) {
  const TableHit hit = find(x);
  if (hit.slot < 0) return 0.0;
  const BBTable& t = table();
  if (!t.nonzero(hit.slot, hit.tet)) return 0.0;
  return bb::dot(t.patch(hit.slot, hit.tet), bb::quartic_basis(hit.bary));
}

std::vector<Point3> derivative_directions(const MultiIndex& order) {
  if ((order.array() < 0).any() || order.sum() > 3)
    throw std::invalid_argument("derivative order must be nonnegative with |order| <= 3");
  std::vector<Point3> dirs;
  for (int a = 0; a < 3; ++a)
    for (int k = 0; k < order[a]; ++k) dirs.push_back(Point3::Unit(a));
  return dirs;
}

double eval_derivative(const Point3& x, const MultiIndex& order) {
  const auto cart = derivative_directions(order);
  const TableHit hit = find(x);
  if (hit.slot < 0) return 0.0;
  const BBTable& t = table();
  if (!t.nonzero(hit.slot, hit.tet)) return 0.0;
  std::vector<Eigen::Vector4d> dirs;
  for (const auto& d : cart) dirs.push_back(barycentric_direction(hit.tet, d));
  const auto p = t.patch(hit.slot, hit.tet);
  return bb::derivative<double>(std::span<const double>(p.data(), p.size()), 4, hit.bary, dirs);
}

double eval_translate(const MultiIndex& alpha, const DomainGrid& grid, const Point3& x) {
  return eval(translate_argument(alpha, grid.h, x));
}

double eval_translate_derivative(const MultiIndex& alpha, const DomainGrid& grid, const Point3& x,
                                 const MultiIndex& order) {
  return eval_derivative(translate_argument(alpha, grid.h, x), order) /
         std::pow(grid.h, order.sum());
}

}  // namespace boxqi::boxspline
