#pragma once

// Trivariate Bernstein-Bezier polynomials on a tetrahedron.
//
// Coefficients of a degree-d polynomial are stored in descending
// lexicographic order of the multi-indices (i,j,k,l), i+j+k+l = d:
// (d,0,0,0), (d-1,1,0,0), (d-1,0,1,0), (d-1,0,0,1), (d-2,2,0,0), ...
// Everything is templated on the scalar so the same code runs in double and
// in exact rational arithmetic.

#include <Eigen/Core>

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

namespace boxqi::bb {

inline constexpr int kMaxDegree = 4;
inline constexpr int kQuarticSize = 35;

using Index4 = std::array<int, 4>;

constexpr int size(int degree) { return (degree + 1) * (degree + 2) * (degree + 3) / 6; }

/// Multi-indices of the given degree in storage order.
const std::vector<Index4>& indices(int degree);

/// Storage position of a multi-index (its degree is the component sum).
int position(const Index4& idx);

/// One de Casteljau (blossoming) step: degree d -> d-1 with weights u.
template <class Scalar>
void blossom_step(std::span<const Scalar> in, int degree, const Eigen::Matrix<Scalar, 4, 1>& u,
                  std::span<Scalar> out) {
  const auto& lower = indices(degree - 1);
  for (std::size_t p = 0; p < lower.size(); ++p) {
    Index4 idx = lower[p];
    Scalar acc(0);
    for (int r = 0; r < 4; ++r) {
      ++idx[r];
      acc += u[r] * in[position(idx)];
      --idx[r];
    }
    out[p] = acc;
  }
}

/// De Casteljau evaluation at barycentric coordinates b.
template <class Scalar>
Scalar evaluate(std::span<const Scalar> coeffs, int degree, const Eigen::Matrix<Scalar, 4, 1>& b) {
  std::vector<Scalar> cur(coeffs.begin(), coeffs.end());
  std::vector<Scalar> next(cur.size());
  for (int d = degree; d > 0; --d) {
    blossom_step<Scalar>(cur, d, b, std::span<Scalar>(next.data(), size(d - 1)));
    cur.swap(next);
  }
  return cur[0];
}

/// Mixed directional derivative D_{dirs[0]}...D_{dirs[k-1]} at b. Directions
/// are barycentric differences (components summing to zero).
template <class Scalar>
Scalar derivative(std::span<const Scalar> coeffs, int degree, const Eigen::Matrix<Scalar, 4, 1>& b,
                  std::span<const Eigen::Matrix<Scalar, 4, 1>> dirs) {
  const int k = static_cast<int>(dirs.size());
  if (k > degree) return Scalar(0);
  std::vector<Scalar> cur(coeffs.begin(), coeffs.end());
  std::vector<Scalar> next(cur.size());
  int d = degree;
  Scalar factor(1);
  for (const auto& a : dirs) {
    blossom_step<Scalar>(cur, d, a, std::span<Scalar>(next.data(), size(d - 1)));
    cur.swap(next);
    factor *= Scalar(d);
    --d;
  }
  for (; d > 0; --d) {
    blossom_step<Scalar>(cur, d, b, std::span<Scalar>(next.data(), size(d - 1)));
    cur.swap(next);
  }
  return factor * cur[0];
}

/// All 35 quartic Bernstein basis values at b, in storage order.
std::array<double, kQuarticSize> quartic_basis(const Eigen::Vector4d& b);

/// Quartic evaluation via precomputed basis values.
inline double dot(std::span<const double, kQuarticSize> coeffs,
                  const std::array<double, kQuarticSize>& basis) {
  double acc = 0.0;
  for (int i = 0; i < kQuarticSize; ++i) acc += coeffs[i] * basis[i];
  return acc;
}

}  // namespace boxqi::bb
