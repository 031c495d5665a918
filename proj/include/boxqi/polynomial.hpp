#pragma once

// Monomial basis of trivariate cubics and the exactness target of the
// coefficient functionals, (I - 5/24 h^2 Lap + 3/128 h^4 Lap^2) p at C_alpha.

#include "boxqi/types.hpp"

#include <array>
#include <string>

namespace boxqi::poly {

using Exponent = std::array<int, 3>;

/// 1, x, y, z, x^2, y^2, z^2, xy, xz, yz, x^3, y^3, z^3, x^2y, xy^2, x^2z, xz^2,
/// y^2z, yz^2, xyz.
const std::array<Exponent, 20>& cubic_monomials();

std::string monomial_name(const Exponent& e);

template <class Scalar>
Scalar monomial(const Exponent& e, const Eigen::Matrix<Scalar, 3, 1>& x) {
  Scalar v(1);
  for (int a = 0; a < 3; ++a)
    for (int k = 0; k < e[a]; ++k) v *= x[a];
  return v;
}

/// Laplacian of a monomial evaluated at x.
template <class Scalar>
Scalar laplacian(const Exponent& e, const Eigen::Matrix<Scalar, 3, 1>& x) {
  Scalar v(0);
  for (int a = 0; a < 3; ++a) {
    if (e[a] < 2) continue;
    Exponent d = e;
    d[a] -= 2;
    v += Scalar(e[a] * (e[a] - 1)) * monomial<Scalar>(d, x);
  }
  return v;
}

/// Bi-Laplacian of a monomial evaluated at x.
template <class Scalar>
Scalar bilaplacian(const Exponent& e, const Eigen::Matrix<Scalar, 3, 1>& x) {
  Scalar v(0);
  for (int a = 0; a < 3; ++a) {
    if (e[a] < 2) continue;
    Exponent d = e;
    d[a] -= 2;
    v += Scalar(e[a] * (e[a] - 1)) * laplacian<Scalar>(d, x);
  }
  return v;
}

/// (p - 5/24 h^2 Lap p + 3/128 h^4 Lap^2 p)(c).
template <class Scalar>
Scalar differential_target(const Exponent& e, const Eigen::Matrix<Scalar, 3, 1>& c, const Scalar& h) {
  const Scalar h2 = h * h;
  return monomial<Scalar>(e, c) - Scalar(5) / Scalar(24) * h2 * laplacian<Scalar>(e, c) +
         Scalar(3) / Scalar(128) * h2 * h2 * bilaplacian<Scalar>(e, c);
}

}  // namespace boxqi::poly
