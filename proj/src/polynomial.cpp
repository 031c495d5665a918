#include "boxqi/polynomial.hpp"

namespace boxqi::poly {

const std::array<Exponent, 20>& cubic_monomials() {
  static const std::array<Exponent, 20> m{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 0, 0},
                                           {0, 2, 0}, {0, 0, 2}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1},
                                           {3, 0, 0}, {0, 3, 0}, {0, 0, 3}, {2, 1, 0}, {1, 2, 0},
                                           {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {0, 1, 2}, {1, 1, 1}}};
  return m;
}

std::string monomial_name(const Exponent& e) {
  static const char* axes = "xyz";
  std::string out;
  for (int a = 0; a < 3; ++a) {
    if (e[a] == 0) continue;
    out += axes[a];
    if (e[a] > 1) out += "^" + std::to_string(e[a]);
  }
  return out.empty() ? "1" : out;
}

}  // namespace boxqi::poly
