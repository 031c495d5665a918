#include "boxqi/bernstein.hpp"

namespace boxqi::bb {
namespace {

struct Tables {
  std::array<std::vector<Index4>, kMaxDegree + 1> idx;
  // pos[d][i][j][k] within degree d; l = d - i - j - k.
  std::array<std::array<std::array<std::array<int, kMaxDegree + 1>, kMaxDegree + 1>, kMaxDegree + 1>,
             kMaxDegree + 1>
      pos{};

  Tables() {
    for (int d = 0; d <= kMaxDegree; ++d) {
      for (int i = d; i >= 0; --i)
        for (int j = d - i; j >= 0; --j)
          for (int k = d - i - j; k >= 0; --k) {
            pos[d][i][j][k] = static_cast<int>(idx[d].size());
            idx[d].push_back({i, j, k, d - i - j - k});
          }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

const std::vector<Index4>& indices(int degree) {
  if (degree < 0 || degree > kMaxDegree) throw std::out_of_range("bb::indices: degree");
  return tables().idx[degree];
}

int position(const Index4& idx) {
  return tables().pos[idx[0] + idx[1] + idx[2] + idx[3]][idx[0]][idx[1]][idx[2]];
}

std::array<double, kQuarticSize> quartic_basis(const Eigen::Vector4d& b) {
  // powers[r][e] = b_r^e
  std::array<std::array<double, 5>, 4> pw{};
  for (int r = 0; r < 4; ++r) {
    pw[r][0] = 1.0;
    for (int e = 1; e <= 4; ++e) pw[r][e] = pw[r][e - 1] * b[r];
  }
  static constexpr std::array<double, 5> fact{1.0, 1.0, 2.0, 6.0, 24.0};
  std::array<double, kQuarticSize> out{};
  const auto& ids = indices(4);
  for (int p = 0; p < kQuarticSize; ++p) {
    const auto& I = ids[p];
    const double multinomial = 24.0 / (fact[I[0]] * fact[I[1]] * fact[I[2]] * fact[I[3]]);
    out[p] = multinomial * pw[0][I[0]] * pw[1][I[1]] * pw[2][I[2]] * pw[3][I[3]];
  }
  return out;
}

}  // namespace boxqi::bb
