#include "boxqi/stencils.hpp"

#include "boxqi/nearbest.hpp"
#include "boxqi/polynomial.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace boxqi {
namespace {

// Rows are "weight:b|b|...;" with each b an "i,j,k" data index; a weight
// applies to every index in its group.
struct Row {
  ClassKey key;
  int n;
  double l1;
  const char* terms;
};

// clang-format off
const Row kRows[] = {
  // k = -1
  {{0, 0, -1}, 11, 8.774,
   "5720029937968/1777075925625:0,0,0;"
   "-17625172171/30540510000:3,0,0|0,3,0;"
   "5091473/125966750:4,4,0;"
   "-49957799237/1496484990000:11,0,0|0,11,0;"
   "42683993/462735000:8,1,0|1,8,0;"
   "-51197831/3054051000:6,5,0|5,6,0;"
   "-323423/157500:0,0,3;"
   "371/1800:5,0,3|0,5,3;"
   "-3/175:3,3,4;"
   "-26/165:4,0,6|0,4,6;"
   "155/312:1,0,7|0,1,7;"
   "557/15000:0,0,8;"
   "-6553/26600:0,0,10"},
  {{1, 0, -1}, 9, 9.099,
   "17446153/20540520:0,0,0;"
   "7677660701/3308104800:1,0,0;"
   "2896225/6918912:2,0,0;"
   "772241/5915669760:10,0,0;"
   "-4139/9072:0,3,0;"
   "-109793/453600:2,3,0;"
   "3743/39312:0,7,0;"
   "16889/157248:1,7,0;"
   "3041/157248:3,7,0;"
   "-473/5712:1,9,0;"
   "-815/432:0,0,2;"
   "-3997/4320:2,0,2;"
   "1/12:1,3,3;"
   "13/100:2,3,3;"
   "13/42:0,2,4;"
   "-53/270:1,3,5;"
   "18103/39600:0,0,6;"
   "805/3168:2,0,6;"
   "59/13200:3,0,6;"
   "-937/3600:1,0,8"},
  {{2, 0, -1}, 9, 9.099,
   "722869/772200:1,0,0|3,0,0;"
   "78797/45900:2,0,0;"
   "-15083/43200:1,3,0|3,3,0;"
   "277/2496:1,7,0|3,7,0;"
   "-473/5712:2,9,0;"
   "-4049/2880:1,0,2|3,0,2;"
   "1859/43200:1,3,3|3,3,3;"
   "2749/21600:2,3,3;"
   "853/8640:1,2,4|3,2,4;"
   "3389/30240:2,2,4;"
   "-53/270:2,3,5;"
   "3779/10560:1,0,6|3,0,6;"
   "-937/3600:2,0,8"},
  {{1, 1, -1}, 7, 9.386,
   "101/2430:1,0,0|0,1,0;"
   "12995/4158:1,1,0;"
   "101/34020:8,1,0|1,8,0;"
   "-538/675:0,0,2;"
   "-7/54:2,0,2|0,2,2;"
   "-293/2700:3,0,2|0,3,2;"
   "-239/144:1,1,2;"
   "-7/72:2,1,2|1,2,2;"
   "-199/5400:3,3,2;"
   "641/972:1,0,5|0,1,5;"
   "641/1944:2,1,5|1,2,5;"
   "-181/176:1,1,6"},
  {{2, 1, -1}, 7, 9.386,
   "1/156:1,0,0|3,0,0;"
   "881/1296:1,1,0|3,1,0;"
   "81/44:2,1,0;"
   "1/1872:1,7,0|3,7,0;"
   "-43/72:1,0,2|3,0,2;"
   "-119/216:1,1,2|3,1,2;"
   "-13/48:2,1,2;"
   "-43/144:1,2,2|3,2,2;"
   "7/12:2,0,5;"
   "715/1296:1,1,5|3,1,5;"
   "7/24:2,2,5;"
   "-181/176:2,1,6"},
  {{2, 2, -1}, 10, 5.561,
   "1492/663:2,2,0;"
   "-5/12:1,2,3|2,1,3|3,2,3|2,3,3;"
   "-19/96:2,2,3;"
   "5/24:1,2,7|2,1,7|3,2,7|2,3,7;"
   "245/1248:2,2,7;"
   "-113/272:2,2,9"},
  // k = 0
  {{0, 0, 0}, 6, 7.740,
   "174511/59400:0,0,0;"
   "-1243/1350:2,0,0|0,2,0|0,0,2;"
   "-43/990:6,0,0|0,6,0|0,0,6;"
   "2987/28800:2,3,0|3,2,0|3,0,2|0,3,2|2,0,3|0,2,3;"
   "-11/75:3,3,0|3,0,3|0,3,3;"
   "259/1920:4,1,0|1,4,0|4,0,1|0,4,1|1,0,4|0,1,4;"
   "-1/27:2,2,2"},
  {{1, 0, 0}, 4, 7.649,
   "92/405:0,0,0;"
   "1301/432:1,0,0;"
   "13/108:2,0,0;"
   "5/1296:5,0,0;"
   "-155/216:0,1,0|0,0,1;"
   "-1/36:0,2,0|0,0,2;"
   "-25/54:1,2,0|1,0,2;"
   "-41/108:2,1,0|2,0,1;"
   "23/360:0,3,0|0,0,3;"
   "1/36:2,3,0|2,0,3;"
   "7/27:0,2,1|0,1,2;"
   "7/54:2,2,1|2,1,2;"
   "-4/27:1,2,2"},
  {{2, 0, 0}, 4, 7.649,
   "106/495:0,0,0;"
   "1115/432:2,0,0;"
   "101/180:3,0,0;"
   "53/7920:6,0,0;"
   "-61/144:1,1,0|1,0,1;"
   "-97/144:3,1,0|3,0,1;"
   "-1/6:1,2,0|1,0,2;"
   "-35/108:2,2,0|2,0,2;"
   "17/240:1,3,0|1,0,3;"
   "1/48:3,3,0|3,0,3;"
   "7/36:1,2,1|3,2,1|1,1,2|3,1,2;"
   "-4/27:2,2,2"},
  {{3, 0, 0}, 3, 9.945,
   "697/180:3,0,0;"
   "1/24:2,0,0|4,0,0;"
   "-11/24:2,1,0|2,0,1|4,1,0|4,0,1;"
   "-77/72:3,1,0|3,0,1;"
   "-7/36:3,2,0|3,0,2;"
   "11/120:3,3,0|3,0,3;"
   "2/3:2,1,1|4,1,1;"
   "-1/18:3,2,1|3,1,2"},
  {{1, 1, 0}, 3, 5.508,
   "-16/33:0,0,0;"
   "-14/99:3,0,0|0,3,0;"
   "38/15:1,1,0;"
   "1/11:2,1,0|1,2,0;"
   "-4/99:3,2,0|2,3,0|2,0,1|0,2,1;"
   "-23/88:1,1,1;"
   "-17/44:2,1,1|1,2,1;"
   "59/264:3,1,1|1,3,1;"
   "-4/99:2,2,1;"
   "-1/4:1,1,2;"
   "11/120:1,1,3"},
  {{2, 1, 0}, 3, 5.108,
   "-188/945:0,0,0;"
   "-8/63:4,0,0;"
   "37/405:0,1,0;"
   "1043/540:2,1,0;"
   "11/360:3,1,0;"
   "5/648:5,1,0;"
   "43/108:2,2,0;"
   "1/36:4,2,0;"
   "-5/36:1,3,0;"
   "-7/45:3,3,0;"
   "-46/135:2,0,1;"
   "5/63:0,1,1;"
   "5/84:4,1,1;"
   "-91/108:2,2,1;"
   "121/360:2,3,1;"
   "-1/4:2,1,2;"
   "11/120:2,1,3"},
  {{3, 1, 0}, 3, 5.048,
   "-29/216:1,0,0|5,0,0;"
   "-41/1080:2,0,0|4,0,0;"
   "29/384:1,1,0|5,1,0;"
   "1867/960:3,1,0;"
   "29/72:3,2,0;"
   "-23/160:2,3,0|4,3,0;"
   "-29/90:3,0,1;"
   "5/96:1,1,1|5,1,1;"
   "-59/72:3,2,1;"
   "79/240:3,3,1;"
   "-1/4:3,1,2;"
   "11/120:3,1,3"},
  {{2, 2, 0}, 3, 4.129,
   "358/165:2,2,0;"
   "-10/231:1,0,0|3,0,0|0,1,0|0,3,0;"
   "-5/154:4,1,0|4,3,0|1,4,0|3,4,0;"
   "-167/264:2,2,1;"
   "-5/66:3,2,1|2,3,1;"
   "5/132:4,2,1|2,4,1;"
   "-21/44:2,2,2;"
   "5/88:1,2,2|2,1,2|3,2,2|2,3,2;"
   "11/120:2,2,3"},
  {{3, 2, 0}, 3, 4.028,
   "-460/12033:2,0,0;"
   "-860/12033:4,0,0;"
   "-25/1146:1,1,0|5,3,0;"
   "-135/2674:2,4,0;"
   "6098/2865:3,2,0;"
   "-175/18909:6,2,0;"
   "-320/18909:0,2,0;"
   "-85/2674:4,4,0;"
   "-1009/1528:3,2,1;"
   "-55/573:3,3,1;"
   "55/1146:3,4,1;"
   "-3409/6876:3,2,2;"
   "245/4584:3,1,2|3,3,2;"
   "5/72:2,2,2|4,2,2;"
   "11/120:3,2,3"},
  {{4, 2, 0}, 3, 3.994,
   "-5/84:3,0,0|5,0,0;"
   "193/90:4,2,0;"
   "-5/144:1,2,0|7,2,0;"
   "-5/112:3,4,0|5,4,0;"
   "-73/96:4,2,1;"
   "5/96:2,2,1|4,4,1|6,2,1|4,1,2|4,3,2;"
   "-5/48:4,3,1;"
   "-17/48:4,2,2;"
   "11/120:4,2,3"},
  {{3, 3, 0}, 5, 2.617,
   "85/54:3,3,0;"
   "-55/1536:1,1,1|5,1,1|1,5,1|5,5,1;"
   "-85/144:3,3,2;"
   "5/768:3,1,3|1,3,3|5,3,3|3,5,3;"
   "5/96:3,2,4|2,3,4|4,3,4|3,4,4;"
   "-259/3456:3,3,5"},
  // k = 1
  {{1, 1, 1}, 6, 1.730,
   "41/96:1,1,1;"
   "5/18:2,1,1|1,2,1|1,1,2;"
   "-35/288:5,1,1|1,5,1|1,1,5;"
   "5/144:7,1,1|1,7,1|1,1,7"},
  {{2, 1, 1}, 2, 3.75,
   "-4/9:2,0,0;"
   "-2/9:2,2,0|2,0,2;"
   "-2/21:0,1,1;"
   "55/24:2,1,1;"
   "-5/168:4,1,1;"
   "-1/12:3,1,1|2,2,1|2,1,2;"
   "1/24:2,3,1|2,1,3;"
   "-1/9:2,2,2"},
  {{3, 1, 1}, 2, 3.542,
   "-4/9:3,0,0;"
   "-2/9:3,2,0|3,0,2;"
   "-5/96:1,1,1|5,1,1;"
   "35/16:3,1,1;"
   "-1/12:3,2,1|3,1,2;"
   "1/24:3,3,1|3,1,3;"
   "-1/9:3,2,2"},
  {{2, 2, 1}, 3, 2.370,
   "-1/7:2,2,0;"
   "-1/12:1,1,0|3,1,0|1,3,0|3,3,0;"
   "13/8:2,2,1;"
   "-1/24:2,1,3|1,2,3|2,2,3|3,2,3|2,3,3;"
   "5/84:2,2,4"},
  // k = 2, 3
  {{2, 2, 2}, 1, 3.5,
   "9/4:2,2,2;"
   "-5/24:2,1,2|2,3,2|1,2,2|3,2,2|2,2,1|2,2,3"},
  {{3, 3, 3}, 2, 1.625,
   "21/16:3,3,3;"
   "-5/96:3,1,3|3,5,3|1,3,3|5,3,3|3,3,1|3,3,5"},
};
// clang-format on

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

MultiIndex parse_index(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw std::logic_error("stencil table: bad index " + s);
  return {std::stoi(parts[0]), std::stoi(parts[1]), std::stoi(parts[2])};
}

Stencil parse_row(const Row& row) {
  Stencil s;
  s.key = row.key;
  s.n = row.n;
  s.published_l1 = row.l1;
  for (const auto& term : split(row.terms, ';')) {
    const auto colon = term.find(':');
    if (colon == std::string::npos) throw std::logic_error("stencil table: bad term " + term);
    const Rational w(term.substr(0, colon));
    for (const auto& idx : split(term.substr(colon + 1), '|'))
      s.entries.push_back({parse_index(idx), w, w.convert_to<double>()});
  }
  std::sort(s.entries.begin(), s.entries.end(), [](const StencilEntry& a, const StencilEntry& b) {
    return MultiIndexLess{}(a.beta, b.beta);
  });
  for (std::size_t i = 1; i < s.entries.size(); ++i)
    if (s.entries[i].beta == s.entries[i - 1].beta)
      throw std::logic_error("stencil table: duplicate data index in " + s.key.to_string());
  return s;
}

// Data coordinate near the origin corner, h = 1: s_0 = 0, s_i = i - 1/2.
Rational canonical_coordinate(int i) { return i == 0 ? Rational(0) : Rational(2 * i - 1, 2); }

}  // namespace

Rational Stencil::l1() const {
  Rational acc(0);
  for (const auto& e : entries) acc += abs(e.weight);
  return acc;
}

std::vector<Rational> exactness_residual(const Stencil& s) {
  const Eigen::Matrix<Rational, 3, 1> c(Rational(2 * s.key.p - 1, 2), Rational(2 * s.key.q - 1, 2),
                                        Rational(2 * s.key.r - 1, 2));
  std::vector<Rational> out;
  for (const auto& e : poly::cubic_monomials()) {
    Rational lhs(0);
    for (const auto& entry : s.entries) {
      const Eigen::Matrix<Rational, 3, 1> x(canonical_coordinate(entry.beta.x()),
                                            canonical_coordinate(entry.beta.y()),
                                            canonical_coordinate(entry.beta.z()));
      lhs += entry.weight * poly::monomial<Rational>(e, x);
    }
    out.push_back(lhs - poly::differential_target<Rational>(e, c, Rational(1)));
  }
  return out;
}

bool is_exact(const Stencil& s) {
  for (const auto& r : exactness_residual(s))
    if (r != 0) return false;
  return true;
}

const Stencil& StencilLibrary::at(const ClassKey& key) const {
  auto it = stencils_.find(key);
  if (it == stencils_.end()) throw std::out_of_range("no stencil for class " + key.to_string());
  return it->second;
}

StencilLibrary transcribed_library() {
  StencilLibrary lib;
  for (const auto& row : kRows) lib.insert(parse_row(row));
  return lib;
}

const StencilLibrary& library() {
  static const StencilLibrary lib = [] {
    StencilLibrary out;
    for (const auto& row : kRows) {
      Stencil s = parse_row(row);
      if (!is_exact(s)) {
        std::vector<MultiIndex> support;
        for (const auto& e : s.entries) support.push_back(e.beta);
        const L1Solution sol = minimize_l1_on_support(s.key, support);
        if (sol.status != LpStatus::Optimal)
          throw std::logic_error("stencil " + s.key.to_string() +
                                 " is not exact and its support admits no exact functional");
        Stencil fixed = s;
        fixed.entries.clear();
        for (const auto& [beta, w] : sol.weights)
          if (w != 0) fixed.entries.push_back({beta, w, w.convert_to<double>()});
        fixed.rederived = true;
        out.note_substitution("class " + s.key.to_string() + ": printed weights are not exact on P3; " +
                              "re-derived on the same support, l1 = " +
                              std::to_string(fixed.l1_value()));
        s = std::move(fixed);
      }
      out.insert(std::move(s));
    }
    return out;
  }();
  return lib;
}

namespace {

template <class Emit>
void for_each_instantiated(const MultiIndex& alpha, const DomainGrid& grid, const StencilLibrary& lib,
                           Emit&& emit) {
  const Classification c = classify(alpha, grid);
  const Stencil& s = lib.at(c.key);
  for (const auto& e : s.entries) {
    const MultiIndex canonical = e.beta + c.shift;
    const MultiIndex beta = c.transform.apply_index(canonical, grid.m);
    if (!in_data_set(beta, grid))
      throw std::logic_error("instantiate: data index outside the data set for alpha (" +
                             std::to_string(alpha.x()) + "," + std::to_string(alpha.y()) + "," +
                             std::to_string(alpha.z()) + ")");
    emit(beta, e);
  }
}

}  // namespace

Functional instantiate(const MultiIndex& alpha, const DomainGrid& grid, const StencilLibrary& lib) {
  Functional out;
  for_each_instantiated(alpha, grid, lib, [&](const MultiIndex& beta, const StencilEntry& e) {
    out.push_back({beta, e.weight_value});
  });
  return out;
}

std::vector<std::pair<MultiIndex, Rational>> instantiate_exact(const MultiIndex& alpha,
                                                               const DomainGrid& grid,
                                                               const StencilLibrary& lib) {
  std::vector<std::pair<MultiIndex, Rational>> out;
  for_each_instantiated(alpha, grid, lib, [&](const MultiIndex& beta, const StencilEntry& e) {
    out.emplace_back(beta, e.weight);
  });
  return out;
}

double apply(const Functional& functional, const SampleField& samples) {
  double acc = 0.0;
  for (const auto& e : functional) {
    if (!in_data_set(e.beta, samples.grid)) throw std::out_of_range("apply: missing sample");
    acc += e.weight * samples.at(e.beta);
  }
  return acc;
}

double norm_bound(const StencilLibrary& lib) {
  double best = 0.0;
  for (const auto& [key, s] : lib.all()) best = std::max(best, s.l1_value());
  return best;
}

}  // namespace boxqi
