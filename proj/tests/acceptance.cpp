// Acceptance harness: one PASS/FAIL line per criterion.
//
//   boxqi_acceptance                 all criteria
//   boxqi_acceptance --criterion 7   a single criterion
//   boxqi_acceptance --criterion 7 --fn f2 [--m 16,32,64]
//
// Exit status is nonzero when any selected criterion fails.

#include "boxqi/bernstein.hpp"
#include "boxqi/boxspline.hpp"
#include "boxqi/convergence.hpp"
#include "boxqi/isosurface.hpp"
#include "boxqi/nearbest.hpp"
#include "boxqi/partition.hpp"
#include "boxqi/qi.hpp"
#include "boxqi/stencils.hpp"
#include "boxqi/volume.hpp"

#include "norm_table_data.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace boxqi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    details.push_back(std::string(ok ? "ok   " : "MISS ") + what);
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Rational parse_decimal(std::string_view s) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return Rational(std::string(s));
  std::string digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
  Rational v{boost::multiprecision::mpz_int(digits)};
  for (std::size_t i = dot + 1; i < s.size(); ++i) v /= 10;
  return v;
}

const testdata::NormRow* norm_row(const ClassKey& k) {
  for (const auto& row : testdata::kNormTable)
    if (row.p == k.p && row.q == k.q && row.r == k.r) return &row;
  return nullptr;
}

// Printed cell equals the exact norm rounded up at four significant figures.
bool matches_printed(const Rational& norm, std::string_view printed) {
  return parse_decimal(ceil_significant(norm, 4)) == parse_decimal(printed);
}

// ---- patch helpers for one-sided derivatives ----------------------------------

Eigen::Vector4d local_bary(int tet, const Point3& u) {
  return reference_barycentric_maps()[static_cast<std::size_t>(tet)] * Eigen::Vector4d(1.0, u.x(), u.y(), u.z());
}

// D^dirs of a patch living on (cube, tet) at grid point g (grid units).
double patch_derivative(std::span<const double> coeffs, const MultiIndex& cube, int tet, const Point3& g,
                        const std::vector<Point3>& dirs) {
  const Eigen::Vector4d b = local_bary(tet, g - cube.cast<double>());
  std::vector<Eigen::Vector4d> bd;
  for (const auto& d : dirs) bd.push_back(barycentric_direction(tet, d));
  return bb::derivative<double>(coeffs, 4, b, bd);
}

const std::vector<std::vector<Point3>>& derivative_sets(int order) {
  static const std::vector<std::vector<Point3>> d0{{}};
  static const std::vector<std::vector<Point3>> d1{{Point3::UnitX()}, {Point3::UnitY()}, {Point3::UnitZ()}};
  static const std::vector<std::vector<Point3>> d2{
      {Point3::UnitX(), Point3::UnitX()}, {Point3::UnitY(), Point3::UnitY()}, {Point3::UnitZ(), Point3::UnitZ()},
      {Point3::UnitX(), Point3::UnitY()}, {Point3::UnitX(), Point3::UnitZ()}, {Point3::UnitY(), Point3::UnitZ()}};
  return order == 0 ? d0 : order == 1 ? d1 : d2;
}

struct FaceSample {
  MultiIndex cube_a, cube_b;
  int tet_a = 0, tet_b = 0;
  Point3 g;  // point on the shared face, grid units
};

// Random interior face of the partition: a face of (cube, tet) and the
// tetrahedron across it.
FaceSample random_face(std::mt19937_64& rng, const MultiIndex& lo, const MultiIndex& hi) {
  std::uniform_int_distribution<int> tet_d(0, kTetsPerCube - 1), face_d(0, 3);
  std::uniform_real_distribution<double> u01(0.05, 1.0);
  for (;;) {
    MultiIndex cube;
    for (int a = 0; a < 3; ++a) cube[a] = std::uniform_int_distribution<int>(lo[a], hi[a] - 1)(rng);
    const int tet = tet_d(rng), drop = face_d(rng);
    const Tetrahedron& t = reference_tetrahedra()[static_cast<std::size_t>(tet)];
    Eigen::Vector4d w;
    for (int i = 0; i < 4; ++i) w[i] = i == drop ? 0.0 : u01(rng);
    w /= w.sum();
    Point3 u = Point3::Zero();
    for (int i = 0; i < 4; ++i) u += w[i] * t[static_cast<std::size_t>(i)];
    const Point3 g = cube.cast<double>() + u;
    const Point3 across = g + 1e-7 * (u - t[static_cast<std::size_t>(drop)]).normalized();
    MultiIndex cube_b = across.array().floor().cast<int>();
    if ((cube_b.array() < lo.array()).any() || (cube_b.array() >= hi.array()).any()) continue;
    const int tet_b = locate_in_unit_cube(across - cube_b.cast<double>()).tet;
    if (cube_b == cube && tet_b == tet) continue;
    return {cube, cube_b, tet, tet_b, g};
  }
}

// ---- criteria ------------------------------------------------------------------

Outcome partition_of_unity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Point3 x(u(rng), u(rng), u(rng));
    const MultiIndex f = x.array().floor().cast<int>();
    double sum = 0.0;
    for (int c = f.z() - 5; c <= f.z() + 1; ++c)
      for (int b = f.y() - 3; b <= f.y() + 3; ++b)
        for (int a = f.x() - 3; a <= f.x() + 3; ++a) sum += boxspline::eval(x - Point3(a, b, c));
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.check(worst <= 1e-10, "max |sum B - 1| = " + fmt("%.3g", worst) + " (<= 1e-10)");
  o.check(dt < 10.0, "runtime " + fmt("%.2f", dt) + " s (< 10 s)");
  o.summary = "partition of unity, 1e4 points: max dev " + fmt("%.3g", worst) + ", " + fmt("%.2f", dt) + " s";
  return o;
}

Outcome smoothness() {
  std::mt19937_64 rng(7);
  Outcome o;
  const double tol[3] = {1e-9, 1e-8, 1e-8};

  auto run = [&](const std::string& name, auto&& patch_of, const MultiIndex& lo, const MultiIndex& hi) {
    double scale[3] = {0, 0, 0}, dev[3] = {0, 0, 0};
    for (int k = 0; k < 100; ++k) {
      const FaceSample f = random_face(rng, lo, hi);
      const auto pa = patch_of(f.cube_a, f.tet_a);
      const auto pb = patch_of(f.cube_b, f.tet_b);
      for (int order = 0; order <= 2; ++order)
        for (const auto& dirs : derivative_sets(order)) {
          const double va = patch_derivative(pa, f.cube_a, f.tet_a, f.g, dirs);
          const double vb = patch_derivative(pb, f.cube_b, f.tet_b, f.g, dirs);
          scale[order] = std::max({scale[order], std::abs(va), std::abs(vb)});
          dev[order] = std::max(dev[order], std::abs(va - vb));
        }
    }
    for (int order = 0; order <= 2; ++order) {
      const double rel = scale[order] > 0 ? dev[order] / scale[order] : dev[order];
      o.check(rel <= tol[order], name + " C" + std::to_string(order) + " relative jump " + fmt("%.3g", rel) +
                                     " (<= " + fmt("%.0e", tol[order]) + ")");
    }
  };

  const auto& table = boxspline::table();
  auto b_patch = [&](const MultiIndex& cube, int tet) {
    const int slot = boxspline::BBTable::slot(cube);
    std::vector<double> p(bb::kQuarticSize, 0.0);
    if (slot >= 0) {
      const auto src = table.patch(slot, tet);
      std::copy(src.begin(), src.end(), p.begin());
    }
    return p;
  };
  run("B", b_patch, MultiIndex(-2, -2, 0), MultiIndex(3, 3, 5));

  const SampledFunction sf = sample_test_function("f2", 16);
  const QISpline s = approximate(sf.samples);
  auto q_patch = [&](const MultiIndex& cube, int tet) {
    const auto p = assemble_patch(s, {cube, tet});
    return std::vector<double>(p.begin(), p.end());
  };
  run("Qf2", q_patch, MultiIndex::Zero(), s.grid().m);

  o.summary = "C0/C1/C2 across 100 random interior faces of B and of Qf2";
  return o;
}

Outcome cubic_reproduction() {
  const DomainGrid grid(12, 12, 12, 1.0 / 12.0);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto& monos = poly::cubic_monomials();
  std::vector<Point3> pts;
  for (int k = 0; k <= 20; ++k)
    for (int j = 0; j <= 20; ++j)
      for (int i = 0; i <= 20; ++i) pts.emplace_back(i / 20.0, j / 20.0, k / 20.0);

  Outcome o;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::array<double, 20> c{};
    for (auto& v : c) v = coef(rng);
    auto p = [&](const Point3& x) {
      double v = 0.0;
      for (std::size_t m = 0; m < monos.size(); ++m) v += c[m] * poly::monomial<double>(monos[m], x);
      return v;
    };
    const QISpline s = approximate(sample(grid, p));
    const auto q = eval_many(s, pts);
    double err = 0.0, pmax = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      err = std::max(err, std::abs(q[i] - p(pts[i])));
      pmax = std::max(pmax, std::abs(p(pts[i])));
    }
    worst_rel = std::max(worst_rel, err / pmax);
  }
  o.check(worst_rel <= 1e-9, "5 random cubics: max |Qp - p| / max|p| = " + fmt("%.3g", worst_rel) + " (<= 1e-9)");

  auto quartic = [](const Point3& x) { return x.x() * x.x() * x.x() * x.x(); };
  const QISpline s4 = approximate(sample(grid, quartic));
  const auto q4 = eval_many(s4, pts);
  double dev4 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) dev4 = std::max(dev4, std::abs(q4[i] - quartic(pts[i])));
  o.check(dev4 > 1e-4, "x^4 deviation " + fmt("%.3g", dev4) + " (> 1e-4)");
  o.summary = "P3 reproduction rel err " + fmt("%.3g", worst_rel) + ", x^4 deviation " + fmt("%.3g", dev4);
  return o;
}

Outcome stencil_validation() {
  Outcome o;
  const StencilLibrary& lib = library();
  int exact = 0, printed = 0;
  for (const auto& [key, st] : lib.all()) {
    const bool ok = is_exact(st) && !st.rederived;
    exact += ok;
    if (!ok) o.check(false, key.to_string() + " fails the exactness system");
    const auto* row = norm_row(key);
    const bool match = row && matches_printed(st.l1(), row->cells[static_cast<std::size_t>(st.n - 1)]);
    printed += match;
    if (!match)
      o.check(false, key.to_string() + " n=" + std::to_string(st.n) + " l1 " + ceil_significant(st.l1(), 4) +
                         " vs table " + (row ? std::string(row->cells[static_cast<std::size_t>(st.n - 1)]) : "?"));
  }
  const int classes = static_cast<int>(lib.size());
  o.check(exact == classes, std::to_string(exact) + "/" + std::to_string(classes) + " classes exact in rationals");
  o.check(printed == classes, std::to_string(printed) + "/" + std::to_string(classes) +
                                  " embedded l1 norms match the printed table at their n");
  const double bound = norm_bound(lib);
  o.check(std::abs(bound - 9.945) <= 1e-3, "norm bound " + fmt("%.6f", bound) + " (9.945 +- 0.001)");
  o.summary = std::to_string(exact) + "/" + std::to_string(classes) + " classes exact, norm bound " +
              fmt("%.5f", bound);
  return o;
}

Outcome near_best_reproduction() {
  const auto t0 = Clock::now();
  Outcome o;
  struct Cell {
    ClassKey key;
    int n;
  };
  const std::vector<Cell> cells{{{0, 0, -1}, 4}, {{0, 0, -1}, 5}, {{0, 0, -1}, 6}, {{0, 0, -1}, 7},
                                {{0, 0, -1}, 8}, {{1, 1, 1}, 2},  {{2, 2, 2}, 1},  {{3, 3, 3}, 2},
                                {{3, 0, 0}, 3}};
  int hit = 0;
  for (const auto& c : cells) {
    const L1Solution sol = derive(c.key, c.n);
    const std::string_view want = norm_row(c.key)->cells[static_cast<std::size_t>(c.n - 1)];
    const bool ok = sol.status == LpStatus::Optimal && matches_printed(sol.norm, want);
    hit += ok;
    o.check(ok, c.key.to_string() + " n=" + std::to_string(c.n) + ": " +
                    (sol.status == LpStatus::Optimal ? ceil_significant(sol.norm, 4) + " (" + sol.norm.str() + ")"
                                                     : std::string("infeasible")) +
                    " vs " + std::string(want));
  }
  int infeasible = 0;
  for (int n = 1; n <= 3; ++n) infeasible += derive({0, 0, -1}, n).status == LpStatus::Infeasible;
  o.check(infeasible == 3, "(0,0,-1) infeasible for n<=3: " + std::to_string(infeasible) + "/3");
  const double dt = seconds_since(t0);
  o.check(dt < 300.0, "runtime " + fmt("%.1f", dt) + " s (< 300 s)");
  o.summary = std::to_string(hit) + "/" + std::to_string(cells.size()) + " printed cells reproduced, (0,0,-1) n<=3 infeasible, " +
              fmt("%.1f", dt) + " s";
  return o;
}

// Full table, every printed cell; a slow extra beyond the criterion's list.
Outcome full_norm_table() {
  const auto t0 = Clock::now();
  Outcome o;
  int checked = 0, hit = 0;
  for (const auto& row : testdata::kNormTable) {
    const ClassKey key{row.p, row.q, row.r};
    for (int n = 1; n <= 11; ++n) {
      const std::string_view want = row.cells[static_cast<std::size_t>(n - 1)];
      if (want.empty()) continue;
      const L1Solution sol = derive(key, n);
      const bool ok = want == "--" ? sol.status == LpStatus::Infeasible
                                   : sol.status == LpStatus::Optimal && matches_printed(sol.norm, want);
      ++checked;
      hit += ok;
      if (!ok)
        o.check(false, key.to_string() + " n=" + std::to_string(n) + ": got " +
                           (sol.status == LpStatus::Optimal ? ceil_significant(sol.norm, 4) : std::string("--")) +
                           " want " + std::string(want));
    }
  }
  o.check(hit == checked, std::to_string(hit) + "/" + std::to_string(checked) + " cells");
  o.summary = "full norm table " + std::to_string(hit) + "/" + std::to_string(checked) + " cells, " +
              fmt("%.1f", seconds_since(t0)) + " s";
  return o;
}

Outcome published_weights() {
  // Weights printed for class (0,0,-1), n = 4; pairs (a,b,c)/(b,a,c) share a weight.
  const std::vector<std::pair<MultiIndex, Rational>> printed{
      {{0, 0, 0}, Rational(26956, 945)}, {{1, 0, 0}, Rational(-331, 36)}, {{2, 0, 0}, Rational(-181, 216)},
      {{3, 0, 0}, Rational(0)},          {{4, 0, 0}, Rational(11, 504)},  {{1, 1, 0}, Rational(0)},
      {{2, 1, 0}, Rational(25, 18)},     {{3, 1, 0}, Rational(0)},        {{2, 2, 0}, Rational(-13, 27)},
      {{0, 0, 1}, Rational(-827, 24)},   {{1, 0, 1}, Rational(35, 3)},    {{2, 0, 1}, Rational(-1, 6)},
      {{1, 1, 1}, Rational(-3)},         {{0, 0, 2}, Rational(337, 36)},  {{1, 0, 2}, Rational(-31, 18)},
      {{0, 0, 3}, Rational(-151, 120)}};
  const ClassKey key{0, 0, -1};
  const DomainGrid grid = canonical_grid(key, 4);
  const ConstraintSystem sys = constraint_system(octahedron(key.as_index(), 4, grid), false);

  Outcome o;
  std::map<MultiIndex, Rational, MultiIndexLess> sigma;
  for (const auto& [beta, w] : printed) {
    sigma[beta] = w;
    sigma[MultiIndex(beta.y(), beta.x(), beta.z())] = w;
  }
  bool on_support = true;
  for (const auto& [beta, w] : sigma) {
    bool found = false;
    for (const auto& col : sys.columns) found = found || col.front() == beta;
    on_support = on_support && found;
  }
  o.check(on_support, "printed support lies in the projected octahedron");

  RationalVector x = RationalVector::Zero(static_cast<Eigen::Index>(sys.columns.size()));
  for (std::size_t j = 0; j < sys.columns.size(); ++j) {
    const auto it = sigma.find(sys.columns[j].front());
    if (it != sigma.end()) x[static_cast<Eigen::Index>(j)] = it->second;
  }
  const RationalVector r = sys.V * x - sys.b;
  bool exact = true;
  for (Eigen::Index i = 0; i < r.size(); ++i) exact = exact && r[i] == 0;
  o.check(exact, "V sigma = b holds exactly (" + std::to_string(sys.V.rows()) + " monomials)");

  Rational l1(0);
  for (const auto& [beta, w] : sigma) l1 += abs(w);
  const double l1d = l1.convert_to<double>();
  o.check(ceil_significant(l1, 4) == "127.1", "||sigma||_1 = " + l1.str() + " = " + fmt("%.6f", l1d) + " (~127.1)");
  const L1Solution best = derive(key, 4);
  o.check(l1 >= best.norm, "not below the LP optimum " + fmt("%.6f", best.norm_value()));
  o.summary = "printed (0,0,-1) n=4 weights: exact " + std::string(exact ? "yes" : "no") + ", l1 " + fmt("%.4f", l1d);
  return o;
}

struct PrintedError {
  std::string fn;
  int m;
  double error;
  double rf;  // NaN where none printed
};

const std::vector<PrintedError>& printed_errors() {
  const double none = std::nan("");
  static const std::vector<PrintedError> rows{
      {"f1", 16, 2.0e-1, none}, {"f1", 32, 1.3e-1, 0.6}, {"f1", 64, 6.5e-2, 1.0},  {"f1", 128, 2.1e-2, 1.7},
      {"f2", 16, 1.7e-2, none}, {"f2", 32, 8.0e-4, 4.4}, {"f2", 64, 5.2e-5, 3.9},  {"f2", 128, 3.3e-6, 4.0},
      {"f3", 16, 6.2e-3, none}, {"f3", 32, 8.2e-4, 2.9}, {"f3", 64, 8.9e-5, 3.2},  {"f3", 128, 7.9e-6, 3.5}};
  return rows;
}

Outcome convergence_table(const std::vector<std::string>& fns, const std::vector<int>& ms) {
  const auto t0 = Clock::now();
  Outcome o;
  int cells = 0, hit = 0;
  for (const auto& fn : fns) {
    const auto rows = convergence(fn, ms, kDefaultEvalGrid);
    for (const auto& r : rows) {
      const PrintedError* want = nullptr;
      for (const auto& p : printed_errors())
        if (p.fn == fn && p.m == r.m) want = &p;
      if (!want) continue;
      const double rel = r.error / want->error - 1.0;
      const bool ok = std::abs(rel) <= 0.10;
      ++cells;
      hit += ok;
      o.check(ok, fn + " m=" + std::to_string(r.m) + ": " + fmt("%.4g", r.error) + " vs " + fmt("%.1e", want->error) +
                      " (" + fmt("%+.1f", 100 * rel) + "%, tol 10%)");
      // Orders are checked where the table prints one and a coarser run exists.
      if (r.has_rf && !std::isnan(want->rf) && r.m != ms.front()) {
        const bool rf_ok = std::abs(r.rf - want->rf) <= 0.3;
        ++cells;
        hit += rf_ok;
        o.check(rf_ok, fn + " m=" + std::to_string(r.m) + " rf " + fmt("%.2f", r.rf) + " vs " + fmt("%.1f", want->rf) +
                           " (tol 0.3)");
      }
    }
  }
  if (std::find(fns.begin(), fns.end(), "f2") != fns.end()) {
    // Same function with 9/10 in place of 3/4 on the second term; not part of
    // the verdict.
    auto variant = [](const Point3& p) {
      const double x = p.x(), y = p.y(), z = p.z();
      auto sq = [](double v) { return v * v; };
      return 0.5 * std::exp(-10.0 * (sq(x - 0.25) + sq(y - 0.25))) +
             0.9 * std::exp(-16.0 * (sq(x - 0.5) + sq(y - 0.25) + sq(z - 0.25))) +
             0.5 * std::exp(-10.0 * (sq(x - 0.75) + sq(y - 0.125) + sq(z - 0.5))) -
             0.25 * std::exp(-20.0 * (sq(x - 0.75) + sq(y - 0.75)));
    };
    std::string seq;
    for (int m : ms) {
      const DomainGrid grid(m, m, m, 1.0 / m);
      const QISpline s = approximate(sample(grid, variant));
      seq += (seq.empty() ? "" : ", ") + fmt("%.3g", max_error(s, variant, kDefaultEvalGrid).max_error);
    }
    o.details.push_back("info f2 with 9/10 on the second term: " + seq);
  }
  std::string names;
  for (const auto& f : fns) names += (names.empty() ? "" : ",") + f;
  o.summary = "max errors on the 139^3 grid for " + names + ": " + std::to_string(hit) + "/" + std::to_string(cells) +
              " cells within tolerance, " + fmt("%.1f", seconds_since(t0)) + " s";
  return o;
}

Point3 f2_gradient(const Point3& p) {
  struct Bump {
    double a, c;
    Point3 x0;
    bool use_z;
  };
  const Bump bumps[] = {{0.5, 10.0, {0.25, 0.25, 0.0}, false},
                        {0.75, 16.0, {0.5, 0.25, 0.25}, true},
                        {0.5, 10.0, {0.75, 0.125, 0.5}, true},
                        {-0.25, 20.0, {0.75, 0.75, 0.0}, false}};
  Point3 g = Point3::Zero();
  for (const auto& b : bumps) {
    Point3 d = p - b.x0;
    if (!b.use_z) d.z() = 0.0;
    g += b.a * std::exp(-b.c * d.squaredNorm()) * (-2.0 * b.c) * d;
  }
  return g;
}

Outcome derivative_order() {
  Outcome o;
  // Whole-grid error decides the criterion; the interior split (points at
  // least 1/4 from every face) and the finer levels are informational.
  const std::vector<int> ms{16, 32, 64, 128};
  std::vector<double> err, inner;
  for (int m : ms) {
    const SampledFunction sf = sample_test_function("f2", m);
    const QISpline s = approximate(sf.samples);
    const auto pts = evaluation_grid(s.grid().extent(), kDefaultEvalGrid);
    double e = 0.0, ei = 0.0;
    for (int a = 0; a < 3; ++a) {
      MultiIndex order = MultiIndex::Zero();
      order[a] = 1;
      const auto v = eval_many_derivative(s, pts, order);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = std::abs(v[i] - f2_gradient(sf.origin + pts[i])[a]);
        e = std::max(e, d);
        if ((pts[i].array() >= 0.25).all() && (pts[i].array() <= 0.75).all()) ei = std::max(ei, d);
      }
    }
    err.push_back(e);
    inner.push_back(ei);
  }
  const double order = std::log2(err[0] / err[1]);
  o.check(std::abs(order - 3.0) <= 0.5, "gradient errors " + fmt("%.4g", err[0]) + " (m=16), " + fmt("%.4g", err[1]) +
                                            " (m=32): order " + fmt("%.2f", order) + " (3 +- 0.5)");
  std::string whole, mid;
  for (std::size_t i = 1; i < ms.size(); ++i) {
    whole += (i > 1 ? ", " : "") + fmt("%.2f", std::log2(err[i - 1] / err[i]));
    mid += (i > 1 ? ", " : "") + fmt("%.2f", std::log2(inner[i - 1] / inner[i]));
  }
  o.details.push_back("info orders 16>32>64>128 whole grid: " + whole + "; on [1/4,3/4]^3: " + mid);
  o.summary = "f2 gradient order " + fmt("%.2f", order) + " between m=16 and m=32";
  return o;
}

Outcome isosurface_checks() {
  Outcome o;
  // Linear data: the level set of Qz is the plane z = 1/2.
  const DomainGrid unit(11, 11, 11, 1.0 / 11.0);
  const QISpline plane = approximate(sample(unit, [](const Point3& x) { return x.z(); }));
  IsoRequest req;
  req.iso = 0.5;
  req.resolution = 64;
  const IsoResult pr = extract(plane, req);
  double dz = 0.0;
  for (const auto& v : pr.mesh.vertices) dz = std::max(dz, std::abs(v.z() - 0.5));
  o.check(!pr.mesh.empty() && dz <= 1e-6, "plane: " + std::to_string(pr.mesh.triangles.size()) +
                                              " triangles, max |z - 0.5| = " + fmt("%.3g", dz) + " (<= 1e-6)");

  const SampledFunction sf = sample_test_function("f2", 16);
  const QISpline s = approximate(sf.samples);
  double prev = 0.0;
  std::string seq;
  bool halves = true;
  TriangleMesh last;
  for (int res : {16, 32, 64, 128}) {
    IsoRequest r;
    r.iso = 0.5;
    r.resolution = res;
    const IsoResult out = extract(s, r);
    if (prev > 0.0) halves = halves && out.max_residual <= 0.5 * prev;
    seq += (seq.empty() ? "" : ", ") + fmt("%.3g", out.max_residual);
    prev = out.max_residual;
    last = out.mesh;
  }
  o.check(halves, "Qf2 residual at R=16,32,64,128: " + seq + " (each <= half the previous)");
  const MeshStats st = mesh_stats(last);
  o.check(st.max_edge_use <= 2 && st.inconsistent_edges == 0,
          "edges used <= " + std::to_string(st.max_edge_use) + " times, " + std::to_string(st.inconsistent_edges) +
              " winding conflicts");

  std::stringstream obj;
  write_obj(last, obj);
  const TriangleMesh back = read_obj(obj);
  bool same = back.triangles == last.triangles && back.vertices.size() == last.vertices.size();
  double worst = 0.0;
  for (std::size_t i = 0; same && i < back.vertices.size(); ++i)
    for (int a = 0; a < 3; ++a) {
      const double ref = last.vertices[i][a];
      worst = std::max(worst, std::abs(back.vertices[i][a] - ref) / std::max(std::abs(ref), 1e-300));
    }
  same = same && worst <= 5e-9;
  o.check(same, "OBJ round trip: " + std::to_string(back.vertices.size()) + " vertices, max rel diff " +
                    fmt("%.2g", worst) + " (9 significant digits)");
  o.summary = "plane dev " + fmt("%.2g", dz) + ", residual " + seq + ", OBJ round trip";
  return o;
}

Outcome ingestion() {
  Outcome o;
  std::mt19937_64 rng(99);
  // 13^3 round trips in every dtype and byte order.
  bool all_exact = true;
  for (DType t : {DType::U8, DType::U16, DType::F32, DType::F64})
    for (Endian e : {Endian::Little, Endian::Big}) {
      VolumeHeader h;
      h.dims = {13, 13, 13};
      h.dtype = t;
      h.endianness = e;
      std::vector<std::uint8_t> bytes(h.byte_count());
      if (t == DType::U8 || t == DType::U16) {
        for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
      } else {
        // Random finite values written in the requested byte order.
        std::uniform_real_distribution<double> v(-1e3, 1e3);
        const std::size_t w = dtype_size(t);
        for (std::size_t i = 0; i < h.voxel_count(); ++i) {
          std::uint8_t le[8];
          if (t == DType::F32) {
            const float f = static_cast<float>(v(rng));
            std::memcpy(le, &f, 4);
          } else {
            const double d = v(rng);
            std::memcpy(le, &d, 8);
          }
          for (std::size_t k = 0; k < w; ++k) bytes[i * w + k] = e == Endian::Little ? le[k] : le[w - 1 - k];
        }
      }
      const RawVolume vol = read_raw(h, bytes);
      const bool exact = write_raw(h, vol.samples) == bytes && vol.samples.grid.m == MultiIndex(11, 11, 11);
      all_exact = all_exact && exact;
      if (!exact) o.check(false, to_string(t) + (e == Endian::Big ? " big" : " little") + " round trip differs");
    }
  o.check(all_exact, "13^3 volumes round-trip bit-exactly (u8, u16, f32, f64; both byte orders)");

  // CT-shaped volume.
  const auto t0 = Clock::now();
  VolumeHeader h;
  h.dims = {256, 256, 99};
  h.dtype = DType::U16;
  std::vector<std::uint8_t> bytes(h.byte_count());
  for (std::size_t i = 0; i < h.voxel_count(); ++i) {
    const int x = static_cast<int>(i % 256), y = static_cast<int>((i / 256) % 256), z = static_cast<int>(i / 65536);
    const double r = std::hypot(x - 127.5, y - 127.5, 2.0 * (z - 49.0));
    const auto v = static_cast<std::uint16_t>(r < 90.0 ? 3000 + 10 * (x % 7) : 100 + (y % 5));
    bytes[2 * i] = static_cast<std::uint8_t>(v & 0xff);
    bytes[2 * i + 1] = static_cast<std::uint8_t>(v >> 8);
  }
  const RawVolume vol = read_raw(h, bytes);
  o.check(vol.samples.grid.m == MultiIndex(254, 254, 97), "256x256x99 maps to m = (" +
                                                              std::to_string(vol.samples.grid.m.x()) + "," +
                                                              std::to_string(vol.samples.grid.m.y()) + "," +
                                                              std::to_string(vol.samples.grid.m.z()) + ")");
  const QISpline s = approximate(vol.samples);
  const std::uint64_t full = CompiledSpline::bytes_required(s.grid().m);
  const std::uint64_t budget = std::uint64_t{1} << 30;
  bool refused = false;
  try {
    compile(s, budget);
  } catch (const SizeError&) {
    refused = true;
  }
  o.check(refused, "one-shot compile needs " + fmt("%.1f", full / 1073741824.0) + " GiB and is refused under 1 GiB");

  std::mt19937_64 pick(5);
  double spot = 0.0;
  int spots = 0;
  const BlockCompileStats stats = compile_blocks(s, budget, [&](const CompiledSpline& block) {
    for (int k = 0; k < 4; ++k) {
      MultiIndex cube;
      do {
        for (int a = 0; a < 3; ++a) cube[a] = std::uniform_int_distribution<int>(0, s.grid().m[a] - 1)(pick);
      } while (!block.covers(cube));
      const int tet = std::uniform_int_distribution<int>(0, kTetsPerCube - 1)(pick);
      const auto got = block.patch({cube, tet});
      const auto want = assemble_patch(s, {cube, tet});
      for (int i = 0; i < bb::kQuarticSize; ++i) spot = std::max(spot, std::abs(got[i] - want[i]));
      ++spots;
    }
  });
  const double dt = seconds_since(t0);
  o.check(stats.cubes == s.grid().cube_count(), "streamed compile covered " + std::to_string(stats.cubes) +
                                                    " cubes in " + std::to_string(stats.blocks) + " blocks");
  o.check(stats.peak_bytes <= budget, "peak block " + fmt("%.1f", stats.peak_bytes / 1048576.0) +
                                          " MiB within the 1 GiB budget");
  o.check(spot <= 1e-9 * 4000.0, std::to_string(spots) + " spot-checked patches agree with direct assembly to " +
                                     fmt("%.2g", spot));
  o.summary = "13^3 round trips; 256x256x99 -> m=(254,254,97), streamed under 1 GiB (peak " +
              fmt("%.0f", stats.peak_bytes / 1048576.0) + " MiB), " + fmt("%.0f", dt) + " s";
  return o;
}

void report(int id, const std::string& tag, const Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << tag << ": " << o.summary << "\n";
  for (const auto& d : o.details) std::cout << "    " << d << "\n";
  std::cout.flush();
}

std::vector<int> parse_list(const std::string& s) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stoi(tok));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boxqi acceptance criteria"};
  int only = 0;
  std::vector<std::string> fns{"f1", "f2", "f3"};
  std::string ms = "16,32,64";
  bool full_table = false;
  app.add_option("--criterion", only, "Run one criterion (1-10); default all");
  app.add_option("--fn", fns, "Test functions for criterion 7");
  app.add_option("--m", ms, "Cube counts for criterion 7");
  app.add_flag("--full-table", full_table, "Criterion 5 over every printed cell of the norm table");
  CLI11_PARSE(app, argc, argv);

  bool ok = true;
  auto run = [&](int id, auto&& fn, const std::string& tag = "") {
    if (only != 0 && only != id) return;
    try {
      const Outcome o = fn();
      report(id, tag, o);
      ok = ok && o.pass;
    } catch (const std::exception& e) {
      std::cout << "FAIL criterion " << id << tag << ": exception: " << e.what() << "\n";
      ok = false;
    }
  };

  run(1, partition_of_unity);
  run(2, smoothness);
  run(3, cubic_reproduction);
  run(4, stencil_validation);
  if (full_table)
    run(5, full_norm_table, " (full table)");
  else
    run(5, near_best_reproduction);
  run(6, published_weights);
  run(7, [&] { return convergence_table(fns, parse_list(ms)); });
  run(8, derivative_order);
  run(9, isosurface_checks);
  run(10, ingestion);
  return ok ? 0 : 1;
}
