#include "boxqi/qi.hpp"

#include "boxqi/boxspline.hpp"
#include "boxqi/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace boxqi {

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

namespace {

// Lower corner of B_alpha's cube that overlaps domain cube c is c - alpha + (1,1,3).
const MultiIndex kTranslateShift(1, 1, 3);

struct TetSlots {
  std::vector<MultiIndex> offsets;  // offset o: alpha = c + shift - o
  std::vector<int> slots;
  Eigen::Matrix<double, Eigen::Dynamic, bb::kQuarticSize, Eigen::RowMajor> patches;
};

const std::array<TetSlots, kTetsPerCube>& tet_slots() {
  static const std::array<TetSlots, kTetsPerCube> all = [] {
    const auto& t = boxspline::table();
    std::array<TetSlots, kTetsPerCube> out;
    for (int tet = 0; tet < kTetsPerCube; ++tet) {
      auto& ts = out[tet];
      for (int s = 0; s < boxspline::BBTable::kSlots; ++s)
        if (t.nonzero(s, tet)) {
          ts.offsets.push_back(boxspline::BBTable::offset_of(s));
          ts.slots.push_back(s);
        }
      ts.patches.resize(static_cast<Eigen::Index>(ts.slots.size()), bb::kQuarticSize);
      for (std::size_t k = 0; k < ts.slots.size(); ++k) {
        const auto p = t.patch(ts.slots[k], tet);
        for (int c = 0; c < bb::kQuarticSize; ++c) ts.patches(static_cast<Eigen::Index>(k), c) = p[c];
      }
    }
    return out;
  }();
  return all;
}

std::vector<Eigen::Vector4d> bary_directions(int tet, const MultiIndex& order) {
  std::vector<Eigen::Vector4d> dirs;
  for (const auto& d : boxspline::derivative_directions(order)) dirs.push_back(barycentric_direction(tet, d));
  return dirs;
}

double patch_derivative(std::span<const double, bb::kQuarticSize> p, const Location& loc,
                        const MultiIndex& order, double h) {
  const auto dirs = bary_directions(loc.where.tet, order);
  return bb::derivative<double>(std::span<const double>(p.data(), p.size()), 4, loc.bary, dirs) /
         std::pow(h, order.sum());
}

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("spline file truncated");
  return v;
}

}  // namespace

// ---- QISpline --------------------------------------------------------------

QISpline::QISpline(const DomainGrid& grid)
    : grid_(grid),
      coeffs_(static_cast<std::size_t>(IndexSetA::storage_dims(grid).cast<std::int64_t>().prod()), 0.0) {}

void QISpline::set_coefficient(const MultiIndex& alpha, double v) {
  if (!in_index_set(alpha, grid_)) throw std::out_of_range("set_coefficient: alpha not in the index set");
  coeffs_[static_cast<std::size_t>(IndexSetA::storage_index(alpha, grid_))] = v;
}

void QISpline::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write("BQIS", 4);
  put<std::uint32_t>(out, 1);
  for (int a = 0; a < 3; ++a) put<std::int32_t>(out, grid_.m[a]);
  put<double>(out, grid_.h);
  for (int a = 0; a < 3; ++a) put<double>(out, origin[a]);
  for (int a = 0; a < 3; ++a) put<double>(out, spacing[a]);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(label.size()));
  out.write(label.data(), static_cast<std::streamsize>(label.size()));
  put<std::uint64_t>(out, coeffs_.size());
  out.write(reinterpret_cast<const char*>(coeffs_.data()),
            static_cast<std::streamsize>(coeffs_.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

QISpline QISpline::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "BQIS", 4) != 0) throw std::runtime_error(path + ": not a spline file");
  if (get<std::uint32_t>(in) != 1) throw std::runtime_error(path + ": unsupported spline file version");
  MultiIndex m;
  for (int a = 0; a < 3; ++a) m[a] = get<std::int32_t>(in);
  const double h = get<double>(in);
  QISpline s(DomainGrid(m, h));
  for (int a = 0; a < 3; ++a) s.origin[a] = get<double>(in);
  for (int a = 0; a < 3; ++a) s.spacing[a] = get<double>(in);
  s.label.resize(get<std::uint32_t>(in));
  in.read(s.label.data(), static_cast<std::streamsize>(s.label.size()));
  if (get<std::uint64_t>(in) != s.coeffs_.size()) throw std::runtime_error(path + ": coefficient count mismatch");
  in.read(reinterpret_cast<char*>(s.coeffs_.data()), static_cast<std::streamsize>(s.coeffs_.size() * sizeof(double)));
  if (!in) throw std::runtime_error("spline file truncated");
  return s;
}

// ---- assembly ----------------------------------------------------------------

SampleField sample(const DomainGrid& grid, const std::function<double(const Point3&)>& f) {
  SampleField out(grid);
  const MultiIndex d = DataPointSet::dims(grid);
  for (int k = 0; k < d.z(); ++k)
    for (int j = 0; j < d.y(); ++j)
      for (int i = 0; i < d.x(); ++i) {
        const MultiIndex beta(i, j, k);
        out.at(beta) = f(data_point(beta, grid));
      }
  return out;
}

QISpline approximate(const SampleField& samples, const StencilLibrary& lib, int threads) {
  const DomainGrid& grid = samples.grid;
  if ((grid.m.array() < kMinQuasiInterpolationCubes).any())
    throw std::invalid_argument("approximate: every cube count must be at least 11");
  if (!samples.complete()) throw std::invalid_argument("approximate: sample field is incomplete");
  QISpline s(grid);
  const auto alphas = IndexSetA(grid).enumerate();
  std::vector<double> values(alphas.size());
  parallel_for(static_cast<std::int64_t>(alphas.size()), threads, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) values[i] = boxqi::apply(instantiate(alphas[i], grid, lib), samples);
  });
  for (std::size_t i = 0; i < alphas.size(); ++i) s.set_coefficient(alphas[i], values[i]);
  return s;
}

std::array<double, bb::kQuarticSize> assemble_patch(const QISpline& s, const TetraRef& where) {
  const TetSlots& ts = tet_slots()[where.tet];
  Eigen::Matrix<double, 1, Eigen::Dynamic> a(static_cast<Eigen::Index>(ts.offsets.size()));
  for (std::size_t k = 0; k < ts.offsets.size(); ++k)
    a[static_cast<Eigen::Index>(k)] = s.coefficient(where.cube + kTranslateShift - ts.offsets[k]);
  const Eigen::Matrix<double, 1, bb::kQuarticSize> p = a * ts.patches;
  std::array<double, bb::kQuarticSize> out;
  for (int c = 0; c < bb::kQuarticSize; ++c) out[c] = p[c];
  return out;
}

double eval_direct(const QISpline& s, const Point3& p) {
  const Location loc = locate(p, s.grid());
  const auto basis = bb::quartic_basis(loc.bary);
  const auto& t = boxspline::table();
  double acc = 0.0;
  for (int dz = -1; dz <= 3; ++dz)
    for (int dy = -1; dy <= 3; ++dy)
      for (int dx = -1; dx <= 3; ++dx) {
        const MultiIndex alpha = loc.where.cube + MultiIndex(dx, dy, dz);
        const double a = s.coefficient(alpha);
        if (a == 0.0) continue;
        const int slot = boxspline::BBTable::slot(loc.where.cube + kTranslateShift - alpha);
        if (slot < 0 || !t.nonzero(slot, loc.where.tet)) continue;
        acc += a * bb::dot(t.patch(slot, loc.where.tet), basis);
      }
  return acc;
}

double eval_derivative(const QISpline& s, const Point3& p, const MultiIndex& order) {
  const Location loc = locate(p, s.grid());
  const auto patch = assemble_patch(s, loc.where);
  return patch_derivative(std::span<const double, bb::kQuarticSize>(patch), loc, order, s.grid().h);
}

namespace {

// Groups points by tetrahedron and evaluates each group from one patch.
template <class PointFn>
std::vector<double> eval_grouped(const QISpline& s, std::span<const Point3> points, int threads, PointFn&& fn) {
  const std::int64_t n = static_cast<std::int64_t>(points.size());
  std::vector<Location> locs(points.size());
  std::vector<std::pair<std::int64_t, std::int64_t>> keys(points.size());
  const MultiIndex m = s.grid().m;
  parallel_for(n, threads, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) {
      locs[i] = locate(points[i], s.grid());
      const MultiIndex& c = locs[i].where.cube;
      const std::int64_t cube = (static_cast<std::int64_t>(c.z()) * m.y() + c.y()) * m.x() + c.x();
      keys[i] = {cube * kTetsPerCube + locs[i].where.tet, i};
    }
  });
  std::sort(keys.begin(), keys.end());
  std::vector<double> out(points.size());
  parallel_for(n, threads, [&](std::int64_t b, std::int64_t e) {
    std::int64_t current = -1;
    std::array<double, bb::kQuarticSize> patch{};
    for (std::int64_t r = b; r < e; ++r) {
      const auto [key, i] = keys[r];
      if (key != current) {
        patch = assemble_patch(s, locs[i].where);
        current = key;
      }
      out[i] = fn(std::span<const double, bb::kQuarticSize>(patch), locs[i]);
    }
  });
  return out;
}

}  // namespace

std::vector<double> eval_many(const QISpline& s, std::span<const Point3> points, int threads) {
  if (points.size() < kCompiledCrossover) {
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = eval_direct(s, points[i]);
    return out;
  }
  return eval_grouped(s, points, threads, [](std::span<const double, bb::kQuarticSize> p, const Location& loc) {
    return bb::dot(p, bb::quartic_basis(loc.bary));
  });
}

std::vector<double> eval_many_derivative(const QISpline& s, std::span<const Point3> points,
                                         const MultiIndex& order, int threads) {
  const double h = s.grid().h;
  return eval_grouped(s, points, threads,
                      [&](std::span<const double, bb::kQuarticSize> p, const Location& loc) {
                        return patch_derivative(p, loc, order, h);
                      });
}

// ---- compiled patches --------------------------------------------------------

SizeError::SizeError(std::uint64_t b, std::uint64_t g)
    : std::runtime_error("compiled spline needs " + std::to_string(b) + " bytes, budget is " + std::to_string(g)),
      bytes(b),
      budget(g) {}

std::uint64_t CompiledSpline::bytes_required(const MultiIndex& cube_count) {
  return static_cast<std::uint64_t>(cube_count.cast<std::int64_t>().prod()) * kTetsPerCube *
         bb::kQuarticSize * sizeof(double);
}

CompiledSpline::CompiledSpline(const QISpline& s, const MultiIndex& lo, const MultiIndex& hi,
                               std::uint64_t budget, int threads)
    : grid_(s.grid()), lo_(lo), hi_(hi) {
  if ((lo.array() < 0).any() || (hi.array() > grid_.m.array()).any() || (hi.array() <= lo.array()).any())
    throw std::out_of_range("CompiledSpline: bad cube range");
  const MultiIndex count = hi - lo;
  const std::uint64_t need = bytes_required(count);
  if (need > budget) throw SizeError(need, budget);
  patches_.assign(need / sizeof(double), 0.0);

  const auto& slots = tet_slots();
  const std::int64_t ncubes = count.cast<std::int64_t>().prod();
  // For each tetrahedron: patches = (coefficients gathered per cube) * (B patches).
  constexpr std::int64_t kChunk = 4096;
  const std::int64_t nchunks = (ncubes + kChunk - 1) / kChunk;
  parallel_for(nchunks, threads, [&](std::int64_t cb, std::int64_t ce) {
    Eigen::MatrixXd gathered;
    Eigen::Matrix<double, Eigen::Dynamic, bb::kQuarticSize, Eigen::RowMajor> result;
    for (std::int64_t chunk = cb; chunk < ce; ++chunk) {
      const std::int64_t c0 = chunk * kChunk, c1 = std::min(ncubes, c0 + kChunk);
      std::vector<MultiIndex> cubes;
      for (std::int64_t c = c0; c < c1; ++c) {
        const std::int64_t x = c % count.x(), y = (c / count.x()) % count.y(), z = c / (count.x() * count.y());
        cubes.push_back(lo + MultiIndex(static_cast<int>(x), static_cast<int>(y), static_cast<int>(z)));
      }
      for (int tet = 0; tet < kTetsPerCube; ++tet) {
        const TetSlots& ts = slots[tet];
        const auto ns = static_cast<Eigen::Index>(ts.offsets.size());
        gathered.resize(static_cast<Eigen::Index>(cubes.size()), ns);
        for (std::size_t r = 0; r < cubes.size(); ++r)
          for (Eigen::Index k = 0; k < ns; ++k)
            gathered(static_cast<Eigen::Index>(r), k) = s.coefficient(cubes[r] + kTranslateShift - ts.offsets[k]);
        result.noalias() = gathered * ts.patches;
        for (std::size_t r = 0; r < cubes.size(); ++r)
          std::copy_n(result.row(static_cast<Eigen::Index>(r)).data(), bb::kQuarticSize,
                      patches_.data() + ((c0 + static_cast<std::int64_t>(r)) * kTetsPerCube + tet) * bb::kQuarticSize);
      }
    }
  });
}

std::span<const double, bb::kQuarticSize> CompiledSpline::patch(const TetraRef& where) const {
  if (!covers(where.cube)) throw std::out_of_range("CompiledSpline: cube not compiled");
  const MultiIndex c = where.cube - lo_, count = hi_ - lo_;
  const std::int64_t lin = (static_cast<std::int64_t>(c.z()) * count.y() + c.y()) * count.x() + c.x();
  return std::span<const double, bb::kQuarticSize>(
      patches_.data() + (lin * kTetsPerCube + where.tet) * bb::kQuarticSize, bb::kQuarticSize);
}

double CompiledSpline::eval(const Point3& p) const {
  const Location loc = locate(p, grid_);
  return bb::dot(patch(loc.where), bb::quartic_basis(loc.bary));
}

double CompiledSpline::eval_derivative(const Point3& p, const MultiIndex& order) const {
  const Location loc = locate(p, grid_);
  return patch_derivative(patch(loc.where), loc, order, grid_.h);
}

CompiledSpline compile(const QISpline& s, std::uint64_t budget, int threads) {
  return CompiledSpline(s, MultiIndex::Zero(), s.grid().m, budget, threads);
}

BlockCompileStats compile_blocks(const QISpline& s, std::uint64_t budget,
                                 const std::function<void(const CompiledSpline&)>& visit, int threads) {
  const MultiIndex m = s.grid().m;
  const std::uint64_t row = CompiledSpline::bytes_required({m.x(), 1, 1});
  if (row > budget) throw SizeError(row, budget);
  const std::uint64_t layer = row * static_cast<std::uint64_t>(m.y());
  BlockCompileStats stats;
  auto run = [&](const MultiIndex& lo, const MultiIndex& hi) {
    CompiledSpline block(s, lo, hi, budget, threads);
    stats.blocks += 1;
    stats.cubes += (hi - lo).cast<std::int64_t>().prod();
    stats.peak_bytes = std::max(stats.peak_bytes, block.bytes());
    visit(block);
  };
  if (layer <= budget) {
    const int per = static_cast<int>(std::min<std::uint64_t>(budget / layer, static_cast<std::uint64_t>(m.z())));
    for (int z = 0; z < m.z(); z += per) run({0, 0, z}, {m.x(), m.y(), std::min(m.z(), z + per)});
  } else {
    const int per = static_cast<int>(budget / row);
    for (int z = 0; z < m.z(); ++z)
      for (int y = 0; y < m.y(); y += per) run({0, y, z}, {m.x(), std::min(m.y(), y + per), z + 1});
  }
  return stats;
}

}  // namespace boxqi
