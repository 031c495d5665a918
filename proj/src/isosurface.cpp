#include "boxqi/isosurface.hpp"

#include "boxqi/parallel.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace boxqi {

void TriangleMesh::transform(const Point3& origin, const Point3& scale) {
  for (auto& v : vertices) v = origin + scale.cwiseProduct(v);
}

namespace {

// Kuhn tetrahedra of the unit cell: 0 -> e_a -> e_a + e_b -> (1,1,1).
const std::array<std::array<int, 4>, 6>& kuhn_tets() {
  static const std::array<std::array<int, 4>, 6> tets = [] {
    std::array<std::array<int, 4>, 6> out;
    std::array<int, 3> perm{0, 1, 2};
    int t = 0;
    do {
      const int c1 = 1 << perm[0];
      const int c2 = c1 | (1 << perm[1]);
      out[t++] = {0, c1, c2, 7};
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }();
  return tets;
}

// Root of s - iso on the segment [a, b] by the Illinois variant of regula falsi.
Point3 refine_on_edge(const QISpline& s, double iso, Point3 a, double fa, Point3 b, double fb, double tol) {
  fa -= iso;
  fb -= iso;
  Point3 x = a;
  int side = 0;
  for (int it = 0; it < 100; ++it) {
    const double t = fa / (fa - fb);
    x = a + t * (b - a);
    const double fx = eval(s, x) - iso;
    if (std::abs(fx) <= tol) break;
    if ((fx > 0) == (fa > 0)) {
      a = x;
      fa = fx;
      if (side == -1) fb /= 2;
      side = -1;
    } else {
      b = x;
      fb = fx;
      if (side == 1) fa /= 2;
      side = 1;
    }
  }
  return x;
}

}  // namespace

IsoResult extract(const QISpline& s, const IsoRequest& req, int threads) {
  if (req.resolution < 2) throw std::invalid_argument("isosurface: resolution must be at least 2");
  if (!std::isfinite(req.iso)) throw std::invalid_argument("isosurface: isovalue must be finite");
  const int R = req.resolution;
  const int n1 = R + 1;
  const Point3 ext = s.grid().extent();
  auto node_point = [&](std::int64_t id) {
    const std::int64_t i = id % n1, j = (id / n1) % n1, k = id / (static_cast<std::int64_t>(n1) * n1);
    return Point3(ext.x() * i / R, ext.y() * j / R, ext.z() * k / R);
  };
  const std::int64_t nodes = static_cast<std::int64_t>(n1) * n1 * n1;
  std::vector<Point3> pts(static_cast<std::size_t>(nodes));
  for (std::int64_t id = 0; id < nodes; ++id) pts[id] = node_point(id);
  const std::vector<double> val = eval_many(s, pts, threads);
  pts.clear();
  pts.shrink_to_fit();

  IsoResult res;
  TriangleMesh& mesh = res.mesh;
  std::unordered_map<std::uint64_t, int> edge_vertex;
  std::vector<std::array<std::int64_t, 2>> vertex_edge;
  auto vertex_on = [&](std::int64_t a, std::int64_t b) {
    if (a > b) std::swap(a, b);
    const std::uint64_t key = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(nodes) + static_cast<std::uint64_t>(b);
    auto [it, inserted] = edge_vertex.try_emplace(key, static_cast<int>(mesh.vertices.size()));
    if (inserted) {
      const double fa = val[a], fb = val[b];
      const double t = (fa == fb) ? 0.5 : (req.iso - fa) / (fb - fa);
      mesh.vertices.push_back(node_point(a) + std::clamp(t, 0.0, 1.0) * (node_point(b) - node_point(a)));
      vertex_edge.push_back({a, b});
    }
    return it->second;
  };

  const double area_tol = 1e-12 * std::pow(s.grid().h, 2);
  const auto& tets = kuhn_tets();
  for (int k = 0; k < R; ++k)
    for (int j = 0; j < R; ++j)
      for (int i = 0; i < R; ++i) {
        std::array<std::int64_t, 8> corner;
        for (int c = 0; c < 8; ++c)
          corner[c] = ((static_cast<std::int64_t>(k + ((c >> 2) & 1)) * n1) + (j + ((c >> 1) & 1))) * n1 + (i + (c & 1));
        for (const auto& t : tets) {
          std::array<std::int64_t, 4> v{corner[t[0]], corner[t[1]], corner[t[2]], corner[t[3]]};
          std::vector<std::int64_t> in, out;
          for (auto id : v) (val[id] >= req.iso ? in : out).push_back(id);
          if (in.empty() || out.empty()) continue;

          std::vector<std::array<int, 3>> tris;
          if (in.size() == 1 || out.size() == 1) {
            const auto& lone = in.size() == 1 ? in : out;
            const auto& rest = in.size() == 1 ? out : in;
            tris.push_back({vertex_on(lone[0], rest[0]), vertex_on(lone[0], rest[1]), vertex_on(lone[0], rest[2])});
          } else {
            const int a = vertex_on(in[0], out[0]), b = vertex_on(in[0], out[1]);
            const int c = vertex_on(in[1], out[1]), d = vertex_on(in[1], out[0]);
            tris.push_back({a, b, c});
            tris.push_back({a, c, d});
          }
          // Orient every triangle so its normal points toward increasing values.
          Point3 cin = Point3::Zero(), cout = Point3::Zero();
          for (auto id : in) cin += node_point(id);
          for (auto id : out) cout += node_point(id);
          const Point3 up = cin / static_cast<double>(in.size()) - cout / static_cast<double>(out.size());
          for (auto tri : tris) {
            const Point3 n = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]).cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
            if (0.5 * n.norm() <= area_tol) {
              ++res.skipped_degenerate;
              continue;
            }
            if (n.dot(up) < 0) std::swap(tri[1], tri[2]);
            mesh.triangles.push_back(tri);
          }
        }
      }

  if (req.refine) {
    parallel_for(static_cast<std::int64_t>(mesh.vertices.size()), threads, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t v = b; v < e; ++v) {
        const auto [na, nb] = vertex_edge[v];
        if (val[na] == val[nb]) continue;
        mesh.vertices[v] = refine_on_edge(s, req.iso, node_point(na), val[na], node_point(nb), val[nb], req.refine_tol);
      }
    });
  }

  const std::vector<double> at = eval_many(s, mesh.vertices, threads);
  for (double v : at) res.max_residual = std::max(res.max_residual, std::abs(v - req.iso));
  if (req.reference) {
    mesh.scalar.resize(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      mesh.scalar[v] = std::abs(req.reference(mesh.vertices[v]) - at[v]);
      res.max_scalar = std::max(res.max_scalar, mesh.scalar[v]);
    }
  }
  return res;
}

MeshStats mesh_stats(const TriangleMesh& mesh) {
  MeshStats st;
  std::map<std::pair<int, int>, int> undirected, directed;
  st.min_area = mesh.triangles.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      ++undirected[{std::min(a, b), std::max(a, b)}];
      ++directed[{a, b}];
    }
    const Point3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]]).cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    st.min_area = std::min(st.min_area, 0.5 * n.norm());
  }
  for (const auto& [e, c] : undirected) st.max_edge_use = std::max(st.max_edge_use, c);
  for (const auto& [e, c] : directed)
    if (c > 1) ++st.inconsistent_edges;
  return st;
}

MeshFormat parse_mesh_format(const std::string& s) {
  if (s == "obj") return MeshFormat::Obj;
  if (s == "ply") return MeshFormat::Ply;
  throw std::invalid_argument("unknown mesh format '" + s + "' (expected obj or ply)");
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_ply(const TriangleMesh& mesh, std::ostream& out) {
  const bool has_scalar = mesh.scalar.size() == mesh.vertices.size() && !mesh.vertices.empty();
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n";
  if (has_scalar) out << "property double value\n";
  out << "element face " << mesh.triangles.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const double xyz[3] = {mesh.vertices[i].x(), mesh.vertices[i].y(), mesh.vertices[i].z()};
    out.write(reinterpret_cast<const char*>(xyz), sizeof xyz);
    if (has_scalar) out.write(reinterpret_cast<const char*>(&mesh.scalar[i]), sizeof(double));
  }
  for (const auto& t : mesh.triangles) {
    const unsigned char three = 3;
    out.write(reinterpret_cast<const char*>(&three), 1);
    const std::int32_t idx[3] = {t[0], t[1], t[2]};
    out.write(reinterpret_cast<const char*>(idx), sizeof idx);
  }
}

void write_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (format == MeshFormat::Obj)
    write_obj(mesh, out);
  else
    write_ply(mesh, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

TriangleMesh read_obj(std::istream& in) {
  TriangleMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Point3 p;
      ls >> p.x() >> p.y() >> p.z();
      if (!ls) throw std::runtime_error("OBJ: bad vertex line: " + line);
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::array<int, 3> t;
      for (auto& idx : t) {
        std::string tok;
        ls >> tok;
        if (!ls) throw std::runtime_error("OBJ: only triangles are supported: " + line);
        idx = std::stoi(tok.substr(0, tok.find('/'))) - 1;
      }
      mesh.triangles.push_back(t);
    }
  }
  for (const auto& t : mesh.triangles)
    for (int idx : t)
      if (idx < 0 || idx >= static_cast<int>(mesh.vertices.size())) throw std::runtime_error("OBJ: face index out of range");
  return mesh;
}

}  // namespace boxqi
