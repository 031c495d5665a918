#pragma once

// Isosurfaces of a quasi-interpolant by marching tetrahedra over a sampling
// grid of R cells per axis (each cell split into the six Kuhn tetrahedra
// around its main diagonal), and OBJ / PLY mesh I/O.

#include "boxqi/qi.hpp"
#include "boxqi/types.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace boxqi {

struct TriangleMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<double> scalar;  // optional per-vertex value (empty when absent)

  bool empty() const { return triangles.empty(); }
  void transform(const Point3& origin, const Point3& scale);
};

struct IsoRequest {
  double iso = 0.0;
  int resolution = 64;  // sampling cells per axis, >= 2
  bool refine = false;  // move vertices onto the spline level set along their edge
  double refine_tol = 1e-10;
  /// Optional reference in domain coordinates; the scalar channel becomes
  /// |reference(v) - s(v)|.
  std::function<double(const Point3&)> reference;
};

struct IsoResult {
  TriangleMesh mesh;
  double max_residual = 0.0;  // max over vertices of |s(v) - iso|
  double max_scalar = 0.0;    // max of the reference channel, if any
  int skipped_degenerate = 0;
};

IsoResult extract(const QISpline& s, const IsoRequest& req, int threads = 0);

struct MeshStats {
  int max_edge_use = 0;      // triangles sharing one undirected edge
  int inconsistent_edges = 0;  // directed edges used twice (winding flips)
  double min_area = 0.0;
};
MeshStats mesh_stats(const TriangleMesh& mesh);

enum class MeshFormat { Obj, Ply };
MeshFormat parse_mesh_format(const std::string& s);

/// ASCII OBJ, "%.9g" coordinates, 1-based faces; the scalar channel is dropped.
void write_obj(const TriangleMesh& mesh, std::ostream& out);
/// Binary little-endian PLY, double coordinates, optional double "value".
void write_ply(const TriangleMesh& mesh, std::ostream& out);
void write_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format);

TriangleMesh read_obj(std::istream& in);

}  // namespace boxqi
