// boxqi: command-line front end for derivation, approximation, evaluation
// and isosurface export.

#include "boxqi/boxspline.hpp"
#include "boxqi/convergence.hpp"
#include "boxqi/isosurface.hpp"
#include "boxqi/nearbest.hpp"
#include "boxqi/parallel.hpp"
#include "boxqi/qi.hpp"
#include "boxqi/stencils.hpp"
#include "boxqi/volume.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace boxqi;
using json = nlohmann::ordered_json;

namespace {

MultiIndex parse_triple(const std::string& s, const char* what) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stoi(tok));
  if (v.size() == 1) v = {v[0], v[0], v[0]};
  if (v.size() != 3) throw std::invalid_argument(std::string(what) + ": expected one or three comma-separated integers");
  return {v[0], v[1], v[2]};
}

Point3 parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  if (v.size() != 3) throw std::invalid_argument("point: expected x,y,z");
  return {v[0], v[1], v[2]};
}

std::pair<int, int> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const int n = std::stoi(s);
    return {n, n};
  }
  return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stoi(tok));
  return v;
}

std::string rational_string(const Rational& r) { return r.str(); }

json index_json(const MultiIndex& b) { return json::array({b.x(), b.y(), b.z()}); }

std::string key_string(const ClassKey& k) {
  return std::to_string(k.p) + "," + std::to_string(k.q) + "," + std::to_string(k.r);
}

ClassKey parse_key(const std::string& s) {
  const MultiIndex t = parse_triple(s, "class");
  return {t.x(), t.y(), t.z()};
}

// Printed-table form: the published norms are upper bounds rounded up at the
// fourth significant figure.
std::string printed_norm(const Rational& r) { return ceil_significant(r, 4); }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

struct SplineSource {
  std::string in;
  std::string fn;
  std::string m = "32";
  std::string header;
};

// Loads a saved spline, or builds one from a test function.
QISpline load_or_build(const SplineSource& src, int threads, std::optional<SampledFunction>* sampled = nullptr) {
  if (!src.in.empty()) return QISpline::load(src.in);
  if (src.fn.empty()) throw std::invalid_argument("need --in <spline> or --fn <f1|f2|f3>");
  SampledFunction sf = sample_test_function(src.fn, parse_triple(src.m, "--m"));
  QISpline s = approximate(sf.samples, library(), threads);
  s.origin = sf.origin;
  s.label = src.fn;
  if (sampled) *sampled = std::move(sf);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quartic C2 box-spline quasi-interpolation on type-6 tetrahedral partitions"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: $BOXQI_THREADS or all cores)");

  // derive
  auto* derive_cmd = app.add_subcommand("derive", "Exact l1-minimal functional for a class (or alpha on a grid)");
  std::string d_class, d_alpha, d_m;
  int d_n = 4;
  bool d_tie = true;
  derive_cmd->add_option("--class", d_class, "Canonical class key p,q,r");
  derive_cmd->add_option("--alpha", d_alpha, "Translate index i,j,k (with --m)");
  derive_cmd->add_option("--m", d_m, "Cube counts m1,m2,m3 for --alpha");
  derive_cmd->add_option("--n", d_n, "Octahedron radius")->required();
  derive_cmd->add_option("--tie", d_tie, "Tie weights over symmetry orbits (true/false)");

  // norm-table
  auto* table_cmd = app.add_subcommand("norm-table", "Optimal l1 norms per class and n, as CSV");
  std::vector<std::string> t_classes;
  std::string t_range = "1..11", t_format = "printed";
  bool t_tie = true;
  table_cmd->add_option("--class", t_classes, "Class key p,q,r (repeatable; default: all classes)");
  table_cmd->add_option("--n", t_range, "n or lo..hi");
  table_cmd->add_option("--format", t_format, "printed (as in the published table) or decimal")
      ->check(CLI::IsMember({"printed", "decimal"}));
  table_cmd->add_option("--tie", t_tie, "Tie weights over symmetry orbits");

  // stencils dump
  auto* stencils_cmd = app.add_subcommand("stencils", "Embedded coefficient functionals");
  auto* dump_cmd = stencils_cmd->add_subcommand("dump", "JSON of all classes");
  stencils_cmd->require_subcommand(1);
  std::string dump_out;
  dump_cmd->add_option("--out", dump_out, "Output file (default stdout)");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Sample a test function onto the data points as a raw volume");
  std::string s_fn, s_m = "32", s_out, s_dtype = "f64";
  sample_cmd->add_option("--fn", s_fn, "f1, f2 or f3")->required();
  sample_cmd->add_option("--m", s_m, "Cubes per axis");
  sample_cmd->add_option("--out", s_out, "Raw output; a .json sidecar is written next to it")->required();
  sample_cmd->add_option("--dtype", s_dtype, "f64 or f32")->check(CLI::IsMember({"f64", "f32"}));

  // approximate
  auto* approx_cmd = app.add_subcommand("approximate", "Build a spline from a test function or a raw volume");
  SplineSource a_src;
  std::string a_out, a_dims, a_dtype = "u8", a_endian = "little";
  approx_cmd->add_option("--fn", a_src.fn, "Test function f1, f2 or f3");
  approx_cmd->add_option("--m", a_src.m, "Cubes per axis for --fn");
  approx_cmd->add_option("--in", a_src.in, "Raw volume file");
  approx_cmd->add_option("--header", a_src.header, "JSON sidecar (default: <in>.json)");
  approx_cmd->add_option("--dims", a_dims, "N1,N2,N3 (overrides the sidecar)");
  approx_cmd->add_option("--dtype", a_dtype, "u8, u16, f32 or f64 (with --dims)");
  approx_cmd->add_option("--endian", a_endian, "little or big (with --dims)");
  approx_cmd->add_option("--out", a_out, "Spline output file (.qis)")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a spline at a point or on a grid");
  SplineSource e_src;
  int e_grid = kDefaultEvalGrid;
  std::string e_point, e_deriv = "0,0,0", e_ref;
  eval_cmd->add_option("--in", e_src.in, "Spline file")->required();
  eval_cmd->add_option("--point", e_point, "Single point x,y,z in domain coordinates");
  eval_cmd->add_option("--grid", e_grid, "Points per axis of the evaluation grid (endpoints included)");
  eval_cmd->add_option("--derivative", e_deriv, "Derivative order gx,gy,gz (|g| <= 3)");
  eval_cmd->add_option("--fn", e_ref, "Reference test function for the error (default: the spline label)");

  // convergence
  auto* conv_cmd = app.add_subcommand("convergence", "Max errors and orders on the evaluation grid, as CSV");
  std::string c_fn, c_ms = "16,32,64", c_out;
  int c_grid = kDefaultEvalGrid;
  conv_cmd->add_option("--fn", c_fn, "f1, f2 or f3")->required();
  conv_cmd->add_option("--m", c_ms, "Comma-separated cube counts");
  conv_cmd->add_option("--grid", c_grid, "Points per axis of the evaluation grid");
  conv_cmd->add_option("--out", c_out, "CSV output (default stdout)");

  // isosurface
  auto* iso_cmd = app.add_subcommand("isosurface", "Extract a level set as a triangle mesh");
  SplineSource i_src;
  double i_iso = 0.5;
  int i_res = 64;
  std::string i_out, i_format;
  bool i_refine = false, i_color = false;
  iso_cmd->add_option("--in", i_src.in, "Spline file");
  iso_cmd->add_option("--fn", i_src.fn, "Test function (instead of --in)");
  iso_cmd->add_option("--m", i_src.m, "Cubes per axis for --fn");
  iso_cmd->add_option("--iso", i_iso, "Isovalue");
  iso_cmd->add_option("--res", i_res, "Sampling cells per axis");
  iso_cmd->add_option("--out", i_out, "Mesh output file")->required();
  iso_cmd->add_option("--format", i_format, "obj or ply (default: from the extension)");
  iso_cmd->add_flag("--refine", i_refine, "Move vertices onto the exact spline level set");
  iso_cmd->add_flag("--color", i_color, "Per-vertex |f - Qf| against the test function");

  // info
  auto* info_cmd = app.add_subcommand("info", "Grid facts: |A|, norm bound, memory estimates");
  std::string n_m = "11";
  double n_h = 1.0;
  info_cmd->add_option("--m", n_m, "Cube counts m1,m2,m3");
  info_cmd->add_option("--spacing", n_h, "Cube side");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*derive_cmd) {
      L1Solution sol;
      json out;
      if (!d_alpha.empty()) {
        if (d_m.empty()) throw std::invalid_argument("--alpha needs --m");
        const DomainGrid grid(parse_triple(d_m, "--m"), 1.0);
        const MultiIndex alpha = parse_triple(d_alpha, "--alpha");
        if (!in_index_set(alpha, grid)) throw std::invalid_argument("alpha is not in the index set");
        sol = minimize_l1(constraint_system(octahedron(alpha, d_n, grid), d_tie));
        out["alpha"] = index_json(alpha);
        out["m"] = index_json(grid.m);
      } else {
        if (d_class.empty()) throw std::invalid_argument("need --class or --alpha");
        const ClassKey key = parse_key(d_class);
        sol = derive(key, d_n, d_tie);
        out["class"] = index_json(key.as_index());
      }
      out["n"] = d_n;
      out["tie"] = d_tie;
      out["status"] = sol.status == LpStatus::Optimal ? "optimal" : "infeasible";
      if (sol.status == LpStatus::Optimal) {
        out["norm"] = rational_string(sol.norm);
        out["norm_value"] = sol.norm_value();
        json w = json::array();
        for (const auto& [beta, v] : sol.weights)
          w.push_back({{"beta", index_json(beta)}, {"weight", rational_string(v)}});
        out["weights"] = w;
      }
      std::cout << out.dump(2) << "\n";
    } else if (*table_cmd) {
      std::vector<ClassKey> keys;
      for (const auto& c : t_classes) keys.push_back(parse_key(c));
      if (keys.empty()) keys = canonical_keys();
      const auto [lo, hi] = parse_range(t_range);
      if (lo < 1 || hi < lo) throw std::invalid_argument("--n: need 1 <= lo <= hi");
      std::cout << "class";
      for (int n = lo; n <= hi; ++n) std::cout << ",n=" << n;
      std::cout << "\n";
      for (const auto& row : norm_table(keys, lo, hi, t_tie)) {
        std::cout << '"' << key_string(row.key) << '"';
        for (const auto& [n, v] : row.cells) {
          std::cout << ',';
          if (!v)
            std::cout << "--";
          else if (t_format == "printed")
            std::cout << printed_norm(*v);
          else
            std::cout << format_double(v->convert_to<double>());
        }
        std::cout << "\n";
      }
    } else if (*stencils_cmd) {
      const auto& lib = library();
      json all = json::array();
      for (const auto& key : canonical_keys()) {
        const Stencil& s = lib.at(key);
        json entries = json::array();
        for (const auto& e : s.entries)
          entries.push_back({{"beta", index_json(e.beta)}, {"weight", rational_string(e.weight)}});
        all.push_back({{"key", index_json(key.as_index())},
                       {"n", s.n},
                       {"l1", rational_string(s.l1())},
                       {"l1_value", s.l1_value()},
                       {"rederived", s.rederived},
                       {"entries", entries}});
      }
      write_text(dump_out, all.dump(2) + "\n");
    } else if (*sample_cmd) {
      const SampledFunction sf = sample_test_function(s_fn, parse_triple(s_m, "--m"));
      VolumeHeader h;
      const MultiIndex dims = DataPointSet::dims(sf.samples.grid);
      h.dims = {dims.x(), dims.y(), dims.z()};
      h.dtype = parse_dtype(s_dtype);
      h.spacing = std::array<double, 3>{sf.samples.grid.h, sf.samples.grid.h, sf.samples.grid.h};
      write_raw_file(h, sf.samples, s_out);
      write_sidecar(h, s_out + ".json");
      std::cout << "wrote " << s_out << " (" << h.dims[0] << "x" << h.dims[1] << "x" << h.dims[2] << " " << s_dtype
                << ") and " << s_out << ".json\n";
    } else if (*approx_cmd) {
      QISpline s;
      if (!a_src.in.empty()) {
        VolumeHeader h;
        if (!a_dims.empty()) {
          const MultiIndex d = parse_triple(a_dims, "--dims");
          h.dims = {d.x(), d.y(), d.z()};
          h.dtype = parse_dtype(a_dtype);
          h.endianness = a_endian == "big" ? Endian::Big : Endian::Little;
        } else {
          h = read_sidecar(a_src.header.empty() ? a_src.in + ".json" : a_src.header);
        }
        const RawVolume vol = read_raw_file(h, a_src.in);
        s = approximate(vol.samples, library(), threads);
        s.spacing = vol.spacing;
        s.label = a_src.in;
      } else {
        s = load_or_build(a_src, threads);
      }
      s.save(a_out);
      std::cout << "wrote " << a_out << ": m=" << s.grid().m.x() << "," << s.grid().m.y() << "," << s.grid().m.z()
                << " h=" << format_double(s.grid().h) << " |A|=" << IndexSetA(s.grid()).size() << "\n";
    } else if (*eval_cmd) {
      const QISpline s = QISpline::load(e_src.in);
      const MultiIndex order = parse_triple(e_deriv, "--derivative");
      if (!e_point.empty()) {
        const Point3 p = parse_point(e_point);
        const double v = order.sum() == 0 ? eval(s, p) : eval_derivative(s, p, order);
        std::cout << format_double(v) << "\n";
      } else {
        const std::string ref = e_ref.empty() ? s.label : e_ref;
        const auto pts = evaluation_grid(s.grid().extent(), e_grid);
        const auto v = order.sum() == 0 ? eval_many(s, pts, threads) : eval_many_derivative(s, pts, order, threads);
        double vmax = 0.0;
        for (double x : v) vmax = std::max(vmax, std::abs(x));
        std::cout << "points,max_abs_value";
        bool with_error = false;
        for (const auto& id : test_function_ids()) with_error |= id == ref;
        if (with_error && order.sum() == 0) {
          const TestFunction& fn = test_function(ref);
          double err = 0.0;
          for (std::size_t i = 0; i < pts.size(); ++i) err = std::max(err, std::abs(v[i] - fn.f(s.origin + pts[i])));
          std::cout << ",max_abs_error\n" << pts.size() << "," << format_double(vmax) << "," << format_double(err) << "\n";
        } else {
          std::cout << "\n" << pts.size() << "," << format_double(vmax) << "\n";
        }
      }
    } else if (*conv_cmd) {
      write_text(c_out, to_csv(convergence(c_fn, parse_int_list(c_ms), c_grid, threads)));
    } else if (*iso_cmd) {
      std::optional<SampledFunction> sf;
      const QISpline s = load_or_build(i_src, threads, &sf);
      IsoRequest req;
      req.iso = i_iso;
      req.resolution = i_res;
      req.refine = i_refine;
      if (i_color) {
        const std::string id = i_src.fn.empty() ? s.label : i_src.fn;
        const TestFunction& fn = test_function(id);
        const Point3 origin = s.origin;
        req.reference = [fn, origin](const Point3& x) { return fn.f(origin + x); };
      }
      IsoResult res = extract(s, req, threads);
      res.mesh.transform(s.origin, s.spacing);
      std::string fmt = i_format;
      if (fmt.empty()) fmt = i_out.size() >= 4 && i_out.substr(i_out.size() - 4) == ".ply" ? "ply" : "obj";
      write_mesh(res.mesh, i_out, parse_mesh_format(fmt));
      std::cout << "vertices=" << res.mesh.vertices.size() << " triangles=" << res.mesh.triangles.size()
                << " max_residual=" << format_double(res.max_residual);
      if (i_color) std::cout << " max_error=" << format_double(res.max_scalar);
      std::cout << "\n";
    } else if (*info_cmd) {
      const DomainGrid grid(parse_triple(n_m, "--m"), n_h);
      const auto& lib = library();
      const std::uint64_t cubes = static_cast<std::uint64_t>(grid.cube_count());
      json out;
      out["m"] = index_json(grid.m);
      out["h"] = grid.h;
      out["extent"] = {grid.extent().x(), grid.extent().y(), grid.extent().z()};
      out["index_set_size"] = IndexSetA(grid).size();
      out["data_points"] = DataPointSet(grid).size();
      out["tetrahedra"] = cubes * kTetsPerCube;
      out["norm_bound"] = norm_bound(lib);
      out["norm_bound_printed"] = printed_norm(lib.at({3, 0, 0}).l1());
      out["quasi_interpolation_ok"] = (grid.m.array() >= kMinQuasiInterpolationCubes).all();
      out["bytes_samples"] = DataPointSet(grid).size() * 8;
      out["bytes_coefficients"] = IndexSetA::storage_dims(grid).cast<std::int64_t>().prod() * 8;
      out["bytes_compiled"] = CompiledSpline::bytes_required(grid.m);
      out["threads"] = resolve_threads(threads);
      std::cout << out.dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "boxqi: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
