#include "boxqi/volume.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace boxqi {

std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::U8: return 1;
    case DType::U16: return 2;
    case DType::F32: return 4;
    case DType::F64: return 8;
  }
  return 0;
}

std::string to_string(DType t) {
  switch (t) {
    case DType::U8: return "u8";
    case DType::U16: return "u16";
    case DType::F32: return "f32";
    case DType::F64: return "f64";
  }
  return "?";
}

DType parse_dtype(std::string_view s) {
  if (s == "u8" || s == "uint8") return DType::U8;
  if (s == "u16" || s == "uint16") return DType::U16;
  if (s == "f32" || s == "float32") return DType::F32;
  if (s == "f64" || s == "float64") return DType::F64;
  throw std::invalid_argument("unknown dtype '" + std::string(s) + "'");
}

std::string header_to_json(const VolumeHeader& h) {
  nlohmann::ordered_json j;
  j["dims"] = h.dims;
  j["dtype"] = to_string(h.dtype);
  j["endianness"] = h.endianness == Endian::Little ? "little" : "big";
  if (h.spacing) j["spacing"] = *h.spacing;
  return j.dump(2);
}

VolumeHeader header_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  VolumeHeader h;
  h.dims = j.at("dims").get<std::array<int, 3>>();
  h.dtype = parse_dtype(j.at("dtype").get<std::string>());
  const std::string e = j.value("endianness", "little");
  if (e == "little")
    h.endianness = Endian::Little;
  else if (e == "big")
    h.endianness = Endian::Big;
  else
    throw std::invalid_argument("unknown endianness '" + e + "'");
  if (j.contains("spacing")) h.spacing = j.at("spacing").get<std::array<double, 3>>();
  return h;
}

VolumeHeader read_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return header_from_json(ss.str());
}

void write_sidecar(const VolumeHeader& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << header_to_json(h) << "\n";
}

namespace {

bool needs_swap(Endian e) {
  return (e == Endian::Little) != (std::endian::native == std::endian::little);
}

template <class T>
T load_scalar(const std::uint8_t* p, bool swap) {
  std::array<std::uint8_t, sizeof(T)> buf;
  std::memcpy(buf.data(), p, sizeof(T));
  if (swap) std::reverse(buf.begin(), buf.end());
  T v;
  std::memcpy(&v, buf.data(), sizeof(T));
  return v;
}

template <class T>
void store_scalar(std::uint8_t* p, T v, bool swap) {
  std::array<std::uint8_t, sizeof(T)> buf;
  std::memcpy(buf.data(), &v, sizeof(T));
  if (swap) std::reverse(buf.begin(), buf.end());
  std::memcpy(p, buf.data(), sizeof(T));
}

void check_dims(const VolumeHeader& h) {
  for (int a = 0; a < 3; ++a)
    if (h.dims[a] < 13)
      throw std::invalid_argument("volume dims must be at least 13 per axis (m = N - 2 >= 11)");
}

}  // namespace

RawVolume read_raw(const VolumeHeader& header, std::span<const std::uint8_t> bytes) {
  check_dims(header);
  if (bytes.size() != header.byte_count())
    throw std::invalid_argument("raw volume size mismatch: expected " + std::to_string(header.byte_count()) +
                                " bytes, got " + std::to_string(bytes.size()));
  RawVolume out;
  out.header = header;
  out.samples = SampleField(DomainGrid(header.cubes(), 1.0));
  if (header.spacing) out.spacing = Point3((*header.spacing)[0], (*header.spacing)[1], (*header.spacing)[2]);
  const bool swap = needs_swap(header.endianness);
  const std::size_t w = dtype_size(header.dtype);
  // Voxel order x fastest matches the sample layout exactly.
  for (std::size_t i = 0; i < out.samples.values.size(); ++i) {
    const std::uint8_t* p = bytes.data() + i * w;
    double v = 0.0;
    switch (header.dtype) {
      case DType::U8: v = *p; break;
      case DType::U16: v = load_scalar<std::uint16_t>(p, swap); break;
      case DType::F32: v = load_scalar<float>(p, swap); break;
      case DType::F64: v = load_scalar<double>(p, swap); break;
    }
    out.samples.values[i] = v;
  }
  return out;
}

RawVolume read_raw_file(const VolumeHeader& header, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_raw(header, bytes);
}

std::vector<std::uint8_t> write_raw(const VolumeHeader& header, const SampleField& samples) {
  if (samples.grid.m != header.cubes()) throw std::invalid_argument("write_raw: header dims do not match samples");
  const bool swap = needs_swap(header.endianness);
  const std::size_t w = dtype_size(header.dtype);
  std::vector<std::uint8_t> out(samples.values.size() * w);
  for (std::size_t i = 0; i < samples.values.size(); ++i) {
    std::uint8_t* p = out.data() + i * w;
    const double v = samples.values[i];
    switch (header.dtype) {
      case DType::U8: *p = static_cast<std::uint8_t>(v); break;
      case DType::U16: store_scalar(p, static_cast<std::uint16_t>(v), swap); break;
      case DType::F32: store_scalar(p, static_cast<float>(v), swap); break;
      case DType::F64: store_scalar(p, v, swap); break;
    }
  }
  return out;
}

void write_raw_file(const VolumeHeader& header, const SampleField& samples, const std::string& path) {
  const auto bytes = write_raw(header, samples);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---- test functions ----------------------------------------------------------

double f1(const Point3& p) {
  constexpr double pi = std::numbers::pi;
  constexpr double b1 = 0.25, b2 = 6.0;
  const double r = std::sqrt(p.x() * p.x() + p.y() * p.y());
  return (1.0 - std::sin(pi * p.z() / 2.0) + b1 * (1.0 + std::cos(2.0 * pi * b2 * std::cos(pi * r / 2.0)))) /
         (2.0 * (1.0 + b1));
}

double f2(const Point3& p) {
  const double x = p.x(), y = p.y(), z = p.z();
  auto sq = [](double v) { return v * v; };
  return 0.5 * std::exp(-10.0 * (sq(x - 0.25) + sq(y - 0.25))) +
         0.75 * std::exp(-16.0 * (sq(x - 0.5) + sq(y - 0.25) + sq(z - 0.25))) +
         0.5 * std::exp(-10.0 * (sq(x - 0.75) + sq(y - 0.125) + sq(z - 0.5))) -
         0.25 * std::exp(-20.0 * (sq(x - 0.75) + sq(y - 0.75)));
}

double f3(const Point3& p) { return std::tanh(9.0 * (p.z() - p.x() - p.y()) + 1.0) / 9.0; }

const std::vector<std::string>& test_function_ids() {
  static const std::vector<std::string> ids{"f1", "f2", "f3"};
  return ids;
}

const TestFunction& test_function(std::string_view id) {
  static const std::vector<TestFunction> fns{
      {"f1", -1.0, 1.0, f1}, {"f2", 0.0, 1.0, f2}, {"f3", -0.5, 0.5, f3}};
  for (const auto& f : fns)
    if (f.id == id) return f;
  throw std::invalid_argument("unknown test function '" + std::string(id) + "' (expected f1, f2 or f3)");
}

SampledFunction sample_test_function(std::string_view id, const MultiIndex& m) {
  const TestFunction& fn = test_function(id);
  if ((m.array() < 11).any()) throw std::invalid_argument("sample_test_function: m must be at least 11 per axis");
  if (m.x() != m.y() || m.y() != m.z())
    throw std::invalid_argument("sample_test_function: test domains are cubes, m must be equal on all axes");
  const double h = (fn.hi - fn.lo) / m.x();
  SampledFunction out;
  out.fn = fn;
  out.origin = Point3::Constant(fn.lo);
  const DomainGrid grid(m, h);
  out.samples = sample(grid, [&](const Point3& x) { return fn.f(out.origin + x); });
  return out;
}

}  // namespace boxqi
