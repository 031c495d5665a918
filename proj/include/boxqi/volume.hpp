#pragma once

// Raw volume ingestion and the analytic test functions.

#include "boxqi/samples.hpp"
#include "boxqi/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace boxqi {

enum class DType { U8, U16, F32, F64 };
enum class Endian { Little, Big };

std::size_t dtype_size(DType t);
std::string to_string(DType t);
DType parse_dtype(std::string_view s);

struct VolumeHeader {
  std::array<int, 3> dims{0, 0, 0};
  DType dtype = DType::U8;
  Endian endianness = Endian::Little;
  std::optional<std::array<double, 3>> spacing;

  std::uint64_t voxel_count() const {
    return static_cast<std::uint64_t>(dims[0]) * dims[1] * dims[2];
  }
  std::uint64_t byte_count() const { return voxel_count() * dtype_size(dtype); }
  /// Cube counts m = N - 2.
  MultiIndex cubes() const { return {dims[0] - 2, dims[1] - 2, dims[2] - 2}; }
};

/// JSON sidecar {"dims": [..], "dtype": "u16", "endianness": "little", "spacing": [..]}.
std::string header_to_json(const VolumeHeader& h);
VolumeHeader header_from_json(std::string_view text);
VolumeHeader read_sidecar(const std::string& path);
void write_sidecar(const VolumeHeader& h, const std::string& path);

struct RawVolume {
  VolumeHeader header;
  SampleField samples;  // grid m = N - 2, h = 1; voxel (i,j,k) is data index (i,j,k)
  Point3 spacing = Point3::Ones();
};

RawVolume read_raw(const VolumeHeader& header, std::span<const std::uint8_t> bytes);
RawVolume read_raw_file(const VolumeHeader& header, const std::string& path);

/// Inverse of read_raw; values are cast back to the header dtype.
std::vector<std::uint8_t> write_raw(const VolumeHeader& header, const SampleField& samples);
void write_raw_file(const VolumeHeader& header, const SampleField& samples, const std::string& path);

// ---- test functions -------------------------------------------------------

struct TestFunction {
  std::string id;
  double lo = 0.0, hi = 1.0;  // domain [lo, hi]^3
  std::function<double(const Point3&)> f;
};

double f1(const Point3& p);  // Marschner-Lobb, beta1 = 1/4, beta2 = 6, on [-1,1]^3
double f2(const Point3& p);  // Franke type, on [0,1]^3
double f3(const Point3& p);  // tanh ridge, on [-1/2,1/2]^3

const TestFunction& test_function(std::string_view id);
const std::vector<std::string>& test_function_ids();

struct SampledFunction {
  TestFunction fn;
  SampleField samples;  // on [0, m h]^3 with h = (hi - lo) / m
  Point3 origin;        // physical point of the domain origin, (lo, lo, lo)
};

SampledFunction sample_test_function(std::string_view id, const MultiIndex& m);
inline SampledFunction sample_test_function(std::string_view id, int m) {
  return sample_test_function(id, MultiIndex::Constant(m));
}

}  // namespace boxqi
