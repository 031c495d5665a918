#pragma once

#include <Eigen/Core>

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <functional>

namespace boxqi {

using MultiIndex = Eigen::Vector3i;
using Point3 = Eigen::Vector3d;

// Exact rational scalar. Expression templates are off so the type drops into
// Eigen containers and generic code without surprises.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

struct MultiIndexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
  }
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& a) const noexcept {
    std::uint64_t k = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a.x())) << 42) ^
                      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a.y())) << 21) ^
                      static_cast<std::uint64_t>(static_cast<std::uint32_t>(a.z()));
    return std::hash<std::uint64_t>{}(k);
  }
};

}  // namespace boxqi
