#pragma once

// Coefficient functionals lambda_alpha of the near-best quasi-interpolant.
//
// The canonical functionals (classes near the origin corner and the x-edge)
// are embedded as exact rationals. Every other alpha is served by shifting a
// canonical functional along its clamped axes and mapping it through the box
// symmetry returned by classify().

#include "boxqi/domain.hpp"
#include "boxqi/samples.hpp"
#include "boxqi/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace boxqi {

struct StencilEntry {
  MultiIndex beta;  // data index in the canonical frame
  Rational weight;
  double weight_value = 0.0;
};

struct Stencil {
  ClassKey key;
  int n = 0;                   // octahedron radius the weights were optimised on
  double published_l1 = 0.0;   // l1 norm as listed with the weights
  std::vector<StencilEntry> entries;
  bool rederived = false;      // weights replaced by a fresh l1 solve

  Rational l1() const;
  double l1_value() const { return l1().convert_to<double>(); }
};

/// Residual of the exactness system V sigma - b for a canonical stencil,
/// computed exactly (h = 1, data points of a grid large enough that the far
/// faces are never reached).
std::vector<Rational> exactness_residual(const Stencil& s);
bool is_exact(const Stencil& s);

class StencilLibrary {
 public:
  const Stencil& at(const ClassKey& key) const;
  bool contains(const ClassKey& key) const { return stencils_.count(key) != 0; }
  const std::map<ClassKey, Stencil>& all() const { return stencils_; }
  std::size_t size() const { return stencils_.size(); }
  /// Classes whose printed weights failed validation and were re-derived.
  const std::vector<std::string>& substitutions() const { return substitutions_; }

  void insert(Stencil s) { stencils_[s.key] = std::move(s); }
  void note_substitution(std::string msg) { substitutions_.push_back(std::move(msg)); }

 private:
  std::map<ClassKey, Stencil> stencils_;
  std::vector<std::string> substitutions_;
};

/// The transcribed tables, without validation.
StencilLibrary transcribed_library();

/// Transcribed tables, validated for exactness; any failing class is
/// re-derived by an l1 solve on the same support and noted.
const StencilLibrary& library();

struct FunctionalEntry {
  MultiIndex beta;  // data index in the domain frame
  double weight = 0.0;
};
using Functional = std::vector<FunctionalEntry>;

/// Concrete functional for alpha on this grid.
Functional instantiate(const MultiIndex& alpha, const DomainGrid& grid,
                       const StencilLibrary& lib = library());

/// Exact-weight variant, for rational audits.
std::vector<std::pair<MultiIndex, Rational>> instantiate_exact(const MultiIndex& alpha,
                                                               const DomainGrid& grid,
                                                               const StencilLibrary& lib = library());

/// lambda(f) = sum sigma(beta) f_beta.
double apply(const Functional& functional, const SampleField& samples);

/// max over classes of ||sigma||_1, an upper bound of ||Q||_inf.
double norm_bound(const StencilLibrary& lib = library());

}  // namespace boxqi
