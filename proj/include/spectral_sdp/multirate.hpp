#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spectral_sdp/estimate.hpp"
#include "spectral_sdp/grid.hpp"
#include "spectral_sdp/sampling.hpp"
#include "spectral_sdp/signal_model.hpp"

namespace spectral_sdp {

/// Expansion of one grid onto the common grid: f0 = l f_j and
/// gamma0 = l gamma_j - a, so sample k lands on common index l k - a.
struct GridExpansion {
  std::int64_t l = 1;
  std::int64_t a = 0;
};

/// Sample k of grid `grid`.
struct SampleOrigin {
  std::size_t grid = 0;
  std::int64_t k = 0;
  friend bool operator==(const SampleOrigin&, const SampleOrigin&) = default;
};

struct CommonGrid {
  Rational f0;
  Rational gamma0;
  std::int64_t n0 = 0;
  std::vector<GridExpansion> expansions;
  SelectionPattern observation_set;
  /// One group per net index, in ascending index order; groups of size > 1
  /// are time instants acquired more than once.
  std::vector<std::vector<SampleOrigin>> duplicate_groups;
};

/// Limit on the size of the minimal grid. With exact rational inputs a
/// common grid always exists for a large enough rate, so "no common grid"
/// means none with n0 <= max_n0.
struct CommonGridLimits {
  std::int64_t max_n0 = std::int64_t{1} << 20;
};

struct CommonGridSearch {
  std::optional<CommonGrid> grid;
  std::string violated_condition;  // empty when a grid was found
};

/// Minimal common supporting grid with its observation set, or a named
/// reason why none exists within the limits. Throws CapacityError when the
/// exact parameters overflow 64 bits.
CommonGridSearch find_common_grid(const MultirateSystem& system, CommonGridLimits limits = {});
std::optional<CommonGrid> common_grid(const MultirateSystem& system, CommonGridLimits limits = {});

struct ObservationSet {
  SelectionPattern pattern;
  std::vector<std::vector<SampleOrigin>> duplicate_groups;
};

/// Net indices l_j k - a_j of every sample, deduplicated and sorted.
ObservationSet observation_set(const MultirateSystem& system, const CommonGrid& cg);

/// Net measurement vector in ascending net-index order; coinciding samples
/// are averaged.
ComplexVector align_measurements(const MultirateSystem& system, const std::vector<ComplexVector>& per_grid,
                                 const CommonGrid& cg);

/// alpha_r *= e^{i 2 pi (gamma0 / f0) xi_r}.
SpectrumEstimate unshift_spectrum(SpectrumEstimate estimate, const CommonGrid& cg);

/// Separation >= 2.52 / (n_j - 1) with n_j > 2000 on every grid.
bool check_strong_condition(const MultirateSystem& system, const SpikeSpectrum& spec);

/// First j with separation >= 2.52 / (n_j - 1), n_j > 2000 and m >= (l_j + 1) s.
std::optional<std::size_t> check_weak_condition(const MultirateSystem& system, const SpikeSpectrum& spec,
                                                std::int64_t m, const CommonGrid& cg);

/// m >= C max{log^2(n/delta), s log(s/delta) log(n/delta)}.
bool random_bound_report(std::int64_t n, std::int64_t m, std::int64_t s, double delta, double c);

struct ComplexityReport {
  std::int64_t n0 = 0;
  std::int64_t m_tilde = 0;
  std::int64_t m = 0;
  double ratio = 0.0;  // m / n0
};

ComplexityReport complexity_report(const MultirateSystem& system, const CommonGrid& cg);

}  // namespace spectral_sdp
