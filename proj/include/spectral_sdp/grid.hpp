#pragma once

#include <cstdint>
#include <vector>

#include "spectral_sdp/rational.hpp"

namespace spectral_sdp {

/// Uniform sampler acquiring n samples at instants (k - gamma) / f.
struct Grid {
  Rational f;      // Hz, > 0
  Rational gamma;  // delay in sample units
  std::int64_t n = 0;

  void validate() const;
};

struct MultirateSystem {
  std::vector<Grid> grids;

  void validate() const;
  /// Total number of acquired samples (with overlaps).
  std::int64_t total_samples() const;
};

}  // namespace spectral_sdp
