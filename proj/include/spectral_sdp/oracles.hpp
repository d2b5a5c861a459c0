#pragma once

// Slow reference implementations for tests. They share data types with the
// library but none of its algorithms.

#include <cstdint>
#include <functional>
#include <optional>

#include "spectral_sdp/grid.hpp"
#include "spectral_sdp/sampling.hpp"
#include "spectral_sdp/types.hpp"

namespace spectral_sdp::oracles {

struct GridCandidate {
  Rational f;
  Rational gamma;
  std::int64_t n = 0;
};

/// Exhaustive search over rates f = L f_1 (L <= n_max) and offsets placing
/// the first sample of grid 0 at every index below n_max; checks the subset
/// condition exactly on each candidate. Returns the smallest n, or nullopt
/// when no grid with n <= n_max exists. Throws BudgetExhausted when more
/// than `budget` candidates would be evaluated.
std::optional<GridCandidate> brute_force_common_grid(const MultirateSystem& system, std::int64_t n_max,
                                                     std::int64_t budget = 10'000'000);

/// Supports of every C Theta_k C^T, built by explicit (sparse) triple
/// products, k = 0..n-1; empty ones dropped.
PartitionStructure brute_force_partition(const SelectionPattern& pattern);

/// max |Q| over `points` uniform samples (points >= 1e5).
double brute_force_sup_norm(const ComplexVector& q, std::int64_t points = 1'000'000);

/// True iff objective(point) <= objective(point + step d) + slack for
/// `directions` random unit directions d (seeded, deterministic).
bool finite_perturbation_check(const std::function<double(const RealVector&)>& objective, const RealVector& point,
                               int directions, double step, std::uint64_t seed = 1,
                               double slack = 1e-12);

}  // namespace spectral_sdp::oracles
