#pragma once

#include <cstdint>
#include <vector>

#include "spectral_sdp/estimate.hpp"
#include "spectral_sdp/types.hpp"

namespace spectral_sdp {

/// Observed index set I of a length-n uniform acquisition.
struct SelectionPattern {
  std::vector<std::int64_t> indices;  // strictly increasing, within [0, n)
  std::int64_t ambient = 0;           // n

  /// Validating constructor; throws InvalidInput.
  static SelectionPattern make(std::vector<std::int64_t> indices, std::int64_t ambient);
  static SelectionPattern full(std::int64_t n);

  Eigen::Index m() const { return static_cast<Eigen::Index>(indices.size()); }
  void validate() const;
};

/// Position (row, col) of an entry of an m x m matrix; 0-based.
struct IndexPair {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// The blocks J_k = {(i, j) : I[j] - I[i] = k} for every nonnegative lag k
/// in I - I. positive_lags is ascending, so blocks[0] is always the diagonal.
struct PartitionStructure {
  Eigen::Index m = 0;
  std::vector<std::int64_t> positive_lags;
  std::vector<std::vector<IndexPair>> blocks;

  std::size_t size() const { return positive_lags.size(); }
  std::size_t total_pairs() const;
};

using SubsamplingMatrix = ComplexMatrix;

/// C_I, rows e_{I[t]}^T in ascending index order.
SubsamplingMatrix selection_matrix(const SelectionPattern& pattern);

bool is_admissible_selection(const SelectionPattern& pattern);

/// Full row rank (singular values above tol * sigma_max) and e_0 in
/// range(M^*) (least-squares residual below tol).
bool is_admissible_general(const SubsamplingMatrix& m, double tol = 1e-10);

PartitionStructure compute_partition(const SelectionPattern& pattern);

ComplexVector apply_subsampling(const SubsamplingMatrix& m, const ComplexVector& y_raw);

/// Bernoulli(p) selection of {0..n-1}; redraws on an empty outcome.
SelectionPattern random_selection(std::int64_t n, double p, std::uint64_t seed);

struct NormalizedPattern {
  SelectionPattern pattern;
  std::int64_t shift = 0;  // k_0 = min I
};

NormalizedPattern normalize_to_admissible(const SelectionPattern& pattern);

/// Undo the k_0-sample time shift: alpha_r *= e^{-i 2 pi (k_0 / f) xi_r}.
SpectrumEstimate phase_unshift(SpectrumEstimate estimate, std::int64_t k0, double f);

}  // namespace spectral_sdp
