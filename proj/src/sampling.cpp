#include "spectral_sdp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "spectral_sdp/errors.hpp"
#include "spectral_sdp/signal_model.hpp"

namespace spectral_sdp {

SelectionPattern SelectionPattern::make(std::vector<std::int64_t> indices, std::int64_t ambient) {
  SelectionPattern p{std::move(indices), ambient};
  p.validate();
  return p;
}

SelectionPattern SelectionPattern::full(std::int64_t n) {
  if (n < 1) throw InvalidInput("full selection needs n >= 1");
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) idx[static_cast<std::size_t>(k)] = k;
  return SelectionPattern{std::move(idx), n};
}

void SelectionPattern::validate() const {
  if (indices.empty()) throw InvalidInput("selection pattern must be nonempty");
  if (ambient < 1) throw InvalidInput("selection pattern ambient size must be >= 1");
  for (std::size_t t = 0; t < indices.size(); ++t) {
    if (indices[t] < 0 || indices[t] >= ambient) {
      throw InvalidInput("selection index " + std::to_string(indices[t]) + " outside [0, " +
                         std::to_string(ambient) + ")");
    }
    if (t > 0 && indices[t] <= indices[t - 1]) {
      throw InvalidInput("selection indices must be strictly increasing");
    }
  }
}

std::size_t PartitionStructure::total_pairs() const {
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size();
  return total;
}

SubsamplingMatrix selection_matrix(const SelectionPattern& pattern) {
  pattern.validate();
  SubsamplingMatrix c = SubsamplingMatrix::Zero(pattern.m(), pattern.ambient);
  for (Eigen::Index t = 0; t < pattern.m(); ++t) c(t, pattern.indices[static_cast<std::size_t>(t)]) = 1.0;
  return c;
}

bool is_admissible_selection(const SelectionPattern& pattern) {
  pattern.validate();
  return pattern.indices.front() == 0;
}

bool is_admissible_general(const SubsamplingMatrix& m, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("is_admissible_general: tol must be positive");
  if (m.rows() == 0 || m.rows() > m.cols()) return false;
  Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return false;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] <= tol * sv[0]) return false;
  }
  // Least-squares solve of M^* c = e_0.
  const ComplexMatrix mh = m.adjoint();
  ComplexVector e0 = ComplexVector::Zero(m.cols());
  e0[0] = 1.0;
  const ComplexVector c = mh.colPivHouseholderQr().solve(e0);
  return (mh * c - e0).norm() < tol;
}

PartitionStructure compute_partition(const SelectionPattern& pattern) {
  pattern.validate();
  const Eigen::Index m = pattern.m();
  const auto& idx = pattern.indices;
  // lag -> block slot, lags bounded by the ambient size.
  std::vector<std::int64_t> present(static_cast<std::size_t>(pattern.ambient), 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) present[static_cast<std::size_t>(idx[j] - idx[i])] = 1;
  }
  PartitionStructure out;
  out.m = m;
  std::vector<std::int64_t> slot(present.size(), -1);
  for (std::size_t k = 0; k < present.size(); ++k) {
    if (present[k]) {
      slot[k] = static_cast<std::int64_t>(out.positive_lags.size());
      out.positive_lags.push_back(static_cast<std::int64_t>(k));
    }
  }
  out.blocks.resize(out.positive_lags.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      out.blocks[static_cast<std::size_t>(slot[static_cast<std::size_t>(idx[j] - idx[i])])].push_back({i, j});
    }
  }
  return out;
}

ComplexVector apply_subsampling(const SubsamplingMatrix& m, const ComplexVector& y_raw) {
  if (m.cols() != y_raw.size()) {
    throw InvalidInput("apply_subsampling: M has " + std::to_string(m.cols()) + " columns, y_raw has " +
                       std::to_string(y_raw.size()) + " entries");
  }
  return m * y_raw;
}

SelectionPattern random_selection(std::int64_t n, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("random_selection: p must lie in (0, 1]");
  if (n < 1) throw InvalidInput("random_selection: n must be >= 1");
  // Each redraw uses a fresh substream derived from the seed.
  std::uint64_t attempt = 0;
  for (;;) {
    GaussianStream stream(seed + 0x9E3779B97F4A7C15ULL * attempt++);
    std::vector<std::int64_t> idx;
    for (std::int64_t k = 0; k < n; ++k) {
      if (stream.uniform() < p) idx.push_back(k);
    }
    if (!idx.empty()) return SelectionPattern{std::move(idx), n};
  }
}

NormalizedPattern normalize_to_admissible(const SelectionPattern& pattern) {
  pattern.validate();
  const std::int64_t k0 = pattern.indices.front();
  NormalizedPattern out{pattern, k0};
  for (auto& v : out.pattern.indices) v -= k0;
  return out;
}

SpectrumEstimate phase_unshift(SpectrumEstimate estimate, std::int64_t k0, double f) {
  if (k0 == 0) return estimate;
  for (std::size_t r = 0; r < estimate.freqs.size(); ++r) {
    const double t = static_cast<double>(k0) * estimate.freqs[r] / f;
    estimate.amps[r] *= std::polar(1.0, -kTwoPi * (t - std::floor(t)));
  }
  return estimate;
}

}  // namespace spectral_sdp
