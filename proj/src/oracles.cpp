#include "spectral_sdp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Sparse>

#include "spectral_sdp/errors.hpp"

namespace spectral_sdp::oracles {

std::optional<GridCandidate> brute_force_common_grid(const MultirateSystem& system, std::int64_t n_max,
                                                     std::int64_t budget) {
  if (n_max < 1 || n_max > 256) throw InvalidInput("brute_force_common_grid: n_max must lie in [1, 256]");
  if (system.grids.empty()) throw InvalidInput("empty system");
  const Grid& first = system.grids.front();
  std::optional<GridCandidate> best;
  std::int64_t evaluated = 0;
  for (std::int64_t mult = 1; mult <= n_max; ++mult) {
    const Rational f = first.f * Rational(mult);
    // Every sampler rate must divide f.
    bool rates_ok = true;
    for (const auto& g : system.grids) rates_ok = rates_ok && (f / g.f).is_integer();
    if (!rates_ok) continue;
    for (std::int64_t q0 = 0; q0 < n_max; ++q0) {
      if (++evaluated > budget) {
        throw BudgetExhausted("brute_force_common_grid: more than " + std::to_string(budget) + " candidates");
      }
      // Sample 0 of grid 0 at index q0: -gamma_1/f_1 = (q0 - gamma)/f.
      const Rational gamma = Rational(q0) + f * first.gamma / first.f;
      std::int64_t lo = std::numeric_limits<std::int64_t>::max();
      std::int64_t hi = std::numeric_limits<std::int64_t>::min();
      bool ok = true;
      for (const auto& g : system.grids) {
        for (std::int64_t k = 0; k < g.n && ok; ++k) {
          // (k - gamma_j)/f_j = (q - gamma)/f  =>  q = f (k - gamma_j)/f_j + gamma.
          const Rational q = f * (Rational(k) - g.gamma) / g.f + gamma;
          if (!q.is_integer()) {
            ok = false;
          } else {
            lo = std::min(lo, q.num());
            hi = std::max(hi, q.num());
          }
        }
        if (!ok) break;
      }
      if (!ok || lo < 0) continue;
      const std::int64_t n = hi + 1;
      if (n > n_max) continue;
      if (!best || n < best->n) best = GridCandidate{f, gamma, n};
    }
  }
  return best;
}

PartitionStructure brute_force_partition(const SelectionPattern& pattern) {
  pattern.validate();
  const auto n = static_cast<Eigen::Index>(pattern.ambient);
  const Eigen::Index m = pattern.m();
  using Sparse = Eigen::SparseMatrix<double>;
  Sparse c(m, n);
  for (Eigen::Index t = 0; t < m; ++t) c.insert(t, pattern.indices[static_cast<std::size_t>(t)]) = 1.0;
  const Sparse ct = c.transpose();
  PartitionStructure out;
  out.m = m;
  for (Eigen::Index k = 0; k < n; ++k) {
    Sparse theta(n, n);
    for (Eigen::Index i = 0; i + k < n; ++i) theta.insert(i, i + k) = 1.0;
    const Sparse mk = c * theta * ct;
    std::vector<IndexPair> support;
    for (Eigen::Index col = 0; col < mk.outerSize(); ++col) {
      for (Sparse::InnerIterator it(mk, col); it; ++it) {
        if (it.value() != 0.0) support.push_back({it.row(), it.col()});
      }
    }
    if (support.empty()) continue;
    std::sort(support.begin(), support.end());
    out.positive_lags.push_back(k);
    out.blocks.push_back(std::move(support));
  }
  return out;
}

double brute_force_sup_norm(const ComplexVector& q, std::int64_t points) {
  if (points < 100'000) throw InvalidInput("brute_force_sup_norm: needs at least 1e5 points");
  double best = 0.0;
  for (std::int64_t t = 0; t < points; ++t) {
    const double nu = static_cast<double>(t) / static_cast<double>(points);
    Complex acc = 0.0;
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      acc += q[k] * std::polar(1.0, 2.0 * M_PI * std::fmod(nu * static_cast<double>(k), 1.0));
    }
    best = std::max(best, std::abs(acc));
  }
  return best;
}

bool finite_perturbation_check(const std::function<double(const RealVector&)>& objective, const RealVector& point,
                               int directions, double step, std::uint64_t seed, double slack) {
  if (!(step > 0.0)) throw InvalidInput("finite_perturbation_check: step must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double base = objective(point);
  for (int d = 0; d < directions; ++d) {
    RealVector dir(point.size());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = normal(rng);
    dir.normalize();
    if (base > objective(point + step * dir) + slack) return false;
  }
  return true;
}

}  // namespace spectral_sdp::oracles
