#include "spectral_sdp/multirate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "spectral_sdp/errors.hpp"

namespace spectral_sdp {

namespace {

constexpr double kSeparationConstant = 2.52;
constexpr std::int64_t kMinGridLength = 2000;

}  // namespace

void Grid::validate() const {
  if (f.num() <= 0) throw InvalidInput("grid rate must be positive, got " + f.to_string());
  if (n < 1) throw InvalidInput("grid length must be >= 1");
}

void MultirateSystem::validate() const {
  if (grids.empty()) throw InvalidInput("multirate system needs at least one grid");
  for (const auto& g : grids) g.validate();
}

std::int64_t MultirateSystem::total_samples() const {
  std::int64_t total = 0;
  for (const auto& g : grids) total = checked_add(total, g.n);
  return total;
}

CommonGridSearch find_common_grid(const MultirateSystem& system, CommonGridLimits limits) {
  system.validate();
  const auto& grids = system.grids;
  const std::size_t p = grids.size();

  // Smallest rate that every f_j divides.
  Rational f_base = grids[0].f;
  for (std::size_t j = 1; j < p; ++j) f_base = rational_lcm(f_base, grids[j].f);

  std::vector<std::int64_t> l_base(p);
  std::vector<Rational> shifted(p);  // l_j gamma_j at the base rate
  for (std::size_t j = 0; j < p; ++j) {
    const Rational ratio = f_base / grids[j].f;
    if (!ratio.is_integer()) throw InvariantViolation("lcm of grid rates is not a common multiple");
    l_base[j] = ratio.num();
    shifted[j] = Rational(l_base[j]) * grids[j].gamma;
  }

  // The l_j gamma_j must differ by integers; the smallest rate multiplier
  // achieving it is the lcm of the denominators of the differences.
  std::int64_t multiplier = 1;
  for (std::size_t j = 1; j < p; ++j) multiplier = checked_lcm(multiplier, (shifted[j] - shifted[0]).den());

  CommonGrid cg;
  cg.f0 = f_base * Rational(multiplier);
  cg.expansions.resize(p);
  Rational gamma0 = Rational(multiplier) * shifted[0];
  for (std::size_t j = 1; j < p; ++j) gamma0 = std::max(gamma0, Rational(multiplier) * shifted[j]);
  cg.gamma0 = gamma0;
  for (std::size_t j = 0; j < p; ++j) {
    const Rational a = Rational(multiplier) * shifted[j] - gamma0;
    if (!a.is_integer()) throw InvariantViolation("grid expansion offset is not an integer");
    cg.expansions[j] = {checked_mul(l_base[j], multiplier), a.num()};
  }

  // Minimality: gcd({a_j} u {l_j}) = 1.
  std::int64_t g = 0;
  for (const auto& e : cg.expansions) g = checked_gcd(checked_gcd(g, e.l), e.a);
  if (g > 1) {
    cg.f0 = cg.f0 / Rational(g);
    cg.gamma0 = cg.gamma0 / Rational(g);
    for (auto& e : cg.expansions) {
      e.l /= g;
      e.a /= g;
    }
  }

  std::int64_t last = 0;
  for (std::size_t j = 0; j < p; ++j) {
    last = std::max(last, checked_add(checked_mul(cg.expansions[j].l, grids[j].n - 1), -cg.expansions[j].a));
  }
  cg.n0 = checked_add(last, 1);

  if (cg.n0 > limits.max_n0) {
    CommonGridSearch out;
    if (multiplier > 1) {
      out.violated_condition =
          "delay integrality: l_j*gamma_j - l_k*gamma_k is not an integer at rate " + f_base.to_string() +
          "; restoring it needs rate multiplier " + std::to_string(multiplier) + " and n0 = " +
          std::to_string(cg.n0) + " > limit " + std::to_string(limits.max_n0);
    } else {
      out.violated_condition = "grid size: minimal n0 = " + std::to_string(cg.n0) + " exceeds limit " +
                               std::to_string(limits.max_n0);
    }
    return out;
  }

  ObservationSet obs = observation_set(system, cg);
  cg.observation_set = std::move(obs.pattern);
  cg.duplicate_groups = std::move(obs.duplicate_groups);
  return CommonGridSearch{std::move(cg), {}};
}

std::optional<CommonGrid> common_grid(const MultirateSystem& system, CommonGridLimits limits) {
  return find_common_grid(system, limits).grid;
}

ObservationSet observation_set(const MultirateSystem& system, const CommonGrid& cg) {
  if (cg.expansions.size() != system.grids.size()) {
    throw InvariantViolation("common grid expansions do not match the system");
  }
  std::map<std::int64_t, std::vector<SampleOrigin>> by_index;
  for (std::size_t j = 0; j < system.grids.size(); ++j) {
    const auto& e = cg.expansions[j];
    for (std::int64_t k = 0; k < system.grids[j].n; ++k) {
      const std::int64_t q = checked_add(checked_mul(e.l, k), -e.a);
      if (q < 0 || q >= cg.n0) {
        throw InvariantViolation("net index " + std::to_string(q) + " outside [0, " + std::to_string(cg.n0) +
                                 ")");
      }
      by_index[q].push_back({j, k});
    }
  }
  ObservationSet out;
  out.pattern.ambient = cg.n0;
  for (auto& [q, origins] : by_index) {
    out.pattern.indices.push_back(q);
    out.duplicate_groups.push_back(std::move(origins));
  }
  return out;
}

ComplexVector align_measurements(const MultirateSystem& system, const std::vector<ComplexVector>& per_grid,
                                 const CommonGrid& cg) {
  if (per_grid.size() != system.grids.size()) {
    throw InvalidInput("expected " + std::to_string(system.grids.size()) + " sample vectors, got " +
                       std::to_string(per_grid.size()));
  }
  for (std::size_t j = 0; j < per_grid.size(); ++j) {
    if (per_grid[j].size() != system.grids[j].n) {
      throw InvalidInput("grid " + std::to_string(j) + " expects " + std::to_string(system.grids[j].n) +
                         " samples, got " + std::to_string(per_grid[j].size()));
    }
  }
  ComplexVector y(static_cast<Eigen::Index>(cg.duplicate_groups.size()));
  for (std::size_t t = 0; t < cg.duplicate_groups.size(); ++t) {
    Complex acc = 0.0;
    for (const auto& o : cg.duplicate_groups[t]) acc += per_grid[o.grid][o.k];
    y[static_cast<Eigen::Index>(t)] = acc / static_cast<double>(cg.duplicate_groups[t].size());
  }
  return y;
}

SpectrumEstimate unshift_spectrum(SpectrumEstimate estimate, const CommonGrid& cg) {
  if (cg.gamma0.num() == 0) return estimate;
  const double delay = (cg.gamma0 / cg.f0).to_double();
  for (std::size_t r = 0; r < estimate.freqs.size(); ++r) {
    const double t = delay * estimate.freqs[r];
    estimate.amps[r] *= std::polar(1.0, kTwoPi * (t - std::floor(t)));
  }
  return estimate;
}

namespace {

bool grid_separation_ok(const Grid& grid, const SpikeSpectrum& spec) {
  if (grid.n <= kMinGridLength) return false;
  if (spec.s() < 2) return true;
  const double fj = grid.f.to_double();
  const auto reduced = spec.reduced(fj);
  return torus_separation(reduced) >= kSeparationConstant / static_cast<double>(grid.n - 1);
}

}  // namespace

bool check_strong_condition(const MultirateSystem& system, const SpikeSpectrum& spec) {
  system.validate();
  spec.validate();
  return std::all_of(system.grids.begin(), system.grids.end(),
                     [&](const Grid& g) { return grid_separation_ok(g, spec); });
}

std::optional<std::size_t> check_weak_condition(const MultirateSystem& system, const SpikeSpectrum& spec,
                                                std::int64_t m, const CommonGrid& cg) {
  system.validate();
  spec.validate();
  if (cg.expansions.size() != system.grids.size()) {
    throw InvalidInput("common grid does not belong to this system");
  }
  const auto s = static_cast<std::int64_t>(spec.s());
  for (std::size_t j = 0; j < system.grids.size(); ++j) {
    if (grid_separation_ok(system.grids[j], spec) && m >= (cg.expansions[j].l + 1) * s) return j;
  }
  return std::nullopt;
}

bool random_bound_report(std::int64_t n, std::int64_t m, std::int64_t s, double delta, double c) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  if (!(c > 0.0)) throw InvalidInput("C must be positive");
  if (n < 1 || s < 1) throw InvalidInput("n and s must be >= 1");
  const double log_n = std::log(static_cast<double>(n) / delta);
  const double log_s = std::log(static_cast<double>(s) / delta);
  const double bound = c * std::max(log_n * log_n, static_cast<double>(s) * log_s * log_n);
  return static_cast<double>(m) >= bound;
}

ComplexityReport complexity_report(const MultirateSystem& system, const CommonGrid& cg) {
  ComplexityReport r;
  r.n0 = cg.n0;
  r.m_tilde = system.total_samples();
  r.m = cg.observation_set.m();
  r.ratio = static_cast<double>(r.m) / static_cast<double>(r.n0);
  return r;
}

}  // namespace spectral_sdp
