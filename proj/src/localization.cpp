#include "spectral_sdp/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "spectral_sdp/errors.hpp"
#include "spectral_sdp/trig_ops.hpp"

namespace spectral_sdp {

namespace {

constexpr int kNewtonMaxIter = 50;
constexpr double kPlateauFraction = 0.10;
constexpr double kMaxCondition = 1e12;

double circular_distance(double a, double b) {
  const double d = std::abs(wrap_unit(a) - wrap_unit(b));
  return std::min(d, 1.0 - d);
}

struct Refined {
  double nu;
  double g;
  bool ok;
};

// Newton on g'(nu) = 0 with g = |Q|^2.
Refined refine_peak(const ComplexVector& q, double nu0, double bracket) {
  double nu = nu0;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const PolyJet jet = poly_eval_jet(q, nu);
    const double g1 = 2.0 * std::real(std::conj(jet.value) * jet.d1);
    const double g2 = 2.0 * (std::norm(jet.d1) + std::real(std::conj(jet.value) * jet.d2));
    if (!(g2 < 0.0)) break;
    const double step = -g1 / g2;
    nu += step;
    if (std::abs(nu - nu0) > bracket) break;
    if (std::abs(step) < 1e-12) return {wrap_unit(nu), std::norm(poly_eval(q, nu)), true};
  }
  return {wrap_unit(nu0), std::norm(poly_eval(q, nu0)), false};
}

}  // namespace

ComplexVector dual_polynomial(const ComplexVector& c, const SubsamplingMatrix& m) {
  if (c.size() != m.rows()) {
    throw InvalidInput("dual_polynomial: c has length " + std::to_string(c.size()) + " but M has " +
                       std::to_string(m.rows()) + " rows");
  }
  return m.adjoint() * c;
}

LocatedPeaks locate_frequencies(const ComplexVector& q, double f, Eigen::Index grid_points, double peak_tol) {
  const Eigen::Index n = q.size();
  if (n == 0) throw InvalidInput("locate_frequencies: empty polynomial");
  if (grid_points < 8 * n) {
    throw InvalidInput("locate_frequencies: grid_points must be >= 8n = " + std::to_string(8 * n));
  }
  if (!(peak_tol > 0.0 && peak_tol < 1.0)) throw InvalidInput("peak_tol must lie in (0, 1)");
  if (!(f > 0.0)) throw InvalidInput("sampling frequency must be positive");

  const double threshold = (1.0 - peak_tol) * (1.0 - peak_tol);
  RealVector g = modulus_on_grid(q, grid_points).array().square();
  const Eigen::Index above = (g.array() >= threshold).count();
  if (static_cast<double>(above) >= kPlateauFraction * static_cast<double>(grid_points)) {
    throw DegeneratePolynomial("dual polynomial has |Q| >= 1 - peak_tol on " + std::to_string(above) + " of " +
                               std::to_string(grid_points) + " grid points; no finite support");
  }

  const double step = 1.0 / static_cast<double>(grid_points);
  LocatedPeaks out;
  std::vector<std::pair<double, double>> peaks;  // (nu, |Q|)
  for (Eigen::Index t = 0; t < grid_points; ++t) {
    const double prev = g[(t + grid_points - 1) % grid_points];
    const double next = g[(t + 1) % grid_points];
    if (!(g[t] >= prev && g[t] > next)) continue;
    // Grid values can sit well below the refined maximum on an 8n grid.
    if (g[t] < 0.5 * threshold) continue;
    const Refined r = refine_peak(q, step * static_cast<double>(t), step);
    if (!r.ok) out.newton_fallback = true;
    if (r.g < threshold) continue;
    const bool duplicate = std::any_of(peaks.begin(), peaks.end(), [&](const auto& p) {
      return circular_distance(p.first, r.nu) < 0.25 * step;
    });
    if (!duplicate) peaks.emplace_back(r.nu, std::sqrt(r.g));
  }
  std::sort(peaks.begin(), peaks.end());
  for (const auto& [nu, mod] : peaks) {
    out.freqs.push_back(nu * f);
    out.moduli.push_back(mod);
  }
  return out;
}

AmplitudeFit recover_amplitudes(const ComplexVector& y, const SubsamplingMatrix& m,
                                const std::vector<double>& freqs, double f) {
  if (y.size() != m.rows()) throw InvalidInput("recover_amplitudes: y and M disagree on m");
  if (static_cast<Eigen::Index>(freqs.size()) > m.rows()) {
    throw InvalidInput("recover_amplitudes: more frequencies than observations");
  }
  AmplitudeFit fit;
  if (freqs.empty()) {
    fit.residual = y.norm();
    return fit;
  }
  const Eigen::Index n = m.cols();
  const auto s = static_cast<Eigen::Index>(freqs.size());
  ComplexMatrix v(n, s);
  for (Eigen::Index r = 0; r < s; ++r) {
    const double nu = freqs[static_cast<std::size_t>(r)] / f;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double t = nu * static_cast<double>(k);
      v(k, r) = std::polar(1.0, kTwoPi * (t - std::floor(t)));
    }
  }
  const ComplexMatrix a = m * v;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const auto& sv = svd.singularValues();
  const double cond = sv[s - 1] > 0.0 ? sv[0] / sv[s - 1] : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxCondition)) {
    std::size_t worst = 0;
    double gap = 1.0;
    for (std::size_t r = 0; r + 1 < freqs.size(); ++r) {
      const double d = circular_distance(freqs[r] / f, freqs[r + 1] / f);
      if (d < gap) {
        gap = d;
        worst = r;
      }
    }
    std::ostringstream msg;
    msg << "recover_amplitudes: condition number " << cond << " exceeds " << kMaxCondition;
    if (freqs.size() > 1) {
      msg << "; nearest frequencies " << freqs[worst] << " and " << freqs[worst + 1] << " Hz";
    }
    throw ConditioningError(msg.str());
  }
  const ComplexVector alpha = a.colPivHouseholderQr().solve(y);
  fit.amps.assign(alpha.data(), alpha.data() + alpha.size());
  fit.residual = (y - a * alpha).norm();
  return fit;
}

CertificateReport verify_certificate(const ComplexVector& q, const SpikeSpectrum& spec, double f, double tol,
                                     Eigen::Index grid_points) {
  spec.validate();
  const Eigen::Index n = q.size();
  if (grid_points == 0) grid_points = 32 * std::max<Eigen::Index>(n, 1);
  CertificateReport rep;
  bool interpolates = true;
  const auto reduced = spec.reduced(f);
  for (std::size_t r = 0; r < spec.s(); ++r) {
    const Complex target = std::conj(spec.amps[r] / std::abs(spec.amps[r]));
    const double err = std::abs(poly_eval(q, reduced[r]) - target);
    rep.interp_errors.push_back(err);
    if (!(err <= tol)) interpolates = false;
  }
  const double radius = 1.0 / (8.0 * static_cast<double>(n));
  double worst = 0.0;
  const double step = 1.0 / static_cast<double>(grid_points);
  for (Eigen::Index t = 0; t < grid_points; ++t) {
    const double nu = step * static_cast<double>(t);
    const bool near = std::any_of(reduced.begin(), reduced.end(),
                                  [&](double xr) { return circular_distance(nu, xr) < radius; });
    if (!near) worst = std::max(worst, std::abs(poly_eval(q, nu)));
  }
  rep.strict_margin = 1.0 - worst;
  rep.is_certificate = interpolates && rep.strict_margin > 0.0;
  return rep;
}

namespace {

void localize(EstimateResult& out, const ComplexVector& y, double f, const EstimateOptions& options) {
  const SubsamplingMatrix m = selection_matrix(out.pattern);
  SpectrumEstimate& est = out.estimate;
  est.dual_poly = dual_polynomial(out.report.c_star, m);
  const Eigen::Index grid_points = std::max<Eigen::Index>(8, options.grid_factor) * m.cols();
  est.diagnostics.sup_norm = dense_sup_norm(est.dual_poly, grid_points);
  LocatedPeaks peaks = locate_frequencies(est.dual_poly, f, grid_points, options.peak_tol);
  est.diagnostics.newton_fallback = peaks.newton_fallback;
  if (static_cast<Eigen::Index>(peaks.freqs.size()) > m.rows()) {
    // Keep the m strongest peaks.
    std::vector<std::size_t> order(peaks.freqs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return peaks.moduli[a] > peaks.moduli[b]; });
    order.resize(static_cast<std::size_t>(m.rows()));
    std::sort(order.begin(), order.end());
    LocatedPeaks kept;
    for (std::size_t i : order) {
      kept.freqs.push_back(peaks.freqs[i]);
      kept.moduli.push_back(peaks.moduli[i]);
    }
    peaks = std::move(kept);
    est.diagnostics.unreliable = true;
  }
  est.freqs = peaks.freqs;
  est.diagnostics.peak_moduli = peaks.moduli;
  AmplitudeFit fit = recover_amplitudes(y, m, est.freqs, f);
  est.amps = std::move(fit.amps);
  est.diagnostics.residual = fit.residual;
  if (!out.report.converged) est.diagnostics.unreliable = true;
}

}  // namespace

EstimateResult estimate(const ComplexVector& y, const SelectionPattern& pattern, const EstimateOptions& options) {
  AssembledProblem problem = assemble_problem(y, pattern, options.solver);
  EstimateResult out;
  out.report = solve(problem.spec, options.progress);
  out.pattern = std::move(problem.pattern);
  out.shift = problem.shift;
  out.f = options.f;
  localize(out, y, options.f, options);
  out.estimate = phase_unshift(std::move(out.estimate), out.shift, options.f);
  return out;
}

EstimateResult estimate_multirate(const std::vector<ComplexVector>& per_grid, const MultirateSystem& system,
                                  const EstimateOptions& options) {
  CommonGridSearch search = find_common_grid(system);
  if (!search.grid) throw InvalidInput("no common supporting grid: " + search.violated_condition);
  const CommonGrid& cg = *search.grid;
  const ComplexVector y = align_measurements(system, per_grid, cg);
  EstimateOptions local = options;
  local.solver.auto_normalize = false;
  local.f = cg.f0.to_double();
  EstimateResult out = estimate(y, cg.observation_set, local);
  out.estimate = unshift_spectrum(std::move(out.estimate), cg);
  out.common = cg;
  return out;
}

}  // namespace spectral_sdp
