#pragma once

#include <optional>
#include <vector>

#include "spectral_sdp/admm.hpp"
#include "spectral_sdp/estimate.hpp"
#include "spectral_sdp/multirate.hpp"
#include "spectral_sdp/sampling.hpp"
#include "spectral_sdp/signal_model.hpp"

namespace spectral_sdp {

/// q = M^* c.
ComplexVector dual_polynomial(const ComplexVector& c, const SubsamplingMatrix& m);

struct LocatedPeaks {
  std::vector<double> freqs;   // Hz, ascending, in [0, f)
  std::vector<double> moduli;  // |Q| at each refined peak
  bool newton_fallback = false;
};

/// Local maxima of |Q|^2 on a grid of grid_points (>= 8 n) samples, refined
/// by Newton iterations on the derivative of |Q|^2, kept when
/// |Q| >= 1 - peak_tol. Throws DegeneratePolynomial when 10% or more of the
/// grid is above the threshold.
LocatedPeaks locate_frequencies(const ComplexVector& q, double f, Eigen::Index grid_points,
                                double peak_tol = 1e-3);

struct AmplitudeFit {
  std::vector<Complex> amps;
  double residual = 0.0;  // ||y - M V alpha||_2
};

/// Least-squares amplitudes for fixed frequencies, V(k, r) = e^{i 2 pi (xi_r/f) k}.
/// Throws ConditioningError when cond(M V) > 1e12.
AmplitudeFit recover_amplitudes(const ComplexVector& y, const SubsamplingMatrix& m,
                                const std::vector<double>& freqs, double f);

struct CertificateReport {
  bool is_certificate = false;
  std::vector<double> interp_errors;  // |Q(xi_r/f) - conj(sign(alpha_r))|
  double strict_margin = 0.0;         // 1 - max |Q| away from the spikes
};

/// Numerical check of the certificate conditions for the pairing Re(y^T c):
/// Q interpolates conj(sign(alpha_r)) at every spike and |Q| < 1 on the grid
/// outside radius 1/(8n) around them. grid_points = 0 picks 32 n.
CertificateReport verify_certificate(const ComplexVector& q, const SpikeSpectrum& spec, double f, double tol,
                                     Eigen::Index grid_points = 0);

struct EstimateOptions {
  double f = 1.0;  // rate of the uniform grid the pattern indexes into
  AssembleOptions solver;
  Eigen::Index grid_factor = 8;
  double peak_tol = 1e-3;
  Progress progress;
};

struct EstimateResult {
  SpectrumEstimate estimate;
  SolveReport report;
  SelectionPattern pattern;  // admissible pattern the solve used
  std::int64_t shift = 0;
  double f = 1.0;  // rate the frequencies are bounded by
  std::optional<CommonGrid> common;
};

/// Selection pipeline: normalise, solve, read peaks from the dual
/// polynomial, fit amplitudes, undo the shift.
EstimateResult estimate(const ComplexVector& y, const SelectionPattern& pattern, const EstimateOptions& options);

/// Multirate pipeline on the minimal common grid; options.f is ignored in
/// favour of f0. Throws InvalidInput when the system has no common grid.
EstimateResult estimate_multirate(const std::vector<ComplexVector>& per_grid, const MultirateSystem& system,
                                  const EstimateOptions& options);

}  // namespace spectral_sdp
