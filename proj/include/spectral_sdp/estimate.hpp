#pragma once

#include <vector>

#include "spectral_sdp/types.hpp"

namespace spectral_sdp {

struct EstimateDiagnostics {
  std::vector<double> peak_moduli;
  double residual = 0.0;  // ||y - M V alpha||_2 of the amplitude fit
  double sup_norm = 0.0;  // dense-grid sup of |Q|
  bool newton_fallback = false;
  bool unreliable = false;  // solver did not converge, or peaks were capped at m
};

/// Located spectrum: frequencies in Hz sorted within one aliasing period
/// [0, f), amplitudes, and the dual polynomial they were read from.
struct SpectrumEstimate {
  std::vector<double> freqs;
  std::vector<Complex> amps;
  ComplexVector dual_poly;
  EstimateDiagnostics diagnostics;
};

}  // namespace spectral_sdp
