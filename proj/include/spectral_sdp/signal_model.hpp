#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "spectral_sdp/grid.hpp"
#include "spectral_sdp/types.hpp"

namespace spectral_sdp {

/// s complex exponentials: frequencies in Hz (strictly increasing) and
/// nonzero complex amplitudes.
struct SpikeSpectrum {
  std::vector<double> freqs;
  std::vector<Complex> amps;

  std::size_t s() const { return freqs.size(); }

  /// Throws InvalidInput on empty spectra, mismatched lengths, non-increasing
  /// frequencies or zero amplitudes.
  void validate() const;

  /// xi_r / f, not wrapped.
  std::vector<double> reduced(double f) const;
};

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Name of the generator behind add_noise and random_selection, recorded in
/// output metadata.
inline constexpr std::string_view kRandomGeneratorName = "mt19937_64+box-muller";

/// out[k] = sum_r amps[r] e^{i 2 pi (freqs[r] / f) k}, k = 0..n-1.
ComplexVector synthesize_uniform(const SpikeSpectrum& spec, double f, Eigen::Index n);

/// out[k] = sum_r amps[r] e^{i 2 pi (freqs[r] / f_j)(k - gamma_j)}.
ComplexVector synthesize_grid(const SpikeSpectrum& spec, const Grid& grid);

/// Minimal wrap-around distance between reduced frequencies on [0, 1).
double torus_separation(std::span<const double> reduced_freqs);

/// Adds circular complex Gaussian noise with per-sample variance sigma^2.
ComplexVector add_noise(const ComplexVector& y, const NoiseSpec& noise);

/// Standard normal draws from one seeded mt19937_64 stream via Box-Muller.
/// Both algorithms are fully specified, so streams are reproducible across
/// standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  double next();
  /// Uniform on (0, 1) from the top 53 bits of one draw.
  double uniform();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace spectral_sdp
