#include "spectral_sdp/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spectral_sdp/errors.hpp"

namespace spectral_sdp {

void SpikeSpectrum::validate() const {
  if (freqs.empty()) throw InvalidInput("spike spectrum needs at least one spike");
  if (freqs.size() != amps.size()) {
    throw InvalidInput("spike spectrum has " + std::to_string(freqs.size()) + " frequencies but " +
                       std::to_string(amps.size()) + " amplitudes");
  }
  for (std::size_t r = 0; r < freqs.size(); ++r) {
    if (!std::isfinite(freqs[r])) throw InvalidInput("non-finite spike frequency");
    if (r > 0 && !(freqs[r] > freqs[r - 1])) {
      throw InvalidInput("spike frequencies must be strictly increasing");
    }
    if (amps[r] == Complex(0.0, 0.0)) throw InvalidInput("spike amplitudes must be nonzero");
  }
}

std::vector<double> SpikeSpectrum::reduced(double f) const {
  std::vector<double> out(freqs.size());
  std::transform(freqs.begin(), freqs.end(), out.begin(), [f](double xi) { return xi / f; });
  return out;
}

namespace {

ComplexVector synthesize_positions(const SpikeSpectrum& spec, double f, Eigen::Index n, double offset) {
  ComplexVector out = ComplexVector::Zero(n);
  for (std::size_t r = 0; r < spec.s(); ++r) {
    const double nu = spec.freqs[r] / f;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double t = nu * (static_cast<double>(k) - offset);
      out[k] += spec.amps[r] * std::polar(1.0, kTwoPi * (t - std::floor(t)));
    }
  }
  return out;
}

}  // namespace

ComplexVector synthesize_uniform(const SpikeSpectrum& spec, double f, Eigen::Index n) {
  if (!(f > 0.0)) throw InvalidInput("sampling frequency must be positive");
  if (n < 1) throw InvalidInput("number of samples must be at least 1");
  spec.validate();
  return synthesize_positions(spec, f, n, 0.0);
}

ComplexVector synthesize_grid(const SpikeSpectrum& spec, const Grid& grid) {
  grid.validate();
  spec.validate();
  return synthesize_positions(spec, grid.f.to_double(), grid.n, grid.gamma.to_double());
}

double torus_separation(std::span<const double> reduced_freqs) {
  if (reduced_freqs.size() < 2) throw InvalidInput("torus_separation needs at least two points");
  std::vector<double> w(reduced_freqs.size());
  std::transform(reduced_freqs.begin(), reduced_freqs.end(), w.begin(), [](double nu) {
    double x = nu - std::floor(nu);
    return x >= 1.0 ? 0.0 : x;
  });
  std::sort(w.begin(), w.end());
  double best = 1.0 - (w.back() - w.front());
  for (std::size_t i = 1; i < w.size(); ++i) best = std::min(best, w[i] - w[i - 1]);
  return best;
}

double GaussianStream::uniform() {
  // (x + 0.5) / 2^53 lies strictly inside (0, 1).
  const std::uint64_t x = engine_() >> 11;
  return (static_cast<double>(x) + 0.5) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  spare_ = radius * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return radius * std::cos(kTwoPi * u2);
}

ComplexVector add_noise(const ComplexVector& y, const NoiseSpec& noise) {
  if (noise.sigma < 0.0 || !std::isfinite(noise.sigma)) throw InvalidInput("noise sigma must be >= 0");
  if (noise.sigma == 0.0) return y;
  GaussianStream gauss(noise.seed);
  const double part = noise.sigma / std::sqrt(2.0);
  ComplexVector out = y;
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const double re = gauss.next();
    const double im = gauss.next();
    out[k] += Complex(part * re, part * im);
  }
  return out;
}

}  // namespace spectral_sdp
