#include "spectral_sdp/trig_ops.hpp"

#include <cmath>
#include <string>

#include "spectral_sdp/errors.hpp"

namespace spectral_sdp {

namespace {

void require_square(const ComplexMatrix& h, const char* what) {
  if (h.rows() != h.cols()) {
    throw InvalidInput(std::string(what) + ": matrix must be square, got " + std::to_string(h.rows()) +
                       "x" + std::to_string(h.cols()));
  }
}

// e^{i 2 pi nu k} with the phase reduced mod 1 before the multiplication by
// 2 pi, which keeps large k accurate.
Complex unit_phasor(double nu, double k) {
  const double t = nu * k;
  return std::polar(1.0, kTwoPi * (t - std::floor(t)));
}

}  // namespace

double wrap_unit(double nu) {
  double w = nu - std::floor(nu);
  if (w >= 1.0) w = 0.0;
  return w;
}

HermitianMatrix hermitian_part(const ComplexMatrix& a) {
  require_square(a, "hermitian_part");
  return 0.5 * (a + a.adjoint());
}

HermitianMatrix toeplitz_from_vector(const ComplexVector& u) {
  const Eigen::Index n = u.size();
  if (n == 0) throw InvalidInput("toeplitz_from_vector: empty generator");
  if (std::abs(u[0].imag()) > 1e-12) {
    throw InvalidInput("toeplitz_from_vector: u[0] must be real, imaginary part " +
                       std::to_string(u[0].imag()));
  }
  HermitianMatrix t(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t(i, i) = Complex(u[0].real(), 0.0);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      t(i, j) = u[j - i];
      t(j, i) = std::conj(u[j - i]);
    }
  }
  return t;
}

ComplexVector toeplitz_adjoint(const ComplexMatrix& h) {
  require_square(h, "toeplitz_adjoint");
  const Eigen::Index n = h.rows();
  ComplexVector out = ComplexVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i + k < n; ++i) acc += h(i, i + k);
    out[k] = acc;
  }
  return out;
}

HermitianMatrix r_op(const ComplexMatrix& m, const ComplexVector& u) {
  if (m.cols() != u.size()) {
    throw InvalidInput("r_op: M has " + std::to_string(m.cols()) + " columns but u has length " +
                       std::to_string(u.size()));
  }
  return m * toeplitz_from_vector(u) * m.adjoint();
}

ComplexVector r_op_adjoint(const ComplexMatrix& m, const ComplexMatrix& s) {
  if (s.rows() != m.rows() || s.cols() != m.rows()) {
    throw InvalidInput("r_op_adjoint: S must be " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.rows()));
  }
  return toeplitz_adjoint(m.adjoint() * s * m);
}

Complex poly_eval(const ComplexVector& q, double nu) {
  // Horner in z = e^{i 2 pi nu}.
  const Complex z = unit_phasor(nu, 1.0);
  Complex acc = 0.0;
  for (Eigen::Index k = q.size(); k-- > 0;) acc = acc * z + q[k];
  return acc;
}

PolyJet poly_eval_jet(const ComplexVector& q, double nu) {
  const Complex z = unit_phasor(nu, 1.0);
  const Complex i2pi(0.0, kTwoPi);
  Complex p = 0.0, dp = 0.0, ddp = 0.0;  // P(z), P'(z), P''(z)
  for (Eigen::Index k = q.size(); k-- > 0;) {
    ddp = ddp * z + 2.0 * dp;
    dp = dp * z + p;
    p = p * z + q[k];
  }
  // dz/dnu = i 2 pi z.
  const Complex dz = i2pi * z;
  PolyJet jet;
  jet.value = p;
  jet.d1 = dp * dz;
  jet.d2 = ddp * dz * dz + dp * i2pi * dz;
  return jet;
}

double gram_eval(const ComplexMatrix& g, double nu) {
  require_square(g, "gram_eval");
  const Eigen::Index n = g.rows();
  ComplexVector psi(n);
  const Complex z = unit_phasor(nu, 1.0);
  Complex zk = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    psi[k] = zk;
    zk *= z;
  }
  // psi(z^{-1})^T = psi(z)^* on the unit circle.
  const Complex value = psi.dot(g * psi);
  const double scale = std::max(1.0, g.cwiseAbs().sum());
  if (std::abs(value.imag()) > 1e-8 * scale) {
    throw NumericalError("gram_eval: imaginary residue " + std::to_string(value.imag()) +
                         " (matrix is not Hermitian)");
  }
  return value.real();
}

RealVector modulus_on_grid(const ComplexVector& q, Eigen::Index grid_points) {
  RealVector out(grid_points);
  const double step = 1.0 / static_cast<double>(grid_points);
  for (Eigen::Index t = 0; t < grid_points; ++t) out[t] = std::abs(poly_eval(q, step * static_cast<double>(t)));
  return out;
}

SupNorm dense_sup_norm_at(const ComplexVector& q, Eigen::Index grid_points) {
  const Eigen::Index n = std::max<Eigen::Index>(q.size(), 1);
  if (grid_points < 4 * n) {
    throw InvalidInput("dense_sup_norm: grid_points " + std::to_string(grid_points) +
                       " is below 4n = " + std::to_string(4 * n));
  }
  const RealVector grid = modulus_on_grid(q, grid_points);
  Eigen::Index best = 0;
  const double best_value = grid.maxCoeff(&best);
  const double step = 1.0 / static_cast<double>(grid_points);

  // Golden-section maximisation of |Q| on the bracket around the best node.
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = step * static_cast<double>(best) - step;
  double hi = step * static_cast<double>(best) + step;
  auto modulus = [&](double nu) { return std::abs(poly_eval(q, nu)); };
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = modulus(x1), f2 = modulus(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = modulus(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = modulus(x1);
    }
  }
  SupNorm out{best_value, step * static_cast<double>(best)};
  const double mid = 0.5 * (lo + hi);
  const double refined = modulus(mid);
  if (refined > out.value) out = {refined, wrap_unit(mid)};
  return out;
}

double dense_sup_norm(const ComplexVector& q, Eigen::Index grid_points) {
  return dense_sup_norm_at(q, grid_points).value;
}

}  // namespace spectral_sdp
