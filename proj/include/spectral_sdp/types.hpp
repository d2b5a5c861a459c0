#pragma once

#include <complex>

#include <Eigen/Dense>

namespace spectral_sdp {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Dense complex matrix expected to satisfy A = A^*. The alias documents
/// intent; hermitian_part() restores the symmetry after accumulations.
using HermitianMatrix = Eigen::MatrixXcd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace spectral_sdp
