#pragma once

#include "spectral_sdp/types.hpp"

namespace spectral_sdp {

/// (A + A^*) / 2.
HermitianMatrix hermitian_part(const ComplexMatrix& a);

/// Hermitian Toeplitz matrix with first row u: entry (i, j) is u[j-i] on
/// and above the diagonal and conj(u[i-j]) below it. u[0] must be real.
HermitianMatrix toeplitz_from_vector(const ComplexVector& u);

/// Diagonal sums: out[k] = sum_{j-i=k} H(i, j) = <Theta_k, H>.
ComplexVector toeplitz_adjoint(const ComplexMatrix& h);

/// M T_n(u) M^*.
HermitianMatrix r_op(const ComplexMatrix& m, const ComplexVector& u);

/// toeplitz_adjoint(M^* S M).
ComplexVector r_op_adjoint(const ComplexMatrix& m, const ComplexMatrix& s);

/// Q(e^{i 2 pi nu}) = sum_k q[k] e^{i 2 pi nu k}.
Complex poly_eval(const ComplexVector& q, double nu);

struct PolyJet {
  Complex value;
  Complex d1;  // dQ/dnu
  Complex d2;  // d^2Q/dnu^2
};

/// Q and its first two derivatives with respect to nu.
PolyJet poly_eval_jet(const ComplexVector& q, double nu);

/// psi(e^{-i2 pi nu})^T G psi(e^{i2 pi nu}) for Hermitian G, where psi is the
/// power vector [1, z, ..., z^{n-1}]. Throws NumericalError when the
/// imaginary residue exceeds 1e-8 (G not Hermitian enough).
double gram_eval(const ComplexMatrix& g, double nu);

/// |Q| on grid_points uniform samples of [0, 1).
RealVector modulus_on_grid(const ComplexVector& q, Eigen::Index grid_points);

struct SupNorm {
  double value = 0.0;
  double argmax = 0.0;  // nu in [0, 1)
};

/// max |Q(e^{i 2 pi nu})| over a uniform grid, refined by a golden-section
/// search around the best grid point. Requires grid_points >= 4 n.
SupNorm dense_sup_norm_at(const ComplexVector& q, Eigen::Index grid_points);
double dense_sup_norm(const ComplexVector& q, Eigen::Index grid_points);

/// Reduces nu to [0, 1).
double wrap_unit(double nu);

}  // namespace spectral_sdp
