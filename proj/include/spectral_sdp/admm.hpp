#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "spectral_sdp/sampling.hpp"
#include "spectral_sdp/types.hpp"

namespace spectral_sdp {

/// Reduced dual program
///
///   max_c  Re(y^T c) - (tau/2) ||c||^2
///   s.t.   [[S, c], [c^*, 1]] >= 0,   sum_{(i,j) in J_k} S_ij = delta_k, k in J_+
///
/// tau = 0 is the noiseless program; tau > 0 the atomic soft thresholding
/// dual.
struct ProblemSpec {
  ComplexVector y;
  PartitionStructure partition;
  double tau = 0.0;
  double rho = 1.0;
  int max_iter = 20000;
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;

  Eigen::Index m() const { return y.size(); }
  void validate() const;
};

/// ADMM iterates. Z is the (m+1)x(m+1) PSD splitting variable, Lambda its
/// multiplier, mu the multipliers of the block-sum constraints (mu[0] is
/// kept real). z_prev holds the previous Z for the dual residual.
struct AdmmState {
  HermitianMatrix z;
  HermitianMatrix s;
  ComplexVector c;
  HermitianMatrix lambda;
  ComplexVector mu;
  HermitianMatrix z_prev;
};

struct Residuals {
  double primal = 0.0;      // ||Z - [[S, c], [c^*, 1]]||_F
  double constraint = 0.0;  // max_k |sum_{J_k} S - delta_k|
  double dual = 0.0;        // rho ||Z^{t+1} - Z^t||_F
};

struct SolveReport {
  ComplexVector c_star;
  HermitianMatrix s_star;
  double dual_objective = 0.0;
  int iterations = 0;
  Residuals final_residuals;
  bool converged = false;
};

/// Called every `every` iterations with the iteration count and residuals.
struct Progress {
  std::function<void(int, const Residuals&)> callback;
  int every = 100;
};

AdmmState init_state(const ProblemSpec& spec);

/// c = (conj(y) + 2 rho z + 2 lambda) / (2 rho + tau), the minimiser of
///   L_c = -Re(y^T c) + (tau/2)|c|^2 + 2 Re<lambda, z - c> + rho |z - c|^2.
ComplexVector update_c(const AdmmState& state, const ProblemSpec& spec);

/// Per block J_k, the minimiser of
///   L_k = Re<Lambda0, Z0 - S> + Re(conj(mu_k)(sum S - delta_k))
///         + (rho/2)||Z0 - S||^2 + (rho/2)|sum S - delta_k|^2
/// over the entries S_{J_k}. Writing a = (Z0 + Lambda0/rho)_{J_k} and
/// b = delta_k - mu_k/rho, stationarity gives
///   S_{J_k} = a - (sum a - b) / (|J_k| + 1) * 1.
/// The frequently quoted form without the 1/(|J_k|+1) factor is not the
/// minimiser. The lower triangle is filled with conjugates.
HermitianMatrix update_S_blocks(const AdmmState& state, const ProblemSpec& spec);

/// Frobenius-nearest PSD matrix: eigendecomposition with negative
/// eigenvalues clipped to 0. The input is symmetrised first.
HermitianMatrix psd_project(const HermitianMatrix& y);

/// Lambda + rho (Z - [[S, c], [c^*, 1]]) and mu_k + rho (sum_{J_k} S - delta_k).
std::pair<HermitianMatrix, ComplexVector> update_multipliers(const AdmmState& state, const ProblemSpec& spec);

Residuals residuals(const AdmmState& state, const ProblemSpec& spec);

/// [[S, c], [c^*, 1]].
HermitianMatrix bordered(const HermitianMatrix& s, const ComplexVector& c);

/// One full cycle: c, S blocks, Hermitian mirror, Z projection, multipliers.
void admm_step(AdmmState& state, const ProblemSpec& spec);

/// Re(y^T c) - (tau/2)||c||^2.
double dual_objective(const ComplexVector& y, const ComplexVector& c, double tau);

/// Runs ADMM until all residuals drop below tolerance or max_iter. Returns
/// converged = false instead of throwing on non-convergence; throws
/// NumericalError on NaN iterates.
SolveReport solve(const ProblemSpec& spec, const Progress& progress = {});

struct AssembleOptions {
  std::optional<double> tau;    // explicit regularisation
  std::optional<double> sigma;  // noise level; tau = gamma sigma sqrt(m log m)
  double gamma = 1.5;
  bool auto_normalize = true;
  std::optional<double> rho;  // default: default_rho(y)
  int max_iter = 20000;
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;
};

struct AssembledProblem {
  ProblemSpec spec;
  SelectionPattern pattern;  // admissible pattern actually used
  std::int64_t shift = 0;    // k_0 removed by normalisation
};

/// tau = gamma sigma sqrt(m log m); gamma must exceed 1.
double tau_from_noise(double sigma, Eigen::Index m, double gamma);

/// sqrt(m) ||y||, or 1 when y vanishes. Fixed for the whole run.
double default_rho(const ComplexVector& y);

AssembledProblem assemble_problem(const ComplexVector& y, const SelectionPattern& pattern,
                                  const AssembleOptions& options = {});

}  // namespace spectral_sdp
