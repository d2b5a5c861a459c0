#include "spectral_sdp/admm.hpp"

#include <cmath>
#include <string>

#include "spectral_sdp/errors.hpp"
#include "spectral_sdp/trig_ops.hpp"

namespace spectral_sdp {

void ProblemSpec::validate() const {
  if (y.size() == 0) throw InvalidInput("problem needs at least one observation");
  if (partition.m != y.size()) {
    throw InvalidInput("partition is for m = " + std::to_string(partition.m) + " but y has length " +
                       std::to_string(y.size()));
  }
  if (partition.positive_lags.empty() || partition.positive_lags.front() != 0) {
    throw InvalidInput("partition must contain the diagonal block J_0");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidInput("tau must be >= 0");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidInput("rho must be > 0");
  if (max_iter < 0) throw InvalidInput("max_iter must be >= 0");
  if (!y.allFinite()) throw InvalidInput("observations contain NaN or Inf");
}

AdmmState init_state(const ProblemSpec& spec) {
  const Eigen::Index m = spec.m();
  AdmmState st;
  st.z = HermitianMatrix::Identity(m + 1, m + 1);
  st.z_prev = st.z;
  st.s = HermitianMatrix::Zero(m, m);
  st.c = ComplexVector::Zero(m);
  st.lambda = HermitianMatrix::Zero(m + 1, m + 1);
  st.mu = ComplexVector::Zero(static_cast<Eigen::Index>(spec.partition.size()));
  return st;
}

ComplexVector update_c(const AdmmState& state, const ProblemSpec& spec) {
  const Eigen::Index m = spec.m();
  const auto z = state.z.col(m).head(m);
  const auto lambda = state.lambda.col(m).head(m);
  return (spec.y.conjugate() + 2.0 * spec.rho * z + 2.0 * lambda) / (2.0 * spec.rho + spec.tau);
}

HermitianMatrix update_S_blocks(const AdmmState& state, const ProblemSpec& spec) {
  const Eigen::Index m = spec.m();
  const double inv_rho = 1.0 / spec.rho;
  HermitianMatrix s(m, m);
  const auto& blocks = spec.partition.blocks;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& block = blocks[b];
    const double delta = spec.partition.positive_lags[b] == 0 ? 1.0 : 0.0;
    Complex sum_a = 0.0;
    for (const auto& [i, j] : block) sum_a += state.z(i, j) + inv_rho * state.lambda(i, j);
    const Complex target = delta - inv_rho * state.mu[static_cast<Eigen::Index>(b)];
    const Complex shift = (sum_a - target) / static_cast<double>(block.size() + 1);
    for (const auto& [i, j] : block) {
      const Complex v = state.z(i, j) + inv_rho * state.lambda(i, j) - shift;
      if (i == j) {
        s(i, i) = Complex(v.real(), 0.0);
      } else {
        s(i, j) = v;
        s(j, i) = std::conj(v);
      }
    }
  }
  return s;
}

HermitianMatrix psd_project(const HermitianMatrix& y) {
  if (y.rows() != y.cols()) throw InvalidInput("psd_project: matrix must be square");
  const HermitianMatrix sym = hermitian_part(y);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("psd_project: Hermitian eigensolver did not converge on a " +
                         std::to_string(y.rows()) + "x" + std::to_string(y.rows()) + " matrix (norm " +
                         std::to_string(sym.norm()) + ")");
  }
  const auto& d = eig.eigenvalues();
  const auto& v = eig.eigenvectors();
  // Eigenvalues are ascending; keep the nonnegative tail.
  Eigen::Index first = 0;
  while (first < d.size() && d[first] <= 0.0) ++first;
  const Eigen::Index keep = d.size() - first;
  if (keep == 0) return HermitianMatrix::Zero(y.rows(), y.cols());
  const ComplexMatrix w = v.rightCols(keep) * d.tail(keep).cwiseSqrt().asDiagonal();
  return hermitian_part(w * w.adjoint());
}

HermitianMatrix bordered(const HermitianMatrix& s, const ComplexVector& c) {
  const Eigen::Index m = s.rows();
  HermitianMatrix b(m + 1, m + 1);
  b.topLeftCorner(m, m) = s;
  b.col(m).head(m) = c;
  b.row(m).head(m) = c.adjoint();
  b(m, m) = 1.0;
  return b;
}

std::pair<HermitianMatrix, ComplexVector> update_multipliers(const AdmmState& state, const ProblemSpec& spec) {
  HermitianMatrix lambda = state.lambda + spec.rho * (state.z - bordered(state.s, state.c));
  ComplexVector mu = state.mu;
  const auto& blocks = spec.partition.blocks;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Complex sum = 0.0;
    for (const auto& [i, j] : blocks[b]) sum += state.s(i, j);
    const auto k = static_cast<Eigen::Index>(b);
    if (spec.partition.positive_lags[b] == 0) {
      mu[k] = Complex(mu[k].real() + spec.rho * (sum.real() - 1.0), 0.0);
    } else {
      mu[k] += spec.rho * sum;
    }
  }
  return {std::move(lambda), std::move(mu)};
}

Residuals residuals(const AdmmState& state, const ProblemSpec& spec) {
  Residuals r;
  r.primal = (state.z - bordered(state.s, state.c)).norm();
  const auto& blocks = spec.partition.blocks;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Complex sum = 0.0;
    for (const auto& [i, j] : blocks[b]) sum += state.s(i, j);
    const double delta = spec.partition.positive_lags[b] == 0 ? 1.0 : 0.0;
    r.constraint = std::max(r.constraint, std::abs(sum - delta));
  }
  r.dual = spec.rho * (state.z - state.z_prev).norm();
  return r;
}

void admm_step(AdmmState& state, const ProblemSpec& spec) {
  ComplexVector c = update_c(state, spec);
  HermitianMatrix s = update_S_blocks(state, spec);
  state.c = std::move(c);
  state.s = std::move(s);
  state.z_prev = state.z;
  state.z = psd_project(bordered(state.s, state.c) - state.lambda / spec.rho);
  auto [lambda, mu] = update_multipliers(state, spec);
  state.lambda = std::move(lambda);
  state.mu = std::move(mu);
}

double dual_objective(const ComplexVector& y, const ComplexVector& c, double tau) {
  double obj = (y.transpose() * c).value().real();
  if (tau > 0.0) obj -= 0.5 * tau * c.squaredNorm();
  return obj;
}

SolveReport solve(const ProblemSpec& spec, const Progress& progress) {
  spec.validate();
  AdmmState state = init_state(spec);
  SolveReport report;
  Residuals res = residuals(state, spec);
  int it = 0;
  while (it < spec.max_iter) {
    admm_step(state, spec);
    ++it;
    res = residuals(state, spec);
    if (!std::isfinite(res.primal) || !std::isfinite(res.dual) || !std::isfinite(res.constraint)) {
      throw NumericalError("ADMM produced non-finite iterates at iteration " + std::to_string(it));
    }
    if (progress.callback && progress.every > 0 && it % progress.every == 0) progress.callback(it, res);
    if (res.primal < spec.tol_primal && res.constraint < spec.tol_primal && res.dual < spec.tol_dual) {
      report.converged = true;
      break;
    }
  }
  report.iterations = it;
  report.final_residuals = res;
  report.c_star = std::move(state.c);
  report.s_star = std::move(state.s);
  report.dual_objective = dual_objective(spec.y, report.c_star, spec.tau);
  return report;
}

double tau_from_noise(double sigma, Eigen::Index m, double gamma) {
  if (!(gamma > 1.0)) throw InvalidInput("tau rule requires gamma > 1");
  if (!(sigma >= 0.0)) throw InvalidInput("sigma must be >= 0");
  const double md = static_cast<double>(m);
  return gamma * sigma * std::sqrt(md * std::log(md));
}

double default_rho(const ComplexVector& y) {
  const double scale = std::sqrt(static_cast<double>(y.size())) * y.norm();
  return scale > 0.0 && std::isfinite(scale) ? scale : 1.0;
}

AssembledProblem assemble_problem(const ComplexVector& y, const SelectionPattern& pattern,
                                  const AssembleOptions& options) {
  pattern.validate();
  if (y.size() != pattern.m()) {
    throw InvalidInput("y has length " + std::to_string(y.size()) + " but the pattern selects " +
                       std::to_string(pattern.m()) + " samples");
  }
  AssembledProblem out;
  if (is_admissible_selection(pattern)) {
    out.pattern = pattern;
  } else if (options.auto_normalize) {
    auto normalized = normalize_to_admissible(pattern);
    out.pattern = std::move(normalized.pattern);
    out.shift = normalized.shift;
  } else {
    throw InvalidInput("selection pattern is not admissible (0 not in I, min index " +
                       std::to_string(pattern.indices.front()) + ") and auto-normalisation is off");
  }
  out.spec.y = y;
  out.spec.partition = compute_partition(out.pattern);
  if (options.tau) {
    out.spec.tau = *options.tau;
  } else if (options.sigma) {
    out.spec.tau = tau_from_noise(*options.sigma, y.size(), options.gamma);
  }
  out.spec.rho = options.rho ? *options.rho : default_rho(y);
  out.spec.max_iter = options.max_iter;
  out.spec.tol_primal = options.tol_primal;
  out.spec.tol_dual = options.tol_dual;
  out.spec.validate();
  return out;
}

}  // namespace spectral_sdp
