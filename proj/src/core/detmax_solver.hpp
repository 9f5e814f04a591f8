// Copyright 2026 The sinprecode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Convex solvers over Hermitian PSD block variables with per-base linear
// power constraints, and the convex-concave minimax program whose value is
// the dirty-paper-coding sum capacity under per-antenna power constraints.
//
// Three engines live here:
//
//  * solve_block_concave: any smooth concave objective given through a
//    value/gradient oracle. Projected gradient ascent (PSD by eigenvalue
//    clipping) inside an augmented Lagrangian for the power constraints.
//
//  * solve_logdet_program: the structured objective
//
//        sum_i w_i ln det(I + sum_k A_ik Q_k A_ik^H) - sum_k tr(D_k Q_k)
//
//    solved by a Newton barrier method on its Lagrange dual, whose
//    variables are one N_i x N_i Hermitian matrix per receiver and one
//    multiplier per constraint. The primal point is recovered from the
//    dual barrier matrices, so every returned solution carries a rigorous
//    duality gap.
//
//  * solve_dpc_minimax: barrier Newton on the saddle-point system.
//
// Objectives are in nats.

#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "types.hpp"

namespace sinp::detmax {

struct SolverOptions {
  double feasibility_tol = 1e-8;   // relative to max_j P_j
  double stationarity_tol = 1e-6;  // relative to the initial gradient norm
  double gap_tol = 1e-6;           // relative duality gap (Newton engine)
  int max_iterations = 5000;       // per barrier stage
  double barrier_decay = 0.2;      // barrier weight multiplier per stage (Newton engine)
  bool trace = false;
};

struct TraceRow {
  int stage = 0;
  int iteration = 0;
  double barrier_weight = 0.0;
  double objective = 0.0;
  double feasibility = 0.0;
  double stationarity = 0.0;
  double gap = std::numeric_limits<double>::quiet_NaN();
};

struct SolverCertificate {
  std::string method;
  double objective = 0.0;
  double feasibility_residual = 0.0;   // max_j (power_j - P_j)^+, linear units
  double stationarity_residual = 0.0;  // projected-gradient norm of the Lagrangian
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = false;
  bool warm_start_kept = false;        // solver output was worse than the warm start
  std::vector<TraceRow> trace;
};

/// Iteration trace as CSV: stage,iteration,barrier_weight,objective,feasibility,stationarity,gap
void write_trace_csv(std::ostream& out, const SolverCertificate& cert);

/// sum over terms of tr(diag(weights) Q_block) <= bound.
struct PowerConstraint {
  struct Term {
    int block = 0;
    RVector weights;  // nonnegative, length = block size
  };
  std::vector<Term> terms;
  double bound = 0.0;
};

/// Power used by each constraint at q.
RVector constraint_usage(const std::vector<PowerConstraint>& constraints, const CovarianceSet& q);

struct BlockSolution {
  CovarianceSet q;
  SolverCertificate certificate;
};

// ---------------------------------------------------------- gradient engine

struct BlockProblem {
  std::vector<Eigen::Index> block_sizes;
  /// Objective value at q; writes the (Hermitian) gradient when `grad` is
  /// non-null. Returns -infinity outside the objective's domain.
  std::function<double(const CovarianceSet& q, CovarianceSet* grad)> objective;
  std::vector<PowerConstraint> constraints;
};

/// Throws ErrorCode::Numeric if the oracle produces NaN.
BlockSolution solve_block_concave(const BlockProblem& problem, const CovarianceSet& warm_start,
                                  const SolverOptions& options = {});

// ------------------------------------------------------ structured engine

struct LogDetProgram {
  std::vector<Eigen::Index> block_sizes;
  std::vector<Eigen::Index> receiver_dims;
  RVector weights;                          // w_i >= 0
  std::vector<std::vector<CMatrix>> gains;  // [i][k], N_i x M_k; empty = zero
  std::vector<CMatrix> linear_cost;         // D_k, Hermitian PSD; empty = zero
  std::vector<PowerConstraint> constraints;

  int num_receivers() const { return static_cast<int>(receiver_dims.size()); }
  int num_blocks() const { return static_cast<int>(block_sizes.size()); }

  double objective(const CovarianceSet& q) const;
  CovarianceSet gradient(const CovarianceSet& q) const;
  BlockProblem as_block_problem() const;
  void validate() const;
};

BlockSolution solve_logdet_program(const LogDetProgram& program, const CovarianceSet& warm_start,
                                   const SolverOptions& options = {});

// ---------------------------------------------------------- ZF power split

struct ZfPowerSolution {
  RVector gamma;              // received SNR per user
  double sum_rate_bits = 0.0; // sum_i w_i log2(1 + gamma_i)
  std::vector<bool> unbounded;
  SolverCertificate certificate;
};

/// Maximizes sum_i w_i log(1 + gamma_i) subject to |W|^2 gamma <= P.
/// `w2` is B x K (entrywise squared magnitudes of the pseudoinverse).
/// Users whose column of w2 is all zero are unconstrained: they are
/// flagged and capped at `kUnboundedGammaCap`.
ZfPowerSolution solve_zf_power(const RMatrix& w2, const RVector& power, const RVector& weights,
                               const SolverOptions& options = {});

inline constexpr double kUnboundedGammaCap = 1e12;

// ------------------------------------------------------------- DPC minimax

struct MinimaxProblem {
  CMatrix channel_vectors;  // B x K, column i is [h_i1 ... h_iB]^T
  RVector power;            // per base
  double tol = 1e-9;        // relative accuracy of the saddle value
};

struct MinimaxSolution {
  double value_nats = 0.0;
  double sum_rate_bits = 0.0;
  RVector s;  // uplink powers, sum <= sum_j P_j
  RVector q;  // noise weights, sum_j q_j P_j <= sum_j P_j
  int iterations = 0;
  bool converged = false;
  bool saddle_verified = false;
  double worst_deviation = 0.0;  // largest unilateral improvement found by the post-check
};

/// Throws ErrorCode::NotConverged (message carries residuals) when the
/// saddle cannot be certified.
MinimaxSolution solve_dpc_minimax(const MinimaxProblem& problem);

/// f(s, q) = ln det(sum_i s_i h_i h_i^H + diag(q)) - sum_j ln q_j.
double minimax_objective(const CMatrix& channel_vectors, const RVector& s, const RVector& q);

}  // namespace sinp::detmax
