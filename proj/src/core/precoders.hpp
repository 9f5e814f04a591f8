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

// Downlink transmission strategies. Each maps one channel realization,
// a coordination layout and per-base powers to a rate report.

#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "clustering.hpp"
#include "detmax_solver.hpp"
#include "netgen.hpp"
#include "rate_model.hpp"
#include "types.hpp"

namespace sinp::precoders {

enum class Strategy { Sin, Zf, Dpc, MyopicZf, Noncoop };

Strategy parse_strategy(std::string_view name);
std::string_view strategy_name(Strategy s);
/// Whether the strategy depends on the coordination cluster layout.
bool uses_clusters(Strategy s);

struct StrategyResult {
  std::string label;
  rate_model::RateReport report;   // DPC: rates left empty, utility = sum rate
  clustering::ClusterLayout layout;  // coordinates of `q`
  CovarianceSet q;                 // empty for DPC
  std::vector<detmax::SolverCertificate> certificates;
  int iterations = 0;
  bool converged = true;
  std::vector<std::string> flags;
  /// SIN: U(Rbar) at initialization and after every accepted step.
  std::vector<double> utility_trace;
  /// SIN: U of the first-order rates at the returned point.
  double surrogate_utility = std::numeric_limits<double>::quiet_NaN();
  double sum_rate = 0.0;           // bits/s/Hz
};

// ------------------------------------------------------------------ SIN

struct SinOptions {
  double epsilon = 0.01;     // stop when the surrogate utility gains less
  int max_iterations = 50;   // outer cap
  int iterations = 0;        // > 0: stop after this many accepted steps
  detmax::SolverOptions solver;
};

/// Linearization state of the iterative scheme.
struct SinState {
  CovarianceSet qbar;
  RVector rbar;
  int iteration = 0;
  double epsilon = 0.01;
  std::vector<double> utility_trace;
};

/// The convex subproblem at a fixed linearization point.
class SinSubproblem {
 public:
  SinSubproblem(const netgen::ChannelSet& channels, const clustering::ClusterLayout& layout,
                const RVector& power, const rate_model::UtilitySpec& spec, const CovarianceSet& qbar);

  /// First-order rates (bits/s/Hz) at q.
  RVector surrogate_rates(const CovarianceSet& q) const;
  /// Weighted-sum utilities only: the program maximizing ln2 * U(R~) up to a constant.
  detmax::LogDetProgram program() const;
  /// Any utility: objective U(R~(q)) in utility units, -inf where undefined.
  detmax::BlockProblem block_problem() const;
  std::vector<detmax::PowerConstraint> constraints() const;

 private:
  const clustering::ClusterLayout& layout_;
  RVector power_;
  rate_model::UtilitySpec spec_;
  int k_ = 0;
  std::vector<std::vector<CMatrix>> a_;  // [i][k] = H_i C_k
  std::vector<CMatrix> yinv_;            // Y_i^-1
  RVector offset_;                       // nats: -ln det Y_i + sum_{k!=i} tr(Y_i^-1 A Qbar_k A^H)
};

StrategyResult sin_precode(const netgen::ChannelSet& channels, const clustering::ClusterLayout& layout,
                           const RVector& power, const rate_model::UtilitySpec& spec,
                           const SinOptions& options = {});

// ------------------------------------------------------------ baselines

/// Full-network zero forcing with the optimal power split under
/// per-base constraints. Scalar channels only. Rank-deficient channels
/// lose their weakest users until the rest has full row rank.
StrategyResult zf_fullnet(const netgen::ChannelSet& channels, const RVector& power,
                          const rate_model::UtilitySpec& spec = {});

/// Dirty-paper-coding sum capacity bound. Scalar channels only.
StrategyResult dpc_bound(const netgen::ChannelSet& channels, const RVector& power);

/// Every user served by `serving[i]` alone; a base splits its full power
/// equally among its users and bases without users stay silent.
StrategyResult noncoop(const netgen::ChannelSet& channels, const std::vector<int>& serving,
                       const RVector& power, const rate_model::UtilitySpec& spec = {});

/// Per-cluster zero forcing with equal per-user power budgets at every
/// base, after dropping the `outage` fraction of users with the lowest
/// non-cooperative rates. Scalar channels only.
StrategyResult myopic_zf(const netgen::ChannelSet& channels, const clustering::ClusterLayout& layout,
                         const std::vector<int>& serving, const RVector& power, double outage = 0.1,
                         const rate_model::UtilitySpec& spec = {});

// ------------------------------------------------------------- dispatch

struct StrategyInput {
  const netgen::ChannelSet* channels = nullptr;
  const clustering::ClusterLayout* layout = nullptr;  // required by sin and myopic-zf
  std::vector<int> serving;                           // required by noncoop and myopic-zf
  RVector power;
  rate_model::UtilitySpec spec;
  SinOptions sin;
  double outage = 0.1;
};

StrategyResult evaluate(Strategy strategy, const StrategyInput& input);

}  // namespace sinp::precoders
