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

// Rate evaluation for linear precoding with interference treated as noise.
// Reported rates are in bits/s/Hz; the solver side works in nats.

#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "clustering.hpp"
#include "netgen.hpp"
#include "types.hpp"

namespace sinp::rate_model {

inline constexpr double kLn2 = std::numbers::ln2;
/// A user counts as active above this rate (bits/s/Hz).
inline constexpr double kActiveRateFloor = 1e-3;
/// Eigenvalues below this fraction of the largest one carry no stream.
inline constexpr double kRankFloor = 1e-7;

struct UtilitySpec {
  enum class Kind { WeightedSum, ProportionalFair };

  Kind kind = Kind::WeightedSum;
  std::vector<double> weights;  // empty means all ones
  double rate_floor = 1e-3;     // proportional-fair offset

  static UtilitySpec sum_rate() { return {}; }
  static UtilitySpec weighted(std::vector<double> w) { return {Kind::WeightedSum, std::move(w), 1e-3}; }
  static UtilitySpec proportional_fair(double floor = 1e-3) { return {Kind::ProportionalFair, {}, floor}; }

  double weight(int user) const {
    return weights.empty() ? 1.0 : weights.at(static_cast<std::size_t>(user));
  }
  /// Throws on negative weights or a weight vector of the wrong length.
  void validate(int users) const;
  std::string describe() const;
  static UtilitySpec parse(const std::string& text);
};

double utility(const RVector& rates, const UtilitySpec& spec);
/// dU/dR_i at `rates`.
RVector utility_gradient(const RVector& rates, const UtilitySpec& spec);

struct RateReport {
  RVector rates;       // bits/s/Hz per user
  double utility = 0.0;
  RVector base_power;  // linear, per base
  std::vector<bool> active;
};

/// Checks Hermitian symmetry and positive semidefiniteness of every block
/// against the layout, clipping slightly negative eigenvalues to zero.
/// Throws ErrorCode::Numeric on a genuinely indefinite block.
CovarianceSet sanitize(const CovarianceSet& q, const clustering::ClusterLayout& layout);

RVector total_base_power(const clustering::ClusterLayout& layout, const CovarianceSet& q);

/// Per-user rates (bits/s/Hz) with all other users' signals as noise.
RVector rates(const netgen::ChannelSet& channels, const clustering::ClusterLayout& layout,
              const CovarianceSet& q);

RateReport achievable_rates(const netgen::ChannelSet& channels,
                            const clustering::ClusterLayout& layout, const CovarianceSet& q,
                            const UtilitySpec& spec = {});

RateReport make_report(RVector rates, const UtilitySpec& spec, RVector base_power);

/// Y_i = I + sum_{k != i} H_i C_k Qbar_k C_k^T H_i^H.
CMatrix interference_covariance(const netgen::ChannelSet& channels,
                                const clustering::ClusterLayout& layout,
                                const CovarianceSet& qbar, int user);

/// First-order under-estimate of R_i around qbar, bits/s/Hz. Not clipped.
double taylor_rate(const netgen::ChannelSet& channels, const clustering::ClusterLayout& layout,
                   const CovarianceSet& q, const CovarianceSet& qbar, int user);

struct PrecoderSet {
  std::vector<CMatrix> g;                      // M_i x M_i, G_i G_i^H = Q_i
  std::vector<std::vector<CMatrix>> per_base;  // [user][n]: rows of base cluster(user)[n]
  std::vector<int> streams;
};

PrecoderSet recover_precoders(const CovarianceSet& q, const clustering::ClusterLayout& layout);

}  // namespace sinp::rate_model
