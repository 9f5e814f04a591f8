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

// Helpers shared by the solver translation units. Not installed.

#pragma once

#include <cmath>
#include <string>

#include "detmax_solver.hpp"
#include "linalg.hpp"

namespace sinp::detmax::detail {

inline double set_norm2(const CovarianceSet& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return s;
}

inline double set_inner(const CovarianceSet& a, const CovarianceSet& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += linalg::real_inner(a[k], b[k]);
  return s;
}

/// sum_k tr(diag(g_k) X_k) for one constraint.
inline double constraint_value(const PowerConstraint& c, const CovarianceSet& q) {
  double s = 0.0;
  for (const auto& t : c.terms) s += t.weights.dot(q[t.block].diagonal().real());
  return s;
}

inline double max_bound(const std::vector<PowerConstraint>& cs) {
  double m = 0.0;
  for (const auto& c : cs) m = std::max(m, c.bound);
  return m;
}

inline double feasibility_residual(const std::vector<PowerConstraint>& cs, const CovarianceSet& q) {
  double r = 0.0;
  for (const auto& c : cs) r = std::max(r, constraint_value(c, q) - c.bound);
  return r;
}

/// Checks that every term refers to an existing block with matching size
/// and nonnegative weights, and that bounds are positive.
inline void validate_constraints(const std::vector<PowerConstraint>& cs,
                                 const std::vector<Eigen::Index>& block_sizes) {
  for (std::size_t j = 0; j < cs.size(); ++j) {
    const auto& c = cs[j];
    require(c.bound > 0.0 && std::isfinite(c.bound),
            "power constraint " + std::to_string(j + 1) + " must have a positive finite bound");
    for (const auto& t : c.terms) {
      require(t.block >= 0 && t.block < static_cast<int>(block_sizes.size()),
              "power constraint " + std::to_string(j + 1) + " refers to a missing block");
      require(t.weights.size() == block_sizes[t.block],
              "power constraint " + std::to_string(j + 1) + " has weights of the wrong length");
      require((t.weights.array() >= 0.0).all() && t.weights.allFinite(),
              "power constraint " + std::to_string(j + 1) + " has a negative weight");
    }
  }
}

inline CovarianceSet zeros(const std::vector<Eigen::Index>& block_sizes) {
  CovarianceSet q;
  for (auto m : block_sizes) q.push_back(CMatrix::Zero(m, m));
  return q;
}

/// Hermitian-part and PSD projection of every block.
inline CovarianceSet project(const CovarianceSet& q) {
  CovarianceSet out;
  out.reserve(q.size());
  for (const auto& m : q) out.push_back(linalg::project_psd(m));
  return out;
}

/// Scales q so no constraint exceeds its bound. Returns the factor.
inline double scale_into_bounds(const std::vector<PowerConstraint>& cs, CovarianceSet& q) {
  double ratio = 0.0;
  for (const auto& c : cs) ratio = std::max(ratio, constraint_value(c, q) / c.bound);
  if (ratio <= 1.0) return 1.0;
  const double f = 1.0 / ratio;
  for (auto& m : q) m *= f;
  return f;
}

}  // namespace sinp::detmax::detail
