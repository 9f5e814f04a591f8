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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "netgen.hpp"
#include "types.hpp"

namespace sinp::clustering {

/// Coordination clusters and the 0/1 association maps that embed a
/// cluster-local covariance into network-wide antenna coordinates.
///
/// The association matrices are never stored densely: C_i is represented
/// by the list of network antenna indices its columns select, which is
/// all the rate and power computations need. `association()` and
/// `base_selector()` materialize the dense forms on request.
class ClusterLayout {
 public:
  ClusterLayout() = default;

  /// Validates and sorts each cluster, then derives the per-base user
  /// sets and antenna maps. Throws on empty clusters, out-of-range or
  /// duplicate base indices.
  static ClusterLayout build(std::vector<std::vector<int>> clusters,
                             std::vector<int> base_antennas);

  int num_users() const { return static_cast<int>(clusters_.size()); }
  int num_bases() const { return static_cast<int>(base_antennas_.size()); }
  Eigen::Index total_antennas() const { return total_antennas_; }

  const std::vector<int>& cluster(int user) const { return clusters_.at(user); }
  const std::vector<int>& users_of(int base) const { return users_.at(base); }
  const std::vector<int>& base_antennas() const { return base_antennas_; }
  Eigen::Index base_offset(int base) const { return base_offset_.at(base); }

  Eigen::Index cluster_antennas(int user) const {
    return static_cast<Eigen::Index>(antenna_index_.at(user).size());
  }
  /// Network antenna index of each column of C_i.
  const std::vector<Eigen::Index>& antenna_index(int user) const { return antenna_index_.at(user); }
  /// Offset of base `base` inside user `user`'s local antenna coordinates,
  /// or -1 if the base is not in the cluster.
  Eigen::Index local_offset(int user, int base) const;

  RMatrix association(int user) const;
  RMatrix base_selector(int base) const;

  /// C_i Q C_i^T.
  CMatrix embed(int user, const CMatrix& q) const;
  /// H C_i, i.e. the columns of an aggregate channel seen by cluster i.
  CMatrix restrict_columns(const CMatrix& h, int user) const;
  /// tr(E_j^T C_i Q C_i^T E_j) for every base j, length num_bases().
  RVector base_power(int user, const CMatrix& q) const;

  /// One line per user: "i: j1,j2,..." with 1-based indices.
  std::string to_text() const;
  static ClusterLayout from_text(std::string_view text, std::vector<int> base_antennas);

  bool operator==(const ClusterLayout& other) const {
    return clusters_ == other.clusters_ && base_antennas_ == other.base_antennas_;
  }

 private:
  std::vector<std::vector<int>> clusters_;
  std::vector<std::vector<int>> users_;
  std::vector<int> base_antennas_;
  std::vector<Eigen::Index> base_offset_;
  std::vector<std::vector<Eigen::Index>> antenna_index_;
  Eigen::Index total_antennas_ = 0;
};

enum class Method { NearestBases, NearestInterferers };

Method parse_method(std::string_view name);
std::string_view method_name(Method m);

ClusterLayout nearest_bases(const netgen::LargeScaleGains& gains, int cluster_size,
                            std::vector<int> base_antennas);
ClusterLayout nearest_interferers(const netgen::LargeScaleGains& gains, int cluster_size,
                                  std::vector<int> base_antennas);
ClusterLayout make_clusters(Method method, const netgen::LargeScaleGains& gains,
                            int cluster_size, std::vector<int> base_antennas);

/// Every user served by every base.
ClusterLayout full_coordination(int users, std::vector<int> base_antennas);
/// Every user served only by the given base.
ClusterLayout single_base(const std::vector<int>& serving, std::vector<int> base_antennas);

}  // namespace sinp::clustering
