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

#include "clustering.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace sinp::clustering {

ClusterLayout ClusterLayout::build(std::vector<std::vector<int>> clusters,
                                   std::vector<int> base_antennas) {
  require(!base_antennas.empty(), "build_association: no bases");
  for (int m : base_antennas) require(m > 0, "build_association: antenna counts must be positive");
  ClusterLayout out;
  const int b = static_cast<int>(base_antennas.size());
  out.base_antennas_ = std::move(base_antennas);
  for (int m : out.base_antennas_) {
    out.base_offset_.push_back(out.total_antennas_);
    out.total_antennas_ += m;
  }
  out.users_.assign(b, {});
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    auto& c = clusters[i];
    require(!c.empty(), "build_association: user " + std::to_string(i + 1) + " has an empty cluster");
    std::sort(c.begin(), c.end());
    for (std::size_t n = 0; n < c.size(); ++n) {
      require(c[n] >= 0 && c[n] < b, "build_association: base index out of range");
      require(n == 0 || c[n] != c[n - 1],
              "build_association: duplicate base " + std::to_string(c[n] + 1) + " in cluster of user " +
                  std::to_string(i + 1));
    }
    std::vector<Eigen::Index> idx;
    for (int j : c) {
      out.users_[j].push_back(static_cast<int>(i));
      for (int a = 0; a < out.base_antennas_[j]; ++a) idx.push_back(out.base_offset_[j] + a);
    }
    out.antenna_index_.push_back(std::move(idx));
  }
  out.clusters_ = std::move(clusters);
  return out;
}

Eigen::Index ClusterLayout::local_offset(int user, int base) const {
  Eigen::Index off = 0;
  for (int j : cluster(user)) {
    if (j == base) return off;
    off += base_antennas_[j];
  }
  return -1;
}

RMatrix ClusterLayout::association(int user) const {
  const auto& idx = antenna_index(user);
  RMatrix c = RMatrix::Zero(total_antennas_, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t n = 0; n < idx.size(); ++n) c(idx[n], static_cast<Eigen::Index>(n)) = 1.0;
  return c;
}

RMatrix ClusterLayout::base_selector(int base) const {
  RMatrix e = RMatrix::Zero(total_antennas_, base_antennas_.at(base));
  for (int a = 0; a < base_antennas_[base]; ++a) e(base_offset_[base] + a, a) = 1.0;
  return e;
}

CMatrix ClusterLayout::embed(int user, const CMatrix& q) const {
  const auto& idx = antenna_index(user);
  require(q.rows() == static_cast<Eigen::Index>(idx.size()) && q.cols() == q.rows(),
          "embed: covariance size does not match cluster");
  CMatrix full = CMatrix::Zero(total_antennas_, total_antennas_);
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c)
      full(idx[r], idx[c]) = q(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return full;
}

CMatrix ClusterLayout::restrict_columns(const CMatrix& h, int user) const {
  const auto& idx = antenna_index(user);
  require(h.cols() == total_antennas_, "restrict_columns: channel width mismatch");
  CMatrix out(h.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t n = 0; n < idx.size(); ++n) out.col(static_cast<Eigen::Index>(n)) = h.col(idx[n]);
  return out;
}

RVector ClusterLayout::base_power(int user, const CMatrix& q) const {
  require(q.rows() == cluster_antennas(user), "base_power: covariance size does not match cluster");
  RVector p = RVector::Zero(num_bases());
  Eigen::Index off = 0;
  for (int j : cluster(user)) {
    const int m = base_antennas_[j];
    for (int a = 0; a < m; ++a) p(j) += q(off + a, off + a).real();
    off += m;
  }
  return p;
}

std::string ClusterLayout::to_text() const {
  std::ostringstream os;
  for (int i = 0; i < num_users(); ++i) {
    os << (i + 1) << ':';
    const auto& c = clusters_[i];
    for (std::size_t n = 0; n < c.size(); ++n) os << (n == 0 ? " " : ",") << (c[n] + 1);
    os << '\n';
  }
  return os.str();
}

ClusterLayout ClusterLayout::from_text(std::string_view text, std::vector<int> base_antennas) {
  std::vector<std::vector<int>> clusters;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      fail(ErrorCode::Parse, "cluster layout line " + std::to_string(lineno) + ": missing ':'");
    int user = 0;
    try {
      user = std::stoi(line.substr(0, colon));
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, "cluster layout line " + std::to_string(lineno) + ": bad user index");
    }
    if (user != static_cast<int>(clusters.size()) + 1)
      fail(ErrorCode::Parse, "cluster layout line " + std::to_string(lineno) + ": users must be listed in order");
    std::vector<int> c;
    std::istringstream items(line.substr(colon + 1));
    std::string item;
    while (std::getline(items, item, ',')) {
      try {
        c.push_back(std::stoi(item) - 1);
      } catch (const std::exception&) {
        fail(ErrorCode::Parse, "cluster layout line " + std::to_string(lineno) + ": bad base index");
      }
    }
    clusters.push_back(std::move(c));
  }
  return ClusterLayout::build(std::move(clusters), std::move(base_antennas));
}

Method parse_method(std::string_view name) {
  if (name == "nearest-bases") return Method::NearestBases;
  if (name == "nearest-interferers") return Method::NearestInterferers;
  fail(ErrorCode::InvalidArgument, "unknown clustering method '" + std::string(name) + "'");
}

std::string_view method_name(Method m) {
  return m == Method::NearestBases ? "nearest-bases" : "nearest-interferers";
}

namespace {

// Indices of the `count` largest entries, lowest index first among ties.
std::vector<int> top_indices(const RVector& v, int count, int exclude = -1) {
  std::vector<int> idx;
  for (int j = 0; j < v.size(); ++j)
    if (j != exclude) idx.push_back(j);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v(a) > v(b); });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(count)));
  return idx;
}

int home_base(const RMatrix& gain, int user) {
  return top_indices(gain.row(user).transpose(), 1).front();
}

}  // namespace

ClusterLayout nearest_bases(const netgen::LargeScaleGains& gains, int cluster_size,
                            std::vector<int> base_antennas) {
  require(cluster_size >= 1 && cluster_size <= gains.num_bases(),
          "nearest_bases: cluster size must lie in [1, B]");
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < gains.num_users(); ++i)
    clusters.push_back(top_indices(gains.gain.row(i).transpose(), cluster_size));
  return ClusterLayout::build(std::move(clusters), std::move(base_antennas));
}

ClusterLayout nearest_interferers(const netgen::LargeScaleGains& gains, int cluster_size,
                                  std::vector<int> base_antennas) {
  require(cluster_size >= 1 && cluster_size <= gains.num_bases(),
          "nearest_interferers: cluster size must lie in [1, B]");
  const int k = gains.num_users();
  std::vector<int> home(k);
  for (int i = 0; i < k; ++i) home[i] = home_base(gains.gain, i);
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < k; ++i) {
    // Users hit hardest by user i's home base.
    const auto victims = top_indices(gains.gain.col(home[i]), cluster_size - 1, i);
    std::vector<int> c{home[i]};
    for (int v : victims)
      if (std::find(c.begin(), c.end(), home[v]) == c.end()) c.push_back(home[v]);
    clusters.push_back(std::move(c));
  }
  return ClusterLayout::build(std::move(clusters), std::move(base_antennas));
}

ClusterLayout make_clusters(Method method, const netgen::LargeScaleGains& gains, int cluster_size,
                            std::vector<int> base_antennas) {
  return method == Method::NearestBases
             ? nearest_bases(gains, cluster_size, std::move(base_antennas))
             : nearest_interferers(gains, cluster_size, std::move(base_antennas));
}

ClusterLayout full_coordination(int users, std::vector<int> base_antennas) {
  std::vector<int> all(base_antennas.size());
  std::iota(all.begin(), all.end(), 0);
  return ClusterLayout::build(std::vector<std::vector<int>>(users, all), std::move(base_antennas));
}

ClusterLayout single_base(const std::vector<int>& serving, std::vector<int> base_antennas) {
  std::vector<std::vector<int>> clusters;
  for (int j : serving) clusters.push_back({j});
  return ClusterLayout::build(std::move(clusters), std::move(base_antennas));
}

}  // namespace sinp::clustering
