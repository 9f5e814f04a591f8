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

// Network geometry, large-scale gains and Rayleigh channel draws for the
// wraparound line network and the 19-cell, three-sector hexagonal network.
//
// All generators are pure functions of their arguments and an explicit
// 64-bit seed. Indices are 0-based throughout the C++ API.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "types.hpp"

namespace sinp::netgen {

enum class NetworkKind { Line, Hex };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct NetworkGeometry {
  NetworkKind kind = NetworkKind::Line;
  std::vector<Point> base_pos;
  std::vector<Point> user_pos;
  std::vector<int> base_antennas;
  std::vector<int> user_antennas;
  std::vector<int> serving_base;  // base that serves user i without cooperation

  // line only
  double dx = 1.0;
  double dy = 1.0;

  // hex only
  std::vector<Point> site_pos;     // cell centers, km
  std::vector<int> base_site;      // cell index of each sector
  std::vector<double> boresight;   // radians
  RMatrix shadow_db;               // users x sites

  int num_bases() const { return static_cast<int>(base_pos.size()); }
  int num_users() const { return static_cast<int>(user_pos.size()); }
};

/// Average power gains, users x bases, linear scale.
struct LargeScaleGains {
  RMatrix gain;

  int num_users() const { return static_cast<int>(gain.rows()); }
  int num_bases() const { return static_cast<int>(gain.cols()); }
};

/// One fading realization: every link matrix H_ij plus the aggregate H_i.
struct ChannelSet {
  std::vector<std::vector<CMatrix>> link;  // [user][base], N_i x M_j
  std::vector<CMatrix> aggregate;          // [user], N_i x sum_j M_j
  std::vector<int> base_antennas;
  std::vector<int> user_antennas;
  std::vector<Eigen::Index> base_offset;   // first aggregate column of base j

  int num_users() const { return static_cast<int>(user_antennas.size()); }
  int num_bases() const { return static_cast<int>(base_antennas.size()); }
  Eigen::Index total_antennas() const;
  bool scalar() const;

  /// K x B matrix of scalar gains h_ij; requires scalar().
  CMatrix scalar_matrix() const;

  static ChannelSet from_links(std::vector<std::vector<CMatrix>> links);
  static ChannelSet from_scalar(const CMatrix& h);
};

// ---------------------------------------------------------------- line --

NetworkGeometry line_layout(int bases, double dx = 1.0, double dy = 1.0);

/// Symmetric circular index offset min(m, B - m), m = |i - j| mod B.
int circular_offset(int user, int base, int bases);

double wrap_distance(int user, int base, const NetworkGeometry& geometry);

LargeScaleGains line_gains(const NetworkGeometry& geometry, double eta);

// ----------------------------------------------------------------- hex --

struct HexParams {
  double site_spacing_km = 0.5;
  double pathloss_exponent = 3.76;
  double shadow_std_db = 8.0;
  double shadow_decorrelation_km = 0.05;
  double site_correlation = 0.5;
  double beamwidth_3db_deg = 70.0;
  double max_attenuation_db = 20.0;
  double min_distance_km = 0.035;
  double boresight0_deg = 30.0;
  int placement_attempts = 100;

  /// Reference cell-edge distance: half the inter-site spacing.
  double cell_edge_km() const { return 0.5 * site_spacing_km; }
};

constexpr int kHexSites = 19;
constexpr int kSectorsPerSite = 3;
constexpr int kHexSectors = kHexSites * kSectorsPerSite;

/// Cell centers of the 19-cell cluster, ring by ring, center first.
std::vector<Point> hex_site_positions(double spacing_km);

/// The six translation vectors that tile the plane with copies of the cluster.
std::vector<Point> hex_wrap_shifts(double spacing_km);

/// Displacement from the nearest wraparound image of `from` to `to`.
Point hex_wrap_delta(Point from, Point to, double spacing_km);

/// Parabolic sector pattern, dB (<= 0).
double antenna_gain_db(double off_boresight_rad, const HexParams& params);

/// Path loss times antenna pattern, normalized to 1 at the cell edge on
/// boresight. Multiply by 10^(shadow/10) for the full large-scale gain.
double hex_link_gain(Point user, int base, const NetworkGeometry& geometry,
                     const HexParams& params);

NetworkGeometry hex_layout(std::uint64_t seed, const HexParams& params = {});

/// Large-scale gains of a hex layout, including the shadowing stored in the
/// geometry. A transmit power equal to the linear cell-edge SNR then gives
/// that SNR at the cell edge.
LargeScaleGains hex_gains(const NetworkGeometry& geometry, const HexParams& params = {});

/// Sequential sampler for the shadowing fields: one common field plus one
/// per site, each with exponential spatial correlation. Each draw is
/// conditioned on the committed points so the joint law stays exact.
class ShadowSampler {
 public:
  ShadowSampler(std::uint64_t seed, int sites, const HexParams& params);

  /// Field values (common first, then per site) at `p`, not yet committed.
  RVector draw(Point p);
  void commit(Point p, const RVector& values);
  void remove(std::size_t index);
  std::size_t size() const { return points_.size(); }

  /// Per-site shadowing in dB from raw field values.
  RVector to_db(const RVector& values) const;

 private:
  double correlation(Point a, Point b) const;

  std::mt19937_64 rng_;
  int sites_;
  HexParams params_;
  std::vector<Point> points_;
  std::vector<RVector> values_;
};

// ------------------------------------------------------------- fading --

ChannelSet draw_channels(const LargeScaleGains& gains, const NetworkGeometry& geometry,
                         std::uint64_t seed);

/// CSV dump: one row per user, one column per base, gain in dB.
void write_gains_csv(std::ostream& out, const LargeScaleGains& gains);

}  // namespace sinp::netgen
