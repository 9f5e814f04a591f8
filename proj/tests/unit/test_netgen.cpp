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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "netgen.hpp"

using namespace sinp;
using namespace sinp::netgen;

TEST_CASE("line: circular offset is symmetric") {
  CHECK(circular_offset(0, 0, 21) == 0);
  CHECK(circular_offset(0, 1, 21) == 1);
  CHECK(circular_offset(0, 20, 21) == 1);
  CHECK(circular_offset(3, 15, 21) == 9);
  CHECK(circular_offset(15, 3, 21) == 9);
  CHECK(circular_offset(0, 10, 21) == 10);
  CHECK(circular_offset(0, 11, 21) == 10);
  CHECK_THROWS_AS(circular_offset(0, 21, 21), Error);
}

TEST_CASE("line: wraparound distance") {
  const auto g = line_layout(21);
  CHECK(wrap_distance(0, 0, g) == doctest::Approx(1.0));
  CHECK(wrap_distance(0, 1, g) == doctest::Approx(std::sqrt(2.0)));
  CHECK(wrap_distance(0, 20, g) == doctest::Approx(std::sqrt(2.0)));
  CHECK(wrap_distance(0, 10, g) == doctest::Approx(std::sqrt(101.0)));
  CHECK(wrap_distance(0, 10, g) == doctest::Approx(10.0499).epsilon(1e-5));

  const auto g2 = line_layout(5, 2.0, 0.5);
  CHECK(wrap_distance(1, 4, g2) == doctest::Approx(std::hypot(0.5, 4.0)));
}

TEST_CASE("line: gains follow the power law and the layout is one user per base") {
  const auto g = line_layout(7);
  CHECK(g.num_bases() == 7);
  CHECK(g.num_users() == 7);
  for (int i = 0; i < 7; ++i) CHECK(g.serving_base[i] == i);
  const auto lg = line_gains(g, 4.0);
  CHECK(lg.gain(2, 2) == doctest::Approx(1.0));
  CHECK(lg.gain(2, 3) == doctest::Approx(0.25));  // (sqrt 2)^-4
  CHECK(lg.gain(0, 6) == doctest::Approx(0.25));
  CHECK(lg.gain(0, 3) == doctest::Approx(0.01));  // distance sqrt(10)
  CHECK((lg.gain - lg.gain.transpose()).norm() == doctest::Approx(0.0));
  CHECK_THROWS_AS(line_gains(g, 0.0), Error);
}

TEST_CASE("fading draws are reproducible and scaled by the large-scale gain") {
  const auto g = line_layout(5);
  const auto lg = line_gains(g, 4.0);
  const auto a = draw_channels(lg, g, 42);
  const auto b = draw_channels(lg, g, 42);
  const auto c = draw_channels(lg, g, 43);
  REQUIRE(a.scalar());
  CHECK((a.scalar_matrix() - b.scalar_matrix()).norm() == 0.0);
  CHECK((a.scalar_matrix() - c.scalar_matrix()).norm() > 0.0);
  CHECK(a.total_antennas() == 5);
  CHECK(a.aggregate[2].cols() == 5);

  // Mean |h|^2 over many draws approaches the large-scale gain.
  double direct = 0.0, neighbour = 0.0;
  const int n = 4000;
  for (int s = 0; s < n; ++s) {
    const auto h = draw_channels(lg, g, 1000 + s).scalar_matrix();
    direct += std::norm(h(0, 0));
    neighbour += std::norm(h(0, 1));
  }
  CHECK(direct / n == doctest::Approx(1.0).epsilon(0.08));
  CHECK(neighbour / n == doctest::Approx(0.25).epsilon(0.08));
}

TEST_CASE("ChannelSet from scalar matrix") {
  CMatrix h(2, 3);
  h << 1.0, cplx(0, 2), 3.0, 4.0, 5.0, cplx(6, -1);
  const auto cs = ChannelSet::from_scalar(h);
  CHECK(cs.num_users() == 2);
  CHECK(cs.num_bases() == 3);
  CHECK((cs.scalar_matrix() - h).norm() == 0.0);
  CHECK(cs.link[1][2](0, 0) == cplx(6, -1));
  CHECK(cs.base_offset[2] == 2);
}

TEST_CASE("hex: sector pattern") {
  const HexParams p;
  const double deg = std::numbers::pi / 180.0;
  CHECK(antenna_gain_db(0.0, p) == doctest::Approx(0.0));
  CHECK(antenna_gain_db(35.0 * deg, p) == doctest::Approx(-3.0));
  CHECK(antenna_gain_db(-35.0 * deg, p) == doctest::Approx(-3.0));
  CHECK(antenna_gain_db(70.0 * deg, p) == doctest::Approx(-12.0));
  CHECK(antenna_gain_db(180.0 * deg, p) == doctest::Approx(-20.0));
}

TEST_CASE("hex: 19 sites with wraparound") {
  const double d = 0.5;
  const auto sites = hex_site_positions(d);
  REQUIRE(sites.size() == 19u);
  CHECK(std::hypot(sites[0].x, sites[0].y) == doctest::Approx(0.0));
  int ring1 = 0, ring2 = 0;
  for (const auto& s : sites) {
    const double r = std::hypot(s.x, s.y);
    if (std::abs(r - d) < 1e-9) ++ring1;
    if (r > d + 1e-9) ++ring2;
  }
  CHECK(ring1 == 6);
  CHECK(ring2 == 12);

  // With wraparound every site has exactly six neighbours at distance d.
  for (std::size_t a = 0; a < sites.size(); ++a) {
    int close = 0;
    for (std::size_t b = 0; b < sites.size(); ++b) {
      if (a == b) continue;
      const auto v = hex_wrap_delta(sites[a], sites[b], d);
      const double r = std::hypot(v.x, v.y);
      CHECK(r >= d - 1e-9);
      if (std::abs(r - d) < 1e-9) ++close;
    }
    CHECK(close == 6);
  }
}

TEST_CASE("hex: cell-edge normalization") {
  const HexParams p;
  const auto g = hex_layout(7, p);
  REQUIRE(g.num_bases() == kHexSectors);
  const int base = 4;
  const Point site = g.site_pos[g.base_site[base]];
  const double r = p.cell_edge_km();
  const Point edge{site.x + r * std::cos(g.boresight[base]), site.y + r * std::sin(g.boresight[base])};
  CHECK(hex_link_gain(edge, base, g, p) == doctest::Approx(1.0));
  const Point far{site.x + 2 * r * std::cos(g.boresight[base]), site.y + 2 * r * std::sin(g.boresight[base])};
  CHECK(hex_link_gain(far, base, g, p) == doctest::Approx(std::pow(2.0, -p.pathloss_exponent)));
}

TEST_CASE("hex: layout is seeded, one user per sector on its strongest link") {
  const HexParams p;
  const auto a = hex_layout(11, p);
  const auto b = hex_layout(11, p);
  const auto c = hex_layout(12, p);
  REQUIRE(a.num_users() == kHexSectors);
  CHECK(a.shadow_db.rows() == kHexSectors);
  CHECK(a.shadow_db.cols() == kHexSites);
  CHECK((a.shadow_db - b.shadow_db).norm() == 0.0);
  CHECK((a.shadow_db - c.shadow_db).norm() > 0.0);
  std::vector<int> served(kHexSectors, 0);
  for (int i = 0; i < a.num_users(); ++i) ++served[a.serving_base[i]];
  for (int n : served) CHECK(n == 1);
  const auto gains = hex_gains(a, p);
  CHECK(gains.num_users() == kHexSectors);
  CHECK(gains.num_bases() == kHexSectors);
  CHECK((gains.gain.array() > 0.0).all());
  for (int i = 0; i < a.num_users(); ++i) {
    Eigen::Index best = 0;
    gains.gain.row(i).maxCoeff(&best);
    CHECK(best == a.serving_base[i]);
  }
  // Gain = geometric link gain times the stored shadowing.
  const int u = 5, j = 30;
  const double expected = hex_link_gain(a.user_pos[u], j, a, p) * std::pow(10.0, a.shadow_db(u, a.base_site[j]) / 10.0);
  CHECK(gains.gain(u, j) == doctest::Approx(expected));
}

TEST_CASE("hex: shadowing statistics") {
  // Pooled over layouts, the per-link shadowing has the configured spread.
  const HexParams p;
  double sum = 0.0, sum2 = 0.0;
  int n = 0;
  for (int s = 0; s < 10; ++s) {
    const auto g = hex_layout(100 + s, p);
    for (int i = 0; i < g.shadow_db.rows(); ++i)
      for (int k = 0; k < g.shadow_db.cols(); ++k) {
        sum += g.shadow_db(i, k);
        sum2 += g.shadow_db(i, k) * g.shadow_db(i, k);
        ++n;
      }
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::abs(mean) < 2.0);
  CHECK(sd == doctest::Approx(p.shadow_std_db).epsilon(0.2));
}

TEST_CASE("gains csv") {
  LargeScaleGains g{RMatrix::Constant(2, 2, 0.1)};
  g.gain(0, 0) = 1.0;
  std::ostringstream os;
  write_gains_csv(os, g);
  CHECK(os.str().find("-10") != std::string::npos);
}
