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

#include <algorithm>
#include <set>

#include "clustering.hpp"
#include "netgen.hpp"

using namespace sinp;
using namespace sinp::clustering;

TEST_CASE("nearest bases on the line are the closest circular neighbours") {
  const auto g = netgen::line_layout(21);
  const auto gains = netgen::line_gains(g, 4.0);
  const auto layout = nearest_bases(gains, 3, g.base_antennas);
  CHECK(layout.cluster(0) == std::vector<int>{0, 1, 20});
  CHECK(layout.cluster(10) == std::vector<int>{9, 10, 11});
  const auto seven = nearest_bases(gains, 7, g.base_antennas);
  for (int i = 0; i < 21; ++i) {
    REQUIRE(seven.cluster(i).size() == 7u);
    for (int j : seven.cluster(i)) CHECK(netgen::circular_offset(i, j, 21) <= 3);
  }
  const auto full = nearest_bases(gains, 21, g.base_antennas);
  CHECK(full.cluster(4).size() == 21u);
  CHECK_THROWS_AS(nearest_bases(gains, 22, g.base_antennas), Error);
  CHECK_THROWS_AS(nearest_bases(gains, 0, g.base_antennas), Error);
}

TEST_CASE("nearest interferers: home base plus the homes of the hardest-hit users") {
  // Four users, four bases. Home of user i is base i. Base 0 hits user 2
  // harder than user 1 or 3.
  netgen::LargeScaleGains gains{RMatrix::Constant(4, 4, 0.01)};
  for (int i = 0; i < 4; ++i) gains.gain(i, i) = 1.0;
  gains.gain(2, 0) = 0.5;
  gains.gain(3, 0) = 0.2;
  const auto layout = nearest_interferers(gains, 2, {1, 1, 1, 1});
  CHECK(layout.cluster(0) == std::vector<int>{0, 2});
  const auto three = nearest_interferers(gains, 3, {1, 1, 1, 1});
  CHECK(three.cluster(0) == std::vector<int>{0, 2, 3});

  // Victims sharing one home base do not get backfilled.
  netgen::LargeScaleGains shared{RMatrix::Constant(3, 2, 0.01)};
  shared.gain(0, 0) = 1.0;
  shared.gain(1, 0) = 0.9;  // home base 0 as well
  shared.gain(2, 1) = 1.0;
  const auto c = nearest_interferers(shared, 2, {1, 1});
  CHECK(c.cluster(0) == std::vector<int>{0});
}

TEST_CASE("layout maps and association matrices") {
  const auto layout = ClusterLayout::build({{2, 0}, {1}, {0, 1, 2}}, {2, 1, 3});
  CHECK(layout.total_antennas() == 6);
  CHECK(layout.cluster(0) == std::vector<int>{0, 2});
  CHECK(layout.cluster_antennas(0) == 5);
  CHECK(layout.antenna_index(0) == std::vector<Eigen::Index>{0, 1, 3, 4, 5});
  CHECK(layout.local_offset(0, 2) == 2);
  CHECK(layout.local_offset(0, 1) == -1);
  CHECK(layout.users_of(0) == std::vector<int>{0, 2});
  CHECK(layout.users_of(1) == std::vector<int>{1, 2});
  CHECK(layout.base_offset(2) == 3);

  // embed(q) equals C q C^T with the dense association matrix.
  CMatrix q = CMatrix::Random(5, 5);
  q = q * q.adjoint();
  const RMatrix c = layout.association(0);
  CHECK(c.rows() == 6);
  CHECK(c.cols() == 5);
  const CMatrix dense = c.cast<cplx>() * q * c.transpose().cast<cplx>();
  CHECK((layout.embed(0, q) - dense).norm() < 1e-12);

  // Power per base = trace of the base's diagonal block.
  const RVector bp = layout.base_power(0, q);
  CHECK(bp(0) == doctest::Approx(q(0, 0).real() + q(1, 1).real()));
  CHECK(bp(1) == doctest::Approx(0.0));
  CHECK(bp(2) == doctest::Approx(q(2, 2).real() + q(3, 3).real() + q(4, 4).real()));
  for (int j = 0; j < 3; ++j) {
    const RMatrix e = layout.base_selector(j);
    const CMatrix block = e.transpose().cast<cplx>() * dense * e.cast<cplx>();
    CHECK(block.trace().real() == doctest::Approx(bp(j)));
  }

  CMatrix h = CMatrix::Random(2, 6);
  const CMatrix hc = h * c.cast<cplx>();
  CHECK((layout.restrict_columns(h, 0) - hc).norm() < 1e-12);
}

TEST_CASE("layout validation and text round trip") {
  CHECK_THROWS_AS(ClusterLayout::build({{}}, {1}), Error);
  CHECK_THROWS_AS(ClusterLayout::build({{0, 0}}, {1}), Error);
  CHECK_THROWS_AS(ClusterLayout::build({{3}}, {1, 1}), Error);
  const auto layout = ClusterLayout::build({{0, 1}, {1}}, {1, 1});
  const auto text = layout.to_text();
  CHECK(text.find("1: 1,2") != std::string::npos);
  CHECK(ClusterLayout::from_text(text, {1, 1}) == layout);
}

TEST_CASE("full and single-base layouts") {
  const auto full = full_coordination(3, {1, 1});
  for (int i = 0; i < 3; ++i) CHECK(full.cluster(i) == std::vector<int>{0, 1});
  const auto single = single_base({1, 0, 1}, {1, 1});
  CHECK(single.cluster(0) == std::vector<int>{1});
  CHECK(single.users_of(1) == std::vector<int>{0, 2});
}

TEST_CASE("method names") {
  CHECK(parse_method("nearest-bases") == Method::NearestBases);
  CHECK(parse_method("nearest-interferers") == Method::NearestInterferers);
  CHECK(method_name(Method::NearestInterferers) == "nearest-interferers");
  CHECK_THROWS_AS(parse_method("closest"), Error);
}

TEST_CASE("hex clusters have the requested size") {
  const auto g = netgen::hex_layout(3);
  const auto gains = netgen::hex_gains(g);
  for (int size : {2, 3, 5}) {
    const auto nb = nearest_bases(gains, size, g.base_antennas);
    const auto ni = nearest_interferers(gains, size, g.base_antennas);
    for (int i = 0; i < g.num_users(); ++i) {
      CHECK(nb.cluster(i).size() == static_cast<std::size_t>(size));
      CHECK(ni.cluster(i).size() <= static_cast<std::size_t>(size));
      // Both rules contain the strongest base.
      int best = 0;
      for (int j = 1; j < gains.num_bases(); ++j)
        if (gains.gain(i, j) > gains.gain(i, best)) best = j;
      CHECK(std::count(nb.cluster(i).begin(), nb.cluster(i).end(), best) == 1);
      CHECK(std::count(ni.cluster(i).begin(), ni.cluster(i).end(), best) == 1);
    }
  }
}
