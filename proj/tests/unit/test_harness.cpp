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
#include <cmath>
#include <sstream>

#include "harness.hpp"

using namespace sinp;
using namespace sinp::harness;

namespace {

// Reference splitmix64 generator: returns the next output from `state`.
std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t finalize(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64_next(s);
}

ExperimentConfig tiny_line() {
  return parse_config(
      "network = line\n"
      "bases = 5\n"
      "snr_db = 10\n"
      "strategies = noncoop\n"
      "fading_trials = 1\n"
      "seed = 9\n");
}

}  // namespace

TEST_CASE("seed derivation is the splitmix64 chain") {
  std::uint64_t s = 0;
  CHECK(splitmix64_next(s) == 0xe220a8397b1dcdafULL);
  const std::uint64_t expected = finalize(finalize(finalize(finalize(7) ^ 2) ^ 3) ^ 4);
  CHECK(derive_seed(7, SeedDomain::Fading, 3, 4) == expected);
  CHECK(derive_seed(7, SeedDomain::Shadow, 3, 4) != expected);
  CHECK(derive_seed(7, SeedDomain::Fading, 4, 3) != expected);
}

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# comment\n"
      "network = hex   # trailing comment\n"
      "snr_db = -10:2:40\n"
      "cluster_sizes = 2, 3, 5\n"
      "clustering = nearest-bases, nearest-interferers\n"
      "strategies = sin, myopic-zf\n"
      "utility = pf:0.01\n"
      "shadow_trials = 2\n"
      "seed = 18446744073709551615\n");
  CHECK(c.network == netgen::NetworkKind::Hex);
  REQUIRE(c.snr_db.size() == 26u);
  CHECK(c.snr_db.front() == doctest::Approx(-10.0));
  CHECK(c.snr_db.back() == doctest::Approx(40.0));
  CHECK(c.snr_db[9] == doctest::Approx(8.0));
  CHECK(c.cluster_sizes == std::vector<int>{2, 3, 5});
  CHECK(c.clusterings.size() == 2u);
  CHECK(c.strategies == std::vector<precoders::Strategy>{precoders::Strategy::Sin, precoders::Strategy::MyopicZf});
  CHECK(c.utility.kind == rate_model::UtilitySpec::Kind::ProportionalFair);
  CHECK(c.shadow_trials == 2);
  CHECK(c.seed == 18446744073709551615ULL);

  // Text form parses back to the same config.
  const auto again = parse_config(c.to_text());
  CHECK(again.to_text() == c.to_text());
}

TEST_CASE("config errors carry codes") {
  auto code = [](const char* text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      return static_cast<int>(e.code());
    }
    return 0;
  };
  CHECK(code("network = ring\n") == static_cast<int>(ErrorCode::Parse));
  CHECK(code("snr_db = 10:-1:0\n") == static_cast<int>(ErrorCode::Parse));
  CHECK(code("bases = five\n") == static_cast<int>(ErrorCode::Parse));
  CHECK(code("color = blue\n") == static_cast<int>(ErrorCode::Parse));
  CHECK(code("just words\n") == static_cast<int>(ErrorCode::Parse));
  CHECK(code("seed = -1\n") == static_cast<int>(ErrorCode::Parse));
  CHECK(code("outage = 1.5\n") == static_cast<int>(ErrorCode::InvalidArgument));
  CHECK(code("bases = 3\ncluster_sizes = 4\nstrategies = sin\n") == static_cast<int>(ErrorCode::InvalidArgument));
  CHECK_THROWS_AS(load_config("/nonexistent/sinp.cfg"), Error);
  CHECK_THROWS_AS(preset("fig4"), Error);
}

TEST_CASE("presets") {
  const auto f3 = fig3_preset();
  CHECK(f3.network == netgen::NetworkKind::Line);
  CHECK(f3.bases == 21);
  CHECK(f3.fading_trials == 20);
  CHECK(f3.cluster_sizes == std::vector<int>{3, 7, 21});
  CHECK(f3.sin_iterations == 1);
  CHECK(fig3_preset(true).fading_trials == 100);
  const auto f5 = fig5_preset();
  CHECK(f5.network == netgen::NetworkKind::Hex);
  CHECK(f5.shadow_trials * f5.fading_trials == 9);
  CHECK(f5.cluster_sizes == std::vector<int>{2, 3, 5});
  CHECK(f5.snr_db == std::vector<double>{20.0});
  CHECK(fig5_preset(true).shadow_trials == 10);
}

TEST_CASE("one trial, one SNR, non-cooperative: one row matching the SINR formula") {
  const auto c = tiny_line();
  const auto table = run_experiment(c);
  REQUIRE(table.rows.size() == 1u);
  const auto& row = table.rows[0];
  CHECK(table.bases == 5);
  CHECK(row.strategy == "noncoop");
  CHECK(row.cluster_size == 0);
  CHECK(row.clustering == "-");
  CHECK_FALSE(row.failed);
  REQUIRE(row.rates.size() == 5u);

  const auto g = netgen::line_layout(5);
  const auto h = netgen::draw_channels(netgen::line_gains(g, 4.0), g, derive_seed(9, SeedDomain::Fading, 0, 0))
                     .scalar_matrix();
  const double p = 10.0;
  double total = 0.0;
  for (int i = 0; i < 5; ++i) {
    double in = 0.0;
    for (int k = 0; k < 5; ++k)
      if (k != i) in += std::norm(h(i, k)) * p;
    const double r = std::log2(1.0 + std::norm(h(i, i)) * p / (1.0 + in));
    CHECK(row.rates[static_cast<std::size_t>(i)] == doctest::Approx(r));
    total += r;
  }
  CHECK(row.normalized_sum_rate == doctest::Approx(total / 5.0));
}

TEST_CASE("runs are deterministic and independent of the thread count") {
  auto c = parse_config(
      "bases = 5\nsnr_db = 0, 20\nstrategies = noncoop, zf, sin\ncluster_sizes = 3\n"
      "fading_trials = 4\nsin_iterations = 1\nseed = 3\n");
  std::ostringstream a, b, d;
  write_raw_csv(a, run_experiment(c));
  write_raw_csv(b, run_experiment(c));
  c.threads = 3;
  write_raw_csv(d, run_experiment(c));
  CHECK(a.str() == b.str());
  CHECK(a.str() == d.str());
  c.seed = 4;
  std::ostringstream e;
  write_raw_csv(e, run_experiment(c));
  CHECK(a.str() != e.str());
}

TEST_CASE("row order and labels") {
  const auto c = parse_config(
      "bases = 4\nsnr_db = 0, 10\nstrategies = sin, noncoop\ncluster_sizes = 1, 2\n"
      "fading_trials = 2\nsin_iterations = 1\n");
  const auto t = run_experiment(c);
  REQUIRE(t.rows.size() == 2u * 2u * 3u);
  CHECK(t.rows[0].label(false) == "sin-1");
  CHECK(t.rows[0].label(true) == "sin-nearest-bases-1");
  CHECK(t.rows[1].cluster_size == 2);
  CHECK(t.rows[2].label(true) == "noncoop");
  CHECK(t.rows[3].snr_db == doctest::Approx(10.0));
  CHECK(t.rows[6].trial == 1);
}

TEST_CASE("raw CSV round trip") {
  auto t = run_experiment(tiny_line());
  t.rows.push_back(t.rows[0]);
  t.rows.back().failed = true;
  t.rows.back().rates.clear();
  t.rows.back().note = "numeric: broken, with comma";
  std::ostringstream os;
  write_raw_csv(os, t);
  CHECK(os.str().rfind("# sinp-raw v1 bases=5\n", 0) == 0);
  std::istringstream is(os.str());
  const auto back = read_raw_csv(is, 0);
  REQUIRE(back.rows.size() == 2u);
  CHECK(back.bases == 5);
  CHECK(back.rows[1].failed);
  CHECK(back.rows[1].note == "numeric: broken  with comma");  // commas blanked
  std::ostringstream again;
  write_raw_csv(again, back);
  CHECK(again.str() == os.str());

  std::istringstream bad("# other v9\n");
  CHECK_THROWS_AS(read_raw_csv(bad, 0), Error);
}

TEST_CASE("aggregation") {
  ResultTable t;
  t.bases = 2;
  auto row = [](double snr, double nsr, bool failed) {
    ResultRow r;
    r.strategy = "zf";
    r.clustering = "-";
    r.snr_db = snr;
    r.users = 4;
    r.normalized_sum_rate = nsr;
    r.rates = {nsr, 0.0};
    r.failed = failed;
    return r;
  };
  t.rows = {row(10, 1.0, false), row(0, 0.5, false), row(10, 2.0, false), row(10, 4.0, false), row(0, 0.0, true),
            row(5, 0.0, true)};
  const auto s = aggregate(t);
  REQUIRE(s.size() == 3u);
  CHECK(s[0].snr_db == doctest::Approx(0.0));
  CHECK(s[0].count == 1);
  CHECK(s[0].failed == 1);
  CHECK(s[0].stderr_normalized_sum_rate == doctest::Approx(0.0));
  CHECK(s[1].missing);
  CHECK(std::isnan(s[1].mean_normalized_sum_rate));
  // Mean 7/3, sample variance 7/3, stderr sqrt(7/9).
  CHECK(s[2].mean_normalized_sum_rate == doctest::Approx(7.0 / 3.0));
  CHECK(s[2].stderr_normalized_sum_rate == doctest::Approx(std::sqrt(7.0 / 9.0)));
  CHECK(s[2].mean_user_rate == doctest::Approx(7.0 / 3.0 * 2.0 / 4.0));
  CHECK(s[2].active_fraction == doctest::Approx(0.5));

  std::ostringstream sum, plot;
  write_summary_csv(sum, s);
  write_plot_csv(plot, s);
  CHECK(sum.str().rfind("# sinp-summary v1\n", 0) == 0);
  CHECK(plot.str().rfind("# sinp-plot v1", 0) == 0);
  CHECK(plot.str().find("\nsnr_db,zf\n") != std::string::npos);
  CHECK(plot.str().find("\n5,\n") != std::string::npos);

  ResultTable empty;
  CHECK_THROWS_AS(aggregate(empty), Error);
  std::ostringstream es, ep;
  write_summary_csv(es, {});
  write_plot_csv(ep, {});
  const std::string es_text = es.str(), ep_text = ep.str();
  CHECK(std::count(es_text.begin(), es_text.end(), '\n') == 2);
  CHECK(std::count(ep_text.begin(), ep_text.end(), '\n') == 2);
}

TEST_CASE("more than 10% failed rows is an experiment error") {
  // A utility weight vector of the wrong length makes every evaluation fail.
  auto c = tiny_line();
  c.utility = rate_model::UtilitySpec::weighted({1.0, 1.0});
  try {
    run_experiment(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Experiment);
  }
}
