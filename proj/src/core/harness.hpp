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

// Seeded Monte Carlo sweeps over SNR, cluster size and strategy, with
// CSV output.
//
// Config files hold one `key = value` pair per line; `#` starts a
// comment. Lists are comma separated, and numeric lists also accept
// `start:step:stop`. Keys:
//
//   network         line | hex
//   bases           number of bases in a line network (users = bases)
//   eta, dx, dy     line geometry
//   snr_db          per-base transmit power in dB (line: SNR at unit
//                   distance; hex: cell-edge SNR)
//   cluster_sizes   coordination cluster sizes for sin and myopic-zf
//   clustering      nearest-bases, nearest-interferers (list)
//   strategies      sin, zf, dpc, myopic-zf, noncoop (list)
//   utility         sum | weighted:w1,w2,... | pf[:floor]
//   shadow_trials   large-scale realizations (hex)
//   fading_trials   fast-fading realizations per large-scale realization
//   seed            master seed
//   epsilon         outer stopping tolerance of sin
//   sin_iterations  0: iterate to epsilon; n > 0: at most n steps
//   outage          outage fraction for myopic-zf
//   threads         worker threads (results do not depend on it)
//   raw, summary, plot   output paths

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "clustering.hpp"
#include "netgen.hpp"
#include "precoders.hpp"
#include "rate_model.hpp"

namespace sinp::harness {

struct ExperimentConfig {
  netgen::NetworkKind network = netgen::NetworkKind::Line;
  int bases = 21;
  double eta = 4.0;
  double dx = 1.0;
  double dy = 1.0;
  std::vector<double> snr_db{10.0};
  std::vector<int> cluster_sizes{3};
  std::vector<clustering::Method> clusterings{clustering::Method::NearestBases};
  std::vector<precoders::Strategy> strategies{precoders::Strategy::Noncoop};
  rate_model::UtilitySpec utility;
  int shadow_trials = 1;
  int fading_trials = 1;
  std::uint64_t seed = 1;
  double epsilon = 0.01;
  int sin_iterations = 0;
  double outage = 0.1;
  int threads = 1;
  std::string raw_path = "raw.csv";
  std::string summary_path = "summary.csv";
  std::string plot_path = "plot.csv";

  /// Throws ErrorCode::InvalidArgument on an inconsistent config.
  void validate() const;
  std::string to_text() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
/// Applies one `key = value` setting.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Line network, B = K = 21, cluster sizes {3, 7, 21}, one sin step per
/// SNR point. 20 trials, or 100 with `full_scale`.
ExperimentConfig fig3_preset(bool full_scale = false);
/// Hex network at 20 dB cell-edge SNR, cluster sizes {2, 3, 5}, both
/// clustering rules. 3 x 3 realizations, or 10 x 10 with `full_scale`.
ExperimentConfig fig5_preset(bool full_scale = false);
ExperimentConfig preset(std::string_view name, bool full_scale = false);

enum class SeedDomain : std::uint64_t { Shadow = 1, Fading = 2 };

/// splitmix64 finalizer over (master, domain, a, b). Shadow seeds use
/// (shadow, 0) in the shadow domain; fading seeds use (shadow, fading) in
/// the fading domain.
std::uint64_t derive_seed(std::uint64_t master, SeedDomain domain, std::uint64_t a, std::uint64_t b);

struct ResultRow {
  int trial = 0;
  int shadow = 0;
  int fading = 0;
  std::string strategy;
  int cluster_size = 0;        // 0 when the strategy ignores clusters
  std::string clustering;      // "-" when the strategy ignores clusters
  double snr_db = 0.0;
  std::vector<double> rates;   // empty for dpc and failed rows
  double utility = 0.0;
  double normalized_sum_rate = 0.0;  // sum rate / B
  int users = 0;
  int iterations = 0;
  bool converged = true;
  bool failed = false;
  std::string note;            // flags or the error message

  /// Curve label: strategy, plus clustering and cluster size when used.
  std::string label(bool with_clustering) const;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  int bases = 0;
  int failed() const;
};

/// Rows come out in (trial, snr, strategy, clustering, cluster size)
/// order regardless of `threads`. Failed rows are kept and marked;
/// more than 10% failures raise ErrorCode::Experiment.
ResultTable run_experiment(const ExperimentConfig& config);

struct SummaryRow {
  std::string strategy;
  int cluster_size = 0;
  std::string clustering;
  double snr_db = 0.0;
  int count = 0;               // non-failed rows
  int failed = 0;
  double mean_normalized_sum_rate = 0.0;
  double stderr_normalized_sum_rate = 0.0;
  double mean_user_rate = 0.0;
  double active_fraction = 0.0;  // NaN without per-user rates
  bool missing = false;          // every row of the cell failed
};

std::vector<SummaryRow> aggregate(const ResultTable& table);

/// Raw CSV: comment line "# sinp-raw v1", then
/// trial,shadow,fading,strategy,cluster_size,clustering,snr_db,users,
/// utility,normalized_sum_rate,iterations,converged,failed,rates,note
/// with rates joined by ';'.
void write_raw_csv(std::ostream& out, const ResultTable& table);
ResultTable read_raw_csv(std::istream& in, int bases);
ResultTable read_raw_csv_file(const std::string& path);

/// Summary CSV: "# sinp-summary v1", then
/// strategy,cluster_size,clustering,snr_db,count,failed,
/// mean_normalized_sum_rate,stderr_normalized_sum_rate,mean_user_rate,active_fraction
/// with empty fields for missing values.
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

/// Plot data: "# sinp-plot v1", then snr_db and one column per curve
/// (mean normalized sum rate), curves in first-appearance order.
void write_plot_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

/// Writes all three files; throws ErrorCode::Io with the path on failure.
void emit(const ResultTable& table, const std::vector<SummaryRow>& summary, const std::string& raw_path,
          const std::string& summary_path, const std::string& plot_path);

}  // namespace sinp::harness
