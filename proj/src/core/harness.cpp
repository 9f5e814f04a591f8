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

#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace sinp::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& s, std::string_view key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    fail(ErrorCode::Parse, "config: '" + std::string(key) + "' expects a number, got '" + s + "'");
  return v;
}

long long to_int(const std::string& s, std::string_view key) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    fail(ErrorCode::Parse, "config: '" + std::string(key) + "' expects an integer, got '" + s + "'");
  return v;
}

std::vector<double> number_list(std::string_view value, std::string_view key) {
  std::vector<double> out;
  for (const auto& item : split(value, ',')) {
    const auto range = split(item, ':');
    if (range.size() == 1) {
      out.push_back(to_double(item, key));
    } else if (range.size() == 3) {
      const double a = to_double(range[0], key), step = to_double(range[1], key), b = to_double(range[2], key);
      if (!(step > 0.0) || b < a) fail(ErrorCode::Parse, "config: bad range '" + item + "' for " + std::string(key));
      const auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
      for (long long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
    } else {
      fail(ErrorCode::Parse, "config: bad list item '" + item + "' for " + std::string(key));
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_opt(double v) { return std::isfinite(v) ? fmt(v) : std::string(); }

// Notes may hold commas or quotes; keep the CSV flat.
std::string clean_note(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  return s;
}

template <class T>
std::string join(const std::vector<T>& v, auto&& f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::string(f(v[i]));
  return out;
}

}  // namespace

// ------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  require(!snr_db.empty(), "config: snr_db is empty");
  require(!strategies.empty(), "config: strategies is empty");
  require(shadow_trials >= 1 && fading_trials >= 1, "config: trial counts must be at least 1");
  require(epsilon > 0.0, "config: epsilon must be positive");
  require(sin_iterations >= 0, "config: sin_iterations must be nonnegative");
  require(outage >= 0.0 && outage < 1.0, "config: outage must lie in [0, 1)");
  require(threads >= 1, "config: threads must be at least 1");
  const int max_bases = network == netgen::NetworkKind::Line ? bases : netgen::kHexSectors;
  if (network == netgen::NetworkKind::Line) {
    require(bases >= 1, "config: bases must be positive");
    require(eta > 0.0 && dx > 0.0 && dy > 0.0, "config: line geometry must be positive");
  }
  const bool clustered = std::any_of(strategies.begin(), strategies.end(), precoders::uses_clusters);
  if (clustered) {
    require(!cluster_sizes.empty(), "config: cluster_sizes is empty");
    require(!clusterings.empty(), "config: clustering is empty");
  }
  for (int c : cluster_sizes)
    require(c >= 1 && c <= max_bases, "config: cluster size " + std::to_string(c) + " out of range");
  for (double s : snr_db) require(std::isfinite(s), "config: snr_db must be finite");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  os << "network = " << (network == netgen::NetworkKind::Line ? "line" : "hex") << '\n';
  if (network == netgen::NetworkKind::Line)
    os << "bases = " << bases << "\neta = " << fmt(eta) << "\ndx = " << fmt(dx) << "\ndy = " << fmt(dy) << '\n';
  os << "snr_db = " << join(snr_db, fmt) << '\n';
  os << "cluster_sizes = " << join(cluster_sizes, [](int c) { return std::to_string(c); }) << '\n';
  os << "clustering = " << join(clusterings, clustering::method_name) << '\n';
  os << "strategies = " << join(strategies, precoders::strategy_name) << '\n';
  os << "utility = " << utility.describe() << '\n';
  os << "shadow_trials = " << shadow_trials << "\nfading_trials = " << fading_trials << '\n';
  os << "seed = " << seed << "\nepsilon = " << fmt(epsilon) << "\nsin_iterations = " << sin_iterations << '\n';
  os << "outage = " << fmt(outage) << "\nthreads = " << threads << '\n';
  os << "raw = " << raw_path << "\nsummary = " << summary_path << "\nplot = " << plot_path << '\n';
  return os.str();
}

void apply_setting(ExperimentConfig& c, std::string_view key_in, std::string_view value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  auto positive_int = [&](int& field) {
    const long long v = to_int(value, key);
    if (v < 0 || v > std::numeric_limits<int>::max()) fail(ErrorCode::Parse, "config: '" + key + "' out of range");
    field = static_cast<int>(v);
  };
  if (key == "network") {
    if (value == "line") c.network = netgen::NetworkKind::Line;
    else if (value == "hex") c.network = netgen::NetworkKind::Hex;
    else fail(ErrorCode::Parse, "config: unknown network '" + value + "'");
  } else if (key == "bases") {
    positive_int(c.bases);
  } else if (key == "eta") {
    c.eta = to_double(value, key);
  } else if (key == "dx") {
    c.dx = to_double(value, key);
  } else if (key == "dy") {
    c.dy = to_double(value, key);
  } else if (key == "snr_db") {
    c.snr_db = number_list(value, key);
  } else if (key == "cluster_sizes") {
    c.cluster_sizes.clear();
    for (double v : number_list(value, key)) {
      if (v != std::floor(v)) fail(ErrorCode::Parse, "config: cluster sizes must be integers");
      c.cluster_sizes.push_back(static_cast<int>(v));
    }
  } else if (key == "clustering") {
    c.clusterings.clear();
    for (const auto& m : split(value, ',')) c.clusterings.push_back(clustering::parse_method(m));
  } else if (key == "strategies") {
    c.strategies.clear();
    for (const auto& s : split(value, ',')) c.strategies.push_back(precoders::parse_strategy(s));
  } else if (key == "utility") {
    c.utility = rate_model::UtilitySpec::parse(value);
  } else if (key == "shadow_trials") {
    positive_int(c.shadow_trials);
  } else if (key == "fading_trials") {
    positive_int(c.fading_trials);
  } else if (key == "seed") {
    if (value.empty() || value[0] == '-') fail(ErrorCode::Parse, "config: seed must be a nonnegative integer");
    std::size_t used = 0;
    try {
      c.seed = std::stoull(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size()) fail(ErrorCode::Parse, "config: seed must be a nonnegative integer");
  } else if (key == "epsilon") {
    c.epsilon = to_double(value, key);
  } else if (key == "sin_iterations") {
    positive_int(c.sin_iterations);
  } else if (key == "outage") {
    c.outage = to_double(value, key);
  } else if (key == "threads") {
    positive_int(c.threads);
  } else if (key == "raw") {
    c.raw_path = value;
  } else if (key == "summary") {
    c.summary_path = value;
  } else if (key == "plot") {
    c.plot_path = value;
  } else {
    fail(ErrorCode::Parse, "config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::istringstream is{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Parse, "config line " + std::to_string(n) + ": expected key = value");
    try {
      apply_setting(c, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
    } catch (const Error& e) {
      fail(e.code(), "config line " + std::to_string(n) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExperimentConfig fig3_preset(bool full_scale) {
  ExperimentConfig c;
  c.network = netgen::NetworkKind::Line;
  c.bases = 21;
  c.eta = 4.0;
  c.snr_db = number_list("-10:2:40", "snr_db");
  c.cluster_sizes = {3, 7, 21};
  c.clusterings = {clustering::Method::NearestBases};
  c.strategies = {precoders::Strategy::Noncoop, precoders::Strategy::Zf, precoders::Strategy::Dpc,
                  precoders::Strategy::Sin};
  c.fading_trials = full_scale ? 100 : 20;
  c.sin_iterations = 1;
  c.raw_path = "fig3_raw.csv";
  c.summary_path = "fig3_summary.csv";
  c.plot_path = "fig3_plot.csv";
  return c;
}

ExperimentConfig fig5_preset(bool full_scale) {
  ExperimentConfig c;
  c.network = netgen::NetworkKind::Hex;
  c.snr_db = {20.0};
  c.cluster_sizes = {2, 3, 5};
  c.clusterings = {clustering::Method::NearestBases, clustering::Method::NearestInterferers};
  c.strategies = {precoders::Strategy::Noncoop, precoders::Strategy::Sin, precoders::Strategy::MyopicZf};
  c.shadow_trials = full_scale ? 10 : 3;
  c.fading_trials = full_scale ? 10 : 3;
  c.sin_iterations = 0;
  c.raw_path = "fig5_raw.csv";
  c.summary_path = "fig5_summary.csv";
  c.plot_path = "fig5_plot.csv";
  return c;
}

ExperimentConfig preset(std::string_view name, bool full_scale) {
  if (name == "fig3") return fig3_preset(full_scale);
  if (name == "fig5") return fig5_preset(full_scale);
  fail(ErrorCode::InvalidArgument, "unknown preset '" + std::string(name) + "'");
}

std::uint64_t derive_seed(std::uint64_t master, SeedDomain domain, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(master);
  h = mix(h ^ static_cast<std::uint64_t>(domain));
  h = mix(h ^ a);
  return mix(h ^ b);
}

// ---------------------------------------------------------------- run

std::string ResultRow::label(bool with_clustering) const {
  if (cluster_size == 0) return strategy;
  return strategy + (with_clustering ? "-" + clustering : std::string()) + "-" + std::to_string(cluster_size);
}

int ResultTable::failed() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return r.failed; }));
}

namespace {

struct LargeScale {
  netgen::NetworkGeometry geometry;
  netgen::LargeScaleGains gains;
  // [method][size index]
  std::vector<std::vector<clustering::ClusterLayout>> layouts;
};

LargeScale large_scale(const ExperimentConfig& c, int shadow) {
  LargeScale ls;
  if (c.network == netgen::NetworkKind::Line) {
    ls.geometry = netgen::line_layout(c.bases, c.dx, c.dy);
    ls.gains = netgen::line_gains(ls.geometry, c.eta);
  } else {
    ls.geometry = netgen::hex_layout(derive_seed(c.seed, SeedDomain::Shadow, static_cast<std::uint64_t>(shadow), 0));
    ls.gains = netgen::hex_gains(ls.geometry);
  }
  if (std::any_of(c.strategies.begin(), c.strategies.end(), precoders::uses_clusters))
    for (auto m : c.clusterings) {
      ls.layouts.emplace_back();
      for (int size : c.cluster_sizes)
        ls.layouts.back().push_back(clustering::make_clusters(m, ls.gains, size, ls.geometry.base_antennas));
    }
  return ls;
}

std::vector<ResultRow> run_trial(const ExperimentConfig& c, const LargeScale& ls, int shadow, int fading) {
  const int trial = shadow * c.fading_trials + fading;
  const auto channels = netgen::draw_channels(
      ls.gains, ls.geometry,
      derive_seed(c.seed, SeedDomain::Fading, static_cast<std::uint64_t>(shadow), static_cast<std::uint64_t>(fading)));
  const int b = channels.num_bases();
  std::vector<ResultRow> rows;

  for (double snr : c.snr_db) {
    precoders::StrategyInput in;
    in.channels = &channels;
    in.serving = ls.geometry.serving_base;
    in.power = RVector::Constant(b, std::pow(10.0, snr / 10.0));
    in.spec = c.utility;
    in.sin.epsilon = c.epsilon;
    in.sin.iterations = c.sin_iterations;
    in.outage = c.outage;

    auto evaluate = [&](precoders::Strategy s, const clustering::ClusterLayout* layout, int size,
                        std::string clustering_name) {
      ResultRow row;
      row.trial = trial;
      row.shadow = shadow;
      row.fading = fading;
      row.strategy = std::string(precoders::strategy_name(s));
      row.cluster_size = size;
      row.clustering = std::move(clustering_name);
      row.snr_db = snr;
      row.users = channels.num_users();
      try {
        in.layout = layout;
        const auto res = precoders::evaluate(s, in);
        row.rates.assign(res.report.rates.data(), res.report.rates.data() + res.report.rates.size());
        row.utility = res.report.utility;
        row.normalized_sum_rate = res.sum_rate / b;
        row.iterations = res.iterations;
        row.converged = res.converged;
        for (const auto& f : res.flags) row.note += (row.note.empty() ? "" : "; ") + f;
        if (!std::isfinite(row.utility) || !std::isfinite(row.normalized_sum_rate))
          fail(ErrorCode::Numeric, "non-finite result");
      } catch (const Error& e) {
        row.failed = true;
        row.converged = false;
        row.rates.clear();
        row.utility = 0.0;
        row.normalized_sum_rate = 0.0;
        row.note = std::string(error_code_name(e.code())) + ": " + e.what();
      }
      rows.push_back(std::move(row));
    };

    for (auto s : c.strategies) {
      if (!precoders::uses_clusters(s)) {
        evaluate(s, nullptr, 0, "-");
        continue;
      }
      for (std::size_t m = 0; m < c.clusterings.size(); ++m)
        for (std::size_t n = 0; n < c.cluster_sizes.size(); ++n)
          evaluate(s, &ls.layouts[m][n], c.cluster_sizes[n], std::string(clustering::method_name(c.clusterings[m])));
    }
  }
  return rows;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<LargeScale> shadows;
  for (int s = 0; s < config.shadow_trials; ++s) shadows.push_back(large_scale(config, s));

  const int trials = config.shadow_trials * config.fading_trials;
  std::vector<std::vector<ResultRow>> per_trial(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::string hard_error;
  auto worker = [&] {
    for (int t = next++; t < trials; t = next++) {
      try {
        per_trial[t] = run_trial(config, shadows[t / config.fading_trials], t / config.fading_trials,
                                 t % config.fading_trials);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (hard_error.empty()) hard_error = "trial " + std::to_string(t) + ": " + e.what();
      }
    }
  };
  const int n_threads = std::min(config.threads, trials);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!hard_error.empty()) fail(ErrorCode::Experiment, hard_error);

  ResultTable table;
  table.bases = shadows.front().geometry.num_bases();
  for (auto& rows : per_trial)
    for (auto& r : rows) table.rows.push_back(std::move(r));
  const int failed = table.failed();
  if (10 * failed > static_cast<int>(table.rows.size()))
    fail(ErrorCode::Experiment, std::to_string(failed) + " of " + std::to_string(table.rows.size()) +
                                    " rows failed (limit 10%)");
  return table;
}

// ---------------------------------------------------------- aggregate

std::vector<SummaryRow> aggregate(const ResultTable& table) {
  require(!table.rows.empty(), "aggregate: empty result table");
  struct Acc {
    SummaryRow row;
    double sum = 0.0, sum2 = 0.0, user_rate = 0.0;
    double active = 0.0;
    int active_rows = 0;
  };
  std::vector<Acc> cells;
  std::map<std::tuple<std::string, int, std::string, double>, std::size_t> index;
  std::vector<std::string> curve_order;
  for (const auto& r : table.rows) {
    const auto key = std::make_tuple(r.strategy, r.cluster_size, r.clustering, r.snr_db);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, cells.size()).first;
      Acc a;
      a.row.strategy = r.strategy;
      a.row.cluster_size = r.cluster_size;
      a.row.clustering = r.clustering;
      a.row.snr_db = r.snr_db;
      cells.push_back(a);
    }
    Acc& a = cells[it->second];
    if (r.failed) {
      ++a.row.failed;
      continue;
    }
    ++a.row.count;
    a.sum += r.normalized_sum_rate;
    a.sum2 += r.normalized_sum_rate * r.normalized_sum_rate;
    if (r.users > 0) a.user_rate += r.normalized_sum_rate * table.bases / r.users;
    if (!r.rates.empty()) {
      const auto on = std::count_if(r.rates.begin(), r.rates.end(),
                                    [](double x) { return x > rate_model::kActiveRateFloor; });
      a.active += static_cast<double>(on) / static_cast<double>(r.rates.size());
      ++a.active_rows;
    }
  }

  std::vector<SummaryRow> out;
  for (auto& a : cells) {
    SummaryRow s = a.row;
    const double n = s.count;
    if (s.count == 0) {
      s.missing = true;
      s.mean_normalized_sum_rate = s.stderr_normalized_sum_rate = s.mean_user_rate = s.active_fraction =
          std::numeric_limits<double>::quiet_NaN();
    } else {
      s.mean_normalized_sum_rate = a.sum / n;
      const double var = s.count > 1 ? std::max(0.0, (a.sum2 - a.sum * a.sum / n) / (n - 1.0)) : 0.0;
      s.stderr_normalized_sum_rate = std::sqrt(var / n);
      s.mean_user_rate = a.user_rate / n;
      s.active_fraction = a.active_rows ? a.active / a.active_rows : std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(s);
  }
  // Curves in first-appearance order, SNR ascending within a curve.
  std::map<std::tuple<std::string, int, std::string>, std::size_t> curve;
  for (const auto& s : out) curve.emplace(std::make_tuple(s.strategy, s.cluster_size, s.clustering), curve.size());
  std::stable_sort(out.begin(), out.end(), [&](const SummaryRow& a, const SummaryRow& b) {
    const auto ca = curve.at({a.strategy, a.cluster_size, a.clustering});
    const auto cb = curve.at({b.strategy, b.cluster_size, b.clustering});
    return ca != cb ? ca < cb : a.snr_db < b.snr_db;
  });
  return out;
}

// ----------------------------------------------------------------- csv

void write_raw_csv(std::ostream& out, const ResultTable& table) {
  out << "# sinp-raw v1 bases=" << table.bases << '\n';
  out << "trial,shadow,fading,strategy,cluster_size,clustering,snr_db,users,utility,normalized_sum_rate,"
         "iterations,converged,failed,rates,note\n";
  for (const auto& r : table.rows) {
    out << r.trial << ',' << r.shadow << ',' << r.fading << ',' << r.strategy << ',' << r.cluster_size << ','
        << r.clustering << ',' << fmt(r.snr_db) << ',' << r.users << ',' << fmt(r.utility) << ','
        << fmt(r.normalized_sum_rate) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
        << (r.failed ? 1 : 0) << ',';
    for (std::size_t i = 0; i < r.rates.size(); ++i) out << (i ? ";" : "") << fmt(r.rates[i]);
    out << ',' << clean_note(r.note) << '\n';
  }
}

ResultTable read_raw_csv(std::istream& in, int bases) {
  ResultTable t;
  t.bases = bases;
  std::string line;
  int n = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (n == 1 && line.rfind("# sinp-raw v1", 0) != 0) fail(ErrorCode::Parse, "raw csv: unsupported version line");
      if (const auto p = line.find("bases="); p != std::string::npos && bases <= 0)
        t.bases = static_cast<int>(to_int(trim(line.substr(p + 6)), "bases"));
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 15) fail(ErrorCode::Parse, "raw csv line " + std::to_string(n) + ": expected 15 fields");
    try {
      ResultRow r;
      r.trial = static_cast<int>(to_int(f[0], "trial"));
      r.shadow = static_cast<int>(to_int(f[1], "shadow"));
      r.fading = static_cast<int>(to_int(f[2], "fading"));
      r.strategy = f[3];
      r.cluster_size = static_cast<int>(to_int(f[4], "cluster_size"));
      r.clustering = f[5];
      r.snr_db = to_double(f[6], "snr_db");
      r.users = static_cast<int>(to_int(f[7], "users"));
      r.utility = to_double(f[8], "utility");
      r.normalized_sum_rate = to_double(f[9], "normalized_sum_rate");
      r.iterations = static_cast<int>(to_int(f[10], "iterations"));
      r.converged = to_int(f[11], "converged") != 0;
      r.failed = to_int(f[12], "failed") != 0;
      if (!f[13].empty())
        for (const auto& x : split(f[13], ';')) r.rates.push_back(to_double(x, "rates"));
      r.note = f[14];
      t.rows.push_back(std::move(r));
    } catch (const Error& e) {
      fail(ErrorCode::Parse, "raw csv line " + std::to_string(n) + ": " + e.what());
    }
  }
  if (t.bases <= 0) fail(ErrorCode::Parse, "raw csv: base count missing from the version line");
  return t;
}

ResultTable read_raw_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  try {
    return read_raw_csv(in, 0);
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "# sinp-summary v1\n";
  out << "strategy,cluster_size,clustering,snr_db,count,failed,mean_normalized_sum_rate,"
         "stderr_normalized_sum_rate,mean_user_rate,active_fraction\n";
  for (const auto& s : summary)
    out << s.strategy << ',' << s.cluster_size << ',' << s.clustering << ',' << fmt(s.snr_db) << ',' << s.count
        << ',' << s.failed << ',' << fmt_opt(s.mean_normalized_sum_rate) << ','
        << fmt_opt(s.stderr_normalized_sum_rate) << ',' << fmt_opt(s.mean_user_rate) << ','
        << fmt_opt(s.active_fraction) << '\n';
}

void write_plot_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  std::vector<std::string> clusterings;
  for (const auto& s : summary)
    if (s.cluster_size != 0 && std::find(clusterings.begin(), clusterings.end(), s.clustering) == clusterings.end())
      clusterings.push_back(s.clustering);
  const bool with_clustering = clusterings.size() > 1;

  std::vector<std::string> labels;
  std::vector<double> snrs;
  std::map<std::pair<std::string, double>, double> value;
  for (const auto& s : summary) {
    ResultRow r;
    r.strategy = s.strategy;
    r.cluster_size = s.cluster_size;
    r.clustering = s.clustering;
    const auto label = r.label(with_clustering);
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
    if (std::find(snrs.begin(), snrs.end(), s.snr_db) == snrs.end()) snrs.push_back(s.snr_db);
    value[{label, s.snr_db}] = s.mean_normalized_sum_rate;
  }
  std::sort(snrs.begin(), snrs.end());
  out << "# sinp-plot v1 mean normalized sum rate (bits/s/Hz per base)\n";
  out << "snr_db";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (double snr : snrs) {
    out << fmt(snr);
    for (const auto& l : labels) {
      const auto it = value.find({l, snr});
      out << ',' << (it == value.end() ? std::string() : fmt_opt(it->second));
    }
    out << '\n';
  }
}

void emit(const ResultTable& table, const std::vector<SummaryRow>& summary, const std::string& raw_path,
          const std::string& summary_path, const std::string& plot_path) {
  auto write = [](const std::string& path, auto&& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    body(out);
    out.flush();
    if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
  };
  if (!raw_path.empty()) write(raw_path, [&](std::ostream& o) { write_raw_csv(o, table); });
  if (!summary_path.empty()) write(summary_path, [&](std::ostream& o) { write_summary_csv(o, summary); });
  if (!plot_path.empty()) write(plot_path, [&](std::ostream& o) { write_plot_csv(o, summary); });
}

}  // namespace sinp::harness
