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

#include "sinp/sinp.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "harness.hpp"
#include "precoders.hpp"

struct sinp_config {
  sinp::harness::ExperimentConfig config;
};

struct sinp_results {
  sinp::harness::ResultTable table;
};

struct sinp_problem {
  sinp::netgen::ChannelSet channels;
  sinp::RVector power;
  std::vector<std::vector<int>> clusters;  // empty entry: every base
  std::vector<int> serving;
  sinp::rate_model::UtilitySpec spec;
  sinp::precoders::SinOptions sin;
  double outage = 0.1;
};

struct sinp_solution {
  sinp::precoders::StrategyResult result;
};

namespace {

thread_local std::string g_last_error;

sinp_status to_status(sinp::ErrorCode code) {
  switch (code) {
    case sinp::ErrorCode::InvalidArgument: return SINP_ERR_INVALID_ARGUMENT;
    case sinp::ErrorCode::Io: return SINP_ERR_IO;
    case sinp::ErrorCode::Parse: return SINP_ERR_PARSE;
    case sinp::ErrorCode::Numeric: return SINP_ERR_NUMERIC;
    case sinp::ErrorCode::NotConverged: return SINP_ERR_NOT_CONVERGED;
    case sinp::ErrorCode::Experiment: return SINP_ERR_EXPERIMENT;
  }
  return SINP_ERR_INTERNAL;
}

sinp_status set_error(sinp_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs `f`, translating exceptions into status codes.
template <class F>
sinp_status guarded(F&& f) {
  try {
    f();
    return SINP_OK;
  } catch (const sinp::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SINP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SINP_ERR_INTERNAL, e.what());
  }
}

sinp_status null_arg(const char* what) {
  return set_error(SINP_ERR_INVALID_ARGUMENT, std::string(what) + " must not be NULL");
}

std::string in_directory(const char* directory, const std::string& path) {
  if (!directory || !*directory || path.empty()) return path;
  return (std::filesystem::path(directory) / std::filesystem::path(path).filename()).string();
}

}  // namespace

extern "C" {

const char* sinp_version(void) { return "1.0.0"; }

const char* sinp_status_name(sinp_status status) {
  switch (status) {
    case SINP_OK: return "ok";
    case SINP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SINP_ERR_IO: return "io";
    case SINP_ERR_PARSE: return "parse";
    case SINP_ERR_NUMERIC: return "numeric";
    case SINP_ERR_NOT_CONVERGED: return "not_converged";
    case SINP_ERR_EXPERIMENT: return "experiment";
    case SINP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sinp_last_error(void) { return g_last_error.c_str(); }

// ------------------------------------------------------------- config

sinp_status sinp_config_load(const char* path, sinp_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new sinp_config{sinp::harness::load_config(path)}; });
}

sinp_status sinp_config_parse(const char* text, sinp_config** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new sinp_config{sinp::harness::parse_config(text)}; });
}

sinp_status sinp_config_preset(const char* name, int full_scale, sinp_config** out) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new sinp_config{sinp::harness::preset(name, full_scale != 0)}; });
}

sinp_status sinp_config_set(sinp_config* config, const char* key, const char* value) {
  if (!config) return null_arg("config");
  if (!key || !value) return null_arg("key and value");
  return guarded([&] {
    auto updated = config->config;
    sinp::harness::apply_setting(updated, key, value);
    updated.validate();
    config->config = std::move(updated);
  });
}

sinp_status sinp_config_text(const sinp_config* config, char* buffer, size_t capacity, size_t* needed) {
  if (!config) return null_arg("config");
  return guarded([&] {
    const std::string text = config->config.to_text();
    if (needed) *needed = text.size() + 1;
    if (buffer && capacity > text.size()) std::memcpy(buffer, text.c_str(), text.size() + 1);
  });
}

void sinp_config_free(sinp_config* config) { delete config; }

// ---------------------------------------------------------- experiments

sinp_status sinp_run(const sinp_config* config, sinp_results** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new sinp_results{sinp::harness::run_experiment(config->config)}; });
}

sinp_status sinp_results_load_raw(const char* path, sinp_results** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new sinp_results{sinp::harness::read_raw_csv_file(path)}; });
}

sinp_status sinp_results_counts(const sinp_results* results, size_t* rows, size_t* failed) {
  if (!results) return null_arg("results");
  if (rows) *rows = results->table.rows.size();
  if (failed) *failed = static_cast<size_t>(results->table.failed());
  return SINP_OK;
}

sinp_status sinp_results_write(const sinp_results* results, const char* raw_path, const char* summary_path,
                               const char* plot_path) {
  if (!results) return null_arg("results");
  return guarded([&] {
    std::vector<sinp::harness::SummaryRow> summary;
    if (!results->table.rows.empty()) summary = sinp::harness::aggregate(results->table);
    sinp::harness::emit(results->table, summary, raw_path ? raw_path : "", summary_path ? summary_path : "",
                        plot_path ? plot_path : "");
  });
}

sinp_status sinp_results_write_configured(const sinp_results* results, const sinp_config* config,
                                          const char* directory) {
  if (!config) return null_arg("config");
  if (directory && *directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) return set_error(SINP_ERR_IO, std::string("cannot create '") + directory + "': " + ec.message());
  }
  const auto& c = config->config;
  const std::string raw = in_directory(directory, c.raw_path);
  const std::string summary = in_directory(directory, c.summary_path);
  const std::string plot = in_directory(directory, c.plot_path);
  return sinp_results_write(results, raw.c_str(), summary.c_str(), plot.c_str());
}

void sinp_results_free(sinp_results* results) { delete results; }

// ------------------------------------------------------------- problems

sinp_status sinp_problem_create_scalar(int users, int bases, const double* h_re, const double* h_im,
                                       const double* power, sinp_problem** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  if (!h_re) return null_arg("h_re");
  if (!power) return null_arg("power");
  if (users < 1 || bases < 1) return set_error(SINP_ERR_INVALID_ARGUMENT, "users and bases must be positive");
  return guarded([&] {
    sinp::CMatrix h(users, bases);
    for (int i = 0; i < users; ++i)
      for (int j = 0; j < bases; ++j) {
        const std::size_t n = static_cast<std::size_t>(i) * bases + j;
        h(i, j) = sinp::cplx(h_re[n], h_im ? h_im[n] : 0.0);
      }
    sinp::require(h.allFinite(), "channel entries must be finite");
    auto p = std::make_unique<sinp_problem>();
    p->channels = sinp::netgen::ChannelSet::from_scalar(h);
    p->power = Eigen::Map<const sinp::RVector>(power, bases);
    p->clusters.assign(static_cast<std::size_t>(users), {});
    for (int i = 0; i < users; ++i) p->serving.push_back(i % bases);
    *out = p.release();
  });
}

sinp_status sinp_problem_set_cluster(sinp_problem* problem, int user, const int* bases, size_t count) {
  if (!problem) return null_arg("problem");
  if (!bases && count > 0) return null_arg("bases");
  if (user < 0 || user >= problem->channels.num_users())
    return set_error(SINP_ERR_INVALID_ARGUMENT, "user index out of range");
  for (size_t n = 0; n < count; ++n)
    if (bases[n] < 0 || bases[n] >= problem->channels.num_bases())
      return set_error(SINP_ERR_INVALID_ARGUMENT, "base index out of range");
  problem->clusters[static_cast<std::size_t>(user)].assign(bases, bases + count);
  return SINP_OK;
}

sinp_status sinp_problem_set_serving(sinp_problem* problem, const int* serving, size_t count) {
  if (!problem) return null_arg("problem");
  if (!serving) return null_arg("serving");
  if (count != static_cast<size_t>(problem->channels.num_users()))
    return set_error(SINP_ERR_INVALID_ARGUMENT, "one serving base per user required");
  for (size_t n = 0; n < count; ++n)
    if (serving[n] < 0 || serving[n] >= problem->channels.num_bases())
      return set_error(SINP_ERR_INVALID_ARGUMENT, "serving base index out of range");
  problem->serving.assign(serving, serving + count);
  return SINP_OK;
}

sinp_status sinp_problem_set_utility(sinp_problem* problem, const char* spec) {
  if (!problem) return null_arg("problem");
  if (!spec) return null_arg("spec");
  return guarded([&] {
    auto u = sinp::rate_model::UtilitySpec::parse(spec);
    u.validate(problem->channels.num_users());
    problem->spec = std::move(u);
  });
}

sinp_status sinp_problem_set_option(sinp_problem* problem, const char* key, double value) {
  if (!problem) return null_arg("problem");
  if (!key) return null_arg("key");
  const std::string k = key;
  if (k == "epsilon") {
    if (!(value > 0.0)) return set_error(SINP_ERR_INVALID_ARGUMENT, "epsilon must be positive");
    problem->sin.epsilon = value;
  } else if (k == "sin_iterations") {
    if (!(value >= 0.0) || value != std::floor(value) || value > 1e6)
      return set_error(SINP_ERR_INVALID_ARGUMENT, "sin_iterations must be a nonnegative integer");
    problem->sin.iterations = static_cast<int>(value);
  } else if (k == "outage") {
    if (!(value >= 0.0 && value < 1.0)) return set_error(SINP_ERR_INVALID_ARGUMENT, "outage must lie in [0, 1)");
    problem->outage = value;
  } else {
    return set_error(SINP_ERR_INVALID_ARGUMENT, "unknown option '" + k + "'");
  }
  return SINP_OK;
}

void sinp_problem_free(sinp_problem* problem) { delete problem; }

sinp_status sinp_solve(const sinp_problem* problem, const char* strategy, sinp_solution** out) {
  if (!problem) return null_arg("problem");
  if (!strategy) return null_arg("strategy");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const auto s = sinp::precoders::parse_strategy(strategy);
    const int b = problem->channels.num_bases();
    std::vector<std::vector<int>> clusters = problem->clusters;
    for (auto& c : clusters)
      if (c.empty())
        for (int j = 0; j < b; ++j) c.push_back(j);
    const auto layout = sinp::clustering::ClusterLayout::build(clusters, problem->channels.base_antennas);
    sinp::precoders::StrategyInput in;
    in.channels = &problem->channels;
    in.layout = &layout;
    in.serving = problem->serving;
    in.power = problem->power;
    in.spec = problem->spec;
    in.sin = problem->sin;
    in.outage = problem->outage;
    *out = new sinp_solution{sinp::precoders::evaluate(s, in)};
  });
}

sinp_status sinp_solution_sum_rate(const sinp_solution* solution, double* out) {
  if (!solution) return null_arg("solution");
  if (!out) return null_arg("out");
  *out = solution->result.sum_rate;
  return SINP_OK;
}

sinp_status sinp_solution_utility(const sinp_solution* solution, double* out) {
  if (!solution) return null_arg("solution");
  if (!out) return null_arg("out");
  *out = solution->result.report.utility;
  return SINP_OK;
}

sinp_status sinp_solution_rates(const sinp_solution* solution, double* rates, size_t capacity, size_t* count) {
  if (!solution) return null_arg("solution");
  const auto& r = solution->result.report.rates;
  const auto n = static_cast<size_t>(r.size());
  if (count) *count = n;
  if (!rates) return SINP_OK;
  if (capacity < n) return set_error(SINP_ERR_INVALID_ARGUMENT, "rate buffer too small");
  for (size_t i = 0; i < n; ++i) rates[i] = r(static_cast<Eigen::Index>(i));
  return SINP_OK;
}

sinp_status sinp_solution_info(const sinp_solution* solution, int* iterations, int* converged) {
  if (!solution) return null_arg("solution");
  if (iterations) *iterations = solution->result.iterations;
  if (converged) *converged = solution->result.converged ? 1 : 0;
  return SINP_OK;
}

void sinp_solution_free(sinp_solution* solution) { delete solution; }

}  // extern "C"
