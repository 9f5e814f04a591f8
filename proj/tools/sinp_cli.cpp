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

// sinp run <config> | aggregate <raw.csv> | repro fig3|fig5
//
// Failures print one line to stderr,
//   error: code=<status name> message=<text>
// and exit with the numeric status.

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "sinp/sinp.h"

namespace {

int report(sinp_status s) {
  std::fprintf(stderr, "error: code=%s message=%s\n", sinp_status_name(s), sinp_last_error());
  return static_cast<int>(s);
}

struct Overrides {
  std::string snr, cluster_sizes, strategies, seed, trials, shadows, threads;
  std::string out_dir;

  void attach(CLI::App* cmd) {
    cmd->add_option("--snr", snr, "SNR list in dB, e.g. 0,10,20 or -10:2:40");
    cmd->add_option("--cluster-size", cluster_sizes, "cluster sizes, e.g. 3,7");
    cmd->add_option("--strategy", strategies, "strategies, e.g. sin,zf");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--trials", trials, "fast-fading realizations per large-scale realization");
    cmd->add_option("--shadows", shadows, "large-scale realizations");
    cmd->add_option("--threads", threads, "worker threads");
    cmd->add_option("--out", out_dir, "output directory");
  }

  sinp_status apply(sinp_config* c) const {
    const std::pair<const char*, const std::string*> settings[] = {
        {"snr_db", &snr},     {"cluster_sizes", &cluster_sizes}, {"strategies", &strategies},
        {"seed", &seed},      {"fading_trials", &trials},        {"shadow_trials", &shadows},
        {"threads", &threads}};
    for (const auto& [key, value] : settings)
      if (!value->empty())
        if (const auto s = sinp_config_set(c, key, value->c_str()); s != SINP_OK) return s;
    return SINP_OK;
  }
};

int run_config(sinp_config* config, const Overrides& o) {
  if (const auto s = o.apply(config); s != SINP_OK) return report(s);
  sinp_results* results = nullptr;
  if (const auto s = sinp_run(config, &results); s != SINP_OK) return report(s);
  const auto s = sinp_results_write_configured(results, config, o.out_dir.c_str());
  size_t rows = 0, failed = 0;
  sinp_results_counts(results, &rows, &failed);
  sinp_results_free(results);
  if (s != SINP_OK) return report(s);
  std::printf("rows=%zu failed=%zu\n", rows, failed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Downlink precoding experiments"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides run_overrides;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "config file")->required();
  run_overrides.attach(run);

  std::string raw_path, summary_path = "summary.csv", plot_path = "plot.csv";
  auto* agg = app.add_subcommand("aggregate", "summarize a raw result CSV");
  agg->add_option("raw", raw_path, "raw CSV")->required();
  agg->add_option("--summary", summary_path, "summary CSV path");
  agg->add_option("--plot", plot_path, "plot data path");

  std::string figure;
  bool full_scale = false;
  Overrides repro_overrides;
  auto* repro = app.add_subcommand("repro", "run a built-in figure preset");
  repro->add_option("figure", figure, "fig3 or fig5")->required()->check(CLI::IsMember({"fig3", "fig5"}));
  repro->add_flag("--full-scale", full_scale, "use the full trial counts");
  repro_overrides.attach(repro);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: code=%s message=%s\n", sinp_status_name(SINP_ERR_INVALID_ARGUMENT), e.what());
    return static_cast<int>(SINP_ERR_INVALID_ARGUMENT);
  }

  if (*run) {
    sinp_config* config = nullptr;
    if (const auto s = sinp_config_load(config_path.c_str(), &config); s != SINP_OK) return report(s);
    const int rc = run_config(config, run_overrides);
    sinp_config_free(config);
    return rc;
  }
  if (*repro) {
    sinp_config* config = nullptr;
    if (const auto s = sinp_config_preset(figure.c_str(), full_scale ? 1 : 0, &config); s != SINP_OK)
      return report(s);
    const int rc = run_config(config, repro_overrides);
    sinp_config_free(config);
    return rc;
  }
  sinp_results* results = nullptr;
  if (const auto s = sinp_results_load_raw(raw_path.c_str(), &results); s != SINP_OK) return report(s);
  const auto s = sinp_results_write(results, nullptr, summary_path.c_str(), plot_path.c_str());
  sinp_results_free(results);
  if (s != SINP_OK) return report(s);
  return 0;
}
