// Copyright 2026 The speechcurate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// speechcurate: command-line driver for the curation and evaluation stages.
//
//   speechcurate <stage> --config run.json [--shards N] [--workers N] [--seed S]
//                [--stub-adapters | --adapter-url URL]
//   speechcurate run --config run.json      # every stage listed in the config
//   speechcurate synth --out DIR            # synthetic corpus for smoke runs

#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "speechcurate/config.h"
#include "speechcurate/pipeline.h"
#include "speechcurate/synth.h"

using namespace speechcurate;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<int> shards;
  std::optional<int> workers;
  std::optional<uint64_t> seed;
  bool stub = false;
  std::string adapter_url;
  std::string filter_mode;
  std::optional<double> removal_percentile;
  bool force = false;
};

PipelineConfig ResolveConfig(const CommonFlags& f) {
  PipelineConfig c;
  if (!f.config.empty()) c = LoadConfig(f.config);
  if (f.shards) c.shards = *f.shards;
  if (f.workers) c.workers = *f.workers;
  if (f.seed) c.seed = *f.seed;
  std::string url = f.adapter_url;
  if (url.empty()) {
    if (const char* env = std::getenv("SPEECHCURATE_ADAPTER_URL")) url = env;
  }
  if (!url.empty()) {
    c.adapters.url = url;
    c.adapters.stub = false;
  }
  if (f.stub) c.adapters.stub = true;
  if (!f.filter_mode.empty()) c.filter.mode = ParseFilterMode(f.filter_mode);
  if (f.removal_percentile) c.filter.removal_percentile = *f.removal_percentile;
  if (f.force) c.score.force = true;
  c.Validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech corpus curation and evaluation"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", flags.config, "pipeline config (JSON)");
    sub->add_option("--shards", flags.shards, "number of shards");
    sub->add_option("--workers", flags.workers, "worker threads (0 = all cores)");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_flag("--stub-adapters", flags.stub, "use deterministic in-process model stubs");
    sub->add_option("--adapter-url", flags.adapter_url,
                    "model service base URL (default: $SPEECHCURATE_ADAPTER_URL)");
  };

  std::vector<std::pair<std::string, CLI::App*>> stage_cmds;
  for (const auto& stage : KnownStages()) {
    CLI::App* sub = app.add_subcommand(stage, "run the " + stage + " stage");
    add_common(sub);
    if (stage == "filter" || stage == "report") {
      sub->add_option("--mode", flags.filter_mode, "none|wer|dnsmos|vad|combined");
      sub->add_option("--removal-percentile", flags.removal_percentile,
                      "percentage of the pool removed");
    }
    if (stage == "score") sub->add_flag("--force", flags.force, "rescore scored segments");
    stage_cmds.emplace_back(stage, sub);
  }
  CLI::App* run = app.add_subcommand("run", "run every stage listed in the config");
  add_common(run);

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic corpus");
  std::string synth_out;
  int synth_assets = 6;
  uint64_t synth_seed = 1;
  int64_t bench_per_dataset = 0;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--assets", synth_assets, "number of recordings");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--bench-per-dataset", bench_per_dataset,
                    "also write benchmark source manifests with this many records each");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      SynthCorpusOptions o;
      o.out_dir = synth_out;
      o.assets = synth_assets;
      o.seed = synth_seed;
      const SynthCorpus corpus = WriteSynthCorpus(o);
      std::cout << "synth: wrote " << corpus.config_path.string() << "\n";
      if (bench_per_dataset > 0) {
        const auto cfg = WriteSynthBenchmarkInputs(std::filesystem::path(synth_out) / "bench",
                                                   bench_per_dataset, synth_seed);
        std::cout << "synth: wrote " << cfg.string() << "\n";
      }
      return 0;
    }
    Pipeline pipeline(ResolveConfig(flags));
    pipeline.set_output(&std::cout);
    if (run->parsed()) {
      pipeline.RunAll();
      return 0;
    }
    for (const auto& [stage, sub] : stage_cmds) {
      if (sub->parsed()) pipeline.RunStage(stage);
    }
    return 0;
  } catch (const StageFailedError& e) {
    std::cerr << "speechcurate: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "speechcurate: " << e.what() << "\n";
    return 1;
  }
}
