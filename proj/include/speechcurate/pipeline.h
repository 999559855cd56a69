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

#ifndef SPEECHCURATE_PIPELINE_H_
#define SPEECHCURATE_PIPELINE_H_

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "speechcurate/config.h"
#include "speechcurate/scorer_client.h"

namespace speechcurate {

enum class ShardStatus { kPending, kRunning, kDone, kFailed };

struct ShardState {
  int shard_id = 0;
  std::string stage;
  ShardStatus status = ShardStatus::kPending;
  int attempts = 0;
  std::filesystem::path checkpoint;  // done-marker path
};

struct StageReport {
  std::string stage;
  int shards = 0;
  int reused = 0;    // fresh done-marker found, shard not re-run
  int executed = 0;
  std::filesystem::path output;
};

// Raised after retries are exhausted; lists the shards that never finished.
class StageFailedError : public Error {
 public:
  StageFailedError(const std::string& stage, std::vector<int> failed,
                   const std::string& last_error);
  const std::vector<int>& failed() const { return failed_; }

 private:
  std::vector<int> failed_;
};

// Builds the adapter client the config asks for: stub stand-ins, or the
// HTTP client for adapters.url.
std::unique_ptr<ScorerClient> MakeAdapter(const PipelineConfig& config);

// Runs pipeline stages over files in config.work_dir:
//   ingest    -> ingested.jsonl (asset table of standardized 16 kHz audio)
//   segment   -> segmented.jsonl (+ per-shard Opus archives)
//   score     -> scored.jsonl
//   filter    -> filtered.jsonl (keep column), core.jsonl, filter_audit.jsonl
//   stats / report / build-eval / evaluate / aggregate-mos -> reports/
// Sharded stages write shard-NNNN.jsonl plus a done-marker holding a hash of
// the shard's input and the stage options; a shard whose marker matches is
// not run again.
class Pipeline {
 public:
  // `adapter` is borrowed; when null one is built from the config.
  explicit Pipeline(PipelineConfig config, ScorerClient* adapter = nullptr);

  StageReport Ingest();
  StageReport Segment();
  StageReport Score();
  void Filter();
  void Stats();
  void Report();
  void BuildEval();
  void Evaluate();
  void AggregateMos();

  void RunStage(const std::string& stage);
  // Every stage in config.stages, in order.
  void RunAll();

  const PipelineConfig& config() const { return config_; }
  const std::filesystem::path& work_dir() const { return work_; }
  ScorerClient& adapter() { return *adapter_; }
  // Human-readable progress lines (tables, summaries). Defaults to none.
  void set_output(std::ostream* out) { out_ = out; }
  const std::vector<ShardState>& last_shards() const { return shards_; }

 private:
  using ShardBody = std::function<void(int shard, const std::filesystem::path& out)>;
  StageReport RunSharded(const std::string& stage, const std::vector<std::string>& inputs,
                         const ShardBody& body);
  std::filesystem::path ShardPath(const std::string& stage, int shard) const;
  void Log(const std::string& line);
  void Print(const std::string& text);

  PipelineConfig config_;
  std::unique_ptr<ScorerClient> owned_;
  ScorerClient* adapter_;
  std::filesystem::path work_;
  std::ostream* out_ = nullptr;
  std::mutex log_mu_;
  std::vector<ShardState> shards_;
  std::atomic<int> completed_in_process_{0};
};

}  // namespace speechcurate

#endif  // SPEECHCURATE_PIPELINE_H_
