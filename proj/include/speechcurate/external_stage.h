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

#ifndef SPEECHCURATE_EXTERNAL_STAGE_H_
#define SPEECHCURATE_EXTERNAL_STAGE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "speechcurate/corpus.h"
#include "speechcurate/scorer_client.h"

namespace speechcurate {

struct StageResult {
  std::string stage_name;  // separate, diarize or transcribe
  std::string output_uri;
  std::map<std::string, std::string> metadata;
};

// Runs one model-backed preprocessing stage on a whole asset:
//   separate    output_uri is the separated audio
//   diarize     metadata["turns"] holds the turn list as JSON
//   transcribe  metadata["text"] holds the transcript
// Adapter failures surface as AdapterError carrying the asset id.
StageResult ApplyExternalStage(const AudioAsset& asset, const std::string& stage,
                               ScorerClient& adapter,
                               const std::string& asr_model = "whisper-large-v3");

std::vector<DiarizationTurn> TurnsFromStage(const StageResult& result);

// Label of the turn overlapping [start_s, end_s) the most; ties go to the
// earlier turn. Empty when nothing overlaps.
std::optional<std::string> DominantSpeaker(const std::vector<DiarizationTurn>& turns,
                                           double start_s, double end_s);

}  // namespace speechcurate

#endif  // SPEECHCURATE_EXTERNAL_STAGE_H_
