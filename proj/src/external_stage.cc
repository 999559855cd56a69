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

#include "speechcurate/external_stage.h"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace speechcurate {

StageResult ApplyExternalStage(const AudioAsset& asset, const std::string& stage,
                               ScorerClient& adapter, const std::string& asr_model) {
  AudioRef ref;
  ref.uri = asset.uri;
  ref.asset_id = asset.asset_id;
  StageResult out;
  out.stage_name = stage;
  out.output_uri = asset.uri;
  try {
    if (stage == "separate") {
      out.output_uri = adapter.Separate(ref);
    } else if (stage == "diarize") {
      nlohmann::json turns = nlohmann::json::array();
      std::set<std::string> speakers;
      for (const auto& t : adapter.Diarize(ref)) {
        turns.push_back({{"start_s", t.start_s}, {"end_s", t.end_s},
                         {"speaker", t.speaker_label}});
        speakers.insert(t.speaker_label);
      }
      out.metadata["turns"] = turns.dump();
      out.metadata["num_speakers"] = std::to_string(speakers.size());
    } else if (stage == "transcribe") {
      out.metadata["text"] = adapter.Transcribe(ref, asr_model);
      out.metadata["model"] = asr_model;
    } else {
      throw ValidationError("unknown external stage '" + stage + "'");
    }
  } catch (const AdapterError&) {
    throw;
  } catch (const Error& e) {
    if (dynamic_cast<const ValidationError*>(&e)) throw;
    throw AdapterError(stage + ": " + e.what(), asset.asset_id);
  }
  return out;
}

std::vector<DiarizationTurn> TurnsFromStage(const StageResult& result) {
  std::vector<DiarizationTurn> out;
  auto it = result.metadata.find("turns");
  if (it == result.metadata.end()) return out;
  for (const auto& t : nlohmann::json::parse(it->second)) {
    out.push_back({t["start_s"].get<double>(), t["end_s"].get<double>(),
                   t["speaker"].get<std::string>()});
  }
  return out;
}

std::optional<std::string> DominantSpeaker(const std::vector<DiarizationTurn>& turns,
                                           double start_s, double end_s) {
  std::map<std::string, double> overlap;
  std::vector<std::string> order;
  for (const auto& t : turns) {
    const double o = std::min(end_s, t.end_s) - std::max(start_s, t.start_s);
    if (o <= 0.0) continue;
    if (!overlap.count(t.speaker_label)) order.push_back(t.speaker_label);
    overlap[t.speaker_label] += o;
  }
  std::optional<std::string> best;
  double best_o = 0.0;
  for (const auto& s : order) {
    if (overlap[s] > best_o) {
      best_o = overlap[s];
      best = s;
    }
  }
  return best;
}

}  // namespace speechcurate
