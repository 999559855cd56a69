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

#ifndef SPEECHCURATE_MOS_H_
#define SPEECHCURATE_MOS_H_

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace speechcurate {

enum class MosScale { kCmos, kSmos };

// One rating from one annotator. For CMOS the rating says how much better
// Audio B is than Audio A; `model_first` is true when the model under test
// was shown as Audio A.
struct SubjectiveItem {
  std::string page_id;
  int item_index = 1;  // 1..5 within the page
  std::string annotator_id;
  std::string model;
  std::string category = "all";
  bool model_first = false;
  int rating = 0;
};

// Pages are (annotator, page) groups of exactly five items. Any page whose
// five ratings are identical is dropped entirely. Throws ValidationError for
// a page without five items.
std::vector<SubjectiveItem> QcExclude(const std::vector<SubjectiveItem>& items,
                                      int64_t* dropped_pages = nullptr);

struct MosAggregate {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 1.96 s / sqrt(n)
  int64_t n = 0;
  double lower() const { return mean - ci_half_width; }
  double upper() const { return mean + ci_half_width; }
};

// Keyed by (model, category); every model also gets an "Overall" entry
// pooled across categories. Ratings outside the scale throw.
using MosTable = std::map<std::pair<std::string, std::string>, MosAggregate>;

// Unfolds the presentation order (ratings of pages showing the model as
// Audio A are negated), applies QcExclude, then pools per model/category.
MosTable AggregateCmos(const std::vector<SubjectiveItem>& items);
MosTable AggregateSmos(const std::vector<SubjectiveItem>& items);

MosAggregate MeanWithCi(const std::vector<double>& values);

std::vector<SubjectiveItem> ReadSubjectiveItems(const std::filesystem::path& path);

}  // namespace speechcurate

#endif  // SPEECHCURATE_MOS_H_
