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

#include "speechcurate/mos.h"

#include <cmath>

#include "speechcurate/manifest_io.h"
#include "speechcurate/util.h"

namespace speechcurate {
namespace {

void CheckScale(const std::vector<SubjectiveItem>& items, MosScale scale) {
  const int lo = scale == MosScale::kCmos ? -3 : 1;
  const int hi = scale == MosScale::kCmos ? 3 : 5;
  for (const auto& it : items) {
    if (it.rating < lo || it.rating > hi)
      throw ValidationError("rating " + std::to_string(it.rating) + " on page '" +
                            it.page_id + "' outside [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  }
}

MosTable Pool(const std::vector<SubjectiveItem>& items, bool unfold) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& it : items) {
    const double v = unfold && it.model_first ? -it.rating : it.rating;
    groups[{it.model, it.category}].push_back(v);
    groups[{it.model, "Overall"}].push_back(v);
  }
  MosTable out;
  for (const auto& [key, values] : groups) out[key] = MeanWithCi(values);
  return out;
}

}  // namespace

std::vector<SubjectiveItem> QcExclude(const std::vector<SubjectiveItem>& items,
                                      int64_t* dropped_pages) {
  std::map<std::pair<std::string, std::string>, std::vector<size_t>> pages;
  for (size_t i = 0; i < items.size(); ++i)
    pages[{items[i].annotator_id, items[i].page_id}].push_back(i);
  std::vector<bool> drop(items.size(), false);
  int64_t dropped = 0;
  for (const auto& [key, idx] : pages) {
    if (idx.size() != 5)
      throw ValidationError("page '" + key.second + "' of annotator '" + key.first +
                            "' has " + std::to_string(idx.size()) + " items, expected 5");
    bool uniform = true;
    for (size_t i : idx) uniform = uniform && items[i].rating == items[idx[0]].rating;
    if (uniform) {
      ++dropped;
      for (size_t i : idx) drop[i] = true;
    }
  }
  if (dropped_pages) *dropped_pages = dropped;
  std::vector<SubjectiveItem> out;
  for (size_t i = 0; i < items.size(); ++i)
    if (!drop[i]) out.push_back(items[i]);
  return out;
}

MosAggregate MeanWithCi(const std::vector<double>& values) {
  MosAggregate a;
  a.n = static_cast<int64_t>(values.size());
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(a.n);
  if (a.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    const double sd = std::sqrt(ss / static_cast<double>(a.n - 1));
    a.ci_half_width = 1.96 * sd / std::sqrt(static_cast<double>(a.n));
  }
  return a;
}

MosTable AggregateCmos(const std::vector<SubjectiveItem>& items) {
  CheckScale(items, MosScale::kCmos);
  return Pool(QcExclude(items), /*unfold=*/true);
}

MosTable AggregateSmos(const std::vector<SubjectiveItem>& items) {
  CheckScale(items, MosScale::kSmos);
  return Pool(QcExclude(items), /*unfold=*/false);
}

std::vector<SubjectiveItem> ReadSubjectiveItems(const std::filesystem::path& path) {
  return ReadLines(path, [](std::string_view line, size_t n) {
    FieldReader f(line, n);
    f.RejectUnknown({"page_id", "item_index", "annotator_id", "model", "category",
                     "order_flag", "rating"});
    SubjectiveItem it;
    it.page_id = f.Str("page_id");
    it.item_index = static_cast<int>(f.Int("item_index"));
    if (it.item_index < 1 || it.item_index > 5) f.Fail("item_index", "must be in 1..5");
    it.annotator_id = f.Str("annotator_id");
    it.model = f.Str("model");
    it.category = f.OptStr("category").value_or("all");
    it.model_first = f.OptBool("order_flag").value_or(false);
    it.rating = static_cast<int>(f.Int("rating"));
    return it;
  });
}

}  // namespace speechcurate
