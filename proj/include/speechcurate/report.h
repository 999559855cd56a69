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

#ifndef SPEECHCURATE_REPORT_H_
#define SPEECHCURATE_REPORT_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "speechcurate/corpus.h"
#include "speechcurate/eval_harness.h"
#include "speechcurate/mos.h"
#include "speechcurate/quality_filter.h"

namespace speechcurate {

// Aligned plain-text table. The first row is the header.
std::string RenderTable(const std::vector<std::vector<std::string>>& rows);

// Dataset | Size(h) | Avg. Dur.(s) | Sgmts. | DNSMOS | WER | SR, with a
// closing "Total / Avg." row.
std::string RenderStatsTable(const std::map<std::string, DatasetStats>& per_dataset,
                             const DatasetStats& total);
std::vector<std::string> StatsLines(const std::map<std::string, DatasetStats>& per_dataset,
                                    const DatasetStats& total);

std::string RenderRetentionTable(const RetentionReport& report);
std::vector<std::string> RetentionLines(const RetentionReport& report);

// Per-model evaluation in the layout of the category tables: WER and SIM per
// category followed by overall WER, SIM and DNSMOS.
struct ModelEvaluation {
  std::string model;
  CategoryTable wer;
  CategoryTable sim;
  CategoryTable dnsmos;
};
ModelEvaluation SummarizeEvaluation(const std::string& model,
                                    const ObjectiveResult& result);
std::string RenderEvaluationTable(const std::vector<ModelEvaluation>& models);
std::vector<std::string> EvaluationLines(const std::vector<ModelEvaluation>& models);

std::string RenderMosTable(const MosTable& table, const std::string& scale);
std::vector<std::string> MosLines(const MosTable& table, const std::string& scale);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<int64_t> counts;  // values outside [lo, hi] go to the end bins
};
Histogram BuildHistogram(const std::vector<double>& values, double lo, double hi,
                         int bins);

// Standalone SVG bar chart with a vertical threshold marker.
std::string RenderHistogramSvg(const Histogram& h, double threshold,
                               const std::string& title, const std::string& x_label);

// Threshold the report marks for a metric: the override when configured,
// else the percentile the per-metric filter would use.
double ReportThreshold(const std::vector<double>& values, Metric metric,
                       const FilterPolicy& policy);

}  // namespace speechcurate

#endif  // SPEECHCURATE_REPORT_H_
