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

#include "speechcurate/report.h"

#include <algorithm>
#include <cmath>

#include "speechcurate/manifest_io.h"
#include "speechcurate/util.h"

namespace speechcurate {
namespace {

std::string Opt(const std::optional<double>& v, int decimals) {
  return v ? FormatFixed(*v, decimals) : "-";
}

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string RenderTable(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (size_t i = 0; i < r.size(); ++i)
      width[i] = std::max(width[i], CountNonSpaceCodepoints(r[i]) +
                                        static_cast<size_t>(std::count(r[i].begin(), r[i].end(), ' ')));
  }
  std::string out;
  for (size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    std::string line;
    for (size_t i = 0; i < r.size(); ++i) {
      const size_t w = CountNonSpaceCodepoints(r[i]) +
                       static_cast<size_t>(std::count(r[i].begin(), r[i].end(), ' '));
      const std::string pad(width[i] - w, ' ');
      // First column left-aligned, numbers right-aligned.
      line += i == 0 ? r[i] + pad : pad + r[i];
      if (i + 1 < r.size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (k == 0) {
      size_t total = 0;
      for (size_t i = 0; i < width.size(); ++i) total += width[i] + (i + 1 < width.size() ? 2 : 0);
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

std::string RenderStatsTable(const std::map<std::string, DatasetStats>& per_dataset,
                             const DatasetStats& total) {
  std::vector<std::vector<std::string>> rows = {
      {"Dataset", "Size(h)", "Avg. Dur.(s)", "Sgmts.", "DNSMOS", "WER", "SR"}};
  auto row = [](const std::string& name, const DatasetStats& s) {
    return std::vector<std::string>{name,
                                    FormatFixed(s.total_hours, 3),
                                    FormatFixed(s.avg_duration_s, 2),
                                    std::to_string(s.segment_count),
                                    Opt(s.mean_dnsmos, 2),
                                    Opt(s.mean_wer, 2),
                                    Opt(s.mean_speech_ratio, 2)};
  };
  for (const auto& [name, s] : per_dataset) rows.push_back(row(name, s));
  rows.push_back(row("Total / Avg.", total));
  return RenderTable(rows);
}

std::vector<std::string> StatsLines(const std::map<std::string, DatasetStats>& per_dataset,
                                    const DatasetStats& total) {
  std::vector<std::string> out;
  auto line = [](const std::string& name, const DatasetStats& s) {
    LineBuilder b;
    b.Str("table", "dataset_stats").Str("dataset", name).Real("hours", s.total_hours)
        .Real("avg_duration_s", s.avg_duration_s).Int("segments", s.segment_count);
    if (s.mean_dnsmos) b.Real("dnsmos", *s.mean_dnsmos);
    if (s.mean_wer) b.Real("wer", *s.mean_wer);
    if (s.mean_speech_ratio) b.Real("speech_ratio", *s.mean_speech_ratio);
    return b.Finish();
  };
  for (const auto& [name, s] : per_dataset) out.push_back(line(name, s));
  out.push_back(line("Total", total));
  return out;
}

std::string RenderRetentionTable(const RetentionReport& report) {
  std::vector<std::vector<std::string>> rows = {{"Dataset", "Pool", "Core", "Retention(%)"}};
  for (const auto& r : report.rows)
    rows.push_back({r.dataset, std::to_string(r.pool_count), std::to_string(r.core_count),
                    FormatFixed(r.retention_percent, 1)});
  rows.push_back({"Total", std::to_string(report.total.pool_count),
                  std::to_string(report.total.core_count),
                  FormatFixed(report.total.retention_percent, 1)});
  return RenderTable(rows);
}

std::vector<std::string> RetentionLines(const RetentionReport& report) {
  std::vector<std::string> out;
  auto line = [](const RetentionRow& r) {
    return LineBuilder()
        .Str("table", "retention")
        .Str("dataset", r.dataset)
        .Int("pool", r.pool_count)
        .Int("core", r.core_count)
        .Real("retention_percent", r.retention_percent)
        .Finish();
  };
  for (const auto& r : report.rows) out.push_back(line(r));
  out.push_back(line(report.total));
  return out;
}

ModelEvaluation SummarizeEvaluation(const std::string& model,
                                    const ObjectiveResult& result) {
  return {model, AggregateByCategory(result, EvalMetric::kWer),
          AggregateByCategory(result, EvalMetric::kSim),
          AggregateByCategory(result, EvalMetric::kDnsmos)};
}

namespace {
constexpr Category kCategories[] = {Category::kClean, Category::kNoisy, Category::kWild,
                                    Category::kExpressive};

std::optional<double> CatMean(const CategoryTable& t, Category c) {
  auto it = t.categories.find(c);
  return it == t.categories.end() ? std::nullopt : it->second.mean;
}
}  // namespace

std::string RenderEvaluationTable(const std::vector<ModelEvaluation>& models) {
  std::vector<std::string> header = {"Model"};
  for (Category c : kCategories) {
    header.push_back(std::string(CategoryName(c)) + " WER");
    header.push_back(std::string(CategoryName(c)) + " SIM");
  }
  for (const char* h : {"Overall WER", "Overall SIM", "Overall DNSMOS"}) header.push_back(h);
  std::vector<std::vector<std::string>> rows = {header};
  for (const auto& m : models) {
    std::vector<std::string> r = {m.model};
    for (Category c : kCategories) {
      r.push_back(Opt(CatMean(m.wer, c), 2));
      r.push_back(Opt(CatMean(m.sim, c), 3));
    }
    r.push_back(Opt(m.wer.overall.mean, 2));
    r.push_back(Opt(m.sim.overall.mean, 3));
    r.push_back(Opt(m.dnsmos.overall.mean, 2));
    rows.push_back(std::move(r));
  }
  return RenderTable(rows);
}

std::vector<std::string> EvaluationLines(const std::vector<ModelEvaluation>& models) {
  std::vector<std::string> out;
  for (const auto& m : models) {
    for (const CategoryTable* t : {&m.wer, &m.sim, &m.dnsmos}) {
      auto emit = [&](const std::string& cat, const MetricAggregate& a) {
        LineBuilder b;
        b.Str("table", "evaluation").Str("model", m.model).Str("category", cat)
            .Str("metric", EvalMetricName(t->metric));
        if (a.mean) b.Real("value", *a.mean);
        b.Int("count", a.count).Int("excluded", a.excluded);
        out.push_back(b.Finish());
      };
      for (Category c : kCategories) {
        auto it = t->categories.find(c);
        if (it != t->categories.end()) emit(CategoryName(c), it->second);
      }
      emit("Overall", t->overall);
    }
  }
  return out;
}

std::string RenderMosTable(const MosTable& table, const std::string& scale) {
  const std::string name = scale == "cmos" ? "CMOS" : "SMOS";
  std::vector<std::vector<std::string>> rows = {{"Model", "Category", name, "95% CI", "n"}};
  for (const auto& [key, a] : table) {
    rows.push_back({key.first, key.second, FormatFixed(a.mean, 2),
                    "+/-" + FormatFixed(a.ci_half_width, 2), std::to_string(a.n)});
  }
  return RenderTable(rows);
}

std::vector<std::string> MosLines(const MosTable& table, const std::string& scale) {
  std::vector<std::string> out;
  for (const auto& [key, a] : table) {
    out.push_back(LineBuilder()
                      .Str("table", scale)
                      .Str("model", key.first)
                      .Str("category", key.second)
                      .Real("mean", a.mean)
                      .Real("ci_half_width", a.ci_half_width)
                      .Int("n", a.n)
                      .Finish());
  }
  return out;
}

Histogram BuildHistogram(const std::vector<double>& values, double lo, double hi,
                         int bins) {
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(static_cast<size_t>(std::max(bins, 1)), 0);
  const double width = (hi - lo) / static_cast<double>(h.counts.size());
  for (double v : values) {
    int64_t b = width > 0.0 ? static_cast<int64_t>(std::floor((v - lo) / width)) : 0;
    b = std::clamp<int64_t>(b, 0, static_cast<int64_t>(h.counts.size()) - 1);
    ++h.counts[static_cast<size_t>(b)];
  }
  return h;
}

std::string RenderHistogramSvg(const Histogram& h, double threshold,
                               const std::string& title, const std::string& x_label) {
  const double W = 480, H = 300, left = 50, right = 20, top = 36, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  int64_t peak = 1;
  for (int64_t c : h.counts) peak = std::max(peak, c);
  auto X = [&](double v) { return left + (v - h.lo) / (h.hi - h.lo) * pw; };
  auto F = [](double v) { return FormatFixed(v, 2); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + F(W) + "\" height=\"" + F(H) +
       "\" viewBox=\"0 0 " + F(W) + " " + F(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + F(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"14\">" + XmlEscape(title) + "</text>\n";
  const double bw = pw / static_cast<double>(h.counts.size());
  for (size_t i = 0; i < h.counts.size(); ++i) {
    const double bh = ph * static_cast<double>(h.counts[i]) / static_cast<double>(peak);
    s += "<rect x=\"" + F(left + bw * static_cast<double>(i)) + "\" y=\"" + F(top + ph - bh) +
         "\" width=\"" + F(std::max(bw - 1.0, 0.5)) + "\" height=\"" + F(bh) +
         "\" fill=\"#4c72b0\"/>\n";
  }
  s += "<line x1=\"" + F(left) + "\" y1=\"" + F(top + ph) + "\" x2=\"" + F(left + pw) +
       "\" y2=\"" + F(top + ph) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = h.lo + (h.hi - h.lo) * t / 4.0;
    s += "<text x=\"" + F(X(v)) + "\" y=\"" + F(top + ph + 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
         FormatFixed(v, 2) + "</text>\n";
  }
  s += "<text x=\"" + F(W / 2) + "\" y=\"" + F(H - 10) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
       XmlEscape(x_label) + "</text>\n";
  s += "<text x=\"12\" y=\"" + F(top + ph / 2) +
       "\" transform=\"rotate(-90 12 " + F(top + ph / 2) +
       ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">segments</text>\n";
  const double tx = X(std::clamp(threshold, h.lo, h.hi));
  s += "<line class=\"threshold\" x1=\"" + F(tx) + "\" y1=\"" + F(top) + "\" x2=\"" + F(tx) +
       "\" y2=\"" + F(top + ph) + "\" stroke=\"#c44e52\" stroke-width=\"2\" "
       "stroke-dasharray=\"6,3\"/>\n";
  s += "<text x=\"" + F(tx + 4) + "\" y=\"" + F(top + 12) +
       "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#c44e52\">threshold " +
       FormatFixed(threshold, 2) + "</text>\n";
  s += "</svg>\n";
  return s;
}

double ReportThreshold(const std::vector<double>& values, Metric metric,
                       const FilterPolicy& policy) {
  if (auto o = policy.overrides.For(metric)) return *o;
  if (values.empty()) return 0.0;
  const double p = policy.removal_percentile;
  return ComputePercentile(values, HigherIsBetter(metric) ? p : 100.0 - p);
}

}  // namespace speechcurate
