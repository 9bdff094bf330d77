// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/report.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "molal/clustering.h"
#include "molal/io.h"
#include "molal/pipeline.h"
#include "molal/scoring.h"
#include "molal/stats.h"

namespace molal {

namespace {

namespace fs = std::filesystem;

void require(const fs::path &p) {
  if (!fs::exists(p)) throw PipelineError(PipelineErrc::kMissingArtifact, "missing " + p.string());
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

std::ofstream open_csv(const fs::path &path, std::vector<std::string> header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv_row(out, header);
  return out;
}

CanonicalSet read_set(const fs::path &p) {
  const auto lines = read_lines(p);
  return CanonicalSet(lines.begin(), lines.end());
}

}  // namespace

ScoreSummary summarize_scores(std::span<const double> scores, double threshold) {
  ScoreSummary s;
  s.n = scores.size();
  if (scores.empty()) return s;
  const auto hits = std::count_if(scores.begin(), scores.end(), [&](double x) { return x >= threshold; });
  s.percent_at_or_above = 100.0 * static_cast<double>(hits) / static_cast<double>(s.n);
  s.q1 = stats::quantile(scores, 0.25);
  s.q2 = stats::quantile(scores, 0.5);
  s.mean = stats::mean(scores);
  s.q3 = stats::quantile(scores, 0.75);
  s.max = *std::max_element(scores.begin(), scores.end());
  s.std = stats::sample_std(scores);
  return s;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double width) {
  if (!(width > 0.0)) throw Error("histogram bin width must be positive");
  std::vector<HistogramBin> bins;
  if (values.empty()) return bins;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const long first = static_cast<long>(std::floor(*lo_it / width));
  const long last = static_cast<long>(std::floor(*hi_it / width));
  for (long b = first; b <= last; ++b)
    bins.push_back({static_cast<double>(b) * width, static_cast<double>(b + 1) * width, 0});
  for (double v : values) ++bins[static_cast<std::size_t>(static_cast<long>(std::floor(v / width)) - first)].count;
  return bins;
}

RunReport build_report(const fs::path &run_dir) {
  const RunPaths paths { run_dir };
  require(paths.config());
  const RunConfig config = RunConfig::load(paths.config());
  RunReport report;
  report.threshold = config.scoring.threshold;
  require(IterationState { 0, run_dir, 0 }.scores());
  require(paths.corpus());
  const CanonicalSet training = read_set(paths.corpus());

  for (int i = 0;; ++i) {
    const IterationState st { i, run_dir, 0 };
    if (!fs::exists(st.scores())) break;
    require(st.generated());
    require(st.stats());
    IterationReport row;
    row.iteration = i;
    for (const ScoreRecord &r : read_score_records(st.scores())) row.raw_scores.push_back(r.score);
    row.scores = summarize_scores(row.raw_scores, report.threshold);

    const nlohmann::json stats = nlohmann::json::parse(read_file(st.stats()));
    if (stats.contains("ensemble") && stats["ensemble"].contains("percent_at_or_above"))
      row.ensemble_percent = stats["ensemble"]["percent_at_or_above"].get<double>();
    const std::vector<std::string> generated = read_lines(st.generated());
    row.generated = generated.size();
    if (stats.contains("generation")) {
      const auto &g = stats["generation"];
      row.attempts = g.value("attempts", std::size_t { 0 });
      row.validity = g.value("validity", 0.0);
      row.uniqueness = g.value("uniqueness", 0.0);
    }
    std::size_t novel = 0;
    for (const std::string &s : generated)
      if (!training.contains(s)) ++novel;
    row.novelty = generated.empty() ? 0.0 : static_cast<double>(novel) / static_cast<double>(generated.size());

    if (i > 0) {
      const IterationState prev { i - 1, run_dir, 0 };
      const CanonicalSet gen(generated.begin(), generated.end());
      const CanonicalSet al = fs::exists(prev.alset()) ? read_set(prev.alset()) : CanonicalSet {};
      CanonicalSet scored;
      for (const ScoreRecord &r : read_score_records(prev.scores())) scored.insert(r.smiles);
      row.memorization = memorization(gen, al, scored);
    }
    if (fs::exists(st.clustering())) row.cluster_sizes = load_clustering(st.clustering()).sizes();
    report.iterations.push_back(std::move(row));
  }
  return report;
}

void write_report(const fs::path &run_dir, const fs::path &out_dir, const RunReport &report, double histogram_bin,
                  std::span<const std::string> references) {
  fs::create_directories(out_dir);
  {
    auto out = open_csv(out_dir / "summary.csv",
                        {"iteration", "n", "percent_at_or_above", "q1", "q2", "mean", "q3", "max", "std"});
    for (const IterationReport &r : report.iterations) {
      const ScoreSummary &s = r.scores;
      write_csv_row(out, std::vector<std::string> {std::to_string(r.iteration), std::to_string(s.n),
                                                   num(s.percent_at_or_above), num(s.q1), num(s.q2), num(s.mean),
                                                   num(s.q3), num(s.max), num(s.std)});
    }
  }
  {
    auto out = open_csv(out_dir / "score_histogram.csv", {"iteration", "bin_lower", "bin_upper", "count"});
    for (const IterationReport &r : report.iterations)
      for (const HistogramBin &b : histogram(r.raw_scores, histogram_bin))
        write_csv_row(out, std::vector<std::string> {std::to_string(r.iteration), num(b.lower), num(b.upper),
                                                     std::to_string(b.count)});
  }
  {
    auto out = open_csv(out_dir / "cluster_sizes.csv", {"iteration", "size", "count"});
    for (const IterationReport &r : report.iterations) {
      std::map<int, int> counts;
      for (int s : r.cluster_sizes) ++counts[s];
      for (const auto &[size, count] : counts)
        write_csv_row(out, std::vector<std::string> {std::to_string(r.iteration), std::to_string(size),
                                                     std::to_string(count)});
    }
  }
  {
    auto out = open_csv(out_dir / "generation_metrics.csv",
                        {"iteration", "attempts", "generated", "validity", "uniqueness", "novelty", "mem_a", "mem_b",
                         "mem_c", "mem_d", "ensemble_percent"});
    for (const IterationReport &r : report.iterations) {
      std::vector<std::string> f {std::to_string(r.iteration), std::to_string(r.attempts),
                                  std::to_string(r.generated), num(r.validity), num(r.uniqueness),
                                  num(r.novelty)};
      if (r.memorization) {
        for (double m : {r.memorization->a, r.memorization->b, r.memorization->c, r.memorization->d})
          f.push_back(num(m));
      } else {
        f.insert(f.end(), 4, "");
      }
      f.push_back(r.ensemble_percent ? num(*r.ensemble_percent) : "");
      write_csv_row(out, f);
    }
  }
  if (!references.empty()) {
    auto out = open_csv(out_dir / "similarity.csv", {"iteration", "reference", "mean_tc", "max_tc", "argmax_smiles"});
    for (const IterationReport &r : report.iterations) {
      const std::vector<std::string> gen = read_lines(IterationState { r.iteration, run_dir, 0 }.generated());
      for (const SimilarityRow &row : similarity_report(references, gen))
        write_csv_row(out, std::vector<std::string> {std::to_string(r.iteration), row.reference, num(row.mean),
                                                     num(row.max), row.argmax});
    }
  }
}

}  // namespace molal
