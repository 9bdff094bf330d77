// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_REPORT_H_
#define MOLAL_REPORT_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "molal/metrics.h"

namespace molal {

// Order statistics of one iteration's scored sample. Quartiles use linear
// interpolation between order statistics; std is the sample deviation.
struct ScoreSummary {
  std::size_t n = 0;
  double percent_at_or_above = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double mean = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double std = 0.0;
};

ScoreSummary summarize_scores(std::span<const double> scores, double threshold);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

// Fixed-width bins aligned to multiples of `width`, covering min..max.
std::vector<HistogramBin> histogram(std::span<const double> values, double width);

struct IterationReport {
  int iteration = 0;
  ScoreSummary scores;
  std::vector<double> raw_scores;
  std::optional<double> ensemble_percent;
  std::size_t attempts = 0;
  std::size_t generated = 0;
  double validity = 0.0;
  double uniqueness = 0.0;
  double novelty = 0.0;
  std::optional<Memorization> memorization;
  std::vector<int> cluster_sizes;  // empty without a clustering
};

struct RunReport {
  double threshold = 0.0;
  std::vector<IterationReport> iterations;
};

// Reads every iteration that has scores, starting from 0. Throws
// PipelineError kMissingArtifact when the config, iteration 0's scores or
// an artifact of a scored iteration is missing.
RunReport build_report(const std::filesystem::path &run_dir);

// Writes into out_dir:
//   summary.csv             iteration,n,percent_at_or_above,q1,q2,mean,q3,max,std
//   score_histogram.csv     iteration,bin_lower,bin_upper,count
//   cluster_sizes.csv       iteration,size,count
//   generation_metrics.csv  iteration,attempts,generated,validity,uniqueness,novelty,mem_a,mem_b,mem_c,mem_d
//   similarity.csv          iteration,reference,mean_tc,max_tc,argmax_smiles (with references)
void write_report(const std::filesystem::path &run_dir, const std::filesystem::path &out_dir,
                  const RunReport &report, double histogram_bin,
                  std::span<const std::string> references = {});

}  // namespace molal

#endif  // MOLAL_REPORT_H_
