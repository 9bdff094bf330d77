// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "molal/io.h"
#include "molal/stats.h"

namespace molal {

const char *to_string(Method m) {
  switch (m) {
  case Method::kUniform: return "uniform";
  case Method::kLinear: return "linear";
  case Method::kSoftsub: return "softsub";
  case Method::kSoftdiv: return "softdiv";
  }
  return "?";
}

Method method_from_string(std::string_view s) {
  if (s == "uniform")
    return Method::kUniform;
  if (s == "linear")
    return Method::kLinear;
  if (s == "softsub")
    return Method::kSoftsub;
  if (s == "softdiv")
    return Method::kSoftdiv;
  throw ValidationError("unknown conversion method '" + std::string(s) + "'");
}

int ClusterScoreMap::defined() const {
  return static_cast<int>(std::count_if(means.begin(), means.end(),
                                        [](const auto &m) { return m.has_value(); }));
}

ClusterScoreMap cluster_scores(std::span<const ScoreRecord> records, int k, bool median) {
  if (k < 1)
    throw SamplingError(SamplingErrc::kBadArgument, "k must be positive");
  std::vector<std::vector<double>> per(static_cast<std::size_t>(k));
  for (const ScoreRecord &r: records) {
    if (r.cluster >= 0 && r.cluster < k)
      per[static_cast<std::size_t>(r.cluster)].push_back(r.score);
  }
  ClusterScoreMap out;
  for (const auto &s: per) {
    out.counts.push_back(static_cast<int>(s.size()));
    if (s.empty())
      out.means.emplace_back();
    else
      out.means.emplace_back(median ? stats::quantile(s, 0.5) : stats::mean(s));
  }
  return out;
}

std::vector<double> to_fractions(const ClusterScoreMap &scores, Method method, double divf) {
  const int k = scores.k();
  if (scores.defined() == 0)
    throw SamplingError(SamplingErrc::kNoScoredClusters, "no cluster has a scored member");
  if (method == Method::kSoftdiv && !(divf > 0.0 && divf <= 1.0))
    throw SamplingError(SamplingErrc::kBadArgument, "divf must be in (0, 1]");

  std::vector<double> f(static_cast<std::size_t>(k), 0.0);
  double s_max = -INFINITY;
  double s_sum = 0.0;
  for (const auto &m: scores.means) {
    if (m) {
      s_max = std::max(s_max, *m);
      s_sum += *m;
    }
  }

  for (int i = 0; i < k; ++i) {
    const auto &m = scores.means[static_cast<std::size_t>(i)];
    if (!m)
      continue;
    double &v = f[static_cast<std::size_t>(i)];
    switch (method) {
    case Method::kUniform:
      v = 1.0;
      break;
    case Method::kLinear:
      if (*m < 0.0)
        throw SamplingError(SamplingErrc::kBadArgument, "linear conversion needs non-negative scores");
      if (!(s_sum > 0.0))
        throw SamplingError(SamplingErrc::kAllZeroScores, "cluster scores sum to zero");
      v = *m;
      break;
    case Method::kSoftsub:
      v = std::exp(*m - s_max);
      break;
    case Method::kSoftdiv:
      if (!(s_max > 0.0))
        throw SamplingError(SamplingErrc::kAllZeroScores, "maximum cluster score is not positive");
      v = std::exp(*m / (divf * s_max));
      break;
    }
  }
  const double total = std::accumulate(f.begin(), f.end(), 0.0);
  for (double &v: f)
    v /= total;
  return f;
}

std::vector<double> to_fractions_or_uniform(const ClusterScoreMap &scores, Method method,
                                            double divf, bool *fell_back) {
  try {
    auto f = to_fractions(scores, method, divf);
    if (fell_back)
      *fell_back = false;
    return f;
  } catch (const SamplingError &e) {
    if (e.code() != SamplingErrc::kAllZeroScores)
      throw;
    if (fell_back)
      *fell_back = true;
    return to_fractions(scores, Method::kUniform);
  }
}

int replica_multiplier(std::size_t passers, int floor) {
  if (floor < 0)
    throw SamplingError(SamplingErrc::kBadArgument, "replica floor must be non-negative");
  if (passers == 0)
    return 0;
  const auto f = static_cast<std::size_t>(floor);
  return static_cast<int>((f + passers - 1) / passers);
}

std::vector<int> allocate_quotas(std::span<const double> fractions, int target,
                                 std::span<const int> populations) {
  const std::size_t k = fractions.size();
  if (populations.size() != k)
    throw SamplingError(SamplingErrc::kBadArgument, "fractions and populations differ in length");
  if (target < 0)
    throw SamplingError(SamplingErrc::kBadArgument, "target must be non-negative");

  std::vector<int> q(k, 0);
  long long capacity = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (populations[i] < 0 || fractions[i] < 0.0)
      throw SamplingError(SamplingErrc::kBadArgument, "negative population or fraction");
    if (fractions[i] > 0.0)
      capacity += populations[i];
    const double ideal = fractions[i] * target;
    q[i] = static_cast<int>(std::min<double>(populations[i], std::floor(ideal + 0.5)));
  }
  const long long goal = std::min<long long>(target, capacity);
  long long have = std::accumulate(q.begin(), q.end(), 0LL);

  while (have > goal) {
    std::size_t pick = k;
    double worst = -INFINITY;
    for (std::size_t i = 0; i < k; ++i) {
      const double excess = q[i] - fractions[i] * target;
      if (q[i] > 0 && excess > worst) {
        worst = excess;
        pick = i;
      }
    }
    --q[pick];
    --have;
  }

  for (std::size_t pass = 0; pass <= k && have < goal; ++pass) {
    const long long shortfall = goal - have;
    std::vector<std::size_t> active;
    double weight = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (fractions[i] > 0.0 && q[i] < populations[i]) {
        active.push_back(i);
        weight += fractions[i];
      }
    }
    if (active.empty())
      break;
    std::vector<double> rem(k, 0.0);
    for (std::size_t i: active) {
      const double share = static_cast<double>(shortfall) * fractions[i] / weight;
      const double whole = std::floor(share);
      const int add = static_cast<int>(std::min<double>(populations[i] - q[i], whole));
      q[i] += add;
      have += add;
      rem[i] = share - whole;
    }
    std::stable_sort(active.begin(), active.end(),
                     [&rem](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t i: active) {
      if (have >= goal)
        break;
      if (q[i] < populations[i]) {
        ++q[i];
        ++have;
      }
    }
  }
  return q;
}

nlohmann::json AlProvenance::to_json() const {
  return {
    {"method", method},
    {"divf", divf},
    {"threshold", threshold},
    {"replica_multiplier", replica_multiplier},
    {"passers", passers},
    {"replica_count", replica_count},
    {"sampled_count", sampled_count},
    {"fell_back_to_uniform", fell_back_to_uniform},
    {"fractions", fractions},
    {"quotas", quotas},
    {"draws", draws},
  };
}

std::vector<std::string> AlTrainingSet::all() const {
  std::vector<std::string> out = replicas;
  out.insert(out.end(), sampled.begin(), sampled.end());
  return out;
}

AlTrainingSet assemble_al_set(std::span<const ScoreRecord> scored,
                              std::span<const std::string> pool,
                              std::span<const int> assignments, int k,
                              const AssembleOptions &options, std::mt19937_64 &rng) {
  if (pool.empty())
    throw SamplingError(SamplingErrc::kEmptyPool, "generated pool is empty");

  AlTrainingSet set;
  AlProvenance &prov = set.provenance;
  prov.threshold = options.threshold;
  prov.method = options.method ? to_string(*options.method) : "naive";
  prov.divf = options.method == Method::kSoftdiv ? options.divf : 0.0;

  std::vector<const ScoreRecord *> passers;
  for (const ScoreRecord &r: scored) {
    if (r.score >= options.threshold)
      passers.push_back(&r);
  }
  prov.passers = passers.size();
  prov.replica_multiplier = replica_multiplier(passers.size(), options.replica_floor);
  for (const ScoreRecord *r: passers) {
    for (int n = 0; n < prov.replica_multiplier; ++n)
      set.replicas.push_back(r->smiles);
  }
  prov.replica_count = set.replicas.size();
  if (!options.method)
    return set;

  if (assignments.size() != pool.size())
    throw SamplingError(SamplingErrc::kBadArgument, "pool and assignments differ in length");

  std::unordered_set<std::string> scored_keys;
  for (const ScoreRecord &r: scored)
    scored_keys.insert(r.smiles);

  std::vector<std::vector<std::size_t>> unscored(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const int c = assignments[i];
    if (c < 0 || c >= k)
      throw SamplingError(SamplingErrc::kBadArgument, "assignment out of range");
    if (scored_keys.count(pool[i]) == 0)
      unscored[static_cast<std::size_t>(c)].push_back(i);
  }
  std::vector<int> populations;
  for (const auto &u: unscored)
    populations.push_back(static_cast<int>(u.size()));

  const ClusterScoreMap means = cluster_scores(scored, k, options.median);
  prov.fractions = to_fractions_or_uniform(means, *options.method, options.divf,
                                           &prov.fell_back_to_uniform);
  prov.quotas = allocate_quotas(prov.fractions, options.sample_target, populations);
  for (int c = 0; c < k; ++c) {
    auto &members = unscored[static_cast<std::size_t>(c)];
    const auto take = static_cast<std::size_t>(prov.quotas[static_cast<std::size_t>(c)]);
    std::vector<std::size_t> drawn;
    std::sample(members.begin(), members.end(), std::back_inserter(drawn), take, rng);
    for (std::size_t i: drawn)
      set.sampled.push_back(pool[i]);
    prov.draws.push_back(static_cast<int>(drawn.size()));
  }
  prov.sampled_count = set.sampled.size();
  return set;
}

void save_al_set(const std::filesystem::path &smi_path, const AlTrainingSet &set) {
  write_lines(smi_path, set.all());
  std::filesystem::path meta = smi_path;
  meta.replace_extension(".json");
  write_file(meta, set.provenance.to_json().dump(1));
}

}  // namespace molal
