// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/pipeline.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <utility>

#include "molal/clustering.h"
#include "molal/corpus.h"
#include "molal/descriptors.h"
#include "molal/filters.h"
#include "molal/generator.h"
#include "molal/hash.h"
#include "molal/io.h"
#include "molal/metrics.h"
#include "molal/report.h"
#include "molal/smiles.h"

namespace molal {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void bad_config(const std::string &what) { throw PipelineError(PipelineErrc::kBadConfig, what); }

template <class T>
void read_into(const json &j, const char *key, T &out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json corpus_json(const CorpusConfig &c) {
  return {{"path", c.path}, {"synthetic_size", c.synthetic_size}, {"min_count", c.min_count},
          {"block_size", c.block_size}};
}

void corpus_from(const json &j, CorpusConfig &c) {
  read_into(j, "path", c.path);
  read_into(j, "synthetic_size", c.synthetic_size);
  read_into(j, "min_count", c.min_count);
  read_into(j, "block_size", c.block_size);
}

json generator_json(const GeneratorConfig &g) {
  return {{"kind", g.kind},
          {"order", g.order},
          {"pseudo_count", g.pseudo_count},
          {"finetune_prior", g.finetune_prior},
          {"gpt", g.gpt.to_json()},
          {"pretrain", g.pretrain.to_json()},
          {"finetune", g.finetune.to_json()},
          {"optimizer", g.optimizer.to_json()},
          {"grad_clip", g.grad_clip}};
}

void generator_from(const json &j, GeneratorConfig &g) {
  read_into(j, "kind", g.kind);
  read_into(j, "order", g.order);
  read_into(j, "pseudo_count", g.pseudo_count);
  read_into(j, "finetune_prior", g.finetune_prior);
  if (j.contains("gpt")) {
    json merged = g.gpt.to_json();
    merged.update(j["gpt"]);
    g.gpt = GptConfig::from_json(merged);
  }
  if (j.contains("pretrain")) {
    json merged = g.pretrain.to_json();
    merged.update(j["pretrain"]);
    g.pretrain = TrainSchedule::from_json(merged);
  }
  if (j.contains("finetune")) {
    json merged = g.finetune.to_json();
    merged.update(j["finetune"]);
    g.finetune = TrainSchedule::from_json(merged);
  }
  if (j.contains("optimizer")) {
    json merged = g.optimizer.to_json();
    merged.update(j["optimizer"]);
    g.optimizer = OptimizerConfig::from_json(merged);
  }
  read_into(j, "grad_clip", g.grad_clip);
}

json generation_json(const GenerationConfig &g) {
  return {{"target", g.target},           {"max_attempts", g.max_attempts}, {"temperature", g.temperature},
          {"admet_filter", g.admet_filter}, {"group_filter", g.group_filter}, {"strict", g.strict},
          {"bounds_path", g.bounds_path},   {"patterns_path", g.patterns_path}};
}

void generation_from(const json &j, GenerationConfig &g) {
  read_into(j, "target", g.target);
  read_into(j, "max_attempts", g.max_attempts);
  read_into(j, "temperature", g.temperature);
  read_into(j, "admet_filter", g.admet_filter);
  read_into(j, "group_filter", g.group_filter);
  read_into(j, "strict", g.strict);
  read_into(j, "bounds_path", g.bounds_path);
  read_into(j, "patterns_path", g.patterns_path);
}

// Oracle config merged key by key so a partial override keeps the rest.
void oracle_from(const json &j, OracleConfig &o) {
  json merged = o.to_json();
  merged.update(j);
  o = OracleConfig::from_json(merged);
}

std::vector<double> column_sd(const PcaModel &pca) {
  std::vector<double> sd;
  for (double l : pca.eigenvalues) sd.push_back(l > 0.0 ? std::sqrt(l) : 1.0);
  return sd;
}

ProxyPoint whiten(const ProxyPoint &p, const std::vector<double> &sd) {
  ProxyPoint w = p;
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) /= sd[static_cast<std::size_t>(i)];
  return w;
}

template <class F>
auto run_stage(const char *name, const ProgressFn &progress, F &&body) -> decltype(body()) {
  if (progress) progress(name);
  try {
    return body();
  } catch (const PipelineError &) {
    throw;
  } catch (const std::exception &e) {
    throw PipelineError(PipelineErrc::kStage, std::string("stage ") + name + ": " + e.what());
  }
}

// Descriptor rows for canonical SMILES, from MQN or an ingested table.
class DescriptorSource {
 public:
  explicit DescriptorSource(const ProxyConfig &cfg) {
    if (!cfg.descriptor_table.empty()) table_ = ingest_descriptor_table(fs::path(cfg.descriptor_table));
  }

  std::string schema() const { return table_ ? table_->schema : std::string(kMqnSchema); }

  Matrix rows(std::span<const std::string> smiles) const {
    std::vector<std::vector<double>> values;
    values.reserve(smiles.size());
    for (const std::string &s : smiles) {
      if (table_) {
        auto it = table_->rows.find(s);
        if (it == table_->rows.end())
          throw PipelineError(PipelineErrc::kStage, "descriptor table has no row for " + s);
        values.push_back(it->second.values());
      } else {
        values.push_back(compute_mqn(parse_smiles(s)).values());
      }
    }
    const std::size_t f = values.empty() ? 0 : values.front().size();
    Matrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(f));
    for (std::size_t i = 0; i < values.size(); ++i)
      for (std::size_t j = 0; j < f; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
    return m;
  }

 private:
  std::optional<DescriptorTable> table_;
};

std::unique_ptr<ScoreSource> make_score_source(const ScoringConfig &cfg) {
  if (cfg.source == "oracle") return std::make_unique<OracleScoreSource>(cfg.oracle);
  const FingerprintIngest ingest = ingest_fingerprints(fs::path(cfg.table), cfg.weights);
  return std::make_unique<TableScoreSource>(ingest.records);
}

CandidateFilter make_filter(const GenerationConfig &cfg) {
  if (!cfg.admet_filter && !cfg.group_filter) return {};
  auto fs = std::make_shared<FilterSet>();
  fs->admet = cfg.admet_filter;
  fs->groups = cfg.group_filter;
  fs->strict = cfg.strict;
  if (!cfg.bounds_path.empty()) fs->bounds = AdmetBounds::load(cfg.bounds_path);
  if (!cfg.patterns_path.empty()) fs->patterns = load_patterns(cfg.patterns_path);
  return [fs](const Molecule &mol) { return fs->reject_reason(mol); };
}

json summary_json(std::span<const double> scores, double threshold) {
  const ScoreSummary s = summarize_scores(scores, threshold);
  return {{"n", s.n},       {"percent_at_or_above", s.percent_at_or_above},
          {"q1", s.q1},     {"q2", s.q2},
          {"mean", s.mean}, {"q3", s.q3},
          {"max", s.max},   {"std", s.std}};
}

}  // namespace

double markov_finetune_weight(std::size_t n, double prior) {
  return static_cast<double>(n) / (static_cast<double>(n) + prior);
}

const char *to_string(Mode m) {
  switch (m) {
    case Mode::kComplete: return "complete";
    case Mode::kUniform: return "uniform";
    case Mode::kNaive: return "naive";
  }
  return "complete";
}

Mode mode_from_string(std::string_view s) {
  if (s == "complete") return Mode::kComplete;
  if (s == "uniform") return Mode::kUniform;
  if (s == "naive") return Mode::kNaive;
  throw ValidationError("unknown mode '" + std::string(s) + "' (expected complete, uniform or naive)");
}

RunConfig RunConfig::full() {
  RunConfig c;
  c.preset = "full";
  c.corpus.synthetic_size = 200000;
  c.generator.kind = "gpt";
  c.generation.target = 100000;
  c.generation.admet_filter = true;
  c.generation.group_filter = true;
  return c;
}

RunConfig RunConfig::desk() {
  RunConfig c;
  c.preset = "desk";
  c.corpus.synthetic_size = 20000;
  c.corpus.min_count = 50;
  c.corpus.block_size = 133;
  c.generator.kind = "markov";
  c.generator.gpt = GptConfig::desk(0, c.corpus.block_size);
  c.generator.pretrain.batch_size = 64;
  c.generator.pretrain.epochs = 2;
  c.generator.finetune.batch_size = 64;
  c.generator.finetune.epochs = 2;
  c.generation.target = 2000;
  c.proxy.components = 16;
  c.clustering.k = 25;
  c.clustering.restarts = 10;
  c.clustering.per_cluster = 4;
  c.clustering.sample = 100;
  c.scoring.threshold = kHnhThreshold;
  c.scoring.oracle.base = 0.0;
  c.scoring.oracle.amplitude = 40.0;
  c.scoring.oracle.sigma = 1.5;
  c.scoring.oracle.target = {1.5, 0.0};
  c.scoring.oracle.trend = {4.0, 1.5};
  c.al_set.replica_floor = 500;
  c.al_set.sample_target = 500;
  return c;
}

void RunConfig::validate() const {
  if (iterations < 0) bad_config("iterations must be non-negative");
  if (!(divf > 0.0 && divf <= 1.0)) bad_config("divf must be in (0, 1]");
  if (corpus.path.empty() && corpus.synthetic_size == 0) bad_config("synthetic corpus size must be positive");
  if (corpus.min_count < 1) bad_config("corpus.min_count must be at least 1");
  if (corpus.block_size < 1) bad_config("corpus.block_size must be positive");
  if (generator.kind != "markov" && generator.kind != "gpt") bad_config("generator.kind must be markov or gpt");
  if (generator.order < 1) bad_config("generator.order must be at least 1");
  if (!(generator.pseudo_count >= 0.0)) bad_config("generator.pseudo_count must be non-negative");
  if (!(generator.finetune_prior > 0.0)) bad_config("generator.finetune_prior must be positive");
  if (!(generator.grad_clip > 0.0)) bad_config("generator.grad_clip must be positive");
  generator.pretrain.validate();
  generator.finetune.validate();
  if (generation.target < 1) bad_config("generation.target must be at least 1");
  if (!(generation.temperature >= 0.0)) bad_config("generation.temperature must be non-negative");
  if (proxy.components < 1) bad_config("proxy.components must be positive");
  if (clustering.k < 1) bad_config("clustering.k must be positive");
  if (clustering.restarts < 1) bad_config("clustering.restarts must be positive");
  if (clustering.max_iterations < 1) bad_config("clustering.max_iterations must be positive");
  if (clustering.per_cluster < 0 || clustering.sample < 1) bad_config("invalid scoring sample size");
  if (scoring.source != "oracle" && scoring.source != "table") bad_config("scoring.source must be oracle or table");
  if (scoring.source == "table" && scoring.table.empty()) bad_config("scoring.table is required for the table source");
  if (!std::isfinite(scoring.threshold)) bad_config("scoring.threshold must be finite");
  if (al_set.replica_floor < 0 || al_set.sample_target < 0) bad_config("AL set sizes must be non-negative");
  if (!(report.histogram_bin > 0.0)) bad_config("report.histogram_bin must be positive");
}

json RunConfig::to_json() const {
  return {{"preset", preset},
          {"mode", molal::to_string(mode)},
          {"method", molal::to_string(method)},
          {"divf", divf},
          {"seed", seed},
          {"iterations", iterations},
          {"corpus", corpus_json(corpus)},
          {"generator", generator_json(generator)},
          {"generation", generation_json(generation)},
          {"proxy",
           {{"descriptor_table", proxy.descriptor_table},
            {"components", proxy.components},
            {"scaling", molal::to_string(proxy.scaling)}}},
          {"clustering",
           {{"k", clustering.k},
            {"restarts", clustering.restarts},
            {"max_iterations", clustering.max_iterations},
            {"per_cluster", clustering.per_cluster},
            {"sample", clustering.sample}}},
          {"scoring",
           {{"source", scoring.source},
            {"table", scoring.table},
            {"weights", scoring.weights.to_json()},
            {"threshold", scoring.threshold},
            {"oracle", scoring.oracle.to_json()}}},
          {"al_set",
           {{"replica_floor", al_set.replica_floor},
            {"sample_target", al_set.sample_target},
            {"median", al_set.median}}},
          {"report", {{"histogram_bin", report.histogram_bin}, {"references", report.references}}}};
}

RunConfig RunConfig::from_json(const json &j) {
  if (!j.is_object()) bad_config("run config must be a JSON object");
  RunConfig c;
  try {
    const std::string preset = j.value("preset", std::string("full"));
    if (preset == "desk") {
      c = desk();
    } else if (preset == "full") {
      c = full();
    } else {
      bad_config("unknown preset '" + preset + "'");
    }
    if (j.contains("mode")) c.mode = mode_from_string(j["mode"].get<std::string>());
    if (j.contains("method")) c.method = method_from_string(j["method"].get<std::string>());
    read_into(j, "divf", c.divf);
    read_into(j, "seed", c.seed);
    read_into(j, "iterations", c.iterations);
    if (j.contains("corpus")) corpus_from(j["corpus"], c.corpus);
    if (j.contains("generator")) generator_from(j["generator"], c.generator);
    if (j.contains("generation")) generation_from(j["generation"], c.generation);
    if (j.contains("proxy")) {
      const json &p = j["proxy"];
      read_into(p, "descriptor_table", c.proxy.descriptor_table);
      read_into(p, "components", c.proxy.components);
      if (p.contains("scaling")) c.proxy.scaling = scaling_from_string(p["scaling"].get<std::string>());
    }
    if (j.contains("clustering")) {
      const json &k = j["clustering"];
      read_into(k, "k", c.clustering.k);
      read_into(k, "restarts", c.clustering.restarts);
      read_into(k, "max_iterations", c.clustering.max_iterations);
      read_into(k, "per_cluster", c.clustering.per_cluster);
      read_into(k, "sample", c.clustering.sample);
    }
    if (j.contains("scoring")) {
      const json &s = j["scoring"];
      read_into(s, "source", c.scoring.source);
      read_into(s, "table", c.scoring.table);
      read_into(s, "threshold", c.scoring.threshold);
      if (s.contains("weights")) c.scoring.weights = WeightTable::from_json(s["weights"]);
      if (s.contains("oracle")) oracle_from(s["oracle"], c.scoring.oracle);
    }
    if (j.contains("al_set")) {
      const json &a = j["al_set"];
      read_into(a, "replica_floor", c.al_set.replica_floor);
      read_into(a, "sample_target", c.al_set.sample_target);
      read_into(a, "median", c.al_set.median);
    }
    if (j.contains("report")) {
      read_into(j["report"], "histogram_bin", c.report.histogram_bin);
      read_into(j["report"], "references", c.report.references);
    }
  } catch (const json::exception &e) {
    bad_config(std::string("malformed run config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path &path) {
  try {
    return from_json(json::parse(read_file(path)));
  } catch (const json::parse_error &e) {
    bad_config(path.string() + ": " + e.what());
  }
}

std::uint64_t RunConfig::hash() const { return fnv1a64(to_json().dump()); }

std::uint64_t stage_seed(const RunConfig &config, int iteration, Stage stage) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(iteration) * 16 + static_cast<std::uint64_t>(stage));
}

fs::path IterationState::dir() const { return run_dir / std::to_string(iteration); }

IterationState initialize_run(const fs::path &run_dir, const RunConfig &config, const ProgressFn &progress) {
  config.validate();
  const RunPaths paths { run_dir };
  if (fs::exists(paths.config())) {
    const RunConfig existing = RunConfig::load(paths.config());
    if (existing.hash() != config.hash())
      throw PipelineError(PipelineErrc::kState, run_dir.string() + " already holds a different run config");
  }
  fs::create_directories(run_dir);
  write_file(paths.config(), config.to_json().dump(2) + "\n");

  const PreparedCorpus corpus = run_stage("corpus", progress, [&] {
    const std::vector<std::string> lines = config.corpus.path.empty()
                                               ? synthetic_corpus(config.corpus.synthetic_size,
                                                                  stage_seed(config, 0, Stage::kCorpus))
                                               : read_lines(config.corpus.path);
    PreparedCorpus c = prepare_corpus(lines, {config.corpus.min_count, config.corpus.block_size});
    if (c.smiles.empty()) throw PipelineError(PipelineErrc::kStage, "stage corpus: no usable SMILES");
    write_lines(paths.corpus(), c.smiles);
    write_rejects(paths.corpus_rejects(), c.rejects);
    return c;
  });

  run_stage("proxy", progress, [&] {
    const DescriptorSource source(config.proxy);
    const Matrix rows = source.rows(corpus.smiles);
    const int comps = std::min<int>(config.proxy.components, static_cast<int>(rows.cols()));
    save_pca(paths.pca(), fit_pca(rows, source.schema(), comps, config.proxy.scaling));
  });

  const IterationState state { 0, run_dir, config.hash() };
  run_stage("pretrain", progress, [&] {
    fs::create_directories(state.dir());
    if (config.generator.kind == "markov") {
      MarkovModel::fit(corpus.tokens, corpus.vocabulary, config.generator.order, config.generator.pseudo_count,
                       config.corpus.block_size)
          .save(state.checkpoint());
      return;
    }
    GptConfig gc = config.generator.gpt;
    gc.vocab_size = corpus.vocabulary.size();
    gc.block_size = config.corpus.block_size;
    Gpt gpt(gc, stage_seed(config, 0, Stage::kPretrain));
    TrainOptions opts;
    opts.schedule = config.generator.pretrain;
    opts.optimizer = config.generator.optimizer;
    opts.grad_clip = config.generator.grad_clip;
    opts.seed = stage_seed(config, 0, Stage::kPretrain);
    const TrainResult result = train(gpt, corpus.framed, corpus.vocabulary, opts);
    write_loss_trace(state.dir() / "loss.csv", result);
    GptModel(corpus.vocabulary, std::move(gpt)).save(state.checkpoint());
  });
  return state;
}

IterationState load_state(const fs::path &run_dir, int iteration) {
  const RunPaths paths { run_dir };
  if (!fs::exists(paths.config()))
    throw PipelineError(PipelineErrc::kMissingArtifact, "missing " + paths.config().string());
  const RunConfig config = RunConfig::load(paths.config());
  IterationState state { iteration, run_dir, config.hash() };
  if (!fs::exists(state.checkpoint()))
    throw PipelineError(PipelineErrc::kMissingArtifact, "missing " + state.checkpoint().string());
  return state;
}

IterationState run_iteration(const IterationState &state, const RunConfig &config, const ProgressFn &progress) {
  const int i = state.iteration;
  if (state.config_hash != config.hash())
    throw PipelineError(PipelineErrc::kState, "config hash does not match the run directory");
  if (i > config.iterations)
    throw PipelineError(PipelineErrc::kState, "iteration " + std::to_string(i) + " is past the configured loop");
  const RunPaths paths { state.run_dir };
  const bool last = i == config.iterations;
  auto note = [&](const std::string &stage) {
    if (progress) progress("iteration " + std::to_string(i) + ": " + stage);
  };

  const std::unique_ptr<SequenceModel> model = run_stage("load", note, [&] { return load_model(state.checkpoint()); });
  const PcaModel pca = run_stage("load", ProgressFn {}, [&] { return load_pca(paths.pca()); });
  json stats = {{"iteration", i},
                {"seed", config.seed},
                {"config_hash", state.config_hash},
                {"mode", to_string(config.mode)}};

  // Generate.
  const GenerationResult generated = run_stage("generate", note, [&] {
    GenerationRequest req;
    req.target = config.generation.target;
    req.max_attempts = config.generation.max_attempts;
    req.temperature = config.generation.temperature;
    std::mt19937_64 rng(stage_seed(config, i, Stage::kGenerate));
    GenerationResult r = generate_unique(*model, req, make_filter(config.generation), rng);
    if (r.molecules.empty()) throw PipelineError(PipelineErrc::kStage, "stage generate: no valid molecules");
    write_lines(state.generated(), r.molecules);
    return r;
  });
  stats["generation"] = generated.stats.to_json();
  stats["generation"]["target_unreachable"] = generated.target_unreachable;
  const std::vector<std::string> &pool = generated.molecules;

  // Descriptors and proxy coordinates.
  const Matrix points = run_stage("descriptors", note, [&] {
    const DescriptorSource source(config.proxy);
    if (source.schema() != pca.schema)
      throw PipelineError(PipelineErrc::kStage, "stage descriptors: schema differs from the fitted proxy");
    return project_rows(pca, source.rows(pool));
  });

  // Cluster.
  std::vector<int> assignments(pool.size(), 0);
  int k = 1;
  if (config.mode != Mode::kNaive) {
    run_stage("cluster", note, [&] {
      const int kk = std::min<int>(config.clustering.k, static_cast<int>(pool.size()));
      const std::vector<Clustering> runs =
          kmeans_restarts(points, kk, config.clustering.restarts, stage_seed(config, i, Stage::kCluster),
                          {config.clustering.max_iterations});
      const Clustering &best = select_clustering(runs);
      save_clustering(state.clustering(), best);
      write_size_histogram(state.dir() / "cluster_sizes.csv", best);
      assignments = best.assignments;
      k = best.k;
      stats["clustering"] = {{"k", best.k},
                             {"inertia", best.inertia},
                             {"size_variance", best.size_variance},
                             {"iterations", best.iterations}};
    });
  }

  // Scoring sample.
  const std::vector<int> picks = run_stage("sample", note, [&] {
    std::mt19937_64 rng(stage_seed(config, i, Stage::kSample));
    std::vector<int> out;
    if (config.mode == Mode::kNaive) {
      std::vector<int> all(pool.size());
      std::iota(all.begin(), all.end(), 0);
      std::sample(all.begin(), all.end(), std::back_inserter(out), static_cast<std::size_t>(config.clustering.sample),
                  rng);
    } else {
      const ScoringSample s = sample_for_scoring(assignments, k, config.clustering.per_cluster,
                                                 config.clustering.sample, rng);
      for (const ScoringPick &p : s.picks) out.push_back(p.point);
    }
    return out;
  });

  // Score.
  const std::vector<double> sd = column_sd(pca);
  const std::vector<ScoreRecord> scored = run_stage("score", note, [&] {
    const std::unique_ptr<ScoreSource> source = make_score_source(config.scoring);
    std::vector<ScoreRecord> records;
    for (int p : picks) {
      ScoreRecord r;
      r.smiles = pool[static_cast<std::size_t>(p)];
      r.cluster = config.mode == Mode::kNaive ? -1 : assignments[static_cast<std::size_t>(p)];
      r.score = source->score(r.smiles, whiten(points.row(p).transpose(), sd));
      records.push_back(std::move(r));
    }
    write_score_records(state.scores(), records);
    return records;
  });
  std::vector<double> score_values;
  for (const ScoreRecord &r : scored) score_values.push_back(r.score);
  stats["scores"] = summary_json(score_values, config.scoring.threshold);

  // Whole-pool oracle view, informational only.
  if (config.scoring.source == "oracle") {
    std::vector<double> all;
    for (Eigen::Index p = 0; p < points.rows(); ++p)
      all.push_back(synthetic_oracle(whiten(points.row(p).transpose(), sd), config.scoring.oracle));
    stats["ensemble"] = summary_json(all, config.scoring.threshold);
  }

  // Generation quality and memorization.
  run_stage("metrics", ProgressFn {}, [&] {
    const std::vector<std::string> corpus = read_lines(paths.corpus());
    const CanonicalSet training(corpus.begin(), corpus.end());
    std::size_t novel = 0;
    for (const std::string &s : pool)
      if (!training.contains(s)) ++novel;
    stats["novelty"] = static_cast<double>(novel) / static_cast<double>(pool.size());
    if (i > 0) {
      const IterationState prev { i - 1, state.run_dir, state.config_hash };
      const CanonicalSet gen(pool.begin(), pool.end());
      CanonicalSet al_prev, scored_prev;
      if (fs::exists(prev.alset())) {
        const auto lines = read_lines(prev.alset());
        al_prev.insert(lines.begin(), lines.end());
      }
      for (const ScoreRecord &r : read_score_records(prev.scores())) scored_prev.insert(r.smiles);
      stats["memorization"] = memorization(gen, al_prev, scored_prev).to_json();
    }
  });

  IterationState next = state;
  if (!last) {
    const AlTrainingSet al = run_stage("assemble", note, [&] {
      AssembleOptions opts;
      opts.threshold = config.scoring.threshold;
      if (config.mode == Mode::kComplete) {
        opts.method = config.method;
      } else if (config.mode == Mode::kUniform) {
        opts.method = Method::kUniform;
      } else {
        opts.method = std::nullopt;
      }
      opts.divf = config.divf;
      opts.replica_floor = config.al_set.replica_floor;
      opts.sample_target = config.al_set.sample_target;
      opts.median = config.al_set.median;
      std::mt19937_64 rng(stage_seed(config, i, Stage::kAssemble));
      AlTrainingSet set = assemble_al_set(scored, pool, assignments, k, opts, rng);
      save_al_set(state.alset(), set);
      return set;
    });
    stats["al_set"] = al.provenance.to_json();
    stats["al_set"]["size"] = al.size();

    next.iteration = i + 1;
    run_stage("finetune", note, [&] {
      fs::create_directories(next.dir());
      const std::vector<std::string> lines = al.all();
      if (lines.empty()) {
        fs::copy_file(state.checkpoint(), next.checkpoint(), fs::copy_options::overwrite_existing);
        stats["finetune"] = {{"skipped", true}};
        return;
      }
      const PreparedCorpus data = encode_corpus(lines, model->vocabulary(), model->block_size());
      stats["finetune"] = {{"skipped", false}, {"sequences", data.framed.size()}, {"rejects", data.rejects.size()}};
      if (auto *markov = dynamic_cast<MarkovModel *>(model.get())) {
        markov->fine_tune(data.tokens, markov_finetune_weight(data.tokens.size(), config.generator.finetune_prior));
        markov->save(next.checkpoint());
        return;
      }
      auto *gpt = dynamic_cast<GptModel *>(model.get());
      if (!gpt) throw PipelineError(PipelineErrc::kStage, "stage finetune: unsupported model kind " + model->kind());
      TrainOptions opts;
      opts.schedule = config.generator.finetune;
      opts.optimizer = config.generator.optimizer;
      opts.grad_clip = config.generator.grad_clip;
      opts.seed = stage_seed(config, i, Stage::kFinetune);
      const TrainResult result = train(gpt->gpt(), data.framed, gpt->vocabulary(), opts);
      write_loss_trace(state.dir() / "finetune_loss.csv", result);
      gpt->save(next.checkpoint());
    });
  }
  write_file(state.stats(), stats.dump(2) + "\n");
  return next;
}

std::vector<IterationState> run_loop(const fs::path &run_dir, const RunConfig &config, const ProgressFn &progress) {
  config.validate();
  const RunPaths paths { run_dir };
  IterationState state;
  bool fresh = !fs::exists(paths.config()) || !fs::exists(IterationState { 0, run_dir, 0 }.checkpoint());
  if (fresh) {
    state = initialize_run(run_dir, config, progress);
  } else {
    if (RunConfig::load(paths.config()).hash() != config.hash())
      throw PipelineError(PipelineErrc::kState, run_dir.string() + " already holds a different run config");
    int latest = 0;
    // An iteration counts as done once its stats are written.
    while (latest < config.iterations && fs::exists(IterationState { latest, run_dir, 0 }.stats()) &&
           fs::exists(IterationState { latest + 1, run_dir, 0 }.checkpoint()))
      ++latest;
    state = load_state(run_dir, latest);
  }
  std::vector<IterationState> states;
  for (int i = 0; i < state.iteration; ++i) states.push_back({i, run_dir, state.config_hash});
  while (true) {
    states.push_back(state);
    if (state.iteration == config.iterations) {
      if (!fs::exists(state.stats())) run_iteration(state, config, progress);
      break;
    }
    state = run_iteration(state, config, progress);
  }
  return states;
}

}  // namespace molal
