// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

// molal: command line front end for the active-learning loop and its stages.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "molal/clustering.h"
#include "molal/corpus.h"
#include "molal/descriptors.h"
#include "molal/filters.h"
#include "molal/generator.h"
#include "molal/io.h"
#include "molal/pipeline.h"
#include "molal/proxy.h"
#include "molal/report.h"
#include "molal/sampling.h"
#include "molal/scoring.h"
#include "molal/smiles.h"

namespace fs = std::filesystem;
using namespace molal;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitStage = 3;

struct Overrides {
  std::string config;
  std::string preset = "desk";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> method;
  std::optional<double> divf;
  std::optional<int> iterations;
};

void add_overrides(CLI::App *cmd, Overrides &o) {
  cmd->add_option("--config", o.config, "Run config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.preset, "Preset used when no config is given")
      ->check(CLI::IsMember({"desk", "full"}));
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--mode", o.mode, "complete | uniform | naive");
  cmd->add_option("--method", o.method, "softsub | softdiv | linear | uniform");
  cmd->add_option("--divf", o.divf, "softdiv divisor factor");
  cmd->add_option("--iterations", o.iterations, "Active-learning iterations");
}

RunConfig resolve(const Overrides &o) {
  nlohmann::json j = o.config.empty() ? nlohmann::json {{"preset", o.preset}}
                                      : nlohmann::json::parse(read_file(o.config));
  if (o.seed) j["seed"] = *o.seed;
  if (o.mode) j["mode"] = *o.mode;
  if (o.method) j["method"] = *o.method;
  if (o.divf) j["divf"] = *o.divf;
  if (o.iterations) j["iterations"] = *o.iterations;
  return RunConfig::from_json(j);
}

void log_progress(const std::string &msg) { spdlog::info("{}", msg); }

std::vector<ScoreRecord> attach_clusters(std::vector<ScoreRecord> records, const std::string &clustering_path,
                                         const std::vector<std::string> &pool) {
  if (clustering_path.empty()) return records;
  const Clustering c = load_clustering(clustering_path);
  if (c.assignments.size() != pool.size()) throw ValidationError("clustering and input differ in length");
  std::unordered_map<std::string, int> cluster_of;
  for (std::size_t i = 0; i < pool.size(); ++i) cluster_of.emplace(pool[i], c.assignments[i]);
  for (ScoreRecord &r : records)
    if (auto it = cluster_of.find(r.smiles); it != cluster_of.end()) r.cluster = it->second;
  return records;
}

Matrix to_matrix(const DescriptorTable &t, const std::vector<std::string> &order) {
  Matrix m(static_cast<Eigen::Index>(order.size()), static_cast<Eigen::Index>(t.names.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto &v = t.rows.at(order[i]).values();
    for (std::size_t j = 0; j < v.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
  }
  return m;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app {"molal: active-learning loop for SMILES generators"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  // pretrain
  Overrides pre_o;
  std::string pre_dir = "run";
  auto *pretrain = app.add_subcommand("pretrain", "Prepare the corpus, fit the proxy and pretrain iteration 0");
  add_overrides(pretrain, pre_o);
  pretrain->add_option("--run-dir", pre_dir, "Run directory");

  // generate
  std::string gen_ckpt, gen_out, gen_stats;
  std::size_t gen_count = 1000;
  std::uint64_t gen_seed = 0;
  double gen_temp = 1.0;
  bool gen_admet = false, gen_groups = false;
  auto *generate = app.add_subcommand("generate", "Sample unique canonical SMILES from a checkpoint");
  generate->add_option("--checkpoint", gen_ckpt)->required()->check(CLI::ExistingFile);
  generate->add_option("--out", gen_out)->required();
  generate->add_option("--count", gen_count, "Unique molecules to generate");
  generate->add_option("--seed", gen_seed);
  generate->add_option("--temperature", gen_temp);
  generate->add_flag("--admet", gen_admet, "Apply the ADMET bounds");
  generate->add_flag("--groups", gen_groups, "Apply the functional-group exclusions");
  generate->add_option("--stats", gen_stats, "Write generation statistics (JSON)");

  // descriptors
  std::string desc_in, desc_out;
  auto *descriptors = app.add_subcommand("descriptors", "Compute MQN descriptors for a SMILES file");
  descriptors->add_option("--in", desc_in)->required()->check(CLI::ExistingFile);
  descriptors->add_option("--out", desc_out)->required();

  // cluster
  std::string cl_in, cl_out, cl_pca, cl_pca_out, cl_assign;
  int cl_k = 100, cl_restarts = 100, cl_components = 120;
  std::uint64_t cl_seed = 0;
  auto *cluster = app.add_subcommand("cluster", "Project a descriptor table and run k-means with restarts");
  cluster->add_option("--in", cl_in, "Descriptor CSV")->required()->check(CLI::ExistingFile);
  cluster->add_option("--out", cl_out, "Clustering (binary)")->required();
  cluster->add_option("--pca", cl_pca, "Existing proxy model")->check(CLI::ExistingFile);
  cluster->add_option("--pca-out", cl_pca_out, "Save the fitted proxy model");
  cluster->add_option("--components", cl_components);
  cluster->add_option("--k", cl_k);
  cluster->add_option("--restarts", cl_restarts);
  cluster->add_option("--seed", cl_seed);
  cluster->add_option("--assignments", cl_assign, "Write smiles,cluster CSV");

  // score
  std::string sc_in, sc_out, sc_fp, sc_pca, sc_oracle, sc_clustering;
  auto *score = app.add_subcommand("score", "Score molecules from a fingerprint table or the synthetic oracle");
  score->add_option("--in", sc_in, "SMILES file")->required()->check(CLI::ExistingFile);
  score->add_option("--out", sc_out)->required();
  score->add_option("--fingerprints", sc_fp, "Interaction fingerprint CSV")->check(CLI::ExistingFile);
  score->add_option("--pca", sc_pca, "Proxy model for the oracle")->check(CLI::ExistingFile);
  score->add_option("--oracle", sc_oracle, "Oracle config (JSON)")->check(CLI::ExistingFile);
  score->add_option("--clustering", sc_clustering, "Clustering of --in, for cluster ids")->check(CLI::ExistingFile);

  // build-al-set
  std::string al_scores, al_pool, al_clustering, al_out, al_method = "softsub";
  double al_divf = 0.25, al_threshold = kAblThreshold;
  int al_floor = 5000, al_target = 5000;
  bool al_naive = false;
  std::uint64_t al_seed = 0;
  auto *build = app.add_subcommand("build-al-set", "Assemble the active-learning training set");
  build->add_option("--scores", al_scores)->required()->check(CLI::ExistingFile);
  build->add_option("--pool", al_pool, "Generated SMILES")->required()->check(CLI::ExistingFile);
  build->add_option("--clustering", al_clustering)->check(CLI::ExistingFile);
  build->add_option("--out", al_out)->required();
  build->add_option("--method", al_method);
  build->add_option("--divf", al_divf);
  build->add_option("--threshold", al_threshold);
  build->add_option("--replica-floor", al_floor);
  build->add_option("--sample-target", al_target);
  build->add_flag("--naive", al_naive, "Replicas only");
  build->add_option("--seed", al_seed);

  // finetune
  Overrides ft_o;
  std::string ft_ckpt, ft_data, ft_out;
  auto *finetune = app.add_subcommand("finetune", "Fine-tune a checkpoint on an AL set");
  add_overrides(finetune, ft_o);
  finetune->add_option("--checkpoint", ft_ckpt)->required()->check(CLI::ExistingFile);
  finetune->add_option("--data", ft_data)->required()->check(CLI::ExistingFile);
  finetune->add_option("--out", ft_out)->required();

  // run-loop
  Overrides loop_o;
  std::string loop_dir = "run";
  auto *loop = app.add_subcommand("run-loop", "Run or resume the full loop");
  add_overrides(loop, loop_o);
  loop->add_option("--run-dir", loop_dir);

  // report
  std::string rep_dir = "run", rep_out, rep_refs;
  auto *report = app.add_subcommand("report", "Summarize a run directory into CSV tables");
  report->add_option("--run-dir", rep_dir)->check(CLI::ExistingDirectory);
  report->add_option("--out", rep_out, "Output directory (default <run-dir>/report)");
  report->add_option("--references", rep_refs, "Reference SMILES for the similarity report")
      ->check(CLI::ExistingFile);

  // filter
  std::string fl_in, fl_out, fl_bounds, fl_patterns;
  bool fl_strict = false, fl_no_admet = false, fl_no_groups = false;
  auto *filter = app.add_subcommand("filter", "Apply ADMET and functional-group filters to a SMILES file");
  filter->add_option("--in", fl_in)->required()->check(CLI::ExistingFile);
  filter->add_option("--out", fl_out, "Report CSV")->required();
  filter->add_option("--bounds", fl_bounds)->check(CLI::ExistingFile);
  filter->add_option("--patterns", fl_patterns)->check(CLI::ExistingFile);
  filter->add_flag("--strict", fl_strict, "Missing TPSA/logP fails");
  filter->add_flag("--no-admet", fl_no_admet);
  filter->add_flag("--no-groups", fl_no_groups);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (*pretrain) {
      const RunConfig cfg = resolve(pre_o);
      initialize_run(pre_dir, cfg, log_progress);
      spdlog::info("pretrained checkpoint in {}/0", pre_dir);
    } else if (*generate) {
      const auto model = load_model(gen_ckpt);
      GenerationRequest req;
      req.target = gen_count;
      req.temperature = gen_temp;
      CandidateFilter fn;
      if (gen_admet || gen_groups) {
        FilterSet fs;
        fs.admet = gen_admet;
        fs.groups = gen_groups;
        fn = [fs](const Molecule &m) { return fs.reject_reason(m); };
      }
      std::mt19937_64 rng(gen_seed);
      const GenerationResult r = generate_unique(*model, req, fn, rng);
      write_lines(gen_out, r.molecules);
      if (!gen_stats.empty()) write_file(gen_stats, r.stats.to_json().dump(2) + "\n");
      if (r.target_unreachable) spdlog::warn("target not reached: {} of {} unique", r.molecules.size(), gen_count);
      spdlog::info("wrote {} molecules to {}", r.molecules.size(), gen_out);
    } else if (*descriptors) {
      std::ofstream out(desc_out);
      if (!out) throw IoError("cannot write " + desc_out);
      std::vector<std::string> header {"smiles"};
      header.insert(header.end(), mqn_names().begin(), mqn_names().end());
      write_csv_row(out, header);
      std::size_t skipped = 0;
      for (const std::string &s : read_lines(desc_in)) {
        try {
          const Molecule m = parse_smiles(s);
          std::vector<std::string> row {canonical_string(m)};
          for (double v : compute_mqn(m).values()) row.push_back(std::to_string(static_cast<long long>(v)));
          write_csv_row(out, row);
        } catch (const Error &e) {
          ++skipped;
          spdlog::warn("skipping '{}': {}", s, e.what());
        }
      }
      if (skipped) spdlog::warn("{} unparseable lines skipped", skipped);
    } else if (*cluster) {
      const DescriptorTable table = ingest_descriptor_table(fs::path(cl_in));
      if (!table.rejects.empty()) spdlog::warn("{} descriptor rows rejected", table.rejects.size());
      std::vector<std::string> order;
      for (const auto &[smiles, v] : table.rows) order.push_back(smiles);
      const Matrix rows = to_matrix(table, order);
      const PcaModel pca = cl_pca.empty()
                               ? fit_pca(rows, table.schema, std::min<int>(cl_components, static_cast<int>(rows.cols())))
                               : load_pca(cl_pca);
      if (!cl_pca_out.empty()) save_pca(cl_pca_out, pca);
      const Matrix points = project_rows(pca, rows);
      const auto runs = kmeans_restarts(points, cl_k, cl_restarts, cl_seed);
      const Clustering &best = select_clustering(runs);
      save_clustering(cl_out, best);
      if (!cl_assign.empty()) {
        std::ofstream out(cl_assign);
        write_csv_row(out, std::vector<std::string> {"smiles", "cluster"});
        for (std::size_t i = 0; i < order.size(); ++i)
          write_csv_row(out, std::vector<std::string> {order[i], std::to_string(best.assignments[i])});
      }
      spdlog::info("k={} inertia={:.6g} size variance={:.6g}", best.k, best.inertia, best.size_variance);
    } else if (*score) {
      const std::vector<std::string> pool = read_lines(sc_in);
      std::vector<ScoreRecord> records;
      if (!sc_fp.empty()) {
        const FingerprintIngest ingest = ingest_fingerprints(fs::path(sc_fp));
        const TableScoreSource table(ingest.records);
        for (const std::string &s : pool) records.push_back({canonicalize(s), -1, std::nullopt, 0.0});
        for (ScoreRecord &r : records) r.score = table.score(r.smiles, ProxyPoint());
      } else {
        if (sc_pca.empty() || sc_oracle.empty())
          throw ValidationError("score needs --fingerprints, or --pca with --oracle");
        const PcaModel pca = load_pca(sc_pca);
        const OracleConfig oracle = OracleConfig::from_json(nlohmann::json::parse(read_file(sc_oracle)));
        for (const std::string &s : pool) {
          const Molecule m = parse_smiles(s);
          ProxyPoint p = project(pca, compute_mqn(m));
          for (Eigen::Index i = 0; i < p.size(); ++i)
            p(i) /= pca.eigenvalues[static_cast<std::size_t>(i)] > 0 ? std::sqrt(pca.eigenvalues[static_cast<std::size_t>(i)]) : 1.0;
          records.push_back({canonical_string(m), -1, std::nullopt, synthetic_oracle(p, oracle)});
        }
      }
      records = attach_clusters(std::move(records), sc_clustering, pool);
      write_score_records(sc_out, records);
      spdlog::info("scored {} molecules", records.size());
    } else if (*build) {
      const std::vector<ScoreRecord> scored = read_score_records(al_scores);
      const std::vector<std::string> pool = read_lines(al_pool);
      std::vector<int> assignments(pool.size(), 0);
      int k = 1;
      if (!al_clustering.empty()) {
        const Clustering c = load_clustering(al_clustering);
        assignments = c.assignments;
        k = c.k;
      } else if (!al_naive) {
        throw ValidationError("build-al-set needs --clustering unless --naive is given");
      }
      AssembleOptions opts;
      opts.threshold = al_threshold;
      opts.method = al_naive ? std::nullopt : std::optional<Method>(method_from_string(al_method));
      opts.divf = al_divf;
      opts.replica_floor = al_floor;
      opts.sample_target = al_target;
      std::mt19937_64 rng(al_seed);
      const AlTrainingSet set = assemble_al_set(scored, pool, assignments, k, opts, rng);
      save_al_set(al_out, set);
      spdlog::info("AL set: {} replicas ({} passers x {}), {} sampled", set.replicas.size(),
                   set.provenance.passers, set.provenance.replica_multiplier, set.sampled.size());
    } else if (*finetune) {
      const RunConfig cfg = resolve(ft_o);
      auto model = load_model(ft_ckpt);
      const PreparedCorpus data = encode_corpus(read_lines(ft_data), model->vocabulary(), model->block_size());
      if (!data.rejects.empty()) spdlog::warn("{} AL molecules could not be encoded", data.rejects.size());
      if (auto *markov = dynamic_cast<MarkovModel *>(model.get())) {
        markov->fine_tune(data.tokens, markov_finetune_weight(data.tokens.size(), cfg.generator.finetune_prior));
      } else if (auto *gpt = dynamic_cast<GptModel *>(model.get())) {
        TrainOptions opts;
        opts.schedule = cfg.generator.finetune;
        opts.optimizer = cfg.generator.optimizer;
        opts.grad_clip = cfg.generator.grad_clip;
        opts.seed = cfg.seed;
        const TrainResult r = train(gpt->gpt(), data.framed, gpt->vocabulary(), opts);
        if (!r.trace.empty()) spdlog::info("final loss {:.4f}", r.trace.back().loss);
      }
      model->save(ft_out);
    } else if (*loop) {
      const RunConfig cfg = resolve(loop_o);
      run_loop(loop_dir, cfg, log_progress);
      const RunReport rep = build_report(loop_dir);
      write_report(loop_dir, fs::path(loop_dir) / "report", rep, cfg.report.histogram_bin);
      for (const IterationReport &r : rep.iterations)
        spdlog::info("iteration {}: {:.1f}% >= {} (mean {:.2f}, max {:.2f})", r.iteration,
                     r.scores.percent_at_or_above, rep.threshold, r.scores.mean, r.scores.max);
    } else if (*report) {
      const RunConfig cfg = RunConfig::load(RunPaths {rep_dir}.config());
      const RunReport rep = build_report(rep_dir);
      std::vector<std::string> refs;
      if (!rep_refs.empty()) refs = read_lines(rep_refs);
      else if (!cfg.report.references.empty()) refs = read_lines(cfg.report.references);
      const fs::path out = rep_out.empty() ? fs::path(rep_dir) / "report" : fs::path(rep_out);
      write_report(rep_dir, out, rep, cfg.report.histogram_bin, refs);
      std::cout << "iteration,percent_at_or_above,q1,q2,mean,q3,max,std\n";
      for (const IterationReport &r : rep.iterations) {
        const ScoreSummary &s = r.scores;
        std::cout << fmt::format("{},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f}\n", r.iteration,
                                 s.percent_at_or_above, s.q1, s.q2, s.mean, s.q3, s.max, s.std);
      }
    } else if (*filter) {
      FilterSet fs;
      fs.admet = !fl_no_admet;
      fs.groups = !fl_no_groups;
      fs.strict = fl_strict;
      if (!fl_bounds.empty()) fs.bounds = AdmetBounds::load(fl_bounds);
      if (!fl_patterns.empty()) fs.patterns = load_patterns(fl_patterns);
      std::vector<FilterReportRow> rows;
      std::size_t passed = 0;
      for (const std::string &s : read_lines(fl_in)) {
        rows.push_back(filter_smiles(s, fs));
        passed += rows.back().pass ? 1 : 0;
      }
      write_filter_report(fl_out, rows);
      spdlog::info("{} of {} molecules pass", passed, rows.size());
    }
  } catch (const ValidationError &e) {
    spdlog::error("{}", e.what());
    return kExitValidation;
  } catch (const PipelineError &e) {
    spdlog::error("{}", e.what());
    return e.code() == PipelineErrc::kBadConfig ? kExitValidation : kExitStage;
  } catch (const nlohmann::json::exception &e) {
    spdlog::error("invalid JSON: {}", e.what());
    return kExitValidation;
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return kExitStage;
  }
  return 0;
}
