#include "tcsel/cli/pipeline.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "tcsel/cli/reports.hpp"
#include "tcsel/csv.hpp"
#include "tcsel/error.hpp"
#include "tcsel/lsa.hpp"
#include "tcsel/randomization.hpp"
#include "tcsel/seed.hpp"

#ifndef TCSEL_VERSION
#define TCSEL_VERSION "unknown"
#endif

namespace tcsel::cli {
namespace fs = std::filesystem;

namespace {

struct Index {
  Model model = Model::Vsm;
  TermDocumentMatrix matrix;
  std::optional<LsaModel> lsa;

  SimilarityResult score(const std::vector<std::string>& terms, const std::string& query_id, int workers) const {
    const QueryVector q = embed_query(matrix, terms);
    return lsa ? lsa_score(*lsa, q, query_id, workers) : vsm_score(matrix, q, query_id, workers);
  }
};

Index build_index(const Corpus& corpus, const PipelineConfig& text_cfg, const RunConfig& cfg, Model model,
                  const std::string& label, std::vector<std::string>& warnings) {
  std::vector<ProcessedDocument> docs;
  docs.reserve(corpus.documents.size());
  Warnings w;
  for (const auto& doc : corpus.documents) docs.push_back(preprocess(doc, text_cfg, &w));
  for (const auto& m : w.messages()) warnings.push_back(label + ": " + m);

  Index index{model, build_matrix(docs), std::nullopt};
  if (cfg.weighting == Weighting::TfIdf) index.matrix = apply_tfidf(index.matrix);
  if (model == Model::Lsa) {
    const auto limit = static_cast<int>(std::min(index.matrix.term_count(), index.matrix.doc_count()));
    int k = *cfg.k;
    if (k > limit) {
      warnings.push_back(label + ": k = " + std::to_string(k) + " exceeds min(terms, documents); using " +
                         std::to_string(limit));
      k = limit;
    }
    LsaOptions options;
    options.seed = derive_seed(cfg.seed, "lsa:" + label);
    index.lsa = lsa_fit(index.matrix, k, options);
  }
  return index;
}

std::string file_safe(std::string s) {
  for (auto& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return s;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("cannot write " + path.string());
}

std::vector<bool> configured_flags(const Corpus& corpus) {
  std::vector<bool> flags;
  for (const auto& d : corpus.documents) flags.push_back(d.configured);
  return flags;
}

Corpus automatic_corpus(const RunConfig& cfg, const FeatureChain& chain, std::vector<std::string>& warnings) {
  fs::path root = *cfg.build_output_tree;
  if (fs::is_directory(root / chain.feature_id)) root /= chain.feature_id;
  IngestOptions options;
  options.include_globs = cfg.include;
  options.exclude_globs = cfg.exclude;
  options.label = chain.feature_id + ":automatic";
  options.kind = CorpusKind::Automatic;
  Warnings w;
  Corpus corpus = ingest_tree(root, options, &w);
  for (const auto& m : w.messages()) warnings.push_back(m);
  const auto targets = chain.targets();
  for (auto& doc : corpus.documents) doc.configured = targets.contains(doc.id);
  return corpus;
}

struct Query {
  std::string id;
  std::vector<std::string> terms;
};

}  // namespace

PipelineSummary run_pipeline(const RunConfig& cfg) {
  PipelineSummary summary;
  prepare_output_dir(cfg);
  const PipelineConfig text_cfg = cfg.pipeline();
  auto& warnings = summary.warnings;

  std::vector<FeatureChain> chains;
  std::set<std::string> chain_ids;
  for (const auto& path : cfg.chains) {
    chains.push_back(load_chain(path));
    if (!chain_ids.insert(chains.back().feature_id).second) {
      throw DataError("duplicate chain feature_id " + chains.back().feature_id + " in " + path.string());
    }
  }
  const std::vector<TestCase> test_cases = load_test_cases(cfg.test_cases);
  std::set<std::string> test_ids;
  for (const auto& tc : test_cases) test_ids.insert(tc.id);
  for (const auto& chain : chains) {
    for (const auto& id : chain.relevant_test_cases) {
      if (!test_ids.contains(id)) {
        throw DataError("chain " + chain.feature_id + ": relevant test case " + id + " not found in " +
                        cfg.test_cases.string());
      }
    }
  }

  IngestOptions ingest;
  ingest.include_globs = cfg.include;
  ingest.exclude_globs = cfg.exclude;
  ingest.label = "base";
  Warnings ingest_warnings;
  const Corpus base = ingest_tree(cfg.base_tree, ingest, &ingest_warnings);
  for (const auto& m : ingest_warnings.messages()) warnings.push_back(m);

  // Test-case queries per content variant.
  std::map<TestContentVariant, std::vector<Query>> queries;
  for (auto variant : cfg.variants) {
    auto& list = queries[variant];
    for (const auto& tc : test_cases) {
      list.push_back({tc.id, preprocess_text(tc.id, test_case_text(tc, variant), text_cfg).terms});
    }
  }

  summary.config_hash = [&] {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_text(cfg))));
    return std::string(buf);
  }();

  const fs::path scores_dir = cfg.output_dir / "scores";
  fs::create_directories(scores_dir);

  std::ostringstream ranking_csv, relevant_csv, dsim_csv;
  write_ranking_header(ranking_csv);
  write_ranking_header(relevant_csv);
  write_dsim_header(dsim_csv);
  std::vector<DesignRow> design;
  // (corpus, model, statistic, variant) -> relevance bits per chain
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::vector<std::vector<bool>>> ap_input;

  for (const auto& chain : chains) {
    const Corpus activated = apply_variant(base, chain, true);
    const Corpus deactivated = apply_variant(base, chain, false);

    // Dsim on the full product variants, one seeded relevant test case as query.
    const std::vector<std::string> relevant(chain.relevant_test_cases.begin(), chain.relevant_test_cases.end());
    const std::string dsim_query = relevant[derive_seed(cfg.seed, "dsim-query:" + chain.feature_id) % relevant.size()];
    summary.dsim_queries[chain.feature_id] = dsim_query;

    std::map<CorpusKind, Corpus> corpora;
    for (auto kind : cfg.corpora) {
      switch (kind) {
        case CorpusKind::Manual:
          corpora.emplace(kind, activated);
          break;
        case CorpusKind::Minimal:
          corpora.emplace(kind, minimal_corpus(activated));
          break;
        case CorpusKind::Automatic:
          corpora.emplace(kind, automatic_corpus(cfg, chain, warnings));
          break;
      }
    }

    for (auto model : cfg.models) {
      const std::string model_name(to_string(model));
      const Index act_index =
          build_index(activated, text_cfg, cfg, model, chain.feature_id + ":activated:" + model_name, warnings);
      const Index deact_index =
          build_index(deactivated, text_cfg, cfg, model, chain.feature_id + ":deactivated:" + model_name, warnings);
      const auto act_flags = configured_flags(activated);

      for (auto variant : cfg.variants) {
        const auto& qs = queries.at(variant);
        const auto q = std::find_if(qs.begin(), qs.end(), [&](const Query& x) { return x.id == dsim_query; });
        auto act = act_index.score(q->terms, chain.feature_id, cfg.workers);
        auto deact = deact_index.score(q->terms, chain.feature_id, cfg.workers);
        DsimResult d = dsim(act, act_flags, deact);
        d.chain_id = chain.feature_id;
        d.variant = variant;
        d.model = model_name;
        write_dsim_row(dsim_csv, d);
        summary.dsim.push_back(d);

        const std::string stem = file_safe(chain.feature_id) + "_" + std::string(to_string(variant)) + "_" + model_name;
        std::ostringstream a, b;
        write_scores_csv(a, act, act_flags);
        write_scores_csv(b, deact, configured_flags(deactivated));
        write_file(scores_dir / (stem + "_activated.csv"), a.str());
        write_file(scores_dir / (stem + "_deactivated.csv"), b.str());
      }

      // Rank every test case against each corpus type.
      for (auto kind : cfg.corpora) {
        const std::string kind_name(to_string(kind));
        const std::string label = chain.feature_id + ":" + kind_name + ":" + model_name;
        const Index index = kind == CorpusKind::Manual
                                ? act_index
                                : build_index(corpora.at(kind), text_cfg, cfg, model, label, warnings);
        for (auto variant : cfg.variants) {
          std::map<std::string, std::vector<double>> per_test;
          for (const auto& q : queries.at(variant)) {
            per_test[q.id] = index.score(q.terms, q.id, cfg.workers).scores;
          }
          for (auto statistic : cfg.statistics) {
            TestCaseRanking ranking = rank_test_cases(per_test, statistic, label, variant);
            write_ranking_rows(ranking_csv, ranking);
            TestCaseRanking relevant_only = ranking;
            std::erase_if(relevant_only.entries, [&](const RankingEntry& e) {
              return !chain.relevant_test_cases.contains(e.test_case_id);
            });
            write_ranking_rows(relevant_csv, relevant_only);
            for (const auto& e : relevant_only.entries) {
              design.push_back({chain.feature_id + "/" + e.test_case_id, kind_name, model_name, variant, statistic,
                                static_cast<double>(e.rank)});
            }
            ap_input[{kind_name, model_name, std::string(to_string(statistic)), std::string(to_string(variant))}]
                .push_back(ranking.relevance(chain.relevant_test_cases));
            summary.rankings.push_back(std::move(ranking));
          }
        }
      }
    }
  }

  std::ostringstream map_csv;
  map_csv << "corpus,model,statistic,variant,map,queries\n";
  for (const auto& [key, bits] : ap_input) {
    const auto& [corpus, model, statistic, variant] = key;
    csv::write_row(map_csv, {corpus, model, statistic, variant, csv::format_double(mean_average_precision(bits)),
                             std::to_string(bits.size())});
  }

  // Dsim grid: rows are content variants, columns chains, one block per model.
  std::ostringstream grid;
  for (auto model : cfg.models) {
    grid << "model " << to_string(model) << "\nvariant";
    for (const auto& chain : chains) grid << "\t" << chain.feature_id;
    grid << "\n";
    for (auto variant : cfg.variants) {
      grid << to_string(variant);
      for (const auto& chain : chains) {
        for (const auto& d : summary.dsim) {
          if (d.chain_id == chain.feature_id && d.variant == variant && d.model == to_string(model)) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "\t%.3f", d.value);
            grid << buf;
          }
        }
      }
      grid << "\n";
    }
    grid << "\n";
  }

  std::ostringstream design_csv, stats_csv, stats_txt;
  write_design_csv(design_csv, design);
  const StatsReport stats = compute_stats(design, cfg.iterations, cfg.seed, cfg.workers);
  write_stats_csv(stats_csv, stats);
  write_stats_text(stats_txt, stats);

  std::vector<std::pair<std::string, std::string>> notes = {
      {"tcsel_version", TCSEL_VERSION},
      {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
      {"config_hash", summary.config_hash},
  };
  for (const auto& [chain, tc] : summary.dsim_queries) notes.emplace_back("dsim_query." + chain, tc);

  write_file(cfg.output_dir / "ranking.csv", ranking_csv.str());
  write_file(cfg.output_dir / "relevant_ranking.csv", relevant_csv.str());
  write_file(cfg.output_dir / "ranks_design.csv", design_csv.str());
  write_file(cfg.output_dir / "map.csv", map_csv.str());
  write_file(cfg.output_dir / "dsim.csv", dsim_csv.str());
  write_file(cfg.output_dir / "dsim_grid.txt", grid.str());
  write_file(cfg.output_dir / "stats.csv", stats_csv.str());
  write_file(cfg.output_dir / "stats.txt", stats_txt.str());
  write_file(cfg.output_dir / "manifest.cfg", manifest_text(cfg, notes));
  return summary;
}

}  // namespace tcsel::cli
