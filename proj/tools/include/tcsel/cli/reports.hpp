#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tcsel/csv.hpp"
#include "tcsel/evaluation.hpp"
#include "tcsel/randomization.hpp"
#include "tcsel/retrieval.hpp"

namespace tcsel::cli {

// One observation of the repeated-measures design: the rank of a relevant
// test case (subject) under one corpus/model and one (variant, statistic) cell.
struct DesignRow {
  std::string subject;
  std::string corpus;
  std::string model;
  TestContentVariant variant = TestContentVariant::V1Full;
  SummaryStatistic statistic = SummaryStatistic::Max;
  double rank = 0.0;
};

// Header: subject,corpus,model,variant,statistic,rank
void write_design_csv(std::ostream& out, const std::vector<DesignRow>& rows);
std::vector<DesignRow> read_design_csv(const csv::Table& table);

struct StatsReport {
  std::vector<RandomizationResult> results;
  std::vector<std::string> skipped;
};

// Per (corpus, model): the content-variant effect (factor A) and the summary
// statistic effect (factor B). Per model and pair of corpora: the corpus-type
// effect. Effects lacking two subjects or two levels are listed as skipped.
StatsReport compute_stats(const std::vector<DesignRow>& rows, int iterations, std::uint64_t seed,
                          int workers);

void write_stats_csv(std::ostream& out, const StatsReport& report);
void write_stats_text(std::ostream& out, const StatsReport& report);

// Scores CSV (doc_id,score[,rank][,configured]) back into a result.
SimilarityResult read_scores(const csv::Table& table, std::vector<bool>* configured);

// Top-ranked rows of a scores CSV: rank,similarity,configured,doc_id.
void write_score_series(std::ostream& out, const csv::Table& scores, std::size_t top);

// Rank quartiles (type 7 quantiles) per corpus, statistic and variant of a
// ranking CSV: corpus,statistic,variant,n,min,q1,median,q3,max.
void write_rank_quartiles(std::ostream& out, const csv::Table& ranking);

// Linear interpolation quantile of sorted data (Hyndman-Fan type 7).
double quantile7(const std::vector<double>& sorted, double p);

}  // namespace tcsel::cli
