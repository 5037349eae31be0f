#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tcsel/retrieval.hpp"
#include "tcsel/textprep.hpp"

namespace tcsel {

// Differential similarity between the feature-activated and -deactivated
// variants for one query: the best configured document of the activated
// corpus against the best document of the deactivated corpus.
struct DsimResult {
  std::string chain_id;
  TestContentVariant variant = TestContentVariant::V1Full;
  std::string model;
  double value = 0.0;
  double activated_configured_max = 0.0;
  double deactivated_max = 0.0;
};

// `configured` is aligned with activated.doc_ids.
DsimResult dsim(const SimilarityResult& activated, const std::vector<bool>& configured,
                const SimilarityResult& deactivated);

enum class SummaryStatistic { Max, Mean };

std::string_view to_string(SummaryStatistic s);
SummaryStatistic parse_statistic(std::string_view text);

struct RankingEntry {
  std::string test_case_id;
  double score = 0.0;
  std::size_t rank = 0;
};

struct TestCaseRanking {
  std::string corpus_label;
  SummaryStatistic statistic = SummaryStatistic::Max;
  TestContentVariant variant = TestContentVariant::V1Full;
  std::vector<RankingEntry> entries;

  // 1-based rank of a test case; throws DataError if absent.
  std::size_t rank_of(const std::string& test_case_id) const;
  // Relevance bits in ranked order.
  std::vector<bool> relevance(const std::set<std::string>& relevant) const;
};

double summarize(const std::vector<double>& scores, SummaryStatistic statistic);

// `scores` maps every test case to its per-document similarity vector.
TestCaseRanking rank_test_cases(const std::map<std::string, std::vector<double>>& scores,
                                SummaryStatistic statistic, std::string corpus_label = {},
                                TestContentVariant variant = TestContentVariant::V1Full);

// Mean over relevant positions i of (relevant in top i) / i.
double average_precision(const std::vector<bool>& relevance);
double mean_average_precision(const std::vector<std::vector<bool>>& rankings);

// Report writers. Each writes the header followed by the rows.
void write_ranking_header(std::ostream& out);
void write_ranking_rows(std::ostream& out, const TestCaseRanking& ranking);
void write_dsim_header(std::ostream& out);
void write_dsim_row(std::ostream& out, const DsimResult& result);

}  // namespace tcsel
