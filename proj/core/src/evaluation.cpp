#include "tcsel/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "tcsel/csv.hpp"

namespace tcsel {

DsimResult dsim(const SimilarityResult& activated, const std::vector<bool>& configured,
                const SimilarityResult& deactivated) {
  if (configured.size() != activated.scores.size()) {
    throw DataError("configured flags do not match the activated corpus size");
  }
  bool any = false;
  double best = 0.0;
  for (std::size_t d = 0; d < configured.size(); ++d) {
    if (!configured[d]) continue;
    best = any ? std::max(best, activated.scores[d]) : activated.scores[d];
    any = true;
  }
  if (!any) throw DataError("no configured artifacts in activated corpus");
  DsimResult out;
  out.chain_id = activated.query_id;
  out.activated_configured_max = best;
  out.deactivated_max = deactivated.max_score();
  out.value = out.activated_configured_max - out.deactivated_max;
  return out;
}

std::string_view to_string(SummaryStatistic s) {
  return s == SummaryStatistic::Max ? "max" : "mean";
}

SummaryStatistic parse_statistic(std::string_view text) {
  if (text == "max" || text == "MAX") return SummaryStatistic::Max;
  if (text == "mean" || text == "MEAN") return SummaryStatistic::Mean;
  throw ConfigError("unknown summary statistic '" + std::string(text) + "'");
}

std::size_t TestCaseRanking::rank_of(const std::string& test_case_id) const {
  for (const auto& e : entries) {
    if (e.test_case_id == test_case_id) return e.rank;
  }
  throw DataError("test case " + test_case_id + " is not part of ranking " + corpus_label);
}

std::vector<bool> TestCaseRanking::relevance(const std::set<std::string>& relevant) const {
  std::vector<bool> bits;
  bits.reserve(entries.size());
  for (const auto& e : entries) bits.push_back(relevant.contains(e.test_case_id));
  return bits;
}

double summarize(const std::vector<double>& scores, SummaryStatistic statistic) {
  if (scores.empty()) throw DataError("cannot summarize an empty score vector");
  if (statistic == SummaryStatistic::Max) return *std::max_element(scores.begin(), scores.end());
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

TestCaseRanking rank_test_cases(const std::map<std::string, std::vector<double>>& scores,
                                SummaryStatistic statistic, std::string corpus_label,
                                TestContentVariant variant) {
  if (scores.empty()) throw DataError("cannot rank an empty test case set");
  std::vector<std::string> ids;
  std::vector<double> aggregated;
  std::size_t width = scores.begin()->second.size();
  for (const auto& [id, per_doc] : scores) {
    if (per_doc.size() != width) {
      throw DataError("test case " + id + " has an incomplete score vector");
    }
    ids.push_back(id);
    aggregated.push_back(summarize(per_doc, statistic));
  }
  TestCaseRanking ranking;
  ranking.corpus_label = std::move(corpus_label);
  ranking.statistic = statistic;
  ranking.variant = variant;
  auto order = rank_by_score(ids, aggregated);
  for (std::size_t r = 0; r < order.size(); ++r) {
    ranking.entries.push_back({ids[order[r]], aggregated[order[r]], r + 1});
  }
  return ranking;
}

double average_precision(const std::vector<bool>& relevance) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < relevance.size(); ++i) {
    if (!relevance[i]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  if (hits == 0) throw DataError("average precision needs at least one relevant item");
  return sum / static_cast<double>(hits);
}

double mean_average_precision(const std::vector<std::vector<bool>>& rankings) {
  if (rankings.empty()) throw DataError("mean average precision needs at least one ranking");
  double sum = 0.0;
  for (const auto& r : rankings) sum += average_precision(r);
  return sum / static_cast<double>(rankings.size());
}

void write_ranking_header(std::ostream& out) {
  out << "test_case_id,score,rank,statistic,variant,corpus_label\n";
}

void write_ranking_rows(std::ostream& out, const TestCaseRanking& ranking) {
  for (const auto& e : ranking.entries) {
    csv::write_row(out, {e.test_case_id, csv::format_double(e.score), std::to_string(e.rank),
                         std::string(to_string(ranking.statistic)),
                         std::string(to_string(ranking.variant)), ranking.corpus_label});
  }
}

void write_dsim_header(std::ostream& out) {
  out << "chain_id,variant,model,dsim,activated_max,deactivated_max\n";
}

void write_dsim_row(std::ostream& out, const DsimResult& r) {
  csv::write_row(out, {r.chain_id, std::string(to_string(r.variant)), r.model,
                       csv::format_double(r.value), csv::format_double(r.activated_configured_max),
                       csv::format_double(r.deactivated_max)});
}

}  // namespace tcsel
