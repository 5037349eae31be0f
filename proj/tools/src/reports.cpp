#include "tcsel/cli/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "tcsel/error.hpp"
#include "tcsel/seed.hpp"

namespace tcsel::cli {

void write_design_csv(std::ostream& out, const std::vector<DesignRow>& rows) {
  out << "subject,corpus,model,variant,statistic,rank\n";
  for (const auto& r : rows) {
    csv::write_row(out, {r.subject, r.corpus, r.model, std::string(to_string(r.variant)),
                         std::string(to_string(r.statistic)), csv::format_double(r.rank)});
  }
}

std::vector<DesignRow> read_design_csv(const csv::Table& table) {
  if (table.empty()) throw DataError("empty report: design has no rows");
  const auto subject = table.column("subject");
  const auto corpus = table.column("corpus");
  const auto model = table.column("model");
  const auto variant = table.column("variant");
  const auto statistic = table.column("statistic");
  const auto rank = table.column("rank");
  std::vector<DesignRow> rows;
  std::size_t line = 1;
  for (const auto& row : table.rows()) {
    ++line;
    const std::string where = "design row " + std::to_string(line);
    DesignRow r;
    r.subject = row.at(subject);
    r.corpus = row.at(corpus);
    r.model = row.at(model);
    try {
      r.variant = parse_variant(row.at(variant));
      r.statistic = parse_statistic(row.at(statistic));
    } catch (const ConfigError& e) {
      throw DataError(where + ": " + e.what());
    }
    r.rank = csv::parse_double(row.at(rank), where);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

template <typename T>
void add_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

struct Group {
  std::vector<std::string> subjects;
  std::vector<TestContentVariant> variants;
  std::vector<SummaryStatistic> statistics;
  std::vector<const DesignRow*> rows;
};

RmDesign to_design(const Group& g) {
  std::vector<std::string> subjects = g.subjects;
  std::sort(subjects.begin(), subjects.end());
  std::vector<std::string> a, b;
  for (auto v : g.variants) a.emplace_back(to_string(v));
  for (auto s : g.statistics) b.emplace_back(to_string(s));
  RmDesign d(subjects, a, b);
  for (const auto* r : g.rows) {
    d.set(r->subject, to_string(r->variant), to_string(r->statistic), r->rank);
  }
  d.validate();
  return d;
}

}  // namespace

StatsReport compute_stats(const std::vector<DesignRow>& rows, int iterations, std::uint64_t seed,
                          int workers) {
  StatsReport report;
  std::vector<std::string> models;
  std::map<std::string, std::vector<std::string>> corpora_of;
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (const auto& r : rows) {
    add_unique(models, r.model);
    add_unique(corpora_of[r.model], r.corpus);
    auto& g = groups[{r.model, r.corpus}];
    add_unique(g.subjects, r.subject);
    add_unique(g.variants, r.variant);
    add_unique(g.statistics, r.statistic);
    g.rows.push_back(&r);
  }

  auto run = [&](const RmDesign& d, Effect effect, const std::string& label) {
    auto result = randomization_test(d, effect, iterations, derive_seed(seed, label), workers);
    result.label = label;
    report.results.push_back(result);
  };

  for (const auto& model : models) {
    std::vector<std::pair<std::string, RmDesign>> designs;
    for (const auto& corpus : corpora_of[model]) {
      const Group& g = groups.at({model, corpus});
      RmDesign d = to_design(g);
      const std::string suffix = corpus + ":" + model;
      if (g.subjects.size() < 2) {
        report.skipped.push_back("content:" + suffix + " and statistic:" + suffix + ": fewer than 2 subjects");
      } else {
        if (g.variants.size() >= 2) {
          run(d, Effect::FactorA, "content:" + suffix);
        } else {
          report.skipped.push_back("content:" + suffix + ": fewer than 2 variants");
        }
        if (g.statistics.size() >= 2) {
          run(d, Effect::FactorB, "statistic:" + suffix);
        } else {
          report.skipped.push_back("statistic:" + suffix + ": fewer than 2 statistics");
        }
      }
      designs.emplace_back(corpus, std::move(d));
    }
    for (std::size_t i = 0; i < designs.size(); ++i) {
      for (std::size_t j = i + 1; j < designs.size(); ++j) {
        const auto& [c1, d1] = designs[i];
        const auto& [c2, d2] = designs[j];
        const std::string label = "corpus:" + c1 + "-vs-" + c2 + ":" + model;
        if (d1.subjects() != d2.subjects() || d1.a_levels() != d2.a_levels() ||
            d1.b_levels() != d2.b_levels()) {
          report.skipped.push_back(label + ": designs do not share subjects and levels");
          continue;
        }
        if (d1.subjects().size() < 2) {
          report.skipped.push_back(label + ": fewer than 2 subjects");
          continue;
        }
        auto result = randomization_test_between(d1, d2, c1, c2, iterations, derive_seed(seed, label), workers);
        result.label = label;
        report.results.push_back(result);
      }
    }
  }
  return report;
}

void write_stats_csv(std::ostream& out, const StatsReport& report) {
  write_stats_header(out);
  for (const auto& r : report.results) write_stats_row(out, r);
}

void write_stats_text(std::ostream& out, const StatsReport& report) {
  char buf[256];
  out << "Randomization tests (repeated-measures F ratio, within-subject permutations)\n\n";
  for (const auto& r : report.results) {
    std::snprintf(buf, sizeof(buf), "%-40s F = %-12.6g p = %.5f  (%d iterations, seed %llu)\n", r.label.c_str(),
                  r.statistic, r.p_value, r.iterations, static_cast<unsigned long long>(r.seed));
    out << buf;
  }
  if (!report.skipped.empty()) {
    out << "\nSkipped:\n";
    for (const auto& s : report.skipped) out << "  " << s << "\n";
  }
}

SimilarityResult read_scores(const csv::Table& table, std::vector<bool>* configured) {
  if (table.empty()) throw DataError("empty report: scores have no rows");
  const auto doc = table.column("doc_id");
  const auto score = table.column("score");
  const bool has_configured = table.has_column("configured");
  SimilarityResult r;
  std::size_t line = 1;
  for (const auto& row : table.rows()) {
    ++line;
    r.doc_ids.push_back(row.at(doc));
    r.scores.push_back(csv::parse_double(row.at(score), "scores row " + std::to_string(line)));
    if (configured) {
      configured->push_back(has_configured && row.at(table.column("configured")) == "1");
    }
  }
  r.ranked = rank_by_score(r.doc_ids, r.scores);
  return r;
}

void write_score_series(std::ostream& out, const csv::Table& scores, std::size_t top) {
  std::vector<bool> configured;
  const auto r = read_scores(scores, &configured);
  out << "rank,similarity,configured,doc_id\n";
  for (std::size_t i = 0; i < r.ranked.size() && i < top; ++i) {
    const auto d = r.ranked[i];
    csv::write_row(out, {std::to_string(i + 1), csv::format_double(r.scores[d]), configured[d] ? "1" : "0",
                         r.doc_ids[d]});
  }
}

double quantile7(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void write_rank_quartiles(std::ostream& out, const csv::Table& ranking) {
  if (ranking.empty()) throw DataError("empty report: ranking has no rows");
  const auto label = ranking.column("corpus_label");
  const auto statistic = ranking.column("statistic");
  const auto variant = ranking.column("variant");
  const auto rank = ranking.column("rank");
  // The chain prefix of "chain:corpus:model" labels is pooled.
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> cells;
  std::size_t line = 1;
  for (const auto& row : ranking.rows()) {
    ++line;
    std::string corpus = row.at(label);
    if (auto colon = corpus.find(':'); colon != std::string::npos) corpus = corpus.substr(colon + 1);
    cells[{corpus, row.at(statistic), row.at(variant)}].push_back(
        csv::parse_double(row.at(rank), "ranking row " + std::to_string(line)));
  }
  out << "corpus,statistic,variant,n,min,q1,median,q3,max\n";
  for (auto& [key, values] : cells) {
    std::sort(values.begin(), values.end());
    const auto& [corpus, stat, var] = key;
    csv::write_row(out, {corpus, stat, var, std::to_string(values.size()), csv::format_double(values.front()),
                         csv::format_double(quantile7(values, 0.25)), csv::format_double(quantile7(values, 0.5)),
                         csv::format_double(quantile7(values, 0.75)), csv::format_double(values.back())});
  }
}

}  // namespace tcsel::cli
