#include "tcsel/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "tcsel/csv.hpp"
#include "tcsel/parallel.hpp"

namespace tcsel {

std::string_view to_string(Weighting w) {
  return w == Weighting::RawTf ? "raw-tf" : "tf-idf";
}

Weighting parse_weighting(std::string_view text) {
  if (text == "raw-tf" || text == "tf") return Weighting::RawTf;
  if (text == "tf-idf" || text == "tfidf") return Weighting::TfIdf;
  throw ConfigError("unknown weighting '" + std::string(text) + "' (expected raw-tf or tf-idf)");
}

TermDocumentMatrix TermDocumentMatrix::from_entries(std::vector<std::string> terms,
                                                    std::vector<std::string> doc_ids,
                                                    const std::vector<Entry>& entries) {
  if (terms.empty() || doc_ids.empty()) throw DataError("empty matrix");
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (!(terms[i - 1] < terms[i])) {
      throw DataError("vocabulary must be sorted and unique near '" + terms[i] + "'");
    }
  }
  {
    std::set<std::string_view> seen;
    for (const auto& id : doc_ids) {
      if (!seen.insert(id).second) throw DataError("duplicate document id " + id);
    }
  }
  TermDocumentMatrix m;
  const auto rows = static_cast<Eigen::Index>(terms.size());
  const auto cols = static_cast<Eigen::Index>(doc_ids.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.term < 0 || e.term >= rows || e.doc < 0 || e.doc >= cols) {
      throw DataError("matrix entry out of range");
    }
    if (e.count < 0 || e.count != std::floor(e.count)) {
      throw DataError("raw counts must be non-negative integers");
    }
    if (e.count > 0) triplets.emplace_back(e.term, e.doc, e.count);
  }
  m.counts_.resize(rows, cols);
  m.counts_.setFromTriplets(triplets.begin(), triplets.end());
  m.counts_.makeCompressed();

  std::vector<bool> has_entry(terms.size(), false);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (SparseMatrix::InnerIterator it(m.counts_, c); it; ++it) {
      if (it.value() > 0) has_entry[static_cast<std::size_t>(it.row())] = true;
    }
  }
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (!has_entry[t]) throw DataError("orphan vocabulary row '" + terms[t] + "'");
  }

  m.terms_ = std::move(terms);
  m.doc_ids_ = std::move(doc_ids);
  for (std::size_t t = 0; t < m.terms_.size(); ++t) {
    m.index_.emplace(m.terms_[t], static_cast<Eigen::Index>(t));
  }
  m.weights_ = m.counts_;
  m.refresh_norms();
  return m;
}

std::optional<Eigen::Index> TermDocumentMatrix::term_index(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void TermDocumentMatrix::refresh_norms() {
  column_norms_.resize(weights_.cols());
  for (Eigen::Index c = 0; c < weights_.cols(); ++c) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(weights_, c); it; ++it) sum += it.value() * it.value();
    column_norms_[c] = std::sqrt(sum);
  }
}

TermDocumentMatrix TermDocumentMatrix::with_tfidf() const {
  if (weighting_ != Weighting::RawTf) throw ConfigError("apply_tfidf requires a raw-tf matrix");
  TermDocumentMatrix out = *this;
  const double n = static_cast<double>(doc_count());
  Eigen::VectorXd df = Eigen::VectorXd::Zero(term_count());
  for (Eigen::Index c = 0; c < counts_.cols(); ++c) {
    for (SparseMatrix::InnerIterator it(counts_, c); it; ++it) df[it.row()] += 1.0;
  }
  out.idf_.resize(term_count());
  for (Eigen::Index t = 0; t < term_count(); ++t) out.idf_[t] = std::log(n / df[t]);
  for (Eigen::Index c = 0; c < out.weights_.cols(); ++c) {
    for (SparseMatrix::InnerIterator it(out.weights_, c); it; ++it) {
      it.valueRef() *= out.idf_[it.row()];
    }
  }
  out.weighting_ = Weighting::TfIdf;
  out.refresh_norms();
  return out;
}

TermDocumentMatrix build_matrix(const std::vector<ProcessedDocument>& docs) {
  std::set<std::string> vocabulary;
  for (const auto& doc : docs) vocabulary.insert(doc.terms.begin(), doc.terms.end());
  if (vocabulary.empty()) throw DataError("empty matrix: no document contains any term");

  std::vector<std::string> terms(vocabulary.begin(), vocabulary.end());
  std::unordered_map<std::string_view, Eigen::Index> row_of;
  for (std::size_t t = 0; t < terms.size(); ++t) row_of.emplace(terms[t], static_cast<Eigen::Index>(t));

  std::vector<std::string> doc_ids;
  std::vector<TermDocumentMatrix::Entry> entries;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    doc_ids.push_back(docs[d].doc_id);
    std::map<Eigen::Index, double> column;
    for (const auto& term : docs[d].terms) column[row_of.at(term)] += 1.0;
    for (const auto& [row, count] : column) {
      entries.push_back({row, static_cast<Eigen::Index>(d), count});
    }
  }
  return TermDocumentMatrix::from_entries(std::move(terms), std::move(doc_ids), entries);
}

TermDocumentMatrix apply_tfidf(const TermDocumentMatrix& m) { return m.with_tfidf(); }

QueryVector embed_query(const TermDocumentMatrix& m, const std::vector<std::string>& terms) {
  QueryVector q;
  std::map<Eigen::Index, double> counts;
  for (const auto& term : terms) {
    if (auto row = m.term_index(term)) {
      counts[*row] += 1.0;
    } else {
      ++q.dropped;
    }
  }
  q.values.resize(m.term_count());
  q.values.reserve(static_cast<Eigen::Index>(counts.size()));
  for (const auto& [row, count] : counts) {
    double w = m.weighting() == Weighting::TfIdf ? count * m.idf()[row] : count;
    if (w != 0.0) q.values.insertBack(row) = w;
  }
  return q;
}

double SimilarityResult::score_of(std::string_view doc_id) const {
  for (std::size_t i = 0; i < doc_ids.size(); ++i) {
    if (doc_ids[i] == doc_id) return scores[i];
  }
  throw DataError("no score for document " + std::string(doc_id));
}

double SimilarityResult::max_score() const {
  if (scores.empty()) throw DataError("similarity result is empty");
  return *std::max_element(scores.begin(), scores.end());
}

std::vector<std::size_t> SimilarityResult::ranks() const {
  std::vector<std::size_t> out(ranked.size());
  for (std::size_t r = 0; r < ranked.size(); ++r) out[ranked[r]] = r + 1;
  return out;
}

std::vector<std::size_t> rank_by_score(const std::vector<std::string>& ids,
                                       const std::vector<double>& scores) {
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  return order;
}

SimilarityResult vsm_score(const TermDocumentMatrix& m, const QueryVector& q,
                           std::string query_id, int workers) {
  if (q.values.size() != m.term_count()) {
    throw ConfigError("query dimension does not match the vocabulary size");
  }
  Eigen::VectorXd dense = Eigen::VectorXd::Zero(m.term_count());
  for (SparseVector::InnerIterator it(q.values); it; ++it) dense[it.index()] = it.value();
  const double q_norm = dense.norm();

  SimilarityResult result;
  result.query_id = std::move(query_id);
  result.doc_ids = m.doc_ids();
  result.scores.assign(m.doc_ids().size(), 0.0);
  const auto& weights = m.weights();
  const auto& norms = m.column_norms();
  parallel_blocks(result.scores.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t d = begin; d < end; ++d) {
      const auto col = static_cast<Eigen::Index>(d);
      const double d_norm = norms[col];
      if (q_norm == 0.0 || d_norm == 0.0) continue;
      double dot = 0.0;
      for (SparseMatrix::InnerIterator it(weights, col); it; ++it) dot += dense[it.row()] * it.value();
      result.scores[d] = std::clamp(dot / (q_norm * d_norm), -1.0, 1.0);
    }
  });
  result.ranked = rank_by_score(result.doc_ids, result.scores);
  return result;
}

void save_index(std::ostream& out, const TermDocumentMatrix& m) {
  out << "tcsel-index 1\n";
  out << "weighting " << to_string(m.weighting()) << '\n';
  out << "terms " << m.terms().size() << '\n';
  for (const auto& t : m.terms()) out << t << '\n';
  out << "docs " << m.doc_ids().size() << '\n';
  for (const auto& id : m.doc_ids()) {
    if (id.find('\n') != std::string::npos) throw DataError("document id contains a newline");
    out << id << '\n';
  }
  const auto& counts = m.counts();
  out << "entries " << counts.nonZeros() << '\n';
  for (Eigen::Index c = 0; c < counts.cols(); ++c) {
    for (SparseMatrix::InnerIterator it(counts, c); it; ++it) {
      out << it.row() << ' ' << c << ' ' << csv::format_double(it.value()) << '\n';
    }
  }
}

void save_index(const std::filesystem::path& path, const TermDocumentMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  save_index(out, m);
}

TermDocumentMatrix load_index(std::istream& in, const std::string& origin) {
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw DataError(origin + ": truncated index, expected " + what);
    return line;
  };
  auto header = [&](const std::string& key) -> std::size_t {
    std::string text = next(key.c_str());
    if (!text.starts_with(key + " ")) throw DataError(origin + ": expected '" + key + "' header");
    return static_cast<std::size_t>(csv::parse_int(text.substr(key.size() + 1), origin));
  };
  if (next("version") != "tcsel-index 1") throw DataError(origin + ": unsupported index version");
  std::string weighting_line = next("weighting");
  if (!weighting_line.starts_with("weighting ")) throw DataError(origin + ": expected weighting");
  Weighting weighting = parse_weighting(weighting_line.substr(10));

  std::vector<std::string> terms(header("terms"));
  for (auto& t : terms) t = next("term");
  std::vector<std::string> docs(header("docs"));
  for (auto& d : docs) d = next("doc id");
  std::size_t n = header("entries");
  std::vector<TermDocumentMatrix::Entry> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::istringstream fields(next("entry"));
    std::string r, c, v;
    fields >> r >> c >> v;
    entries.push_back({static_cast<Eigen::Index>(csv::parse_int(r, origin)),
                       static_cast<Eigen::Index>(csv::parse_int(c, origin)),
                       csv::parse_double(v, origin)});
  }
  auto m = TermDocumentMatrix::from_entries(std::move(terms), std::move(docs), entries);
  return weighting == Weighting::TfIdf ? m.with_tfidf() : m;
}

TermDocumentMatrix load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return load_index(in, path.string());
}

void write_scores_csv(std::ostream& out, const SimilarityResult& result,
                      const std::vector<bool>& configured) {
  out << "doc_id,score,rank,configured\n";
  for (std::size_t r = 0; r < result.ranked.size(); ++r) {
    std::size_t d = result.ranked[r];
    bool flag = !configured.empty() && configured[d];
    csv::write_row(out, {result.doc_ids[d], csv::format_double(result.scores[d]),
                         std::to_string(r + 1), flag ? "1" : "0"});
  }
}

}  // namespace tcsel
