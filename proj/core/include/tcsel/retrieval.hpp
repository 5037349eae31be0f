#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "tcsel/textprep.hpp"

namespace tcsel {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using SparseVector = Eigen::SparseVector<double>;

enum class Weighting { RawTf, TfIdf };

std::string_view to_string(Weighting w);
Weighting parse_weighting(std::string_view text);

// Sparse terms x documents index. Rows follow the lexicographically sorted
// vocabulary, columns follow doc_ids. Immutable once built.
class TermDocumentMatrix {
 public:
  struct Entry {
    Eigen::Index term;
    Eigen::Index doc;
    double count;
  };

  // Validates the invariants (no orphan rows, integer non-negative counts,
  // sorted unique vocabulary, unique doc ids).
  static TermDocumentMatrix from_entries(std::vector<std::string> terms,
                                         std::vector<std::string> doc_ids,
                                         const std::vector<Entry>& entries);

  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  std::optional<Eigen::Index> term_index(std::string_view term) const;

  Eigen::Index term_count() const { return static_cast<Eigen::Index>(terms_.size()); }
  Eigen::Index doc_count() const { return static_cast<Eigen::Index>(doc_ids_.size()); }

  // Raw term frequencies.
  const SparseMatrix& counts() const { return counts_; }
  // Entries after the weighting transform; equal to counts() for raw-tf.
  const SparseMatrix& weights() const { return weights_; }
  Weighting weighting() const { return weighting_; }
  // ln(N / df_t) per term; empty for raw-tf.
  const Eigen::VectorXd& idf() const { return idf_; }
  // Euclidean norm of every weighted column.
  const Eigen::VectorXd& column_norms() const { return column_norms_; }

  // Returns a tf-idf weighted copy. Requires raw-tf weighting.
  TermDocumentMatrix with_tfidf() const;

 private:
  void refresh_norms();

  std::vector<std::string> terms_;
  std::unordered_map<std::string, Eigen::Index> index_;
  std::vector<std::string> doc_ids_;
  SparseMatrix counts_;
  SparseMatrix weights_;
  Weighting weighting_ = Weighting::RawTf;
  Eigen::VectorXd idf_;
  Eigen::VectorXd column_norms_;
};

TermDocumentMatrix build_matrix(const std::vector<ProcessedDocument>& docs);
TermDocumentMatrix apply_tfidf(const TermDocumentMatrix& m);

// Query in the matrix's term space, weighted like the corpus.
struct QueryVector {
  SparseVector values;
  // Query term occurrences not present in the vocabulary.
  std::size_t dropped = 0;
};

QueryVector embed_query(const TermDocumentMatrix& m, const std::vector<std::string>& terms);

// Scores of one query against every document of a corpus.
struct SimilarityResult {
  std::string query_id;
  std::vector<std::string> doc_ids;
  std::vector<double> scores;
  // Indices into doc_ids: descending score, ties by ascending doc id.
  std::vector<std::size_t> ranked;

  double score_of(std::string_view doc_id) const;
  double max_score() const;
  // 1-based rank of every document, aligned with doc_ids.
  std::vector<std::size_t> ranks() const;
};

std::vector<std::size_t> rank_by_score(const std::vector<std::string>& ids,
                                       const std::vector<double>& scores);

// Cosine between the query and every document column. Columns are split into
// `workers` contiguous blocks; the output does not depend on the split.
SimilarityResult vsm_score(const TermDocumentMatrix& m, const QueryVector& q,
                           std::string query_id = {}, int workers = 1);

// Versioned text dump: vocabulary, doc ids and raw-count triplets.
void save_index(std::ostream& out, const TermDocumentMatrix& m);
void save_index(const std::filesystem::path& path, const TermDocumentMatrix& m);
TermDocumentMatrix load_index(std::istream& in, const std::string& origin);
TermDocumentMatrix load_index(const std::filesystem::path& path);

// CSV with header doc_id,score,rank,configured in ranked order. `configured`
// may be empty, in which case every row gets 0.
void write_scores_csv(std::ostream& out, const SimilarityResult& result,
                      const std::vector<bool>& configured = {});

}  // namespace tcsel
