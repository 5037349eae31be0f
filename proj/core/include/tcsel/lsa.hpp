#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tcsel/retrieval.hpp"

namespace tcsel {

enum class SvdMethod {
  // Golub-Kahan-Lanczos bidiagonalization with full reorthogonalization.
  Lanczos,
  // Dense divide-and-conquer SVD; only for matrices up to 512 x 512.
  Dense,
};

struct LsaOptions {
  std::uint64_t seed = 0;
  // Convergence when every wanted Ritz triplet has residual <= tolerance * sigma_1.
  double tolerance = 1e-10;
  // Upper bound on Lanczos steps.
  int max_iterations = 1000;
  SvdMethod method = SvdMethod::Lanczos;
};

inline constexpr Eigen::Index kDenseSvdLimit = 512;

struct TruncatedSvd {
  Eigen::MatrixXd left;    // rows x k, orthonormal columns
  Eigen::VectorXd values;  // k, descending
  Eigen::MatrixXd right;   // cols x k, orthonormal columns
  int steps = 0;
  double max_residual = 0.0;
};

// Rank-k truncated SVD. Singular vector signs are fixed so that the
// largest-magnitude entry of every right vector is positive.
// Throws ConfigError for k outside [1, min(rows, cols)] and NumericalError when
// the iteration does not converge within max_iterations steps.
TruncatedSvd truncated_svd(const SparseMatrix& m, int k, const LsaOptions& options = {});

struct LsaModel {
  int k = 0;
  Eigen::MatrixXd term_factors;     // terms x k  (U_k)
  Eigen::VectorXd singular_values;  // k        (Sigma_k)
  Eigen::MatrixXd doc_factors;      // docs x k   (V_k)
  std::vector<std::string> doc_ids;
  Eigen::VectorXd doc_norms;        // row norms of doc_factors
  int steps = 0;
  double max_residual = 0.0;
};

// Fits the latent model on the weighted matrix. Additionally throws
// NumericalError when sigma_k is not positive (matrix rank below k).
LsaModel lsa_fit(const TermDocumentMatrix& m, int k, const LsaOptions& options = {});

// Folds the query in as Sigma_k^-1 U_k^T q and scores it against the rows of
// V_k by cosine. Scores lie in [-1, 1].
SimilarityResult lsa_score(const LsaModel& model, const QueryVector& q,
                           std::string query_id = {}, int workers = 1);

struct ProbeSize {
  int terms = 0;
  int docs = 0;
  int k = 0;
};

struct ProbeRow {
  ProbeSize size;
  double seconds = 0.0;
};

// seconds ~ a + b k + c k^2
struct QuadraticFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double r_squared = 0.0;
};

QuadraticFit fit_quadratic(std::span<const double> k, std::span<const double> seconds);

struct RuntimeProbe {
  std::vector<ProbeRow> rows;
  QuadraticFit fit;
};

// Times truncated_svd on seeded random sparse matrices (10% density, integer
// counts), reporting the median over `repetitions` per configuration.
RuntimeProbe svd_runtime_probe(const std::vector<ProbeSize>& sizes, std::uint64_t seed,
                               int repetitions = 1);

SparseMatrix random_count_matrix(int rows, int cols, double density, std::uint64_t seed);

}  // namespace tcsel
