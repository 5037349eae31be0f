#include "tcsel/lsa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "tcsel/parallel.hpp"
#include "tcsel/seed.hpp"

namespace tcsel {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Two passes of classical Gram-Schmidt against the accepted basis.
void reorthogonalize(VectorXd& x, const std::vector<VectorXd>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) x -= b.dot(x) * b;
  }
}

VectorXd random_unit(Index n, std::mt19937_64& rng, const std::vector<VectorXd>& basis) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 8; ++attempt) {
    VectorXd x(n);
    for (Index i = 0; i < n; ++i) x[i] = normal(rng);
    reorthogonalize(x, basis);
    double norm = x.norm();
    if (norm > 1e-8) return x / norm;
  }
  return VectorXd::Zero(n);
}

void fix_signs(MatrixXd& left, MatrixXd& right) {
  for (Index j = 0; j < right.cols(); ++j) {
    Index arg = 0;
    right.col(j).cwiseAbs().maxCoeff(&arg);
    if (right(arg, j) < 0) {
      right.col(j) *= -1.0;
      left.col(j) *= -1.0;
    }
  }
}

// Lanczos on a matrix with rows >= cols, so that the right Krylov basis is the
// one that can be exhausted.
TruncatedSvd lanczos_svd(const SparseMatrix& a, int k, const LsaOptions& options) {
  const Index m = a.rows();
  const Index n = a.cols();
  const SparseMatrix at = a.transpose();
  const double frob = a.norm();
  const double breakdown = 1e-13 * std::max(frob, 1e-300);
  const Index limit = std::min<Index>(n, std::max(options.max_iterations, 1));

  std::mt19937_64 rng(derive_seed(options.seed, "lanczos-start"));
  std::vector<VectorXd> us;
  std::vector<VectorXd> vs;
  std::vector<double> alphas;
  std::vector<double> betas;  // betas[j] couples v_{j+1} to u_j
  vs.push_back(random_unit(n, rng, {}));

  auto extend_to = [&](Index p) {
    while (static_cast<Index>(alphas.size()) < p) {
      const std::size_t j = alphas.size();
      VectorXd u = a * vs[j];
      if (j > 0) u -= betas[j - 1] * us[j - 1];
      reorthogonalize(u, us);
      double alpha = u.norm();
      if (alpha <= breakdown) {
        alpha = 0.0;
        u = random_unit(m, rng, us);
      } else {
        u /= alpha;
      }
      us.push_back(std::move(u));
      alphas.push_back(alpha);

      VectorXd v = at * us[j] - alpha * vs[j];
      reorthogonalize(v, vs);
      double beta = v.norm();
      if (beta <= breakdown) {
        beta = 0.0;
        v = static_cast<Index>(vs.size()) < n ? random_unit(n, rng, vs) : VectorXd::Zero(n);
      } else {
        v /= beta;
      }
      betas.push_back(beta);
      vs.push_back(std::move(v));
    }
  };

  Index p = std::min<Index>(limit, std::max<Index>(2 * k, k + 10));
  while (true) {
    extend_to(p);
    MatrixXd b = MatrixXd::Zero(p, p);
    for (Index j = 0; j < p; ++j) {
      b(j, j) = alphas[static_cast<std::size_t>(j)];
      if (j + 1 < p) b(j, j + 1) = betas[static_cast<std::size_t>(j)];
    }
    Eigen::BDCSVD<MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const VectorXd& sigma = svd.singularValues();
    const double last_beta = betas[static_cast<std::size_t>(p - 1)];
    double max_residual = 0.0;
    for (Index i = 0; i < k; ++i) {
      max_residual = std::max(max_residual, std::abs(last_beta * svd.matrixU()(p - 1, i)));
    }
    const double scale = std::max(sigma[0], 1e-300);
    const bool converged = max_residual <= options.tolerance * scale || p == n;
    if (converged) {
      TruncatedSvd out;
      MatrixXd ub(m, p);
      MatrixXd vb(n, p);
      for (Index j = 0; j < p; ++j) {
        ub.col(j) = us[static_cast<std::size_t>(j)];
        vb.col(j) = vs[static_cast<std::size_t>(j)];
      }
      out.left = ub * svd.matrixU().leftCols(k);
      out.right = vb * svd.matrixV().leftCols(k);
      out.values = sigma.head(k);
      out.steps = static_cast<int>(p);
      out.max_residual = p == n ? 0.0 : max_residual;
      return out;
    }
    if (p >= limit) {
      std::ostringstream msg;
      msg << "truncated SVD did not converge after " << p << " Lanczos steps (max residual "
          << max_residual << ", tolerance " << options.tolerance * scale << ")";
      throw NumericalError(msg.str());
    }
    p = std::min<Index>(limit, p + std::max<Index>(k, p / 2));
  }
}

TruncatedSvd dense_svd(const SparseMatrix& a, int k) {
  if (a.rows() > kDenseSvdLimit || a.cols() > kDenseSvdLimit) {
    throw ConfigError("dense SVD is limited to matrices up to 512 x 512");
  }
  MatrixXd dense(a);
  Eigen::BDCSVD<MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.left = svd.matrixU().leftCols(k);
  out.right = svd.matrixV().leftCols(k);
  out.values = svd.singularValues().head(k);
  return out;
}

}  // namespace

TruncatedSvd truncated_svd(const SparseMatrix& m, int k, const LsaOptions& options) {
  const Index max_k = std::min(m.rows(), m.cols());
  if (k < 1 || k > max_k) {
    throw ConfigError("k = " + std::to_string(k) + " out of range [1, " + std::to_string(max_k) + "]");
  }
  TruncatedSvd out;
  if (options.method == SvdMethod::Dense) {
    out = dense_svd(m, k);
  } else if (m.rows() >= m.cols()) {
    out = lanczos_svd(m, k, options);
  } else {
    SparseMatrix t = m.transpose();
    out = lanczos_svd(t, k, options);
    std::swap(out.left, out.right);
  }
  fix_signs(out.left, out.right);
  return out;
}

LsaModel lsa_fit(const TermDocumentMatrix& m, int k, const LsaOptions& options) {
  TruncatedSvd svd = truncated_svd(m.weights(), k, options);
  const double sigma_k = svd.values[k - 1];
  if (!(sigma_k > 1e-9 * std::max(svd.values[0], 1.0))) {
    throw NumericalError("matrix rank is below k = " + std::to_string(k) +
                         " (sigma_k = " + std::to_string(sigma_k) + ")");
  }
  LsaModel model;
  model.k = k;
  model.term_factors = std::move(svd.left);
  model.singular_values = std::move(svd.values);
  model.doc_factors = std::move(svd.right);
  model.doc_ids = m.doc_ids();
  model.doc_norms = model.doc_factors.rowwise().norm();
  model.steps = svd.steps;
  model.max_residual = svd.max_residual;
  return model;
}

SimilarityResult lsa_score(const LsaModel& model, const QueryVector& q, std::string query_id,
                           int workers) {
  if (q.values.size() != model.term_factors.rows()) {
    throw ConfigError("query dimension does not match the vocabulary size");
  }
  VectorXd projected = VectorXd::Zero(model.k);
  for (SparseVector::InnerIterator it(q.values); it; ++it) {
    projected += it.value() * model.term_factors.row(it.index()).transpose();
  }
  projected = projected.cwiseQuotient(model.singular_values);
  const double q_norm = projected.norm();

  SimilarityResult result;
  result.query_id = std::move(query_id);
  result.doc_ids = model.doc_ids;
  result.scores.assign(model.doc_ids.size(), 0.0);
  parallel_blocks(result.scores.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t d = begin; d < end; ++d) {
      const auto row = static_cast<Index>(d);
      const double d_norm = model.doc_norms[row];
      if (q_norm == 0.0 || d_norm == 0.0) continue;
      double dot = model.doc_factors.row(row).dot(projected);
      result.scores[d] = std::clamp(dot / (q_norm * d_norm), -1.0, 1.0);
    }
  });
  result.ranked = rank_by_score(result.doc_ids, result.scores);
  return result;
}

QuadraticFit fit_quadratic(std::span<const double> k, std::span<const double> seconds) {
  if (k.size() != seconds.size() || k.empty()) {
    throw ConfigError("fit_quadratic needs equally sized, non-empty inputs");
  }
  const auto n = static_cast<Index>(k.size());
  MatrixXd design(n, 3);
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    const double x = k[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = x;
    design(i, 2) = x * x;
    y[i] = seconds[static_cast<std::size_t>(i)];
  }
  VectorXd coef = design.completeOrthogonalDecomposition().solve(y);
  VectorXd fitted = design * coef;
  const double mean = y.mean();
  const double ss_res = (y - fitted).squaredNorm();
  const double ss_tot = (y.array() - mean).square().sum();
  QuadraticFit fit{coef[0], coef[1], coef[2], 0.0};
  if (ss_tot > 0.0) {
    fit.r_squared = 1.0 - ss_res / ss_tot;
  } else {
    fit.r_squared = ss_res <= 1e-24 ? 1.0 : 0.0;
  }
  return fit;
}

SparseMatrix random_count_matrix(int rows, int cols, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 5);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      if (coin(rng) < density) triplets.emplace_back(r, c, count(rng));
    }
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

RuntimeProbe svd_runtime_probe(const std::vector<ProbeSize>& sizes, std::uint64_t seed,
                               int repetitions) {
  if (sizes.empty()) throw ConfigError("svd_runtime_probe needs at least one size");
  repetitions = std::max(repetitions, 1);
  RuntimeProbe probe;
  std::vector<double> ks;
  std::vector<double> secs;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto& size = sizes[i];
    SparseMatrix m = random_count_matrix(size.terms, size.docs, 0.1,
                                         derive_seed(seed, "probe-matrix", i));
    std::vector<double> times;
    for (int r = 0; r < repetitions; ++r) {
      auto start = std::chrono::steady_clock::now();
      LsaOptions options;
      options.seed = derive_seed(seed, "probe-svd", i);
      auto svd = truncated_svd(m, size.k, options);
      auto stop = std::chrono::steady_clock::now();
      (void)svd;
      times.push_back(std::max(std::chrono::duration<double>(stop - start).count(), 1e-9));
    }
    std::nth_element(times.begin(), times.begin() + static_cast<long>(times.size() / 2), times.end());
    double median = times[times.size() / 2];
    probe.rows.push_back({size, median});
    ks.push_back(size.k);
    secs.push_back(median);
  }
  probe.fit = fit_quadratic(ks, secs);
  return probe;
}

}  // namespace tcsel
