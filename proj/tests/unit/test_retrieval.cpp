#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "oracles.hpp"
#include "tcsel/lsa.hpp"
#include "tcsel/retrieval.hpp"

using namespace tcsel;
using tcsel::testing::dense_cosine;
using tcsel::testing::gram_singular_values;
using tcsel::testing::random_integer_matrix;

namespace {

// Builds a matrix from a dense count table with generated term and doc names.
// Empty rows are dropped to satisfy the no-orphan-row invariant.
TermDocumentMatrix matrix_from_dense(const Eigen::MatrixXd& m) {
  std::vector<ProcessedDocument> docs(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    docs[static_cast<std::size_t>(c)].doc_id = "d" + std::to_string(1000 + c);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (int n = 0; n < static_cast<int>(m(r, c)); ++n) {
        docs[static_cast<std::size_t>(c)].terms.push_back("t" + std::to_string(1000 + r));
      }
    }
  }
  return build_matrix(docs);
}

Eigen::VectorXd dense_column(const SparseMatrix& m, Eigen::Index c) { return Eigen::MatrixXd(m).col(c); }

Eigen::VectorXd dense_query(const QueryVector& q) { return Eigen::VectorXd(q.values); }

QueryVector random_query(const TermDocumentMatrix& m, std::mt19937_64& rng) {
  std::vector<std::string> terms;
  const auto n = rng() % 12;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng() % 5 == 0) {
      terms.push_back("oov" + std::to_string(rng() % 3));
    } else {
      terms.push_back(m.terms()[rng() % m.terms().size()]);
    }
  }
  return embed_query(m, terms);
}

double frobenius_sq(const Eigen::MatrixXd& m) { return m.squaredNorm(); }

}  // namespace

TEST_CASE("build_matrix examples") {
  auto m = build_matrix({{"d1", {"a", "b", "a"}}, {"d2", {"b"}}});
  CHECK(m.terms() == std::vector<std::string>{"a", "b"});
  Eigen::MatrixXd dense(m.counts());
  CHECK(dense(0, 0) == 2);
  CHECK(dense(0, 1) == 0);
  CHECK(dense(1, 0) == 1);
  CHECK(dense(1, 1) == 1);

  auto single = build_matrix({{"d", {"x"}}});
  CHECK(single.term_count() == 1);
  CHECK(single.doc_count() == 1);
  CHECK(Eigen::MatrixXd(single.counts())(0, 0) == 1);

  CHECK_THROWS_WITH_AS(build_matrix({{"d1", {}}, {"d2", {}}}), doctest::Contains("empty matrix"), DataError);
}

TEST_CASE("tf-idf weighting") {
  auto m = build_matrix({{"d1", {"a", "a", "a", "c"}}, {"d2", {"b", "c"}}});
  auto w = apply_tfidf(m);
  CHECK(w.weighting() == Weighting::TfIdf);
  Eigen::MatrixXd dense(w.weights());
  CHECK(dense(0, 0) == doctest::Approx(3 * std::log(2.0)).epsilon(1e-12));
  CHECK(dense(2, 0) == 0.0);
  CHECK(dense(2, 1) == 0.0);
  CHECK_THROWS_AS(apply_tfidf(w), ConfigError);

  auto one = apply_tfidf(build_matrix({{"only", {"x", "y"}}}));
  CHECK(Eigen::MatrixXd(one.weights()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("embed_query") {
  auto m = build_matrix({{"d1", {"a", "b"}}, {"d2", {"b", "b"}}});
  auto q = embed_query(m, {"a", "a", "c"});
  CHECK(q.dropped == 1);
  CHECK(dense_query(q)(0) == 2);
  CHECK(dense_query(q)(1) == 0);
  CHECK(embed_query(m, {}).values.nonZeros() == 0);
  auto same = embed_query(m, {"b", "b"});
  CHECK((dense_query(same) - dense_column(m.counts(), 1)).norm() == 0.0);

  auto w = apply_tfidf(build_matrix({{"d1", {"a"}}, {"d2", {"b"}}}));
  CHECK(dense_query(embed_query(w, {"a"}))(0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("vsm examples") {
  auto m = TermDocumentMatrix::from_entries({"x", "y"}, {"d1", "d2", "d3"},
                                            {{0, 0, 1}, {0, 1, 1}, {1, 1, 1}, {1, 2, 1}});
  auto q = embed_query(m, {"x", "y"});
  auto r = vsm_score(m, q, "q");
  CHECK(r.score_of("d1") == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.score_of("d2") == doctest::Approx(1.0).epsilon(1e-12));
  auto ortho = vsm_score(m, embed_query(m, {"x"}));
  CHECK(ortho.score_of("d3") == 0.0);
  auto zero = vsm_score(m, embed_query(m, {"zzz"}));
  for (double s : zero.scores) CHECK(s == 0.0);
  // Ties by ascending doc id.
  CHECK(zero.ranked == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("index round trip") {
  tcsel::testing::PropertyRun prop("retrieval", "index save/load round trip");
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    prop.instance();
    Eigen::MatrixXd dense =
        random_integer_matrix(1 + static_cast<int>(rng() % 12), 1 + static_cast<int>(rng() % 8), rng, 3, 0.4);
    if (dense.sum() == 0) dense(0, 0) = 1;
    auto m = matrix_from_dense(dense);
    auto w = (i % 2) ? apply_tfidf(m) : m;
    std::stringstream ss;
    save_index(ss, w);
    auto back = load_index(ss, "memory");
    CHECK(back.terms() == w.terms());
    CHECK(back.doc_ids() == w.doc_ids());
    CHECK(back.weighting() == w.weighting());
    CHECK((Eigen::MatrixXd(back.weights()) - Eigen::MatrixXd(w.weights())).cwiseAbs().maxCoeff() == 0.0);
  }
  std::stringstream bad("tcsel-index 99\n");
  CHECK_THROWS_AS(load_index(bad, "bad"), DataError);
}

// Random matrices from integer tables; every column non-empty so documents exist.
TEST_CASE("vsm properties: oracle agreement, range, scale invariance, column sums, parallel determinism") {
  tcsel::testing::PropertyRun prop("retrieval", "vsm against dense oracle");
  std::mt19937_64 rng(2024);
  int instances = 0;
  while (instances < 150) {
    const int rows = 2 + static_cast<int>(rng() % 29);
    const int cols = 1 + static_cast<int>(rng() % 20);
    Eigen::MatrixXd dense = random_integer_matrix(rows, cols, rng, 4, 0.5);
    bool empty_col = false;
    for (int c = 0; c < cols; ++c) empty_col |= dense.col(c).sum() == 0;
    if (empty_col || dense.sum() == 0) continue;
    ++instances;
    prop.instance();
    auto raw = matrix_from_dense(dense);
    auto m = (instances % 3 == 0) ? apply_tfidf(raw) : raw;

    Eigen::VectorXd sums = Eigen::MatrixXd(raw.counts()).colwise().sum();
    for (int c = 0; c < cols; ++c) CHECK(sums(c) == doctest::Approx(dense.col(c).sum()));

    auto q = random_query(m, rng);
    auto r = vsm_score(m, q, "q", 1);
    Eigen::MatrixXd weights(m.weights());
    Eigen::VectorXd qd = dense_query(q);
    for (Eigen::Index c = 0; c < m.doc_count(); ++c) {
      const double oracle = dense_cosine(qd, weights.col(c));
      CHECK(std::abs(r.scores[static_cast<std::size_t>(c)] - oracle) <= 1e-10);
      CHECK(r.scores[static_cast<std::size_t>(c)] >= 0.0);
      CHECK(r.scores[static_cast<std::size_t>(c)] <= 1.0);
    }

    QueryVector scaled = q;
    scaled.values *= 0.5 + static_cast<double>(rng() % 100);
    auto rs = vsm_score(m, scaled);
    for (std::size_t i = 0; i < r.scores.size(); ++i) CHECK(std::abs(rs.scores[i] - r.scores[i]) <= 1e-12);

    for (int workers : {2, 3, 7}) {
      auto rp = vsm_score(m, q, "q", workers);
      CHECK(rp.scores == r.scores);
      CHECK(rp.ranked == r.ranked);
    }

    auto ranks = r.ranks();
    for (std::size_t i = 1; i < r.ranked.size(); ++i) {
      const double prev = r.scores[r.ranked[i - 1]];
      const double cur = r.scores[r.ranked[i]];
      CHECK(prev >= cur);
      if (prev == cur) CHECK(r.doc_ids[r.ranked[i - 1]] < r.doc_ids[r.ranked[i]]);
    }
    std::vector<std::size_t> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i + 1);
  }
}

TEST_CASE("truncated svd examples") {
  Eigen::MatrixXd rank1(2, 2);
  rank1 << 2, 4, 1, 2;
  SparseMatrix s = rank1.sparseView();
  auto svd = truncated_svd(s, 1);
  Eigen::MatrixXd recon = svd.left * svd.values.asDiagonal() * svd.right.transpose();
  CHECK((rank1 - recon).norm() <= 1e-8);
  CHECK_THROWS_AS(truncated_svd(s, 0), ConfigError);
  CHECK_THROWS_AS(truncated_svd(s, 3), ConfigError);

  std::mt19937_64 rng(1);
  Eigen::MatrixXd full = random_integer_matrix(6, 4, rng, 9);
  auto fsvd = truncated_svd(full.sparseView(), 4);
  CHECK((full - fsvd.left * fsvd.values.asDiagonal() * fsvd.right.transpose()).norm() <= 1e-8);
}

TEST_CASE("truncated svd 20x10 matches the Gram eigen oracle") {
  std::mt19937_64 rng(20);
  Eigen::MatrixXd m = random_integer_matrix(20, 10, rng, 6);
  auto svd = truncated_svd(m.sparseView(), 10);
  Eigen::VectorXd oracle = gram_singular_values(m);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(svd.values(i) - oracle(i)) <= 1e-6 * oracle(i));
}

TEST_CASE("truncated svd properties on random matrices") {
  tcsel::testing::PropertyRun prop("retrieval", "truncated svd against oracle");
  std::mt19937_64 rng(4242);
  for (int instance = 0; instance < 120; ++instance) {
    const int rows = 2 + static_cast<int>(rng() % 40);
    const int cols = 2 + static_cast<int>(rng() % 40);
    Eigen::MatrixXd m = random_integer_matrix(rows, cols, rng, 5, 0.3 + 0.7 * (rng() % 100) / 100.0);
    Eigen::JacobiSVD<Eigen::MatrixXd> oracle(m);
    Eigen::VectorXd sigma = oracle.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) rank += sigma(i) > 1e-8 * std::max(1.0, sigma(0)) ? 1 : 0;
    if (rank == 0) continue;
    prop.instance();
    const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(rank));
    const SvdMethod method = instance % 4 == 0 ? SvdMethod::Dense : SvdMethod::Lanczos;
    LsaOptions opts;
    opts.method = method;
    opts.seed = static_cast<std::uint64_t>(instance);
    auto svd = truncated_svd(m.sparseView(), k, opts);

    for (int i = 0; i < k; ++i) {
      CHECK(std::abs(svd.values(i) - sigma(i)) <= 1e-6 * sigma(i));
      if (i > 0) CHECK(svd.values(i) <= svd.values(i - 1) + 1e-9);
    }
    const Eigen::MatrixXd ik = Eigen::MatrixXd::Identity(k, k);
    CHECK((svd.left.transpose() * svd.left - ik).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK((svd.right.transpose() * svd.right - ik).cwiseAbs().maxCoeff() <= 1e-6);

    const Eigen::MatrixXd mk = svd.left * svd.values.asDiagonal() * svd.right.transpose();
    double tail = 0.0;
    for (Eigen::Index i = k; i < sigma.size(); ++i) tail += sigma(i) * sigma(i);
    const double err = frobenius_sq(m - mk);
    // relative to the tail energy; at k = rank both sides vanish and the
    // comparison falls back to the scale of M
    const double scale = tail > 0.0 ? tail : frobenius_sq(m);
    CHECK(std::abs(err - tail) <= 1e-8 * scale);
  }
}

TEST_CASE("truncated svd is deterministic per seed") {
  SparseMatrix m = random_count_matrix(60, 40, 0.2, 9);
  LsaOptions opts;
  opts.seed = 17;
  auto a = truncated_svd(m, 8, opts);
  auto b = truncated_svd(m, 8, opts);
  CHECK(a.values == b.values);
  CHECK(a.left == b.left);
  CHECK(a.right == b.right);
}

TEST_CASE("lsa scoring") {
  SUBCASE("full-rank fold-in recovers the source document") {
    std::mt19937_64 rng(31);
    tcsel::testing::PropertyRun prop("retrieval", "lsa full-rank fold-in recovers the document");
    while (prop.count() < 100) {
      const int rows = 4 + static_cast<int>(rng() % 12);
      const int cols = 2 + static_cast<int>(rng() % 4);
      Eigen::MatrixXd dense = random_integer_matrix(rows, cols, rng, 6);
      bool empty = false;
      for (int c = 0; c < cols; ++c) empty |= dense.col(c).sum() == 0;
      if (empty) continue;
      auto m = matrix_from_dense(dense);
      Eigen::JacobiSVD<Eigen::MatrixXd> jac{Eigen::MatrixXd(m.weights())};
      int rank = 0;
      for (Eigen::Index i = 0; i < jac.singularValues().size(); ++i)
        rank += jac.singularValues()(i) > 1e-8 * jac.singularValues()(0) ? 1 : 0;
      if (rank < cols) continue;
      prop.instance();
      auto model = lsa_fit(m, rank);
      const auto d = static_cast<Eigen::Index>(rng() % static_cast<unsigned>(cols));
      QueryVector q;
      q.values = m.weights().col(d);
      auto r = lsa_score(model, q);
      CHECK(r.ranked.front() == static_cast<std::size_t>(d));
      CHECK(r.scores[static_cast<std::size_t>(d)] == doctest::Approx(1.0).epsilon(1e-9));
      for (double s : r.scores) {
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
      }
    }
  }
  SUBCASE("all-OOV query scores zero") {
    auto m = build_matrix({{"d1", {"a", "b"}}, {"d2", {"b", "c"}}});
    auto model = lsa_fit(m, 2);
    auto r = lsa_score(model, embed_query(m, {"zzz"}));
    for (double s : r.scores) CHECK(s == 0.0);
  }
  SUBCASE("identical documents score equally") {
    auto m = build_matrix({{"d1", {"a", "b"}}, {"d2", {"a", "b"}}, {"d3", {"a", "b"}}});
    auto model = lsa_fit(m, 1);
    auto r = lsa_score(model, embed_query(m, {"a"}));
    CHECK(r.scores[0] == doctest::Approx(r.scores[1]));
    CHECK(r.scores[1] == doctest::Approx(r.scores[2]));
  }
  SUBCASE("rank-deficient k is a numerical error") {
    auto m = build_matrix({{"d1", {"a", "b"}}, {"d2", {"a", "b"}}});
    CHECK_THROWS_AS(lsa_fit(m, 2), NumericalError);
  }
}

TEST_CASE("runtime probe") {
  auto probe = svd_runtime_probe({{200, 150, 10}, {200, 150, 10}, {200, 150, 10}}, 3, 1);
  REQUIRE(probe.rows.size() == 3);
  for (const auto& row : probe.rows) CHECK(row.seconds > 0.0);

  std::vector<double> k = {1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double x : k) y.push_back(0.5 + 2.0 * x + 0.25 * x * x);
  auto fit = fit_quadratic(k, y);
  CHECK(fit.a == doctest::Approx(0.5));
  CHECK(fit.b == doctest::Approx(2.0));
  CHECK(fit.c == doctest::Approx(0.25));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}
