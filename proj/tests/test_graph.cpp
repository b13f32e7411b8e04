#include <catch2/catch_amalgamated.hpp>

#include "gessvdd/graph.hpp"
#include "test_support.hpp"

using namespace gessvdd;
using test_support::random_feasible_alpha;
using test_support::random_matrix;

namespace {

void check_graph_laplacian(const Matrix& l) {
  REQUIRE((l - l.transpose()).norm() < 1e-12);
  REQUIRE(l.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
  REQUIRE(sym_eig(l).values.minCoeff() >= -1e-9);
}

std::vector<int> random_labels(Rng& rng, int n, int clusters) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int c = 0; c < clusters; ++c) labels[static_cast<std::size_t>(c)] = c;  // non-empty
  for (int i = clusters; i < n; ++i) {
    labels[static_cast<std::size_t>(i)] =
        static_cast<int>(rng.next_below(static_cast<std::uint64_t>(clusters)));
  }
  Rng shuffle_rng(rng.next_u64());
  shuffle_rng.shuffle(labels);
  return labels;
}

}  // namespace

TEST_CASE("laplacian_total small cases") {
  REQUIRE(laplacian_total(1).matrix(0, 0) == 0.0);
  Matrix expected(2, 2);
  expected << 0.5, -0.5, -0.5, 0.5;
  REQUIRE((laplacian_total(2).matrix - expected).norm() < 1e-15);
}

TEST_CASE("laplacian_total spectrum is a zero plus ones") {
  const EigenPairs eig = sym_eig(laplacian_total(5).matrix);
  REQUIRE(eig.values(0) == Catch::Approx(0.0).margin(1e-12));
  for (Index i = 1; i < 5; ++i) REQUIRE(eig.values(i) == Catch::Approx(1.0));
}

TEST_CASE("laplacian_within collapses to the total graph for one cluster") {
  const std::vector<int> labels(6, 0);
  REQUIRE((laplacian_within(labels, 1).matrix - laplacian_total(6).matrix).norm() < 1e-14);
}

TEST_CASE("laplacian_within vanishes when every sample is its own cluster") {
  const std::vector<int> labels{0, 1, 2, 3};
  REQUIRE(laplacian_within(labels, 4).matrix.norm() == 0.0);
}

TEST_CASE("laplacian_within hand-expanded block structure") {
  const std::vector<int> labels{0, 0, 1};
  Matrix expected(3, 3);
  expected << 0.5, -0.5, 0.0, -0.5, 0.5, 0.0, 0.0, 0.0, 0.0;
  REQUIRE((laplacian_within(labels, 2).matrix - expected).norm() < 1e-15);
}

TEST_CASE("laplacian_within rejects an empty cluster") {
  const std::vector<int> labels{0, 0, 2};
  REQUIRE_THROWS_MATCHES(laplacian_within(labels, 3), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::EmptyCluster;
                         }));
}

TEST_CASE("laplacian_between vanishes for a single cluster") {
  const std::vector<int> labels(5, 0);
  REQUIRE(laplacian_between(labels, 1).matrix.norm() < 1e-15);
}

TEST_CASE("within plus between equals total for random labelings") {
  Rng rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 3 + static_cast<int>(rng.next_below(12));
    const int clusters = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    const std::vector<int> labels = random_labels(rng, n, clusters);
    const Matrix sum = laplacian_within(labels, clusters).matrix +
                       laplacian_between(labels, clusters).matrix;
    REQUIRE((sum - laplacian_total(n).matrix).norm() < 1e-12);
  }
}

TEST_CASE("laplacian_between matches the outer-product definition") {
  // sum_c N_c ((1/N_c) 1_c - (1/N) 1)((1/N_c) 1_c - (1/N) 1)'
  const std::vector<int> labels{0, 0, 1};
  const int n = 3;
  Matrix direct = Matrix::Zero(n, n);
  for (int c = 0; c < 2; ++c) {
    Vector indicator = Vector::Zero(n);
    double count = 0.0;
    for (int i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) {
        indicator(i) = 1.0;
        count += 1.0;
      }
    }
    const Vector v = indicator / count - Vector::Constant(n, 1.0 / n);
    direct += count * v * v.transpose();
  }
  REQUIRE((laplacian_between(labels, 2).matrix - direct).norm() < 1e-12);
}

TEST_CASE("laplacian_pca scales the total graph") {
  Matrix expected(2, 2);
  expected << 0.25, -0.25, -0.25, 0.25;
  REQUIRE((laplacian_pca(2).matrix - expected).norm() < 1e-15);
  REQUIRE((5.0 * laplacian_pca(5).matrix - laplacian_total(5).matrix).norm() == 0.0);
}

TEST_CASE("pca scatter equals the sample covariance") {
  Rng rng(22);
  const Matrix x = random_matrix(rng, 4, 12);
  const Matrix s = scatter(x, laplacian_pca(12));
  const Vector mean = x.rowwise().mean();
  Matrix cov = Matrix::Zero(4, 4);
  for (Index i = 0; i < 12; ++i) {
    cov += (x.col(i) - mean) * (x.col(i) - mean).transpose();
  }
  cov /= 12.0;
  REQUIRE((s - cov).norm() < 1e-10);
}

TEST_CASE("laplacian_knn hand-checked neighbor structure") {
  Matrix x(1, 3);
  x << 0.0, 1.0, 10.0;
  const Laplacian l = laplacian_knn(x, 1);
  Matrix adjacency(3, 3);
  adjacency << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  Matrix expected = -adjacency;
  expected.diagonal() = adjacency.rowwise().sum();
  REQUIRE((l.matrix - expected).norm() == 0.0);
}

TEST_CASE("laplacian_knn with k = N-1 is the complete graph") {
  Rng rng(23);
  const Matrix x = random_matrix(rng, 3, 6);
  const Laplacian l = laplacian_knn(x, 5);
  const Matrix expected = 6.0 * Matrix::Identity(6, 6) - Matrix::Ones(6, 6);
  REQUIRE((l.matrix - expected).norm() == 0.0);
}

TEST_CASE("laplacian_knn is a PSD graph Laplacian on random data") {
  Rng rng(24);
  const Matrix x = random_matrix(rng, 4, 10);
  check_graph_laplacian(laplacian_knn(x, 3).matrix);
}

TEST_CASE("laplacian_knn commutes with sample permutation") {
  Rng rng(25);
  const Matrix x = random_matrix(rng, 3, 8);
  const Matrix l = laplacian_knn(x, 3).matrix;

  std::vector<Index> perm{5, 2, 7, 0, 3, 6, 1, 4};
  Matrix xp(3, 8);
  for (Index j = 0; j < 8; ++j) xp.col(j) = x.col(perm[static_cast<std::size_t>(j)]);
  const Matrix lp = laplacian_knn(xp, 3).matrix;
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < 8; ++j) {
      REQUIRE(lp(i, j) == l(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]));
    }
  }
}

TEST_CASE("laplacian_alpha degenerate and symmetric two-point cases") {
  Vector atom(2);
  atom << 1.0, 0.0;
  REQUIRE(laplacian_alpha(atom).matrix.norm() < 1e-15);

  Vector half(2);
  half << 0.5, 0.5;
  Matrix expected(2, 2);
  expected << 0.25, -0.25, -0.25, 0.25;
  REQUIRE((laplacian_alpha(half).matrix - expected).norm() < 1e-15);
}

TEST_CASE("alpha scatter equals the weighted variance around the dual center") {
  Rng rng(26);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix x = random_matrix(rng, 3, 6);
    const Vector alpha = random_feasible_alpha(rng, 6, 2);
    const Matrix s = scatter(x, laplacian_alpha(alpha));
    const Vector center = x * alpha;
    Matrix direct = Matrix::Zero(3, 3);
    for (Index i = 0; i < 6; ++i) {
      direct += alpha(i) * (x.col(i) - center) * (x.col(i) - center).transpose();
    }
    REQUIRE((s - direct).norm() < 1e-10);
  }
}

TEST_CASE("laplacian_alpha is a PSD graph Laplacian for feasible alpha") {
  Rng rng(27);
  for (int rep = 0; rep < 20; ++rep) {
    const Index n = 2 + static_cast<Index>(rng.next_below(10));
    check_graph_laplacian(laplacian_alpha(random_feasible_alpha(rng, n, n / 3)).matrix);
  }
}

TEST_CASE("laplacian_alpha rejects infeasible input") {
  Vector bad_sum(3);
  bad_sum << 0.5, 0.2, 0.2;
  REQUIRE_THROWS_MATCHES(laplacian_alpha(bad_sum), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::InfeasibleAlpha;
                         }));
  Vector negative(2);
  negative << 1.5, -0.5;
  REQUIRE_THROWS_MATCHES(laplacian_alpha(negative), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::InfeasibleAlpha;
                         }));
}

TEST_CASE("scatter identity, zero, and total cases") {
  Rng rng(28);
  const Matrix x = random_matrix(rng, 3, 7);
  REQUIRE((scatter(x, Matrix::Identity(7, 7)) - x * x.transpose()).norm() < 1e-12);
  REQUIRE(scatter(x, Matrix::Zero(7, 7)).norm() == 0.0);

  const Matrix s = scatter(x, laplacian_total(7));
  const Vector mean = x.rowwise().mean();
  Matrix direct = Matrix::Zero(3, 3);
  for (Index i = 0; i < 7; ++i) {
    direct += (x.col(i) - mean) * (x.col(i) - mean).transpose();
  }
  REQUIRE((s - direct).norm() < 1e-10);
}

TEST_CASE("scatter rejects mismatched sizes") {
  Rng rng(29);
  const Matrix x = random_matrix(rng, 3, 7);
  REQUIRE_THROWS_MATCHES(scatter(x, Matrix::Identity(6, 6)), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::DimensionMismatch;
                         }));
}
