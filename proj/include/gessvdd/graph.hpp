// Constraint-graph Laplacians over the training samples and the scatter
// matrices S = X L X' built from them. Covers the total/within/between
// scatter graphs, the PCA graph, the symmetric kNN graph, and the
// alpha-weighted graph arising from the SVDD dual.

#ifndef GESSVDD_GRAPH_HPP
#define GESSVDD_GRAPH_HPP

#include <numeric>
#include <optional>

#include "gessvdd/core.hpp"
#include "gessvdd/linalg.hpp"

namespace gessvdd {

// Zero..Knn are the selectable constraint graphs; Total and Alpha tag the
// internally constructed scatter and dual-weighted Laplacians.
enum class GraphKind { Zero, Identity, Pca, WithinCluster, BetweenCluster, Knn, Total, Alpha };

struct LaplacianSpec {
  GraphKind kind = GraphKind::Zero;
  // cluster count for WithinCluster/BetweenCluster, neighbor count for Knn
  int k = 5;
};

struct Laplacian {
  Matrix matrix;  // N x N symmetric
  LaplacianSpec spec;
  std::optional<std::vector<int>> cluster_labels;
};

namespace detail {

inline void require_labels_cover(const std::vector<int>& labels, int clusters) {
  std::vector<int> counts(static_cast<std::size_t>(clusters), 0);
  for (int label : labels) {
    if (label < 0 || label >= clusters) {
      throw Error(ErrorCode::InvalidArgument, "cluster label out of range");
    }
    ++counts[static_cast<std::size_t>(label)];
  }
  for (int c : counts) {
    if (c == 0) throw Error(ErrorCode::EmptyCluster, "empty cluster in label assignment");
  }
}

}  // namespace detail

// L_t = I - (1/n) 1 1'
inline Laplacian laplacian_total(Index n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "laplacian_total: n must be >= 1");
  Matrix l = Matrix::Identity(n, n);
  l.array() -= 1.0 / static_cast<double>(n);
  return Laplacian{std::move(l), LaplacianSpec{GraphKind::Total, 0}, std::nullopt};
}

// L_w = I - sum_c (1/N_c) 1_c 1_c'
inline Laplacian laplacian_within(const std::vector<int>& labels, int clusters) {
  const Index n = static_cast<Index>(labels.size());
  detail::require_labels_cover(labels, clusters);
  std::vector<double> counts(static_cast<std::size_t>(clusters), 0.0);
  for (int label : labels) counts[static_cast<std::size_t>(label)] += 1.0;
  Matrix l = Matrix::Identity(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) {
        l(i, j) -= 1.0 / counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
      }
    }
  }
  Laplacian out{std::move(l), LaplacianSpec{GraphKind::WithinCluster, clusters}, labels};
  return out;
}

// L_b = sum_c (1/N_c) 1_c 1_c' - (1/n) 1 1'
inline Laplacian laplacian_between(const std::vector<int>& labels, int clusters) {
  const Index n = static_cast<Index>(labels.size());
  detail::require_labels_cover(labels, clusters);
  std::vector<double> counts(static_cast<std::size_t>(clusters), 0.0);
  for (int label : labels) counts[static_cast<std::size_t>(label)] += 1.0;
  Matrix l = Matrix::Constant(n, n, -1.0 / static_cast<double>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) {
        l(i, j) += 1.0 / counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
      }
    }
  }
  Laplacian out{std::move(l), LaplacianSpec{GraphKind::BetweenCluster, clusters}, labels};
  return out;
}

// L_pca = (1/n) L_t
inline Laplacian laplacian_pca(Index n) {
  Laplacian l = laplacian_total(n);
  l.matrix /= static_cast<double>(n);
  l.spec = LaplacianSpec{GraphKind::Pca, 0};
  return l;
}

// Symmetric unweighted kNN graph: A_ij = 1 iff i is among the k Euclidean
// nearest neighbors of j or vice versa (self excluded); L = D - A.
// Distance ties break toward the lower sample index.
inline Laplacian laplacian_knn(const Matrix& x, int k) {
  const Index n = x.cols();
  if (k < 1 || k >= n) {
    throw Error(ErrorCode::InvalidArgument, "laplacian_knn: need 1 <= k < N");
  }
  require_finite(x, "laplacian_knn");

  Matrix adjacency = Matrix::Zero(n, n);
  std::vector<std::pair<double, Index>> order(static_cast<std::size_t>(n - 1));
  for (Index j = 0; j < n; ++j) {
    std::size_t m = 0;
    for (Index i = 0; i < n; ++i) {
      if (i == j) continue;
      order[m++] = {(x.col(i) - x.col(j)).squaredNorm(), i};
    }
    std::sort(order.begin(), order.end());
    for (int t = 0; t < k; ++t) {
      const Index i = order[static_cast<std::size_t>(t)].second;
      adjacency(i, j) = 1.0;
      adjacency(j, i) = 1.0;
    }
  }
  Matrix l = -adjacency;
  l.diagonal() = adjacency.rowwise().sum();
  return Laplacian{std::move(l), LaplacianSpec{GraphKind::Knn, k}, std::nullopt};
}

// L_alpha = diag(alpha) - alpha alpha'. Requires a feasible dual vector
// (nonnegative, summing to one); rows then sum to zero and L_alpha is PSD.
inline Laplacian laplacian_alpha(const Vector& alpha) {
  if (!alpha.allFinite()) {
    throw Error(ErrorCode::InfeasibleAlpha, "laplacian_alpha: non-finite alpha");
  }
  if (std::abs(alpha.sum() - 1.0) > 1e-8) {
    throw Error(ErrorCode::InfeasibleAlpha, "laplacian_alpha: alpha must sum to 1");
  }
  if (alpha.minCoeff() < -1e-12) {
    throw Error(ErrorCode::InfeasibleAlpha, "laplacian_alpha: alpha must be nonnegative");
  }
  Matrix l = -alpha * alpha.transpose();
  l.diagonal() += alpha;
  return Laplacian{std::move(l), LaplacianSpec{GraphKind::Alpha, 0}, std::nullopt};
}

// S = X L X', symmetrized.
inline Matrix scatter(const Matrix& x, const Matrix& laplacian) {
  if (x.cols() != laplacian.rows() || laplacian.rows() != laplacian.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "scatter: Laplacian size must match sample count");
  }
  Matrix s = x * laplacian * x.transpose();
  return 0.5 * (s + s.transpose().eval());
}

inline Matrix scatter(const Matrix& x, const Laplacian& laplacian) {
  return scatter(x, laplacian.matrix);
}

}  // namespace gessvdd

#endif  // GESSVDD_GRAPH_HPP
