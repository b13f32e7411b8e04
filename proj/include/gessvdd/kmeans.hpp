// Seeded k-means over column-sample matrices: k-means++ initialization,
// Lloyd iterations with empty-cluster repair, deterministic given the seed.

#ifndef GESSVDD_KMEANS_HPP
#define GESSVDD_KMEANS_HPP

#include <limits>

#include "gessvdd/core.hpp"

namespace gessvdd {

struct ClusterAssignment {
  std::vector<int> labels;
  Matrix centroids;  // D x k
  double inertia = 0.0;
};

namespace detail {

inline double assign_labels(const Matrix& x, const Matrix& centroids,
                            std::vector<int>& labels) {
  double inertia = 0.0;
  for (Index i = 0; i < x.cols(); ++i) {
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < centroids.cols(); ++c) {
      const double dist = (x.col(i) - centroids.col(c)).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    inertia += best_dist;
  }
  return inertia;
}

}  // namespace detail

inline ClusterAssignment kmeans(const Matrix& x, int k, std::uint64_t seed,
                                int max_iter = 100, double tol = 1e-6,
                                std::vector<double>* inertia_trace = nullptr) {
  const Index n = x.cols();
  if (k < 1 || static_cast<Index>(k) > n) {
    throw Error(ErrorCode::InvalidArgument, "kmeans: need 1 <= k <= N");
  }
  require_finite(x, "kmeans");

  Rng rng(seed);
  Matrix centroids(x.rows(), k);

  // k-means++ seeding
  centroids.col(0) = x.col(static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n))));
  Vector dist = Vector::Constant(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    for (Index i = 0; i < n; ++i) {
      dist(i) = std::min(dist(i), (x.col(i) - centroids.col(c - 1)).squaredNorm());
    }
    const double total = dist.sum();
    Index pick = 0;
    if (total > 0.0) {
      double target = rng.next_double() * total;
      for (Index i = 0; i < n; ++i) {
        target -= dist(i);
        if (target <= 0.0) {
          pick = i;
          break;
        }
        pick = i;
      }
    } else {
      pick = static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n)));
    }
    centroids.col(c) = x.col(pick);
  }

  ClusterAssignment out;
  out.labels.assign(static_cast<std::size_t>(n), 0);
  out.inertia = detail::assign_labels(x, centroids, out.labels);

  for (int iter = 0; iter < max_iter; ++iter) {
    Matrix sums = Matrix::Zero(x.rows(), k);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.col(out.labels[static_cast<std::size_t>(i)]) += x.col(i);
      ++counts[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)])];
    }
    Matrix next = centroids;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        next.col(c) = sums.col(c) / counts[static_cast<std::size_t>(c)];
      } else {
        // reseed an emptied centroid to the point farthest from its centroid
        Index farthest = 0;
        double best = -1.0;
        for (Index i = 0; i < n; ++i) {
          const double d =
              (x.col(i) - centroids.col(out.labels[static_cast<std::size_t>(i)])).squaredNorm();
          if (d > best) {
            best = d;
            farthest = i;
          }
        }
        next.col(c) = x.col(farthest);
      }
    }
    const double shift = (next - centroids).colwise().norm().maxCoeff();
    centroids = next;
    out.inertia = detail::assign_labels(x, centroids, out.labels);
    if (inertia_trace) inertia_trace->push_back(out.inertia);
    if (shift < tol) break;
  }

  // Ties and duplicate seeds can still leave a cluster empty; move the point
  // farthest from its centroid (from a cluster that keeps >= 2 members) there.
  for (;;) {
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int label : out.labels) ++counts[static_cast<std::size_t>(label)];
    int empty = -1;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        empty = c;
        break;
      }
    }
    if (empty < 0) break;
    Index donor = -1;
    double best = -1.0;
    for (Index i = 0; i < n; ++i) {
      const int label = out.labels[static_cast<std::size_t>(i)];
      if (counts[static_cast<std::size_t>(label)] < 2) continue;
      const double d = (x.col(i) - centroids.col(label)).squaredNorm();
      if (d > best) {
        best = d;
        donor = i;
      }
    }
    out.labels[static_cast<std::size_t>(donor)] = empty;
    centroids.col(empty) = x.col(donor);
  }
  out.inertia = 0.0;
  for (Index i = 0; i < n; ++i) {
    out.inertia +=
        (x.col(i) - centroids.col(out.labels[static_cast<std::size_t>(i)])).squaredNorm();
  }

  out.centroids = centroids;
  return out;
}

}  // namespace gessvdd

#endif  // GESSVDD_KMEANS_HPP
