// SVDD dual solver in the projected space, plus hypersphere assembly and the
// decision function. The dual
//     max  L(a) = sum_i a_i z_i'z_i - sum_ij a_i a_j z_i'z_j
//     s.t. sum_i a_i = 1, 0 <= a_i <= C
// is solved by two-coordinate ascent on the maximally KKT-violating pair,
// which preserves the simplex constraint exactly.

#ifndef GESSVDD_SVDD_HPP
#define GESSVDD_SVDD_HPP

#include <cmath>

#include "gessvdd/core.hpp"

namespace gessvdd {

enum class SampleCategory { Interior, Boundary, Outlier };

struct DualSolution {
  Vector alpha;
  double objective = 0.0;
  std::vector<SampleCategory> categories;
  bool converged = true;
  double kkt_violation = 0.0;
  long iterations = 0;
};

struct SphereDescription {
  Vector center;
  double radius = 0.0;
  double radius_sq = 0.0;  // exact squared distance of the support sample
  Index support_index = 0;
};

struct Classification {
  bool positive = false;
  double score = 0.0;  // R^2 - ||z - u||^2, positive inside
};

inline double support_vector_tolerance(double c) {
  return std::max(1e-8, 1e-6 * c);
}

namespace detail {

inline std::vector<SampleCategory> categorize(const Vector& alpha, double c) {
  const double eps = support_vector_tolerance(c);
  std::vector<SampleCategory> out(static_cast<std::size_t>(alpha.size()));
  for (Index i = 0; i < alpha.size(); ++i) {
    if (alpha(i) >= c - eps) {
      out[static_cast<std::size_t>(i)] = SampleCategory::Outlier;
    } else if (alpha(i) <= eps) {
      out[static_cast<std::size_t>(i)] = SampleCategory::Interior;
    } else {
      out[static_cast<std::size_t>(i)] = SampleCategory::Boundary;
    }
  }
  return out;
}

}  // namespace detail

inline DualSolution solve_dual(const Matrix& z, double c, double tol = 1e-6) {
  const Index n = z.cols();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "solve_dual: no samples");
  if (c <= 0.0) throw Error(ErrorCode::InvalidArgument, "solve_dual: C must be > 0");
  if (static_cast<double>(n) * c < 1.0 - 1e-12) {
    throw Error(ErrorCode::InfeasibleC, "solve_dual: N*C < 1 leaves no feasible alpha");
  }
  require_finite(z, "solve_dual");

  const Matrix gram = z.transpose() * z;
  const Vector diag = gram.diagonal();

  DualSolution sol;
  sol.alpha = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector galpha = gram * sol.alpha;  // gradient bookkeeping: g_i = diag_i - 2 galpha_i

  const long max_iter = 10 * static_cast<long>(n) * static_cast<long>(n);
  long iter = 0;
  double violation = 0.0;
  for (; iter < max_iter; ++iter) {
    // i: steepest-ascent candidate with room to grow; j: with room to shrink
    Index up = -1, down = -1;
    double gup = -std::numeric_limits<double>::infinity();
    double gdown = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; ++k) {
      const double g = diag(k) - 2.0 * galpha(k);
      if (sol.alpha(k) < c && g > gup) {
        gup = g;
        up = k;
      }
      if (sol.alpha(k) > 0.0 && g < gdown) {
        gdown = g;
        down = k;
      }
    }
    violation = gup - gdown;
    if (up < 0 || down < 0 || up == down || violation < tol) break;

    const double room = std::min(c - sol.alpha(up), sol.alpha(down));
    const double curvature = diag(up) - 2.0 * gram(up, down) + diag(down);
    double step = room;
    if (curvature > 0.0) step = std::min(room, violation / (2.0 * curvature));
    if (step <= 0.0) break;

    sol.alpha(up) += step;
    sol.alpha(down) -= step;
    // clamp roundoff drift
    sol.alpha(up) = std::min(sol.alpha(up), c);
    sol.alpha(down) = std::max(sol.alpha(down), 0.0);
    galpha += step * (gram.col(up) - gram.col(down));
  }

  sol.iterations = iter;
  sol.kkt_violation = std::max(violation, 0.0);
  sol.converged = violation < tol;
  galpha = gram * sol.alpha;
  sol.objective = diag.dot(sol.alpha) - sol.alpha.dot(galpha);
  sol.categories = detail::categorize(sol.alpha, c);
  if (!sol.alpha.allFinite()) {
    throw Error(ErrorCode::NonFinite, "solve_dual: non-finite solution");
  }
  return sol;
}

// Center u = Z a and radius from a boundary support vector. When no sample is
// strictly on the boundary, falls back to the largest alpha below C, then to
// the farthest sample with positive alpha.
inline SphereDescription sphere_from_dual(const Matrix& z, const DualSolution& sol, double c) {
  const Index n = z.cols();
  if (sol.alpha.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "sphere_from_dual: alpha size mismatch");
  }
  SphereDescription sphere;
  sphere.center = z * sol.alpha;

  const double eps = support_vector_tolerance(c);
  Index support = -1;
  double best_alpha = -1.0;
  for (Index i = 0; i < n; ++i) {
    const double a = sol.alpha(i);
    if (a > eps && a < c - eps && a > best_alpha) {
      best_alpha = a;
      support = i;
    }
  }
  if (support < 0) {
    for (Index i = 0; i < n; ++i) {
      const double a = sol.alpha(i);
      if (a < c - eps && a > best_alpha) {
        best_alpha = a;
        support = i;
      }
    }
  }
  if (support < 0) {
    double best_dist = -1.0;
    for (Index i = 0; i < n; ++i) {
      if (sol.alpha(i) <= 0.0) continue;
      const double dist = (z.col(i) - sphere.center).squaredNorm();
      if (dist > best_dist) {
        best_dist = dist;
        support = i;
      }
    }
  }
  if (support < 0) support = 0;

  sphere.support_index = support;
  sphere.radius_sq = (z.col(support) - sphere.center).squaredNorm();
  sphere.radius = std::sqrt(sphere.radius_sq);
  return sphere;
}

// Positive iff ||z - u||^2 <= R^2; boundary samples are inside.
inline Classification classify(const Vector& z, const SphereDescription& sphere) {
  if (z.size() != sphere.center.size()) {
    throw Error(ErrorCode::DimensionMismatch, "classify: dimension mismatch");
  }
  Classification out;
  out.score = sphere.radius_sq - (z - sphere.center).squaredNorm();
  out.positive = out.score >= 0.0;
  return out;
}

}  // namespace gessvdd

#endif  // GESSVDD_SVDD_HPP
