// Iterative subspace training: initialize the projection by PCA, then
// alternate between solving the SVDD dual in the whitened subspace and
// updating the projection by one of three rules (gradient step on the
// ratio-trace criterion, generalized eigenvectors of the scatter pair, or
// spectral regression on the graph pair), re-orthogonalizing after every
// update. Ends with a final dual solve that fixes the hypersphere.

#ifndef GESSVDD_TRAINER_HPP
#define GESSVDD_TRAINER_HPP

#include <optional>
#include <sstream>

#include "gessvdd/core.hpp"
#include "gessvdd/graph.hpp"
#include "gessvdd/kmeans.hpp"
#include "gessvdd/linalg.hpp"
#include "gessvdd/npt.hpp"
#include "gessvdd/svdd.hpp"

namespace gessvdd {

enum class UpdateRule { Gradient, Spectral, SpectralRegression };
enum class Direction { Min, Max };
enum class KernelKind { Linear, NptRbf };

struct Hyperparams {
  double c = 0.3;
  int d = 1;
  double eta = 0.1;
  int iterations = 5;
  LaplacianSpec graph{GraphKind::Knn, 5};
  UpdateRule update = UpdateRule::Gradient;
  Direction direction = Direction::Min;
  KernelKind kernel = KernelKind::Linear;
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

struct TrainingDiagnostics {
  std::vector<double> objective_trace;  // dual objective per solve, final included
  std::vector<std::string> warnings;
};

struct GessvddModel {
  Hyperparams params;
  Matrix q;         // d x D (d x N' in kernel mode)
  Matrix whitener;  // d x d, S_Q^{-1/2} at the final iterate
  SphereDescription sphere;
  Vector mean;      // training feature mean
  DualSolution dual;
  std::optional<NptState> npt;
  TrainingDiagnostics diagnostics;
  std::string positive_class;  // informational, set by callers that know it
};

// z = S_Q^{-1/2} Q x. All training and test projections go through this one
// expression so that equal inputs produce bit-equal outputs.
inline Vector project_sample(const Matrix& whitener, const Matrix& q, const Vector& x) {
  if (x.size() != q.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "project_sample: dimension mismatch");
  }
  return whitener * (q * x);
}

namespace detail {

inline void pad_rows_with_orthonormal_complement(Matrix& q, Index have,
                                                 std::vector<std::string>* warnings) {
  const Index d = q.rows();
  const Index dim = q.cols();
  Index next_basis = 0;
  for (Index r = have; r < d; ++r) {
    Vector candidate;
    for (; next_basis < dim; ++next_basis) {
      candidate = Vector::Unit(dim, next_basis);
      for (Index i = 0; i < r; ++i) {
        candidate -= q.row(i).dot(candidate) * q.row(i).transpose();
      }
      if (candidate.norm() > 1e-6) break;
    }
    if (candidate.size() == 0 || candidate.norm() <= 1e-6) {
      throw Error(ErrorCode::RankDeficient, "projection padding: no complement direction found");
    }
    q.row(r) = candidate.transpose() / candidate.norm();
    ++next_basis;
  }
  if (warnings) {
    warnings->push_back("projection rank deficient: padded " +
                        std::to_string(d - have) + " row(s) with orthonormal complement");
  }
}

// Eigenvalue selection for the spectral updates. Ascending input spectrum;
// min keeps the d smallest above the positivity threshold, max keeps the d
// largest. Short selections are padded from the next-nearest eigenvalues.
inline std::vector<Index> select_spectrum(const Vector& values, Index d, Direction direction,
                                          std::vector<std::string>* warnings) {
  const Index n = values.size();
  std::vector<Index> picked;
  picked.reserve(static_cast<std::size_t>(d));
  if (direction == Direction::Max) {
    for (Index i = n - 1; i >= 0 && static_cast<Index>(picked.size()) < d; --i) {
      picked.push_back(i);
    }
  } else {
    const double threshold = 1e-9 * std::max(1.0, std::abs(values(n - 1)));
    Index first_positive = n;
    for (Index i = 0; i < n; ++i) {
      if (values(i) > threshold) {
        first_positive = i;
        break;
      }
    }
    for (Index i = first_positive; i < n && static_cast<Index>(picked.size()) < d; ++i) {
      picked.push_back(i);
    }
    if (static_cast<Index>(picked.size()) < d) {
      if (warnings) {
        warnings->push_back("spectral selection: fewer than d positive eigenvalues, padding");
      }
      for (Index i = first_positive - 1; i >= 0 && static_cast<Index>(picked.size()) < d; --i) {
        picked.push_back(i);
      }
    }
  }
  if (static_cast<Index>(picked.size()) < d) {
    throw Error(ErrorCode::RankDeficient, "spectral selection: not enough eigenvalues");
  }
  return picked;
}

}  // namespace detail

// Rows of Q = leading eigenvectors of the sample covariance (1/N) X L_t X',
// eigenvalue-descending. Deficient covariance rank is padded with an
// orthonormal complement and recorded as a warning.
inline Matrix init_projection_pca(const Matrix& x, Index d,
                                  std::vector<std::string>* warnings = nullptr) {
  const Index dim = x.rows();
  const Index n = x.cols();
  if (d < 1 || d > std::min(dim, n)) {
    throw Error(ErrorCode::InvalidArgument, "init_projection_pca: need 1 <= d <= min(D, N)");
  }
  Matrix cov = scatter(x, laplacian_total(n)) / static_cast<double>(n);
  EigenPairs eig = sym_eig(cov);
  const double lmax = std::max(eig.values.maxCoeff(), 0.0);
  const double rank_tol = 1e-12 * std::max(lmax, 1e-300);

  Matrix q(d, dim);
  Index have = 0;
  for (Index i = dim - 1; i >= 0 && have < d; --i) {
    if (eig.values(i) <= rank_tol) break;
    q.row(have++) = eig.vectors.col(i).transpose();
  }
  if (have < d) detail::pad_rows_with_orthonormal_complement(q, have, warnings);
  return q;
}

// Analytic gradient of Tr((Q S_x Q')^{-1} Q S_a Q') with S_inv passed in.
inline Matrix criterion_gradient(const Matrix& q, const Matrix& s_x, const Matrix& s_inv,
                                 const Matrix& s_alpha) {
  return 2.0 * s_inv * q * s_alpha - 2.0 * s_inv * q * s_alpha * q.transpose() * s_inv * q * s_x;
}

inline Matrix update_gradient(const Matrix& q, const Matrix& s_x, const Matrix& s_inv,
                              const Matrix& s_alpha, double eta, Direction direction) {
  const Matrix delta = criterion_gradient(q, s_x, s_inv, s_alpha);
  Matrix next = direction == Direction::Min ? (q - eta * delta).eval() : (q + eta * delta).eval();
  if (!next.allFinite()) {
    throw Error(ErrorCode::NonFinite, "update_gradient: step produced non-finite values");
  }
  return next;
}

// Rows of Q' = selected generalized eigenvectors of S_a q = v S_x q,
// renormalized to unit Euclidean length.
inline Matrix update_spectral(const Matrix& s_x, const Matrix& s_alpha, Index d,
                              Direction direction, std::vector<std::string>* warnings = nullptr) {
  EigenPairs eig = gen_eig(s_alpha, s_x, auto_ridge(s_x));
  const std::vector<Index> picked = detail::select_spectrum(eig.values, d, direction, warnings);
  Matrix q(d, s_x.rows());
  for (std::size_t r = 0; r < picked.size(); ++r) {
    Vector v = eig.vectors.col(picked[r]);
    const double norm = v.norm();
    if (norm <= 0.0) {
      throw Error(ErrorCode::RankDeficient, "update_spectral: zero eigenvector");
    }
    q.row(static_cast<Index>(r)) = v.transpose() / norm;
  }
  return q;
}

// Target vectors from the N x N problem L_a t = v L_x t, then projection
// recovery by ridge regression.
inline Matrix update_spectral_regression(const Matrix& x, const Matrix& l_x,
                                         const Matrix& l_alpha, Index d, double eta,
                                         Direction direction,
                                         std::vector<std::string>* warnings = nullptr) {
  EigenPairs eig = gen_eig(l_alpha, l_x, auto_ridge(l_x));
  const std::vector<Index> picked = detail::select_spectrum(eig.values, d, direction, warnings);
  Matrix targets(x.cols(), d);
  for (std::size_t r = 0; r < picked.size(); ++r) {
    targets.col(static_cast<Index>(r)) = eig.vectors.col(picked[r]);
  }
  return ridge_solve(x, targets, eta);
}

struct RealizedConstraint {
  Matrix laplacian;  // N x N; identity for the Zero and Identity kinds
  Matrix scatter;    // D x D
  std::optional<std::vector<int>> cluster_labels;
};

// Build L_x and S_x once per training call. The Zero kind has no
// data-dependent constraint: the scatter is the identity, and the N x N
// problem of the spectral-regression update falls back to L_x = I.
inline RealizedConstraint realize_constraint(const LaplacianSpec& spec, const Matrix& x,
                                             std::uint64_t seed) {
  const Index n = x.cols();
  RealizedConstraint out;
  switch (spec.kind) {
    case GraphKind::Zero:
      out.laplacian = Matrix::Identity(n, n);
      out.scatter = Matrix::Identity(x.rows(), x.rows());
      return out;
    case GraphKind::Identity:
      out.laplacian = Matrix::Identity(n, n);
      break;
    case GraphKind::Pca:
      out.laplacian = laplacian_pca(n).matrix;
      break;
    case GraphKind::WithinCluster:
    case GraphKind::BetweenCluster: {
      if (spec.k < 1 || static_cast<Index>(spec.k) >= n) {
        throw Error(ErrorCode::InvalidArgument, "cluster count must satisfy 1 <= k < N");
      }
      ClusterAssignment clusters = kmeans(x, spec.k, seed);
      Laplacian l = spec.kind == GraphKind::WithinCluster
                        ? laplacian_within(clusters.labels, spec.k)
                        : laplacian_between(clusters.labels, spec.k);
      out.laplacian = std::move(l.matrix);
      out.cluster_labels = std::move(clusters.labels);
      break;
    }
    case GraphKind::Knn:
      out.laplacian = laplacian_knn(x, spec.k).matrix;
      break;
    default:
      throw Error(ErrorCode::InvalidArgument, "realize_constraint: not a constraint graph kind");
  }
  out.scatter = scatter(x, out.laplacian);
  return out;
}

namespace detail {

struct WhitenedState {
  Matrix s_q;       // regularized Q S_x Q'
  Matrix whitener;  // S_Q^{-1/2}
  Matrix s_inv;     // whitener * whitener
};

inline WhitenedState whiten(const Matrix& q, const Matrix& s_x, Index d) {
  WhitenedState st;
  st.s_q = q * s_x * q.transpose();
  st.s_q = 0.5 * (st.s_q + st.s_q.transpose().eval());
  const double eps = 1e-6 * std::max(st.s_q.trace() / static_cast<double>(d), 1e-12);
  st.s_q.diagonal().array() += eps;
  st.whitener = spd_inv_sqrt(st.s_q);
  st.s_inv = st.whitener * st.whitener;
  st.s_inv = 0.5 * (st.s_inv + st.s_inv.transpose().eval());
  return st;
}

inline Matrix project_all(const Matrix& whitener, const Matrix& q, const Matrix& x) {
  Matrix z(q.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    z.col(j) = project_sample(whitener, q, x.col(j));
  }
  return z;
}

}  // namespace detail

inline GessvddModel train(const Matrix& x_raw, const Hyperparams& params) {
  const Index n = x_raw.cols();
  if (n < 2) throw Error(ErrorCode::TooFewSamples, "train: need at least 2 samples");
  if (params.c <= 0.0 || static_cast<double>(n) * params.c < 1.0 - 1e-12) {
    throw Error(ErrorCode::InfeasibleC, "train: need C > 0 and N*C >= 1");
  }
  if (params.d < 1) throw Error(ErrorCode::InvalidArgument, "train: d must be >= 1");
  if (params.eta <= 0.0) throw Error(ErrorCode::InvalidArgument, "train: eta must be > 0");
  if (params.iterations < 0) {
    throw Error(ErrorCode::InvalidArgument, "train: iterations must be >= 0");
  }
  if (params.kernel == KernelKind::NptRbf && params.sigma <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "train: sigma must be > 0");
  }
  require_finite(x_raw, "train");

  GessvddModel model;
  model.params = params;
  model.mean = x_raw.rowwise().mean();
  Matrix x = x_raw.colwise() - model.mean;

  if (params.kernel == KernelKind::NptRbf) {
    model.npt = npt_fit(x, params.sigma);
    x = npt_training_embedding(*model.npt);
  }
  const Index dim = x.rows();
  if (params.d > std::min(dim, n)) {
    throw Error(ErrorCode::InvalidArgument,
                "train: d exceeds min(feature dimension, sample count)");
  }

  const RealizedConstraint constraint =
      realize_constraint(params.graph, x, mix_seed(params.seed, 0xC1));

  Matrix q = init_projection_pca(x, params.d, &model.diagnostics.warnings);

  for (int iter = 0; iter < params.iterations; ++iter) {
    try {
      detail::WhitenedState st = detail::whiten(q, constraint.scatter, params.d);
      const Matrix z = detail::project_all(st.whitener, q, x);
      DualSolution sol = solve_dual(z, params.c);
      model.diagnostics.objective_trace.push_back(sol.objective);
      if (!sol.converged) {
        std::ostringstream msg;
        msg << "iteration " << iter << ": dual solver hit iteration cap, KKT violation "
            << sol.kkt_violation;
        model.diagnostics.warnings.push_back(msg.str());
      }
      const Laplacian l_alpha = laplacian_alpha(sol.alpha);
      const Matrix s_alpha = scatter(x, l_alpha);

      switch (params.update) {
        case UpdateRule::Gradient:
          q = update_gradient(q, constraint.scatter, st.s_inv, s_alpha, params.eta,
                              params.direction);
          break;
        case UpdateRule::Spectral:
          q = update_spectral(constraint.scatter, s_alpha, params.d, params.direction,
                              &model.diagnostics.warnings);
          break;
        case UpdateRule::SpectralRegression:
          q = update_spectral_regression(x, constraint.laplacian, l_alpha.matrix, params.d,
                                         params.eta, params.direction,
                                         &model.diagnostics.warnings);
          break;
      }
      q = qr_orthonormalize_rows(q);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonFinite) {
        throw Error(ErrorCode::NonFinite,
                    "train: iteration " + std::to_string(iter) + ": " + e.what());
      }
      throw;
    }
  }

  detail::WhitenedState st = detail::whiten(q, constraint.scatter, params.d);
  const Matrix z = detail::project_all(st.whitener, q, x);
  model.dual = solve_dual(z, params.c);
  model.diagnostics.objective_trace.push_back(model.dual.objective);
  if (!model.dual.converged) {
    std::ostringstream msg;
    msg << "final solve: dual solver hit iteration cap, KKT violation "
        << model.dual.kkt_violation;
    model.diagnostics.warnings.push_back(msg.str());
  }
  model.sphere = sphere_from_dual(z, model.dual, params.c);
  model.q = std::move(q);
  model.whitener = st.whitener;
  return model;
}

inline Classification predict_one(const GessvddModel& model, const Vector& x) {
  if (x.size() != model.mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "predict: feature dimension mismatch");
  }
  const Vector centered = x - model.mean;
  const Vector mapped =
      model.npt ? npt_embed_test(*model.npt, centered) : centered;
  return classify(project_sample(model.whitener, model.q, mapped), model.sphere);
}

inline std::vector<Classification> predict(const GessvddModel& model, const Matrix& x_test) {
  std::vector<Classification> out;
  out.reserve(static_cast<std::size_t>(x_test.cols()));
  for (Index j = 0; j < x_test.cols(); ++j) {
    out.push_back(predict_one(model, x_test.col(j)));
  }
  return out;
}

}  // namespace gessvdd

#endif  // GESSVDD_TRAINER_HPP
