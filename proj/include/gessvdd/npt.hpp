// Non-linear projection trick: build the RBF kernel over the training set,
// double-center it, eigendecompose to an explicit embedding, and map unseen
// points into that embedding through the centered kernel vector.

#ifndef GESSVDD_NPT_HPP
#define GESSVDD_NPT_HPP

#include <cmath>

#include "gessvdd/core.hpp"
#include "gessvdd/linalg.hpp"

namespace gessvdd {

struct NptState {
  Matrix training_x;   // D x N, centered features
  double sigma = 1.0;
  Matrix kernel;       // N x N (empty after deserialization)
  Matrix centered_kernel;  // N x N (empty after deserialization)
  Matrix basis;        // N' x N, rows of Lambda^{1/2} U'
  Matrix phi_pinv;     // N' x N, pseudo-inverse of basis'
  Vector kernel_colmean;  // (1/N) K 1
  Index retained_rank = 0;
};

inline Vector rbf_kernel_against(const Matrix& x, const Vector& point, double sigma) {
  const double scale = -1.0 / (2.0 * sigma * sigma);
  Vector k(x.cols());
  for (Index i = 0; i < x.cols(); ++i) {
    k(i) = std::exp(scale * (x.col(i) - point).squaredNorm());
  }
  return k;
}

// K_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)), unit diagonal.
inline Matrix rbf_kernel(const Matrix& x, double sigma) {
  if (sigma <= 0.0) throw Error(ErrorCode::InvalidArgument, "rbf_kernel: sigma must be > 0");
  require_finite(x, "rbf_kernel");
  const Index n = x.cols();
  Matrix k(n, n);
  for (Index j = 0; j < n; ++j) {
    k.col(j) = rbf_kernel_against(x, x.col(j), sigma);
    k(j, j) = 1.0;
  }
  k = 0.5 * (k + k.transpose().eval());
  return k;
}

// khat = (I - (1/N) 1 1') (k - colmean), the test-side centering; with
// colmean = (1/N) K 1 this reproduces columns of the centered kernel.
inline Vector center_kernel_vector(const Vector& k, const Vector& colmean) {
  Vector shifted = k - colmean;
  return shifted.array() - shifted.mean();
}

// Khat = (I - (1/N) 1 1') K (I - (1/N) 1 1'), built column-by-column with the
// same expression the test phase uses so in-sample kernel vectors reproduce
// Khat columns bit-exactly.
inline Matrix center_kernel(const Matrix& k) {
  detail::require_symmetric(k, "center_kernel");
  const Index n = k.cols();
  const Vector colmean = k.rowwise().mean();
  Matrix khat(n, n);
  for (Index j = 0; j < n; ++j) {
    khat.col(j) = center_kernel_vector(k.col(j), colmean);
  }
  return khat;
}

// Eigendecompose Khat = U Lambda U', keep eigenvalues above
// rel_tol * lambda_max, and return the embedding basis Lambda^{1/2} U'
// (rows ordered by descending eigenvalue).
inline Matrix npt_embed(const Matrix& khat, double rel_tol = 1e-10) {
  EigenPairs eig = sym_eig(khat);
  const double lmax = eig.values.maxCoeff();
  if (lmax <= 0.0) {
    throw Error(ErrorCode::AllDegenerate, "npt_embed: centered kernel has no positive eigenvalues");
  }
  const double cutoff = std::max(rel_tol * lmax, 0.0);
  std::vector<Index> kept;
  for (Index i = eig.values.size() - 1; i >= 0; --i) {
    if (eig.values(i) > cutoff) kept.push_back(i);
  }
  Matrix basis(static_cast<Index>(kept.size()), khat.cols());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    basis.row(static_cast<Index>(r)) =
        std::sqrt(eig.values(kept[r])) * eig.vectors.col(kept[r]).transpose();
  }
  return basis;
}

// Map one point into the embedding: kernel vector against the training set,
// centered, then through the pseudo-inverse of basis'.
inline Vector npt_embed_test(const NptState& state, const Vector& point) {
  if (point.size() != state.training_x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "npt_embed_test: feature dimension mismatch");
  }
  const Vector k = rbf_kernel_against(state.training_x, point, state.sigma);
  const Vector khat = center_kernel_vector(k, state.kernel_colmean);
  return state.phi_pinv * khat;
}

// Full training-side construction. The returned embedding of the training
// data (one column per sample) is produced by the same map npt_embed_test
// applies, so in-sample test embeddings reproduce it exactly.
inline NptState npt_fit(const Matrix& x_centered, double sigma, double rel_tol = 1e-10) {
  NptState state;
  state.training_x = x_centered;
  state.sigma = sigma;
  state.kernel = rbf_kernel(x_centered, sigma);
  state.kernel_colmean = state.kernel.rowwise().mean();
  state.centered_kernel = center_kernel(state.kernel);
  state.basis = npt_embed(state.centered_kernel, rel_tol);
  state.retained_rank = state.basis.rows();
  state.phi_pinv = pseudo_inverse(state.basis.transpose());
  return state;
}

inline Matrix npt_training_embedding(const NptState& state) {
  Matrix phi(state.retained_rank, state.training_x.cols());
  for (Index j = 0; j < state.training_x.cols(); ++j) {
    phi.col(j) = npt_embed_test(state, state.training_x.col(j));
  }
  return phi;
}

}  // namespace gessvdd

#endif  // GESSVDD_NPT_HPP
