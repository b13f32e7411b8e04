// Dense symmetric eigensolvers, SPD inverse square root, QR row
// orthogonalization, ridge solve, and Moore-Penrose pseudo-inverse.
// All operations are pure and deterministic; eigenvalues are returned in
// ascending order with a fixed eigenvector sign convention.

#ifndef GESSVDD_LINALG_HPP
#define GESSVDD_LINALG_HPP

#include <cmath>
#include <limits>

#include "gessvdd/core.hpp"

namespace gessvdd {

struct EigenPairs {
  Vector values;   // ascending
  Matrix vectors;  // column i pairs with values[i]
};

namespace detail {

// Flip each column so its largest-magnitude entry is positive. Keeps
// eigenvectors reproducible across runs and platforms.
inline void canonicalize_column_signs(Matrix& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index imax = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (vectors(imax, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

inline void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": matrix not square");
  }
}

inline void require_symmetric(const Matrix& a, const char* what) {
  require_square(a, what);
  const double scale = std::max(1.0, a.norm());
  if ((a - a.transpose()).norm() > 1e-10 * scale) {
    throw Error(ErrorCode::NonSymmetric, std::string(what) + ": matrix not symmetric");
  }
}

}  // namespace detail

// Full spectrum of a symmetric matrix, values ascending.
inline EigenPairs sym_eig(const Matrix& a) {
  require_finite(a, "sym_eig");
  detail::require_symmetric(a, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NonFinite, "sym_eig: eigensolver failed to converge");
  }
  EigenPairs out{solver.eigenvalues(), solver.eigenvectors()};
  detail::canonicalize_column_signs(out.vectors);
  return out;
}

// Suggested ridge for gen_eig when the right-hand matrix may be singular.
inline double auto_ridge(const Matrix& b) {
  const double n = static_cast<double>(std::max<Index>(b.rows(), 1));
  return 1e-10 * std::max(b.trace(), 0.0) / n;
}

// Generalized symmetric eigenproblem A q = lambda (B + ridge I) q via
// Cholesky whitening of B. Eigenvectors satisfy q' (B + ridge I) q = 1.
inline EigenPairs gen_eig(const Matrix& a, const Matrix& b, double ridge) {
  require_finite(a, "gen_eig");
  require_finite(b, "gen_eig");
  detail::require_symmetric(a, "gen_eig");
  detail::require_symmetric(b, "gen_eig");
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "gen_eig: size mismatch");
  }
  if (ridge < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "gen_eig: ridge must be >= 0");
  }
  Matrix breg = b;
  breg.diagonal().array() += ridge;

  Eigen::SelfAdjointEigenSolver<Matrix> bcheck(breg, Eigen::EigenvaluesOnly);
  const double bmax = bcheck.eigenvalues().maxCoeff();
  const double bmin = bcheck.eigenvalues().minCoeff();
  if (bmin <= 1e-14 * std::max(bmax, 0.0) || bmax <= 0.0) {
    throw Error(ErrorCode::SingularB, "gen_eig: B + ridge*I numerically singular");
  }

  Eigen::LLT<Matrix> llt(breg);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularB, "gen_eig: Cholesky factorization failed");
  }
  const Matrix lower = llt.matrixL();
  // C = L^-1 A L^-T, symmetric; eigvecs y map back to q = L^-T y.
  Matrix c = lower.triangularView<Eigen::Lower>().solve(a);
  c = lower.triangularView<Eigen::Lower>().solve(c.transpose().eval());
  c = 0.5 * (c + c.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(c);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NonFinite, "gen_eig: eigensolver failed to converge");
  }
  Matrix q = lower.transpose().triangularView<Eigen::Upper>().solve(solver.eigenvectors());
  detail::canonicalize_column_signs(q);
  return EigenPairs{solver.eigenvalues(), std::move(q)};
}

// M with M S' M = I, where S' clamps eigenvalues below rel_floor * lambda_max
// up to that floor. Symmetric by construction.
inline Matrix spd_inv_sqrt(const Matrix& s, double rel_floor = 1e-12) {
  if (rel_floor <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "spd_inv_sqrt: rel_floor must be > 0");
  }
  EigenPairs eig = sym_eig(s);
  const double lmax = eig.values.maxCoeff();
  if (lmax <= 0.0) {
    throw Error(ErrorCode::AllDegenerate, "spd_inv_sqrt: no positive eigenvalues");
  }
  const double floor = rel_floor * lmax;
  Vector inv_sqrt = eig.values.unaryExpr(
      [floor](double v) { return 1.0 / std::sqrt(std::max(v, floor)); });
  return eig.vectors * inv_sqrt.asDiagonal() * eig.vectors.transpose();
}

// Orthonormalize the rows of a wide matrix, preserving its row space.
// Signs fixed so a matrix with already-orthonormal rows maps to itself.
inline Matrix qr_orthonormalize_rows(const Matrix& q) {
  require_finite(q, "qr_orthonormalize_rows");
  const Index d = q.rows();
  const Index dim = q.cols();
  if (d > dim) {
    throw Error(ErrorCode::DimensionMismatch, "qr_orthonormalize_rows: more rows than columns");
  }
  Eigen::HouseholderQR<Matrix> qr(q.transpose());
  Matrix thin_q = qr.householderQ() * Matrix::Identity(dim, d);
  const Matrix r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  const double tol = 1e-10 * std::max(q.norm(), 1e-300);
  for (Index j = 0; j < d; ++j) {
    if (std::abs(r(j, j)) < tol) {
      throw Error(ErrorCode::RankDeficient, "qr_orthonormalize_rows: rows not independent");
    }
    if (r(j, j) < 0.0) thin_q.col(j) = -thin_q.col(j);
  }
  return thin_q.transpose();
}

// Q = T' X' (X X' + eta I)^-1, the ridge-regression recovery of projection
// directions from target vectors.
inline Matrix ridge_solve(const Matrix& x, const Matrix& t, double eta) {
  require_finite(x, "ridge_solve");
  require_finite(t, "ridge_solve");
  if (eta <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "ridge_solve: eta must be > 0");
  }
  if (x.cols() != t.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "ridge_solve: sample count mismatch");
  }
  Matrix gram = x * x.transpose();
  gram.diagonal().array() += eta;
  Eigen::LDLT<Matrix> ldlt(gram);
  Matrix w = ldlt.solve(x * t);  // D x d
  require_finite(w, "ridge_solve");
  return w.transpose();
}

// Moore-Penrose pseudo-inverse with singular values below
// rel_tol * sigma_max treated as zero.
inline Matrix pseudo_inverse(const Matrix& a, double rel_tol = 1e-12) {
  require_finite(a, "pseudo_inverse");
  if (rel_tol <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "pseudo_inverse: rel_tol must be > 0");
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) {
    return Matrix::Zero(a.cols(), a.rows());
  }
  const double cutoff = rel_tol * sv(0);
  Vector inv = sv.unaryExpr(
      [cutoff](double v) { return v > cutoff ? 1.0 / v : 0.0; });
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace gessvdd

#endif  // GESSVDD_LINALG_HPP
