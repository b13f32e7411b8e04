// Shared helpers for the test suites: seeded random matrices and feasible
// dual vectors.

#ifndef GESSVDD_TEST_SUPPORT_HPP
#define GESSVDD_TEST_SUPPORT_HPP

#include "gessvdd/core.hpp"

namespace test_support {

using gessvdd::Index;
using gessvdd::Matrix;
using gessvdd::Rng;
using gessvdd::Vector;

inline Matrix random_matrix(Rng& rng, Index rows, Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = scale * (2.0 * rng.next_double() - 1.0);
    }
  }
  return m;
}

inline Matrix random_symmetric(Rng& rng, Index n, double scale = 1.0) {
  Matrix m = random_matrix(rng, n, n, scale);
  return 0.5 * (m + m.transpose().eval());
}

inline Matrix random_spd(Rng& rng, Index n, double jitter = 0.1) {
  Matrix m = random_matrix(rng, n, n);
  Matrix s = m * m.transpose();
  s.diagonal().array() += jitter;
  return s;
}

// Nonnegative, sums to one; roughly `zeros` entries forced to zero.
inline Vector random_feasible_alpha(Rng& rng, Index n, Index zeros = 0) {
  Vector alpha(n);
  for (Index i = 0; i < n; ++i) {
    alpha(i) = -std::log(1.0 - rng.next_double() + 1e-12);
  }
  for (Index z = 0; z < zeros && z < n - 1; ++z) {
    alpha(static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n)))) = 0.0;
  }
  if (alpha.sum() <= 0.0) alpha.setConstant(1.0);
  alpha /= alpha.sum();
  return alpha;
}

}  // namespace test_support

#endif  // GESSVDD_TEST_SUPPORT_HPP
