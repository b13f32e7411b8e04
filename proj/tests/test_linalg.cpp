#include <catch2/catch_amalgamated.hpp>

#include "gessvdd/linalg.hpp"
#include "test_support.hpp"

using namespace gessvdd;
using test_support::random_matrix;
using test_support::random_spd;
using test_support::random_symmetric;

namespace {

// det(A - t B) as a polynomial in t (ascending coefficients), by Laplace
// expansion over polynomial entries. Independent of any eigensolver.
using Poly = std::vector<double>;

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Poly poly_scale(const Poly& a, double s) {
  Poly out = a;
  for (double& v : out) v *= s;
  return out;
}

Poly pencil_determinant(const std::vector<std::vector<Poly>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  Poly det{0.0};
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Poly>> minor_m;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Poly> row;
      for (std::size_t c = 0; c < n; ++c) {
        if (c != j) row.push_back(m[r][c]);
      }
      minor_m.push_back(std::move(row));
    }
    Poly term = poly_mul(m[0][j], pencil_determinant(minor_m));
    det = poly_add(det, poly_scale(term, j % 2 == 0 ? 1.0 : -1.0));
  }
  return det;
}

std::vector<double> real_roots(const Poly& p_in) {
  Poly p = p_in;
  while (p.size() > 1 && std::abs(p.back()) < 1e-12) p.pop_back();
  const std::size_t deg = p.size() - 1;
  REQUIRE(deg >= 1);
  Matrix companion = Matrix::Zero(static_cast<Index>(deg), static_cast<Index>(deg));
  for (std::size_t i = 0; i + 1 < deg; ++i) companion(static_cast<Index>(i) + 1, static_cast<Index>(i)) = 1.0;
  for (std::size_t i = 0; i < deg; ++i) {
    companion(static_cast<Index>(i), static_cast<Index>(deg) - 1) = -p[i] / p[deg];
  }
  Eigen::EigenSolver<Matrix> solver(companion);
  std::vector<double> roots;
  for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
    REQUIRE(std::abs(solver.eigenvalues()(i).imag()) < 1e-6);
    roots.push_back(solver.eigenvalues()(i).real());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

TEST_CASE("sym_eig identity") {
  const EigenPairs eig = sym_eig(Matrix::Identity(3, 3));
  for (Index i = 0; i < 3; ++i) REQUIRE(eig.values(i) == Catch::Approx(1.0));
  REQUIRE((eig.vectors * eig.vectors.transpose() - Matrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("sym_eig diagonal") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 4.0;
  a(1, 1) = 9.0;
  const EigenPairs eig = sym_eig(a);
  REQUIRE(eig.values(0) == Catch::Approx(4.0));
  REQUIRE(eig.values(1) == Catch::Approx(9.0));
  REQUIRE(std::abs(eig.vectors.col(0).cwiseAbs()(0) - 1.0) < 1e-12);
  REQUIRE(std::abs(eig.vectors.col(1).cwiseAbs()(1) - 1.0) < 1e-12);
}

TEST_CASE("sym_eig residuals and reconstruction on random symmetric input") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = random_symmetric(rng, 5, 3.0);
    const EigenPairs eig = sym_eig(a);
    const double scale = std::max(1.0, a.norm());
    for (Index i = 0; i < 5; ++i) {
      REQUIRE((a * eig.vectors.col(i) - eig.values(i) * eig.vectors.col(i)).norm() <=
              1e-8 * scale);
    }
    const Matrix rebuilt = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    REQUIRE((a - rebuilt).norm() <= 1e-8 * a.norm());
    REQUIRE((eig.vectors.transpose() * eig.vectors - Matrix::Identity(5, 5)).norm() < 1e-8);
    for (Index i = 0; i + 1 < 5; ++i) REQUIRE(eig.values(i) <= eig.values(i + 1));
  }
}

TEST_CASE("sym_eig rejects bad input") {
  Matrix asym(2, 2);
  asym << 1.0, 2.0, 3.0, 4.0;
  REQUIRE_THROWS_MATCHES(sym_eig(asym), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::NonSymmetric;
                         }));
  Matrix nonfinite = Matrix::Constant(2, 2, std::numeric_limits<double>::quiet_NaN());
  REQUIRE_THROWS_MATCHES(sym_eig(nonfinite), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::NonFinite;
                         }));
}

TEST_CASE("gen_eig with identity B reduces to sym_eig") {
  Rng rng(12);
  const Matrix a = random_symmetric(rng, 4);
  const EigenPairs expected = sym_eig(a);
  const EigenPairs got = gen_eig(a, Matrix::Identity(4, 4), 0.0);
  REQUIRE((got.values - expected.values).norm() < 1e-10);
}

TEST_CASE("gen_eig with A equal to B gives unit eigenvalues") {
  Rng rng(13);
  const Matrix a = random_spd(rng, 4);
  const EigenPairs got = gen_eig(a, a, 0.0);
  for (Index i = 0; i < 4; ++i) REQUIRE(got.values(i) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("gen_eig matches the characteristic polynomial of the pencil") {
  Rng rng(14);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_symmetric(rng, 4);
    const Matrix b = random_spd(rng, 4, 0.5);

    const EigenPairs got = gen_eig(a, b, 0.0);
    const double scale = std::max(1.0, a.norm());
    for (Index i = 0; i < 4; ++i) {
      const Vector q = got.vectors.col(i);
      REQUIRE((a * q - got.values(i) * b * q).norm() <= 1e-7 * scale);
      REQUIRE(q.dot(b * q) == Catch::Approx(1.0).margin(1e-8));
    }

    std::vector<std::vector<Poly>> pencil(4, std::vector<Poly>(4));
    for (Index r = 0; r < 4; ++r) {
      for (Index c = 0; c < 4; ++c) pencil[r][c] = Poly{a(r, c), -b(r, c)};
    }
    const std::vector<double> roots = real_roots(pencil_determinant(pencil));
    REQUIRE(roots.size() == 4);
    for (Index i = 0; i < 4; ++i) {
      REQUIRE(got.values(i) == Catch::Approx(roots[static_cast<std::size_t>(i)]).margin(1e-6));
    }
  }
}

TEST_CASE("gen_eig rejects a singular B") {
  const Matrix a = Matrix::Identity(3, 3);
  const Matrix b = Matrix::Zero(3, 3);
  REQUIRE_THROWS_MATCHES(gen_eig(a, b, 0.0), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::SingularB;
                         }));
}

TEST_CASE("spd_inv_sqrt on identity and diagonal input") {
  REQUIRE((spd_inv_sqrt(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() < 1e-12);
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 4.0;
  s(1, 1) = 9.0;
  const Matrix m = spd_inv_sqrt(s);
  REQUIRE(m(0, 0) == Catch::Approx(0.5));
  REQUIRE(m(1, 1) == Catch::Approx(1.0 / 3.0));
  REQUIRE(std::abs(m(0, 1)) < 1e-14);
}

TEST_CASE("spd_inv_sqrt reconstruction on random SPD input") {
  Rng rng(15);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix s = random_spd(rng, 6);
    const Matrix m = spd_inv_sqrt(s);
    REQUIRE((m - m.transpose()).norm() < 1e-10);
    REQUIRE((m * s * m - Matrix::Identity(6, 6)).norm() < 1e-8);
  }
}

TEST_CASE("spd_inv_sqrt rejects a non-positive matrix") {
  REQUIRE_THROWS_MATCHES(spd_inv_sqrt(-Matrix::Identity(2, 2)), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::AllDegenerate;
                         }));
}

TEST_CASE("qr_orthonormalize_rows is the identity on orthonormal rows") {
  Rng rng(16);
  const Matrix q = qr_orthonormalize_rows(random_matrix(rng, 3, 6));
  const Matrix again = qr_orthonormalize_rows(q);
  REQUIRE((again - q).norm() < 1e-12);
}

TEST_CASE("qr_orthonormalize_rows normalizes a single row") {
  Matrix q(1, 2);
  q << 3.0, 4.0;
  const Matrix out = qr_orthonormalize_rows(q);
  REQUIRE(out(0, 0) == Catch::Approx(0.6));
  REQUIRE(out(0, 1) == Catch::Approx(0.8));
}

TEST_CASE("qr_orthonormalize_rows preserves the row space") {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix q = random_matrix(rng, 3, 7);
    const Matrix out = qr_orthonormalize_rows(q);
    REQUIRE((out * out.transpose() - Matrix::Identity(3, 3)).norm() < 1e-10);
    // projector onto the row space must be unchanged
    const Matrix p_before =
        q.transpose() * (q * q.transpose()).inverse() * q;
    const Matrix p_after = out.transpose() * out;
    REQUIRE((p_before - p_after).norm() < 1e-8);
  }
}

TEST_CASE("qr_orthonormalize_rows rejects dependent rows") {
  Matrix q(2, 3);
  q << 1.0, 2.0, 3.0, 2.0, 4.0, 6.0;
  REQUIRE_THROWS_MATCHES(qr_orthonormalize_rows(q), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::RankDeficient;
                         }));
}

TEST_CASE("ridge_solve identity regression") {
  const Matrix x = Matrix::Identity(3, 3);
  const Matrix t = Matrix::Identity(3, 3);
  const Matrix q = ridge_solve(x, t, 1e-12);
  REQUIRE((q - Matrix::Identity(3, 3)).norm() < 1e-9);
}

TEST_CASE("ridge_solve zero targets") {
  Rng rng(18);
  const Matrix x = random_matrix(rng, 4, 9);
  const Matrix q = ridge_solve(x, Matrix::Zero(9, 2), 1e-3);
  REQUIRE(q.norm() == 0.0);
}

TEST_CASE("ridge_solve satisfies its normal equations") {
  Rng rng(19);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix x = random_matrix(rng, 4, 10);
    const Matrix t = random_matrix(rng, 10, 3);
    const double eta = 1e-3;
    const Matrix q = ridge_solve(x, t, eta);
    Matrix gram = x * x.transpose();
    gram.diagonal().array() += eta;
    for (Index r = 0; r < 3; ++r) {
      const Vector residual = gram * q.row(r).transpose() - x * t.col(r);
      REQUIRE(residual.norm() < 1e-8);
    }
  }
}

TEST_CASE("pseudo_inverse of an invertible matrix is the inverse") {
  Matrix a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  REQUIRE((pseudo_inverse(a) - a.inverse()).norm() < 1e-10);
}

TEST_CASE("pseudo_inverse of zero is zero") {
  const Matrix p = pseudo_inverse(Matrix::Zero(3, 5));
  REQUIRE(p.rows() == 5);
  REQUIRE(p.cols() == 3);
  REQUIRE(p.norm() == 0.0);
}

TEST_CASE("pseudo_inverse satisfies the Penrose conditions on rank-deficient input") {
  Rng rng(20);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_matrix(rng, 3, 2) * random_matrix(rng, 2, 5);  // rank 2
    const Matrix p = pseudo_inverse(a);
    REQUIRE((a * p * a - a).norm() < 1e-7);
    REQUIRE((p * a * p - p).norm() < 1e-7);
    REQUIRE(((a * p) - (a * p).transpose()).norm() < 1e-7);
    REQUIRE(((p * a) - (p * a).transpose()).norm() < 1e-7);
  }
}
