#include <gtest/gtest.h>

#include <random>

#include "swlab/legops.hpp"

using namespace swlab;

namespace {

// Independent dense oracles built from index arithmetic on H = L²(M_N)^⊗m.

std::vector<int> digits(std::size_t idx, int m, std::size_t base) {
  std::vector<int> d(m);
  for (int k = m - 1; k >= 0; --k) {
    d[k] = static_cast<int>(idx % base);
    idx /= base;
  }
  return d;
}

std::size_t undigits(const std::vector<int>& d, std::size_t base) {
  std::size_t idx = 0;
  for (int v : d) idx = idx * base + static_cast<std::size_t>(v);
  return idx;
}

// η ↦ A η B on leg k.
Matrix dense_leg(const ModelSpace& s, int k, const Matrix& A, const Matrix& B) {
  const std::size_t D = s.dimension(), L = s.leg_dim();
  Matrix M = Matrix::Zero(D, D);
  for (std::size_t col = 0; col < D; ++col) {
    auto d = digits(col, s.legs(), L);
    const int r = d[k] / s.N, c = d[k] % s.N;
    for (int r2 = 0; r2 < s.N; ++r2)
      for (int c2 = 0; c2 < s.N; ++c2) {
        auto e = d;
        e[k] = r2 * s.N + c2;
        M(undigits(e, L), col) += A(r2, r) * B(c, c2);
      }
  }
  return M;
}

// content of leg i moves to leg sigma(i)
Matrix dense_perm(const ModelSpace& s, const Permutation& sigma) {
  const std::size_t D = s.dimension(), L = s.leg_dim();
  Matrix M = Matrix::Zero(D, D);
  for (std::size_t col = 0; col < D; ++col) {
    auto d = digits(col, s.legs(), L);
    std::vector<int> e(d.size());
    for (int i = 0; i < s.legs(); ++i) e[sigma(i)] = d[i];
    M(undigits(e, L), col) = 1.0;
  }
  return M;
}

Matrix dense_oracle(const StructuredOperator& x) {
  const auto& s = x.space();
  Matrix M = Matrix::Zero(s.dimension(), s.dimension());
  for (const auto& t : x.terms()) {
    Matrix T = Matrix::Identity(s.dimension(), s.dimension());
    for (int k = 0; k < s.legs(); ++k) T = dense_leg(s, k, t.factors[k].A, t.factors[k].B) * T;
    M += t.coefficient * T * dense_perm(s, t.sigma);
  }
  return M;
}

Matrix rand_mat(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(g(rng), g(rng));
  return a;
}

struct Shape {
  int N, p, q;
};
const std::vector<Shape> kShapes{{2, 1, 0}, {2, 1, 1}, {3, 1, 0}, {2, 2, 1}, {3, 1, 1}};

double diff(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

} // namespace

TEST(ModelSpace, Validation) {
  EXPECT_THROW(ModelSpace(0, 1, 0), argument_error);
  EXPECT_THROW(ModelSpace(2, 0, 0), argument_error);
  EXPECT_THROW(ModelSpace(2, -1, 1), argument_error);
  EXPECT_EQ(ModelSpace(3, 1, 1).dimension(), 81u);
}

TEST(LegOps, GeneratorsMatchDenseOracle) {
  std::mt19937_64 rng(1);
  for (auto [N, p, q] : kShapes) {
    ModelSpace s(N, p, q);
    for (int k = 0; k < s.legs(); ++k) {
      const Matrix a = rand_mat(N, rng);
      const Matrix I = Matrix::Identity(N, N);
      EXPECT_LT(diff(to_dense(left_mult(s, a, k)).matrix, dense_leg(s, k, a, I)), 1e-12);
      EXPECT_LT(diff(to_dense(right_mult(s, a, k)).matrix, dense_leg(s, k, I, a)), 1e-12);
    }
    for (const auto& sigma : all_permutations(s.legs()))
      EXPECT_LT(diff(to_dense(permutation_op(s, sigma)).matrix, dense_perm(s, sigma)), 1e-14);
  }
  ModelSpace s(2, 1, 1);
  EXPECT_THROW(left_mult(s, Matrix::Identity(2, 2), 2), argument_error);
  EXPECT_THROW(left_mult(s, Matrix::Identity(3, 3), 0), argument_error);
}

TEST(LegOps, AlgebraMatchesDense) {
  std::mt19937_64 rng(2);
  for (auto [N, p, q] : kShapes) {
    ModelSpace s(N, p, q);
    for (int trial = 0; trial < 4; ++trial) {
      const auto x = random_operator(s, 2, rng);
      const auto y = random_operator(s, 3, rng);
      const Matrix X = dense_oracle(x), Y = dense_oracle(y);
      EXPECT_LT(diff(to_dense(x).matrix, X), 1e-12);
      EXPECT_LT(diff(to_dense(compose(x, y)).matrix, X * Y), 1e-11);
      EXPECT_LT(diff(to_dense(x + y).matrix, X + Y), 1e-12);
      EXPECT_LT(diff(to_dense(x - y).matrix, X - Y), 1e-12);
      EXPECT_LT(diff(to_dense(cplx(0.5, -2.0) * x).matrix, cplx(0.5, -2.0) * X), 1e-12);
      EXPECT_LT(diff(to_dense(commutator(x, y)).matrix, X * Y - Y * X), 1e-11);
      EXPECT_LT(diff(to_dense(adjoint(x)).matrix, X.adjoint()), 1e-12);
      // trace normalized by dim H
      const cplx tr = X.trace() / static_cast<double>(s.dimension());
      EXPECT_LT(std::abs(normalized_trace(x) - tr), 1e-10 * std::max(1.0, std::abs(tr)));
      // apply against dense mat-vec
      Vector v = Vector::Random(s.dimension());
      EXPECT_LT((swlab::apply(x, v) - X * v).norm(), 1e-10 * std::max(1.0, (X * v).norm()));
    }
  }
}

TEST(LegOps, JConjugation) {
  // J(η) = η*, as an antilinear map on each leg
  std::mt19937_64 rng(3);
  ModelSpace s(2, 1, 1);
  const std::size_t D = s.dimension(), L = s.leg_dim();
  auto J = [&](const Vector& v) {
    Vector w(D);
    for (std::size_t i = 0; i < D; ++i) {
      auto d = digits(i, s.legs(), L);
      for (auto& x : d) x = (x % s.N) * s.N + x / s.N;
      w[undigits(d, L)] = std::conj(v[i]);
    }
    return w;
  };
  for (int t = 0; t < 4; ++t) {
    const auto x = random_operator(s, 2, rng);
    Vector v = Vector::Random(D);
    EXPECT_LT((swlab::apply(j_conjugate(x), v) - J(swlab::apply(x, J(v)))).norm(), 1e-10);
  }
  EXPECT_LT(diff(to_dense(j_conjugate(left_mult(s, Matrix::Identity(2, 2) * 2.0, 0))).matrix,
                 to_dense(right_mult(s, Matrix::Identity(2, 2) * 2.0, 0)).matrix),
            1e-14);
}

TEST(LegOps, CanonicalZeroAndMerging) {
  ModelSpace s(2, 1, 1);
  std::mt19937_64 rng(4);
  const auto x = random_operator(s, 3, rng);
  EXPECT_TRUE((x - x).is_zero());
  EXPECT_EQ((x + x).term_count(), x.term_count());
  const Matrix a = rand_mat(2, rng);
  // [𝔩(a), 𝔯(b)] = 0 on the same leg
  EXPECT_TRUE(commutator(left_mult(s, a, 0), right_mult(s, rand_mat(2, rng), 0)).is_zero());
  EXPECT_TRUE(commutator(left_mult(s, a, 0), left_mult(s, rand_mat(2, rng), 1)).is_zero());
}

TEST(LegOps, OperatorNormMatchesSvd) {
  std::mt19937_64 rng(5);
  for (auto [N, p, q] : kShapes) {
    ModelSpace s(N, p, q);
    const auto x = random_operator(s, 3, rng);
    const double expect = spectral_norm(to_dense(x).matrix);
    EXPECT_NEAR(operator_norm(x), expect, 1e-8 * expect);
  }
  EXPECT_EQ(operator_norm(StructuredOperator::zero(ModelSpace(2, 1, 0))), 0.0);
}

TEST(LegOps, FactorAlgebraTrace) {
  // on (C^N)^⊗m: tr(A⊗B P(s)) normalized by N^m
  ModelSpace s(2, 2, 0);
  std::mt19937_64 rng(6);
  const Matrix a = rand_mat(2, rng), b = rand_mat(2, rng);
  const auto x = compose({left_mult(s, a, 0), left_mult(s, b, 1), permutation_op(s, Permutation::transposition(2, 0, 1))});
  EXPECT_LT(std::abs(factor_algebra_trace(x) - (a * b).trace() / 4.0), 1e-12);
  const auto y = compose(left_mult(s, a, 0), left_mult(s, b, 1));
  EXPECT_LT(std::abs(factor_algebra_trace(y) - a.trace() * b.trace() / 4.0), 1e-12);
  EXPECT_THROW(factor_algebra_trace(right_mult(s, a, 0)), argument_error);
}

TEST(LegOps, DenseCap) {
  ModelSpace s(3, 2, 2);  // 6561
  EXPECT_THROW(to_dense(StructuredOperator::identity(s)), resource_error);
}
