#include <gtest/gtest.h>

#include "swlab/duality.hpp"
#include "swlab/haar.hpp"

using namespace swlab;

namespace {

double dnorm(const StructuredOperator& x) { return x.is_zero() ? 0.0 : spectral_norm(to_dense(x).matrix); }

Matrix swap_matrix(const ModelSpace& s, int i, int j) {
  return to_dense(permutation_op(s, Permutation::transposition(s.legs(), i, j))).matrix;
}

// Independent rank count via eigenvalues of a dense Hermitian projection.
int dense_rank(const Matrix& P) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((P + P.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  int r = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r += es.eigenvalues()(i) > 0.5;
  return r;
}

} // namespace

TEST(Derivations, Definitions) {
  Rng rng(11);
  const ModelSpace s(2, 2, 1);
  const Matrix I = Matrix::Identity(2, 2);
  EXPECT_LT(dnorm(t_mixed(s, I) - cplx(1.0) * StructuredOperator::identity(s)), 1e-12);
  EXPECT_LT(dnorm(t_plus(s, I) - cplx(2.0) * StructuredOperator::identity(s)), 1e-12);
  const Matrix A = random_hermitian(2, rng), B = random_hermitian(2, rng);
  EXPECT_LT(dnorm(t_mixed(s, A) + cplx(0, 1) * t_mixed(s, B) - t_mixed(s, A + cplx(0, 1) * B)), 1e-12);
  EXPECT_LT(dnorm(t_mixed(s, A) - (t_plus(s, A) - t_minus(s, A))), 1e-12);
  EXPECT_TRUE(commutator(t_plus(s, A), t_minus(s, B)).is_zero());
  const Matrix T = to_dense(t_mixed(s, A)).matrix;
  EXPECT_LT((T - T.adjoint()).norm(), 1e-12);
  EXPECT_THROW(t_plus(ModelSpace(2, 0, 1), A), argument_error);
  EXPECT_THROW(t_minus(ModelSpace(2, 1, 0), A), argument_error);
}

TEST(YoungProjections, SymmetricSquareIsHalfIdentityPlusSwap) {
  const ModelSpace s(2, 2, 0);
  const Matrix P = to_dense(young_projection(s, Partition{2}, Side::left)).matrix;
  const Matrix expect = (Matrix::Identity(16, 16) + swap_matrix(s, 0, 1)) / 2.0;
  EXPECT_LT((P - expect).norm(), 1e-14);
  EXPECT_EQ(dense_rank(P), 10);
  const ModelSpace t(2, 2, 1);
  EXPECT_EQ(dense_rank(to_dense(young_projection(t, Partition{2}, Side::left)).matrix), 40);
  EXPECT_LT((to_dense(young_projection(ModelSpace(3, 1, 0), Partition{1}, Side::left)).matrix - Matrix::Identity(9, 9)).norm(), 1e-14);
  EXPECT_THROW(young_projection(s, Partition{3}, Side::left), argument_error);
}

TEST(YoungProjections, ProjectionFamilyDense) {
  Rng rng(12);
  for (auto [N, p, q] : std::vector<std::tuple<int, int, int>>{{2, 3, 0}, {2, 1, 2}, {3, 2, 0}, {2, 2, 2}}) {
    const ModelSpace s(N, p, q);
    const auto D = static_cast<Eigen::Index>(s.dimension());
    for (Side side : {Side::left, Side::right}) {
      const int n = side == Side::left ? p : q;
      if (n == 0) continue;
      const Matrix a = random_matrix(N, rng);
      const Matrix T = to_dense(side == Side::left ? t_plus(s, a) : t_minus(s, a)).matrix;
      Matrix total = Matrix::Zero(D, D);
      std::vector<Matrix> Ps;
      for (const auto& l : enumerate_partitions(n)) Ps.push_back(to_dense(young_projection(s, l, side)).matrix);
      for (std::size_t i = 0; i < Ps.size(); ++i) {
        EXPECT_LT((Ps[i] - Ps[i].adjoint()).norm(), 1e-12);
        EXPECT_LT((Ps[i] * Ps[i] - Ps[i]).norm(), 1e-12);
        EXPECT_LT((Ps[i] * T - T * Ps[i]).norm(), 1e-10);
        for (std::size_t j = i + 1; j < Ps.size(); ++j) EXPECT_LT((Ps[i] * Ps[j]).norm(), 1e-12);
        total += Ps[i];
      }
      EXPECT_LT((total - Matrix::Identity(D, D)).norm(), 1e-12);
    }
  }
}

TEST(HaarPairs, AlgebraicRelations) {
  for (int N : {2, 3}) {
    const ModelSpace ll(N, 2, 0), rr(N, 0, 2), lr(N, 1, 1), mixed(N, 1, 2);
    const double n = N;
    const auto D = static_cast<Eigen::Index>(ll.dimension());
    const Matrix I = Matrix::Identity(D, D);
    const Matrix Tl = to_dense(haar_pair_average_exact(ll, 0, 1, PairMode::ll)).matrix;
    const Matrix Tr = to_dense(haar_pair_average_exact(rr, 0, 1, PairMode::rr)).matrix;
    const Matrix P = to_dense(haar_pair_average_exact(lr, 0, 1, PairMode::lr)).matrix;
    EXPECT_LT((Tl * Tl - I / (n * n)).norm(), 1e-12);
    EXPECT_LT((Tr * Tr - I / (n * n)).norm(), 1e-12);
    // e_ij ⊗ e_kl ↦ e_kj ⊗ e_il / N: the flip of C^N ⊗ C^N acting from the left
    Matrix flip = Matrix::Zero(D, D);
    const auto idx = [N](int i, int j, int k, int l) { return ((i * N + j) * N + k) * N + l; };
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) flip(idx(k, j, i, l), idx(i, j, k, l)) = 1.0 / n;
    EXPECT_LT((Tl - flip).norm(), 1e-12);
    EXPECT_LT((P - P.adjoint()).norm(), 1e-12);
    // the mixed average is an orthogonal projection of norm one
    EXPECT_LT((P * P - P).norm(), 1e-12);
    EXPECT_NEAR(spectral_norm(P), 1.0, 1e-12);
    const Matrix Pm = to_dense(haar_pair_average_exact(mixed, 0, 2, PairMode::lr)).matrix;
    EXPECT_LT((Pm * Pm - Pm).norm(), 1e-12);
  }
  EXPECT_THROW(haar_pair_average_exact(ModelSpace(2, 2, 0), 1, 1, PairMode::ll), argument_error);
}

TEST(HaarPairs, MonteCarloAgreesWithin3SE) {
  const ModelSpace s(2, 1, 2);
  struct Case {
    PairMode mode;
    int k, j;
  };
  for (const Case& c : {Case{PairMode::rr, 1, 2}, Case{PairMode::lr, 0, 1}, Case{PairMode::lr, 0, 2}}) {
    const auto mc = haar_average_mc(s, [&](const Matrix& u) { return haar_pair_integrand(s, c.k, c.j, c.mode, u); },
                                    HaarConfig{10000, 21, 2, 1});
    const Matrix exact = to_dense(haar_pair_average_exact(s, c.k, c.j, c.mode)).matrix;
    EXPECT_LE((mc.mean.matrix - exact).norm(), 3.0 * mc.frobenius_standard_error) << to_string(c.mode);
  }
  const ModelSpace l(2, 2, 0);
  const auto mc = haar_average_mc(l, [&](const Matrix& u) { return haar_pair_integrand(l, 0, 1, PairMode::ll, u); },
                                  HaarConfig{10000, 22, 2, 1});
  EXPECT_LE((mc.mean.matrix - to_dense(haar_pair_average_exact(l, 0, 1, PairMode::ll)).matrix).norm(), 3.0 * mc.frobenius_standard_error);
}

TEST(HaarSampling, UnitaryDeterministicAndConjugationAverage) {
  Rng a(5), b(5);
  const Matrix u = haar_unitary(4, a);
  EXPECT_TRUE(is_unitary(u));
  EXPECT_EQ((u - haar_unitary(4, b)).norm(), 0.0);
  const ModelSpace s(3, 1, 0);
  Rng r(6);
  const Matrix x = random_matrix(3, r);
  const HaarConfig cfg{4000, 7, 3, 2};
  const auto mc = haar_average_mc(s, [&](const Matrix& v) { return left_mult(s, v * x * v.adjoint(), 0); }, cfg);
  const Matrix exact = to_dense(left_mult(s, normalized_trace(x) * Matrix::Identity(3, 3), 0)).matrix;
  EXPECT_LE((mc.mean.matrix - exact).norm(), 3.0 * mc.frobenius_standard_error);
  const auto again = haar_average_mc(s, [&](const Matrix& v) { return left_mult(s, v * x * v.adjoint(), 0); }, cfg);
  EXPECT_EQ((mc.mean.matrix - again.mean.matrix).norm(), 0.0);
  const auto id = haar_average_mc(s, [&](const Matrix&) { return StructuredOperator::identity(s); }, HaarConfig{3, 1, 3, 1});
  EXPECT_LT((id.mean.matrix - Matrix::Identity(9, 9)).norm(), 1e-14);
  EXPECT_THROW(haar_average_mc(s, [&](const Matrix&) { return StructuredOperator::identity(s); }, HaarConfig{0, 1, 3, 1}),
               argument_error);
}

TEST(ConditionalExpectation, TowerProperties) {
  Rng rng(13);
  for (int levels : {2, 3}) {
    const SubfactorTower tower(levels, 1);
    const int N = tower.N();
    for (int k = 1; k <= 2; ++k) {
      const int n = tower.block(k), K = N / n;
      const Matrix a = random_matrix(N, rng);
      const Matrix x = kron(Matrix::Identity(n, n), random_matrix(K, rng));
      const Matrix y = kron(Matrix::Identity(n, n), random_matrix(K, rng));
      const Matrix ea = conditional_expectation(tower, k, a);
      EXPECT_LT(std::abs(normalized_trace(ea) - normalized_trace(a)), 1e-12);
      EXPECT_LT((conditional_expectation(tower, k, x * a * y) - x * ea * y).norm(), 1e-10);
      const Matrix r = kron(random_matrix(n, rng), Matrix::Identity(K, K));
      EXPECT_LT((conditional_expectation(tower, k, r) - normalized_trace(r) * Matrix::Identity(N, N)).norm(), 1e-12);
      EXPECT_LT((conditional_expectation(tower, k, ea) - ea).norm(), 1e-12);
      if (k < levels) {
        const Matrix e2 = conditional_expectation(tower, k + 1, a);
        EXPECT_LT((conditional_expectation(tower, k, e2) - e2).norm(), 1e-12);
      }
      // Monte Carlo over U(2^k) ⊗ I
      Matrix acc = Matrix::Zero(N, N);
      const int samples = 4000;
      for (int i = 0; i < samples; ++i) {
        const Matrix u = kron(haar_unitary(n, rng), Matrix::Identity(K, K));
        acc += u * a * u.adjoint();
      }
      EXPECT_LT((acc / samples - ea).norm() / a.norm(), 0.1);
    }
  }
  EXPECT_THROW(conditional_expectation(SubfactorTower(1, 2), 2, Matrix::Identity(4, 4)), argument_error);
  EXPECT_THROW(conditional_expectation(SubfactorTower(1, 2), 1, Matrix::Identity(3, 3)), argument_error);
}

TEST(SigmaResidual, ProductIdentityIsExact) {
  Rng rng(14);
  for (auto [N, p, q] : std::vector<std::tuple<int, int, int>>{{2, 1, 1}, {2, 2, 1}, {3, 1, 1}, {2, 1, 2}}) {
    const ModelSpace s(N, p, q);
    for (int t = 0; t < 3; ++t) {
      const Matrix a = random_matrix(N, rng), u = haar_unitary(N, rng);
      std::vector<StructuredOperator> parts{compose(t_mixed(s, a * u.adjoint()), t_mixed(s, u))};
      if (p) parts.push_back(cplx(-1.0) * t_plus(s, a));
      if (q) parts.push_back(cplx(-1.0) * t_minus(s, u * a * u.adjoint()));
      parts.push_back(cplx(-1.0) * sigma_residual(s, a, u));
      const auto diff = sum(s, parts);
      EXPECT_LT(dnorm(diff), 1e-10);
      // dense cross-check of the same identity
      const Matrix L = to_dense(t_mixed(s, a * u.adjoint())).matrix * to_dense(t_mixed(s, u)).matrix;
      Matrix R = to_dense(sigma_residual(s, a, u)).matrix;
      if (p) R += to_dense(t_plus(s, a)).matrix;
      if (q) R += to_dense(t_minus(s, u * a * u.adjoint())).matrix;
      EXPECT_LT((L - R).norm() / L.norm(), 1e-12);
    }
  }
  Rng r2(15);
  EXPECT_TRUE(sigma_residual(ModelSpace(2, 1, 0), random_matrix(2, r2), haar_unitary(2, r2)).is_zero());
  EXPECT_THROW(sigma_residual(ModelSpace(2, 1, 1), Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)), argument_error);
}

TEST(SigmaResidual, AveragedProductMatchesMonteCarlo) {
  const ModelSpace s(2, 1, 1);
  Rng rng(16);
  const Matrix a = random_hermitian(2, rng);
  const auto mc = haar_average_mc(s, [&](const Matrix& u) { return compose(t_mixed(s, a * u.adjoint()), t_mixed(s, u)); },
                                  HaarConfig{10000, 17, 2, 1});
  EXPECT_LE((mc.mean.matrix - to_dense(averaged_product_exact(s, a)).matrix).norm(), 3.0 * mc.frobenius_standard_error);
}

TEST(LimitFormula, IdentityInputAndSingleLeg) {
  for (int N : {2, 4}) {
    const auto r = limit_formula_check(ModelSpace(N, 1, 1), Matrix::Identity(N, N));
    EXPECT_NEAR(r.residual_norm, 2.0, 1e-8);
    EXPECT_NEAR(r.identity_vector_residual, 2.0 / N, 1e-10);
    EXPECT_NEAR(r.bound, 8.0 / N, 1e-12);
  }
  Rng rng(18);
  EXPECT_LT(limit_formula_check(ModelSpace(3, 1, 0), random_matrix(3, rng)).residual_norm, 1e-10);
}

TEST(SpectralBinning, Examples) {
  const Matrix S = 0.25 * Matrix::Identity(6, 6);
  EXPECT_LT((spectral_binning(S, 0.01).approximation - S).norm(), 1e-14);
  Matrix D = Matrix::Zero(2, 2);
  D(1, 1) = 1.0;
  EXPECT_LT((spectral_binning(D, 0.3).approximation - D).norm(), 1e-14);
  Rng rng(19);
  for (int t = 0; t < 10; ++t) {
    const Matrix A = random_hermitian(8, rng);
    for (double eps : {0.3, 0.1}) {
      const auto b = spectral_binning(A, eps);
      EXPECT_LT(spectral_norm(A - b.approximation), eps);
      EXPECT_NEAR(spectral_norm(A - b.approximation), b.error, 1e-10);
      for (std::size_t i = 1; i < b.grid.cuts.size(); ++i) EXPECT_LT(b.grid.cuts[i] - b.grid.cuts[i - 1], eps);
      EXPECT_GT(b.grid.cuts.back(), b.grid.upper);
      EXPECT_TRUE(b.dyadic_realizable);
    }
  }
  Matrix N = Matrix::Zero(2, 2);
  N(0, 1) = 1.0;
  EXPECT_THROW(spectral_binning(N, 0.1), argument_error);
  EXPECT_THROW(spectral_binning(D, 0.0), argument_error);
}
