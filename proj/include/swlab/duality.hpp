#pragma once

// Mixed derivation operators, Young projections, exact Haar pair averages,
// the conditional-expectation tower, the cross-term residual Σ(a,u), the
// averaged product formula and spectral binning of Hermitian matrices.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "haar.hpp"
#include "legops.hpp"
#include "symcomb.hpp"

namespace swlab {

enum class Side { left, right };

/// Σ_{k<p} 𝔩_k(a) − Σ_{k≥p} 𝔯_k(a).
inline StructuredOperator t_mixed(const ModelSpace& space, const Matrix& a) {
  std::vector<StructuredOperator> parts;
  for (int k = 0; k < space.legs(); ++k)
    parts.push_back(space.is_left_leg(k) ? left_mult(space, a, k) : cplx(-1.0) * right_mult(space, a, k));
  return sum(space, parts);
}

inline StructuredOperator t_plus(const ModelSpace& space, const Matrix& a) {
  if (space.p < 1) throw argument_error("t_plus: needs at least one left leg");
  std::vector<StructuredOperator> parts;
  for (int k = 0; k < space.p; ++k) parts.push_back(left_mult(space, a, k));
  return sum(space, parts);
}

inline StructuredOperator t_minus(const ModelSpace& space, const Matrix& a) {
  if (space.q < 1) throw argument_error("t_minus: needs at least one right leg");
  std::vector<StructuredOperator> parts;
  for (int k = space.p; k < space.legs(); ++k) parts.push_back(right_mult(space, a, k));
  return sum(space, parts);
}

/// (dim λ / n!) Σ_s χ^λ(s) P(s), with s permuting only the legs of one side.
inline StructuredOperator young_projection(const ModelSpace& space, const Partition& lambda, Side side) {
  const int n = side == Side::left ? space.p : space.q;
  const int offset = side == Side::left ? 0 : space.p;
  if (lambda.weight() != n)
    throw argument_error("young_projection: partition " + lambda.to_string() + " does not have weight " + std::to_string(n));
  const double scale = static_cast<double>(dimension(lambda)) / static_cast<double>(factorial(n));
  std::vector<StructuredOperator> parts;
  for (const auto& s : all_permutations(static_cast<std::size_t>(n))) {
    const auto chi = character(lambda, s);
    if (chi == 0) continue;
    parts.push_back(cplx(scale * static_cast<double>(chi)) *
                    permutation_op(space, embed(s, static_cast<std::size_t>(space.legs()), static_cast<std::size_t>(offset))));
  }
  if (n == 0) return StructuredOperator::identity(space);
  return sum(space, parts);
}

/// P^λ ⊗ P^μ.
inline StructuredOperator young_projection_pair(const ModelSpace& space, const Partition& lambda, const Partition& mu) {
  StructuredOperator left = space.p ? young_projection(space, lambda, Side::left) : StructuredOperator::identity(space);
  StructuredOperator right = space.q ? young_projection(space, mu, Side::right) : StructuredOperator::identity(space);
  return compose(left, right);
}

enum class PairMode { ll, rr, lr };

inline const char* to_string(PairMode m) {
  switch (m) {
  case PairMode::ll: return "ll";
  case PairMode::rr: return "rr";
  case PairMode::lr: return "lr";
  }
  return "?";
}

/// Unitary subgroup U(block) ⊗ I_{N/block} of U(N); block = N is the full group.
struct UnitarySubgroup {
  int block = 0;

  static UnitarySubgroup full(int N) { return UnitarySubgroup{N}; }
};

namespace detail {

inline Matrix embedded_unit(int N, int block, int a, int b) {
  const int K = N / block;
  Matrix e = Matrix::Zero(N, N);
  for (int x = 0; x < K; ++x) e(a * K + x, b * K + x) = 1.0;
  return e;
}

inline void check_subgroup(const ModelSpace& space, const UnitarySubgroup& g) {
  if (g.block < 1 || space.N % g.block != 0)
    throw argument_error("unitary subgroup block " + std::to_string(g.block) + " does not divide N");
}

} // namespace detail

/// ∫ ᵏX(u*) ʲY(u) du over the subgroup, X,Y ∈ {𝔩,𝔯} per mode, as the matrix-unit sum
/// block^{-1} Σ_{a,b} ᵏX(e_ab) ʲY(e_ba).
inline StructuredOperator haar_pair_average_exact(const ModelSpace& space, int k, int j, PairMode mode,
                                                  UnitarySubgroup group = {}) {
  detail::check_leg(space, k);
  detail::check_leg(space, j);
  if (k == j) throw argument_error("haar_pair_average_exact: legs must differ");
  if (group.block == 0) group = UnitarySubgroup::full(space.N);
  detail::check_subgroup(space, group);
  const int n = group.block;
  std::vector<OperatorTerm> terms;
  terms.reserve(static_cast<std::size_t>(n) * n);
  const Matrix id = Matrix::Identity(space.N, space.N);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      OperatorTerm t;
      t.coefficient = 1.0 / n;
      t.factors.assign(space.legs(), LegFactor::identity(space.N));
      t.sigma = Permutation::identity(space.legs());
      const Matrix eab = detail::embedded_unit(space.N, n, a, b);
      const Matrix eba = detail::embedded_unit(space.N, n, b, a);
      switch (mode) {
      case PairMode::ll:
        t.factors[k] = LegFactor(eab, id);
        t.factors[j] = LegFactor(eba, id);
        break;
      case PairMode::rr:
        t.factors[k] = LegFactor(id, eab);
        t.factors[j] = LegFactor(id, eba);
        break;
      case PairMode::lr:
        t.factors[k] = LegFactor(eab, id);
        t.factors[j] = LegFactor(id, eba);
        break;
      }
      terms.push_back(std::move(t));
    }
  return canonicalize(space, std::move(terms));
}

/// The integrand of haar_pair_average_exact at a fixed unitary (full group).
inline StructuredOperator haar_pair_integrand(const ModelSpace& space, int k, int j, PairMode mode, const Matrix& u) {
  const Matrix us = u.adjoint();
  switch (mode) {
  case PairMode::ll: return compose(left_mult(space, us, k), left_mult(space, u, j));
  case PairMode::rr: return compose(right_mult(space, us, k), right_mult(space, u, j));
  case PairMode::lr: return compose(left_mult(space, us, k), right_mult(space, u, j));
  }
  throw argument_error("unknown pair mode");
}

// ---------------------------------------------------------------------------
// Conditional-expectation tower

/// M_N = M_{2^levels} ⊗ M_K. Level k averages over U(2^k) ⊗ I.
struct SubfactorTower {
  int levels = 1;
  int complement = 1;

  SubfactorTower() = default;
  SubfactorTower(int n, int K) : levels(n), complement(K) {
    if (n < 0 || K < 1) throw argument_error("SubfactorTower: need levels >= 0 and complement >= 1");
  }
  int N() const { return (1 << levels) * complement; }
  int block(int k) const { return 1 << k; }
};

/// E_k(a) = I_{2^k} ⊗ Tr_{2^k}(a) / 2^k: the Haar average of u a u* over U(2^k) ⊗ I.
inline Matrix conditional_expectation(const SubfactorTower& tower, int level, const Matrix& a) {
  const int N = tower.N();
  if (a.rows() != N || a.cols() != N) throw argument_error("conditional_expectation: matrix size differs from tower size");
  if (level < 0 || level > tower.levels) throw argument_error("conditional_expectation: 2^level does not divide N in this tower");
  const int n = tower.block(level);
  const int K = N / n;
  Matrix partial = Matrix::Zero(K, K);
  for (int i = 0; i < n; ++i) partial += a.block(i * K, i * K, K, K);
  partial /= static_cast<double>(n);
  Matrix out = Matrix::Zero(N, N);
  for (int i = 0; i < n; ++i) out.block(i * K, i * K, K, K) = partial;
  return out;
}

inline cplx normalized_trace(const Matrix& a) { return a.trace() / static_cast<double>(a.rows()); }

/// Conditional expectation matching a unitary subgroup of U(N).
inline Matrix subgroup_expectation(const Matrix& a, const UnitarySubgroup& g) {
  const auto N = static_cast<int>(a.rows());
  const int n = g.block == 0 ? N : g.block;
  const int K = N / n;
  Matrix partial = Matrix::Zero(K, K);
  for (int i = 0; i < n; ++i) partial += a.block(i * K, i * K, K, K);
  partial /= static_cast<double>(n);
  Matrix out = Matrix::Zero(N, N);
  for (int i = 0; i < n; ++i) out.block(i * K, i * K, K, K) = partial;
  return out;
}

// ---------------------------------------------------------------------------
// Σ(a,u) and the averaged product formula

inline bool is_unitary(const Matrix& u, double tol = 1e-10) {
  return u.rows() == u.cols() && (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

/// Cross terms of T(au*)·T(u):
///   Σ_{k≠j left} 𝔩_k(a)𝔩_k(u*)𝔩_j(u) + Σ_{k≠j right} 𝔯_k(u*)𝔯_j(u)𝔯_k(a)
///   − Σ_{k left, j right} 𝔩_k(a)𝔩_k(u*)𝔯_j(u) − Σ_{k left, j right} 𝔩_k(u)𝔯_j(u*)𝔯_j(a).
inline StructuredOperator sigma_residual(const ModelSpace& space, const Matrix& a, const Matrix& u) {
  detail::check_leg_matrix(space, a);
  detail::check_leg_matrix(space, u);
  if (!is_unitary(u)) throw argument_error("sigma_residual: u is not unitary within 1e-10");
  const Matrix us = u.adjoint();
  std::vector<StructuredOperator> parts;
  for (int k = 0; k < space.p; ++k)
    for (int j = 0; j < space.p; ++j)
      if (k != j) parts.push_back(compose({left_mult(space, a, k), left_mult(space, us, k), left_mult(space, u, j)}));
  for (int k = space.p; k < space.legs(); ++k)
    for (int j = space.p; j < space.legs(); ++j)
      if (k != j) parts.push_back(compose({right_mult(space, us, k), right_mult(space, u, j), right_mult(space, a, k)}));
  for (int k = 0; k < space.p; ++k)
    for (int j = space.p; j < space.legs(); ++j) {
      parts.push_back(cplx(-1.0) * compose({left_mult(space, a, k), left_mult(space, us, k), right_mult(space, u, j)}));
      parts.push_back(cplx(-1.0) * compose({left_mult(space, u, k), right_mult(space, us, j), right_mult(space, a, j)}));
    }
  return sum(space, parts);
}

/// Exact Haar average of T(au*)·T(u) over the subgroup, assembled from the
/// diagonal terms and haar_pair_average_exact applied to each cross term.
inline StructuredOperator averaged_product_exact(const ModelSpace& space, const Matrix& a, UnitarySubgroup group = {}) {
  detail::check_leg_matrix(space, a);
  if (group.block == 0) group = UnitarySubgroup::full(space.N);
  detail::check_subgroup(space, group);
  const Matrix ea = subgroup_expectation(a, group);
  std::vector<StructuredOperator> parts;
  for (int k = 0; k < space.legs(); ++k)
    parts.push_back(space.is_left_leg(k) ? left_mult(space, a, k) : right_mult(space, ea, k));
  for (int k = 0; k < space.p; ++k)
    for (int j = 0; j < space.p; ++j)
      if (k != j) parts.push_back(compose(left_mult(space, a, k), haar_pair_average_exact(space, k, j, PairMode::ll, group)));
  for (int k = space.p; k < space.legs(); ++k)
    for (int j = space.p; j < space.legs(); ++j)
      if (k != j) parts.push_back(compose(haar_pair_average_exact(space, k, j, PairMode::rr, group), right_mult(space, a, k)));
  for (int k = 0; k < space.p; ++k)
    for (int j = space.p; j < space.legs(); ++j) {
      const StructuredOperator P = haar_pair_average_exact(space, k, j, PairMode::lr, group);
      parts.push_back(cplx(-1.0) * compose(left_mult(space, a, k), P));
      parts.push_back(cplx(-1.0) * compose(P, right_mult(space, a, j)));
    }
  return sum(space, parts);
}

struct LimitFormulaReport {
  ModelSpace space;
  int group_block = 0;
  double a_norm = 0.0;
  /// ‖∫T(au*)T(u)du − (T⁺(a) + T⁻(E(a)))‖ in operator norm.
  double residual_norm = 0.0;
  /// Same with the sign of the right-leg term flipped: T⁺(a) − T⁻(E(a)).
  double literal_residual_norm = 0.0;
  /// ‖R ξ_I‖ for the unit identity vector ξ_I (strong-topology surrogate).
  double identity_vector_residual = 0.0;
  /// 2‖a‖²(p+q)²/N.
  double bound = 0.0;
  StructuredOperator residual;
};

inline Vector identity_vector(const ModelSpace& space) {
  const std::size_t D = space.dimension();
  const std::size_t L = space.leg_dim();
  Vector v = Vector::Zero(static_cast<Eigen::Index>(D));
  // unit vector I ⊗ ... ⊗ I in the normalized trace inner product: entries at (r=c) on every leg
  const int m = space.legs();
  std::vector<int> digit(m, 0);
  for (std::size_t idx = 0; idx < D; ++idx) {
    std::size_t rem = idx;
    bool diag = true;
    for (int k = m - 1; k >= 0; --k) {
      const std::size_t dgt = rem % L;
      rem /= L;
      if (dgt / static_cast<std::size_t>(space.N) != dgt % static_cast<std::size_t>(space.N)) {
        diag = false;
        break;
      }
    }
    if (diag) v[static_cast<Eigen::Index>(idx)] = 1.0;
  }
  return v.normalized();
}

inline LimitFormulaReport limit_formula_check(const ModelSpace& space, const Matrix& a, UnitarySubgroup group = {},
                                              double tolerance = 1e-10) {
  if (group.block == 0) group = UnitarySubgroup::full(space.N);
  const StructuredOperator avg = averaged_product_exact(space, a, group);
  const Matrix ea = subgroup_expectation(a, group);
  StructuredOperator target = StructuredOperator::zero(space);
  StructuredOperator literal = StructuredOperator::zero(space);
  if (space.p) {
    target = target + t_plus(space, a);
    literal = literal + t_plus(space, a);
  }
  if (space.q) {
    target = target + t_minus(space, ea);
    literal = literal - t_minus(space, ea);
  }
  LimitFormulaReport r;
  r.space = space;
  r.group_block = group.block;
  r.a_norm = spectral_norm(a);
  r.residual = avg - target;
  r.residual_norm = operator_norm(r.residual, tolerance);
  r.literal_residual_norm = operator_norm(avg - literal, tolerance);
  r.identity_vector_residual = swlab::apply(r.residual, identity_vector(space)).norm();
  const double m = space.legs();
  r.bound = 2.0 * r.a_norm * r.a_norm * m * m / space.N;
  return r;
}

// ---------------------------------------------------------------------------
// Spectral binning

struct SpectralGrid {
  double lower = 0.0;
  double upper = 0.0;
  double epsilon = 0.0;
  std::vector<double> cuts;            // a_1 < a_2 < ... < a_M, a_M > upper
  std::vector<double> representatives; // t_i ∈ [a_i, a_{i+1})
};

struct SpectralBinning {
  Matrix approximation;             // A_ε = Σ t_i E_i
  SpectralGrid grid;
  std::vector<Matrix> projections;  // E_i, one per bin (possibly zero)
  std::vector<int> ranks;
  Matrix eigenvectors;              // conjugating unitary u (columns in ascending eigenvalue order)
  bool dyadic_realizable = false;   // N a power of two: E_i = u F_i u* with F_i diagonal in the I₂ tower
  std::vector<Matrix> dyadic_projections;
  double error = 0.0;               // exact ‖A − A_ε‖ from the eigenvalues
};

inline SpectralBinning spectral_binning(const Matrix& A, double epsilon) {
  if (epsilon <= 0.0) throw argument_error("spectral_binning: epsilon must be positive");
  if (A.rows() != A.cols()) throw argument_error("spectral_binning: matrix must be square");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw argument_error("spectral_binning: matrix is not Hermitian");
  const Matrix H = (A + A.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  const Eigen::VectorXd w = es.eigenvalues();
  const Matrix V = es.eigenvectors();
  const auto n = static_cast<int>(A.rows());

  SpectralBinning out;
  SpectralGrid& g = out.grid;
  g.lower = w(0);
  g.upper = w(n - 1);
  g.epsilon = epsilon;
  const double h = 0.9 * epsilon;
  const int bins = static_cast<int>(std::floor((g.upper - g.lower) / h)) + 1;
  for (int i = 0; i <= bins; ++i) g.cuts.push_back(g.lower + i * h);

  std::vector<std::vector<int>> members(bins);
  for (int i = 0; i < n; ++i) {
    int b = static_cast<int>(std::floor((w(i) - g.lower) / h));
    b = std::clamp(b, 0, bins - 1);
    members[b].push_back(i);
  }
  out.approximation = Matrix::Zero(n, n);
  out.eigenvectors = V;
  for (int b = 0; b < bins; ++b) {
    double t = g.cuts[b];
    if (!members[b].empty()) {
      t = 0.0;
      for (int i : members[b]) t += w(i);
      t /= static_cast<double>(members[b].size());
    }
    g.representatives.push_back(t);
    Matrix E = Matrix::Zero(n, n);
    Matrix F = Matrix::Zero(n, n);
    for (int i : members[b]) {
      E += V.col(i) * V.col(i).adjoint();
      F(i, i) = 1.0;
      out.error = std::max(out.error, std::abs(w(i) - t));
    }
    out.approximation += t * E;
    out.projections.push_back(std::move(E));
    out.ranks.push_back(static_cast<int>(members[b].size()));
    out.dyadic_projections.push_back(std::move(F));
  }
  out.dyadic_realizable = (n & (n - 1)) == 0;
  if (!out.dyadic_realizable) out.dyadic_projections.clear();
  return out;
}

} // namespace swlab
