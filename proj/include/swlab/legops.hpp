#pragma once

// Structured operators on the model space H = L^2(M_N, tr)^{⊗m}.
//
// Every leg carries an N×N matrix η with the normalized trace inner product.
// A term is  c · (F_0 ⊗ ... ⊗ F_{m-1}) ∘ P(σ),  where F_k : η ↦ A_k η B_k and
// P(σ) moves the content of leg i to leg σ(i). An operator is a finite sum of
// terms, kept in canonical form (equal signatures merged, zero terms dropped).
//
// Vectors of H are flattened with leg 0 most significant and each leg in
// row-major order: index = Σ_k (r_k N + c_k) (N^2)^{m-1-k}.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "permutation.hpp"

namespace swlab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Default cap on the dimension N^(2m) of anything materialized densely.
inline constexpr std::size_t kDenseCap = 4096;

/// Coefficients below this magnitude are dropped during canonicalization.
inline constexpr double kDropTolerance = 1e-14;

struct ModelSpace {
  int N = 2;
  int p = 1;
  int q = 0;

  ModelSpace() = default;
  ModelSpace(int n, int p_legs, int q_legs) : N(n), p(p_legs), q(q_legs) {
    if (N < 2) throw argument_error("ModelSpace: N must be at least 2");
    if (p < 0 || q < 0) throw argument_error("ModelSpace: p and q must be nonnegative");
    if (p + q < 1) throw argument_error("ModelSpace: need at least one leg");
  }

  int legs() const { return p + q; }
  std::size_t leg_dim() const { return static_cast<std::size_t>(N) * static_cast<std::size_t>(N); }
  std::size_t dimension() const {
    std::size_t d = 1;
    for (int k = 0; k < legs(); ++k) d *= leg_dim();
    return d;
  }
  bool is_left_leg(int k) const { return k < p; }

  friend bool operator==(const ModelSpace&, const ModelSpace&) = default;
};

namespace detail {

inline bool exactly_identity(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != (i == j ? cplx(1.0) : cplx(0.0))) return false;
  return true;
}

/// Scale so that the first entry with |x| >= max/2 is exactly 1; returns the divisor.
inline cplx normalize_pivot(Matrix& m) {
  const double mx = m.cwiseAbs().maxCoeff();
  if (mx == 0.0) return cplx(0.0);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) >= 0.5 * mx) {
        const cplx pivot = m(i, j);
        m /= pivot;
        m(i, j) = cplx(1.0);
        return pivot;
      }
  return cplx(1.0);
}

inline std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

} // namespace detail

/// One-leg sandwich map η ↦ A η B.
struct LegFactor {
  Matrix A;
  Matrix B;
  bool a_identity = true;
  bool b_identity = true;

  LegFactor() = default;
  LegFactor(Matrix a, Matrix b) : A(std::move(a)), B(std::move(b)) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
      throw argument_error("LegFactor: A and B must be square of the same size");
    refresh();
  }
  static LegFactor identity(int N) { return LegFactor(Matrix::Identity(N, N), Matrix::Identity(N, N)); }

  void refresh() {
    a_identity = detail::exactly_identity(A);
    b_identity = detail::exactly_identity(B);
  }
  bool is_identity() const { return a_identity && b_identity; }

  /// (A,B)∘(A',B') = (AA', B'B).
  LegFactor then_after(const LegFactor& inner) const {
    LegFactor r;
    r.A = a_identity ? inner.A : (inner.a_identity ? A : Matrix(A * inner.A));
    r.B = b_identity ? inner.B : (inner.b_identity ? B : Matrix(inner.B * B));
    r.refresh();
    return r;
  }
};

struct OperatorTerm {
  cplx coefficient{1.0, 0.0};
  std::vector<LegFactor> factors;
  Permutation sigma;
};

class StructuredOperator;
StructuredOperator canonicalize(const ModelSpace& space, std::vector<OperatorTerm> terms);

class StructuredOperator {
public:
  StructuredOperator() = default;
  explicit StructuredOperator(ModelSpace space) : space_(space) {}

  static StructuredOperator zero(const ModelSpace& space) { return StructuredOperator(space); }
  static StructuredOperator identity(const ModelSpace& space) {
    StructuredOperator x(space);
    OperatorTerm t;
    t.factors.assign(space.legs(), LegFactor::identity(space.N));
    t.sigma = Permutation::identity(space.legs());
    x.terms_.push_back(std::move(t));
    return x;
  }

  const ModelSpace& space() const { return space_; }
  const std::vector<OperatorTerm>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  friend StructuredOperator canonicalize(const ModelSpace& space, std::vector<OperatorTerm> terms);

private:
  ModelSpace space_;
  std::vector<OperatorTerm> terms_;
};

namespace detail {

inline bool factors_match(const LegFactor& a, const LegFactor& b, double tol) {
  if (a.a_identity != b.a_identity || a.b_identity != b.b_identity) {
    // Identity flags are exact; a near-identity factor still matches numerically.
    if ((a.A - b.A).cwiseAbs().maxCoeff() > tol || (a.B - b.B).cwiseAbs().maxCoeff() > tol) return false;
    return true;
  }
  if (!a.a_identity && (a.A - b.A).cwiseAbs().maxCoeff() > tol) return false;
  if (!a.b_identity && (a.B - b.B).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

inline bool signatures_match(const OperatorTerm& a, const OperatorTerm& b, double tol) {
  if (a.sigma != b.sigma) return false;
  for (std::size_t k = 0; k < a.factors.size(); ++k)
    if (!factors_match(a.factors[k], b.factors[k], tol)) return false;
  return true;
}

/// Ordering key used only to make the canonical term order deterministic.
inline std::vector<long long> sort_key(const OperatorTerm& t) {
  std::vector<long long> key(t.sigma.images().begin(), t.sigma.images().end());
  for (const auto& f : t.factors) {
    for (const Matrix* m : {&f.A, &f.B})
      for (Eigen::Index i = 0; i < m->size(); ++i) {
        key.push_back(std::llround((*m)(i).real() * 1e6));
        key.push_back(std::llround((*m)(i).imag() * 1e6));
      }
  }
  return key;
}

} // namespace detail

/// Normalize leg factors, merge equal signatures, drop |c| < 1e-14.
inline StructuredOperator canonicalize(const ModelSpace& space, std::vector<OperatorTerm> terms) {
  constexpr double match_tol = 1e-11;
  std::vector<OperatorTerm> merged;
  merged.reserve(terms.size());
  for (auto& t : terms) {
    if (static_cast<int>(t.factors.size()) != space.legs() || static_cast<int>(t.sigma.size()) != space.legs())
      throw argument_error("canonicalize: term does not match the model space");
    bool zero = (t.coefficient == cplx(0.0));
    for (auto& f : t.factors) {
      if (zero) break;
      if (f.A.rows() != space.N) throw argument_error("canonicalize: leg factor has wrong size");
      if (!f.a_identity) {
        const cplx s = detail::normalize_pivot(f.A);
        if (s == cplx(0.0)) zero = true;
        t.coefficient *= s;
      }
      if (!f.b_identity) {
        const cplx s = detail::normalize_pivot(f.B);
        if (s == cplx(0.0)) zero = true;
        t.coefficient *= s;
      }
      f.refresh();
    }
    if (zero) continue;
    bool found = false;
    for (auto& m : merged)
      if (detail::signatures_match(m, t, match_tol)) {
        m.coefficient += t.coefficient;
        found = true;
        break;
      }
    if (!found) merged.push_back(std::move(t));
  }
  std::erase_if(merged, [](const OperatorTerm& t) { return std::abs(t.coefficient) < kDropTolerance; });
  std::stable_sort(merged.begin(), merged.end(),
                   [](const OperatorTerm& a, const OperatorTerm& b) { return detail::sort_key(a) < detail::sort_key(b); });
  StructuredOperator out(space);
  out.terms_ = std::move(merged);
  return out;
}

inline void require_same_space(const StructuredOperator& x, const StructuredOperator& y, const char* what) {
  if (!(x.space() == y.space())) throw argument_error(std::string(what) + ": model spaces differ");
}

inline StructuredOperator operator+(const StructuredOperator& x, const StructuredOperator& y) {
  require_same_space(x, y, "operator+");
  std::vector<OperatorTerm> terms = x.terms();
  terms.insert(terms.end(), y.terms().begin(), y.terms().end());
  return canonicalize(x.space(), std::move(terms));
}

inline StructuredOperator operator*(cplx c, const StructuredOperator& x) {
  std::vector<OperatorTerm> terms = x.terms();
  for (auto& t : terms) t.coefficient *= c;
  return canonicalize(x.space(), std::move(terms));
}

inline StructuredOperator operator-(const StructuredOperator& x, const StructuredOperator& y) {
  return x + cplx(-1.0) * y;
}

inline StructuredOperator sum(const ModelSpace& space, const std::vector<StructuredOperator>& parts) {
  std::vector<OperatorTerm> terms;
  for (const auto& x : parts) {
    if (!(x.space() == space)) throw argument_error("sum: model spaces differ");
    terms.insert(terms.end(), x.terms().begin(), x.terms().end());
  }
  return canonicalize(space, std::move(terms));
}

namespace detail {

inline void check_leg(const ModelSpace& space, int k) {
  if (k < 0 || k >= space.legs()) throw argument_error("leg index " + std::to_string(k) + " out of range");
}

inline void check_leg_matrix(const ModelSpace& space, const Matrix& a) {
  if (a.rows() != space.N || a.cols() != space.N) throw argument_error("leg matrix must be N×N");
}

inline StructuredOperator single_leg(const ModelSpace& space, int k, LegFactor f) {
  OperatorTerm t;
  t.factors.assign(space.legs(), LegFactor::identity(space.N));
  t.factors[k] = std::move(f);
  t.sigma = Permutation::identity(space.legs());
  return canonicalize(space, {std::move(t)});
}

} // namespace detail

/// η_k ↦ a η_k on leg k (0-based), identity elsewhere.
inline StructuredOperator left_mult(const ModelSpace& space, const Matrix& a, int k) {
  detail::check_leg(space, k);
  detail::check_leg_matrix(space, a);
  return detail::single_leg(space, k, LegFactor(a, Matrix::Identity(space.N, space.N)));
}

/// η_k ↦ η_k a on leg k (no adjoint inserted).
inline StructuredOperator right_mult(const ModelSpace& space, const Matrix& a, int k) {
  detail::check_leg(space, k);
  detail::check_leg_matrix(space, a);
  return detail::single_leg(space, k, LegFactor(Matrix::Identity(space.N, space.N), a));
}

inline StructuredOperator permutation_op(const ModelSpace& space, const Permutation& s) {
  if (static_cast<int>(s.size()) != space.legs()) throw argument_error("permutation_op: permutation size must equal leg count");
  OperatorTerm t;
  t.factors.assign(space.legs(), LegFactor::identity(space.N));
  t.sigma = s;
  return canonicalize(space, {std::move(t)});
}

/// X∘Y. Moving the leg factors of Y through P(σ) relabels leg i as σ(i).
inline StructuredOperator compose(const StructuredOperator& x, const StructuredOperator& y) {
  require_same_space(x, y, "compose");
  const int m = x.space().legs();
  std::vector<OperatorTerm> terms;
  terms.reserve(x.term_count() * y.term_count());
  for (const auto& tx : x.terms()) {
    const Permutation sinv = tx.sigma.inverse();
    for (const auto& ty : y.terms()) {
      OperatorTerm t;
      t.coefficient = tx.coefficient * ty.coefficient;
      t.factors.reserve(m);
      for (int k = 0; k < m; ++k) t.factors.push_back(tx.factors[k].then_after(ty.factors[sinv(k)]));
      t.sigma = tx.sigma * ty.sigma;
      terms.push_back(std::move(t));
    }
  }
  return canonicalize(x.space(), std::move(terms));
}

inline StructuredOperator compose(std::initializer_list<StructuredOperator> chain) {
  if (chain.size() == 0) throw argument_error("compose: empty chain");
  auto it = chain.begin();
  StructuredOperator acc = *it;
  for (++it; it != chain.end(); ++it) acc = compose(acc, *it);
  return acc;
}

inline StructuredOperator commutator(const StructuredOperator& x, const StructuredOperator& y) {
  return compose(x, y) - compose(y, x);
}

/// Adjoint w.r.t. the normalized trace inner product on each leg: (A,B) ↦ (A*,B*).
inline StructuredOperator adjoint(const StructuredOperator& x) {
  const int m = x.space().legs();
  std::vector<OperatorTerm> terms;
  terms.reserve(x.term_count());
  for (const auto& tx : x.terms()) {
    OperatorTerm t;
    t.coefficient = std::conj(tx.coefficient);
    t.sigma = tx.sigma.inverse();
    t.factors.reserve(m);
    for (int k = 0; k < m; ++k) {
      const LegFactor& f = tx.factors[tx.sigma(k)];
      t.factors.emplace_back(f.A.adjoint(), f.B.adjoint());
    }
    terms.push_back(std::move(t));
  }
  return canonicalize(x.space(), std::move(terms));
}

/// J X J with J η = η* on every leg: (A,B) ↦ (B*,A*), coefficient conjugated.
inline StructuredOperator j_conjugate(const StructuredOperator& x) {
  std::vector<OperatorTerm> terms;
  for (const auto& tx : x.terms()) {
    OperatorTerm t;
    t.coefficient = std::conj(tx.coefficient);
    t.sigma = tx.sigma;
    for (const auto& f : tx.factors) t.factors.emplace_back(f.B.adjoint(), f.A.adjoint());
    terms.push_back(std::move(t));
  }
  return canonicalize(x.space(), std::move(terms));
}

namespace detail {

/// Products along one cycle of σ: later legs multiply on the left for A and
/// on the right for B.
inline std::pair<cplx, cplx> cycle_traces(const OperatorTerm& t, const std::vector<int>& cycle) {
  const auto N = t.factors.front().A.rows();
  Matrix a = Matrix::Identity(N, N);
  Matrix b = Matrix::Identity(N, N);
  int leg = cycle.front();
  for (std::size_t step = 0; step < cycle.size(); ++step) {
    leg = t.sigma(leg);
    const LegFactor& f = t.factors[leg];
    if (!f.a_identity) a = f.A * a;
    if (!f.b_identity) b = b * f.B;
  }
  return {a.trace(), b.trace()};
}

} // namespace detail

/// Normalized trace Tr(X)/N^(2m) via the cycle factorization of each term.
inline cplx normalized_trace(const StructuredOperator& x) {
  const ModelSpace& s = x.space();
  const double norm = static_cast<double>(s.dimension());
  cplx total = 0.0;
  for (const auto& t : x.terms()) {
    cplx v = t.coefficient;
    for (const auto& cyc : t.sigma.cycles()) {
      auto [ta, tb] = detail::cycle_traces(t, cyc);
      v *= ta * tb;
    }
    total += v;
  }
  return total / norm;
}

/// Normalized trace on the algebra M_N^{⊗m} acting on (C^N)^{⊗m} of the
/// left parts: Σ c ∏_cycles Tr(A-product) / N^m. The B factors must be identity.
inline cplx factor_algebra_trace(const StructuredOperator& x) {
  const ModelSpace& s = x.space();
  const double norm = std::pow(static_cast<double>(s.N), s.legs());
  cplx total = 0.0;
  for (const auto& t : x.terms()) {
    cplx v = t.coefficient;
    for (const auto& f : t.factors)
      if (!f.b_identity) throw argument_error("factor_algebra_trace: right factors must be identity");
    for (const auto& cyc : t.sigma.cycles()) v *= detail::cycle_traces(t, cyc).first;
    total += v;
  }
  return total / norm;
}

namespace detail {

/// Image index of every basis vector under P(σ).
inline std::vector<std::size_t> permuted_indices(const ModelSpace& space, const Permutation& s) {
  const int m = space.legs();
  const std::size_t L = space.leg_dim();
  const std::size_t D = space.dimension();
  std::vector<std::size_t> stride(m);
  for (int k = 0; k < m; ++k) stride[k] = ipow(L, m - 1 - k);
  std::vector<std::size_t> out(D);
  std::vector<std::size_t> digit(m, 0);
  std::size_t target = 0;
  for (std::size_t idx = 0; idx < D; ++idx) {
    out[idx] = target;
    // odometer increment, leg m-1 fastest
    for (int k = m - 1; k >= 0; --k) {
      ++digit[k];
      target += stride[s(k)];
      if (digit[k] < L) break;
      target -= L * stride[s(k)];
      digit[k] = 0;
    }
  }
  return out;
}

inline void apply_leg_factor(const ModelSpace& space, const LegFactor& f, int k, Vector& v) {
  const int m = space.legs();
  const Eigen::Index N = space.N;
  const std::size_t L = space.leg_dim();
  const std::size_t outer = ipow(L, k);
  const Eigen::Index inner = static_cast<Eigen::Index>(ipow(L, m - 1 - k));
  if (!f.a_identity) {
    const Matrix at = f.A.transpose();
    for (std::size_t o = 0; o < outer; ++o) {
      Eigen::Map<Matrix> xt(v.data() + o * L * inner, N * inner, N);
      xt = (xt * at).eval();
    }
  }
  if (!f.b_identity) {
    for (std::size_t o = 0; o < outer; ++o)
      for (Eigen::Index r = 0; r < N; ++r) {
        Eigen::Map<Matrix> xt(v.data() + o * L * inner + r * N * inner, inner, N);
        xt = (xt * f.B).eval();
      }
  }
}

} // namespace detail

/// X v without materializing X.
inline Vector apply(const StructuredOperator& x, const Vector& v) {
  const ModelSpace& s = x.space();
  if (static_cast<std::size_t>(v.size()) != s.dimension()) throw argument_error("apply: vector dimension mismatch");
  Vector out = Vector::Zero(v.size());
  Vector work(v.size());
  for (const auto& t : x.terms()) {
    if (t.sigma.is_identity()) {
      work = v;
    } else {
      const auto idx = detail::permuted_indices(s, t.sigma);
      for (std::size_t i = 0; i < idx.size(); ++i) work[idx[i]] = v[i];
    }
    for (int k = 0; k < s.legs(); ++k)
      if (!t.factors[k].is_identity()) detail::apply_leg_factor(s, t.factors[k], k, work);
    out += t.coefficient * work;
  }
  return out;
}

/// Explicit matrix on the full model space.
struct DenseOperator {
  ModelSpace space;
  Matrix matrix;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

/// Matrix of η ↦ AηB in the row-major leg basis: A ⊗ B^T.
inline Matrix leg_matrix(const LegFactor& f) { return kron(f.A, f.B.transpose()); }

inline DenseOperator to_dense(const StructuredOperator& x, std::size_t cap = kDenseCap) {
  const ModelSpace& s = x.space();
  const std::size_t D = s.dimension();
  if (D > cap) throw resource_error("to_dense: dimension " + std::to_string(D) + " exceeds cap " + std::to_string(cap));
  const auto Di = static_cast<Eigen::Index>(D);
  Matrix total = Matrix::Zero(Di, Di);
  for (const auto& t : x.terms()) {
    Matrix m = leg_matrix(t.factors[0]);
    for (int k = 1; k < s.legs(); ++k) m = kron(m, leg_matrix(t.factors[k]));
    if (t.sigma.is_identity()) {
      total += t.coefficient * m;
    } else {
      const auto idx = detail::permuted_indices(s, t.sigma);
      for (std::size_t j = 0; j < D; ++j) total.col(static_cast<Eigen::Index>(j)) += t.coefficient * m.col(static_cast<Eigen::Index>(idx[j]));
    }
  }
  return DenseOperator{s, std::move(total)};
}

inline cplx normalized_trace(const DenseOperator& x) {
  return x.matrix.trace() / static_cast<double>(x.matrix.rows());
}

/// Largest singular value of X, via Lanczos on adjoint(X)∘X driven by apply.
inline double operator_norm(const StructuredOperator& x, double tolerance = 1e-10, int max_restarts = 200,
                            int krylov_dim = 40) {
  if (x.is_zero()) return 0.0;
  const StructuredOperator xh = adjoint(x);
  const auto D = static_cast<Eigen::Index>(x.space().dimension());
  auto gram = [&](const Vector& v) { return swlab::apply(xh, swlab::apply(x, v)); };

  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> gauss;
  Vector start(D);
  for (Eigen::Index i = 0; i < D; ++i) start[i] = cplx(gauss(rng), gauss(rng));
  start.normalize();

  const Eigen::Index kmax = std::min<Eigen::Index>(krylov_dim, D);
  double previous = -1.0;
  for (int restart = 0; restart < max_restarts; ++restart) {
    Matrix Q(D, kmax);
    std::vector<double> alpha, beta;
    Q.col(0) = start;
    Eigen::Index k = 0;
    bool exhausted = false;
    for (; k < kmax; ++k) {
      Vector w = gram(Q.col(k));
      const double a = Q.col(k).dot(w).real();
      alpha.push_back(a);
      // full reorthogonalization, twice
      for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).adjoint() * w);
      const double b = w.norm();
      if (k + 1 == kmax) {
        beta.push_back(b);
        break;
      }
      if (b <= 1e-14 * std::max(1.0, std::abs(a))) {
        beta.push_back(0.0);
        exhausted = true;
        break;
      }
      beta.push_back(b);
      Q.col(k + 1) = w / b;
    }
    const Eigen::Index n = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < n) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double theta = es.eigenvalues()(n - 1);
    const Eigen::VectorXd s = es.eigenvectors().col(n - 1);
    const double residual = exhausted ? 0.0 : beta.back() * std::abs(s(n - 1));
    if (theta <= 0.0) return 0.0;
    if (residual <= tolerance * theta || exhausted ||
        (previous > 0.0 && std::abs(theta - previous) <= 1e-3 * tolerance * theta && residual <= std::sqrt(tolerance) * theta))
      return std::sqrt(theta);
    previous = theta;
    start = Q.leftCols(n) * s.cast<cplx>();
    start.normalize();
  }
  throw numeric_error("operator_norm: Lanczos did not converge");
}

/// Exact spectral norm of a dense matrix (oracle and small-size helper).
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix g = m.rows() <= m.cols() ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Random operator with the given number of terms: random leg matrices and permutations.
template <class Rng>
StructuredOperator random_operator(const ModelSpace& space, int terms, Rng& rng, bool with_permutations = true) {
  std::normal_distribution<double> gauss;
  auto rand_matrix = [&] {
    Matrix a(space.N, space.N);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(gauss(rng), gauss(rng));
    return a;
  };
  std::vector<OperatorTerm> out;
  for (int i = 0; i < terms; ++i) {
    OperatorTerm t;
    t.coefficient = cplx(gauss(rng), gauss(rng));
    for (int k = 0; k < space.legs(); ++k) t.factors.emplace_back(rand_matrix(), rand_matrix());
    std::vector<int> img(space.legs());
    std::iota(img.begin(), img.end(), 0);
    if (with_permutations) std::shuffle(img.begin(), img.end(), rng);
    t.sigma = Permutation(img);
    out.push_back(std::move(t));
  }
  return canonicalize(space, std::move(out));
}

} // namespace swlab
