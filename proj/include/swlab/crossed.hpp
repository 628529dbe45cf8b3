#pragma once

// The crossed product F ⋊_θ (S_p × S_q) at finite N: F = 𝔩(M_N)^⊗p ⊗ 𝔯(M_N)^⊗q
// acting on H = L²(M_N)^⊗(p+q), θ_g = Ad P(g). Block form Σ Π(a_g)λ_g, its dense
// realization on l²(G,H), the traces τ̂ and τ′, compression by P = avg λ_g,
// the center, the Murray-von Neumann criterion and the outerness inequality.

#include <Eigen/Dense>

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "duality.hpp"
#include "legops.hpp"
#include "symcomb.hpp"

namespace swlab {

struct ProductGroupElement {
  Permutation s;
  Permutation t;

  static ProductGroupElement identity(int p, int q) { return {Permutation::identity(p), Permutation::identity(q)}; }
  bool is_identity() const { return s.is_identity() && t.is_identity(); }
  ProductGroupElement inverse() const { return {s.inverse(), t.inverse()}; }

  /// s on legs [0,p), t on legs [p,p+q).
  Permutation on_legs() const {
    const std::size_t m = s.size() + t.size();
    std::vector<int> img(m);
    for (std::size_t i = 0; i < s.size(); ++i) img[i] = s(i);
    for (std::size_t i = 0; i < t.size(); ++i) img[s.size() + i] = static_cast<int>(s.size()) + t(i);
    return Permutation(std::move(img));
  }

  std::string to_string() const { return "(" + s.to_string() + "," + t.to_string() + ")"; }

  friend bool operator==(const ProductGroupElement&, const ProductGroupElement&) = default;
  friend auto operator<=>(const ProductGroupElement&, const ProductGroupElement&) = default;
};

inline ProductGroupElement operator*(const ProductGroupElement& a, const ProductGroupElement& b) {
  return {a.s * b.s, a.t * b.t};
}

/// All elements of S_p × S_q, identity first.
inline std::vector<ProductGroupElement> product_group(int p, int q) {
  std::vector<ProductGroupElement> out;
  for (const auto& s : all_permutations(static_cast<std::size_t>(p)))
    for (const auto& t : all_permutations(static_cast<std::size_t>(q))) out.push_back({s, t});
  return out;
}

/// The crossed-product context: space, group, and the implementing unitaries P(g).
class CrossedSetting {
public:
  explicit CrossedSetting(const ModelSpace& space) : space_(space), group_(product_group(space.p, space.q)) {
    if (space.dimension() > kDenseCap) throw resource_error("crossed: dimension " + std::to_string(space.dimension()) + " exceeds dense cap");
    for (std::size_t i = 0; i < group_.size(); ++i) {
      index_.emplace(group_[i], i);
      unitaries_.push_back(to_dense(permutation_op(space, group_[i].on_legs())).matrix);
    }
  }

  const ModelSpace& space() const { return space_; }
  const std::vector<ProductGroupElement>& group() const { return group_; }
  std::size_t order() const { return group_.size(); }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(space_.dimension()); }
  std::size_t index(const ProductGroupElement& g) const { return index_.at(g); }
  const Matrix& unitary(const ProductGroupElement& g) const { return unitaries_[index(g)]; }

  /// θ_g(a) = P(g) a P(g)*.
  Matrix theta(const ProductGroupElement& g, const Matrix& a) const {
    const Matrix& u = unitary(g);
    return u * a * u.adjoint();
  }

private:
  ModelSpace space_;
  std::vector<ProductGroupElement> group_;
  std::map<ProductGroupElement, std::size_t> index_;
  std::vector<Matrix> unitaries_;
};

/// Σ_g Π(a_g) λ_g.
struct CrossedOperator {
  std::map<ProductGroupElement, Matrix> blocks;

  static CrossedOperator pi(const CrossedSetting& c, const Matrix& a) {
    CrossedOperator x;
    x.blocks.emplace(ProductGroupElement::identity(c.space().p, c.space().q), a);
    return x;
  }
  static CrossedOperator lambda(const CrossedSetting& c, const ProductGroupElement& g) {
    CrossedOperator x;
    x.blocks.emplace(g, Matrix::Identity(c.dim(), c.dim()));
    return x;
  }
};

/// (Π(a)λ_g)(Π(b)λ_h) = Π(a θ_g(b)) λ_{gh}.
inline CrossedOperator crossed_multiply(const CrossedSetting& c, const CrossedOperator& x, const CrossedOperator& y) {
  CrossedOperator out;
  for (const auto& [g, a] : x.blocks)
    for (const auto& [h, b] : y.blocks) {
      const Matrix term = a * c.theta(g, b);
      auto [it, inserted] = out.blocks.try_emplace(g * h, term);
      if (!inserted) it->second += term;
    }
  return out;
}

/// (Π(a)λ_g)* = Π(θ_{g⁻¹}(a*)) λ_{g⁻¹}.
inline CrossedOperator crossed_adjoint(const CrossedSetting& c, const CrossedOperator& x) {
  CrossedOperator out;
  for (const auto& [g, a] : x.blocks) {
    const ProductGroupElement gi = g.inverse();
    Matrix b = c.theta(gi, a.adjoint());
    auto [it, inserted] = out.blocks.try_emplace(gi, b);
    if (!inserted) it->second += b;
  }
  return out;
}

inline CrossedOperator crossed_sum(const CrossedOperator& x, const CrossedOperator& y, cplx scale = 1.0) {
  CrossedOperator out = x;
  for (const auto& [g, b] : y.blocks) {
    auto [it, inserted] = out.blocks.try_emplace(g, scale * b);
    if (!inserted) it->second += scale * b;
  }
  return out;
}

/// τ̂(A) = tr(a_e), normalized.
inline cplx tau_hat(const CrossedSetting& c, const CrossedOperator& x) {
  auto it = x.blocks.find(ProductGroupElement::identity(c.space().p, c.space().q));
  if (it == x.blocks.end()) return 0.0;
  return it->second.trace() / static_cast<double>(c.dim());
}

// ---------------------------------------------------------------------------
// Dense realization on l²(G,H), block g of a vector is η(g).

inline Eigen::Index crossed_dense_dim(const CrossedSetting& c) {
  const std::size_t D = c.order() * c.space().dimension();
  if (D > kDenseCap) throw resource_error("crossed: dense dimension " + std::to_string(D) + " exceeds dense cap");
  return static_cast<Eigen::Index>(D);
}

/// (Π(a)η)(g) = θ_{g⁻¹}(a) η(g).
inline Matrix dense_pi(const CrossedSetting& c, const Matrix& a) {
  const Eigen::Index D = crossed_dense_dim(c), d = c.dim();
  Matrix out = Matrix::Zero(D, D);
  for (std::size_t i = 0; i < c.order(); ++i)
    out.block(i * d, i * d, d, d) = c.theta(c.group()[i].inverse(), a);
  return out;
}

/// (λ_s η)(g) = η(s⁻¹g).
inline Matrix dense_lambda(const CrossedSetting& c, const ProductGroupElement& s) {
  const Eigen::Index D = crossed_dense_dim(c), d = c.dim();
  Matrix out = Matrix::Zero(D, D);
  const ProductGroupElement si = s.inverse();
  for (std::size_t i = 0; i < c.order(); ++i) {
    const std::size_t j = c.index(si * c.group()[i]);
    out.block(i * d, j * d, d, d) = Matrix::Identity(d, d);
  }
  return out;
}

/// (Π′(a)η)(g) = JaJ η(g).
inline Matrix dense_pi_prime(const CrossedSetting& c, const StructuredOperator& a) {
  const Eigen::Index D = crossed_dense_dim(c), d = c.dim();
  const Matrix jaj = to_dense(j_conjugate(a)).matrix;
  Matrix out = Matrix::Zero(D, D);
  for (std::size_t i = 0; i < c.order(); ++i) out.block(i * d, i * d, d, d) = jaj;
  return out;
}

/// (λ′_s η)(g) = θ_s(η(gs)), with θ_s acting on vectors of H as P(s).
inline Matrix dense_lambda_prime(const CrossedSetting& c, const ProductGroupElement& s) {
  const Eigen::Index D = crossed_dense_dim(c), d = c.dim();
  Matrix out = Matrix::Zero(D, D);
  for (std::size_t i = 0; i < c.order(); ++i) {
    const std::size_t j = c.index(c.group()[i] * s);
    out.block(i * d, j * d, d, d) = c.unitary(s);
  }
  return out;
}

inline Matrix to_dense(const CrossedSetting& c, const CrossedOperator& x) {
  const Eigen::Index D = crossed_dense_dim(c);
  Matrix out = Matrix::Zero(D, D);
  for (const auto& [g, a] : x.blocks) out += dense_pi(c, a) * dense_lambda(c, g);
  return out;
}

/// ξ̂_I: ξ_I at the identity, zero elsewhere.
inline Vector crossed_identity_vector(const CrossedSetting& c) {
  const Eigen::Index D = crossed_dense_dim(c);
  Vector v = Vector::Zero(D);
  v.head(c.dim()) = identity_vector(c.space());
  return v;
}

/// V: H → l²(G,H), η ↦ |G|^{-1/2}(η, …, η); P = VV*.
inline Matrix diagonal_isometry(const CrossedSetting& c) {
  const Eigen::Index D = crossed_dense_dim(c), d = c.dim();
  Matrix v = Matrix::Zero(D, d);
  const double s = 1.0 / std::sqrt(static_cast<double>(c.order()));
  for (std::size_t i = 0; i < c.order(); ++i) v.block(i * d, 0, d, d) = s * Matrix::Identity(d, d);
  return v;
}

/// Random element of F: a sum of products of 𝔩 on left legs and 𝔯 on right legs.
inline StructuredOperator random_f_element(const ModelSpace& space, Rng& rng, int terms = 2) {
  std::vector<StructuredOperator> parts;
  for (int t = 0; t < terms; ++t) {
    StructuredOperator x = StructuredOperator::identity(space);
    for (int k = 0; k < space.legs(); ++k) {
      const Matrix a = random_matrix(space.N, rng);
      x = compose(x, space.is_left_leg(k) ? left_mult(space, a, k) : right_mult(space, a, k));
    }
    parts.push_back(x);
  }
  return sum(space, parts);
}

/// Generators of F: matrix units on every leg, acting from the appropriate side.
inline std::vector<Matrix> f_generators(const ModelSpace& space) {
  std::vector<Matrix> out;
  for (int k = 0; k < space.legs(); ++k)
    for (int a = 0; a < space.N; ++a)
      for (int b = 0; b < space.N; ++b) {
        Matrix e = Matrix::Zero(space.N, space.N);
        e(a, b) = 1.0;
        out.push_back(to_dense(space.is_left_leg(k) ? left_mult(space, e, k) : right_mult(space, e, k)).matrix);
      }
  return out;
}

struct CenterReport {
  std::size_t group_order = 0;
  std::size_t algebra_dimension = 0;
  std::size_t center_dimension = 0;
  std::size_t conjugacy_classes = 0;
  /// smallest eigenvalue of the Gram form τ̂(Z_i* Z_j) on the center basis
  double tau_gram_min_eigenvalue = 0.0;
  AlgebraBasis center;
};

inline std::size_t count_conjugacy_classes(const std::vector<ProductGroupElement>& g) {
  std::vector<char> seen(g.size(), 0);
  std::size_t classes = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (seen[i]) continue;
    ++classes;
    for (const auto& h : g) {
      const auto c = h * g[i] * h.inverse();
      for (std::size_t j = 0; j < g.size(); ++j)
        if (g[j] == c) seen[j] = 1;
    }
  }
  return classes;
}

/// Center of F ⋊ G on l²(G,H): the commutant of (generators ∪ commutant).
inline CenterReport center_basis(const ModelSpace& space, std::uint64_t seed = 0) {
  const CrossedSetting c(space);
  const Eigen::Index D = crossed_dense_dim(c);
  std::vector<Matrix> gens;
  for (const auto& f : f_generators(space)) gens.push_back(dense_pi(c, f));
  for (const auto& g : c.group()) gens.push_back(dense_lambda(c, g));
  const AlgebraBasis comm = commutant_basis(gens, D, derive_seed(seed, "commutant"));
  std::vector<Matrix> both = gens;
  both.insert(both.end(), comm.elements.begin(), comm.elements.end());
  CenterReport r;
  r.center = commutant_basis(both, D, derive_seed(seed, "center"));
  r.group_order = c.order();
  r.center_dimension = r.center.dimension;
  r.algebra_dimension = c.order() * space.dimension();
  r.conjugacy_classes = count_conjugacy_classes(c.group());
  const Vector xi = crossed_identity_vector(c);
  const auto n = static_cast<Eigen::Index>(r.center.elements.size());
  Matrix gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) gram(i, j) = xi.dot(r.center.elements[i].adjoint() * (r.center.elements[j] * xi));
  Eigen::SelfAdjointEigenSolver<Matrix> es((gram + gram.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  r.tau_gram_min_eigenvalue = n ? es.eigenvalues().minCoeff() : 0.0;
  return r;
}

struct CompressionReport {
  std::size_t group_order = 0;
  double projection_error = 0.0;          // ‖P* − P‖ + ‖P² − P‖
  double lambda_compression_error = 0.0;  // max_g ‖Pλ_gP − P‖
  double lambda_compressed_identity = 0.0;  // max_g ‖V*λ_gV − I‖
  double pi_average_error = 0.0;          // ‖V*Π(a)V − avg θ_g(a)‖
  double lambda_prime_error = 0.0;        // max_g ‖V*λ′_gV − U_g‖
  double pi_prime_error = 0.0;            // ‖V*Π′(a)V − JaJ‖
  double commutation_error = 0.0;         // λ′, Π′ against Π, λ
  std::size_t compressed_dimension = 0;   // dim span V*(F⋊G)V
  std::size_t fixed_dimension = 0;        // dim F^G
};

inline CompressionReport compression_check(const ModelSpace& space, std::uint64_t seed = 0) {
  const CrossedSetting c(space);
  Rng rng(derive_seed(seed, "compression"));
  const Eigen::Index d = c.dim();
  const Matrix V = diagonal_isometry(c);
  const Matrix P = V * V.adjoint();
  CompressionReport r;
  r.group_order = c.order();
  r.projection_error = spectral_norm(P.adjoint() - P) + spectral_norm(P * P - P);
  const StructuredOperator a_s = random_f_element(space, rng);
  const Matrix a = to_dense(a_s).matrix;
  Matrix avg = Matrix::Zero(d, d);
  for (const auto& g : c.group()) avg += c.theta(g, a);
  avg /= static_cast<double>(c.order());
  const Matrix pa = dense_pi(c, a);
  const Matrix pa_prime = dense_pi_prime(c, a_s);
  r.pi_average_error = spectral_norm(V.adjoint() * pa * V - avg);
  r.pi_prime_error = spectral_norm(V.adjoint() * pa_prime * V - to_dense(j_conjugate(a_s)).matrix);
  for (const auto& g : c.group()) {
    const Matrix l = dense_lambda(c, g);
    const Matrix lp = dense_lambda_prime(c, g);
    r.lambda_compression_error = std::max(r.lambda_compression_error, spectral_norm(P * l * P - P));
    r.lambda_compressed_identity =
        std::max(r.lambda_compressed_identity, spectral_norm(V.adjoint() * l * V - Matrix::Identity(d, d)));
    r.lambda_prime_error = std::max(r.lambda_prime_error, spectral_norm(V.adjoint() * lp * V - c.unitary(g)));
    for (const Matrix* x : std::initializer_list<const Matrix*>{&l, &pa})
      for (const Matrix* y : std::initializer_list<const Matrix*>{&lp, &pa_prime})
        r.commutation_error = std::max(r.commutation_error, spectral_norm(*x * *y - *y * *x));
  }
  SpanBuilder fixed, compressed;
  // products of matrix units over all legs form a basis of F
  std::vector<int> word(space.legs(), 0);
  const int L = space.N * space.N;
  while (true) {
    StructuredOperator x = StructuredOperator::identity(space);
    for (int k = 0; k < space.legs(); ++k) {
      Matrix e = Matrix::Zero(space.N, space.N);
      e(word[k] / space.N, word[k] % space.N) = 1.0;
      x = compose(x, space.is_left_leg(k) ? left_mult(space, e, k) : right_mult(space, e, k));
    }
    const Matrix xd = to_dense(x).matrix;
    Matrix xa = Matrix::Zero(d, d);
    for (const auto& g : c.group()) xa += c.theta(g, xd);
    fixed.add(xa / static_cast<double>(c.order()));
    const Matrix px = dense_pi(c, xd);
    for (const auto& g : c.group()) compressed.add(V.adjoint() * px * dense_lambda(c, g) * V);
    int i = space.legs() - 1;
    while (i >= 0 && word[i] == L - 1) word[i--] = 0;
    if (i < 0) break;
    ++word[i];
  }
  r.fixed_dimension = fixed.size();
  r.compressed_dimension = compressed.size();
  return r;
}

// ---------------------------------------------------------------------------
// τ′ on (F^G)′ and the Theorem-level criterion

struct TauPrime {
  double computed = 0.0;  // (dim λ · dim μ)² / (p! q!)
  double stated = 0.0;    // dim λ · dim μ / (p! q!)
  bool agree() const { return std::abs(computed - stated) <= 1e-12; }
};

inline TauPrime trace_tau_prime(const Partition& lambda, const Partition& mu) {
  const double dl = static_cast<double>(dimension(lambda));
  const double dm = static_cast<double>(dimension(mu));
  const double order = static_cast<double>(factorial(lambda.weight()) * factorial(mu.weight()));
  return TauPrime{dl * dl * dm * dm / order, dl * dm / order};
}

struct TauPrimeValidation {
  double max_identity_coefficient_error = 0.0;  // max_g |⟨λ′_g ξ̂, ξ̂⟩ − δ_{g,e}|
  double max_projection_error = 0.0;            // ‖V* R⁻¹(P^λ) V − P^λ‖ over λ
  double max_trace_error = 0.0;                 // |⟨R⁻¹(P^λ) ξ̂, ξ̂⟩ − computed τ′|
};

/// Dense check of τ′(U_g) = δ_{g,e} and of τ′(P^λ ⊗ P^μ) through R_P⁻¹.
inline TauPrimeValidation validate_tau_prime(const ModelSpace& space) {
  const CrossedSetting c(space);
  const Matrix V = diagonal_isometry(c);
  const Vector xi = crossed_identity_vector(c);
  TauPrimeValidation v;
  std::vector<Matrix> lp;
  for (const auto& g : c.group()) {
    lp.push_back(dense_lambda_prime(c, g));
    const cplx val = xi.dot(lp.back() * xi);
    v.max_identity_coefficient_error = std::max(v.max_identity_coefficient_error, std::abs(val - (g.is_identity() ? 1.0 : 0.0)));
  }
  const auto lambdas = enumerate_partitions(space.p);
  const auto mus = enumerate_partitions(space.q);
  const double order = static_cast<double>(c.order());
  for (const auto& l : lambdas)
    for (const auto& m : mus) {
      Matrix pre = Matrix::Zero(lp.front().rows(), lp.front().cols());
      const double scale = static_cast<double>(dimension(l) * dimension(m)) / order;
      for (std::size_t i = 0; i < c.order(); ++i) {
        const auto& g = c.group()[i];
        const double chi = static_cast<double>((space.p ? character(l, g.s) : 1) * (space.q ? character(m, g.t) : 1));
        pre += scale * chi * lp[i];
      }
      const Matrix proj = to_dense(young_projection_pair(space, l, m)).matrix;
      v.max_projection_error = std::max(v.max_projection_error, spectral_norm(V.adjoint() * pre * V - proj));
      const double tau = xi.dot(pre * xi).real();
      v.max_trace_error = std::max(v.max_trace_error, std::abs(tau - trace_tau_prime(l, m).computed));
    }
  return v;
}

inline bool equivalence_criterion(const Partition& lambda, const Partition& mu, const Partition& gamma, const Partition& delta) {
  if (lambda.weight() != gamma.weight() || mu.weight() != delta.weight())
    throw argument_error("equivalence_criterion: partitions must have matching weights");
  return dimension(lambda) * dimension(mu) == dimension(gamma) * dimension(delta);
}

struct TauPrimeRow {
  Partition lambda, mu;
  std::int64_t dim_lambda = 0, dim_mu = 0;
  TauPrime tau;
  int class_id = 0;
};

/// One row per (λ, μ) ∈ Υ_p × Υ_q; class ids group equal dim λ · dim μ in order of first appearance.
inline std::vector<TauPrimeRow> tau_prime_table(int p, int q) {
  if (p < 0 || q < 0) throw argument_error("tau_prime_table: p and q must be nonnegative");
  std::vector<TauPrimeRow> rows;
  std::map<std::int64_t, int> ids;
  for (const auto& l : enumerate_partitions(p))
    for (const auto& m : enumerate_partitions(q)) {
      TauPrimeRow r{l, m, dimension(l), dimension(m), trace_tau_prime(l, m), 0};
      auto [it, inserted] = ids.try_emplace(r.dim_lambda * r.dim_mu, static_cast<int>(ids.size()));
      r.class_id = it->second;
      rows.push_back(std::move(r));
    }
  return rows;
}

inline std::string tau_prime_csv(const std::vector<TauPrimeRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda,mu,dim_lambda,dim_mu,tau_computed,tau_stated,class_id\n";
  for (const auto& r : rows)
    os << '"' << r.lambda.to_string() << "\",\"" << r.mu.to_string() << "\"," << r.dim_lambda << ',' << r.dim_mu << ','
       << r.tau.computed << ',' << r.tau.stated << ',' << r.class_id << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Outerness inequality

struct TraceInequalityReport {
  int N = 0;
  ProductGroupElement s;
  std::size_t tuples = 0;
  double max_abs_trace = 0.0;
  double bound = 0.0;        // 1/N
  double cycle_bound = 0.0;  // N^{#cycles − m}
  bool all_within = true;
};

/// |tr(W_s (u_1 ⊗ … ⊗ u_m))| on M_N^⊗m, W_s the tensor-factor permutation.
inline TraceInequalityReport trace_inequality_check(const ProductGroupElement& s, const std::vector<std::vector<Matrix>>& tuples, int N) {
  if (s.is_identity()) throw argument_error("trace_inequality_check: s must not be the identity");
  const Permutation sigma = s.on_legs();
  const int m = static_cast<int>(sigma.size());
  const ModelSpace space(N, m, 0);
  TraceInequalityReport r;
  r.N = N;
  r.s = s;
  r.tuples = tuples.size();
  r.bound = 1.0 / N;
  r.cycle_bound = std::pow(static_cast<double>(N), static_cast<double>(sigma.cycles().size()) - m);
  for (const auto& tuple : tuples) {
    if (static_cast<int>(tuple.size()) != m) throw argument_error("trace_inequality_check: tuple length differs from p+q");
    StructuredOperator x = permutation_op(space, sigma);
    for (int k = 0; k < m; ++k) {
      if (!is_unitary(tuple[k])) throw argument_error("trace_inequality_check: tuple entry is not unitary");
      x = compose(left_mult(space, tuple[k], k), x);
    }
    const double t = std::abs(factor_algebra_trace(x));
    r.max_abs_trace = std::max(r.max_abs_trace, t);
    if (t > r.bound * (1.0 + 1e-12)) r.all_within = false;
  }
  return r;
}

} // namespace swlab
