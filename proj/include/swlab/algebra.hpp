#pragma once

// Finite-dimensional *-algebra tools: commutants, bicommutants, span closure
// of generated algebras, S_p fixed-point bases, the mixed-tensor dimension gap
// and the span-growth realization of the one-sided duality.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include "duality.hpp"
#include "haar.hpp"
#include "legops.hpp"

namespace swlab {

inline constexpr double kRankThreshold = 1e-8;

struct AlgebraBasis {
  std::size_t dimension = 0;
  /// Orthonormal in ⟨X,Y⟩ = tr(X*Y)/d.
  std::vector<Matrix> elements;
  bool is_algebra = false;
  std::optional<ModelSpace> space;

  std::vector<DenseOperator> dense() const {
    if (!space) throw argument_error("AlgebraBasis: no model space attached");
    std::vector<DenseOperator> out;
    for (const auto& e : elements) out.push_back(DenseOperator{*space, e});
    return out;
  }
};

inline cplx trace_inner(const Matrix& x, const Matrix& y) {
  return (x.adjoint() * y).trace() / static_cast<double>(x.rows());
}

/// Incremental orthonormal basis under the normalized trace inner product with
/// two-pass Gram-Schmidt and a relative acceptance threshold.
class SpanBuilder {
public:
  explicit SpanBuilder(double threshold = kRankThreshold) : threshold_(threshold) {}

  bool add(const Matrix& x) {
    const double n0 = std::sqrt(std::max(0.0, trace_inner(x, x).real()));
    if (n0 == 0.0) return false;
    Matrix r = x;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis_) r -= trace_inner(b, r) * b;
    const double n1 = std::sqrt(std::max(0.0, trace_inner(r, r).real()));
    if (n1 <= threshold_ * n0) return false;
    basis_.push_back(r / n1);
    return true;
  }

  std::size_t size() const { return basis_.size(); }
  const std::vector<Matrix>& basis() const { return basis_; }
  std::vector<Matrix> release() { return std::move(basis_); }

private:
  double threshold_;
  std::vector<Matrix> basis_;
};

namespace detail {

inline void check_generators(const std::vector<Matrix>& gens, Eigen::Index d) {
  for (const auto& g : gens)
    if (g.rows() != d || g.cols() != d) throw argument_error("generators must be square of a common size");
  if (static_cast<std::size_t>(d) > kDenseCap)
    throw resource_error("dimension " + std::to_string(d) + " exceeds dense cap " + std::to_string(kDenseCap));
}

inline constexpr double kBasisStorageBytes = 1.5e9;

inline void check_basis_storage(std::size_t count, Eigen::Index d) {
  const double bytes = static_cast<double>(count) * static_cast<double>(d) * static_cast<double>(d) * sizeof(cplx);
  if (bytes > kBasisStorageBytes)
    throw resource_error("commutant: " + std::to_string(count) + " basis elements of dimension " + std::to_string(d) +
                         " exceed the storage budget");
}

inline cplx random_coefficient(Rng& rng) {
  std::normal_distribution<double> g;
  return cplx(g(rng), g(rng));
}

/// Random element of the unital *-algebra generated by gens: a random
/// combination of all generators and of words of length ≤ 3 in gens and adjoints.
inline Matrix random_algebra_element(const std::vector<Matrix>& gens, Eigen::Index d, Rng& rng, int words = 24) {
  Matrix z = random_coefficient(rng) * Matrix::Identity(d, d);
  if (gens.empty()) return z;
  std::uniform_int_distribution<std::size_t> pick(0, 2 * gens.size() - 1);
  auto letter = [&]() -> Matrix {
    const std::size_t i = pick(rng);
    return i < gens.size() ? gens[i] : Matrix(gens[i - gens.size()].adjoint());
  };
  for (const auto& g : gens) {
    const double scale = g.norm() / std::sqrt(static_cast<double>(d));
    if (scale >= 1e-8) z += random_coefficient(rng) * g / scale;
  }
  for (int w = 0; w < words; ++w) {
    Matrix word = letter();
    const int len = 1 + w % 3;
    for (int l = 1; l < len; ++l) word = word * letter();
    const double scale = word.norm() / std::sqrt(static_cast<double>(d));
    if (scale < 1e-8) continue;
    z += random_coefficient(rng) * word / scale;
  }
  return z;
}

inline Matrix hermitian_part(const Matrix& z) { return (z + z.adjoint()) / 2.0; }

struct Clusters {
  Matrix vectors;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> ranges;  // (start, size)
};

inline Clusters eigen_clusters(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd w = es.eigenvalues();
  const double scale = std::max(1e-300, w.cwiseAbs().maxCoeff());
  const double tol = 1e-8 * scale;
  Clusters c;
  c.vectors = es.eigenvectors();
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= w.size(); ++i)
    if (i == w.size() || w(i) - w(i - 1) > tol) {
      c.ranges.emplace_back(start, i - start);
      start = i;
    }
  return c;
}

/// Commutant of the *-algebra containing h1 and h2 (both generic in it),
/// read off from the isotypic structure: clusters of h1 grouped into
/// components linked by the off-diagonal blocks of h2.
inline std::optional<std::vector<Matrix>> structured_commutant(const Matrix& h1, const Matrix& h2) {
  const Eigen::Index d = h1.rows();
  const Clusters cl = eigen_clusters(h1);
  const Matrix& V = cl.vectors;
  const Matrix B = V.adjoint() * h2 * V;
  const double scale = std::max(1e-300, spectral_norm(h2));
  const double zero_tol = 1e-7 * scale;
  const std::size_t nc = cl.ranges.size();

  auto block = [&](std::size_t a, std::size_t b) {
    return B.block(cl.ranges[a].first, cl.ranges[b].first, cl.ranges[a].second, cl.ranges[b].second);
  };
  for (std::size_t a = 0; a < nc; ++a) {
    const Matrix D = block(a, a);
    const cplx mean = D.trace() / static_cast<double>(D.rows());
    if ((D - mean * Matrix::Identity(D.rows(), D.rows())).norm() > zero_tol) return std::nullopt;
  }
  std::vector<std::vector<std::size_t>> adj(nc);
  for (std::size_t a = 0; a < nc; ++a)
    for (std::size_t b = a + 1; b < nc; ++b)
      if (block(a, b).norm() > zero_tol) {
        if (cl.ranges[a].second != cl.ranges[b].second) return std::nullopt;
        adj[a].push_back(b);
        adj[b].push_back(a);
      }

  std::vector<Matrix> out;
  std::vector<char> seen(nc, 0);
  std::vector<Matrix> transport(nc);
  for (std::size_t root = 0; root < nc; ++root) {
    if (seen[root]) continue;
    const Eigen::Index n = cl.ranges[root].second;
    std::vector<std::size_t> comp{root};
    seen[root] = 1;
    transport[root] = Matrix::Identity(n, n);
    std::queue<std::size_t> bfs;
    bfs.push(root);
    while (!bfs.empty()) {
      const std::size_t a = bfs.front();
      bfs.pop();
      for (std::size_t b : adj[a]) {
        if (seen[b]) continue;
        const Matrix blk = block(a, b);
        const double c = blk.norm() / std::sqrt(static_cast<double>(n));
        const Matrix gram = blk.adjoint() * blk;
        if ((gram - c * c * Matrix::Identity(n, n)).norm() > 1e-7 * c * c * n) return std::nullopt;
        transport[b] = blk.adjoint() * transport[a] / c;
        seen[b] = 1;
        comp.push_back(b);
        bfs.push(b);
      }
    }
    check_basis_storage(out.size() + static_cast<std::size_t>(n * n), d);
    std::vector<Matrix> Q;
    for (std::size_t a : comp) Q.push_back(V.middleCols(cl.ranges[a].first, n) * transport[a]);
    const double norm = std::sqrt(static_cast<double>(comp.size()) / static_cast<double>(d));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        Matrix x = Matrix::Zero(d, d);
        for (const auto& q : Q) x.noalias() += q.col(i) * q.col(j).adjoint();
        out.push_back(x / norm);
      }
  }
  return out;
}

/// Null space of X ↦ ([G,X], [G*,X]) over matrices block-diagonal in the
/// eigen-clusters of h (which lies in the algebra, so the commutant is inside).
inline std::vector<Matrix> gram_commutant(const std::vector<Matrix>& gens, const Matrix& h) {
  const Eigen::Index d = h.rows();
  const Clusters cl = eigen_clusters(h);
  const Matrix& V = cl.vectors;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> unknowns;
  for (auto [start, size] : cl.ranges)
    for (Eigen::Index i = start; i < start + size; ++i)
      for (Eigen::Index j = start; j < start + size; ++j) unknowns.emplace_back(i, j);
  const auto U = static_cast<Eigen::Index>(unknowns.size());
  if (U > 3000)
    throw numeric_error("commutant: structured solve failed and the fallback needs " + std::to_string(U) + " unknowns");
  Matrix gram = Matrix::Zero(U, U);
  auto accumulate = [&](const Matrix& G) {
    const Matrix GhG = G.adjoint() * G;
    const Matrix GGh = G * G.adjoint();
    const Matrix Gh = G.adjoint();
    for (Eigen::Index a = 0; a < U; ++a) {
      const auto [i, j] = unknowns[a];
      for (Eigen::Index b = 0; b < U; ++b) {
        const auto [k, l] = unknowns[b];
        cplx v = -Gh(i, k) * G(l, j) - Gh(l, j) * G(i, k);
        if (j == l) v += GhG(i, k);
        if (i == k) v += GGh(l, j);
        gram(a, b) += v;
      }
    }
  };
  for (const auto& g : gens) {
    const Matrix gt = V.adjoint() * g * V;
    accumulate(gt);
    accumulate(gt.adjoint());
  }
  std::vector<Matrix> out;
  if (gens.empty()) {
    gram.setZero();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const double top = std::max(0.0, es.eigenvalues().maxCoeff());
  for (Eigen::Index c = 0; c < U; ++c) {
    if (es.eigenvalues()(c) > 1e-12 * top && top > 0.0) continue;
    Matrix xt = Matrix::Zero(d, d);
    for (Eigen::Index a = 0; a < U; ++a) xt(unknowns[a].first, unknowns[a].second) = es.eigenvectors()(a, c);
    out.push_back(V * xt * V.adjoint() * std::sqrt(static_cast<double>(d)));
  }
  return out;
}

inline bool commutes_with_all(const std::vector<Matrix>& gens, const std::vector<Matrix>& candidates, Rng& rng) {
  if (candidates.empty()) return true;
  const Eigen::Index d = candidates.front().rows();
  Matrix z = Matrix::Zero(d, d);
  for (const auto& c : candidates) z += random_coefficient(rng) * c;
  const Matrix zs = z.adjoint();
  const double zn = spectral_norm(z);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = random_coefficient(rng);
  v.normalize();
  for (const auto& g : gens) {
    const double gn = spectral_norm(g);
    for (const Matrix* x : std::initializer_list<const Matrix*>{&z, &zs}) {
      const Vector r = g * (*x * v) - *x * (g * v);
      if (r.norm() > 1e-8 * std::max(1e-300, gn * zn)) return false;
    }
  }
  return true;
}

} // namespace detail

/// {X : [X, A_i] = [X, A_i*] = 0 for all i}, orthonormal in the normalized trace.
inline AlgebraBasis commutant_basis(const std::vector<Matrix>& generators, Eigen::Index d, std::uint64_t seed = 0x0c0ffee) {
  detail::check_generators(generators, d);
  Rng rng(seed);
  const Matrix h1 = detail::hermitian_part(detail::random_algebra_element(generators, d, rng));
  const Matrix h2 = detail::hermitian_part(detail::random_algebra_element(generators, d, rng));
  std::vector<Matrix> basis;
  auto structured = detail::structured_commutant(h1, h2);
  if (structured && detail::commutes_with_all(generators, *structured, rng)) {
    basis = std::move(*structured);
  } else {
    basis = detail::gram_commutant(generators, h1);
    if (!detail::commutes_with_all(generators, basis, rng)) throw numeric_error("commutant: null-space verification failed");
  }
  AlgebraBasis out;
  out.dimension = basis.size();
  out.elements = std::move(basis);
  out.is_algebra = true;
  return out;
}

inline AlgebraBasis commutant_basis(const std::vector<DenseOperator>& generators, const ModelSpace& space) {
  std::vector<Matrix> g;
  for (const auto& x : generators) g.push_back(x.matrix);
  AlgebraBasis b = commutant_basis(g, static_cast<Eigen::Index>(space.dimension()));
  b.space = space;
  return b;
}

/// Unital *-algebra generated by gens, by randomized product closure: random
/// products of random elements of the current span are added until `patience`
/// consecutive products add nothing.
inline AlgebraBasis span_closure(const std::vector<Matrix>& generators, Eigen::Index d, std::uint64_t seed = 0x5a11, int patience = 3) {
  detail::check_generators(generators, d);
  Rng rng(seed);
  SpanBuilder span;
  span.add(Matrix::Identity(d, d));
  for (const auto& g : generators) {
    span.add(g);
    span.add(g.adjoint());
  }
  auto random_member = [&] {
    Matrix z = Matrix::Zero(d, d);
    for (const auto& b : span.basis()) z += detail::random_coefficient(rng) * b;
    return z;
  };
  int idle = 0;
  while (idle < patience) {
    if (span.size() >= static_cast<std::size_t>(d * d)) break;
    if (span.add(random_member() * random_member()))
      idle = 0;
    else
      ++idle;
  }
  AlgebraBasis out;
  out.dimension = span.size();
  out.elements = span.release();
  out.is_algebra = true;
  return out;
}

struct GeneratedAlgebra {
  std::size_t dimension = 0;
  std::size_t bicommutant_dimension = 0;
  std::size_t closure_dimension = 0;
  std::size_t commutant_dimension = 0;
  AlgebraBasis basis;
};

/// Dimension of the generated unital *-algebra, by bicommutant and by span
/// closure; disagreement throws numeric_error.
inline GeneratedAlgebra generated_algebra_dim(const std::vector<Matrix>& generators, Eigen::Index d, std::uint64_t seed = 0) {
  const AlgebraBasis closure = span_closure(generators, d, derive_seed(seed, "closure"));
  const AlgebraBasis comm = commutant_basis(generators, d, derive_seed(seed, "commutant"));
  const AlgebraBasis bicomm = commutant_basis(comm.elements, d, derive_seed(seed, "bicommutant"));
  if (bicomm.dimension != closure.dimension)
    throw numeric_error("generated algebra: bicommutant dimension " + std::to_string(bicomm.dimension) +
                        " differs from span-closure dimension " + std::to_string(closure.dimension));
  GeneratedAlgebra out;
  out.dimension = closure.dimension;
  out.bicommutant_dimension = bicomm.dimension;
  out.closure_dimension = closure.dimension;
  out.commutant_dimension = comm.dimension;
  out.basis = closure;
  return out;
}

inline GeneratedAlgebra generated_algebra_dim(const std::vector<DenseOperator>& generators, const ModelSpace& space,
                                              std::uint64_t seed = 0) {
  std::vector<Matrix> g;
  for (const auto& x : generators) g.push_back(x.matrix);
  GeneratedAlgebra r = generated_algebra_dim(g, static_cast<Eigen::Index>(space.dimension()), seed);
  r.basis.space = space;
  return r;
}

inline std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// C(N²+p−1, p).
inline std::int64_t fixed_point_dimension(int p, int N) { return binomial(static_cast<std::int64_t>(N) * N + p - 1, p); }

/// Basis of (M_N^⊗p)^{S_p} acting on L²(M_N)^⊗p by left (or right) multiplication:
/// one symmetrized matrix-unit word per multiset of p matrix units.
inline AlgebraBasis fixed_point_basis(int p, int N, Side side) {
  if (p < 1) throw argument_error("fixed_point_basis: p must be at least 1");
  const ModelSpace space = side == Side::left ? ModelSpace(N, p, 0) : ModelSpace(N, 0, p);
  if (space.dimension() > kDenseCap)
    throw resource_error("fixed_point_basis: dimension " + std::to_string(space.dimension()) + " exceeds dense cap");
  const int L = N * N;
  auto unit = [&](int w) {
    Matrix e = Matrix::Zero(N, N);
    e(w / N, w % N) = 1.0;
    return e;
  };
  SpanBuilder span;
  std::vector<int> word(p, 0);
  const auto perms = all_permutations(static_cast<std::size_t>(p));
  while (true) {
    std::vector<StructuredOperator> orbit;
    for (const auto& s : perms) {
      std::vector<StructuredOperator> legs;
      for (int k = 0; k < p; ++k)
        legs.push_back(side == Side::left ? left_mult(space, unit(word[s(k)]), k) : right_mult(space, unit(word[s(k)]), k));
      StructuredOperator x = legs[0];
      for (int k = 1; k < p; ++k) x = compose(x, legs[k]);
      orbit.push_back(x);
    }
    span.add(to_dense(sum(space, orbit)).matrix);
    // next multiset: nondecreasing word
    int i = p - 1;
    while (i >= 0 && word[i] == L - 1) --i;
    if (i < 0) break;
    ++word[i];
    for (int k = i + 1; k < p; ++k) word[k] = word[i];
  }
  AlgebraBasis out;
  out.dimension = span.size();
  out.elements = span.release();
  out.is_algebra = true;
  out.space = space;
  return out;
}

/// u ↦ 𝔩(u)^⊗p ⊗ 𝔯(u*)^⊗q.
inline StructuredOperator mixed_tensor_unitary(const ModelSpace& space, const Matrix& u) {
  const Matrix us = u.adjoint();
  StructuredOperator x = StructuredOperator::identity(space);
  for (int k = 0; k < space.legs(); ++k)
    x = compose(x, space.is_left_leg(k) ? left_mult(space, u, k) : right_mult(space, us, k));
  return x;
}

struct RelativeGapReport {
  int p = 0, q = 0, N = 0;
  std::size_t generated = 0;
  std::size_t fixed_product = 0;
  double gap = 0.0;
  std::size_t samples = 0;
  std::vector<std::pair<std::size_t, std::size_t>> sample_history;  // (samples, dimension)
};

/// Generated dimension of {𝔩(u)^⊗p ⊗ 𝔯(u*)^⊗q} from Haar samples, doubling the
/// sample count from `budget` until the dimension is stable over two doublings.
inline RelativeGapReport relative_gap(int p, int q, int N, std::size_t budget = 4, std::uint64_t seed = 0,
                                      std::size_t max_samples = 256) {
  const ModelSpace space(N, p, q);
  if (space.dimension() > kDenseCap)
    throw resource_error("relative_gap: dimension " + std::to_string(space.dimension()) + " exceeds dense cap");
  if (budget < 1) throw argument_error("relative_gap: budget must be positive");
  Rng rng(derive_seed(seed, "relative-gap"));
  std::vector<Matrix> gens;
  RelativeGapReport r;
  r.p = p;
  r.q = q;
  r.N = N;
  std::size_t target = budget;
  while (true) {
    while (gens.size() < target) gens.push_back(to_dense(mixed_tensor_unitary(space, haar_unitary(N, rng))).matrix);
    const auto g = generated_algebra_dim(gens, static_cast<Eigen::Index>(space.dimension()), derive_seed(seed, target));
    r.sample_history.emplace_back(target, g.dimension);
    const std::size_t h = r.sample_history.size();
    if (h >= 3 && r.sample_history[h - 1].second == r.sample_history[h - 2].second &&
        r.sample_history[h - 2].second == r.sample_history[h - 3].second)
      break;
    if (target * 2 > max_samples) throw numeric_error("relative_gap: generated dimension did not stabilize");
    target *= 2;
  }
  r.generated = r.sample_history.back().second;
  r.samples = r.sample_history.back().first;
  r.fixed_product = static_cast<std::size_t>((p ? fixed_point_dimension(p, N) : 1) * (q ? fixed_point_dimension(q, N) : 1));
  r.gap = (static_cast<double>(r.fixed_product) - static_cast<double>(r.generated)) / static_cast<double>(r.fixed_product);
  return r;
}

/// Clock-and-shift unitaries X^a Z^b, a,b < N; the first is the identity.
inline std::vector<Matrix> weyl_basis(int N) {
  Matrix X = Matrix::Zero(N, N), Z = Matrix::Zero(N, N);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < N; ++i) {
    X((i + 1) % N, i) = 1.0;
    Z(i, i) = std::polar(1.0, 2.0 * pi * i / N);
  }
  std::vector<Matrix> out;
  Matrix xa = Matrix::Identity(N, N);
  for (int a = 0; a < N; ++a) {
    Matrix zb = Matrix::Identity(N, N);
    for (int b = 0; b < N; ++b) {
      out.push_back(xa * zb);
      zb = zb * Z;
    }
    xa = xa * X;
  }
  return out;
}

struct SpanGrowthReport {
  int p = 0, N = 0;
  std::vector<std::size_t> cumulative;  // dim L_r, r = 0, 1, ...
  std::vector<std::size_t> predicted;   // Σ_{j≤r} C(N²+j−2, j)
  std::size_t cyclic_dimension = 0;
  std::size_t fixed_point_dimension = 0;
  std::size_t generated_dimension = 0;
};

/// L_0 = span{ξ_I}, L_r = L_{r−1} + Σ_l t_plus(b_l) L_{r−1}, until stable.
inline SpanGrowthReport span_growth_check(int p, int N, std::uint64_t seed = 0) {
  const ModelSpace space(N, p, 0);
  if (space.dimension() > kDenseCap)
    throw resource_error("span_growth_check: dimension " + std::to_string(space.dimension()) + " exceeds dense cap");
  const auto basis = weyl_basis(N);
  std::vector<StructuredOperator> ops;
  for (const auto& b : basis) ops.push_back(t_plus(space, b));

  SpanGrowthReport r;
  r.p = p;
  r.N = N;
  std::vector<Vector> span;  // orthonormal
  auto add = [&](Vector v) {
    const double n0 = v.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : span) v -= b.dot(v) * b;
    if (v.norm() <= kRankThreshold * n0) return false;
    span.push_back(v.normalized());
    return true;
  };
  add(identity_vector(space));
  r.cumulative.push_back(span.size());
  std::size_t frontier_begin = 0;
  while (true) {
    const std::size_t frontier_end = span.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i)
      for (const auto& op : ops) add(swlab::apply(op, span[i]));
    frontier_begin = frontier_end;
    if (span.size() == r.cumulative.back()) break;
    r.cumulative.push_back(span.size());
  }
  for (std::size_t round = 0; round < r.cumulative.size(); ++round) {
    std::int64_t s = 0;
    for (std::size_t j = 0; j <= round; ++j) s += binomial(static_cast<std::int64_t>(N) * N + j - 2, j);
    r.predicted.push_back(static_cast<std::size_t>(s));
  }
  r.cyclic_dimension = span.size();
  r.fixed_point_dimension = static_cast<std::size_t>(fixed_point_dimension(p, N));
  std::vector<Matrix> gens;
  for (const auto& op : ops) gens.push_back(to_dense(op).matrix);
  r.generated_dimension = generated_algebra_dim(gens, static_cast<Eigen::Index>(space.dimension()), seed).dimension;
  return r;
}

} // namespace swlab
