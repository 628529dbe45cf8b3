#pragma once

// Haar-distributed unitaries and seeded Monte Carlo averaging of operator-valued
// integrands over U(N).

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

#include "legops.hpp"

namespace swlab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Sub-seed from (master seed, name); FNV-1a over the name, mixed with splitmix64.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(master ^ splitmix64(h));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

/// Complex Ginibre matrix with E|z_ij|^2 = 1.
inline Matrix ginibre(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));
  Matrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = cplx(gauss(rng), gauss(rng));
  return z;
}

/// Haar unitary: QR of a Ginibre matrix with the phases of diag(R) moved into Q.
inline Matrix haar_unitary(int n, Rng& rng) {
  const Matrix z = ginibre(n, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    const double mag = std::abs(d);
    q.col(i) *= (mag > 0.0 ? d / mag : cplx(1.0));
  }
  return q;
}

/// Random Hermitian matrix (GUE-like), not normalized.
inline Matrix random_hermitian(int n, Rng& rng) {
  const Matrix z = ginibre(n, rng);
  return (z + z.adjoint()) / 2.0;
}

inline Matrix random_matrix(int n, Rng& rng) { return ginibre(n, rng); }

struct HaarConfig {
  std::size_t samples = 1;
  std::uint64_t seed = 0;
  int N = 2;
  int workers = 1;
};

struct MonteCarloMean {
  DenseOperator mean;
  /// sqrt(Σ_ij Var(x_ij) / samples): the expected Frobenius error of the mean.
  double frobenius_standard_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Empirical mean of f(u) over Haar-distributed u ∈ U(N), densely accumulated.
///
/// The budget is split across `workers` threads with seeds derived from
/// (seed, worker index); partial sums are reduced in worker order, so the
/// result is bit-identical for a fixed (seed, workers) pair.
inline MonteCarloMean haar_average_mc(const ModelSpace& space, const std::function<StructuredOperator(const Matrix&)>& f,
                                      const HaarConfig& config) {
  if (config.samples < 1) throw argument_error("haar_average_mc: need at least one sample");
  if (config.N != space.N) throw argument_error("haar_average_mc: config N differs from model space N");
  const auto D = static_cast<Eigen::Index>(space.dimension());
  if (space.dimension() > kDenseCap) throw resource_error("haar_average_mc: dense mean exceeds cap");
  const int workers = std::max(1, config.workers);

  struct Partial {
    Matrix sum;
    Eigen::MatrixXd sum_sq;
  };
  std::vector<Partial> partial(workers);
  auto work = [&](int w) {
    const std::size_t base = config.samples / workers;
    const std::size_t count = base + (static_cast<std::size_t>(w) < config.samples % workers ? 1 : 0);
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(w)));
    Partial acc{Matrix::Zero(D, D), Eigen::MatrixXd::Zero(D, D)};
    for (std::size_t i = 0; i < count; ++i) {
      const Matrix u = haar_unitary(space.N, rng);
      const Matrix x = to_dense(f(u)).matrix;
      acc.sum += x;
      acc.sum_sq += x.cwiseAbs2();
    }
    partial[w] = std::move(acc);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  Matrix sum = Matrix::Zero(D, D);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(D, D);
  for (const auto& pt : partial) {
    sum += pt.sum;
    sum_sq += pt.sum_sq;
  }
  const double n = static_cast<double>(config.samples);
  MonteCarloMean out;
  out.mean = DenseOperator{space, sum / n};
  if (config.samples > 1) {
    const Eigen::MatrixXd var = ((sum_sq / n) - out.mean.matrix.cwiseAbs2()) * (n / (n - 1.0));
    out.frobenius_standard_error = std::sqrt(std::max(0.0, var.sum()) / n);
  }
  out.samples = config.samples;
  out.seed = config.seed;
  out.workers = workers;
  return out;
}

} // namespace swlab
