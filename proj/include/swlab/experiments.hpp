#pragma once

// Experiment registry, configuration, seeding and report emission.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "algebra.hpp"
#include "crossed.hpp"
#include "duality.hpp"
#include "haar.hpp"
#include "legops.hpp"
#include "serialize.hpp"
#include "symcomb.hpp"

namespace swlab {

inline constexpr const char* kVersion = "swlab 0.1.0";
inline constexpr const char* kOutDirVariable = "SWLAB_OUT_DIR";

struct ExperimentConfig {
  std::string experiment;
  int N = 2;
  int p = 1;
  int q = 1;
  std::uint64_t seed = 1;
  std::size_t samples = 0;  // 0: the experiment's default budget
  std::optional<double> tolerance;
  bool export_bases = false;
  std::filesystem::path out;
};

struct Check {
  std::string name;
  double measured = 0.0;
  double predicted = 0.0;
  double tolerance = 0.0;
  std::string relation;  // eq: |m−p| ≤ tol; le: m ≤ p + tol; lt: m < p; gt: m > p
  bool pass = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<Check> checks;
  nlohmann::json observations = nlohmann::json::object();
  std::vector<std::string> files;
  double duration_s = 0.0;
  std::string error;

  bool pass() const {
    return error.empty() && !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

namespace detail {

class Recorder {
public:
  explicit Recorder(ExperimentReport& r) : r_(r) {}

  void eq(const std::string& name, double measured, double predicted, double tol) {
    tol = r_.config.tolerance.value_or(tol);
    push(name, measured, predicted, tol, "eq", std::abs(measured - predicted) <= tol);
  }
  void le(const std::string& name, double measured, double bound, double tol = 0.0) {
    tol = r_.config.tolerance.value_or(tol);
    push(name, measured, bound, tol, "le", measured <= bound + tol);
  }
  void lt(const std::string& name, double measured, double bound) { push(name, measured, bound, 0.0, "lt", measured < bound); }
  void gt(const std::string& name, double measured, double bound) { push(name, measured, bound, 0.0, "gt", measured > bound); }
  void count(const std::string& name, std::size_t measured, std::size_t predicted) {
    push(name, static_cast<double>(measured), static_cast<double>(predicted), 0.0, "eq", measured == predicted);
  }
  void truth(const std::string& name, bool ok) { push(name, ok ? 1.0 : 0.0, 1.0, 0.0, "eq", ok); }

  nlohmann::json& observe() { return r_.observations; }
  const ExperimentConfig& config() const { return r_.config; }
  std::uint64_t seed(const std::string& name) const { return derive_seed(r_.config.seed, r_.config.experiment + "|" + name); }

  std::filesystem::path output(const std::string& file) {
    if (r_.config.out.empty()) return {};
    std::filesystem::create_directories(r_.config.out);
    r_.files.push_back(file);
    return r_.config.out / file;
  }

private:
  void push(const std::string& name, double m, double p, double tol, const char* rel, bool ok) {
    r_.checks.push_back(Check{name, m, p, tol, rel, ok});
  }
  ExperimentReport& r_;
};

inline std::string tag(const ExperimentConfig& c) {
  return "N" + std::to_string(c.N) + "-p" + std::to_string(c.p) + "-q" + std::to_string(c.q);
}

inline double snorm(const StructuredOperator& x) { return x.is_zero() ? 0.0 : operator_norm(x); }

// ---------------------------------------------------------------------------

inline void young_check(Recorder& rec) {
  const auto& c = rec.config();
  const ModelSpace space(c.N, c.p, c.q);
  Rng rng(rec.seed("a"));
  for (Side side : {Side::left, Side::right}) {
    const int n = side == Side::left ? space.p : space.q;
    if (n == 0) continue;
    const std::string s = side == Side::left ? "left" : "right";
    const auto parts = enumerate_partitions(n);
    std::vector<StructuredOperator> P;
    for (const auto& l : parts) P.push_back(young_projection(space, l, side));
    const Matrix a = random_matrix(space.N, rng);
    const StructuredOperator t = side == Side::left ? t_plus(space, a) : t_minus(space, a);
    double sa = 0, idem = 0, orth = 0, comm = 0;
    StructuredOperator total = StructuredOperator::zero(space);
    for (std::size_t i = 0; i < P.size(); ++i) {
      sa = std::max(sa, snorm(P[i] - adjoint(P[i])));
      idem = std::max(idem, snorm(compose(P[i], P[i]) - P[i]));
      comm = std::max(comm, snorm(commutator(P[i], t)));
      for (std::size_t j = i + 1; j < P.size(); ++j) orth = std::max(orth, snorm(compose(P[i], P[j])));
      total = total + P[i];
    }
    rec.eq(s + "-self-adjoint", sa, 0.0, 1e-10);
    rec.eq(s + "-idempotent", idem, 0.0, 1e-10);
    rec.eq(s + "-orthogonal", orth, 0.0, 1e-10);
    rec.eq(s + "-sum-identity", snorm(total - StructuredOperator::identity(space)), 0.0, 1e-10);
    rec.eq(s + "-commutes-with-t", comm, 0.0, 1e-10);
    // rank of the symmetric projection: dim Sym^n(C^{N²}) times the untouched legs
    const double D = static_cast<double>(space.dimension());
    const double rank = normalized_trace(P.front()).real() * D;
    const double other = static_cast<double>(ipow(space.leg_dim(), space.legs() - n));
    rec.eq(s + "-symmetric-rank", rank, static_cast<double>(fixed_point_dimension(n, space.N)) * other, 1e-6);
  }
}

inline void haar_relations(Recorder& rec) {
  const auto& c = rec.config();
  const ModelSpace space(c.N, c.p, c.q);
  if (space.legs() < 2) throw argument_error("haar-relations: need at least two legs");
  const double N = space.N;
  const StructuredOperator I = StructuredOperator::identity(space);
  struct Case {
    PairMode mode;
    int k, j;
  };
  std::vector<Case> cases;
  if (space.p >= 2) cases.push_back({PairMode::ll, 0, 1});
  if (space.q >= 2) cases.push_back({PairMode::rr, space.p, space.p + 1});
  if (space.p >= 1 && space.q >= 1) cases.push_back({PairMode::lr, 0, space.p});
  for (const auto& cs : cases) {
    const std::string m = to_string(cs.mode);
    const StructuredOperator T = haar_pair_average_exact(space, cs.k, cs.j, cs.mode);
    const StructuredOperator T2 = compose(T, T);
    if (cs.mode == PairMode::lr) {
      rec.eq("lr-self-adjoint", snorm(adjoint(T) - T), 0.0, 1e-12);
      rec.eq("lr-square-equals-inverse-N-times-self", snorm(T2 - cplx(1.0 / N) * T), 0.0, 1e-12);
      rec.observe()["lr-square-minus-self-norm"] = snorm(T2 - T);
      rec.observe()["lr-norm"] = snorm(T);
    } else {
      rec.eq(m + "-square-equals-inverse-N2-identity", snorm(T2 - cplx(1.0 / (N * N)) * I), 0.0, 1e-12);
    }
    if (space.dimension() <= kDenseCap) {
      const HaarConfig hc{c.samples, rec.seed("mc-" + m), space.N, 1};
      const auto mc = haar_average_mc(space, [&](const Matrix& u) { return haar_pair_integrand(space, cs.k, cs.j, cs.mode, u); }, hc);
      const double err = (mc.mean.matrix - to_dense(T).matrix).norm();
      rec.le(m + "-monte-carlo-within-3se", err, 3.0 * mc.frobenius_standard_error);
    }
  }
  if (space.dimension() <= kDenseCap) {
    Rng rng(rec.seed("conj"));
    const Matrix a = random_matrix(space.N, rng);
    const HaarConfig hc{c.samples, rec.seed("mc-conj"), space.N, 1};
    const auto mc = haar_average_mc(space, [&](const Matrix& u) { return left_mult(space, u * a * u.adjoint(), 0); }, hc);
    const Matrix exact = to_dense(left_mult(space, normalized_trace(a) * Matrix::Identity(space.N, space.N), 0)).matrix;
    rec.le("conjugation-average-monte-carlo-within-3se", (mc.mean.matrix - exact).norm(), 3.0 * mc.frobenius_standard_error);
  }
  rec.observe()["workers"] = 1;
}

inline Matrix unit_hermitian(int N, Rng& rng) {
  Matrix a = random_hermitian(N, rng);
  return a / spectral_norm(a);
}

inline void decay_series(Recorder& rec, bool identity_input) {
  const auto& c = rec.config();
  Rng rng(rec.seed("a"));
  std::vector<double> norms, vec;
  nlohmann::json rows = nlohmann::json::array();
  for (int N : {c.N, 2 * c.N, 4 * c.N}) {
    const ModelSpace space(N, c.p, c.q);
    const Matrix a = identity_input ? Matrix(Matrix::Identity(N, N)) : unit_hermitian(N, rng);
    const auto r = limit_formula_check(space, a);
    norms.push_back(r.residual_norm);
    vec.push_back(r.identity_vector_residual);
    rec.le("residual-bound-N" + std::to_string(N), r.residual_norm, r.bound);
    rows.push_back({{"N", N}, {"residual_norm", r.residual_norm}, {"bound", r.bound}, {"literal_residual_norm", r.literal_residual_norm},
                    {"identity_vector_residual", r.identity_vector_residual}});
  }
  for (std::size_t i = 1; i < norms.size(); ++i) {
    const std::string span = "N" + std::to_string(c.N << (i - 1)) + "-to-N" + std::to_string(c.N << i);
    const double ratio = norms[i - 1] > 0 ? norms[i] / norms[i - 1] : 0.0;
    rec.eq("decay-ratio-" + span, ratio, 0.5, 0.1);
    rec.observe()["identity-vector-ratio-" + span] = vec[i - 1] > 0 ? vec[i] / vec[i - 1] : 0.0;
  }
  rec.observe()["series"] = rows;
}

inline void sigma_decay(Recorder& rec) { decay_series(rec, false); }

inline void limit_formula(Recorder& rec) {
  decay_series(rec, true);
  const auto& c = rec.config();
  const ModelSpace one(c.N, 1, 0);
  Rng rng(rec.seed("single-leg"));
  rec.eq("single-left-leg-exact", limit_formula_check(one, random_matrix(c.N, rng)).residual_norm, 0.0, 1e-10);
}

inline void cond_expectation(Recorder& rec) {
  const auto& c = rec.config();
  int levels = 0;
  while (((c.N >> levels) & 1) == 0) ++levels;
  if (levels == 0) throw argument_error("cond-expectation: N must be even");
  const SubfactorTower tower(levels, c.N >> levels);
  Rng rng(rec.seed("tower"));
  const int N = c.N;
  for (int k = 1; k <= std::min(levels, 2); ++k) {
    const std::string s = "-k" + std::to_string(k);
    const int n = tower.block(k), K = N / n;
    const Matrix In = Matrix::Identity(n, n), IK = Matrix::Identity(K, K);
    const Matrix a = random_matrix(N, rng);
    const Matrix x = kron(In, random_matrix(K, rng)), y = kron(In, random_matrix(K, rng));
    const Matrix r = random_matrix(n, rng);
    const Matrix ea = conditional_expectation(tower, k, a);
    rec.eq("trace-preserved" + s, std::abs(normalized_trace(ea) - normalized_trace(a)), 0.0, 1e-10);
    rec.eq("module-property" + s, spectral_norm(conditional_expectation(tower, k, x * a * y) - x * ea * y), 0.0, 1e-10);
    const Matrix r0 = kron(r, IK);
    rec.eq("scalar-on-r0" + s,
           spectral_norm(conditional_expectation(tower, k, r0) - normalized_trace(r0) * Matrix::Identity(N, N)), 0.0, 1e-10);
    rec.eq("fixes-n0" + s, spectral_norm(conditional_expectation(tower, k, x) - x), 0.0, 1e-10);
    rec.eq("idempotent" + s, spectral_norm(conditional_expectation(tower, k, ea) - ea), 0.0, 1e-10);
    const Matrix b = random_matrix(N, rng);
    const Matrix pos = conditional_expectation(tower, k, b * b.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es((pos + pos.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    rec.le("positive" + s, -es.eigenvalues().minCoeff(), 0.0, 1e-10);
    if (k + 1 <= levels) {
      const Matrix e2 = conditional_expectation(tower, k + 1, a);
      rec.eq("decreasing-ranges" + s, spectral_norm(conditional_expectation(tower, k, e2) - e2), 0.0, 1e-10);
    }
  }
}

inline void commutant_dims(Recorder& rec) {
  const auto& c = rec.config();
  for (Side side : {Side::left, Side::right}) {
    const int n = side == Side::left ? c.p : c.q;
    if (n == 0) continue;
    const std::string s = side == Side::left ? "left" : "right";
    const ModelSpace space = side == Side::left ? ModelSpace(c.N, n, 0) : ModelSpace(c.N, 0, n);
    std::vector<Matrix> gens;
    for (const auto& b : weyl_basis(c.N)) gens.push_back(to_dense(side == Side::left ? t_plus(space, b) : t_minus(space, b)).matrix);
    const auto g = generated_algebra_dim(gens, static_cast<Eigen::Index>(space.dimension()), rec.seed(s));
    const auto fixed = static_cast<std::size_t>(fixed_point_dimension(n, c.N));
    rec.count(s + "-generated-dimension", g.dimension, fixed);
    rec.count(s + "-fixed-point-basis-dimension", fixed_point_basis(n, c.N, side).dimension, fixed);
    rec.observe()[s + "-commutant-dimension"] = g.commutant_dimension;
    if (c.export_bases) {
      const auto path = rec.output("commutant-dims-" + tag(c) + "-" + s + "-basis");
      if (!path.empty()) save_dense(path, space, g.basis.elements);
    }
  }
}

inline void span_growth(Recorder& rec) {
  const auto& c = rec.config();
  const auto r = span_growth_check(c.p, c.N, rec.seed("closure"));
  for (std::size_t i = 0; i < r.cumulative.size(); ++i)
    rec.count("cumulative-dimension-round" + std::to_string(i), r.cumulative[i], r.predicted[i]);
  rec.count("cyclic-equals-fixed-point", r.cyclic_dimension, r.fixed_point_dimension);
  rec.count("generated-equals-fixed-point", r.generated_dimension, r.fixed_point_dimension);
}

inline void relative_gap_series(Recorder& rec) {
  const auto& c = rec.config();
  std::vector<double> gaps;
  nlohmann::json rows = nlohmann::json::array();
  for (int N = 2; N <= c.N; ++N) {
    const auto r = relative_gap(c.p, c.q, N, 4, rec.seed("N" + std::to_string(N)));
    const std::string s = "-N" + std::to_string(N);
    if (c.p == 1 && c.q == 1) rec.count("generated-dimension" + s, r.generated, static_cast<std::size_t>(N * N * N * N - 2 * N * N + 2));
    rec.count("fixed-product-dimension" + s, r.fixed_product,
              static_cast<std::size_t>((c.p ? fixed_point_dimension(c.p, N) : 1) * (c.q ? fixed_point_dimension(c.q, N) : 1)));
    if (!gaps.empty()) rec.lt("gap-decreasing-N" + std::to_string(N - 1) + "-to-N" + std::to_string(N), r.gap, gaps.back());
    gaps.push_back(r.gap);
    rows.push_back({{"N", N}, {"generated", r.generated}, {"fixed_product", r.fixed_product}, {"gap", r.gap}, {"samples", r.samples}});
  }
  rec.observe()["series"] = rows;
}

inline void crossed_center(Recorder& rec) {
  const auto& c = rec.config();
  const ModelSpace space(c.N, c.p, c.q);
  const auto r = center_basis(space, rec.seed("center"));
  rec.count("center-dimension-equals-class-count", r.center_dimension, r.conjugacy_classes);
  rec.gt("tau-hat-faithful-on-center", r.tau_gram_min_eigenvalue, 0.0);
  rec.observe()["center-dimension"] = r.center_dimension;
  rec.observe()["group-order"] = r.group_order;
  const auto trivial = center_basis(ModelSpace(c.N, 1, 0), rec.seed("trivial"));
  rec.count("trivial-group-center-dimension", trivial.center_dimension, 1);

  const CrossedSetting cs(space);
  Rng rng(rec.seed("tau"));
  auto random_crossed = [&] {
    CrossedOperator x;
    for (const auto& g : cs.group()) x.blocks.emplace(g, to_dense(random_f_element(space, rng)).matrix);
    return x;
  };
  const CrossedOperator x = random_crossed(), y = random_crossed();
  const Matrix X = to_dense(cs, x), Y = to_dense(cs, y);
  const double scale = X.norm() * Y.norm();
  rec.eq("dense-multiply", (to_dense(cs, crossed_multiply(cs, x, y)) - X * Y).norm() / scale, 0.0, 1e-12);
  rec.eq("dense-adjoint", (to_dense(cs, crossed_adjoint(cs, x)) - X.adjoint()).norm() / X.norm(), 0.0, 1e-12);
  const cplx txy = tau_hat(cs, crossed_multiply(cs, x, y)), tyx = tau_hat(cs, crossed_multiply(cs, y, x));
  rec.eq("tau-hat-tracial", std::abs(txy - tyx) / std::max(1.0, std::abs(txy)), 0.0, 1e-10);
  const Vector xi = crossed_identity_vector(cs);
  rec.eq("tau-hat-vector-state", std::abs(tau_hat(cs, x) - xi.dot(X * xi)), 0.0, 1e-10);
  rec.gt("tau-hat-positive", tau_hat(cs, crossed_multiply(cs, crossed_adjoint(cs, x), x)).real(), 0.0);
}

inline void compression(Recorder& rec) {
  const auto& c = rec.config();
  const ModelSpace space(c.N, c.p, c.q);
  const auto r = compression_check(space, rec.seed("compression"));
  rec.eq("projection", r.projection_error, 0.0, 1e-10);
  rec.eq("lambda-compression", r.lambda_compression_error, 0.0, 1e-10);
  rec.eq("lambda-compressed-identity", r.lambda_compressed_identity, 0.0, 1e-10);
  rec.eq("pi-average", r.pi_average_error, 0.0, 1e-10);
  rec.eq("lambda-prime-compression", r.lambda_prime_error, 0.0, 1e-10);
  rec.eq("pi-prime-compression", r.pi_prime_error, 0.0, 1e-10);
  rec.eq("commutant-relations", r.commutation_error, 0.0, 1e-10);
  rec.count("compressed-dimension-equals-fixed", r.compressed_dimension, r.fixed_dimension);
  const auto v = validate_tau_prime(space);
  rec.eq("tau-prime-on-group-unitaries", v.max_identity_coefficient_error, 0.0, 1e-10);
  rec.eq("tau-prime-preimage-compresses-to-projection", v.max_projection_error, 0.0, 1e-10);
  rec.eq("tau-prime-projection-values", v.max_trace_error, 0.0, 1e-10);
}

inline void trace_table(Recorder& rec) {
  const auto& c = rec.config();
  const auto rows = tau_prime_table(c.p, c.q);
  rec.count("row-count", rows.size(), enumerate_partitions(c.p).size() * enumerate_partitions(c.q).size());
  std::size_t computed_mismatch = 0, stated_mismatch = 0, criterion_mismatch = 0;
  for (const auto& a : rows)
    for (const auto& b : rows) {
      const bool same = a.dim_lambda * a.dim_mu == b.dim_lambda * b.dim_mu;
      computed_mismatch += (a.tau.computed == b.tau.computed) != same;
      stated_mismatch += (a.tau.stated == b.tau.stated) != same;
      criterion_mismatch += equivalence_criterion(a.lambda, a.mu, b.lambda, b.mu) != (a.class_id == b.class_id);
    }
  rec.count("computed-tau-classes-match-dimension-products", computed_mismatch, 0);
  rec.count("stated-tau-classes-match-dimension-products", stated_mismatch, 0);
  rec.count("criterion-matches-class-ids", criterion_mismatch, 0);
  nlohmann::json disc = nlohmann::json::array();
  for (const auto& r : rows)
    if (!r.tau.agree())
      disc.push_back({{"lambda", r.lambda.to_string()}, {"mu", r.mu.to_string()}, {"computed", r.tau.computed}, {"stated", r.tau.stated}});
  rec.observe()["computed-vs-stated-discrepancies"] = disc;
  if (c.p + c.q >= 1 && c.p + c.q <= 3) {
    const auto v = validate_tau_prime(ModelSpace(2, c.p, c.q));
    rec.eq("dense-tau-prime-projection-values-N2", v.max_trace_error, 0.0, 1e-10);
  }
  const auto path = rec.output("trace-table-p" + std::to_string(c.p) + "-q" + std::to_string(c.q) + ".csv");
  if (!path.empty()) std::ofstream(path) << tau_prime_csv(rows);
}

inline void trace_inequality(Recorder& rec) {
  const auto& c = rec.config();
  const int m = c.p + c.q;
  Rng rng(rec.seed("tuples"));
  std::size_t tested = 0;
  for (const auto& s : product_group(c.p, c.q)) {
    if (s.is_identity()) continue;
    std::vector<std::vector<Matrix>> tuples(c.samples);
    for (auto& t : tuples)
      for (int k = 0; k < m; ++k) t.push_back(haar_unitary(c.N, rng));
    const auto r = trace_inequality_check(s, tuples, c.N);
    const std::string name = s.to_string();
    rec.le("haar-tuples-within-inverse-N-" + name, r.max_abs_trace, r.bound, 1e-12);
    rec.le("haar-tuples-within-cycle-bound-" + name, r.max_abs_trace, r.cycle_bound, 1e-12);
    const auto cycles = s.on_legs().cycles();
    const auto moved = std::count_if(cycles.begin(), cycles.end(), [](const auto& cy) { return cy.size() > 1; });
    if (moved == 1 && static_cast<int>(cycles.size()) == m - 1) {
      const std::vector<std::vector<Matrix>> id(1, std::vector<Matrix>(m, Matrix::Identity(c.N, c.N)));
      rec.eq("equality-at-identity-" + name, trace_inequality_check(s, id, c.N).max_abs_trace, r.bound, 1e-12);
    }
    ++tested;
  }
  if (tested == 0) throw argument_error("trace-inequality: S_p x S_q is trivial");
}

inline void spectral_binning_suite(Recorder& rec) {
  const auto& c = rec.config();
  Rng rng(rec.seed("matrices"));
  double worst = 0.0, proj = 0.0;
  for (std::size_t i = 0; i < c.samples; ++i) {
    const int n = 4 + static_cast<int>(i % 13);
    const Matrix A = random_hermitian(n, rng);
    const ModelSpace space(n, 1, 0);
    for (double eps : {0.3, 0.1, 0.03}) {
      const auto b = spectral_binning(A, eps);
      worst = std::max(worst, operator_norm(left_mult(space, A - b.approximation, 0)) / eps);
      Matrix total = Matrix::Zero(n, n);
      for (std::size_t x = 0; x < b.projections.size(); ++x) {
        total += b.projections[x];
        proj = std::max(proj, spectral_norm(b.projections[x] * b.projections[x] - b.projections[x]));
      }
      proj = std::max(proj, spectral_norm(total - Matrix::Identity(n, n)));
    }
  }
  rec.lt("max-error-over-epsilon", worst, 1.0);
  rec.eq("projections-partition-identity", proj, 0.0, 1e-10);
  Eigen::Vector2d d(0.0, 1.0);
  const Matrix D = d.cast<cplx>().asDiagonal();
  rec.eq("diag-0-1-exact", spectral_norm(spectral_binning(D, 0.3).approximation - D), 0.0, 1e-12);
  const Matrix S = 0.7 * Matrix::Identity(5, 5);
  rec.eq("single-eigenvalue-exact", spectral_norm(spectral_binning(S, 0.01).approximation - S), 0.0, 1e-12);
}

} // namespace detail

struct ExperimentInfo {
  std::string name;
  std::string summary;
  ExperimentConfig defaults;
  std::size_t default_samples = 1;
  std::function<void(detail::Recorder&)> run;
};

inline const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> r = [] {
    auto cfg = [](const char* name, int N, int p, int q) {
      ExperimentConfig c;
      c.experiment = name;
      c.N = N;
      c.p = p;
      c.q = q;
      return c;
    };
    return std::vector<ExperimentInfo>{
        {"young-check", "Young projections: self-adjoint, idempotent, orthogonal, complete, commuting", cfg("young-check", 2, 2, 1), 1,
         detail::young_check},
        {"haar-relations", "matrix-unit Haar averages: algebraic relations and Monte Carlo agreement", cfg("haar-relations", 2, 2, 1), 10000,
         detail::haar_relations},
        {"sigma-decay", "operator norm of the averaged cross terms for unit Hermitian a, N, 2N, 4N", cfg("sigma-decay", 2, 1, 1), 1,
         detail::sigma_decay},
        {"limit-formula", "averaged product against T+(a) + T-(E(a)) at a = I, N, 2N, 4N", cfg("limit-formula", 2, 1, 1), 1,
         detail::limit_formula},
        {"cond-expectation", "tower conditional expectations: trace, module, scalar and positivity properties",
         cfg("cond-expectation", 4, 1, 0), 1, detail::cond_expectation},
        {"commutant-dims", "generated algebra of the one-sided derivations against the fixed-point dimension",
         cfg("commutant-dims", 2, 2, 2), 1, detail::commutant_dims},
        {"span-growth", "cyclic span growth from the identity vector", cfg("span-growth", 2, 2, 0), 1, detail::span_growth},
        {"relative-gap", "generated mixed algebra against the fixed-point product for N = 2..N", cfg("relative-gap", 3, 1, 1), 1,
         detail::relative_gap_series},
        {"crossed-center", "center of the finite crossed product and the trace on it", cfg("crossed-center", 2, 2, 0), 1,
         detail::crossed_center},
        {"compression-check", "compression by the averaging projection and the trace on the fixed-point commutant",
         cfg("compression-check", 2, 2, 1), 1, detail::compression},
        {"trace-table", "trace of P^lambda x P^mu on the fixed-point commutant, computed and as stated",
         cfg("trace-table", 2, 3, 0), 1, detail::trace_table},
        {"trace-inequality", "normalized trace of permuted unitary tuples against 1/N", cfg("trace-inequality", 3, 2, 1), 100,
         detail::trace_inequality},
        {"spectral-binning", "spectral binning error for random Hermitian matrices of size 4..16", cfg("spectral-binning", 2, 1, 0), 50,
         detail::spectral_binning_suite},
    };
  }();
  return r;
}

inline const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  throw argument_error("unknown experiment '" + name + "'");
}

inline void validate(const ExperimentConfig& c) {
  find_experiment(c.experiment);
  if (c.N < 2) throw argument_error("N must be at least 2");
  if (c.p < 0 || c.q < 0 || c.p + c.q < 1) throw argument_error("need p, q >= 0 and p + q >= 1");
  if (c.tolerance && !(*c.tolerance >= 0.0)) throw argument_error("tolerance override must be nonnegative");
}

inline nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j{{"experiment", c.experiment}, {"N", c.N}, {"p", c.p}, {"q", c.q}, {"seed", c.seed}, {"samples", c.samples},
                   {"export_bases", c.export_bases}, {"out", c.out.string()}};
  j["tolerance"] = c.tolerance ? nlohmann::json(*c.tolerance) : nlohmann::json(nullptr);
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.experiment = j.at("experiment");
  c.N = j.at("N");
  c.p = j.at("p");
  c.q = j.at("q");
  c.seed = j.at("seed");
  c.samples = j.at("samples");
  c.export_bases = j.value("export_bases", false);
  c.out = j.value("out", std::string());
  if (j.contains("tolerance") && !j["tolerance"].is_null()) c.tolerance = j["tolerance"].get<double>();
  return c;
}

/// Report body without wall-clock duration; deterministic for a fixed config.
inline nlohmann::json report_body(const ExperimentReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"check", c.name}, {"measured", c.measured}, {"predicted", c.predicted}, {"tolerance", c.tolerance},
                      {"relation", c.relation}, {"pass", c.pass}});
  nlohmann::json j{{"config", config_json(r.config)}, {"checks", checks}, {"observations", r.observations},
                   {"files", r.files},   {"pass", r.pass()},     {"version", kVersion}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline nlohmann::json report_json(const ExperimentReport& r) {
  auto j = report_body(r);
  j["duration_s"] = r.duration_s;
  return j;
}

/// One JSON line per check.
inline std::string report_lines(const ExperimentReport& r) {
  std::string out;
  for (const auto& c : r.checks) {
    nlohmann::json j{{"experiment", r.config.experiment}, {"check", c.name},         {"N", r.config.N},
                     {"p", r.config.p},                   {"q", r.config.q},          {"seed", r.config.seed},
                     {"samples", r.config.samples},       {"measured", c.measured},   {"predicted", c.predicted},
                     {"tolerance", c.tolerance},          {"pass", c.pass}};
    out += j.dump() + "\n";
  }
  return out;
}

/// Runs one experiment. Errors other than invalid configuration are captured in the report.
inline ExperimentReport run(ExperimentConfig config) {
  validate(config);
  const auto& info = find_experiment(config.experiment);
  if (config.samples == 0) config.samples = info.default_samples;
  ExperimentReport report;
  report.config = config;
  const auto start = std::chrono::steady_clock::now();
  detail::Recorder rec(report);
  try {
    info.run(rec);
  } catch (const argument_error&) {
    throw;
  } catch (const std::exception& e) {
    report.error = e.what();
  }
  report.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline std::string report_stem(const ExperimentConfig& c) {
  return c.experiment + "-" + detail::tag(c) + "-seed" + std::to_string(c.seed);
}

/// Writes the report file and appends its check lines to reports.jsonl in `dir`.
inline void write_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / (report_stem(r.config) + ".json")) << report_json(r).dump(2) << '\n';
  std::ofstream(dir / "reports.jsonl", std::ios::app) << report_lines(r);
}

enum class Suite { smoke, full };

inline std::vector<ExperimentConfig> suite_configs(Suite suite, std::uint64_t seed = 1) {
  auto make = [&](const char* name, int N, int p, int q) {
    ExperimentConfig c = find_experiment(name).defaults;
    c.N = N;
    c.p = p;
    c.q = q;
    c.seed = seed;
    return c;
  };
  std::vector<ExperimentConfig> out{
      make("young-check", 2, 2, 1),      make("haar-relations", 2, 2, 1),  make("cond-expectation", 2, 1, 0),
      make("commutant-dims", 2, 2, 2),   make("span-growth", 2, 3, 0),     make("crossed-center", 2, 2, 0),
      make("compression-check", 2, 2, 1), make("trace-table", 2, 3, 0),   make("trace-table", 2, 2, 2),
      make("trace-inequality", 2, 2, 1), make("spectral-binning", 2, 1, 0)};
  if (suite == Suite::full) {
    for (auto c : {make("young-check", 3, 2, 1), make("haar-relations", 3, 1, 1), make("cond-expectation", 8, 1, 0),
                   make("commutant-dims", 3, 2, 0), make("span-growth", 3, 2, 0), make("trace-inequality", 3, 2, 1),
                   make("trace-table", 2, 3, 3), make("sigma-decay", 2, 1, 1), make("limit-formula", 2, 1, 1),
                   make("relative-gap", 4, 1, 1)})
      out.push_back(c);
  }
  return out;
}

struct Summary {
  std::vector<ExperimentReport> reports;
  bool pass() const {
    return std::all_of(reports.begin(), reports.end(), [](const ExperimentReport& r) { return r.pass(); });
  }
};

/// Runs the configs in a worker pool; reports come back in input order.
inline Summary run_all(std::vector<ExperimentConfig> configs, int workers = 0) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  Summary s;
  s.reports.resize(configs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < configs.size();) {
      try {
        s.reports[i] = run(configs[i]);
      } catch (const std::exception& e) {
        s.reports[i].config = configs[i];
        s.reports[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return s;
}

inline Summary run_all(Suite suite, std::uint64_t seed = 1, int workers = 0) { return run_all(suite_configs(suite, seed), workers); }

} // namespace swlab
