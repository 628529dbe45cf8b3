#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

#include "swlab/experiments.hpp"

using namespace swlab;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("swlab_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

ExperimentConfig config(const std::string& name, int N, int p, int q, std::uint64_t seed = 3) {
  ExperimentConfig c;
  c.experiment = name;
  c.N = N;
  c.p = p;
  c.q = q;
  c.seed = seed;
  return c;
}

const Check* find_check(const ExperimentReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

} // namespace

TEST(Registry, NamesAndValidation) {
  const std::vector<std::string> expect{"young-check",    "haar-relations", "sigma-decay",       "limit-formula", "cond-expectation",
                                        "commutant-dims", "span-growth",    "relative-gap",      "crossed-center", "compression-check",
                                        "trace-table",    "trace-inequality", "spectral-binning"};
  std::vector<std::string> names;
  for (const auto& e : registry()) names.push_back(e.name);
  EXPECT_EQ(names, expect);
  EXPECT_THROW(run(config("no-such-thing", 2, 1, 1)), argument_error);
  EXPECT_THROW(run(config("young-check", 1, 1, 1)), argument_error);
  EXPECT_THROW(run(config("young-check", 2, 0, 0)), argument_error);
  auto c = config("young-check", 2, 1, 1);
  c.tolerance = -1.0;
  EXPECT_THROW(run(c), argument_error);
}

TEST(Experiments, YoungCheckPasses) {
  const auto r = run(config("young-check", 2, 3, 0));
  EXPECT_TRUE(r.pass()) << report_json(r).dump(2);
  EXPECT_EQ(r.config.samples, 1u);
}

TEST(Experiments, TraceTableWritesCsv) {
  auto c = config("trace-table", 2, 3, 0);
  c.out = scratch("table");
  const auto r = run(c);
  EXPECT_TRUE(r.pass()) << report_json(r).dump(2);
  ASSERT_EQ(r.files.size(), 1u);
  std::ifstream in(c.out / r.files.front());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  // class ids: (3) and (1,1,1) together, (2,1) alone
  EXPECT_EQ(lines[1].back(), lines[3].back());
  EXPECT_NE(lines[1].back(), lines[2].back());
  const auto& disc = r.observations.at("computed-vs-stated-discrepancies");
  ASSERT_EQ(disc.size(), 1u);
  EXPECT_EQ(disc[0].at("lambda"), "(2,1)");
}

TEST(Experiments, DeterministicBody) {
  for (const auto& c : {config("haar-relations", 2, 1, 1), config("trace-inequality", 2, 2, 1), config("crossed-center", 2, 2, 0)}) {
    auto cc = c;
    cc.samples = 500;
    const auto a = report_body(run(cc)).dump(), b = report_body(run(cc)).dump();
    EXPECT_EQ(a, b) << c.experiment;
  }
}

TEST(Experiments, RerunFromEchoedConfig) {
  auto c = config("spectral-binning", 2, 1, 0, 9);
  c.samples = 5;
  const auto r = run(c);
  const auto echoed = config_from_json(report_body(r).at("config"));
  EXPECT_EQ(report_body(run(echoed)).dump(), report_body(r).dump());
}

TEST(Experiments, SeedsAreDerivedPerExperiment) {
  EXPECT_NE(derive_seed(1, "young-check|a"), derive_seed(1, "sigma-decay|a"));
  EXPECT_EQ(derive_seed(1, "young-check|a"), derive_seed(1, "young-check|a"));
  auto a = config("trace-inequality", 2, 2, 0, 1), b = config("trace-inequality", 2, 2, 0, 2);
  a.samples = b.samples = 3;
  EXPECT_NE(report_body(run(a)).at("checks")[0].at("measured"), report_body(run(b)).at("checks")[0].at("measured"));
}

TEST(Experiments, ToleranceOverride) {
  auto c = config("haar-relations", 2, 1, 1);
  c.samples = 200;
  c.tolerance = 1.0;
  const auto r = run(c);
  const auto* k = find_check(r, "lr-square-equals-inverse-N-times-self");
  ASSERT_NE(k, nullptr);
  EXPECT_EQ(k->tolerance, 1.0);
  EXPECT_TRUE(k->pass);
}

TEST(Experiments, KnownFailuresAreReported) {
  auto c = config("haar-relations", 2, 1, 1);
  c.samples = 2000;
  const auto r = run(c);
  EXPECT_FALSE(r.pass());
  const auto* k = find_check(r, "lr-square-equals-inverse-N-times-self");
  ASSERT_NE(k, nullptr);
  EXPECT_FALSE(k->pass);
  EXPECT_NEAR(k->measured, 0.5, 1e-10);
  EXPECT_NEAR(r.observations.at("lr-square-minus-self-norm").get<double>(), 0.0, 1e-12);
  const auto l = run(config("limit-formula", 2, 1, 1));
  EXPECT_FALSE(l.pass());
  EXPECT_TRUE(find_check(l, "residual-bound-N2")->pass);
  EXPECT_FALSE(find_check(l, "residual-bound-N8")->pass);
}

TEST(Experiments, CapViolationIsCapturedWithDimension) {
  const auto r = run(config("crossed-center", 3, 2, 2));
  EXPECT_FALSE(r.pass());
  EXPECT_NE(r.error.find("6561"), std::string::npos) << r.error;
}

TEST(Reports, WriteStaysInsideOutputDirectory) {
  const auto dir = scratch("reports");
  auto c = config("cond-expectation", 4, 1, 0);
  c.out = dir;
  const auto r = run(c);
  write_report(r, dir);
  write_report(r, dir);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    ++files;
    EXPECT_EQ(e.path().parent_path(), dir);
  }
  EXPECT_EQ(files, 2u);
  std::ifstream in(dir / "reports.jsonl");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line); ++lines) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"experiment", "check", "N", "p", "q", "seed", "samples", "measured", "predicted", "tolerance", "pass"})
      EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(lines, 2 * r.checks.size());
}

TEST(Suites, SmokeRunsEverythingAndOnlyKnownChecksFail) {
  const auto s = run_all(Suite::smoke, 1, 2);
  ASSERT_EQ(s.reports.size(), suite_configs(Suite::smoke).size());
  for (const auto& r : s.reports) {
    EXPECT_TRUE(r.error.empty()) << r.config.experiment << ": " << r.error;
    for (const auto& c : r.checks) {
      if (c.pass) continue;
      EXPECT_EQ(c.name, "lr-square-equals-inverse-N-times-self") << r.config.experiment;
    }
  }
  EXPECT_FALSE(s.pass());
  const auto full = suite_configs(Suite::full);
  EXPECT_GT(full.size(), s.reports.size());
  EXPECT_TRUE(std::any_of(full.begin(), full.end(), [](const auto& c) { return c.experiment == "relative-gap" && c.N == 4; }));
}

TEST(Serialization, RoundTripAndLayout) {
  const auto dir = scratch("serialize");
  const ModelSpace s(2, 1, 1);
  Rng rng(51);
  const DenseOperator x{s, to_dense(random_operator(s, 2, rng)).matrix};
  save_dense(dir / "op", x);
  const auto y = load_dense_operator(dir / "op");
  EXPECT_EQ(y.space.N, 2);
  EXPECT_EQ((y.matrix - x.matrix).norm(), 0.0);
  const auto header = nlohmann::json::parse(std::ifstream(dir / "op.json"));
  EXPECT_EQ(header.at("N"), 2);
  EXPECT_EQ(header.at("m"), 2);
  EXPECT_EQ(std::filesystem::file_size(dir / "op.bin"), 16u * 16u * 16u);
  // row-major, real then imaginary
  std::ifstream bin(dir / "op.bin", std::ios::binary);
  double first[4];
  bin.read(reinterpret_cast<char*>(first), sizeof(first));
  EXPECT_EQ(first[0], x.matrix(0, 0).real());
  EXPECT_EQ(first[1], x.matrix(0, 0).imag());
  EXPECT_EQ(first[2], x.matrix(0, 1).real());
  EXPECT_EQ(first[3], x.matrix(0, 1).imag());

  const Vector v = identity_vector(s);
  save_vector(dir / "vec", s, v);
  const auto b = load_dense(dir / "vec");
  ASSERT_EQ(b.items.size(), 1u);
  EXPECT_EQ((b.items[0].col(0) - v).norm(), 0.0);

  std::filesystem::resize_file(dir / "vec.bin", 8);
  EXPECT_THROW(load_dense(dir / "vec"), argument_error);
  EXPECT_THROW(load_dense(dir / "missing"), argument_error);
}

TEST(Serialization, ExportedBasisReloads) {
  auto c = config("commutant-dims", 2, 2, 0);
  c.export_bases = true;
  c.out = scratch("bases");
  const auto r = run(c);
  ASSERT_TRUE(r.pass());
  ASSERT_EQ(r.files.size(), 1u);
  const auto b = load_dense(c.out / r.files.front());
  EXPECT_EQ(b.items.size(), 10u);
  EXPECT_EQ(b.header.rows, 16);
}
