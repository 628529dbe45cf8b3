#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "swlab/experiments.hpp"

namespace {

std::filesystem::path default_out() {
  if (const char* env = std::getenv(swlab::kOutDirVariable); env && *env) return env;
  return "swlab_out";
}

void print(const swlab::ExperimentReport& r) {
  const auto& c = r.config;
  std::cout << (r.pass() ? "PASS " : "FAIL ") << c.experiment << " N=" << c.N << " p=" << c.p << " q=" << c.q << " seed=" << c.seed
            << " (" << std::fixed << std::setprecision(2) << r.duration_s << " s)\n";
  std::cout << std::defaultfloat << std::setprecision(6);
  for (const auto& k : r.checks)
    std::cout << "  " << (k.pass ? "ok   " : "FAIL ") << k.name << ": measured " << k.measured << ", predicted " << k.predicted << " ("
              << k.relation << ", tol " << k.tolerance << ")\n";
  if (!r.error.empty()) std::cout << "  error: " << r.error << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-N experiments for mixed tensor derivations and their crossed products"};
  app.require_subcommand(1);

  swlab::ExperimentConfig cfg;
  std::string out;
  double tolerance = -1.0;
  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("experiment", cfg.experiment, "experiment name (see list)")->required();
  run->add_option("--n", cfg.N, "leg size N");
  run->add_option("--p", cfg.p, "left legs");
  run->add_option("--q", cfg.q, "right legs");
  run->add_option("--seed", cfg.seed, "master seed");
  run->add_option("--samples", cfg.samples, "sample budget (0: experiment default)");
  run->add_option("--tolerance", tolerance, "override every check tolerance");
  run->add_flag("--export-bases", cfg.export_bases, "write algebra bases in the flat binary format");
  run->add_option("--out", out, "output directory (default $SWLAB_OUT_DIR or ./swlab_out)");

  std::string suite = "smoke";
  std::uint64_t suite_seed = 1;
  int workers = 0;
  auto* all = app.add_subcommand("run-all", "run a suite of experiments");
  all->add_option("--suite", suite, "smoke or full")->check(CLI::IsMember({"smoke", "full"}));
  all->add_option("--seed", suite_seed, "master seed");
  all->add_option("--workers", workers, "worker threads (0: hardware concurrency)");
  all->add_option("--out", out, "output directory");

  app.add_subcommand("list", "list experiments");

  CLI11_PARSE(app, argc, argv);
  const std::filesystem::path dir = out.empty() ? default_out() : std::filesystem::path(out);

  try {
    if (app.got_subcommand("list")) {
      for (const auto& e : swlab::registry())
        std::cout << std::left << std::setw(20) << e.name << " N=" << e.defaults.N << " p=" << e.defaults.p << " q=" << e.defaults.q
                  << "  " << e.summary << "\n";
      return 0;
    }
    if (app.got_subcommand("run")) {
      const auto& info = swlab::find_experiment(cfg.experiment);
      if (run->count("--n") == 0) cfg.N = info.defaults.N;
      if (run->count("--p") == 0) cfg.p = info.defaults.p;
      if (run->count("--q") == 0) cfg.q = info.defaults.q;
      if (tolerance >= 0.0) cfg.tolerance = tolerance;
      cfg.out = dir;
      const auto r = swlab::run(cfg);
      swlab::write_report(r, dir);
      print(r);
      return r.pass() ? 0 : 1;
    }
    auto configs = swlab::suite_configs(suite == "full" ? swlab::Suite::full : swlab::Suite::smoke, suite_seed);
    for (auto& c : configs) c.out = dir;
    const auto summary = swlab::run_all(configs, workers);
    std::size_t passed = 0;
    for (const auto& r : summary.reports) {
      swlab::write_report(r, dir);
      print(r);
      passed += r.pass();
    }
    std::cout << passed << "/" << summary.reports.size() << " experiments passed\n";
    return summary.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
