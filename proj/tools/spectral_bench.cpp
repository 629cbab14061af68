#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "spectral/bench.hpp"
#include "spectral/errors.hpp"
#include "spectral/instance_io.hpp"
#include "spectral/instances.hpp"

namespace fs = std::filesystem;
using namespace spectral;

namespace {

std::string cell_stem(bench::Algorithm alg, const bench::Cell& c, std::uint64_t seed) {
  char buf[160];
  switch (alg) {
    case bench::Algorithm::psv:
      std::snprintf(buf, sizeof buf, "psv_n%zu_d%zu_eps%g_s%llu", c.n, c.d, *c.epsilon,
                    static_cast<unsigned long long>(seed));
      break;
    case bench::Algorithm::tdecomp:
      std::snprintf(buf, sizeof buf, "tdecomp_d%zu_n%zu_s%llu", c.d, c.n, static_cast<unsigned long long>(seed));
      break;
    case bench::Algorithm::tpca:
      std::snprintf(buf, sizeof buf, "tpca_d%zu_tau%g_s%llu", c.d, *c.tau, static_cast<unsigned long long>(seed));
      break;
  }
  return buf;
}

Instance make_instance(const bench::ExperimentConfig& cfg, const bench::Cell& c, std::uint64_t seed) {
  switch (cfg.algorithm) {
    case bench::Algorithm::psv: return gen_planted_sparse(c.n, c.d, *c.epsilon, seed, cfg.basis_mode);
    case bench::Algorithm::tdecomp: return gen_overcomplete(c.d, c.n, seed);
    case bench::Algorithm::tpca: return gen_spiked(c.d, *c.tau, seed);
  }
  throw ArgumentError("unknown algorithm");
}

int cmd_gen(const bench::ExperimentConfig& cfg, const std::string& out_dir, bool as_json) {
  std::vector<bench::SkippedCell> skipped;
  const auto cells = bench::expand_grid(cfg, skipped);
  for (const auto& s : skipped) std::cerr << "skipping cell n=" << s.cell.n << " d=" << s.cell.d << ": " << s.reason << '\n';
  fs::create_directories(out_dir);
  std::size_t written = 0;
  for (const auto& cell : cells)
    for (auto seed : cfg.seeds) {
      const fs::path path = fs::path(out_dir) / (cell_stem(cfg.algorithm, cell, seed) + (as_json ? ".json" : ".spxi"));
      save_instance(path.string(), make_instance(cfg, cell, seed), as_json);
      ++written;
    }
  std::cerr << written << " instance files in " << out_dir << '\n';
  return 0;
}

int cmd_summarize(const std::string& report, const std::string& out, const std::string& format) {
  std::ifstream in(report, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open report '" << report << "'\n";
    return 2;
  }
  const bench::Summary summary = bench::summarize(in);
  if (summary.cells.empty()) std::cerr << "warning: report contains no trial rows\n";
  if (summary.malformed_rows) std::cerr << "warning: " << summary.malformed_rows << " malformed rows skipped\n";
  std::ofstream file;
  if (!out.empty()) {
    file.open(out, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot write '" << out << "'\n";
      return 2;
    }
  }
  std::ostream& dst = out.empty() ? std::cout : file;
  if (format == "json")
    dst << bench::summary_to_json(summary).dump(1) << '\n';
  else
    bench::write_summary_csv(dst, summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral recovery benchmarks: planted sparse vector, overcomplete tensor decomposition, tensor PCA"};
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  unsigned workers = 0;

  auto* gen = app.add_subcommand("gen", "Write one instance file per grid cell and seed");
  gen->add_option("--config", config_path, "Experiment config (JSON)")->required();
  gen->add_option("--out", out_path, "Output directory")->required();
  gen->add_option("--format", format, "Instance encoding (default binary)")->check(CLI::IsMember({"binary", "json"}));

  auto* run = app.add_subcommand("run", "Run every grid cell for every seed");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_path, "Result file (overrides the config's output)");
  run->add_option("--workers", workers, "Worker threads (default: available parallelism)")
      ->check(CLI::PositiveNumber);
  run->add_option("--format", format, "Result format")->check(CLI::IsMember({"csv", "json"}));

  std::string report_path;
  auto* summarize = app.add_subcommand("summarize", "Aggregate a result file per grid cell");
  summarize->add_option("report", report_path, "Result file (CSV or JSON)")->required();
  summarize->add_option("--out", out_path, "Write the table here instead of stdout");
  summarize->add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (summarize->parsed()) return cmd_summarize(report_path, out_path, format);

    bench::ExperimentConfig cfg = bench::load_config(config_path);
    if (workers) cfg.workers = workers;
    if (gen->parsed()) return cmd_gen(cfg, out_path, format == "json");

    if (format == "json") cfg.format = bench::OutputFormat::json;
    if (format == "csv") cfg.format = bench::OutputFormat::csv;
    if (!out_path.empty()) cfg.output = out_path;
    return bench::run(cfg, std::cerr);
  } catch (const bench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
