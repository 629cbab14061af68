#pragma once

// Experiment harness: parameter grids × seeds, deterministic result files.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spectral/instances.hpp"
#include "spectral/tensor_core.hpp"

namespace spectral::bench {

enum class Algorithm { psv, tdecomp, tpca };
enum class OutputFormat { csv, json };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

/// Invalid configuration; `field` is a JSON path such as "grid.n[2]" or "line 4".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::psv;
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> d_values;
  std::vector<double> epsilon_values;
  std::vector<double> tau_values;
  /// τ = scale · d^{3/4} sqrt(ln d), swept after the absolute tau values.
  std::vector<double> tau_scales;
  std::vector<double> kappa_values;
  std::vector<std::uint64_t> seeds;
  PowerIterSettings power;
  BasisMode basis_mode = BasisMode::rotated;
  std::size_t max_attempts = 0;
  double dedup_cos2 = 0.5;
  int refine_iters = 20;
  /// Per-trial wall-clock cap for tdecomp; 0 disables.
  double trial_time_budget_s = 0.0;
  unsigned workers = 1;
  std::string output;
  OutputFormat format = OutputFormat::csv;
};

/// Parses and validates; throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

struct Cell {
  std::size_t n = 0;
  std::size_t d = 0;
  std::optional<double> epsilon;
  std::optional<double> tau;
  std::optional<double> kappa;
};

struct SkippedCell {
  Cell cell;
  std::string reason;
};

/// Grid cells in grid order; cells violating algorithm preconditions go to `skipped`.
std::vector<Cell> expand_grid(const ExperimentConfig& cfg, std::vector<SkippedCell>& skipped);

struct TrialRow {
  Algorithm algorithm = Algorithm::psv;
  Cell cell;
  std::uint64_t seed = 0;
  bool error = false;
  std::string message;
  bool success = false;
  /// psv: ⟨Su,v0⟩²; tpca: ⟨v,v'⟩; tdecomp: mean best |cos| over true components.
  double correlation = 0.0;
  /// tdecomp: minimum greedy-matched |cos|; others: same as correlation.
  double min_correlation = 0.0;
  std::size_t matched = 0;
  std::size_t attempts = 0;
  std::size_t power_iters = 0;
  bool converged = false;
  double gap_ratio = 0.0;
  double ms_generate = 0.0;
  double ms_build = 0.0;
  double ms_iterate = 0.0;
  double ms_extract = 0.0;
};

/// One (cell, seed) trial. Numeric failures become error rows.
TrialRow run_trial(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t seed);

/// All cells × seeds on cfg.workers threads, rows in (grid, seed) order.
std::vector<TrialRow> run_all(const ExperimentConfig& cfg, const std::vector<Cell>& cells);

inline constexpr const char* kCsvSchema = "# spectral-bench results v1";

void write_csv(std::ostream& out, const std::vector<TrialRow>& rows);
nlohmann::json rows_to_json(const std::vector<TrialRow>& rows);

struct CellSummary {
  std::string algorithm;
  std::string n, d, epsilon, tau, kappa;
  std::size_t trials = 0;
  std::size_t errors = 0;
  double success_rate = 0.0;
  double median_correlation = 0.0;
  /// Quantiles of build + iterate + extract milliseconds (linear interpolation).
  double p50_ms = 0.0;
  double p90_ms = 0.0;
};

struct Summary {
  std::vector<CellSummary> cells;
  std::size_t malformed_rows = 0;
};

/// Aggregates a CSV or JSON report, one entry per grid cell in first-appearance order.
Summary summarize(std::istream& report);
void write_summary_csv(std::ostream& out, const Summary& s);
nlohmann::json summary_to_json(const Summary& s);

/// Runs the experiment and writes cfg.output plus `<output>.summary.json`.
/// Returns 0 when every trial completed, 3 when any trial errored.
int run(const ExperimentConfig& cfg, std::ostream& log);

double median(std::vector<double> xs);
double quantile(std::vector<double> xs, double q);

}  // namespace spectral::bench
