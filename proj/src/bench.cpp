#include "spectral/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "spectral/errors.hpp"
#include "spectral/oracle.hpp"
#include "spectral/overcomplete_decomp.hpp"
#include "spectral/planted_sparse.hpp"
#include "spectral/random.hpp"
#include "spectral/tensor_pca.hpp"

namespace spectral::bench {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kPowerSeedIndex = 1;
constexpr std::uint64_t kRunSeedIndex = 2;
constexpr double kMatchCosine = 0.9;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

// ---- config parsing ------------------------------------------------------

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

template <typename T>
std::vector<T> number_list(const json& grid, const char* key, const std::string& path, bool required) {
  const json* node = find(grid, key);
  std::vector<T> out;
  if (!node) {
    if (required) throw ConfigError(path + "." + key, "required list is missing");
    return out;
  }
  if (!node->is_array()) throw ConfigError(path + "." + key, "expected a list of numbers");
  for (std::size_t i = 0; i < node->size(); ++i) {
    const json& v = (*node)[i];
    const std::string where = path + "." + key + "[" + std::to_string(i) + "]";
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned()) throw ConfigError(where, "expected a non-negative integer");
    } else {
      if (!v.is_number()) throw ConfigError(where, "expected a number");
      if (!std::isfinite(v.get<double>())) throw ConfigError(where, "expected a finite number");
    }
    out.push_back(v.get<T>());
  }
  if (required && out.empty()) throw ConfigError(path + "." + key, "list must not be empty");
  return out;
}

template <typename T>
T scalar(const json& obj, const char* key, const std::string& path, T fallback) {
  const json* node = find(obj, key);
  if (!node) return fallback;
  const std::string where = path.empty() ? std::string(key) : path + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!node->is_boolean()) throw ConfigError(where, "expected a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!node->is_number_integer()) throw ConfigError(where, "expected an integer");
    if (node->is_number_integer() && node->get<long long>() < 0 && std::is_unsigned_v<T>)
      throw ConfigError(where, "expected a non-negative integer");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!node->is_number()) throw ConfigError(where, "expected a number");
  } else {
    if (!node->is_string()) throw ConfigError(where, "expected a string");
  }
  return node->get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
  }
}

// ---- CSV ------------------------------------------------------------------

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::optional<std::vector<std::string>> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(cur));
  return fields;
}

constexpr const char* kColumns[] = {"algorithm", "n",           "d",        "epsilon",     "tau",        "kappa",
                                    "seed",      "status",      "success",  "correlation", "min_correlation",
                                    "matched",   "attempts",    "power_iters", "converged", "gap_ratio",
                                    "message",   "ms_generate", "ms_build", "ms_iterate",  "ms_extract"};
constexpr std::size_t kColumnCount = std::size(kColumns);

std::vector<std::string> row_fields(const TrialRow& r) {
  return {to_string(r.algorithm),
          r.cell.n ? std::to_string(r.cell.n) : std::string(),
          std::to_string(r.cell.d),
          opt_num(r.cell.epsilon),
          opt_num(r.cell.tau),
          opt_num(r.cell.kappa),
          std::to_string(r.seed),
          r.error ? "error" : "ok",
          r.success ? "1" : "0",
          num(r.correlation),
          num(r.min_correlation),
          std::to_string(r.matched),
          std::to_string(r.attempts),
          std::to_string(r.power_iters),
          r.converged ? "1" : "0",
          num(r.gap_ratio),
          r.message,
          num(r.ms_generate),
          num(r.ms_build),
          num(r.ms_iterate),
          num(r.ms_extract)};
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::psv: return "psv";
    case Algorithm::tdecomp: return "tdecomp";
    case Algorithm::tpca: return "tpca";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "psv") return Algorithm::psv;
  if (name == "tdecomp") return Algorithm::tdecomp;
  if (name == "tpca") return Algorithm::tpca;
  throw ConfigError("algorithm", "unknown algorithm '" + name + "' (expected psv|tdecomp|tpca)");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("(root)", "config must be a JSON object");
  reject_unknown(doc, {"algorithm", "grid", "seeds", "power", "basis_mode", "decomp", "workers", "output", "format"}, "");
  ExperimentConfig cfg;
  const json* alg = find(doc, "algorithm");
  if (!alg || !alg->is_string()) throw ConfigError("algorithm", "required string is missing");
  cfg.algorithm = algorithm_from_string(alg->get<std::string>());

  const json* grid = find(doc, "grid");
  if (!grid || !grid->is_object()) throw ConfigError("grid", "required object is missing");
  switch (cfg.algorithm) {
    case Algorithm::psv:
      reject_unknown(*grid, {"n", "d", "epsilon"}, "grid");
      cfg.n_values = number_list<std::size_t>(*grid, "n", "grid", true);
      cfg.d_values = number_list<std::size_t>(*grid, "d", "grid", true);
      cfg.epsilon_values = number_list<double>(*grid, "epsilon", "grid", true);
      break;
    case Algorithm::tdecomp:
      reject_unknown(*grid, {"n", "d", "kappa"}, "grid");
      cfg.n_values = number_list<std::size_t>(*grid, "n", "grid", true);
      cfg.d_values = number_list<std::size_t>(*grid, "d", "grid", true);
      cfg.kappa_values = number_list<double>(*grid, "kappa", "grid", false);
      if (cfg.kappa_values.empty()) cfg.kappa_values = {1.0};
      break;
    case Algorithm::tpca:
      reject_unknown(*grid, {"d", "tau", "tau_scale"}, "grid");
      cfg.d_values = number_list<std::size_t>(*grid, "d", "grid", true);
      cfg.tau_values = number_list<double>(*grid, "tau", "grid", false);
      cfg.tau_scales = number_list<double>(*grid, "tau_scale", "grid", false);
      if (cfg.tau_values.empty() && cfg.tau_scales.empty())
        throw ConfigError("grid.tau", "tpca needs a non-empty tau or tau_scale list");
      break;
  }

  const json* seeds = find(doc, "seeds");
  if (!seeds) throw ConfigError("seeds", "required field is missing");
  if (seeds->is_array()) {
    json wrapper{{"list", *seeds}};
    cfg.seeds = number_list<std::uint64_t>(wrapper, "list", "seeds", true);
  } else if (seeds->is_object()) {
    reject_unknown(*seeds, {"base", "count"}, "seeds");
    const auto base = scalar<std::uint64_t>(*seeds, "base", "seeds", 0);
    const auto count = scalar<std::uint64_t>(*seeds, "count", "seeds", 0);
    if (count == 0) throw ConfigError("seeds.count", "must be positive");
    for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(base + i);
  } else {
    throw ConfigError("seeds", "expected a list or {\"base\", \"count\"}");
  }

  if (const json* power = find(doc, "power")) {
    if (!power->is_object()) throw ConfigError("power", "expected an object");
    reject_unknown(*power, {"max_iters", "rq_tolerance", "seed", "estimate_second"}, "power");
    cfg.power.max_iters = scalar<int>(*power, "max_iters", "power", cfg.power.max_iters);
    cfg.power.rq_tolerance = scalar<double>(*power, "rq_tolerance", "power", cfg.power.rq_tolerance);
    cfg.power.seed = scalar<std::uint64_t>(*power, "seed", "power", 0);
    cfg.power.estimate_second = scalar<bool>(*power, "estimate_second", "power", true);
    if (cfg.power.max_iters < 1) throw ConfigError("power.max_iters", "must be >= 1");
    if (!(cfg.power.rq_tolerance >= 0.0)) throw ConfigError("power.rq_tolerance", "must be >= 0");
  } else if (cfg.algorithm == Algorithm::tdecomp) {
    cfg.power = DecompConfig{}.settings;
  }

  if (const json* mode = find(doc, "basis_mode")) {
    if (!mode->is_string()) throw ConfigError("basis_mode", "expected \"rotated\" or \"good\"");
    try {
      cfg.basis_mode = basis_mode_from_string(mode->get<std::string>());
    } catch (const ArgumentError& e) {
      throw ConfigError("basis_mode", e.what());
    }
  }

  if (const json* dec = find(doc, "decomp")) {
    if (!dec->is_object()) throw ConfigError("decomp", "expected an object");
    reject_unknown(*dec, {"max_attempts", "dedup_cos2", "refine_iters", "time_budget_s"}, "decomp");
    cfg.max_attempts = scalar<std::size_t>(*dec, "max_attempts", "decomp", 0);
    cfg.dedup_cos2 = scalar<double>(*dec, "dedup_cos2", "decomp", 0.5);
    cfg.refine_iters = scalar<int>(*dec, "refine_iters", "decomp", 20);
    cfg.trial_time_budget_s = scalar<double>(*dec, "time_budget_s", "decomp", 0.0);
    if (!(cfg.dedup_cos2 > 0.0 && cfg.dedup_cos2 < 1.0)) throw ConfigError("decomp.dedup_cos2", "must lie in (0, 1)");
    if (cfg.refine_iters < 0) throw ConfigError("decomp.refine_iters", "must be >= 0");
    if (!(cfg.trial_time_budget_s >= 0.0)) throw ConfigError("decomp.time_budget_s", "must be >= 0");
  }

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  cfg.workers = scalar<unsigned>(doc, "workers", "", hw);
  if (cfg.workers < 1) throw ConfigError("workers", "must be >= 1");
  cfg.output = scalar<std::string>(doc, "output", "", "");
  const auto format = scalar<std::string>(doc, "format", "", "csv");
  if (format == "csv")
    cfg.format = OutputFormat::csv;
  else if (format == "json")
    cfg.format = OutputFormat::json;
  else
    throw ConfigError("format", "expected \"csv\" or \"json\"");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError("line " + std::to_string(line), e.what());
  }
  return parse_config(doc);
}

std::vector<Cell> expand_grid(const ExperimentConfig& cfg, std::vector<SkippedCell>& skipped) {
  std::vector<Cell> cells;
  const auto keep = [&](Cell c, const std::string& reason) {
    if (reason.empty())
      cells.push_back(c);
    else
      skipped.push_back({c, reason});
  };
  switch (cfg.algorithm) {
    case Algorithm::psv:
      for (auto n : cfg.n_values)
        for (auto d : cfg.d_values)
          for (double eps : cfg.epsilon_values) {
            std::string why;
            if (d < 1) why = "d must be >= 1";
            else if (d > n) why = "d exceeds n";
            else if (!(eps > 0.0 && eps <= 1.0)) why = "epsilon outside (0, 1]";
            else if (planted_support_size(n, eps) == 0) why = "floor(epsilon*n) is zero";
            keep({n, d, eps, std::nullopt, std::nullopt}, why);
          }
      break;
    case Algorithm::tdecomp:
      for (auto d : cfg.d_values)
        for (auto n : cfg.n_values)
          for (double kappa : cfg.kappa_values) {
            std::string why;
            if (d < 2) why = "d must be >= 2";
            else if (n < 1) why = "n must be >= 1";
            else if (!(kappa > 0.0)) why = "kappa must be positive";
            keep({n, d, std::nullopt, std::nullopt, kappa}, why);
          }
      break;
    case Algorithm::tpca:
      for (auto d : cfg.d_values) {
        std::vector<double> taus = cfg.tau_values;
        for (double s : cfg.tau_scales) taus.push_back(d >= 2 ? tpca_tau(d, s) : s);
        for (double tau : taus) {
          std::string why;
          if (d < 2) why = "d must be >= 2";
          else if (!(tau >= 0.0)) why = "tau must be >= 0";
          keep({0, d, std::nullopt, tau, std::nullopt}, why);
        }
      }
      break;
  }
  return cells;
}

TrialRow run_trial(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t seed) {
  TrialRow row;
  row.algorithm = cfg.algorithm;
  row.cell = cell;
  row.seed = seed;
  PowerIterSettings settings = cfg.power;
  settings.seed = derive_seed(seed ^ cfg.power.seed, kPowerSeedIndex);
  try {
    auto start = Clock::now();
    switch (cfg.algorithm) {
      case Algorithm::psv: {
        const auto inst = gen_planted_sparse(cell.n, cell.d, *cell.epsilon, seed, cfg.basis_mode);
        row.ms_generate = ms_since(start);
        const PsvResult res = recover_sparse_vector(inst.basis, settings, &inst.planted);
        row.correlation = row.min_correlation = *res.correlation_sq;
        row.success = row.correlation >= kPsvSuccessCorrelationSq;
        row.power_iters = static_cast<std::size_t>(res.report.iters_used);
        row.converged = res.report.converged;
        row.gap_ratio = res.report.gap_ratio;
        row.ms_build = res.build_ms;
        row.ms_iterate = res.iterate_ms;
        row.ms_extract = res.extract_ms;
        break;
      }
      case Algorithm::tdecomp: {
        const auto inst = gen_overcomplete(cell.d, cell.n, seed);
        row.ms_generate = ms_since(start);
        DecompConfig dc;
        dc.kappa = *cell.kappa;
        dc.max_attempts = cfg.max_attempts;
        dc.dedup_cos2 = cfg.dedup_cos2;
        dc.refine_iters = cfg.refine_iters;
        dc.settings = settings;
        dc.time_budget_s = cfg.trial_time_budget_s;
        const DecompResult res = decompose_all(inst.tensor, cell.n, dc, derive_seed(seed, kRunSeedIndex), &inst.components);
        std::vector<Vector> truth;
        for (Eigen::Index i = 0; i < inst.components.cols(); ++i) truth.push_back(inst.components.col(i));
        const auto match = oracle::greedy_match(truth, res.components);
        row.matched = match.matched_count(kMatchCosine);
        row.min_correlation = match.min_cosine();
        double total = 0.0;
        for (double c : match.cosines) total += c;
        row.correlation = total / static_cast<double>(match.cosines.size());
        row.success = row.matched == cell.n;
        row.attempts = res.report.attempts_used;
        row.power_iters = res.report.power_iters;
        row.converged = !res.report.exhausted && !res.report.timed_out;
        row.gap_ratio = res.report.accepted_gap_ratios.empty() ? 0.0 : median(res.report.accepted_gap_ratios);
        row.ms_iterate = res.report.iterate_ms;
        row.ms_extract = res.report.extract_ms;
        break;
      }
      case Algorithm::tpca: {
        const auto inst = gen_spiked(cell.d, *cell.tau, seed);
        row.ms_generate = ms_since(start);
        const TpcaResult res = recover_spike(inst.tensor, settings, &inst.spike);
        row.correlation = row.min_correlation = *res.correlation;
        row.success = row.correlation >= kTpcaSuccessCorrelation;
        row.power_iters = static_cast<std::size_t>(res.report.iters_used);
        row.converged = res.report.converged;
        row.gap_ratio = res.report.gap_ratio;
        row.ms_build = res.build_ms;
        row.ms_iterate = res.iterate_ms;
        break;
      }
    }
  } catch (const std::exception& e) {
    row = TrialRow{};
    row.algorithm = cfg.algorithm;
    row.cell = cell;
    row.seed = seed;
    row.error = true;
    row.message = e.what();
  }
  return row;
}

std::vector<TrialRow> run_all(const ExperimentConfig& cfg, const std::vector<Cell>& cells) {
  const std::size_t total = cells.size() * cfg.seeds.size();
  std::vector<TrialRow> rows(total);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++)
      rows[i] = run_trial(cfg, cells[i / cfg.seeds.size()], cfg.seeds[i % cfg.seeds.size()]);
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1u, cfg.workers), std::max<std::size_t>(total, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<TrialRow>& rows) {
  out << kCsvSchema << '\n';
  for (std::size_t i = 0; i < kColumnCount; ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const TrialRow& r : rows) {
    const auto fields = row_fields(r);
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_quote(fields[i]);
    out << '\n';
  }
}

json rows_to_json(const std::vector<TrialRow>& rows) {
  json arr = json::array();
  for (const TrialRow& r : rows) {
    const auto fields = row_fields(r);
    json obj = json::object();
    for (std::size_t i = 0; i < kColumnCount; ++i) obj[kColumns[i]] = fields[i];
    arr.push_back(std::move(obj));
  }
  return {{"schema", std::string(kCsvSchema + 2)}, {"columns", kColumns}, {"rows", std::move(arr)}};
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return std::nan("");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

Summary summarize(std::istream& report) {
  std::vector<std::vector<std::string>> rows;
  Summary summary;
  std::stringstream buffer;
  buffer << report.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error&) {
      ++summary.malformed_rows;
      return summary;
    }
    for (const json& obj : doc.value("rows", json::array())) {
      std::vector<std::string> fields;
      bool ok = obj.is_object();
      for (std::size_t i = 0; ok && i < kColumnCount; ++i) {
        const auto it = obj.find(kColumns[i]);
        ok = it != obj.end() && it->is_string();
        if (ok) fields.push_back(it->get<std::string>());
      }
      if (ok)
        rows.push_back(std::move(fields));
      else
        ++summary.malformed_rows;
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(lines, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (!header_seen && line.rfind("algorithm,", 0) == 0) {
        header_seen = true;
        continue;
      }
      auto fields = split_csv(line);
      if (!fields || fields->size() != kColumnCount) {
        ++summary.malformed_rows;
        continue;
      }
      rows.push_back(std::move(*fields));
    }
  }

  struct Acc {
    CellSummary s;
    std::size_t ok = 0, successes = 0;
    std::vector<double> corr, ms;
  };
  std::vector<Acc> accs;
  std::map<std::string, std::size_t> index;
  for (const auto& f : rows) {
    double corr = 0, b = 0, it = 0, ex = 0;
    const bool is_error = f[7] == "error";
    if ((f[7] != "ok" && !is_error) || (!is_error && (!parse_double(f[9], corr) || !parse_double(f[18], b) ||
                                                      !parse_double(f[19], it) || !parse_double(f[20], ex)))) {
      ++summary.malformed_rows;
      continue;
    }
    const std::string key = f[0] + "," + f[1] + "," + f[2] + "," + f[3] + "," + f[4] + "," + f[5];
    auto [pos, inserted] = index.try_emplace(key, accs.size());
    if (inserted) {
      Acc a;
      a.s = CellSummary{f[0], f[1], f[2], f[3], f[4], f[5]};
      accs.push_back(std::move(a));
    }
    Acc& a = accs[pos->second];
    ++a.s.trials;
    if (is_error) {
      ++a.s.errors;
      continue;
    }
    ++a.ok;
    if (f[8] == "1") ++a.successes;
    a.corr.push_back(corr);
    a.ms.push_back(b + it + ex);
  }
  for (Acc& a : accs) {
    a.s.success_rate = a.ok ? static_cast<double>(a.successes) / static_cast<double>(a.ok) : 0.0;
    a.s.median_correlation = a.ok ? median(a.corr) : std::nan("");
    a.s.p50_ms = a.ok ? quantile(a.ms, 0.5) : std::nan("");
    a.s.p90_ms = a.ok ? quantile(a.ms, 0.9) : std::nan("");
    summary.cells.push_back(std::move(a.s));
  }
  return summary;
}

void write_summary_csv(std::ostream& out, const Summary& s) {
  out << "algorithm,n,d,epsilon,tau,kappa,trials,errors,success_rate,median_correlation,p50_ms,p90_ms\n";
  for (const auto& c : s.cells)
    out << c.algorithm << ',' << c.n << ',' << c.d << ',' << c.epsilon << ',' << c.tau << ',' << c.kappa << ','
        << c.trials << ',' << c.errors << ',' << num(c.success_rate) << ',' << num(c.median_correlation) << ','
        << num(c.p50_ms) << ',' << num(c.p90_ms) << '\n';
}

json summary_to_json(const Summary& s) {
  json cells = json::array();
  for (const auto& c : s.cells)
    cells.push_back({{"algorithm", c.algorithm},
                     {"n", c.n},
                     {"d", c.d},
                     {"epsilon", c.epsilon},
                     {"tau", c.tau},
                     {"kappa", c.kappa},
                     {"trials", c.trials},
                     {"errors", c.errors},
                     {"success_rate", c.success_rate},
                     {"median_correlation", c.median_correlation}});
  return {{"cells", std::move(cells)}, {"malformed_rows", s.malformed_rows}};
}

int run(const ExperimentConfig& cfg, std::ostream& log) {
  std::vector<SkippedCell> skipped;
  const auto cells = expand_grid(cfg, skipped);
  for (const auto& s : skipped)
    log << "skipping cell n=" << s.cell.n << " d=" << s.cell.d << ": " << s.reason << '\n';
  if (cells.empty()) throw ConfigError("grid", "no valid cells after validation");
  if (cfg.output.empty()) throw ConfigError("output", "an output path is required");

  const auto parent = std::filesystem::path(cfg.output).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  const auto rows = run_all(cfg, cells);
  {
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw ConfigError("output", "cannot write '" + cfg.output + "'");
    if (cfg.format == OutputFormat::csv)
      write_csv(out, rows);
    else
      out << rows_to_json(rows).dump(1) << '\n';
  }

  // Aggregate sidecar: per-cell success rates, no timing, so it is as reproducible as the rows.
  std::stringstream csv;
  write_csv(csv, rows);
  const Summary summary = summarize(csv);
  {
    std::ofstream side(cfg.output + ".summary.json", std::ios::binary);
    side << summary_to_json(summary).dump(1) << '\n';
  }
  const bool any_error = std::any_of(rows.begin(), rows.end(), [](const TrialRow& r) { return r.error; });
  log << rows.size() << " trials, " << cells.size() << " cells" << (any_error ? ", some errored" : "") << '\n';
  return any_error ? 3 : 0;
}

}  // namespace spectral::bench
