#ifndef VORTEXMF_CLI_HPP
#define VORTEXMF_CLI_HPP

// Run configuration, output files and the three command bodies.
//
// Argument parsing lives in tools/vortexmf.cpp; everything here takes a
// parsed RunConfig and streams so tests can drive the commands in-process.
//
// Exit codes: 0 success, 1 a verification check failed, 2 usage error,
// 3 runtime failure (checkpoint, I/O, numerical).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vortexmf/blocking.hpp"
#include "vortexmf/checkpoint.hpp"
#include "vortexmf/errors.hpp"
#include "vortexmf/json_io.hpp"
#include "vortexmf/oracle.hpp"
#include "vortexmf/sampler.hpp"
#include "vortexmf/thermo.hpp"

namespace vortexmf::cli {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kOutputDirEnv = "VORTEXMF_OUTPUT_DIR";
inline constexpr const char* kDefaultOutputDir = "vortexmf-out";

enum ExitCode : int { ok = 0, check_failed = 1, usage = 2, runtime = 3 };

enum class Mode { thermo, simulate, verify };
enum class OutputFormat { csv, jsonl };
enum class Spacing { linear, log };
enum class SweptVariable { beta_scaled, enthalpy };

inline std::string to_string(Mode m) {
  switch (m) {
  case Mode::thermo: return "thermo";
  case Mode::simulate: return "simulate";
  case Mode::verify: return "verify";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "thermo") return Mode::thermo;
  if (s == "simulate") return Mode::simulate;
  if (s == "verify") return Mode::verify;
  throw UsageError("unknown mode '" + s + "' (expected thermo, simulate or verify)");
}

/// Column order of every machine-readable table. Changing these breaks the
/// golden-file test on purpose.
inline const std::vector<std::string> kThermoColumns = {
    "beta_scaled", "temperature", "r_squared", "free_energy",
    "enthalpy",    "entropy",     "specific_heat", "status"};
inline const std::vector<std::string> kObservableColumns = {
    "sweep", "enthalpy", "self_energy", "interaction_energy", "r_squared"};
inline const std::vector<std::string> kVerifyColumns = {
    "suite",           "check",           "inputs",
    "reference",       "candidate",       "abs_discrepancy",
    "rel_discrepancy", "tolerance_kind",  "tolerance",
    "scale",           "pass"};

inline const std::vector<std::string> kVerifySuites = {
    "rsq-argmin", "disk-log", "derivatives", "appendix-limit"};

struct ThermoSweep {
  double alpha_scaled = 1.0;
  double pressure_scaled = 1.0;
  SweptVariable variable = SweptVariable::beta_scaled;
  double min = 1.0;
  double max = 1.0;
  int count = 1;
  Spacing spacing = Spacing::linear;

  void validate() const {
    if (!(alpha_scaled > 0.0) || !(pressure_scaled > 0.0)) {
      throw UsageError("thermo: alpha_scaled and pressure_scaled must be positive");
    }
    if (count < 1) throw UsageError("thermo.sweep: count must be >= 1");
    if (!std::isfinite(min) || !std::isfinite(max)) {
      throw UsageError("thermo.sweep: min and max must be finite");
    }
    // a single point may be given as min == max
    if (!(min < max) && !(count == 1 && min == max)) {
      throw UsageError("thermo.sweep: min must be < max");
    }
    if (count > 1 && min == max) {
      throw UsageError("thermo.sweep: min == max needs count == 1");
    }
    if (spacing == Spacing::log && !(min > 0.0)) {
      throw UsageError("thermo.sweep: log spacing needs min > 0");
    }
    if (variable == SweptVariable::beta_scaled && !(min > 0.0)) {
      throw UsageError("thermo.sweep: beta_scaled must be positive");
    }
  }

  std::vector<double> grid() const {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      if (count == 1) {
        g.push_back(min);
      } else if (spacing == Spacing::linear) {
        g.push_back(min + (max - min) * i / (count - 1));
      } else {
        const double t = static_cast<double>(i) / (count - 1);
        g.push_back(std::exp(std::log(min) + t * (std::log(max) - std::log(min))));
      }
    }
    if (count > 1) g.back() = max;
    return g;
  }
};

struct SimulateSection {
  SamplerConfig sampler;
  /// Stop after this many sweeps and leave a checkpoint (resume later).
  std::optional<std::int64_t> max_sweeps_this_run;
};

struct VerifySection {
  std::vector<std::string> suites = {"all"};
  double alpha_scaled = 1.0;
  double pressure_scaled = 1.0;
  double beta_scaled = 1.0;
  std::vector<double> beta_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<int> segment_counts = {8, 16, 32, 64, 128};
  std::vector<double> disk_radii = {0.5, 1.0, 2.0};
  std::int64_t disk_samples = 200000;
  /// Multiplies every deterministic and 3-sigma tolerance; a test hook for
  /// checking that failures propagate to the exit status.
  double tolerance_scale = 1.0;

  std::vector<std::string> expanded_suites() const {
    std::vector<std::string> out;
    for (const auto& s : suites) {
      if (s == "all") {
        for (const auto& k : kVerifySuites) out.push_back(k);
        continue;
      }
      if (std::find(kVerifySuites.begin(), kVerifySuites.end(), s) ==
          kVerifySuites.end()) {
        std::string valid = "all";
        for (const auto& k : kVerifySuites) valid += ", " + k;
        throw UsageError("unknown verify suite '" + s + "' (valid: " + valid + ")");
      }
      out.push_back(s);
    }
    return out;
  }
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::optional<Mode> mode;
  std::uint64_t seed = 1;
  OutputFormat format = OutputFormat::csv;
  std::optional<std::string> output_dir;
  ThermoSweep thermo;
  SimulateSection simulate;
  VerifySection verify;
};

namespace detail {

inline void reject_unknown(const Json& j, std::initializer_list<const char*> known,
                           const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool found = false;
    for (const char* k : known) found = found || it.key() == k;
    if (!found) throw UsageError("unknown key '" + it.key() + "' in " + where);
  }
}

inline ThermoSweep parse_thermo(const Json& j) {
  reject_unknown(j, {"alpha_scaled", "pressure_scaled", "sweep"}, "thermo");
  ThermoSweep t;
  t.alpha_scaled = j.value("alpha_scaled", t.alpha_scaled);
  t.pressure_scaled = j.value("pressure_scaled", t.pressure_scaled);
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    reject_unknown(s, {"variable", "min", "max", "count", "spacing"}, "thermo.sweep");
    const auto var = s.value("variable", std::string("beta_scaled"));
    if (var == "beta_scaled") {
      t.variable = SweptVariable::beta_scaled;
    } else if (var == "enthalpy") {
      t.variable = SweptVariable::enthalpy;
    } else {
      throw UsageError("thermo.sweep.variable must be beta_scaled or enthalpy, got '" +
                       var + "'");
    }
    t.min = s.value("min", t.min);
    t.max = s.value("max", t.max);
    t.count = s.value("count", t.count);
    const auto sp = s.value("spacing", std::string("linear"));
    if (sp == "linear") {
      t.spacing = Spacing::linear;
    } else if (sp == "log") {
      t.spacing = Spacing::log;
    } else {
      throw UsageError("thermo.sweep.spacing must be linear or log, got '" + sp + "'");
    }
  }
  return t;
}

inline SimulateSection parse_simulate(Json j) {
  SimulateSection s;
  if (!j.is_object()) throw UsageError("simulate must be a JSON object");
  if (j.contains("seed")) {
    throw UsageError("simulate.seed is not allowed; use the top-level seed");
  }
  if (j.contains("max_sweeps_this_run")) {
    const auto v = j.at("max_sweeps_this_run").get<std::int64_t>();
    if (v < 1) throw UsageError("simulate.max_sweeps_this_run must be >= 1");
    s.max_sweeps_this_run = v;
    j.erase("max_sweeps_this_run");
  }
  s.sampler = sampler_config_from_json(j);
  return s;
}

inline VerifySection parse_verify(const Json& j) {
  reject_unknown(j,
                 {"suites", "alpha_scaled", "pressure_scaled", "beta_scaled",
                  "beta_grid", "segment_counts", "disk_radii", "disk_samples",
                  "tolerance_scale"},
                 "verify");
  VerifySection v;
  v.suites = j.value("suites", v.suites);
  v.alpha_scaled = j.value("alpha_scaled", v.alpha_scaled);
  v.pressure_scaled = j.value("pressure_scaled", v.pressure_scaled);
  v.beta_scaled = j.value("beta_scaled", v.beta_scaled);
  v.beta_grid = j.value("beta_grid", v.beta_grid);
  v.segment_counts = j.value("segment_counts", v.segment_counts);
  v.disk_radii = j.value("disk_radii", v.disk_radii);
  v.disk_samples = j.value("disk_samples", v.disk_samples);
  v.tolerance_scale = j.value("tolerance_scale", v.tolerance_scale);
  if (!(v.tolerance_scale >= 0.0)) {
    throw UsageError("verify.tolerance_scale must be >= 0");
  }
  if (v.disk_radii.size() < 2) {
    throw UsageError("verify.disk_radii needs at least 2 radii");
  }
  v.expanded_suites();  // names checked early
  return v;
}

} // namespace detail

/// Parses a config document. Missing sections keep their defaults; unknown
/// keys and a schema_version other than the supported one are usage errors.
inline RunConfig parse_run_config(const Json& j) {
  detail::reject_unknown(j,
                         {"schema_version", "mode", "seed", "output_format",
                          "output_dir", "thermo", "simulate", "verify"},
                         "config");
  if (!j.contains("schema_version")) {
    throw UsageError("config is missing schema_version (expected " +
                     std::to_string(kConfigSchemaVersion) + ")");
  }
  RunConfig c;
  try {
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != kConfigSchemaVersion) {
      throw UsageError("config schema_version " + std::to_string(c.schema_version) +
                       " is not supported (expected " +
                       std::to_string(kConfigSchemaVersion) + ")");
    }
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    c.seed = j.value("seed", c.seed);
    const auto fmt = j.value("output_format", std::string("csv"));
    if (fmt == "csv") {
      c.format = OutputFormat::csv;
    } else if (fmt == "jsonl" || fmt == "json-lines") {
      c.format = OutputFormat::jsonl;
    } else {
      throw UsageError("output_format must be csv or jsonl, got '" + fmt + "'");
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("thermo")) c.thermo = detail::parse_thermo(j.at("thermo"));
    if (j.contains("simulate")) c.simulate = detail::parse_simulate(j.at("simulate"));
    if (j.contains("verify")) c.verify = detail::parse_verify(j.at("verify"));
  } catch (const Json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
  c.simulate.sampler.seed = c.seed;
  c.thermo.validate();
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const Json::exception& e) {
    throw UsageError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

/// Flag values from the command line; each overrides the config file.
struct Options {
  Mode mode = Mode::thermo;
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> resume;
  bool overwrite = false;
};

/// --out, then the config's output_dir, then the environment default.
inline std::filesystem::path resolve_output_dir(const Options& opt, const RunConfig& c) {
  if (opt.out) return *opt.out;
  if (c.output_dir) return *c.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return kDefaultOutputDir;
}

/// Serializes writes into one run directory and enforces the overwrite rule.
class OutputDir {
public:
  OutputDir(std::filesystem::path root, bool overwrite)
      : root_(std::move(root)), overwrite_(overwrite) {}

  const std::filesystem::path& root() const { return root_; }

  std::filesystem::path claim(const std::string& name) const {
    const auto path = root_ / name;
    if (std::filesystem::exists(path) && !overwrite_) {
      throw UsageError("refusing to overwrite " + path.string() +
                       " (pass --overwrite)");
    }
    return path;
  }

  std::ofstream open(const std::filesystem::path& path) const {
    std::filesystem::create_directories(root_);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
  }

private:
  std::filesystem::path root_;
  bool overwrite_;
};

/// One machine-readable table: CSV with a header row, or one JSON object per
/// line. Numbers use 17 significant digits either way.
class TableWriter {
public:
  using Cell = std::variant<double, std::int64_t, std::string, bool>;

  TableWriter(std::ostream& os, OutputFormat format, std::vector<std::string> columns)
      : os_(os), format_(format), columns_(std::move(columns)) {
    if (format_ == OutputFormat::csv) {
      for (std::size_t i = 0; i < columns_.size(); ++i) {
        os_ << (i ? "," : "") << columns_[i];
      }
      os_ << '\n';
    }
  }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_.size()) {
      throw std::logic_error("row width does not match the header");
    }
    if (format_ == OutputFormat::csv) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        os_ << (i ? "," : "") << csv_cell(cells[i]);
      }
      os_ << '\n';
      return;
    }
    Json obj = Json::object();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::visit([&](const auto& v) { obj[columns_[i]] = v; }, cells[i]);
    }
    write_json(os_, obj, -1);
    os_ << '\n';
  }

private:
  static std::string csv_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + '"';
  }

  std::ostream& os_;
  OutputFormat format_;
  std::vector<std::string> columns_;
};

inline std::string extension(OutputFormat f) {
  return f == OutputFormat::csv ? ".csv" : ".jsonl";
}

/// Fixed-width console table with 6 significant digits.
inline void print_human_table(std::ostream& os, const std::vector<std::string>& header,
                              const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], r[c].size());
    }
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      os << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << cells[c];
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

inline std::string human(double v) { return format_double(v, 6); }

// ---------------------------------------------------------------- thermo

struct ThermoRow {
  double swept_value = 0.0;
  std::optional<thermo::ThermoPoint> point;
  std::string status = "ok";
};

inline std::vector<ThermoRow> thermo_rows(const ThermoSweep& sweep) {
  sweep.validate();
  std::vector<ThermoRow> rows;
  for (double v : sweep.grid()) {
    ThermoRow row;
    row.swept_value = v;
    const auto params =
        sweep.variable == SweptVariable::beta_scaled
            ? thermo::ScaledParams::with_beta(sweep.alpha_scaled, sweep.pressure_scaled, v)
            : thermo::ScaledParams::with_enthalpy(sweep.alpha_scaled,
                                                  sweep.pressure_scaled, v);
    try {
      row.point = thermo::solve_point(params);
    } catch (const UnreachableEnthalpyError& e) {
      row.status = "unreachable: enthalpy " + format_double(e.requested(), 6) +
                   " >= supremum " + format_double(e.supremum(), 6);
    } catch (const ConvergenceError& e) {
      row.status = std::string("no-convergence: ") + e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline int cmd_thermo(const RunConfig& config, const Options& opt, std::ostream& out) {
  const auto rows = thermo_rows(config.thermo);
  const OutputDir dir(resolve_output_dir(opt, config), opt.overwrite);
  const auto path = dir.claim("thermo" + extension(config.format));

  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto file = dir.open(path);
  TableWriter table(file, config.format, kThermoColumns);
  std::vector<std::vector<std::string>> human_rows;
  for (const auto& r : rows) {
    if (r.point) {
      const auto& p = *r.point;
      table.row({p.beta, p.temperature, p.r_squared, p.free_energy, p.enthalpy,
                 p.entropy, p.specific_heat, r.status});
      human_rows.push_back({human(p.beta), human(p.temperature), human(p.r_squared),
                            human(p.free_energy), human(p.enthalpy), human(p.entropy),
                            human(p.specific_heat), r.status});
    } else {
      // the requested value is kept in its own column, the rest stay empty
      const bool beta_swept = config.thermo.variable == SweptVariable::beta_scaled;
      const double b = beta_swept ? r.swept_value : nan;
      const double h = beta_swept ? nan : r.swept_value;
      table.row({b, nan, nan, nan, h, nan, nan, r.status});
      human_rows.push_back({beta_swept ? human(b) : "-", "-", "-", "-",
                            beta_swept ? "-" : human(h), "-", "-", r.status});
    }
  }
  print_human_table(out, kThermoColumns, human_rows);
  out << "wrote " << path.string() << '\n';
  return ExitCode::ok;
}

// -------------------------------------------------------------- simulate

inline Json blocking_to_json(const BlockingEstimate& b) {
  return Json{{"mean", b.mean},
              {"standard_error", b.standard_error},
              {"naive_error", b.naive_error},
              {"autocorrelation_time", b.autocorrelation_time},
              {"count", b.count}};
}

/// Final-summary document: blocking estimates, acceptance and the R^2
/// comparison against the closed form.
inline Json simulate_summary(const Sampler& sampler) {
  const auto& series = sampler.series();
  const auto& cfg = sampler.config();
  const auto sm = series.summarize();
  const double predicted = cfg.predicted_r_squared();
  const double measured = sm.r_squared.mean;
  const double se = sm.r_squared.standard_error;
  const double gap = measured - predicted;

  Json j;
  j["finished"] = sampler.finished();
  j["sweeps_done"] = sampler.sweeps_done();
  j["total_sweeps"] = cfg.total_sweeps();
  j["records"] = series.records.size();
  j["hamiltonian"] = std::string(to_string(cfg.kind));
  j["n_filaments"] = cfg.n_filaments;
  j["n_segments"] = cfg.n_segments;
  j["r_squared_comparison"] = {
      {"predicted_r_squared", predicted},
      {"measured_r_squared", measured},
      {"standard_error", se},
      {"sigma_distance", se > 0.0 ? Json(std::abs(gap) / se) : Json(nullptr)},
      {"relative_gap", std::abs(gap) / predicted}};
  j["observables"] = {{"enthalpy", blocking_to_json(sm.enthalpy)},
                      {"self_energy", blocking_to_json(sm.self_energy)},
                      {"interaction_energy", blocking_to_json(sm.interaction_energy)},
                      {"r_squared", blocking_to_json(sm.r_squared)}};
  j["acceptance"] = {{"single_bead", series.acceptance.bead.rate()},
                     {"filament_translate", series.acceptance.translate.rate()},
                     {"singular_rejections", series.acceptance.bead.singular +
                                                 series.acceptance.translate.singular}};
  j["step_sizes"] = {{"bead", sampler.steps().bead},
                     {"filament", sampler.steps().filament}};
  j["max_energy_drift"] = series.max_drift;
  return j;
}

inline int cmd_simulate(const RunConfig& config, const Options& opt, std::ostream& out) {
  const OutputDir dir(resolve_output_dir(opt, config), opt.overwrite);
  const auto obs_path = dir.claim("observables" + extension(config.format));
  const auto summary_path = dir.claim("summary.json");
  const auto checkpoint_path = dir.claim("checkpoint.json");

  std::optional<Sampler> sampler;
  if (opt.resume) {
    ChainState state = load_checkpoint(*opt.resume);
    // a config given alongside --resume must describe the same chain
    if (opt.config_path &&
        sampler_config_to_json(state.config) != sampler_config_to_json(config.simulate.sampler)) {
      throw UsageError("config does not match the chain stored in " + *opt.resume);
    }
    sampler.emplace(std::move(state));
  } else {
    sampler.emplace(config.simulate.sampler);
  }

  if (config.simulate.max_sweeps_this_run) {
    sampler->advance(*config.simulate.max_sweeps_this_run);
  } else {
    sampler->advance();
  }

  {
    auto file = dir.open(obs_path);
    TableWriter table(file, config.format, kObservableColumns);
    for (const auto& r : sampler->series().records) {
      table.row({r.sweep, r.enthalpy, r.self_energy, r.interaction_energy, r.r_squared});
    }
  }
  const Json summary = simulate_summary(*sampler);
  {
    auto file = dir.open(summary_path);
    write_json(file, summary);
    file << '\n';
  }
  save_checkpoint(checkpoint_path.string(), sampler->state());

  const auto& cmp = summary["r_squared_comparison"];
  print_human_table(
      out, {"sweeps", "predicted_R2", "measured_R2", "std_error", "sigma_dist", "rel_gap"},
      {{std::to_string(sampler->sweeps_done()) + "/" +
            std::to_string(sampler->config().total_sweeps()),
        human(cmp["predicted_r_squared"].get<double>()),
        human(cmp["measured_r_squared"].get<double>()),
        human(cmp["standard_error"].get<double>()),
        cmp["sigma_distance"].is_null() ? "-" : human(cmp["sigma_distance"].get<double>()),
        human(cmp["relative_gap"].get<double>())}});
  out << "wrote " << dir.root().string() << '\n';
  return ExitCode::ok;
}

// ---------------------------------------------------------------- verify

struct SuiteReport {
  std::string suite;
  oracle::OracleReport report;
};

inline std::vector<SuiteReport> run_verify_suites(const VerifySection& v,
                                                  std::uint64_t seed) {
  const double ts = v.tolerance_scale;
  std::vector<SuiteReport> out;
  auto add = [&](const std::string& suite, std::vector<oracle::OracleReport> rs) {
    for (auto& r : rs) out.push_back({suite, std::move(r)});
  };

  for (const auto& suite : v.expanded_suites()) {
    if (suite == "rsq-argmin") {
      std::vector<oracle::OracleReport> rs;
      for (double beta : v.beta_grid) {
        const double a = v.alpha_scaled;
        const double p = v.pressure_scaled;
        rs.push_back(oracle::make_report(
            "closed-form-vs-scanned-argmin",
            oracle::detail::describe({{"alpha'", a}, {"p'", p}, {"beta'", beta}}),
            oracle::scan_minimize_free_energy(a, beta, p),
            thermo::mean_square_radius(a, beta, p), oracle::ToleranceKind::relative,
            1e-8 * ts));
      }
      add(suite, std::move(rs));
    } else if (suite == "disk-log") {
      // E log|z1 - z2|^2 on a disk of radius 2R, minus log R^2, should not
      // depend on R. One oracle stream feeds all radii in turn.
      Rng rng = make_stream(seed, Stream::oracle);
      const double constant = oracle::disk_log_quadrature(2.0);
      std::vector<oracle::MonteCarloEstimate> shifted;
      std::vector<oracle::OracleReport> rs;
      for (double r : v.disk_radii) {
        auto est = oracle::disk_log_expectation(2.0 * r, v.disk_samples, rng);
        est.estimate -= std::log(r * r);
        shifted.push_back(est);
        rs.push_back(oracle::make_report(
            "mc-minus-logR2-vs-quadrature", oracle::detail::describe({{"R", r}}),
            constant, est.estimate, oracle::ToleranceKind::sigma, 3.0 * ts,
            est.standard_error));
      }
      for (std::size_t i = 1; i < shifted.size(); ++i) {
        rs.push_back(oracle::make_report(
            "mc-minus-logR2-radius-independent",
            oracle::detail::describe({{"R_a", v.disk_radii[0]}, {"R_b", v.disk_radii[i]}}),
            shifted[0].estimate, shifted[i].estimate, oracle::ToleranceKind::sigma,
            3.0 * ts, std::hypot(shifted[0].standard_error, shifted[i].standard_error)));
      }
      add(suite, std::move(rs));
    } else if (suite == "derivatives") {
      oracle::DerivativeTolerances tol;
      tol.enthalpy *= ts;
      tol.specific_heat *= ts;
      tol.temperature *= ts;
      add(suite, oracle::finite_difference_checks(v.alpha_scaled, v.pressure_scaled,
                                                  v.beta_grid, tol));
    } else if (suite == "appendix-limit") {
      add(suite, oracle::appendix_limit_check(v.alpha_scaled, v.beta_scaled,
                                              v.pressure_scaled, v.segment_counts));
    }
  }
  return out;
}

inline int cmd_verify(const RunConfig& config, const Options& opt, std::ostream& out) {
  const auto reports = run_verify_suites(config.verify, config.seed);
  const OutputDir dir(resolve_output_dir(opt, config), opt.overwrite);
  const auto path = dir.claim("verify" + extension(config.format));

  auto file = dir.open(path);
  TableWriter table(file, config.format, kVerifyColumns);
  std::vector<std::vector<std::string>> human_rows;
  int failures = 0;
  for (const auto& [suite, r] : reports) {
    failures += !r.pass;
    const std::string kind(oracle::to_string(r.kind));
    table.row({suite, r.check, r.inputs, r.reference, r.candidate, r.abs_discrepancy,
               r.rel_discrepancy, kind, r.tolerance, r.scale, r.pass});
    human_rows.push_back({suite, r.check, human(r.reference), human(r.candidate),
                          human(r.abs_discrepancy), kind + " " + human(r.tolerance),
                          r.pass ? "PASS" : "FAIL"});
  }
  print_human_table(out, {"suite", "check", "reference", "candidate", "abs_diff",
                          "tolerance", "result"},
                    human_rows);
  out << (reports.size() - failures) << "/" << reports.size() << " checks passed\n";
  out << "wrote " << path.string() << '\n';
  return failures ? ExitCode::check_failed : ExitCode::ok;
}

// ------------------------------------------------------------- dispatch

/// Loads the config (or defaults), applies flag overrides, runs the command.
/// Errors are reported on `err` and mapped to exit codes.
inline int run(const Options& opt, std::ostream& out, std::ostream& err) {
  try {
    RunConfig config;
    if (opt.config_path) config = load_run_config(*opt.config_path);
    if (config.mode && *config.mode != opt.mode) {
      throw UsageError("config mode '" + to_string(*config.mode) +
                       "' does not match subcommand '" + to_string(opt.mode) + "'");
    }
    if (opt.seed) {
      config.seed = *opt.seed;
      config.simulate.sampler.seed = *opt.seed;
    }
    if (opt.resume && opt.mode != Mode::simulate) {
      throw UsageError("--resume only applies to simulate");
    }
    switch (opt.mode) {
    case Mode::thermo: return cmd_thermo(config, opt, out);
    case Mode::simulate: return cmd_simulate(config, opt, out);
    case Mode::verify: return cmd_verify(config, opt, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::runtime;
  }
  return ExitCode::runtime;
}

} // namespace vortexmf::cli

#endif // VORTEXMF_CLI_HPP
