#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "vortexmf/cli.hpp"

namespace {

using namespace vortexmf;
using namespace vortexmf::cli;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("vortexmf_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const Json& j) {
  const auto path = dir / "config.json";
  std::ofstream(path) << j.dump(2);
  return path;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const Options& opt) {
  std::ostringstream out, err;
  const int code = cli::run(opt, out, err);
  return {code, out.str(), err.str()};
}

Options options(Mode mode, const fs::path& dir, std::optional<fs::path> config = {}) {
  Options o;
  o.mode = mode;
  o.out = (dir / "out").string();
  if (config) o.config_path = config->string();
  return o;
}

Json small_simulation() {
  return Json{{"schema_version", 1},
              {"mode", "simulate"},
              {"seed", 11},
              {"simulate",
               {{"n_filaments", 5},
                {"n_segments", 4},
                {"burn_in_sweeps", 100},
                {"measurement_sweeps", 300}}}};
}

TEST(Golden, CsvHeaders) {
  const fs::path golden = VORTEXMF_GOLDEN_DIR;
  const auto dir = scratch("golden");
  ASSERT_EQ(invoke(options(Mode::thermo, dir)).code, 0);
  EXPECT_EQ(first_line(dir / "out/thermo.csv"), first_line(golden / "thermo_header.csv"));

  const auto sim = write_config(dir, small_simulation());
  ASSERT_EQ(invoke(options(Mode::simulate, dir, sim)).code, 0);
  EXPECT_EQ(first_line(dir / "out/observables.csv"),
            first_line(golden / "observables_header.csv"));

  const auto ver = write_config(
      dir, Json{{"schema_version", 1}, {"verify", {{"suites", {"rsq-argmin"}}}}});
  ASSERT_EQ(invoke(options(Mode::verify, dir, ver)).code, 0);
  EXPECT_EQ(first_line(dir / "out/verify.csv"), first_line(golden / "verify_header.csv"));
}

TEST(Config, SchemaVersionIsRequired) {
  EXPECT_THROW(parse_run_config(Json{{"mode", "thermo"}}), UsageError);
  try {
    parse_run_config(Json{{"schema_version", 7}});
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("schema_version 7"), std::string::npos);
  }
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(parse_run_config(Json{{"schema_version", 1}, {"sede", 3}}), UsageError);
  EXPECT_THROW(parse_run_config(Json{{"schema_version", 1},
                                     {"thermo", {{"beta_scaled", 2.0}}}}),
               UsageError);
  EXPECT_THROW(parse_run_config(Json{{"schema_version", 1},
                                     {"simulate", {{"seed", 2}}}}),
               UsageError);
}

TEST(Config, SweepInvariantNamesTheConstraint) {
  const auto j = Json{{"schema_version", 1},
                      {"thermo", {{"sweep", {{"min", 2.0}, {"max", 1.0}, {"count", 3}}}}}};
  try {
    parse_run_config(j);
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("min must be < max"), std::string::npos);
  }
  const auto dir = scratch("invalid");
  const auto r = invoke(options(Mode::thermo, dir, write_config(dir, j)));
  EXPECT_EQ(r.code, ExitCode::usage);
  EXPECT_NE(r.err.find("min must be < max"), std::string::npos);
}

TEST(Config, ModeMustMatchSubcommand) {
  const auto dir = scratch("mode");
  const auto cfg = write_config(dir, Json{{"schema_version", 1}, {"mode", "verify"}});
  EXPECT_EQ(invoke(options(Mode::thermo, dir, cfg)).code, ExitCode::usage);
}

TEST(Config, SeedFlowsToSampler) {
  auto j = small_simulation();
  j["seed"] = 99;
  EXPECT_EQ(parse_run_config(j).simulate.sampler.seed, 99u);
}

TEST(ThermoGrid, LinearAndLog) {
  ThermoSweep s;
  s.min = 1.0;
  s.max = 100.0;
  s.count = 3;
  s.spacing = Spacing::log;
  const auto g = s.grid();
  ASSERT_EQ(g.size(), 3u);
  EXPECT_DOUBLE_EQ(g[1], 10.0);
  EXPECT_EQ(g[2], 100.0);
  s.spacing = Spacing::linear;
  EXPECT_DOUBLE_EQ(s.grid()[1], 50.5);
}

TEST(CmdThermo, SinglePointMatchesSolvePoint) {
  const auto dir = scratch("thermo_single");
  ASSERT_EQ(invoke(options(Mode::thermo, dir)).code, 0);
  std::ifstream in(dir / "out/thermo.csv");
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_FALSE(std::getline(in, extra));

  const auto cells = split_csv(row);
  ASSERT_EQ(cells.size(), kThermoColumns.size());
  const auto p = thermo::solve_point(thermo::ScaledParams::with_beta(1, 1, 1));
  // 17 significant digits round-trip exactly
  EXPECT_EQ(std::stod(cells[0]), p.beta);
  EXPECT_EQ(std::stod(cells[2]), p.r_squared);
  EXPECT_EQ(std::stod(cells[3]), p.free_energy);
  EXPECT_EQ(std::stod(cells[4]), p.enthalpy);
  EXPECT_EQ(std::stod(cells[5]), p.entropy);
  EXPECT_EQ(std::stod(cells[6]), p.specific_heat);
  EXPECT_EQ(cells[7], "ok");
}

TEST(CmdThermo, UnreachableEnthalpyIsAnExplicitRow) {
  const auto dir = scratch("thermo_unreachable");
  const auto cfg = write_config(
      dir, Json{{"schema_version", 1},
                {"thermo",
                 {{"sweep",
                   {{"variable", "enthalpy"}, {"min", 0.2}, {"max", 0.6}, {"count", 5}}}}}});
  const auto r = invoke(options(Mode::thermo, dir, cfg));
  ASSERT_EQ(r.code, 0) << r.err;

  std::ifstream in(dir / "out/thermo.csv");
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) rows.push_back(split_csv(line));
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    EXPECT_EQ(rows[i][7], "ok");
    EXPECT_LT(std::stod(rows[i][6]), 0.0);
  }
  EXPECT_EQ(rows.back()[7].rfind("unreachable", 0), 0u) << rows.back()[7];
  EXPECT_EQ(std::stod(rows.back()[4]), 0.6);
  EXPECT_NE(r.out.find("unreachable"), std::string::npos);
}

TEST(CmdThermo, SpecificHeatColumnIsNegative) {
  const auto dir = scratch("thermo_cp");
  const auto cfg = write_config(
      dir, Json{{"schema_version", 1},
                {"output_format", "jsonl"},
                {"thermo",
                 {{"alpha_scaled", 0.3},
                  {"pressure_scaled", 7.0},
                  {"sweep", {{"min", 1e-2}, {"max", 1e2}, {"count", 40}, {"spacing", "log"}}}}}});
  ASSERT_EQ(invoke(options(Mode::thermo, dir, cfg)).code, 0);
  std::ifstream in(dir / "out/thermo.jsonl");
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = Json::parse(line);
    EXPECT_LT(j.at("specific_heat").get<double>(), 0.0);
    ++n;
  }
  EXPECT_EQ(n, 40);
}

TEST(CmdThermo, RefusesToOverwrite) {
  const auto dir = scratch("thermo_overwrite");
  auto opt = options(Mode::thermo, dir);
  ASSERT_EQ(invoke(opt).code, 0);
  const auto again = invoke(opt);
  EXPECT_EQ(again.code, ExitCode::usage);
  EXPECT_NE(again.err.find("--overwrite"), std::string::npos);
  opt.overwrite = true;
  EXPECT_EQ(invoke(opt).code, 0);
}

TEST(CmdThermo, EnvironmentSuppliesDefaultDirectory) {
  const auto dir = scratch("env");
  ::setenv(kOutputDirEnv, (dir / "from_env").c_str(), 1);
  Options opt;
  opt.mode = Mode::thermo;
  EXPECT_EQ(invoke(opt).code, 0);
  EXPECT_TRUE(fs::exists(dir / "from_env/thermo.csv"));
  // --out wins over the environment
  opt.out = (dir / "flag").string();
  EXPECT_EQ(invoke(opt).code, 0);
  EXPECT_TRUE(fs::exists(dir / "flag/thermo.csv"));
  ::unsetenv(kOutputDirEnv);
}

TEST(CmdSimulate, SummaryHasComparisonRow) {
  const auto dir = scratch("simulate_summary");
  const auto cfg = write_config(dir, small_simulation());
  const auto r = invoke(options(Mode::simulate, dir, cfg));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = Json::parse(read_file(dir / "out/summary.json"));
  const auto& cmp = summary.at("r_squared_comparison");
  for (const char* key : {"predicted_r_squared", "measured_r_squared", "standard_error",
                          "sigma_distance", "relative_gap"}) {
    EXPECT_TRUE(cmp.at(key).is_number()) << key;
  }
  EXPECT_EQ(cmp.at("predicted_r_squared").get<double>(),
            thermo::mean_square_radius(1, 1, 1));
  EXPECT_TRUE(summary.at("finished").get<bool>());
  EXPECT_TRUE(summary.at("acceptance").at("single_bead").is_number());
  EXPECT_TRUE(fs::exists(dir / "out/checkpoint.json"));
}

TEST(CmdSimulate, HalfwayResumeMatchesUninterruptedRun) {
  const auto dir = scratch("simulate_resume");
  auto cfg_json = small_simulation();
  const auto full_cfg = write_config(dir, cfg_json);
  auto full = options(Mode::simulate, dir, full_cfg);
  full.out = (dir / "full").string();
  ASSERT_EQ(invoke(full).code, 0);

  cfg_json["simulate"]["max_sweeps_this_run"] = 200;
  const auto half_cfg = dir / "half.json";
  std::ofstream(half_cfg) << cfg_json.dump();
  auto half = options(Mode::simulate, dir, half_cfg);
  half.out = (dir / "half").string();
  ASSERT_EQ(invoke(half).code, 0);
  EXPECT_FALSE(Json::parse(read_file(dir / "half/summary.json")).at("finished").get<bool>());

  Options resume;
  resume.mode = Mode::simulate;
  resume.out = (dir / "resumed").string();
  resume.resume = (dir / "half/checkpoint.json").string();
  const auto r = invoke(resume);
  ASSERT_EQ(r.code, 0) << r.err;

  EXPECT_EQ(read_file(dir / "resumed/observables.csv"), read_file(dir / "full/observables.csv"));
  EXPECT_EQ(read_file(dir / "resumed/checkpoint.json"), read_file(dir / "full/checkpoint.json"));
}

TEST(CmdSimulate, CheckpointVersionMismatch) {
  const auto dir = scratch("simulate_version");
  const auto cfg = write_config(dir, small_simulation());
  ASSERT_EQ(invoke(options(Mode::simulate, dir, cfg)).code, 0);
  auto doc = Json::parse(read_file(dir / "out/checkpoint.json"));
  doc["version"] = 0;
  std::ofstream(dir / "old.json") << doc.dump();

  Options opt;
  opt.mode = Mode::simulate;
  opt.out = (dir / "again").string();
  opt.resume = (dir / "old.json").string();
  const auto r = invoke(opt);
  EXPECT_EQ(r.code, ExitCode::runtime);
  EXPECT_NE(r.err.find("version 0"), std::string::npos) << r.err;
}

TEST(CmdSimulate, ResumeRejectsDifferentConfig) {
  const auto dir = scratch("simulate_mismatch");
  const auto cfg = write_config(dir, small_simulation());
  ASSERT_EQ(invoke(options(Mode::simulate, dir, cfg)).code, 0);
  auto other = small_simulation();
  other["simulate"]["n_filaments"] = 6;
  const auto other_cfg = dir / "other.json";
  std::ofstream(other_cfg) << other.dump();
  auto opt = options(Mode::simulate, dir, other_cfg);
  opt.out = (dir / "again").string();
  opt.resume = (dir / "out/checkpoint.json").string();
  EXPECT_EQ(invoke(opt).code, ExitCode::usage);
}

TEST(CmdVerify, SuiteNames) {
  EXPECT_EQ(kVerifySuites,
            (std::vector<std::string>{"rsq-argmin", "disk-log", "derivatives",
                                      "appendix-limit"}));
  VerifySection v;
  v.suites = {"derivatives", "nope"};
  try {
    v.expanded_suites();
    FAIL();
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    for (const auto& s : kVerifySuites) EXPECT_NE(msg.find(s), std::string::npos);
  }
}

TEST(CmdVerify, UnknownSuiteIsUsageError) {
  const auto dir = scratch("verify_unknown");
  const auto cfg = write_config(
      dir, Json{{"schema_version", 1}, {"verify", {{"suites", {"disk"}}}}});
  const auto r = invoke(options(Mode::verify, dir, cfg));
  EXPECT_EQ(r.code, ExitCode::usage);
  EXPECT_NE(r.err.find("rsq-argmin"), std::string::npos);
}

TEST(CmdVerify, DeterministicSuitesPass) {
  const auto dir = scratch("verify_pass");
  const auto cfg = write_config(
      dir, Json{{"schema_version", 1},
                {"verify", {{"suites", {"rsq-argmin", "derivatives", "disk-log"}},
                            {"disk_samples", 20000}}}});
  const auto r = invoke(options(Mode::verify, dir, cfg));
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(CmdVerify, CorruptedToleranceFails) {
  const auto dir = scratch("verify_corrupt");
  const auto cfg = write_config(
      dir, Json{{"schema_version", 1},
                {"verify", {{"suites", {"derivatives"}}, {"tolerance_scale", 1e-30}}}});
  const auto r = invoke(options(Mode::verify, dir, cfg));
  EXPECT_EQ(r.code, ExitCode::check_failed);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(CmdVerify, ExitStatusReflectsEveryReport) {
  const auto dir = scratch("verify_all");
  const auto cfg = write_config(
      dir, Json{{"schema_version", 1},
                {"output_format", "jsonl"},
                {"verify", {{"disk_samples", 20000}}}});
  const auto r = invoke(options(Mode::verify, dir, cfg));
  std::ifstream in(dir / "out/verify.jsonl");
  std::string line;
  bool all_pass = true;
  std::set<std::string> suites;
  while (std::getline(in, line)) {
    const auto j = Json::parse(line);
    all_pass = all_pass && j.at("pass").get<bool>();
    suites.insert(j.at("suite").get<std::string>());
  }
  EXPECT_EQ(suites.size(), 4u);
  EXPECT_EQ(r.code, all_pass ? ExitCode::ok : ExitCode::check_failed);
}

} // namespace
