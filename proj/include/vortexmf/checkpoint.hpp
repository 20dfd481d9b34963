#ifndef VORTEXMF_CHECKPOINT_HPP
#define VORTEXMF_CHECKPOINT_HPP

// Versioned checkpoint documents for sampler chains.
//
// Layout (JSON):
//   format, version       "vortexmf-checkpoint", 1
//   config                sampler configuration echo
//   sweep                 sweeps completed
//   rng                   {algorithm, state: [u64 words]}
//   n_filaments, n_segments
//   positions             N x M x 2 array, [filament][plane][x, y]
//   steps, window, tracked, series   remaining chain state

#include <cstdint>
#include <fstream>
#include <string>

#include "vortexmf/errors.hpp"
#include "vortexmf/json_io.hpp"
#include "vortexmf/random.hpp"
#include "vortexmf/sampler.hpp"

namespace vortexmf {

inline constexpr const char* kCheckpointFormat = "vortexmf-checkpoint";
inline constexpr int kCheckpointVersion = 1;

inline Json sampler_config_to_json(const SamplerConfig& c) {
  return Json{
      {"alpha_scaled", c.scaled.alpha_scaled},
      {"pressure_scaled", c.scaled.pressure_scaled},
      {"beta_scaled", c.scaled.beta_scaled.value_or(0.0)},
      {"n_filaments", c.n_filaments},
      {"n_segments", c.n_segments},
      {"hamiltonian", std::string(to_string(c.kind))},
      {"moves",
       {{"single_bead", c.moves.single_bead},
        {"filament_translate", c.moves.filament_translate}}},
      {"bead_step", c.bead_step},
      {"filament_step", c.filament_step},
      {"burn_in_sweeps", c.burn_in_sweeps},
      {"measurement_sweeps", c.measurement_sweeps},
      {"thinning", c.thinning},
      {"seed", c.seed},
      {"target_acceptance", c.target_acceptance},
      {"adaptation_window", c.adaptation_window},
      {"initial_disk_scale", c.initial_disk_scale},
      {"resync_interval", c.resync_interval},
  };
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline SamplerConfig sampler_config_from_json(const Json& j) {
  static const char* const known[] = {
      "alpha_scaled",   "pressure_scaled",   "beta_scaled",
      "n_filaments",    "n_segments",        "hamiltonian",
      "moves",          "bead_step",         "filament_step",
      "burn_in_sweeps", "measurement_sweeps", "thinning",
      "seed",           "target_acceptance", "adaptation_window",
      "initial_disk_scale", "resync_interval"};
  if (!j.is_object()) throw UsageError("simulate section must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw UsageError("unknown simulate key '" + it.key() + "'");
  }

  SamplerConfig c;
  try {
    c.scaled = thermo::ScaledParams::with_beta(
        j.value("alpha_scaled", 1.0), j.value("pressure_scaled", 1.0),
        j.value("beta_scaled", 1.0));
    c.n_filaments = j.value("n_filaments", c.n_filaments);
    c.n_segments = j.value("n_segments", c.n_segments);
    if (j.contains("hamiltonian")) {
      c.kind = parse_hamiltonian(j.at("hamiltonian").get<std::string>());
    }
    if (j.contains("moves")) {
      const auto& mv = j.at("moves");
      c.moves.single_bead = mv.value("single_bead", c.moves.single_bead);
      c.moves.filament_translate =
          mv.value("filament_translate", c.moves.filament_translate);
    }
    c.bead_step = j.value("bead_step", c.bead_step);
    c.filament_step = j.value("filament_step", c.filament_step);
    c.burn_in_sweeps = j.value("burn_in_sweeps", c.burn_in_sweeps);
    c.measurement_sweeps = j.value("measurement_sweeps", c.measurement_sweeps);
    c.thinning = j.value("thinning", c.thinning);
    c.seed = j.value("seed", c.seed);
    c.target_acceptance = j.value("target_acceptance", c.target_acceptance);
    c.adaptation_window = j.value("adaptation_window", c.adaptation_window);
    c.initial_disk_scale = j.value("initial_disk_scale", c.initial_disk_scale);
    c.resync_interval = j.value("resync_interval", c.resync_interval);
  } catch (const Json::exception& e) {
    throw UsageError(std::string("bad simulate config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return c;
}

namespace detail {

inline Json move_stats_to_json(const MoveStats& s) {
  return Json{{"proposed", s.proposed}, {"accepted", s.accepted},
              {"singular", s.singular}};
}

inline MoveStats move_stats_from_json(const Json& j) {
  return {j.at("proposed").get<std::uint64_t>(),
          j.at("accepted").get<std::uint64_t>(),
          j.at("singular").get<std::uint64_t>()};
}

inline Json acceptance_to_json(const AcceptanceStats& a) {
  return Json{{"single_bead", move_stats_to_json(a.bead)},
              {"filament_translate", move_stats_to_json(a.translate)}};
}

inline AcceptanceStats acceptance_from_json(const Json& j) {
  return {move_stats_from_json(j.at("single_bead")),
          move_stats_from_json(j.at("filament_translate"))};
}

} // namespace detail

inline Json checkpoint_to_json(const ChainState& s) {
  const auto& e = s.ensemble;
  Json positions = Json::array();
  for (int i = 0; i < e.n_filaments(); ++i) {
    Json filament = Json::array();
    for (int k = 0; k < e.n_segments(); ++k) {
      filament.push_back(Json::array({e.at(i, k).real(), e.at(i, k).imag()}));
    }
    positions.push_back(std::move(filament));
  }

  Json records = Json::array();
  for (const auto& r : s.series.records) {
    records.push_back(Json::array({r.sweep, r.enthalpy, r.self_energy,
                                   r.interaction_energy, r.r_squared}));
  }

  return Json{
      {"format", kCheckpointFormat},
      {"version", kCheckpointVersion},
      {"config", sampler_config_to_json(s.config)},
      {"sweep", s.sweeps_done},
      {"rng", {{"algorithm", kRngAlgorithm}, {"state", rng_state_words(s.rng)}}},
      {"n_filaments", e.n_filaments()},
      {"n_segments", e.n_segments()},
      {"positions", std::move(positions)},
      {"steps", {{"bead", s.steps.bead}, {"filament", s.steps.filament}}},
      {"window", detail::acceptance_to_json(s.window)},
      {"tracked",
       {{"self_energy", s.tracked.self_energy},
        {"interaction_energy", s.tracked.interaction_energy},
        {"angular_momentum", s.tracked.angular_momentum},
        {"enthalpy", s.tracked.enthalpy}}},
      {"series",
       {{"acceptance", detail::acceptance_to_json(s.series.acceptance)},
        {"max_drift", s.series.max_drift},
        {"records", std::move(records)}}},
  };
}

inline ChainState checkpoint_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", std::string{}) != kCheckpointFormat) {
    throw CheckpointError("not a vortexmf checkpoint document");
  }
  const int version = j.value("version", -1);
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) +
                          " is not supported (this build reads version " +
                          std::to_string(kCheckpointVersion) +
                          "); re-run from scratch or convert the document");
  }
  try {
    const SamplerConfig config = sampler_config_from_json(j.at("config"));
    const auto& rng = j.at("rng");
    if (rng.at("algorithm").get<std::string>() != kRngAlgorithm) {
      throw CheckpointError("unsupported rng algorithm " +
                            rng.at("algorithm").get<std::string>());
    }

    const int n = j.at("n_filaments").get<int>();
    const int m = j.at("n_segments").get<int>();
    if (n != config.n_filaments || m != config.n_segments) {
      throw CheckpointError("position array shape disagrees with config");
    }
    FilamentEnsemble e(n, m, config.alpha(), config.pressure());
    const auto& positions = j.at("positions");
    if (positions.size() != static_cast<std::size_t>(n)) {
      throw CheckpointError("position array has wrong filament count");
    }
    for (int i = 0; i < n; ++i) {
      const auto& filament = positions.at(i);
      if (filament.size() != static_cast<std::size_t>(m)) {
        throw CheckpointError("position array has wrong segment count");
      }
      for (int k = 0; k < m; ++k) {
        e.set(i, k, {filament.at(k).at(0).get<double>(),
                     filament.at(k).at(1).get<double>()});
      }
    }

    ChainState s{config,
                 std::move(e),
                 rng_from_state_words(rng.at("state").get<std::vector<std::uint64_t>>()),
                 j.at("sweep").get<std::int64_t>(),
                 {j.at("steps").at("bead").get<double>(),
                  j.at("steps").at("filament").get<double>()},
                 detail::acceptance_from_json(j.at("window")),
                 {},
                 {}};
    const auto& t = j.at("tracked");
    s.tracked.kind = config.kind;
    s.tracked.self_energy = t.at("self_energy").get<double>();
    s.tracked.interaction_energy = t.at("interaction_energy").get<double>();
    s.tracked.angular_momentum = t.at("angular_momentum").get<double>();
    s.tracked.enthalpy = t.at("enthalpy").get<double>();

    const auto& series = j.at("series");
    s.series.acceptance = detail::acceptance_from_json(series.at("acceptance"));
    s.series.max_drift = series.at("max_drift").get<double>();
    for (const auto& r : series.at("records")) {
      s.series.records.push_back({r.at(0).get<std::int64_t>(), r.at(1).get<double>(),
                                  r.at(2).get<double>(), r.at(3).get<double>(),
                                  r.at(4).get<double>()});
    }
    return s;
  } catch (const Json::exception& ex) {
    throw CheckpointError(std::string("malformed checkpoint: ") + ex.what());
  } catch (const UsageError& ex) {
    throw CheckpointError(std::string("bad config in checkpoint: ") + ex.what());
  }
}

inline void save_checkpoint(const std::string& path, const ChainState& s) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint " + path);
  write_json(out, checkpoint_to_json(s), 1);
  out << '\n';
}

inline ChainState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot read checkpoint " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& ex) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + ex.what());
  }
  return checkpoint_from_json(j);
}

} // namespace vortexmf

#endif // VORTEXMF_CHECKPOINT_HPP
