#ifndef VORTEXMF_SAMPLER_HPP
#define VORTEXMF_SAMPLER_HPP

// Metropolis sampling of exp(-beta H_N) over broken-segment configurations.
//
// The chain runs in unscaled units: beta = beta'/N, alpha = alpha' N,
// p = p' N. Step sizes adapt toward the target acceptance during burn-in
// only and are frozen for the measurement phase.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "vortexmf/blocking.hpp"
#include "vortexmf/ensemble.hpp"
#include "vortexmf/errors.hpp"
#include "vortexmf/random.hpp"
#include "vortexmf/thermo.hpp"

namespace vortexmf {

struct MoveWeights {
  double single_bead = 1.0;
  double filament_translate = 0.05;
};

struct SamplerConfig {
  thermo::ScaledParams scaled = thermo::ScaledParams::with_beta(1.0, 1.0, 1.0);
  int n_filaments = 50;
  int n_segments = 32;
  Hamiltonian kind = Hamiltonian::mean_field;
  MoveWeights moves;
  double bead_step = 0.2;
  double filament_step = 0.5;
  std::int64_t burn_in_sweeps = 1000;
  std::int64_t measurement_sweeps = 10000;
  std::int64_t thinning = 1;
  std::uint64_t seed = 1;
  double target_acceptance = 0.4;
  std::int64_t adaptation_window = 10;
  /// Initial disk radius is this factor times 2 sqrt(R^2_pred).
  double initial_disk_scale = 1.0;
  std::int64_t resync_interval = 1000;

  void validate() const {
    scaled.validate();
    if (!scaled.beta_scaled) {
      throw UsageError("sampler needs beta_scaled, not an enthalpy");
    }
    if (n_filaments < 1) throw UsageError("n_filaments must be >= 1");
    if (n_segments < 2) throw UsageError("n_segments must be >= 2");
    if (!(moves.single_bead >= 0.0) || !(moves.filament_translate >= 0.0) ||
        moves.single_bead + moves.filament_translate <= 0.0) {
      throw UsageError("move weights must be non-negative and not all zero");
    }
    if (!(bead_step > 0.0) || !(filament_step > 0.0)) {
      throw UsageError("step sizes must be positive");
    }
    if (burn_in_sweeps < 1 || measurement_sweeps < 1 || thinning < 1 ||
        adaptation_window < 1 || resync_interval < 1) {
      throw UsageError("sweep counts must be >= 1");
    }
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
      throw UsageError("target_acceptance must lie in (0, 1)");
    }
    if (!(initial_disk_scale > 0.0)) {
      throw UsageError("initial_disk_scale must be positive");
    }
  }

  double beta() const { return *scaled.beta_scaled / n_filaments; }
  double alpha() const { return scaled.alpha_scaled * n_filaments; }
  double pressure() const { return scaled.pressure_scaled * n_filaments; }
  double predicted_r_squared() const {
    return thermo::mean_square_radius(scaled.alpha_scaled, *scaled.beta_scaled,
                                      scaled.pressure_scaled);
  }
  std::int64_t total_sweeps() const { return burn_in_sweeps + measurement_sweeps; }
};

struct MoveStats {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  std::uint64_t singular = 0;  ///< auto-rejected, included in proposed

  double rate() const {
    return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed)
                    : 0.0;
  }
  MoveStats& operator+=(const MoveStats& o) {
    proposed += o.proposed;
    accepted += o.accepted;
    singular += o.singular;
    return *this;
  }
  bool operator==(const MoveStats&) const = default;
};

struct AcceptanceStats {
  MoveStats bead;
  MoveStats translate;

  AcceptanceStats& operator+=(const AcceptanceStats& o) {
    bead += o.bead;
    translate += o.translate;
    return *this;
  }
  bool operator==(const AcceptanceStats&) const = default;
};

struct StepSizes {
  double bead = 0.2;
  double filament = 0.5;
  bool operator==(const StepSizes&) const = default;
};

struct ObservableRecord {
  std::int64_t sweep = 0;
  double enthalpy = 0.0;
  double self_energy = 0.0;
  double interaction_energy = 0.0;
  double r_squared = 0.0;  ///< M_N / N
  bool operator==(const ObservableRecord&) const = default;
};

struct ObservableSummary {
  BlockingEstimate enthalpy;
  BlockingEstimate self_energy;
  BlockingEstimate interaction_energy;
  BlockingEstimate r_squared;
};

struct ObservableSeries {
  std::vector<ObservableRecord> records;
  AcceptanceStats acceptance;  ///< measurement phase only
  double max_drift = 0.0;      ///< largest |tracked H - recomputed H| seen

  ObservableSummary summarize() const {
    std::vector<double> h, es, ei, r2;
    h.reserve(records.size());
    es.reserve(records.size());
    ei.reserve(records.size());
    r2.reserve(records.size());
    for (const auto& r : records) {
      h.push_back(r.enthalpy);
      es.push_back(r.self_energy);
      ei.push_back(r.interaction_energy);
      r2.push_back(r.r_squared);
    }
    return {blocking_analysis(h), blocking_analysis(es), blocking_analysis(ei),
            blocking_analysis(r2)};
  }
};

/// min(1, exp(-beta dH))
inline double acceptance_probability(double beta, double delta_enthalpy) {
  const double exponent = -beta * delta_enthalpy;
  return exponent >= 0.0 ? 1.0 : std::exp(exponent);
}

/// N straight filaments placed uniformly on the disk of radius
/// 2 sqrt(R^2_pred) (times initial_disk_scale), drawn from the init stream.
inline FilamentEnsemble initialize(const SamplerConfig& config) {
  config.validate();
  FilamentEnsemble e(config.n_filaments, config.n_segments, config.alpha(),
                     config.pressure());
  Rng rng = make_stream(config.seed, Stream::init);
  const double radius =
      2.0 * std::sqrt(config.predicted_r_squared()) * config.initial_disk_scale;
  for (int i = 0; i < config.n_filaments; ++i) {
    e.set_straight(i, uniform_in_disk(rng, radius));
  }
  return e;
}

/// One sweep of N*M proposals. `state` holds the tracked breakdown of `e`
/// and is updated incrementally on every accepted move.
inline AcceptanceStats sweep(FilamentEnsemble& e, const SamplerConfig& config,
                             const StepSizes& steps, EnergyBreakdown& state,
                             Rng& rng) {
  AcceptanceStats stats;
  const double beta = config.beta();
  const double p = e.pressure();
  const double bead_share =
      config.moves.single_bead /
      (config.moves.single_bead + config.moves.filament_translate);
  const int n = e.n_filaments();
  const int m = e.n_segments();
  const int attempts = n * m;

  for (int attempt = 0; attempt < attempts; ++attempt) {
    const bool bead_move = uniform01(rng) < bead_share;
    MoveStats& ms = bead_move ? stats.bead : stats.translate;
    ++ms.proposed;

    const int i = uniform_index(rng, n);
    const int k = bead_move ? uniform_index(rng, m) : 0;
    const Point shift =
        uniform_in_disk(rng, bead_move ? steps.bead : steps.filament);

    EnergyDelta d;
    try {
      d = bead_move ? delta_single_bead(e, config.kind, state.angular_momentum,
                                        i, k, e.at(i, k) + shift)
                    : delta_translate_filament(e, config.kind,
                                               state.angular_momentum, i, shift);
    } catch (const SingularConfigurationError&) {
      ++ms.singular;
      continue;
    }

    const double dh = d.enthalpy(p);
    const double prob = acceptance_probability(beta, dh);
    if (prob < 1.0 && !(uniform01(rng) < prob)) continue;

    if (bead_move) {
      e.set(i, k, e.at(i, k) + shift);
    } else {
      e.translate_filament(i, shift);
    }
    ++ms.accepted;
    state.self_energy += d.self_energy;
    state.interaction_energy += d.interaction_energy;
    state.angular_momentum += d.angular_momentum;
    state.enthalpy += dh;
  }
  return stats;
}

/// Everything needed to continue a chain bit-identically.
struct ChainState {
  SamplerConfig config;
  FilamentEnsemble ensemble;
  Rng rng;
  std::int64_t sweeps_done = 0;
  StepSizes steps;
  AcceptanceStats window;  ///< current adaptation window
  EnergyBreakdown tracked;
  ObservableSeries series;
};

class Sampler {
public:
  explicit Sampler(const SamplerConfig& config)
      : state_{config,
               initialize(config),
               make_stream(config.seed, Stream::chain),
               0,
               {config.bead_step, config.filament_step},
               {},
               {},
               {}} {
    state_.tracked = enthalpy(state_.ensemble, config.kind);
    check_finite();
  }

  explicit Sampler(ChainState state) : state_(std::move(state)) {
    state_.config.validate();
  }

  const SamplerConfig& config() const { return state_.config; }
  const FilamentEnsemble& ensemble() const { return state_.ensemble; }
  const EnergyBreakdown& tracked() const { return state_.tracked; }
  const StepSizes& steps() const { return state_.steps; }
  const ObservableSeries& series() const { return state_.series; }
  const ChainState& state() const { return state_; }
  std::int64_t sweeps_done() const { return state_.sweeps_done; }
  bool finished() const { return state_.sweeps_done >= state_.config.total_sweeps(); }
  bool in_burn_in() const { return state_.sweeps_done < state_.config.burn_in_sweeps; }

  /// Runs at most `max_sweeps` further sweeps; stops early when finished.
  void advance(std::int64_t max_sweeps = std::numeric_limits<std::int64_t>::max()) {
    const auto& cfg = state_.config;
    for (std::int64_t done = 0; done < max_sweeps && !finished(); ++done) {
      const bool burn_in = in_burn_in();
      const AcceptanceStats stats = sweep(state_.ensemble, cfg, state_.steps,
                                          state_.tracked, state_.rng);
      ++state_.sweeps_done;
      check_finite();

      if (state_.sweeps_done % cfg.resync_interval == 0) resync();

      if (burn_in) {
        state_.window += stats;
        if (state_.sweeps_done % cfg.adaptation_window == 0) adapt();
      } else {
        state_.series.acceptance += stats;
        const std::int64_t measured = state_.sweeps_done - cfg.burn_in_sweeps;
        if (measured % cfg.thinning == 0) record();
      }
    }
  }

  /// Recomputes the breakdown from scratch, logging the drift of the
  /// incremental bookkeeping.
  double resync() {
    const EnergyBreakdown full = enthalpy(state_.ensemble, state_.config.kind);
    const double drift = std::abs(full.enthalpy - state_.tracked.enthalpy);
    state_.series.max_drift = std::max(state_.series.max_drift, drift);
    state_.tracked = full;
    return drift;
  }

private:
  void check_finite() const {
    if (!std::isfinite(state_.tracked.enthalpy)) {
      throw DivergenceError("enthalpy became non-finite after sweep " +
                            std::to_string(state_.sweeps_done));
    }
  }

  void adapt() {
    const auto& cfg = state_.config;
    const double cap = 100.0 * 2.0 * std::sqrt(cfg.predicted_r_squared()) *
                       cfg.initial_disk_scale;
    auto update = [&](double& step, const MoveStats& ms) {
      if (ms.proposed == 0) return;
      const double factor =
          std::clamp(ms.rate() / cfg.target_acceptance, 0.5, 2.0);
      step = std::min(step * factor, cap);
    };
    update(state_.steps.bead, state_.window.bead);
    update(state_.steps.filament, state_.window.translate);
    state_.window = {};
  }

  void record() {
    const auto& t = state_.tracked;
    state_.series.records.push_back(
        {state_.sweeps_done, t.enthalpy, t.self_energy, t.interaction_energy,
         t.angular_momentum / state_.config.n_filaments});
  }

  ChainState state_;
};

/// Runs a chain from scratch to completion.
inline ObservableSeries run(const SamplerConfig& config) {
  Sampler sampler(config);
  sampler.advance();
  return sampler.series();
}

} // namespace vortexmf

#endif // VORTEXMF_SAMPLER_HPP
