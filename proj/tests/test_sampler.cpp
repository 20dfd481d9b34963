#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "vortexmf/blocking.hpp"
#include "vortexmf/checkpoint.hpp"
#include "vortexmf/sampler.hpp"

namespace {

using namespace vortexmf;

SamplerConfig small_config(Hamiltonian kind = Hamiltonian::mean_field) {
  SamplerConfig c;
  c.n_filaments = 6;
  c.n_segments = 8;
  c.kind = kind;
  c.burn_in_sweeps = 200;
  c.measurement_sweeps = 400;
  c.thinning = 2;
  c.seed = 2024;
  return c;
}

TEST(Blocking, IndependentSamples) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(3.0, 2.0);
  std::vector<double> x(1 << 16);
  for (auto& v : x) v = g(rng);
  const auto est = blocking_analysis(x);
  EXPECT_NEAR(est.mean, 3.0, 4 * 2.0 / 256);
  EXPECT_NEAR(est.naive_error, 2.0 / 256, 0.05 * 2.0 / 256);
  EXPECT_LT(est.standard_error / est.naive_error, 1.3);
  EXPECT_GE(est.standard_error, 0.0);
}

TEST(Blocking, CorrelatedSamplesInflateError) {
  // AR(1) with rho = 0.9: tau_int = (1 + rho) / (2 (1 - rho)) = 9.5
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(1 << 18);
  double y = 0.0;
  for (auto& v : x) {
    y = 0.9 * y + g(rng);
    v = y;
  }
  const auto est = blocking_analysis(x);
  EXPECT_NEAR(est.autocorrelation_time, 9.5, 2.0);
}

TEST(Blocking, DegenerateSeries) {
  EXPECT_EQ(blocking_analysis(std::vector<double>{}).count, 0u);
  const auto one = blocking_analysis(std::vector<double>{4.0});
  EXPECT_EQ(one.mean, 4.0);
  EXPECT_EQ(one.standard_error, 0.0);
}

TEST(SamplerConfig, Validation) {
  auto c = small_config();
  c.moves = {0.0, 0.0};
  EXPECT_THROW(c.validate(), UsageError);
  c = small_config();
  c.bead_step = 0;
  EXPECT_THROW(c.validate(), UsageError);
  c = small_config();
  c.thinning = 0;
  EXPECT_THROW(c.validate(), UsageError);
  c = small_config();
  c.target_acceptance = 1.0;
  EXPECT_THROW(c.validate(), UsageError);
  c = small_config();
  c.scaled = thermo::ScaledParams::with_enthalpy(1, 1, 0.1);
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(SamplerConfig, UnscaledConversion) {
  auto c = small_config();
  c.scaled = thermo::ScaledParams::with_beta(2.0, 3.0, 4.0);
  EXPECT_DOUBLE_EQ(c.alpha(), 12.0);
  EXPECT_DOUBLE_EQ(c.pressure(), 18.0);
  EXPECT_DOUBLE_EQ(c.beta(), 4.0 / 6.0);
}

TEST(Initialize, SingleFilamentInsideDisk) {
  auto c = small_config();
  c.n_filaments = 1;
  const auto e = initialize(c);
  const double radius = 2 * std::sqrt(c.predicted_r_squared());
  EXPECT_LT(std::abs(e.at(0, 0)), radius);
  EXPECT_EQ(self_energy(e), 0.0);
}

TEST(Initialize, DeterministicPerSeed) {
  auto c = small_config();
  EXPECT_EQ(initialize(c), initialize(c));
  auto d = c;
  d.seed += 1;
  EXPECT_FALSE(initialize(c) == initialize(d));
}

TEST(Initialize, UniformDiskSecondMoment) {
  // E|z|^2 over a disk of radius 2 sqrt(R^2) is 2 R^2
  auto c = small_config();
  c.n_filaments = 5;
  std::vector<double> values;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    c.seed = seed;
    const auto e = initialize(c);
    values.push_back(angular_momentum(e) / c.n_filaments);
  }
  const auto est = blocking_analysis(values);
  EXPECT_LE(std::abs(est.mean - 2 * c.predicted_r_squared()), 3 * est.naive_error);
}

TEST(Sweep, AcceptanceProbability) {
  EXPECT_EQ(acceptance_probability(0.7, 0.0), 1.0);
  EXPECT_EQ(acceptance_probability(0.7, -3.0), 1.0);
  EXPECT_EQ(acceptance_probability(0.0, 123.0), 1.0);
  EXPECT_DOUBLE_EQ(acceptance_probability(0.5, 2.0), std::exp(-1.0));
}

TEST(Sweep, DetailedBalanceRatio) {
  auto c = small_config(Hamiltonian::pairwise);
  auto e = initialize(c);
  Rng rng(3);
  const double beta = c.beta();
  for (int trial = 0; trial < 1000; ++trial) {
    const int i = uniform_index(rng, c.n_filaments);
    const int k = uniform_index(rng, c.n_segments);
    const Point old = e.at(i, k);
    const Point target = old + uniform_in_disk(rng, 0.5);
    const double forward = delta_enthalpy_single_bead(e, c.kind, i, k, target);
    auto moved = e;
    moved.set(i, k, target);
    const double backward = delta_enthalpy_single_bead(moved, c.kind, i, k, old);
    const double ratio =
        acceptance_probability(beta, forward) / acceptance_probability(beta, backward);
    EXPECT_NEAR(ratio, std::exp(-beta * forward), 1e-12 * ratio);
  }
}

TEST(Sweep, InfiniteTemperatureAcceptsEverything) {
  auto c = small_config(Hamiltonian::pairwise);
  c.scaled.beta_scaled = 1e-12;
  c.initial_disk_scale = 1e-6;
  auto e = initialize(c);
  auto state = enthalpy(e, c.kind);
  Rng rng(4);
  const auto stats = sweep(e, c, {0.3, 0.3}, state, rng);
  EXPECT_EQ(stats.bead.accepted + stats.bead.singular, stats.bead.proposed);
  EXPECT_EQ(stats.translate.accepted + stats.translate.singular,
            stats.translate.proposed);
  EXPECT_EQ(stats.bead.proposed + stats.translate.proposed,
            static_cast<std::uint64_t>(c.n_filaments * c.n_segments));
}

TEST(Sweep, TinyStepsAreAlmostAlwaysAccepted) {
  auto c = small_config();
  auto e = initialize(c);
  auto state = enthalpy(e, c.kind);
  Rng rng(5);
  const auto stats = sweep(e, c, {1e-12, 1e-12}, state, rng);
  EXPECT_EQ(stats.bead.accepted, stats.bead.proposed);
  EXPECT_EQ(stats.translate.accepted, stats.translate.proposed);
}

TEST(Run, DeterministicReplay) {
  for (auto kind : {Hamiltonian::mean_field, Hamiltonian::pairwise}) {
    const auto a = run(small_config(kind));
    const auto b = run(small_config(kind));
    ASSERT_EQ(a.records.size(), 200u);
    EXPECT_EQ(a.records, b.records);
    EXPECT_EQ(a.acceptance, b.acceptance);
  }
}

TEST(Run, EnergyBookkeepingDrift) {
  for (auto kind : {Hamiltonian::mean_field, Hamiltonian::pairwise}) {
    auto c = small_config(kind);
    c.resync_interval = 1000000;  // no resync inside the run
    Sampler s(c);
    const double initial = s.tracked().enthalpy;
    s.advance();
    const double tracked = s.tracked().enthalpy;
    const double full = enthalpy(s.ensemble(), kind).enthalpy;
    EXPECT_NE(tracked, initial);
    EXPECT_LT(std::abs(tracked - full), 1e-6);
  }
}

TEST(Run, AdaptedAcceptanceNearTarget) {
  auto c = small_config();
  c.burn_in_sweeps = 1000;
  const auto series = run(c);
  EXPECT_NEAR(series.acceptance.bead.rate(), c.target_acceptance, 0.15);
  EXPECT_NEAR(series.acceptance.translate.rate(), c.target_acceptance, 0.15);
}

TEST(Run, StationarityFromDifferentStarts) {
  auto c = small_config();
  c.n_filaments = 10;
  c.burn_in_sweeps = 2000;
  c.measurement_sweeps = 20000;
  c.thinning = 1;
  const auto near = run(c).summarize().r_squared;
  c.initial_disk_scale = 4.0;
  c.seed += 17;
  const auto far = run(c).summarize().r_squared;
  const double sigma = std::hypot(near.standard_error, far.standard_error);
  EXPECT_LE(std::abs(near.mean - far.mean), 3 * sigma)
      << near.mean << " vs " << far.mean << " sigma " << sigma;
}

TEST(Run, RecordCountMatchesThinning) {
  auto c = small_config();
  c.measurement_sweeps = 101;
  c.thinning = 10;
  EXPECT_EQ(run(c).records.size(), 10u);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Sampler s(small_config(Hamiltonian::pairwise));
  s.advance(250);
  const auto text = to_json_text(checkpoint_to_json(s.state()));
  const auto restored = checkpoint_from_json(Json::parse(text));
  EXPECT_EQ(restored.ensemble, s.ensemble());
  EXPECT_EQ(restored.rng, s.state().rng);
  EXPECT_EQ(restored.sweeps_done, 250);
  EXPECT_EQ(restored.steps, s.steps());
  EXPECT_EQ(restored.tracked.enthalpy, s.tracked().enthalpy);
  EXPECT_EQ(restored.series.records, s.series().records);
}

TEST(Checkpoint, ResumeMatchesUninterruptedRun) {
  const auto config = small_config(Hamiltonian::mean_field);
  const auto full = run(config);

  const auto path = std::filesystem::temp_directory_path() / "vortexmf_resume.json";
  {
    Sampler first(config);
    first.advance(config.total_sweeps() / 2);
    save_checkpoint(path.string(), first.state());
  }
  Sampler resumed(load_checkpoint(path.string()));
  resumed.advance();
  EXPECT_EQ(resumed.series().records, full.records);
  EXPECT_EQ(resumed.series().acceptance, full.acceptance);
  std::filesystem::remove(path);
}

TEST(Checkpoint, VersionMismatchIsExplicit) {
  Sampler s(small_config());
  auto doc = checkpoint_to_json(s.state());
  doc["version"] = 99;
  try {
    checkpoint_from_json(doc);
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("version 99"), std::string::npos);
  }
  doc["format"] = "something-else";
  EXPECT_THROW(checkpoint_from_json(doc), CheckpointError);
}

TEST(Checkpoint, ShapeMismatchIsRejected) {
  Sampler s(small_config());
  auto doc = checkpoint_to_json(s.state());
  doc["positions"].erase(0);
  EXPECT_THROW(checkpoint_from_json(doc), CheckpointError);
}

} // namespace
