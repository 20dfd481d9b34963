#ifndef VORTEXMF_ORACLE_HPP
#define VORTEXMF_ORACLE_HPP

// Brute-force checks of the closed forms in thermo.hpp.
//
// Nothing here calls mean_square_radius or specific_heat except as the
// candidate being checked: the free energy is restated locally, minima come
// from scanning, and derivatives from central differences.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "vortexmf/errors.hpp"
#include "vortexmf/random.hpp"
#include "vortexmf/thermo.hpp"

namespace vortexmf::oracle {

enum class ToleranceKind { relative, absolute, sigma };

struct OracleReport {
  std::string check;
  std::string inputs;
  double reference = 0.0;
  double candidate = 0.0;
  double abs_discrepancy = 0.0;
  double rel_discrepancy = 0.0;
  ToleranceKind kind = ToleranceKind::relative;
  double tolerance = 0.0;
  /// relative: |c - r| <= tolerance * max(|r|, scale)
  /// absolute: |c - r| <= tolerance
  /// sigma:    |c - r| <= tolerance * scale (scale is the combined std error)
  double scale = 0.0;
  bool pass = false;
};

inline std::string_view to_string(ToleranceKind k) {
  switch (k) {
  case ToleranceKind::relative: return "relative";
  case ToleranceKind::absolute: return "absolute";
  case ToleranceKind::sigma: return "sigma";
  }
  return "?";
}

inline OracleReport make_report(std::string check, std::string inputs,
                                double reference, double candidate,
                                ToleranceKind kind, double tolerance,
                                double scale = 0.0) {
  OracleReport r{std::move(check), std::move(inputs), reference, candidate};
  r.abs_discrepancy = std::abs(candidate - reference);
  r.rel_discrepancy = reference != 0.0 ? r.abs_discrepancy / std::abs(reference)
                                       : r.abs_discrepancy;
  r.kind = kind;
  r.tolerance = tolerance;
  r.scale = scale;
  double bound = 0.0;
  switch (kind) {
  case ToleranceKind::relative:
    bound = tolerance * std::max(std::abs(reference), scale);
    break;
  case ToleranceKind::absolute:
    bound = tolerance;
    break;
  case ToleranceKind::sigma:
    bound = tolerance * scale;
    break;
  }
  r.pass = std::isfinite(r.abs_discrepancy) && r.abs_discrepancy <= bound;
  return r;
}

namespace detail {

inline std::string describe(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << ' ';
    first = false;
    os << k << '=' << v;
  }
  return os.str();
}

// The free energy restated independently of thermo::free_energy.
inline double free_energy(double alpha, double beta, double pressure, double r2) {
  return pressure * r2 - std::log(r2) / 4.0 + 0.5 / (alpha * beta * beta * r2);
}

inline double fd_step(double x) { return std::max(1e-5 * std::abs(x), 1e-9); }

} // namespace detail

/// argmin over R^2 of F: log-grid scan over [1e-6, 1e6] at 200 points per
/// decade, golden-section refinement in the winning cell, then a Newton
/// polish on finite-difference derivatives (golden section alone stalls
/// near sqrt(machine epsilon)).
inline double scan_minimize_free_energy(double alpha, double beta,
                                        double pressure) {
  thermo::detail::require_positive(alpha, "alpha_scaled");
  thermo::detail::require_positive(beta, "beta_scaled");
  thermo::detail::require_positive(pressure, "pressure_scaled");
  auto f = [&](double r2) { return detail::free_energy(alpha, beta, pressure, r2); };

  constexpr int kPerDecade = 200;
  constexpr int kLowExp = -6;
  constexpr int kHighExp = 6;
  constexpr int kPoints = (kHighExp - kLowExp) * kPerDecade + 1;
  auto grid = [](int i) {
    return std::pow(10.0, kLowExp + static_cast<double>(i) / kPerDecade);
  };

  int best = 0;
  double best_value = f(grid(0));
  for (int i = 1; i < kPoints; ++i) {
    const double v = f(grid(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best == 0 || best == kPoints - 1) {
    throw RangeError("free-energy minimum lies on the scan boundary R^2 = " +
                     std::to_string(grid(best)));
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = grid(best - 1);
  double hi = grid(best + 1);
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-10 * 0.5 * (hi + lo); ++iter) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 3; ++iter) {
    const double h = 1e-4 * x;
    const double fp2 = f(x + 2 * h), fp1 = f(x + h), f0 = f(x);
    const double fm1 = f(x - h), fm2 = f(x - 2 * h);
    const double slope = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h);
    const double curvature = (fp1 - 2 * f0 + fm1) / (h * h);
    if (!(curvature > 0.0)) break;
    const double step = slope / curvature;
    if (std::abs(step) > h) break;  // Newton only inside the golden bracket
    x -= step;
  }
  return x;
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo E[log |z1 - z2|^2] for z1, z2 independent and uniform on the
/// disk of radius a.
inline MonteCarloEstimate disk_log_expectation(double radius,
                                               std::int64_t sample_count,
                                               Rng& rng) {
  thermo::detail::require_positive(radius, "radius");
  if (sample_count < 10000) {
    throw DomainError("disk_log_expectation needs at least 10^4 samples");
  }
  auto draw = [&] {
    const double r = radius * std::sqrt(uniform01(rng));
    const double theta = 2.0 * std::numbers::pi * uniform01(rng);
    return std::polar(r, theta);
  };
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t n = 1; n <= sample_count; ++n) {
    const double v = std::log(std::norm(draw() - draw()));
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(sample_count - 1);
  return {mean, std::sqrt(var / static_cast<double>(sample_count))};
}

inline MonteCarloEstimate disk_log_expectation(double radius,
                                               std::int64_t sample_count,
                                               std::uint64_t seed) {
  Rng rng = make_stream(seed, Stream::oracle);
  return disk_log_expectation(radius, sample_count, rng);
}

/// Deterministic nested quadrature of the same expectation:
/// int int (2 r1/a^2)(2 r2/a^2) (1/pi) int_0^pi log(r1^2 + r2^2 - 2 r1 r2 cos t) dt dr2 dr1.
/// The inner r2 integral is split at r2 = r1 where the angular integrand has
/// its logarithmic singularity.
inline double disk_log_quadrature(double radius) {
  thermo::detail::require_positive(radius, "radius");
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double tol = 1e-9;
  const double a2 = radius * radius;

  auto angular = [&](double r1, double r2) {
    auto g = [&](double t) {
      // 1 - cos t written as 2 sin^2(t/2) keeps the r1 ~ r2, t ~ 0 corner accurate
      const double s = std::sin(0.5 * t);
      const double dr = r1 - r2;
      // t can be so small that s^2 underflows right at r1 == r2
      return std::log(std::max(dr * dr + 4.0 * r1 * r2 * s * s,
                               std::numeric_limits<double>::min()));
    };
    return integrator.integrate(g, 0.0, std::numbers::pi, tol) / std::numbers::pi;
  };
  auto radial = [&](double r1) {
    auto w = [&](double r2) { return (2.0 * r2 / a2) * angular(r1, r2); };
    return (2.0 * r1 / a2) * (integrator.integrate(w, 0.0, r1, tol) +
                              integrator.integrate(w, r1, radius, tol));
  };
  return integrator.integrate(radial, 0.0, radius, tol);
}

struct DerivativeTolerances {
  double enthalpy = 1e-6;
  double specific_heat = 1e-4;
  double temperature = 1e-3;
};

/// Per grid point: (i) H0' against the total derivative of beta' F(beta',
/// R^2(beta')) with R^2 from the scan, (ii) c_p against -beta'^2 dH0'/dbeta',
/// (iii) beta' against dS/dH0' along the curve.
inline std::vector<OracleReport> finite_difference_checks(
    double alpha, double pressure, const std::vector<double>& beta_grid,
    const DerivativeTolerances& tol = {}) {
  if (beta_grid.size() < 2) {
    throw DomainError("finite-difference checks need a beta grid of at least 2 points");
  }
  if (!std::is_sorted(beta_grid.begin(), beta_grid.end())) {
    throw DomainError("beta grid must be sorted");
  }

  auto beta_free_energy = [&](double beta) {
    const double r2 = scan_minimize_free_energy(alpha, beta, pressure);
    return beta * detail::free_energy(alpha, beta, pressure, r2);
  };

  std::vector<OracleReport> out;
  for (double beta : beta_grid) {
    const auto inputs = detail::describe(
        {{"alpha'", alpha}, {"p'", pressure}, {"beta'", beta}});

    const double h = detail::fd_step(beta);
    const double plus = beta_free_energy(beta + h);
    const double minus = beta_free_energy(beta - h);
    const double total = (plus - minus) / (2.0 * h);
    // FD round-off scales with |beta' F|, so that magnitude floors the bound
    out.push_back(make_report("enthalpy-vs-d(betaF)/dbeta", inputs, total,
                              thermo::enthalpy_of_beta(alpha, beta, pressure),
                              ToleranceKind::relative, tol.enthalpy,
                              0.5 * (std::abs(plus) + std::abs(minus))));

    const double hp = thermo::enthalpy_of_beta(alpha, beta + h, pressure);
    const double hm = thermo::enthalpy_of_beta(alpha, beta - h, pressure);
    const double cp_fd = -beta * beta * (hp - hm) / (2.0 * h);
    out.push_back(make_report("specific-heat-vs--beta^2 dH/dbeta", inputs,
                              cp_fd,
                              thermo::specific_heat(alpha, beta, pressure),
                              ToleranceKind::relative, tol.specific_heat));

    const double ht = detail::fd_step(beta) * 10.0;  // relative step 1e-4
    const double h_up = thermo::enthalpy_of_beta(alpha, beta + ht, pressure);
    const double h_dn = thermo::enthalpy_of_beta(alpha, beta - ht, pressure);
    const double s_up = thermo::entropy_per_filament(alpha, beta + ht, pressure, h_up);
    const double s_dn = thermo::entropy_per_filament(alpha, beta - ht, pressure, h_dn);
    out.push_back(make_report("beta-vs-dS/dH", inputs, beta,
                              (s_up - s_dn) / (h_up - h_dn),
                              ToleranceKind::relative, tol.temperature));
  }
  return out;
}

/// Convergence of the broken-segment free energy F(M) toward F along an
/// increasing list of segment counts, at fixed R^2 (the scanned minimizer).
inline std::vector<OracleReport> appendix_limit_check(
    double alpha, double beta, double pressure, const std::vector<int>& m_list,
    int n_filaments = 1) {
  if (m_list.size() < 3) {
    throw DomainError("appendix limit check needs at least 3 segment counts");
  }
  if (!std::is_sorted(m_list.begin(), m_list.end()) ||
      std::adjacent_find(m_list.begin(), m_list.end()) != m_list.end()) {
    throw DomainError("segment counts must be strictly increasing");
  }
  const double r2 = scan_minimize_free_energy(alpha, beta, pressure);
  const double h = detail::fd_step(beta);

  std::vector<double> gaps;
  std::vector<double> derivative_gaps;
  for (int m : m_list) {
    auto fm = [&](double b) {
      return thermo::finite_m_free_energy(alpha, b, pressure, n_filaments, m, r2).value;
    };
    auto f = [&](double b) { return detail::free_energy(alpha, b, pressure, r2); };
    gaps.push_back(std::abs(fm(beta) - f(beta)));
    const double dfm = (fm(beta + h) - fm(beta - h)) / (2.0 * h);
    const double df = (f(beta + h) - f(beta - h)) / (2.0 * h);
    derivative_gaps.push_back(std::abs(dfm - df));
  }

  auto violations = [](const std::vector<double>& v) {
    int count = 0;
    for (std::size_t i = 1; i < v.size(); ++i) count += !(v[i] < v[i - 1]);
    return count;
  };
  auto list = [](const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(6);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
  };
  const auto base = detail::describe(
      {{"alpha", alpha}, {"beta", beta}, {"p", pressure},
       {"N", static_cast<double>(n_filaments)}});

  std::vector<OracleReport> out;
  out.push_back(make_report("appendix-gap-decreasing",
                            base + " gaps=" + list(gaps), 0.0,
                            violations(gaps), ToleranceKind::absolute, 0.0));
  out.push_back(make_report("appendix-beta-derivative-gap-decreasing",
                            base + " gaps=" + list(derivative_gaps), 0.0,
                            violations(derivative_gaps), ToleranceKind::absolute,
                            0.0));

  // eta0 at M alpha beta R^2 = 1 is sqrt(2)
  const double unit_r2 = 1.0 / (m_list.front() * alpha * beta);
  const auto unit = thermo::finite_m_free_energy(alpha, beta, pressure,
                                                 n_filaments, m_list.front(),
                                                 unit_r2);
  out.push_back(make_report("appendix-eta0-unit", base, std::sqrt(2.0),
                            unit.eta0, ToleranceKind::absolute, 1e-15));
  return out;
}

} // namespace vortexmf::oracle

#endif // VORTEXMF_ORACLE_HPP
