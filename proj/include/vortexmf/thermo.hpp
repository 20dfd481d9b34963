#ifndef VORTEXMF_THERMO_HPP
#define VORTEXMF_THERMO_HPP

// Closed-form thermodynamics of the mean-field filament bundle in the
// non-extensive large-N limit. Every quantity here is per filament and in
// scaled units: alpha' = alpha/N, p' = p/N, beta' = beta*N, H0' = H0/N.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "vortexmf/errors.hpp"

namespace vortexmf::thermo {

namespace detail {

inline void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    throw DomainError(std::string(name) + " must be positive and finite, got " +
                      std::to_string(value));
  }
}

inline void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be finite");
  }
}

// u = 32 p' / (alpha' beta'^2); shows up in R^2 and c_p.
inline double pressure_ratio(double alpha, double beta, double pressure) {
  return 32.0 * pressure / (alpha * beta * beta);
}

} // namespace detail

/// Model parameters after the non-extensive scaling. Exactly one of
/// beta_scaled and enthalpy_per_filament is the independent variable.
struct ScaledParams {
  double alpha_scaled = 1.0;
  double pressure_scaled = 1.0;
  std::optional<double> beta_scaled;
  std::optional<double> enthalpy_per_filament;

  static ScaledParams with_beta(double alpha, double pressure, double beta) {
    ScaledParams p;
    p.alpha_scaled = alpha;
    p.pressure_scaled = pressure;
    p.beta_scaled = beta;
    return p;
  }

  static ScaledParams with_enthalpy(double alpha, double pressure, double h0) {
    ScaledParams p;
    p.alpha_scaled = alpha;
    p.pressure_scaled = pressure;
    p.enthalpy_per_filament = h0;
    return p;
  }

  void validate() const {
    detail::require_positive(alpha_scaled, "alpha_scaled");
    detail::require_positive(pressure_scaled, "pressure_scaled");
    if (beta_scaled.has_value() == enthalpy_per_filament.has_value()) {
      throw DomainError(
          "exactly one of beta_scaled and enthalpy_per_filament must be set");
    }
    if (beta_scaled) {
      detail::require_positive(*beta_scaled, "beta_scaled");
    } else {
      detail::require_finite(*enthalpy_per_filament, "enthalpy_per_filament");
    }
  }
};

/// One solved state of the most-probable macrostate.
struct ThermoPoint {
  ScaledParams params;
  double beta = 0.0;  ///< beta0', whether given or solved for
  double r_squared = 0.0;
  double free_energy = 0.0;
  double entropy = 0.0;  ///< S = (1/N) log Z_N
  double enthalpy = 0.0;
  double temperature = 0.0;
  double specific_heat = 0.0;
};

/// Most-probable mean-square radius: the positive stationary point of F(R^2).
inline double mean_square_radius(double alpha, double beta, double pressure) {
  detail::require_positive(alpha, "alpha_scaled");
  detail::require_positive(beta, "beta_scaled");
  detail::require_positive(pressure, "pressure_scaled");
  // (b^2 a + sqrt(b^4 a^2 + 32 a b^2 p)) / (8 a b^2 p) with a b^2 divided out
  const double u = detail::pressure_ratio(alpha, beta, pressure);
  return (1.0 + std::sqrt(1.0 + u)) / (8.0 * pressure);
}

/// F(R^2) = p'R^2 - log(R^2)/4 + 1/(2 alpha' beta'^2 R^2), at any R^2 > 0.
inline double free_energy(double alpha, double beta, double pressure,
                          double r_squared) {
  detail::require_positive(alpha, "alpha_scaled");
  detail::require_positive(beta, "beta_scaled");
  detail::require_positive(pressure, "pressure_scaled");
  detail::require_positive(r_squared, "r_squared");
  return pressure * r_squared - 0.25 * std::log(r_squared) +
         1.0 / (2.0 * alpha * beta * beta * r_squared);
}

/// H0' = d(beta' F)/d beta'. R^2 is stationary for F, so only the explicit
/// beta' dependence contributes.
inline double enthalpy_of_beta(double alpha, double beta, double pressure) {
  const double r2 = mean_square_radius(alpha, beta, pressure);
  return pressure * r2 - 0.25 * std::log(r2) -
         1.0 / (2.0 * alpha * beta * beta * r2);
}

/// beta' -> infinity limit of enthalpy_of_beta: (1 + log(4p'))/4.
inline double enthalpy_supremum(double pressure) {
  detail::require_positive(pressure, "pressure_scaled");
  return 0.25 * (1.0 + std::log(4.0 * pressure));
}

/// c_p = (beta'/4) (alpha' beta'^2 / sqrt(alpha' beta'^2 (alpha' beta'^2 + 32 p')) - 1).
/// Zero at p' = 0, strictly negative for p' > 0.
inline double specific_heat(double alpha, double beta, double pressure) {
  detail::require_positive(alpha, "alpha_scaled");
  detail::require_positive(beta, "beta_scaled");
  if (!std::isfinite(pressure) || pressure < 0.0) {
    throw DomainError("pressure_scaled must be non-negative and finite");
  }
  // 1/s - 1 = -(s - 1)/s = -u / (s (s + 1)), s = sqrt(1 + u); no cancellation
  const double u = detail::pressure_ratio(alpha, beta, pressure);
  const double s = std::sqrt(1.0 + u);
  return -0.25 * beta * u / (s * (s + 1.0));
}

/// Maximal entropy per filament at a caller-supplied enthalpy H0'.
inline double entropy_per_filament(double alpha, double beta, double pressure,
                                   double enthalpy) {
  detail::require_finite(enthalpy, "enthalpy_per_filament");
  const double r2 = mean_square_radius(alpha, beta, pressure);
  return beta * enthalpy + 0.25 * beta * std::log(r2) -
         1.0 / (2.0 * alpha * beta * r2) - beta * pressure * r2;
}

/// Inverts the strictly increasing map beta' -> H0' by bisection.
inline double solve_beta_for_enthalpy(double alpha, double pressure,
                                      double enthalpy) {
  detail::require_positive(alpha, "alpha_scaled");
  detail::require_positive(pressure, "pressure_scaled");
  detail::require_finite(enthalpy, "enthalpy_per_filament");
  const double sup = enthalpy_supremum(pressure);
  if (enthalpy >= sup) {
    throw UnreachableEnthalpyError(enthalpy, sup);
  }

  constexpr double kMinBeta = 1e-12;
  constexpr double kMaxBeta = 1e12;
  auto h = [&](double beta) { return enthalpy_of_beta(alpha, beta, pressure); };

  double lo = 1e-6;
  double hi = 1e6;
  while (h(lo) > enthalpy) {
    lo /= 10.0;
    if (lo < kMinBeta) {
      throw ConvergenceError("cannot bracket enthalpy " +
                             std::to_string(enthalpy) + " from below");
    }
  }
  while (h(hi) < enthalpy) {
    hi *= 10.0;
    if (hi > kMaxBeta) {
      throw ConvergenceError("cannot bracket enthalpy " +
                             std::to_string(enthalpy) + " from above");
    }
  }

  // bracket shrinks to a few ulps of beta, tighter than 1e-12 absolute for
  // any beta below ~10^3
  for (int iter = 0; iter < 400; ++iter) {
    const double width = hi - lo;
    if (width <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      break;
    }
    // geometric midpoint while the bracket spans decades
    const double mid = (hi > 4.0 * lo) ? std::sqrt(lo * hi) : lo + 0.5 * width;
    if (h(mid) < enthalpy) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double beta = lo + 0.5 * (hi - lo);
  const double residual = std::abs(h(beta) - enthalpy);
  if (residual > 1e-10 * std::max(1.0, std::abs(enthalpy))) {
    throw ConvergenceError("bisection residual " + std::to_string(residual) +
                           " exceeds tolerance");
  }
  return beta;
}

inline ThermoPoint solve_point(const ScaledParams& params) {
  params.validate();
  const double a = params.alpha_scaled;
  const double p = params.pressure_scaled;

  ThermoPoint point;
  point.params = params;
  point.beta = params.beta_scaled ? *params.beta_scaled
                                  : solve_beta_for_enthalpy(
                                        a, p, *params.enthalpy_per_filament);
  point.r_squared = mean_square_radius(a, point.beta, p);
  point.free_energy = free_energy(a, point.beta, p, point.r_squared);
  point.enthalpy = params.enthalpy_per_filament
                       ? *params.enthalpy_per_filament
                       : enthalpy_of_beta(a, point.beta, p);
  point.entropy = entropy_per_filament(a, point.beta, p, point.enthalpy);
  point.temperature = 1.0 / point.beta;
  point.specific_heat = specific_heat(a, point.beta, p);
  return point;
}

/// Broken-segment free energy with M segments, in unscaled units.
struct FiniteMFreeEnergy {
  double value = 0.0;
  double eta0 = 0.0;
  double eta0_minus_one = 0.0;
};

/// F(M) = pR^2 - (N/4) log R^2 - (M^2 alpha/beta) R^2 (eta0 - 1)
///        - (M/beta) log(eta0 + sqrt(eta0^2 - 1)),
/// eta0 = sqrt(1/(M alpha beta R^2)^2 + 1).
inline FiniteMFreeEnergy finite_m_free_energy(double alpha, double beta,
                                              double pressure, int n_filaments,
                                              int n_segments,
                                              double r_squared) {
  detail::require_positive(alpha, "alpha");
  detail::require_positive(beta, "beta");
  detail::require_positive(pressure, "pressure");
  detail::require_positive(r_squared, "r_squared");
  if (n_filaments < 1 || n_segments < 1) {
    throw DomainError("filament and segment counts must be positive");
  }
  const double m = static_cast<double>(n_segments);
  const double x = m * alpha * beta * r_squared;
  const double inv_x2 = 1.0 / (x * x);
  const double root = std::sqrt(inv_x2 + 1.0);

  FiniteMFreeEnergy out;
  out.eta0 = root;
  out.eta0_minus_one = inv_x2 / (root + 1.0);
  // sqrt(eta0^2 - 1) = 1/x exactly, so the log term is asinh(1/x)
  const double log_term = std::asinh(1.0 / x);
  out.value = pressure * r_squared -
              0.25 * static_cast<double>(n_filaments) * std::log(r_squared) -
              (m * m * alpha / beta) * r_squared * out.eta0_minus_one -
              (m / beta) * log_term;
  return out;
}

} // namespace vortexmf::thermo

#endif // VORTEXMF_THERMO_HPP
