#ifndef VORTEXMF_ENSEMBLE_HPP
#define VORTEXMF_ENSEMBLE_HPP

// Broken-segment filament configurations and their discretized energies.
//
// A filament is M planar points psi_{i,k} at heights tau_k = k/M, periodic in
// k. Integrals over tau become left-endpoint sums with weight 1/M. Energies
// are in unscaled units (alpha, p); conversion from the scaled parameters
// happens in the sampler.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vortexmf/errors.hpp"

namespace vortexmf {

using Point = std::complex<double>;

enum class Hamiltonian { pairwise, mean_field };

inline std::string_view to_string(Hamiltonian kind) {
  return kind == Hamiltonian::pairwise ? "pairwise" : "mean-field";
}

inline Hamiltonian parse_hamiltonian(std::string_view name) {
  if (name == "pairwise" || name == "full-pairwise") return Hamiltonian::pairwise;
  if (name == "mean-field" || name == "mean_field") return Hamiltonian::mean_field;
  throw UsageError("unknown hamiltonian '" + std::string(name) +
                   "' (expected pairwise or mean-field)");
}

class FilamentEnsemble {
public:
  FilamentEnsemble(int n_filaments, int n_segments, double alpha,
                   double pressure)
      : n_(n_filaments), m_(n_segments), alpha_(alpha), pressure_(pressure) {
    if (n_ < 1) throw DomainError("n_filaments must be >= 1");
    if (m_ < 2) throw DomainError("n_segments must be >= 2");
    if (!std::isfinite(alpha_) || alpha_ < 0.0) {
      throw DomainError("alpha must be finite and non-negative");
    }
    if (!std::isfinite(pressure_) || pressure_ < 0.0) {
      throw DomainError("pressure must be finite and non-negative");
    }
    points_.assign(static_cast<std::size_t>(n_) * m_, Point{});
  }

  int n_filaments() const noexcept { return n_; }
  int n_segments() const noexcept { return m_; }
  double alpha() const noexcept { return alpha_; }
  double pressure() const noexcept { return pressure_; }

  /// Plane index is taken modulo M.
  const Point& at(int filament, int plane) const {
    return points_[index(filament, wrap(plane))];
  }

  /// All N points of one plane, indexed by filament.
  std::span<const Point> plane(int k) const {
    return {points_.data() + index(0, wrap(k)), static_cast<std::size_t>(n_)};
  }

  void set(int filament, int plane, Point value) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
      throw DomainError("filament coordinates must be finite");
    }
    points_[index(filament, wrap(plane))] = value;
  }

  void translate_filament(int filament, Point shift) {
    for (int k = 0; k < m_; ++k) {
      set(filament, k, at(filament, k) + shift);
    }
  }

  /// Places filament i straight (all planes equal) at `where`.
  void set_straight(int filament, Point where) {
    for (int k = 0; k < m_; ++k) set(filament, k, where);
  }

  bool operator==(const FilamentEnsemble& other) const = default;

private:
  // plane-major storage: the points of one plane are contiguous
  std::size_t index(int filament, int plane) const noexcept {
    return static_cast<std::size_t>(plane) * n_ + filament;
  }
  int wrap(int plane) const noexcept {
    const int r = plane % m_;
    return r < 0 ? r + m_ : r;
  }

  int n_;
  int m_;
  double alpha_;
  double pressure_;
  std::vector<Point> points_;
};

struct EnergyBreakdown {
  double self_energy = 0.0;
  double interaction_energy = 0.0;
  double angular_momentum = 0.0;
  double enthalpy = 0.0;
  Hamiltonian kind = Hamiltonian::mean_field;
};

/// Change of each energy term under a proposed move.
struct EnergyDelta {
  double self_energy = 0.0;
  double interaction_energy = 0.0;
  double angular_momentum = 0.0;

  double enthalpy(double pressure) const {
    return self_energy + interaction_energy + pressure * angular_momentum;
  }
};

namespace detail {

// log|z| with the 1e-300 separation guard.
inline double guarded_log_distance(Point z) {
  const double d2 = std::norm(z);
  if (d2 > 1e-290) return 0.5 * std::log(d2);
  const double d = std::abs(z);
  if (!(d >= 1e-300)) {
    throw SingularConfigurationError("coincident filaments in a plane");
  }
  return std::log(d);
}

// Sum over j != skip of log|z - psi_{j,plane}|.
inline double log_distance_sum(const FilamentEnsemble& e, int plane, int skip,
                               Point z) {
  const auto points = e.plane(plane);
  double sum = 0.0;
  for (int j = 0; j < static_cast<int>(points.size()); ++j) {
    if (j == skip) continue;
    sum += guarded_log_distance(z - points[j]);
  }
  return sum;
}

} // namespace detail

/// alpha (M/2) sum_i sum_k |psi_{i,k+1} - psi_{i,k}|^2
inline double self_energy(const FilamentEnsemble& e) {
  double sum = 0.0;
  for (int i = 0; i < e.n_filaments(); ++i) {
    for (int k = 0; k < e.n_segments(); ++k) {
      sum += std::norm(e.at(i, k + 1) - e.at(i, k));
    }
  }
  return e.alpha() * 0.5 * e.n_segments() * sum;
}

/// (1/M) sum_{i,k} |psi_{i,k}|^2
inline double angular_momentum(const FilamentEnsemble& e) {
  double sum = 0.0;
  for (int k = 0; k < e.n_segments(); ++k) {
    for (int i = 0; i < e.n_filaments(); ++i) {
      sum += std::norm(e.at(i, k));
    }
  }
  return sum / e.n_segments();
}

/// -(1/2)(1/M) sum_k sum_{i != j} log|psi_{i,k} - psi_{j,k}|
inline double interaction_energy_pairwise(const FilamentEnsemble& e) {
  double sum = 0.0;
  for (int k = 0; k < e.n_segments(); ++k) {
    const auto points = e.plane(k);
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        sum += detail::guarded_log_distance(points[i] - points[j]);
      }
    }
  }
  // each unordered pair stands for two ordered pairs times the 1/2 prefactor
  return -sum / e.n_segments();
}

/// -(N^2/4) log R^2 with R^2 = M_N / N taken from the configuration.
inline double interaction_energy_meanfield_at(int n_filaments,
                                              double angular_momentum) {
  if (!(angular_momentum > 0.0)) {
    throw SingularConfigurationError(
        "mean-field interaction needs positive angular momentum");
  }
  const double n = static_cast<double>(n_filaments);
  return -0.25 * n * n * std::log(angular_momentum / n);
}

inline double interaction_energy_meanfield(const FilamentEnsemble& e) {
  return interaction_energy_meanfield_at(e.n_filaments(), angular_momentum(e));
}

inline EnergyBreakdown enthalpy(const FilamentEnsemble& e, Hamiltonian kind) {
  EnergyBreakdown b;
  b.kind = kind;
  b.self_energy = self_energy(e);
  b.angular_momentum = angular_momentum(e);
  b.interaction_energy =
      kind == Hamiltonian::pairwise
          ? interaction_energy_pairwise(e)
          : interaction_energy_meanfield_at(e.n_filaments(), b.angular_momentum);
  b.enthalpy = b.self_energy + b.interaction_energy +
               e.pressure() * b.angular_momentum;
  return b;
}

/// Incremental change from moving bead (i, k) to `target`. `angular_momentum`
/// is the configuration's current M_N, needed only by the mean-field kind.
/// Cost is O(1) for mean-field and O(N) for pairwise.
inline EnergyDelta delta_single_bead(const FilamentEnsemble& e, Hamiltonian kind,
                                     double angular_momentum, int filament,
                                     int plane, Point target) {
  EnergyDelta d;
  const Point old = e.at(filament, plane);
  if (target == old) return d;

  const Point prev = e.at(filament, plane - 1);
  const Point next = e.at(filament, plane + 1);
  const double stretch = std::norm(next - target) - std::norm(next - old) +
                         std::norm(target - prev) - std::norm(old - prev);
  d.self_energy = e.alpha() * 0.5 * e.n_segments() * stretch;

  const double m = static_cast<double>(e.n_segments());
  d.angular_momentum = (std::norm(target) - std::norm(old)) / m;

  if (kind == Hamiltonian::pairwise) {
    const double after = detail::log_distance_sum(e, plane, filament, target);
    const double before = detail::log_distance_sum(e, plane, filament, old);
    d.interaction_energy = -(after - before) / m;
  } else {
    const double updated = angular_momentum + d.angular_momentum;
    if (!(updated > 0.0)) {
      throw SingularConfigurationError("move drives angular momentum to zero");
    }
    const double n = static_cast<double>(e.n_filaments());
    d.interaction_energy =
        -0.25 * n * n * std::log1p(d.angular_momentum / angular_momentum);
  }
  return d;
}

/// Convenience form that recomputes M_N first; O(NM).
inline double delta_enthalpy_single_bead(const FilamentEnsemble& e,
                                         Hamiltonian kind, int filament,
                                         int plane, Point target) {
  return delta_single_bead(e, kind, angular_momentum(e), filament, plane, target)
      .enthalpy(e.pressure());
}

/// Incremental change from rigidly shifting filament i. The self-energy is
/// translation invariant.
inline EnergyDelta delta_translate_filament(const FilamentEnsemble& e,
                                            Hamiltonian kind,
                                            double angular_momentum,
                                            int filament, Point shift) {
  EnergyDelta d;
  if (shift == Point{}) return d;
  const double m = static_cast<double>(e.n_segments());

  double norm_change = 0.0;
  for (int k = 0; k < e.n_segments(); ++k) {
    const Point old = e.at(filament, k);
    norm_change += std::norm(old + shift) - std::norm(old);
  }
  d.angular_momentum = norm_change / m;

  if (kind == Hamiltonian::pairwise) {
    double change = 0.0;
    for (int k = 0; k < e.n_segments(); ++k) {
      const Point old = e.at(filament, k);
      change += detail::log_distance_sum(e, k, filament, old + shift) -
                detail::log_distance_sum(e, k, filament, old);
    }
    d.interaction_energy = -change / m;
  } else {
    const double updated = angular_momentum + d.angular_momentum;
    if (!(updated > 0.0)) {
      throw SingularConfigurationError("move drives angular momentum to zero");
    }
    const double n = static_cast<double>(e.n_filaments());
    d.interaction_energy =
        -0.25 * n * n * std::log1p(d.angular_momentum / angular_momentum);
  }
  return d;
}

} // namespace vortexmf

#endif // VORTEXMF_ENSEMBLE_HPP
