#ifndef VORTEXMF_RANDOM_HPP
#define VORTEXMF_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vortexmf/ensemble.hpp"
#include "vortexmf/errors.hpp"

namespace vortexmf {

using Rng = std::mt19937_64;

inline constexpr const char* kRngAlgorithm = "mt19937_64";

/// Named sub-streams derived from the single run seed.
enum class Stream : std::uint32_t { init = 1, chain = 2, oracle = 3 };

inline Rng make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x9e3779b9u};
  return Rng(seq);
}

/// Uniform in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int uniform_index(Rng& rng, int n) {
  return static_cast<int>(uniform01(rng) * n);
}

/// Uniform point in the disk of the given radius, by rejection from the
/// bounding square.
inline Point uniform_in_disk(Rng& rng, double radius) {
  for (;;) {
    const double x = 2.0 * uniform01(rng) - 1.0;
    const double y = 2.0 * uniform01(rng) - 1.0;
    if (x * x + y * y < 1.0) return {radius * x, radius * y};
  }
}

/// Full state words, in the order the standard stream operators use.
inline std::vector<std::uint64_t> rng_state_words(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  std::istringstream is(os.str());
  std::vector<std::uint64_t> words;
  std::uint64_t w = 0;
  while (is >> w) words.push_back(w);
  return words;
}

inline Rng rng_from_state_words(const std::vector<std::uint64_t>& words) {
  std::ostringstream os;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) os << ' ';
    os << words[i];
  }
  std::istringstream is(os.str());
  Rng rng;
  is >> rng;
  if (is.fail()) throw CheckpointError("corrupt " + std::string(kRngAlgorithm) + " state");
  return rng;
}

} // namespace vortexmf

#endif // VORTEXMF_RANDOM_HPP
