#ifndef VORTEXMF_BLOCKING_HPP
#define VORTEXMF_BLOCKING_HPP

// Error bars for correlated Monte Carlo series by recursive pairwise block
// averaging (block sizes 2^k).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace vortexmf {

struct BlockingLevel {
  std::size_t block_size = 1;
  std::size_t n_blocks = 0;
  double standard_error = 0.0;
};

struct BlockingEstimate {
  std::size_t count = 0;
  double mean = 0.0;
  double naive_error = 0.0;     ///< as if samples were independent
  double standard_error = 0.0;  ///< plateau estimate over block levels
  double autocorrelation_time = 0.5;  ///< tau_int = (se / naive)^2 / 2
  std::vector<BlockingLevel> levels;
};

namespace detail {

inline double standard_error_of_mean(std::span<const double> values,
                                     double mean) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
}

} // namespace detail

/// Levels with fewer than `min_blocks` blocks are too noisy to enter the
/// plateau estimate; the reported error is the largest over the remaining
/// levels.
inline BlockingEstimate blocking_analysis(std::span<const double> series,
                                          std::size_t min_blocks = 128) {
  BlockingEstimate out;
  out.count = series.size();
  if (series.empty()) return out;

  double sum = 0.0;
  for (double v : series) sum += v;
  out.mean = sum / static_cast<double>(series.size());

  std::vector<double> blocks(series.begin(), series.end());
  std::size_t block_size = 1;
  while (blocks.size() >= 2) {
    BlockingLevel level;
    level.block_size = block_size;
    level.n_blocks = blocks.size();
    level.standard_error = detail::standard_error_of_mean(blocks, out.mean);
    out.levels.push_back(level);

    // an odd trailing sample is dropped at the next level
    std::vector<double> next(blocks.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = 0.5 * (blocks[2 * i] + blocks[2 * i + 1]);
    }
    blocks = std::move(next);
    block_size *= 2;
  }

  if (out.levels.empty()) return out;
  out.naive_error = out.levels.front().standard_error;
  out.standard_error = out.naive_error;
  for (const auto& level : out.levels) {
    if (level.n_blocks >= min_blocks) {
      out.standard_error = std::max(out.standard_error, level.standard_error);
    }
  }
  if (out.naive_error > 0.0) {
    const double ratio = out.standard_error / out.naive_error;
    out.autocorrelation_time = 0.5 * ratio * ratio;
  }
  return out;
}

} // namespace vortexmf

#endif // VORTEXMF_BLOCKING_HPP
