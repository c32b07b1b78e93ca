#pragma once

// Localization-aware confidence from key-edge score distributions, and its
// blend with the classifier box score.

#include <span>
#include <stdexcept>

#include "sbd/codec.hpp"

namespace sbd {

inline constexpr double kDefaultGamma = 1.4;
inline constexpr int kDefaultWindow = 5;

struct RescoreParams {
  double gamma = kDefaultGamma;
  int window = kDefaultWindow;
};

/// Largest sum over fully contained windows of `window` consecutive entries.
/// Throws std::invalid_argument if window < 1 or window > dist.size().
inline double windowed_max_sum(std::span<const double> dist, int window) {
  if (window < 1) throw std::invalid_argument("windowed_max_sum: window must be positive");
  const auto w = static_cast<std::size_t>(window);
  if (w > dist.size()) throw std::invalid_argument("windowed_max_sum: window exceeds length");
  double sum = 0.0;
  for (std::size_t i = 0; i < w; ++i) sum += dist[i];
  double best = sum;
  for (std::size_t i = w; i < dist.size(); ++i) {
    sum += dist[i] - dist[i - w];
    if (sum > best) best = sum;
  }
  return best;
}

/// Mean windowed peak mass over the eight key edges.
inline double s_sbd(const KeDistributions& kd, int window = kDefaultWindow) {
  double acc = 0.0;
  for (auto d : kd.all()) acc += windowed_max_sum(d, window);
  return acc / 8.0;
}

/// ((2 - gamma) * s_box + gamma * s_sbd) / 2. gamma = 0 keeps the box score,
/// gamma = 2 uses the key-edge score alone.
inline double rescore(double s_box, double s_sbd_value, double gamma = kDefaultGamma) {
  if (!(gamma >= 0.0 && gamma <= 2.0))
    throw std::invalid_argument("rescore: gamma must lie in [0, 2]");
  return ((2.0 - gamma) * s_box + gamma * s_sbd_value) / 2.0;
}

}  // namespace sbd
