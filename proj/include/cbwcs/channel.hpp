// channel.hpp - multipath tap model and additive white Gaussian noise
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cbwcs/rng.hpp"
#include "cbwcs/waveform.hpp"

namespace cbwcs {

struct Tap {
  double tau = 0.0;    ///< delay, same time units as the basis (1/f per symbol)
  double alpha = 1.0;  ///< real path gain
};

/// h(t) = sum_l alpha_l delta(t - tau_l), with tau_0 = 0 < tau_1 < ... .
class MultipathChannel {
 public:
  /// Validates tau_0 = 0 and strictly increasing delays; L >= 1.
  explicit MultipathChannel(std::vector<Tap> taps, std::optional<double> gamma = std::nullopt);

  static MultipathChannel identity() { return MultipathChannel({Tap{0.0, 1.0}}); }

  const std::vector<Tap>& taps() const { return taps_; }
  std::optional<double> gamma() const { return gamma_; }
  std::size_t path_count() const { return taps_.size(); }
  double max_delay() const { return taps_.back().tau; }

 private:
  std::vector<Tap> taps_;
  std::optional<double> gamma_;
};

/// alpha_l = exp(-gamma tau_l).
MultipathChannel make_exponential_channel(std::span<const double> delays, double gamma);

struct PropagateOptions {
  /// Round off-grid delays to the nearest sample instead of rejecting them.
  bool allow_rounding = false;
};

/// Noise-free received signal r[k] = sum_l alpha_l x[k - d_l], with d_l the
/// delay in samples. The output is longer than the input by the largest d_l.
SampledWaveform propagate(const SampledWaveform& x, const MultipathChannel& ch,
                          PropagateOptions opts = {});

struct NoiseSpec {
  double sigma_w = 0.0;  ///< continuous noise intensity; per-sample variance is sigma_w^2 * sample_rate
  std::uint64_t seed = 0;
};

SampledWaveform add_awgn(const SampledWaveform& x, const NoiseSpec& n);

/// One uniform draw of the damping coefficient from [lo, hi].
double draw_time_varying(std::pair<double, double> gamma_range, Rng& rng);

}  // namespace cbwcs
