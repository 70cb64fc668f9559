#include "cbwcs/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cbwcs {

namespace {
constexpr double kGridTol = 1e-9;
}

MultipathChannel::MultipathChannel(std::vector<Tap> taps, std::optional<double> gamma)
    : taps_(std::move(taps)), gamma_(gamma) {
  if (taps_.empty()) throw std::invalid_argument("channel: at least one tap required");
  if (taps_.front().tau != 0.0) throw std::invalid_argument("channel: first delay must be 0");
  for (std::size_t l = 1; l < taps_.size(); ++l) {
    if (!(taps_[l].tau > taps_[l - 1].tau)) {
      throw std::invalid_argument("channel: delays must be strictly increasing");
    }
  }
}

MultipathChannel make_exponential_channel(std::span<const double> delays, double gamma) {
  if (delays.empty()) throw std::invalid_argument("channel: empty delay list");
  std::vector<Tap> taps;
  taps.reserve(delays.size());
  for (double tau : delays) {
    if (tau < 0.0) throw std::invalid_argument("channel: negative delay");
    taps.push_back({tau, std::exp(-gamma * tau)});
  }
  return MultipathChannel(std::move(taps), gamma);
}

SampledWaveform propagate(const SampledWaveform& x, const MultipathChannel& ch,
                          PropagateOptions opts) {
  std::vector<std::size_t> shifts;
  shifts.reserve(ch.path_count());
  for (const auto& tap : ch.taps()) {
    const double exact = tap.tau * x.sample_rate;
    const double nearest = std::round(exact);
    if (std::abs(exact - nearest) > kGridTol && !opts.allow_rounding) {
      throw std::invalid_argument("propagate: delay " + std::to_string(tap.tau) +
                                  " is not on the sample grid");
    }
    shifts.push_back(static_cast<std::size_t>(nearest));
  }

  SampledWaveform r;
  r.sample_rate = x.sample_rate;
  r.t0_index = x.t0_index;
  r.samples.assign(x.size() + shifts.back(), 0.0);
  for (std::size_t l = 0; l < shifts.size(); ++l) {
    const double a = ch.taps()[l].alpha;
    double* out = r.samples.data() + shifts[l];
    for (std::size_t k = 0; k < x.size(); ++k) out[k] += a * x.samples[k];
  }
  return r;
}

SampledWaveform add_awgn(const SampledWaveform& x, const NoiseSpec& n) {
  if (n.sigma_w < 0.0) throw std::invalid_argument("add_awgn: sigma_w must be non-negative");
  SampledWaveform out = x;
  if (n.sigma_w == 0.0) return out;
  Rng rng(n.seed);
  std::normal_distribution<double> gauss(0.0, n.sigma_w * std::sqrt(x.sample_rate));
  for (auto& v : out.samples) v += gauss(rng);
  return out;
}

double draw_time_varying(std::pair<double, double> gamma_range, Rng& rng) {
  const auto [lo, hi] = gamma_range;
  if (!(lo >= 0.0) || !(hi >= lo)) throw std::invalid_argument("gamma_range must satisfy 0 <= lo <= hi");
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace cbwcs
