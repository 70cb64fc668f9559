#include "cbwcs/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cbwcs {

AlignedOutput::AlignedOutput(std::vector<double> y, double sample_rate,
                             std::ptrdiff_t first_index, int stride)
    : y_(std::move(y)), sample_rate_(sample_rate), first_index_(first_index), stride_(stride) {
  if (stride_ < 1) throw std::invalid_argument("AlignedOutput: stride must be positive");
  const auto len = static_cast<std::ptrdiff_t>(y_.size());
  const std::ptrdiff_t room = len - first_index_ - stride_;
  n_symbols_ = room < 0 ? 0 : static_cast<std::size_t>(room / stride_ + 1);
}

AlignedOutput matched_filter(const SampledWaveform& r, const BasisParams& p) {
  if (std::abs(r.sample_rate - p.sample_rate()) > 1e-12 * p.sample_rate()) {
    throw std::invalid_argument("matched_filter: sample rate does not match n_r * f");
  }
  // taps[m + lead] = p(m dt) for m in [-lead, n_r]; the correlation
  //   y(t_k) = integral p(s) r(t_k + s) ds ~ dt * sum_m p(m dt) r[k + m]
  // is the convolution with g[j] = p((n_r - j) dt), whose t = 0 tap sits at j = n_r.
  const auto taps = sampled_basis(p);
  const std::size_t support = taps.size();
  if (r.size() < support) {
    throw std::invalid_argument("matched_filter: waveform shorter than filter support (" +
                                std::to_string(r.size()) + " < " + std::to_string(support) + ")");
  }
  std::vector<double> g(taps.rbegin(), taps.rend());

  const double dt = p.dt();
  std::vector<double> y(r.size() + support - 1, 0.0);
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double v = r.samples[k] * dt;
    if (v == 0.0) continue;
    double* out = y.data() + k;
    for (std::size_t j = 0; j < support; ++j) out[j] += g[j] * v;
  }
  // Full-convolution index q corresponds to r index q - n_r.
  const std::ptrdiff_t first = r.t0_index + p.n_r;
  return AlignedOutput(std::move(y), r.sample_rate, first, p.n_r);
}

double sample_at_symbol(const AlignedOutput& a, std::ptrdiff_t n) {
  if (n < 0 || static_cast<std::size_t>(n) >= a.n_symbols()) {
    throw std::out_of_range("sample_at_symbol: symbol " + std::to_string(n) + " out of range");
  }
  return a.y()[static_cast<std::size_t>(a.index_of(n))];
}

FeatureVector extract_features(const AlignedOutput& a, std::ptrdiff_t n) {
  const auto count = static_cast<std::ptrdiff_t>(a.n_symbols());
  if (n < kContextSymbols || n >= count - kContextSymbols) {
    throw std::out_of_range("extract_features: symbol " + std::to_string(n) +
                            " lacks a full context window");
  }
  const auto begin = a.y().begin() + a.index_of(n - kContextSymbols);
  const auto end = a.y().begin() + a.index_of(n + kContextSymbols + 1);
  return FeatureVector{std::vector<double>(begin, end), std::nullopt, n};
}

std::vector<FeatureVector> build_training_set(const SymbolSeq& probe, const AlignedOutput& a) {
  if (probe.size() < static_cast<std::size_t>(kWindowSymbols)) {
    throw std::invalid_argument("build_training_set: probe shorter than one window");
  }
  const auto last = static_cast<std::ptrdiff_t>(probe.size()) - kContextSymbols;
  std::vector<FeatureVector> out;
  out.reserve(static_cast<std::size_t>(last - kContextSymbols));
  for (std::ptrdiff_t n = kContextSymbols; n < last; ++n) {
    auto fv = extract_features(a, n);
    fv.label = probe[static_cast<std::size_t>(n)];
    out.push_back(std::move(fv));
  }
  return out;
}

FeatureScaler FeatureScaler::fit(std::span<const FeatureVector> train) {
  if (train.empty()) throw std::invalid_argument("FeatureScaler::fit: empty training set");
  const std::size_t dim = train.front().values.size();
  std::vector<double> lo(train.front().values), hi(train.front().values);
  for (const auto& fv : train) {
    if (fv.values.size() != dim) throw std::invalid_argument("FeatureScaler::fit: ragged vectors");
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], fv.values[d]);
      hi[d] = std::max(hi[d], fv.values[d]);
    }
  }
  return from_bounds(std::move(lo), std::move(hi));
}

FeatureScaler FeatureScaler::identity(std::size_t dim) {
  auto s = from_bounds(std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0));
  s.identity_ = true;
  return s;
}

FeatureScaler FeatureScaler::from_bounds(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("FeatureScaler: bound size mismatch");
  FeatureScaler s;
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

void FeatureScaler::apply_into(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dim() || out.size() != dim()) {
    throw std::invalid_argument("FeatureScaler: dimension mismatch");
  }
  if (identity_) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  for (std::size_t d = 0; d < dim(); ++d) {
    const double span = hi_[d] - lo_[d];
    out[d] = span > 0.0 ? 2.0 * (in[d] - lo_[d]) / span - 1.0 : 0.0;
  }
}

FeatureVector FeatureScaler::apply(const FeatureVector& fv) const {
  FeatureVector out{std::vector<double>(fv.values.size()), fv.label, fv.center_symbol};
  apply_into(fv.values, out.values);
  return out;
}

}  // namespace cbwcs
