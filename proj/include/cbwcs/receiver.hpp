// receiver.hpp - matched filtering, decision sampling and SVM feature windows
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cbwcs/waveform.hpp"

namespace cbwcs {

/// Symbols on each side of the decoded symbol that enter a feature window.
inline constexpr int kContextSymbols = 3;
inline constexpr int kWindowSymbols = 2 * kContextSymbols + 1;

/// Matched-filter output y plus the map from symbol index n to the array
/// index of its decision instant t = n / f.
class AlignedOutput {
 public:
  AlignedOutput(std::vector<double> y, double sample_rate, std::ptrdiff_t first_index,
                int stride);

  const std::vector<double>& y() const { return y_; }
  double sample_rate() const { return sample_rate_; }
  int stride() const { return stride_; }
  /// Number of symbols n >= 0 whose full sample period lies inside y.
  std::size_t n_symbols() const { return n_symbols_; }
  /// Array index of the decision instant of symbol n (unchecked).
  std::ptrdiff_t index_of(std::ptrdiff_t n) const { return first_index_ + n * stride_; }

 private:
  std::vector<double> y_;
  double sample_rate_;
  std::ptrdiff_t first_index_;
  int stride_;
  std::size_t n_symbols_;
};

/// y[k] = dt * sum_j g[j] r[k - j] with g(t) = p(-t) on the truncated support.
AlignedOutput matched_filter(const SampledWaveform& r, const BasisParams& p);

double sample_at_symbol(const AlignedOutput& a, std::ptrdiff_t n);

struct FeatureVector {
  std::vector<double> values;
  std::optional<int> label;
  std::ptrdiff_t center_symbol = 0;
};

/// The 7 n_r samples from the decision instant of symbol n-3 up to (not
/// including) that of n+4. Valid for 3 <= n < n_symbols - 3.
FeatureVector extract_features(const AlignedOutput& a, std::ptrdiff_t n);

/// Sliding window over probe symbols n in [3, len-4], each labelled with s_n.
std::vector<FeatureVector> build_training_set(const SymbolSeq& probe, const AlignedOutput& a);

/// Per-dimension affine map of the training min/max onto [-1, 1].
/// Constant dimensions map to 0.
class FeatureScaler {
 public:
  FeatureScaler() = default;
  static FeatureScaler fit(std::span<const FeatureVector> train);
  /// Pass-through scaler (lo = -1, hi = 1 in every dimension).
  static FeatureScaler identity(std::size_t dim);
  static FeatureScaler from_bounds(std::vector<double> lo, std::vector<double> hi);

  std::size_t dim() const { return lo_.size(); }
  bool is_identity() const { return identity_; }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }

  FeatureVector apply(const FeatureVector& fv) const;
  void apply_into(std::span<const double> in, std::span<double> out) const;

  friend bool operator==(const FeatureScaler&, const FeatureScaler&) = default;

 private:
  std::vector<double> lo_, hi_;
  bool identity_ = false;
};

}  // namespace cbwcs
