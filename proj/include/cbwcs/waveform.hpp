// waveform.hpp - chaotic basis function and baseband synthesis
//
// The transmitter superposes time-shifted copies of the basis p(t), one per
// bipolar symbol, spaced by the symbol period 1/f:
//
//   x(t) = sum_n s_n * p(t - n/f)
//
// p(t) grows as a damped oscillation for t < 0, follows a fixed segment on
// [0, 1/f) and is zero afterwards. All time values are in units where one
// symbol period equals 1/f.

#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace cbwcs {

/// Which middle-branch form of the basis function is evaluated.
///
/// `AsPrinted` uses exp(-beta (t - 1/f)) in the [0, 1/f) segment, which is
/// discontinuous at t = 0. `Continuous` uses exp(+beta (t - 1/f)), which joins
/// both neighbouring branches (p(0) = 1 - exp(-beta/f), p(1/f) = 0).
enum class BasisVariant { AsPrinted, Continuous };

struct BasisParams {
  double beta = std::numbers::ln2;
  double f = 1.0;
  double omega = 2.0 * std::numbers::pi;
  int n_p = 6;
  int n_r = 16;
  BasisVariant variant = BasisVariant::Continuous;

  /// Validates 0 < beta <= f ln 2, n_p >= 0, n_r >= 1, derives omega = 2 pi f
  /// and selects the basis variant through the branch continuity self-check.
  static BasisParams make(double beta = std::numbers::ln2, double f = 1.0,
                          int n_p = 6, int n_r = 16);

  double sample_rate() const { return n_r * f; }
  double dt() const { return 1.0 / sample_rate(); }
  double period() const { return 1.0 / f; }
};

/// One-sided limits of p(t) at t = 0 for both middle-branch variants.
struct ContinuityReport {
  double left_limit = 0.0;
  double right_limit_printed = 0.0;
  double right_limit_continuous = 0.0;
  bool printed_is_continuous = false;
  BasisVariant selected = BasisVariant::Continuous;
};

/// Startup self-check for the t = 0 branch join. The printed variant is kept
/// only when its limits agree within 1e-6.
ContinuityReport check_branch_continuity(double beta, double f);

double basis_value(double t, const BasisParams& p);

/// Ordered bipolar symbols; every element is exactly -1 or +1.
class SymbolSeq {
 public:
  SymbolSeq() = default;
  explicit SymbolSeq(std::vector<int> symbols);

  /// Maps bit 0 -> -1 and bit 1 -> +1.
  static SymbolSeq from_bits(std::span<const std::uint8_t> bits);

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  int operator[](std::size_t i) const { return symbols_[i]; }
  std::span<const int> view() const { return symbols_; }
  const std::vector<int>& values() const { return symbols_; }

  SymbolSeq negated() const;
  SymbolSeq slice(std::size_t first, std::size_t count) const;
  void append(const SymbolSeq& tail);

  friend bool operator==(const SymbolSeq&, const SymbolSeq&) = default;

 private:
  std::vector<int> symbols_;
};

/// Uniformly sampled real waveform. Sample k sits at t = (k - t0_index) / sample_rate.
struct SampledWaveform {
  std::vector<double> samples;
  double sample_rate = 16.0;
  std::ptrdiff_t t0_index = 0;

  double time_at(std::ptrdiff_t k) const {
    return static_cast<double>(k - t0_index) / sample_rate;
  }
  std::size_t size() const { return samples.size(); }
};

/// p(t) sampled at t = j / (n_r f) - n_p / f for j = 0 .. (n_p + 1) n_r, i.e.
/// the truncated support [-n_p/f, 1/f] inclusive.
std::vector<double> sampled_basis(const BasisParams& p);

/// Baseband for a symbol sequence. Symbol n is centred at t = n / f; the
/// output spans t in [-n_p/f, (len+1)/f] so edge tails are retained.
SampledWaveform generate_baseband(const SymbolSeq& s, const BasisParams& p);

/// Same synthesis sum with arbitrary real coefficients in place of symbols.
SampledWaveform generate_baseband_weighted(std::span<const double> coeffs,
                                           const BasisParams& p);

enum class CorrelationSupport {
  Full,       ///< untruncated basis, integrated until the tail is negligible
  Truncated,  ///< basis restricted to [-n_p/f, 1/f) as synthesized
};

/// Autocorrelation  integral p(tau) p(tau + lag) dtau  by composite Simpson
/// quadrature, split at every kink of the integrand.
double basis_correlation(double lag, const BasisParams& p,
                         CorrelationSupport support = CorrelationSupport::Full);

/// Closed-form ISI coefficient I_{l,i} = alpha_l * integral p(tau) p(tau + tau_l + i/f).
/// Requires tau_l >= 0.
double isi_coefficient(double tau_l, int i, double alpha_l, const BasisParams& p);

}  // namespace cbwcs
