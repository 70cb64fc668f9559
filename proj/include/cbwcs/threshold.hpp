// threshold.hpp - ISI-cancelling threshold decoders and theoretical BER
//
// The decision sample of symbol n is
//   y_n = s_n P + sum_{i != 0} s_{n+i} c_i + noise,   c_i = sum_l I_{l,i},
// so a threshold theta_n built from (some of) the neighbouring symbols
// removes that part of the interference before slicing.

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cbwcs/channel.hpp"
#include "cbwcs/receiver.hpp"
#include "cbwcs/waveform.hpp"

namespace cbwcs {

enum class ThresholdKind {
  Zero,
  PastOnly,           ///< decision-feedback past ISI
  PastPlusOneFuture,  ///< genie bound: past ISI + true s_{n+1}
  OptimalGenie,       ///< genie bound: true past and future ISI
};

std::string_view to_string(ThresholdKind k);
bool uses_genie(ThresholdKind k);

/// Where the per-path coefficients come from.
enum class IsiModel {
  Transmitted,  ///< correlation of the n_p-truncated pulse that is actually sent
  ClosedForm,   ///< untruncated closed form; off by the pulse tail beyond -n_p/f
};
std::string_view to_string(IsiModel m);
IsiModel parse_isi_model(std::string_view s);

/// Channel ISI coefficients summed over paths, c_i = sum_l I_{l,i}, for
/// i in [-(n_p + ceil(tau_max f)), n_p].
class IsiProfile {
 public:
  static IsiProfile compute(const MultipathChannel& ch, const BasisParams& p,
                            IsiModel model = IsiModel::Transmitted);

  int lowest_offset() const { return lo_; }
  int highest_offset() const { return hi_; }
  /// c_i; zero outside the window.
  double at(int i) const;
  /// P = c_0.
  double energy() const { return at(0); }
  /// Length of the past window, -lowest_offset().
  int past_span() const { return -lo_; }

 private:
  int lo_ = 0, hi_ = 0;
  std::vector<double> c_;
};

/// P = sum_l I_{l,0}.
double symbol_energy(const MultipathChannel& ch, const BasisParams& p);

/// Last `length` decided symbols, oldest first; starts as all +1.
class DecodeState {
 public:
  explicit DecodeState(int length);

  int length() const { return static_cast<int>(ring_.size()); }
  /// s-hat_{n+i} for i in [-length, -1], relative to the next symbol to decode.
  int past(int i) const;
  void push(int symbol);
  /// Overwrite the history with known symbols (e.g. the probe tail).
  void seed(std::span<const int> known);

 private:
  std::vector<int> ring_;
  std::size_t head_ = 0;  // position of the oldest entry
};

/// True transmitted symbols indexed by frame position; positions outside
/// [0, size) carried no symbol and contribute 0.
class SymbolContext {
 public:
  explicit SymbolContext(std::span<const int> symbols) : symbols_(symbols) {}
  int at(std::ptrdiff_t n) const {
    return n < 0 || n >= static_cast<std::ptrdiff_t>(symbols_.size())
               ? 0
               : symbols_[static_cast<std::size_t>(n)];
  }

 private:
  std::span<const int> symbols_;
};

/// theta_n for the given kind. Genie kinds require `truth`.
double threshold(ThresholdKind kind, std::ptrdiff_t n, const IsiProfile& isi,
                 const DecodeState& state, const SymbolContext* truth);

/// +1 if y > theta, -1 if y < theta, +1 on a tie.
inline int decode_threshold(double y, double theta) { return y < theta ? -1 : 1; }

/// Decision-feedback loop over symbols [first, first + count). The state is
/// updated with every decision.
std::vector<int> decode_symbols(ThresholdKind kind, const AlignedOutput& a, const IsiProfile& isi,
                                DecodeState& state, const SymbolContext* truth,
                                std::ptrdiff_t first, std::size_t count);

/// 0.5 erfc(P / sqrt(2 sigma^2)), sigma being the std of the noise at the
/// decision sample. sigma = 0 gives 0 for P > 0 and 0.5 for P = 0.
double theoretical_ber(double P, double sigma);

}  // namespace cbwcs
