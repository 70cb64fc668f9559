#include "cbwcs/threshold.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cbwcs {

std::string_view to_string(ThresholdKind k) {
  switch (k) {
    case ThresholdKind::Zero: return "zero";
    case ThresholdKind::PastOnly: return "past";
    case ThresholdKind::PastPlusOneFuture: return "past_fut1_genie";
    case ThresholdKind::OptimalGenie: return "optimal_genie";
  }
  return "?";
}

std::string_view to_string(IsiModel m) {
  return m == IsiModel::Transmitted ? "transmitted" : "closed_form";
}

IsiModel parse_isi_model(std::string_view s) {
  if (s == "transmitted") return IsiModel::Transmitted;
  if (s == "closed_form") return IsiModel::ClosedForm;
  throw std::invalid_argument("unknown isi model '" + std::string(s) + "'");
}

bool uses_genie(ThresholdKind k) {
  return k == ThresholdKind::PastPlusOneFuture || k == ThresholdKind::OptimalGenie;
}

IsiProfile IsiProfile::compute(const MultipathChannel& ch, const BasisParams& p, IsiModel model) {
  IsiProfile prof;
  prof.lo_ = -(p.n_p + static_cast<int>(std::ceil(ch.max_delay() * p.f - 1e-9)));
  prof.hi_ = p.n_p;
  prof.c_.assign(static_cast<std::size_t>(prof.hi_ - prof.lo_ + 1), 0.0);
  for (int i = prof.lo_; i <= prof.hi_; ++i) {
    double sum = 0.0;
    for (const auto& tap : ch.taps()) {
      sum += model == IsiModel::ClosedForm
                 ? isi_coefficient(tap.tau, i, tap.alpha, p)
                 : tap.alpha * basis_correlation(tap.tau + i / p.f, p, CorrelationSupport::Truncated);
    }
    prof.c_[static_cast<std::size_t>(i - prof.lo_)] = sum;
  }
  return prof;
}

double IsiProfile::at(int i) const {
  if (i < lo_ || i > hi_) return 0.0;
  return c_[static_cast<std::size_t>(i - lo_)];
}

double symbol_energy(const MultipathChannel& ch, const BasisParams& p) {
  double P = 0.0;
  for (const auto& tap : ch.taps()) P += isi_coefficient(tap.tau, 0, tap.alpha, p);
  return P;
}

DecodeState::DecodeState(int length) {
  if (length < 0) throw std::invalid_argument("DecodeState: negative length");
  ring_.assign(static_cast<std::size_t>(length), 1);
}

int DecodeState::past(int i) const {
  const int len = length();
  if (i < -len || i >= 0) throw std::out_of_range("DecodeState::past: offset outside history");
  return ring_[(head_ + static_cast<std::size_t>(len + i)) % ring_.size()];
}

void DecodeState::push(int symbol) {
  if (ring_.empty()) return;
  ring_[head_] = symbol;
  head_ = (head_ + 1) % ring_.size();
}

void DecodeState::seed(std::span<const int> known) {
  for (int s : known) push(s);
}

double threshold(ThresholdKind kind, std::ptrdiff_t n, const IsiProfile& isi,
                 const DecodeState& state, const SymbolContext* truth) {
  if (uses_genie(kind) && truth == nullptr) {
    throw std::invalid_argument("threshold: genie kind requires true symbols");
  }
  const int lo = isi.lowest_offset();
  switch (kind) {
    case ThresholdKind::Zero:
      return 0.0;
    case ThresholdKind::PastOnly:
    case ThresholdKind::PastPlusOneFuture: {
      if (state.length() < -lo) throw std::invalid_argument("threshold: decode history too short");
      double theta = 0.0;
      for (int i = lo; i < 0; ++i) theta += state.past(i) * isi.at(i);
      if (kind == ThresholdKind::PastPlusOneFuture) theta += truth->at(n + 1) * isi.at(1);
      return theta;
    }
    case ThresholdKind::OptimalGenie: {
      double theta = 0.0;
      for (int i = lo; i <= isi.highest_offset(); ++i) {
        if (i != 0) theta += truth->at(n + i) * isi.at(i);
      }
      return theta;
    }
  }
  return 0.0;
}

std::vector<int> decode_symbols(ThresholdKind kind, const AlignedOutput& a, const IsiProfile& isi,
                                DecodeState& state, const SymbolContext* truth,
                                std::ptrdiff_t first, std::size_t count) {
  std::vector<int> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto n = first + static_cast<std::ptrdiff_t>(k);
    const int s = decode_threshold(sample_at_symbol(a, n), threshold(kind, n, isi, state, truth));
    state.push(s);
    out.push_back(s);
  }
  return out;
}

double theoretical_ber(double P, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("theoretical_ber: negative sigma");
  if (sigma == 0.0) return P > 0.0 ? 0.0 : 0.5;
  return 0.5 * std::erfc(P / std::sqrt(2.0 * sigma * sigma));
}

}  // namespace cbwcs
