#include "cbwcs/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>

namespace cbwcs {

namespace {

constexpr double kContinuityTol = 1e-6;

// Per-unit-time Simpson panel density is at least 64 * n_r panels per period.
constexpr int kPanelsPerSample = 64;

// Quadrature is cut where the exponential tail of the integrand drops below
// exp(-32.2), roughly 1e-14 relative to the peak.
constexpr double kTailExponent = 32.2;

void log_continuity_once(const ContinuityReport& r) {
  static std::once_flag flag;
  std::call_once(flag, [&r] {
    std::clog << "[cbwcs] basis self-check: printed middle branch is discontinuous at t=0 "
              << "(left " << r.left_limit << ", right " << r.right_limit_printed
              << "); using continuous variant (right " << r.right_limit_continuous << ")\n";
  });
}

double middle_branch(double t, double beta, double f, double omega, BasisVariant v) {
  const double shape = std::cos(omega * t) - beta / omega * std::sin(omega * t);
  const double expo = v == BasisVariant::Continuous ? beta * (t - 1.0 / f)
                                                     : -beta * (t - 1.0 / f);
  return 1.0 - std::exp(expo) * shape;
}

double truncated_basis(double t, const BasisParams& p) {
  if (t < -p.n_p / p.f) return 0.0;
  return basis_value(t, p);
}

template <typename F>
double simpson(F&& fn, double a, double b, double max_h) {
  if (!(b > a)) return 0.0;
  auto n = static_cast<long>(std::ceil((b - a) / max_h));
  n = std::max<long>(2, n + (n % 2));
  const double h = (b - a) / static_cast<double>(n);
  double acc = fn(a) + fn(b);
  for (long k = 1; k < n; ++k) {
    acc += (k % 2 ? 4.0 : 2.0) * fn(a + static_cast<double>(k) * h);
  }
  return acc * h / 3.0;
}

}  // namespace

ContinuityReport check_branch_continuity(double beta, double f) {
  const double omega = 2.0 * std::numbers::pi * f;
  ContinuityReport r;
  r.left_limit = 1.0 - std::exp(-beta / f);
  r.right_limit_printed = middle_branch(0.0, beta, f, omega, BasisVariant::AsPrinted);
  r.right_limit_continuous = middle_branch(0.0, beta, f, omega, BasisVariant::Continuous);
  r.printed_is_continuous = std::abs(r.left_limit - r.right_limit_printed) <= kContinuityTol;
  r.selected = r.printed_is_continuous ? BasisVariant::AsPrinted : BasisVariant::Continuous;
  return r;
}

BasisParams BasisParams::make(double beta, double f, int n_p, int n_r) {
  if (!(f > 0.0)) throw std::invalid_argument("basis: f must be positive");
  if (!(beta > 0.0) || beta > f * std::numbers::ln2 * (1.0 + 1e-12)) {
    throw std::invalid_argument("basis: beta must satisfy 0 < beta <= f ln 2");
  }
  if (n_p < 0) throw std::invalid_argument("basis: n_p must be non-negative");
  if (n_r < 1) throw std::invalid_argument("basis: n_r must be positive");

  const auto report = check_branch_continuity(beta, f);
  if (!report.printed_is_continuous) log_continuity_once(report);

  BasisParams p;
  p.beta = beta;
  p.f = f;
  p.omega = 2.0 * std::numbers::pi * f;
  p.n_p = n_p;
  p.n_r = n_r;
  p.variant = report.selected;
  return p;
}

double basis_value(double t, const BasisParams& p) {
  const double period = 1.0 / p.f;
  if (t >= period) return 0.0;
  if (t >= 0.0) return middle_branch(t, p.beta, p.f, p.omega, p.variant);
  return (1.0 - std::exp(-p.beta / p.f)) * std::exp(p.beta * t) *
         (std::cos(p.omega * t) - p.beta / p.omega * std::sin(p.omega * t));
}

SymbolSeq::SymbolSeq(std::vector<int> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] != 1 && symbols_[i] != -1) {
      throw std::invalid_argument("symbol " + std::to_string(i) + " is not +-1");
    }
  }
}

SymbolSeq SymbolSeq::from_bits(std::span<const std::uint8_t> bits) {
  std::vector<int> s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? 1 : -1);
  return SymbolSeq(std::move(s));
}

SymbolSeq SymbolSeq::negated() const {
  std::vector<int> s(symbols_);
  for (auto& v : s) v = -v;
  return SymbolSeq(std::move(s));
}

SymbolSeq SymbolSeq::slice(std::size_t first, std::size_t count) const {
  if (first + count > symbols_.size()) throw std::out_of_range("SymbolSeq::slice");
  return SymbolSeq(std::vector<int>(symbols_.begin() + static_cast<std::ptrdiff_t>(first),
                                    symbols_.begin() + static_cast<std::ptrdiff_t>(first + count)));
}

void SymbolSeq::append(const SymbolSeq& tail) {
  symbols_.insert(symbols_.end(), tail.symbols_.begin(), tail.symbols_.end());
}

std::vector<double> sampled_basis(const BasisParams& p) {
  const int lead = p.n_p * p.n_r;
  std::vector<double> taps(static_cast<std::size_t>((p.n_p + 1) * p.n_r + 1));
  for (std::size_t j = 0; j < taps.size(); ++j) {
    const double t = static_cast<double>(static_cast<int>(j) - lead) / p.sample_rate();
    taps[j] = basis_value(t, p);
  }
  return taps;
}

SampledWaveform generate_baseband_weighted(std::span<const double> coeffs,
                                           const BasisParams& p) {
  if (coeffs.empty()) throw std::invalid_argument("generate_baseband: empty symbol sequence");
  const auto taps = sampled_basis(p);
  const std::ptrdiff_t lead = static_cast<std::ptrdiff_t>(p.n_p) * p.n_r;
  const auto len = static_cast<std::ptrdiff_t>(coeffs.size());

  SampledWaveform w;
  w.sample_rate = p.sample_rate();
  w.t0_index = lead;
  w.samples.assign(static_cast<std::size_t>((len + 1 + p.n_p) * p.n_r + 1), 0.0);

  // Symbol n contributes taps[j] at sample k = n n_r + j; the t = 1/f tap is
  // zero so the sum over j matches the truncation window n in [floor t, floor t + n_p].
  for (std::ptrdiff_t n = 0; n < len; ++n) {
    const double s = coeffs[static_cast<std::size_t>(n)];
    if (s == 0.0) continue;
    double* out = w.samples.data() + n * p.n_r;
    for (std::size_t j = 0; j < taps.size(); ++j) out[j] += s * taps[j];
  }
  return w;
}

SampledWaveform generate_baseband(const SymbolSeq& s, const BasisParams& p) {
  std::vector<double> coeffs(s.values().begin(), s.values().end());
  return generate_baseband_weighted(coeffs, p);
}

double basis_correlation(double lag, const BasisParams& p, CorrelationSupport support) {
  const double period = 1.0 / p.f;
  const double upper = std::min(period, period - lag);
  double lower;
  if (support == CorrelationSupport::Truncated) {
    const double edge = -p.n_p / p.f;
    lower = std::max(edge, edge - lag);
  } else {
    lower = std::min(0.0, -lag) - kTailExponent / (2.0 * p.beta);
  }
  if (!(upper > lower)) return 0.0;

  auto integrand = [&](double tau) {
    if (support == CorrelationSupport::Truncated) {
      return truncated_basis(tau, p) * truncated_basis(tau + lag, p);
    }
    return basis_value(tau, p) * basis_value(tau + lag, p);
  };

  std::vector<double> cuts{lower, upper, 0.0, period, -lag, period - lag};
  if (support == CorrelationSupport::Truncated) {
    cuts.push_back(-p.n_p / p.f);
    cuts.push_back(-p.n_p / p.f - lag);
  }
  std::erase_if(cuts, [&](double c) { return c < lower || c > upper; });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double max_h = 1.0 / (kPanelsPerSample * p.sample_rate());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    // Evaluate strictly inside each piece so branch selection never sees the kink.
    const double a = cuts[k], b = cuts[k + 1];
    const double eps = (b - a) * 1e-12;
    total += simpson(integrand, a + eps, b - eps, max_h);
  }
  return total;
}

double isi_coefficient(double tau_l, int i, double alpha_l, const BasisParams& p) {
  if (tau_l < 0.0) throw std::invalid_argument("isi_coefficient: tau_l must be non-negative");
  const double b = p.beta, w = p.omega, f = p.f;
  const double w2 = w * w, b2 = b * b;
  const double A = (w2 - 3.0 * b2) * f / (4.0 * b * (w2 + b2));
  const double B = (3.0 * w2 - b2) * f / (4.0 * w * (w2 + b2));

  const double lag = std::abs(tau_l + static_cast<double>(i) / f);
  const double C = std::exp(-b * lag) * (2.0 - std::exp(-b / f));
  const double D = std::exp(b * lag) * std::exp(-b / f);
  // cos(w lag) == cos(w tau_l) since w i / f is a multiple of 2 pi; the sine
  // must follow |lag| because the autocorrelation is even.
  const double c = std::cos(w * lag);
  const double s = std::sin(w * lag);

  if (lag >= 1.0 / f) return alpha_l * (C - 1.0 / D) * (A * c + B * s);
  return alpha_l * (A * (C - D) * c + B * (C + D) * s + 1.0 - f * lag);
}

}  // namespace cbwcs
