#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cbwcs/waveform.hpp"
#include "oracles.hpp"

using namespace cbwcs;

TEST_CASE("basis parameters are validated") {
  CHECK_THROWS_AS(BasisParams::make(0.0), std::invalid_argument);
  CHECK_THROWS_AS(BasisParams::make(0.8, 1.0), std::invalid_argument);  // above f ln 2
  CHECK_THROWS_AS(BasisParams::make(0.5, 1.0, -1), std::invalid_argument);
  CHECK_THROWS_AS(BasisParams::make(0.5, 1.0, 6, 0), std::invalid_argument);
  const auto p = BasisParams::make();
  CHECK(p.omega == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(p.sample_rate() == 16.0);
}

TEST_CASE("branch continuity self-check rejects the discontinuous middle branch") {
  const auto r = check_branch_continuity(std::numbers::ln2, 1.0);
  CHECK(r.left_limit == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.right_limit_printed == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.right_limit_continuous == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(r.printed_is_continuous);
  CHECK(r.selected == BasisVariant::Continuous);
  CHECK(BasisParams::make().variant == BasisVariant::Continuous);
}

TEST_CASE("basis matches the branch formulas and vanishes from one period on") {
  const auto p = BasisParams::make();
  for (double t = -8.0; t <= 3.0; t += 0.0371) {
    CHECK(basis_value(t, p) == doctest::Approx(oracle::basis(t)).epsilon(1e-13));
  }
  CHECK(basis_value(1.0, p) == 0.0);
  CHECK(basis_value(2.5, p) == 0.0);
  CHECK(basis_value(0.0, p) == doctest::Approx(0.5));
  // continuous at both joins
  CHECK(std::abs(basis_value(-1e-9, p) - basis_value(0.0, p)) < 1e-8);
  CHECK(std::abs(basis_value(1.0 - 1e-9, p)) < 1e-8);
}

TEST_CASE("basis grows in oscillation for t < 0") {
  const auto p = BasisParams::make();
  // peaks at t = -k (cos = 1, sin = 0) grow as exp(beta t) towards 0
  double prev = 0.0;
  for (int k = 6; k >= 1; --k) {
    const double v = basis_value(-static_cast<double>(k), p);
    CHECK(v > prev);
    CHECK(v == doctest::Approx(0.5 * std::exp(-std::numbers::ln2 * k)));
    prev = v;
  }
  // and changes sign within each period
  CHECK(basis_value(-0.5, p) < 0.0);
  CHECK(basis_value(-1.5, p) < 0.0);
}

TEST_CASE("autocorrelation quadrature agrees with the frozen reference values") {
  const auto p = BasisParams::make();
  CHECK(basis_correlation(0.0, p) == doctest::Approx(oracle::kR0).epsilon(1e-10));
  CHECK(basis_correlation(1.0, p) == doctest::Approx(oracle::kR1).epsilon(1e-9));
  CHECK(basis_correlation(0.0, p, CorrelationSupport::Truncated) ==
        doctest::Approx(oracle::kR0Truncated).epsilon(1e-10));
  // independent quadrature reproduces them too
  CHECK(oracle::correlation(0.0) == doctest::Approx(oracle::kR0).epsilon(1e-11));
  CHECK(oracle::correlation(1.0) == doctest::Approx(oracle::kR1).epsilon(1e-10));
}

TEST_CASE("truncated correlation vanishes beyond the support") {
  const auto p = BasisParams::make();
  CHECK(basis_correlation(7.01, p, CorrelationSupport::Truncated) == 0.0);
  CHECK(basis_correlation(-7.5, p, CorrelationSupport::Truncated) == 0.0);
}

TEST_CASE("closed-form ISI coefficient against independent quadrature") {
  const auto p = BasisParams::make();
  double worst = 0.0;
  for (double tau : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0}) {
    for (int i = -6; i <= 6; ++i) {
      const double alpha = std::exp(-0.6 * tau);
      const double ref = alpha * oracle::correlation(tau + i);
      worst = std::max(worst, std::abs(isi_coefficient(tau, i, alpha, p) - ref));
    }
  }
  CHECK(worst < 1e-9);
  CHECK(isi_coefficient(0.0, 0, 1.0, p) == doctest::Approx(oracle::kR0).epsilon(1e-12));
  CHECK_THROWS_AS(isi_coefficient(-0.5, 0, 1.0, p), std::invalid_argument);
}

TEST_CASE("closed form holds for another admissible beta") {
  const auto p = BasisParams::make(0.4, 1.0);
  for (double lag : {0.0, 0.3, 1.0, 2.75, -1.25}) {
    const int i = static_cast<int>(std::floor(lag));
    const double tau = lag - i;
    CHECK(isi_coefficient(tau, i, 1.0, p) ==
          doctest::Approx(oracle::correlation(tau + i, 0.4)).epsilon(1e-8));
  }
}

TEST_CASE("symbol sequences hold only +-1") {
  CHECK_THROWS_AS(SymbolSeq({1, 0, -1}), std::invalid_argument);
  const std::uint8_t bits[] = {0, 1, 1};
  const auto s = SymbolSeq::from_bits(bits);
  CHECK(s.values() == std::vector<int>{-1, 1, 1});
  CHECK(s.negated().values() == std::vector<int>{1, -1, -1});
  CHECK(s.slice(1, 2).values() == std::vector<int>{1, 1});
  CHECK_THROWS(s.slice(2, 5));
}

TEST_CASE("sampled basis covers the truncated support") {
  const auto p = BasisParams::make();
  const auto taps = sampled_basis(p);
  REQUIRE(taps.size() == static_cast<std::size_t>((p.n_p + 1) * p.n_r + 1));
  for (std::size_t j = 0; j < taps.size(); ++j) {
    const double t = (static_cast<double>(j) - p.n_p * p.n_r) / p.sample_rate();
    CHECK(taps[j] == doctest::Approx(oracle::basis(t)).epsilon(1e-13));
  }
}

TEST_CASE("baseband of one symbol is the sampled basis") {
  const auto p = BasisParams::make();
  const auto x = generate_baseband(SymbolSeq({1}), p);
  CHECK(x.t0_index == p.n_p * p.n_r);
  CHECK(x.size() == static_cast<std::size_t>((1 + 1 + p.n_p) * p.n_r + 1));
  for (std::size_t k = 0; k < x.size(); ++k) {
    CHECK(x.samples[k] == doctest::Approx(oracle::basis(x.time_at(static_cast<std::ptrdiff_t>(k)))).epsilon(1e-12));
  }
  // peak of p sits at t = 0.5 / f or thereabouts
  const auto peak = std::max_element(x.samples.begin(), x.samples.end()) - x.samples.begin();
  const double tpeak = x.time_at(peak);
  CHECK(tpeak > 0.0);
  CHECK(tpeak < 1.0);
}

TEST_CASE("baseband is linear in the symbols") {
  const auto p = BasisParams::make();
  const SymbolSeq s({1, -1, -1, 1, 1, -1, 1});
  const auto x = generate_baseband(s, p);
  const auto xn = generate_baseband(s.negated(), p);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(xn.samples[k] == -x.samples[k]);

  // superposition of single-symbol shifts
  const std::vector<double> w{0.5, 0.0, -2.0};
  const auto xw = generate_baseband_weighted(w, p);
  const auto single = generate_baseband(SymbolSeq({1}), p);
  for (std::size_t k = 0; k < xw.size(); ++k) {
    double ref = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
      const auto j = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(n) * p.n_r;
      if (j >= 0 && static_cast<std::size_t>(j) < single.size()) ref += w[n] * single.samples[static_cast<std::size_t>(j)];
    }
    CHECK(xw.samples[k] == doctest::Approx(ref).epsilon(1e-12));
  }
  CHECK_THROWS(generate_baseband_weighted(std::vector<double>{}, p));
}
