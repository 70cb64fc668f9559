#include "doctest.h"

#include <set>

#include "cbwcs/probe.hpp"

using namespace cbwcs;

namespace {

unsigned pattern_at(const SymbolSeq& s, std::size_t start, int w) {
  unsigned v = 0;
  for (int b = 0; b < w; ++b) v = (v << 1) | (s[start + static_cast<std::size_t>(b)] > 0 ? 1u : 0u);
  return v;
}

}  // namespace

TEST_CASE("exhaustive probes hold every pattern once per aligned block") {
  Rng rng(1);
  for (auto kind : {ProbeKind::All7, ProbeKind::All9}) {
    const int w = pattern_width(kind);
    const auto s = make_probe(kind, ProbeOrder::Ascending, 0, rng);
    REQUIRE(s.size() == probe_length(kind, 0));
    CHECK(s.size() == static_cast<std::size_t>(w) << w);
    std::set<unsigned> seen;
    for (std::size_t b = 0; b < s.size(); b += static_cast<std::size_t>(w)) {
      const unsigned v = pattern_at(s, b, w);
      CHECK(v == b / static_cast<std::size_t>(w));  // ascending, MSB first
      seen.insert(v);
    }
    CHECK(seen.size() == (1u << w));
  }
  CHECK(probe_length(ProbeKind::All7, 5) == 896);
  CHECK(probe_length(ProbeKind::All9, 5) == 4608);
  CHECK(probe_length(ProbeKind::Random, 5) == 5);
}

TEST_CASE("de Bruijn cycle contains every window exactly once") {
  for (int w : {3, 7, 9}) {
    const auto bits = de_bruijn_bits(w);
    REQUIRE(bits.size() == (1u << w));
    std::set<unsigned> seen;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      unsigned v = 0;
      for (int b = 0; b < w; ++b) v = (v << 1) | bits[(i + static_cast<std::size_t>(b)) % bits.size()];
      seen.insert(v);
    }
    CHECK(seen.size() == bits.size());
  }
  CHECK(de_bruijn_bits(3) == std::vector<std::uint8_t>{0, 0, 0, 1, 0, 1, 1, 1});

  Rng rng(1);
  const auto s = make_probe(ProbeKind::All7, ProbeOrder::DeBruijn, 0, rng);
  CHECK(s.size() == 896);
  std::set<unsigned> linear;
  for (std::size_t i = 0; i + 7 <= s.size(); ++i) linear.insert(pattern_at(s, i, 7));
  CHECK(linear.size() == 128);
}

TEST_CASE("random probes are reproducible and only consume the rng when random") {
  Rng a(9), b(9);
  const auto x = make_probe(ProbeKind::Random, ProbeOrder::Ascending, 500, a);
  const auto y = make_probe(ProbeKind::Random, ProbeOrder::Ascending, 500, b);
  CHECK(x.values() == y.values());
  CHECK(x.size() == 500);
  int pos = 0;
  for (int v : x.values()) pos += v > 0;
  CHECK(pos > 200);
  CHECK(pos < 300);

  Rng c(9), d(9);
  make_probe(ProbeKind::All7, ProbeOrder::Ascending, 0, c);
  CHECK(c() == d());
  CHECK_THROWS(make_probe(ProbeKind::Random, ProbeOrder::Ascending, 0, c));
}

TEST_CASE("probe names parse") {
  CHECK(parse_probe_kind("all9") == ProbeKind::All9);
  CHECK(parse_probe_order("debruijn") == ProbeOrder::DeBruijn);
  CHECK(to_string(ProbeKind::All7) == "all7");
  CHECK_THROWS(parse_probe_kind("all8"));
}
