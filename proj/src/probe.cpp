#include "cbwcs/probe.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace cbwcs {

std::string_view to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::All7: return "all7";
    case ProbeKind::All9: return "all9";
    case ProbeKind::Random: return "random";
  }
  return "?";
}

std::string_view to_string(ProbeOrder o) {
  return o == ProbeOrder::Ascending ? "ascending" : "debruijn";
}

ProbeKind parse_probe_kind(std::string_view s) {
  if (s == "all7") return ProbeKind::All7;
  if (s == "all9") return ProbeKind::All9;
  if (s == "random") return ProbeKind::Random;
  throw std::invalid_argument("unknown probe kind '" + std::string(s) + "'");
}

ProbeOrder parse_probe_order(std::string_view s) {
  if (s == "ascending") return ProbeOrder::Ascending;
  if (s == "debruijn") return ProbeOrder::DeBruijn;
  throw std::invalid_argument("unknown probe order '" + std::string(s) + "'");
}

int pattern_width(ProbeKind k) {
  switch (k) {
    case ProbeKind::All7: return 7;
    case ProbeKind::All9: return 9;
    case ProbeKind::Random: return 0;
  }
  return 0;
}

std::size_t probe_length(ProbeKind k, std::size_t random_len) {
  const int w = pattern_width(k);
  return w == 0 ? random_len : static_cast<std::size_t>(w) << w;
}

std::vector<std::uint8_t> de_bruijn_bits(int w) {
  // Concatenated Lyndon words (Fredricksen-Kessler-Maiorana).
  std::vector<std::uint8_t> seq;
  std::vector<int> a(static_cast<std::size_t>(w) + 1, 0);
  auto db = [&](auto&& self, int t, int p) -> void {
    if (t > w) {
      if (w % p == 0) {
        for (int j = 1; j <= p; ++j) seq.push_back(static_cast<std::uint8_t>(a[static_cast<std::size_t>(j)]));
      }
      return;
    }
    a[static_cast<std::size_t>(t)] = a[static_cast<std::size_t>(t - p)];
    self(self, t + 1, p);
    for (int v = a[static_cast<std::size_t>(t - p)] + 1; v < 2; ++v) {
      a[static_cast<std::size_t>(t)] = v;
      self(self, t + 1, t);
    }
  };
  db(db, 1, 1);
  return seq;
}

SymbolSeq make_probe(ProbeKind kind, ProbeOrder order, std::size_t random_len, Rng& rng) {
  std::vector<std::uint8_t> bits;
  const int w = pattern_width(kind);
  if (kind == ProbeKind::Random) {
    if (random_len == 0) throw std::invalid_argument("make_probe: random probe needs a length");
    std::bernoulli_distribution coin(0.5);
    bits.reserve(random_len);
    for (std::size_t k = 0; k < random_len; ++k) bits.push_back(coin(rng) ? 1 : 0);
  } else if (order == ProbeOrder::Ascending) {
    for (unsigned v = 0; v < (1u << w); ++v) {
      for (int b = w - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1u));
    }
  } else {
    const auto cycle = de_bruijn_bits(w);
    for (int rep = 0; rep < w; ++rep) bits.insert(bits.end(), cycle.begin(), cycle.end());
  }
  return SymbolSeq::from_bits(bits);
}

}  // namespace cbwcs
