// probe.hpp - known training prefix of each frame
#pragma once

#include <cstddef>
#include <string_view>

#include "cbwcs/rng.hpp"
#include "cbwcs/waveform.hpp"

namespace cbwcs {

enum class ProbeKind {
  All7,    ///< every 7-bit pattern once: 896 symbols
  All9,    ///< every 9-bit pattern once: 4608 symbols
  Random,  ///< i.i.d. +-1 of configured length
};

enum class ProbeOrder {
  Ascending,  ///< patterns concatenated in ascending binary order, MSB first
  DeBruijn,   ///< binary de Bruijn cycle of order w, repeated w times
};

std::string_view to_string(ProbeKind k);
std::string_view to_string(ProbeOrder o);
ProbeKind parse_probe_kind(std::string_view s);
ProbeOrder parse_probe_order(std::string_view s);

/// Pattern width of the exhaustive kinds (7 or 9); 0 for Random.
int pattern_width(ProbeKind k);
/// Probe length implied by the kind; `random_len` for Random.
std::size_t probe_length(ProbeKind k, std::size_t random_len);

/// Bits map 0 -> -1, 1 -> +1. `rng` is only consumed for Random.
SymbolSeq make_probe(ProbeKind kind, ProbeOrder order, std::size_t random_len, Rng& rng);

/// Binary de Bruijn sequence B(2, w) (length 2^w), lexicographically least.
std::vector<std::uint8_t> de_bruijn_bits(int w);

}  // namespace cbwcs
