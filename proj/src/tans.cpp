#include "csrdtans/tans.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "csrdtans/errors.hpp"

namespace csrdtans {

void TansParams::validate(const CodingTables& tables) const {
  if (table_size == 0 || tables.size() != table_size) {
    throw std::invalid_argument("table size does not match the coding tables");
  }
  if (lower_bound < table_size || lower_bound % table_size != 0) {
    throw std::invalid_argument("L must be a positive multiple of K");
  }
  if (lower_bound > (1u << 30)) {
    throw std::invalid_argument("L too large for 32-bit states");
  }
}

Bitstream Bitstream::from_string(std::string_view bits) {
  Bitstream out;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("bit strings may only contain 0 and 1");
    }
    out.push_back(c == '1');
  }
  return out;
}

void Bitstream::push_back(bool bit) {
  if (size_ % 8 == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<uint8_t>(0x80u >> (size_ % 8));
  ++size_;
}

bool Bitstream::operator[](size_t i) const {
  return (bytes_[i / 8] >> (7 - i % 8)) & 1u;
}

std::string Bitstream::to_string() const {
  std::string s;
  s.reserve(size_);
  for (size_t i = 0; i < size_; ++i) s.push_back((*this)[i] ? '1' : '0');
  return s;
}

namespace {

// Smallest shift that lifts x back into [L, 2L) for a slot of base r, digit d.
uint32_t decoder_shift(uint64_t x, uint32_t r, uint32_t d, uint32_t lower) {
  uint32_t nb = 0;
  while (((x << nb) * r + d) < lower) ++nb;
  return nb;
}

}  // namespace

TansStep tans_encode_step(uint32_t state, uint64_t symbol,
                          const CodingTables& tables,
                          const TansParams& params) {
  const uint32_t lower = params.lower_bound;
  const uint32_t k = params.table_size;
  auto r = tables.multiplicity(symbol);
  if (!r) {
    throw std::invalid_argument("symbol " + std::to_string(symbol) +
                                " is not in the coding tables");
  }
  const uint32_t d = state % *r;
  const uint32_t slot = *tables.slot_of(symbol, d);
  const uint64_t y = state / *r;
  const uint64_t bound = 2ull * lower / k;
  uint32_t nb = 0;
  while ((y >> nb) >= bound) ++nb;
  const uint64_t x = y >> nb;
  const uint64_t next = x * k + slot;
  // With a base that does not divide L some quotients have no preimage
  // inside [L, 2L); the decoder would then read a different bit count.
  if (next < lower || next >= 2ull * lower ||
      decoder_shift(x, *r, d, lower) != nb) {
    throw UnrepresentableError("state " + std::to_string(state) +
                               " cannot encode symbol " +
                               std::to_string(symbol));
  }
  return {static_cast<uint32_t>(next), nb, y & ((uint64_t{1} << nb) - 1)};
}

TansEncoded tans_encode(std::span<const uint64_t> symbols,
                        const CodingTables& tables, const TansParams& params) {
  params.validate(tables);
  uint32_t state = params.lower_bound;
  std::vector<TansStep> steps;
  steps.reserve(symbols.size());
  for (size_t i = symbols.size(); i-- > 0;) {
    steps.push_back(tans_encode_step(state, symbols[i], tables, params));
    state = steps.back().state;
  }
  TansEncoded out;
  out.state = state;
  // The last chunk written is the first one the decoder needs.
  for (size_t i = steps.size(); i-- > 0;) {
    for (uint32_t b = 0; b < steps[i].bit_count; ++b) {
      out.bits.push_back((steps[i].chunk >> b) & 1u);
    }
  }
  return out;
}

TansDecodeStep tans_decode_step(uint32_t state, const Bitstream& bits,
                                size_t* cursor, const CodingTables& tables,
                                const TansParams& params) {
  const uint32_t lower = params.lower_bound;
  if (state < lower || state >= 2ull * lower) {
    throw CorruptStreamError("tANS state outside [L, 2L)");
  }
  const uint32_t slot = state % params.table_size;
  const uint64_t x = state / params.table_size;
  if (tables.kind(slot) != SlotKind::kSymbol) {
    throw CorruptStreamError("tANS state points at a non-symbol slot");
  }
  const uint32_t r = tables.base(slot);
  const uint32_t d = tables.digit(slot);
  const uint32_t nb = decoder_shift(x, r, d, lower);
  if (*cursor + nb > bits.size()) {
    throw CorruptStreamError("tANS bitstream exhausted");
  }
  uint64_t chunk = 0;
  for (uint32_t b = 0; b < nb; ++b) {
    chunk |= uint64_t{bits[(*cursor)++]} << b;
  }
  const uint64_t next = ((x << nb) + chunk) * r + d;
  if (next >= 2ull * lower) {
    throw CorruptStreamError("tANS state left [L, 2L)");
  }
  return {tables.symbol(slot), static_cast<uint32_t>(next), nb};
}

std::vector<uint64_t> tans_decode(uint32_t state, const Bitstream& bits,
                                  const CodingTables& tables,
                                  const TansParams& params, size_t n,
                                  size_t* bits_read) {
  params.validate(tables);
  std::vector<uint64_t> out;
  out.reserve(n);
  size_t cursor = 0;
  for (size_t i = 0; i < n; ++i) {
    TansDecodeStep step = tans_decode_step(state, bits, &cursor, tables, params);
    out.push_back(step.symbol);
    state = step.state;
  }
  if (bits_read) *bits_read = cursor;
  return out;
}

}  // namespace csrdtans
