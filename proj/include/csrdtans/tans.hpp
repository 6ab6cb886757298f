#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csrdtans/coding_tables.hpp"

namespace csrdtans {

struct TansParams {
  uint32_t table_size = 0;   // K
  uint32_t lower_bound = 0;  // L, states live in [L, 2L)

  void validate(const CodingTables& tables) const;
};

// Bit sequence in decode order, packed most significant bit first.
class Bitstream {
 public:
  Bitstream() = default;
  static Bitstream from_string(std::string_view bits);

  void push_back(bool bit);
  bool operator[](size_t i) const;
  size_t size() const { return size_; }
  std::span<const uint8_t> bytes() const { return bytes_; }
  std::string to_string() const;

 private:
  std::vector<uint8_t> bytes_;
  size_t size_ = 0;
};

struct TansEncoded {
  uint32_t state = 0;  // s0, the decoder's starting state
  Bitstream bits;
};

// One encoder step from state s. The chunk's bit_count low bits hold the
// value that the decoder reads back least significant bit first.
struct TansStep {
  uint32_t state = 0;
  uint32_t bit_count = 0;
  uint64_t chunk = 0;
};

TansStep tans_encode_step(uint32_t state, uint64_t symbol,
                          const CodingTables& tables, const TansParams& params);
TansEncoded tans_encode(std::span<const uint64_t> symbols,
                        const CodingTables& tables, const TansParams& params);

struct TansDecodeStep {
  uint64_t symbol = 0;
  uint32_t state = 0;
  uint32_t bit_count = 0;
};

// Decodes one symbol, reading bits from position *cursor onward.
TansDecodeStep tans_decode_step(uint32_t state, const Bitstream& bits,
                                size_t* cursor, const CodingTables& tables,
                                const TansParams& params);
std::vector<uint64_t> tans_decode(uint32_t state, const Bitstream& bits,
                                  const CodingTables& tables,
                                  const TansParams& params, size_t n,
                                  size_t* bits_read = nullptr);

}  // namespace csrdtans
