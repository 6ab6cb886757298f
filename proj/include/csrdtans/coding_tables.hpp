#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "csrdtans/entropy_model.hpp"

namespace csrdtans {

enum class SlotKind : uint8_t { kSymbol = 0, kEscape = 1, kUnused = 2 };

// Slot-indexed symbol/digit/base tables plus the reverse (symbol, digit)
// lookup. Unused slots only appear when every entry is capped at M.
class CodingTables {
 public:
  CodingTables() = default;

  // Validates the forward arrays and derives the reverse lookup. The escape
  // slots hold the sentinel symbol value; unused slots carry base 1.
  static CodingTables from_slots(std::vector<uint64_t> symbol,
                                 std::vector<uint32_t> digit,
                                 std::vector<uint32_t> base,
                                 std::vector<SlotKind> kind,
                                 uint32_t max_multiplicity,
                                 uint32_t symbol_bits);

  uint32_t size() const { return static_cast<uint32_t>(symbol_.size()); }
  uint32_t max_multiplicity() const { return max_multiplicity_; }
  uint32_t symbol_bits() const { return symbol_bits_; }

  std::span<const uint64_t> symbols() const { return symbol_; }
  std::span<const uint32_t> digits() const { return digit_; }
  std::span<const uint32_t> bases() const { return base_; }
  std::span<const SlotKind> kinds() const { return kind_; }

  uint64_t symbol(uint32_t slot) const { return symbol_[slot]; }
  uint32_t digit(uint32_t slot) const { return digit_[slot]; }
  uint32_t base(uint32_t slot) const { return base_[slot]; }
  SlotKind kind(uint32_t slot) const { return kind_[slot]; }

  // Multiplicity of a retained symbol, empty if it is not retained.
  std::optional<uint32_t> multiplicity(uint64_t symbol) const;
  // Slot carrying (symbol, digit); digit must be below the multiplicity.
  std::optional<uint32_t> slot_of(uint64_t symbol, uint32_t digit) const;

  bool has_escape() const { return escape_multiplicity_ > 0; }
  uint32_t escape_multiplicity() const { return escape_multiplicity_; }
  uint64_t escape_sentinel() const { return escape_sentinel_; }
  uint32_t escape_slot(uint32_t digit) const;

  // The retained symbol with the largest multiplicity (first on ties), used
  // to pad a stream to whole segments.
  std::optional<uint64_t> most_frequent() const;

  bool operator==(const CodingTables& other) const;

 private:
  struct Entry {
    uint32_t multiplicity = 0;
    uint32_t first = 0;  // offset into digit_slots_
  };

  void build_reverse();

  std::vector<uint64_t> symbol_;
  std::vector<uint32_t> digit_;
  std::vector<uint32_t> base_;
  std::vector<SlotKind> kind_;
  uint32_t max_multiplicity_ = 0;
  uint32_t symbol_bits_ = 0;

  std::unordered_map<uint64_t, uint32_t> entry_of_;
  std::vector<Entry> entries_;
  std::vector<uint32_t> digit_slots_;  // slot index by (entry, digit)
  std::vector<uint32_t> escape_slots_;
  uint32_t escape_multiplicity_ = 0;
  uint64_t escape_sentinel_ = 0;
};

// Builds tables from Q. With an empty permutation the layout is: retained
// symbols in Q order with consecutive digits, then the escape run, then unused
// slots. A permutation sends layout position j to slot permutation[j].
CodingTables build_tables(const QuantizedDistribution& q,
                          std::span<const uint32_t> permutation = {});

// Seeded uniform shuffle of 0..k-1, reproducible across platforms.
std::vector<uint32_t> random_slot_permutation(uint32_t k, uint64_t seed);

}  // namespace csrdtans
