#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace csrdtans {

// Empirical distribution over opaque fixed-width symbols. Symbols with a
// zero count are dropped on construction.
struct SymbolDistribution {
  std::vector<uint64_t> symbols;
  std::vector<uint64_t> counts;
  std::vector<double> probs;

  static SymbolDistribution from_counts(std::vector<uint64_t> symbols,
                                        std::vector<uint64_t> counts);
  // Counts occurrences; the result is ordered by symbol value.
  static SymbolDistribution from_samples(std::span<const uint64_t> samples);

  size_t size() const { return symbols.size(); }
  uint64_t total() const;
};

// Slot assignment for one symbol domain. multiplicities[i] belongs to
// symbols[i]; a zero multiplicity means the symbol is escaped.
struct QuantizedDistribution {
  uint32_t table_size = 0;        // K
  uint32_t max_multiplicity = 0;  // M
  uint32_t raw_width_bits = 0;    // payload width of an escaped symbol
  std::vector<uint64_t> symbols;
  std::vector<uint32_t> multiplicities;
  uint32_t escape_multiplicity = 0;  // zero when nothing is escaped
  // Slots left over when every entry sits at the cap M.
  uint32_t unused_slots = 0;

  bool has_escape() const { return escape_multiplicity > 0; }
  std::vector<uint64_t> escaped() const;
  size_t retained_count() const;
  // Throws std::invalid_argument if the slot accounting is inconsistent.
  void validate() const;
};

// Bits per symbol, sum of -p log2 p.
double entropy(const SymbolDistribution& p);

// Bits per symbol when coding P with the slot frequencies of Q. Escaped
// symbols pay the escape slot cost plus the raw payload width.
double cross_entropy(const SymbolDistribution& p,
                     const QuantizedDistribution& q);

// Estimated encoded size in bits: total count times the cross entropy.
double expected_size_bits(const SymbolDistribution& p,
                          const QuantizedDistribution& q);

// Chooses the retained set, escape multiplicity and per-symbol slot counts
// that minimize expected_size_bits, with every multiplicity capped at M.
QuantizedDistribution quantize(const SymbolDistribution& p, uint32_t k,
                               uint32_t m, uint32_t raw_width_bits);

}  // namespace csrdtans
