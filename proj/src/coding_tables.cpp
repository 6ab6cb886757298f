#include "csrdtans/coding_tables.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace csrdtans {

CodingTables CodingTables::from_slots(std::vector<uint64_t> symbol,
                                      std::vector<uint32_t> digit,
                                      std::vector<uint32_t> base,
                                      std::vector<SlotKind> kind,
                                      uint32_t max_multiplicity,
                                      uint32_t symbol_bits) {
  const size_t k = symbol.size();
  if (digit.size() != k || base.size() != k || kind.size() != k) {
    throw std::invalid_argument("slot arrays differ in length");
  }
  CodingTables t;
  t.symbol_ = std::move(symbol);
  t.digit_ = std::move(digit);
  t.base_ = std::move(base);
  t.kind_ = std::move(kind);
  t.max_multiplicity_ = max_multiplicity;
  t.symbol_bits_ = symbol_bits;
  t.build_reverse();
  return t;
}

void CodingTables::build_reverse() {
  const uint32_t k = size();
  entry_of_.clear();
  entries_.clear();
  digit_slots_.clear();
  escape_slots_.clear();
  escape_multiplicity_ = 0;
  escape_sentinel_ = 0;

  // First pass: group slots per symbol and check that each group is a full
  // run of digits 0..r-1 sharing base r.
  std::vector<uint32_t> seen;  // per entry, number of slots found
  for (uint32_t j = 0; j < k; ++j) {
    const uint32_t b = base_[j];
    const uint32_t d = digit_[j];
    switch (kind_[j]) {
      case SlotKind::kUnused:
        if (b != 1 || d != 0) {
          throw std::invalid_argument("unused slot must carry digit 0, base 1");
        }
        continue;
      case SlotKind::kEscape:
        if (escape_slots_.empty()) {
          escape_multiplicity_ = b;
          escape_sentinel_ = symbol_[j];
          escape_slots_.assign(b, k);
        } else if (b != escape_multiplicity_ || symbol_[j] != escape_sentinel_) {
          throw std::invalid_argument("inconsistent escape slots");
        }
        if (d >= b || escape_slots_[d] != k) {
          throw std::invalid_argument("escape digits are not a permutation");
        }
        escape_slots_[d] = j;
        break;
      case SlotKind::kSymbol: {
        auto [it, fresh] = entry_of_.emplace(symbol_[j], 0);
        if (fresh) {
          it->second = static_cast<uint32_t>(entries_.size());
          entries_.push_back({b, static_cast<uint32_t>(digit_slots_.size())});
          digit_slots_.resize(digit_slots_.size() + b, k);
          seen.push_back(0);
        }
        Entry& e = entries_[it->second];
        if (b != e.multiplicity) {
          throw std::invalid_argument("symbol " + std::to_string(symbol_[j]) +
                                      " has inconsistent bases");
        }
        if (d >= b || digit_slots_[e.first + d] != k) {
          throw std::invalid_argument("digits of symbol " +
                                      std::to_string(symbol_[j]) +
                                      " are not a permutation");
        }
        digit_slots_[e.first + d] = j;
        ++seen[it->second];
        break;
      }
      default:
        throw std::invalid_argument("unknown slot kind");
    }
    if (b < 1 || b > max_multiplicity_) {
      throw std::invalid_argument("base " + std::to_string(b) +
                                  " outside [1, M]");
    }
  }
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (seen[i] != entries_[i].multiplicity) {
      throw std::invalid_argument("symbol run shorter than its base");
    }
  }
  for (uint32_t s : escape_slots_) {
    if (s == k) throw std::invalid_argument("escape run shorter than its base");
  }
  if (has_escape() && entry_of_.count(escape_sentinel_)) {
    throw std::invalid_argument("escape sentinel collides with a symbol");
  }
}

std::optional<uint32_t> CodingTables::multiplicity(uint64_t symbol) const {
  auto it = entry_of_.find(symbol);
  if (it == entry_of_.end()) return std::nullopt;
  return entries_[it->second].multiplicity;
}

std::optional<uint32_t> CodingTables::slot_of(uint64_t symbol,
                                              uint32_t digit) const {
  auto it = entry_of_.find(symbol);
  if (it == entry_of_.end()) return std::nullopt;
  const Entry& e = entries_[it->second];
  if (digit >= e.multiplicity) return std::nullopt;
  return digit_slots_[e.first + digit];
}

uint32_t CodingTables::escape_slot(uint32_t digit) const {
  if (digit >= escape_slots_.size()) {
    throw std::out_of_range("escape digit out of range");
  }
  return escape_slots_[digit];
}

std::optional<uint64_t> CodingTables::most_frequent() const {
  std::optional<uint64_t> best;
  uint32_t best_m = 0;
  // Scan in slot order so the choice does not depend on hash iteration.
  for (uint32_t j = 0; j < size(); ++j) {
    if (kind_[j] == SlotKind::kSymbol && base_[j] > best_m) {
      best_m = base_[j];
      best = symbol_[j];
    }
  }
  return best;
}

bool CodingTables::operator==(const CodingTables& other) const {
  return symbol_ == other.symbol_ && digit_ == other.digit_ &&
         base_ == other.base_ && kind_ == other.kind_ &&
         max_multiplicity_ == other.max_multiplicity_ &&
         symbol_bits_ == other.symbol_bits_;
}

CodingTables build_tables(const QuantizedDistribution& q,
                          std::span<const uint32_t> permutation) {
  q.validate();
  const uint32_t k = q.table_size;
  std::vector<uint64_t> symbol;
  std::vector<uint32_t> digit, base;
  std::vector<SlotKind> kind;
  symbol.reserve(k);
  digit.reserve(k);
  base.reserve(k);
  kind.reserve(k);
  auto emit = [&](uint64_t s, uint32_t r, SlotKind what) {
    for (uint32_t d = 0; d < r; ++d) {
      symbol.push_back(s);
      digit.push_back(d);
      base.push_back(r);
      kind.push_back(what);
    }
  };
  std::vector<uint64_t> retained;
  for (size_t i = 0; i < q.symbols.size(); ++i) {
    if (q.multiplicities[i] == 0) continue;
    emit(q.symbols[i], q.multiplicities[i], SlotKind::kSymbol);
    retained.push_back(q.symbols[i]);
  }
  if (q.has_escape()) {
    // Smallest value that no retained symbol uses.
    std::sort(retained.begin(), retained.end());
    uint64_t sentinel = 0;
    for (uint64_t s : retained) {
      if (s == sentinel) {
        ++sentinel;
      } else if (s > sentinel) {
        break;
      }
    }
    emit(sentinel, q.escape_multiplicity, SlotKind::kEscape);
  }
  for (uint32_t i = 0; i < q.unused_slots; ++i) {
    symbol.push_back(0);
    digit.push_back(0);
    base.push_back(1);
    kind.push_back(SlotKind::kUnused);
  }

  if (!permutation.empty()) {
    if (permutation.size() != k) {
      throw std::invalid_argument("permutation length differs from K");
    }
    std::vector<bool> hit(k, false);
    for (uint32_t p : permutation) {
      if (p >= k || hit[p]) throw std::invalid_argument("not a permutation");
      hit[p] = true;
    }
    std::vector<uint64_t> s2(k);
    std::vector<uint32_t> d2(k), b2(k);
    std::vector<SlotKind> k2(k);
    for (uint32_t j = 0; j < k; ++j) {
      s2[permutation[j]] = symbol[j];
      d2[permutation[j]] = digit[j];
      b2[permutation[j]] = base[j];
      k2[permutation[j]] = kind[j];
    }
    symbol.swap(s2);
    digit.swap(d2);
    base.swap(b2);
    kind.swap(k2);
  }
  return CodingTables::from_slots(std::move(symbol), std::move(digit),
                                  std::move(base), std::move(kind),
                                  q.max_multiplicity, q.raw_width_bits);
}

std::vector<uint32_t> random_slot_permutation(uint32_t k, uint64_t seed) {
  std::vector<uint32_t> perm(k);
  for (uint32_t i = 0; i < k; ++i) perm[i] = i;
  // Fisher-Yates with an explicit bounded draw; std::shuffle and the standard
  // distributions are not guaranteed to agree across library vendors.
  std::mt19937_64 rng(seed);
  for (uint32_t i = k; i > 1; --i) {
    const uint64_t bound = i;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = rng();
    } while (x >= limit);
    std::swap(perm[i - 1], perm[x % bound]);
  }
  return perm;
}

}  // namespace csrdtans
