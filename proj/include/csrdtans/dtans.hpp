#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csrdtans/coding_tables.hpp"

namespace csrdtans {

// Segment codec parameters, all radices stored as base-2 logarithms:
// W = 2^word_bits, K = 2^slot_bits, M = 2^multiplicity_bits. A segment packs
// segment_symbols (l) slot indices into segment_words (o) words and performs
// checks (f) conditional loads.
struct DtansParams {
  uint32_t word_bits = 32;
  uint32_t slot_bits = 12;
  uint32_t multiplicity_bits = 8;
  uint32_t segment_symbols = 8;
  uint32_t segment_words = 3;
  uint32_t checks = 2;

  static constexpr DtansParams production() { return {}; }
  // W=4, K=8, M=4, l=2, o=3, f=2.
  static constexpr DtansParams toy() { return {2, 3, 2, 2, 3, 2}; }

  uint64_t word_radix() const { return uint64_t{1} << word_bits; }
  uint32_t slot_count() const { return 1u << slot_bits; }
  uint32_t max_multiplicity() const { return 1u << multiplicity_bits; }
  uint32_t group_size() const { return segment_symbols / checks; }

  bool operator==(const DtansParams&) const = default;
};

struct ParamViolation {
  std::string constraint;
  std::string detail;  // e.g. "M^l = 16 > W^f = 4"
};

// Returns the first violated constraint, or nothing when the parameters are
// usable.
std::optional<ParamViolation> validate_params(const DtansParams& p);

// Words w_1..w_o (w_1 most significant) to slots i_1..i_l (i_1 least
// significant digit in base K).
std::vector<uint32_t> unpack(std::span<const uint32_t> words,
                             const DtansParams& p);
std::vector<uint32_t> pack(std::span<const uint32_t> slots,
                           const DtansParams& p);

struct DecoderState {
  uint64_t digit = 0;  // d
  uint64_t radix = 1;  // r

  bool operator==(const DecoderState&) const = default;
};

// Appends a digit of the given base: d' = d*base + digit, r' = r*base.
DecoderState accumulate(DecoderState state, uint32_t digit, uint32_t base);

struct Extraction {
  uint32_t word = 0;
  DecoderState state;
};

// Takes the lowest word out of the state. Requires r >= W.
Extraction extract_word(DecoderState state, uint64_t word_radix);

enum class LoadStage : uint8_t {
  kInitial = 0,
  kEscape = 1,
  kCheck = 2,
  kUnconditional = 3,
};

// Position of a word load in the decoder's control flow. The ordering of
// tags is the order in which a decoder performs its loads.
struct LoadTag {
  uint64_t segment = 0;
  LoadStage stage = LoadStage::kInitial;
  uint32_t index = 0;

  auto operator<=>(const LoadTag&) const = default;
};

enum class CheckOutcome : uint8_t { kLoaded = 0, kExtracted = 1, kSkipped = 2 };

// Whether the segment holding the final symbols still performs its loads.
// kFull keeps them (the encoder then emits words nobody needs); kSkip drops
// every load once no further segment follows.
enum class TailLoads : uint8_t { kSkip = 0, kFull = 1 };

struct SegmentRecord {
  std::vector<uint32_t> slots;
  std::vector<CheckOutcome> checks;
  std::vector<DecoderState> state_after_check;
  std::vector<uint32_t> next_words;  // words handed to the following unpack
  uint32_t escapes = 0;
  uint32_t words_loaded = 0;
};

struct DecodeTrace {
  std::vector<SegmentRecord> segments;
  std::vector<LoadTag> loads;  // one tag per consumed word
  uint64_t words_consumed = 0;

  std::vector<CheckOutcome> check_outcomes() const;
};

struct EncodedStream {
  std::vector<uint32_t> words;
  std::vector<LoadTag> loads;           // tag of the load that reads each word
  std::vector<CheckOutcome> branches;   // f outcomes per segment
};

class LaneDecoder;

// Segment codec over one or more symbol domains: symbol k of a stream uses
// domain k mod D. The tables are referenced, not copied, and must outlive
// the codec.
class DtansCodec {
 public:
  DtansCodec(const DtansParams& params,
             std::vector<const CodingTables*> domains,
             TailLoads tail = TailLoads::kSkip);

  const DtansParams& params() const { return params_; }
  TailLoads tail() const { return tail_; }
  size_t domain_count() const { return domains_.size(); }
  const CodingTables& domain(size_t i) const { return *domains_[i]; }
  // Stream words carrying the raw payload of an escaped symbol.
  uint32_t payload_words(size_t domain) const { return payload_words_[domain]; }
  uint64_t segment_count(uint64_t n) const {
    return (n + params_.segment_symbols - 1) / params_.segment_symbols;
  }

  // Forward pass: check outcomes from the bases of the symbols alone.
  std::vector<CheckOutcome> base_pass(std::span<const uint64_t> symbols) const;
  EncodedStream encode(std::span<const uint64_t> symbols) const;
  std::vector<uint64_t> decode(std::span<const uint32_t> words, uint64_t n,
                               DecodeTrace* trace = nullptr) const;

 private:
  friend class LaneDecoder;

  struct Coded {
    uint64_t symbol;
    uint32_t base;
    bool escape;
  };
  std::vector<Coded> classify(std::span<const uint64_t> symbols) const;

  DtansParams params_;
  std::vector<const CodingTables*> domains_;
  std::vector<uint32_t> payload_words_;
  std::vector<uint64_t> pad_symbol_;
  TailLoads tail_;
};

// Decoder for a single stream, driven one step at a time so that several
// lanes can share load points. The caller feeds words; the lane never reads
// a stream on its own.
class LaneDecoder {
 public:
  LaneDecoder() = default;
  void reset(const DtansCodec& codec, uint64_t n, DecodeTrace* trace = nullptr);

  bool finished() const { return segment_ >= segments_; }
  uint64_t segment() const { return segment_; }
  uint64_t segments() const { return segments_; }
  bool loads_this_segment() const;

  void set_word(uint32_t index, uint32_t word);
  // Starts the current segment: splits the words into slots and resolves
  // the symbols that need no payload.
  void unpack();
  uint32_t pending_escape_words() const {
    return escape_words_total_ - escape_words_seen_;
  }
  void push_escape_word(uint32_t word);
  void accumulate_group(uint32_t group);
  // Extracts a word from the state if possible; true means the caller must
  // load word `group` from the stream.
  bool check(uint32_t group);
  void end_segment();

  // Symbols of the current segment, padding removed.
  std::span<const uint64_t> symbols() const;
  DecoderState state() const { return state_; }

 private:
  const DtansCodec* codec_ = nullptr;
  DecodeTrace* trace_ = nullptr;
  uint64_t n_ = 0;
  uint64_t segments_ = 0;
  uint64_t segment_ = 0;
  DecoderState state_;
  std::vector<uint32_t> words_;
  std::vector<uint32_t> slots_;
  std::vector<uint64_t> symbols_;
  std::vector<uint32_t> escape_positions_;
  uint32_t escape_words_total_ = 0;
  uint32_t escape_words_seen_ = 0;
};

}  // namespace csrdtans
