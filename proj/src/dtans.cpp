#include "csrdtans/dtans.hpp"

#include <algorithm>
#include <stdexcept>

#include "csrdtans/errors.hpp"

namespace csrdtans {

namespace {

using u128 = unsigned __int128;

std::string power_of_two(uint32_t exponent) {
  if (exponent < 64) return std::to_string(uint64_t{1} << exponent);
  return "2^" + std::to_string(exponent);
}

void unpack_into(const uint32_t* words, const DtansParams& p, uint32_t* slots) {
  const uint32_t o = p.segment_words;
  u128 x = 0;
  for (uint32_t i = 0; i < o; ++i) x = (x << p.word_bits) | words[i];
  const uint32_t mask = p.slot_count() - 1;
  for (uint32_t k = 0; k < p.segment_symbols; ++k) {
    slots[k] = static_cast<uint32_t>(x) & mask;
    x >>= p.slot_bits;
  }
}

void pack_into(const uint32_t* slots, const DtansParams& p, uint32_t* words) {
  u128 x = 0;
  for (uint32_t k = p.segment_symbols; k-- > 0;) {
    x = (x << p.slot_bits) | slots[k];
  }
  const uint64_t mask = p.word_radix() - 1;
  for (uint32_t i = p.segment_words; i-- > 0;) {
    words[i] = static_cast<uint32_t>(static_cast<uint64_t>(x) & mask);
    x >>= p.word_bits;
  }
}

}  // namespace

std::optional<ParamViolation> validate_params(const DtansParams& p) {
  const uint32_t wb = p.word_bits, kb = p.slot_bits, mb = p.multiplicity_bits;
  const uint32_t l = p.segment_symbols, o = p.segment_words, f = p.checks;
  auto fail = [](std::string c, std::string d) {
    return std::optional<ParamViolation>(ParamViolation{std::move(c), std::move(d)});
  };
  if (wb < 1 || wb > 32) {
    return fail("1 <= log2 W <= 32", "log2 W = " + std::to_string(wb));
  }
  if (kb < 1 || kb > 24) {
    return fail("1 <= log2 K <= 24", "log2 K = " + std::to_string(kb));
  }
  if (mb > kb) {
    return fail("M <= K", "M = " + power_of_two(mb) + " > K = " + power_of_two(kb));
  }
  if (l < 1 || o < 1 || f < 1) {
    return fail("l, o, f >= 1", "l = " + std::to_string(l) + ", o = " +
                                    std::to_string(o) + ", f = " +
                                    std::to_string(f));
  }
  if (f > o) {
    return fail("f <= o", "f = " + std::to_string(f) + " > o = " + std::to_string(o));
  }
  if (l % f != 0) {
    return fail("f divides l", "l = " + std::to_string(l) + ", f = " +
                                   std::to_string(f));
  }
  if (static_cast<uint64_t>(o) * wb < static_cast<uint64_t>(l) * kb) {
    return fail("W^o >= K^l", "W^o = " + power_of_two(o * wb) + " < K^l = " +
                                  power_of_two(l * kb));
  }
  if (static_cast<uint64_t>(o - 1) * wb >= static_cast<uint64_t>(l) * kb) {
    return fail("W^(o-1) < K^l", "W^(o-1) = " + power_of_two((o - 1) * wb) +
                                     " >= K^l = " + power_of_two(l * kb));
  }
  if (static_cast<uint64_t>(l) * mb > static_cast<uint64_t>(f) * wb) {
    return fail("M^l <= W^f", "M^l = " + power_of_two(l * mb) + " > W^f = " +
                                  power_of_two(f * wb));
  }
  if (static_cast<uint64_t>(o) * wb > 128) {
    return fail("o * log2 W <= 128", "o * log2 W = " + std::to_string(o * wb));
  }
  return std::nullopt;
}

std::vector<uint32_t> unpack(std::span<const uint32_t> words,
                             const DtansParams& p) {
  if (words.size() != p.segment_words) {
    throw std::invalid_argument("unpack needs exactly o words");
  }
  std::vector<uint32_t> slots(p.segment_symbols);
  unpack_into(words.data(), p, slots.data());
  return slots;
}

std::vector<uint32_t> pack(std::span<const uint32_t> slots,
                           const DtansParams& p) {
  if (slots.size() != p.segment_symbols) {
    throw std::invalid_argument("pack needs exactly l slots");
  }
  for (uint32_t s : slots) {
    if (s >= p.slot_count()) throw std::invalid_argument("slot out of range");
  }
  std::vector<uint32_t> words(p.segment_words);
  pack_into(slots.data(), p, words.data());
  return words;
}

DecoderState accumulate(DecoderState state, uint32_t digit, uint32_t base) {
  // x * b computed as x * (b - 1) + x, which is how the packed decremented
  // bases are consumed.
  const uint64_t bm1 = base - 1;
  return {state.digit * bm1 + state.digit + digit,
          state.radix * bm1 + state.radix};
}

Extraction extract_word(DecoderState state, uint64_t word_radix) {
  if (state.radix < word_radix) {
    throw std::logic_error("extract_word called with r < W");
  }
  return {static_cast<uint32_t>(state.digit % word_radix),
          {state.digit / word_radix, state.radix / word_radix}};
}

std::vector<CheckOutcome> DecodeTrace::check_outcomes() const {
  std::vector<CheckOutcome> out;
  for (const auto& s : segments) {
    out.insert(out.end(), s.checks.begin(), s.checks.end());
  }
  return out;
}

DtansCodec::DtansCodec(const DtansParams& params,
                       std::vector<const CodingTables*> domains,
                       TailLoads tail)
    : params_(params), domains_(std::move(domains)), tail_(tail) {
  if (auto v = validate_params(params_)) {
    throw std::invalid_argument("invalid dtANS parameters: " + v->constraint +
                                " violated (" + v->detail + ")");
  }
  if (domains_.empty()) throw std::invalid_argument("no symbol domains");
  for (const CodingTables* t : domains_) {
    if (t == nullptr) throw std::invalid_argument("null coding tables");
    if (t->size() != params_.slot_count()) {
      throw std::invalid_argument("coding tables do not have K slots");
    }
    if (t->max_multiplicity() > params_.max_multiplicity()) {
      throw std::invalid_argument("coding tables exceed the multiplicity cap");
    }
    payload_words_.push_back(
        t->has_escape()
            ? std::max<uint32_t>(1, (t->symbol_bits() + params_.word_bits - 1) /
                                        params_.word_bits)
            : 0);
    auto pad = t->most_frequent();
    pad_symbol_.push_back(pad ? *pad : t->escape_sentinel());
  }
}

std::vector<DtansCodec::Coded> DtansCodec::classify(
    std::span<const uint64_t> symbols) const {
  const uint64_t n = symbols.size();
  const uint32_t l = params_.segment_symbols;
  const uint64_t total = segment_count(n) * l;
  const size_t nd = domains_.size();
  std::vector<Coded> out(total);
  for (uint64_t i = 0; i < total; ++i) {
    const size_t dom = i % nd;
    const CodingTables& t = *domains_[dom];
    const uint64_t s = i < n ? symbols[i] : pad_symbol_[dom];
    if (auto m = t.multiplicity(s)) {
      out[i] = {s, *m, false};
      continue;
    }
    if (!t.has_escape()) {
      throw std::invalid_argument("symbol " + std::to_string(s) +
                                  " is not retained and its domain has no "
                                  "escape");
    }
    const uint32_t bits = t.symbol_bits();
    if (bits < 64 && (s >> bits) != 0) {
      throw std::invalid_argument("escaped symbol wider than its domain");
    }
    // Padding that falls on an escape-only domain carries a zero payload.
    out[i] = {i < n ? s : 0, t.escape_multiplicity(), true};
  }
  return out;
}

std::vector<CheckOutcome> DtansCodec::base_pass(
    std::span<const uint64_t> symbols) const {
  const auto coded = classify(symbols);
  const uint32_t l = params_.segment_symbols, f = params_.checks;
  const uint32_t gs = params_.group_size();
  const uint64_t w = params_.word_radix();
  const uint64_t segs = segment_count(symbols.size());
  std::vector<CheckOutcome> out;
  out.reserve(segs * f);
  uint64_t r = 1;
  for (uint64_t j = 0; j < segs; ++j) {
    const bool loads = j + 1 < segs || tail_ == TailLoads::kFull;
    for (uint32_t g = 0; g < f; ++g) {
      if (!loads) {
        out.push_back(CheckOutcome::kSkipped);
        continue;
      }
      for (uint32_t k = g * gs; k < (g + 1) * gs; ++k) r *= coded[j * l + k].base;
      if (r >= w) {
        r /= w;
        out.push_back(CheckOutcome::kExtracted);
      } else {
        out.push_back(CheckOutcome::kLoaded);
      }
    }
  }
  return out;
}

EncodedStream DtansCodec::encode(std::span<const uint64_t> symbols) const {
  EncodedStream out;
  const uint64_t n = symbols.size();
  if (n == 0) return out;
  const auto coded = classify(symbols);
  out.branches = base_pass(symbols);

  const uint32_t l = params_.segment_symbols, o = params_.segment_words;
  const uint32_t f = params_.checks, gs = params_.group_size();
  const uint64_t w = params_.word_radix();
  const uint64_t wmask = w - 1;
  const uint64_t segs = segment_count(n);
  const size_t nd = domains_.size();

  // Built back to front, then reversed.
  std::vector<uint32_t>& words = out.words;
  std::vector<LoadTag>& tags = out.loads;
  std::vector<uint32_t> next(o, 0), slots(l);
  std::vector<uint32_t> payload;
  uint64_t d = 0;
  for (uint64_t j = segs; j-- > 0;) {
    const bool loads = j + 1 < segs || tail_ == TailLoads::kFull;
    if (loads) {
      for (uint32_t k = o; k-- > f;) {
        words.push_back(next[k]);
        tags.push_back({j, LoadStage::kUnconditional, k});
      }
    }
    for (uint32_t g = f; g-- > 0;) {
      if (loads) {
        if (out.branches[j * f + g] == CheckOutcome::kExtracted) {
          d = d * w + next[g];
        } else {
          words.push_back(next[g]);
          tags.push_back({j, LoadStage::kCheck, g});
        }
      }
      for (uint32_t k = (g + 1) * gs; k-- > g * gs;) {
        const Coded& c = coded[j * l + k];
        const CodingTables& t = *domains_[(j * l + k) % nd];
        uint32_t digit = 0;
        if (loads) {
          digit = static_cast<uint32_t>(d % c.base);
          d /= c.base;
        }
        slots[k] = c.escape ? t.escape_slot(digit) : *t.slot_of(c.symbol, digit);
      }
    }
    payload.clear();
    for (uint32_t k = 0; k < l; ++k) {
      const Coded& c = coded[j * l + k];
      if (!c.escape) continue;
      const uint32_t pw = payload_words_[(j * l + k) % nd];
      for (uint32_t i = 0; i < pw; ++i) {
        const uint32_t shift = i * params_.word_bits;
        payload.push_back(shift < 64 ? static_cast<uint32_t>((c.symbol >> shift) & wmask) : 0);
      }
    }
    for (size_t q = payload.size(); q-- > 0;) {
      words.push_back(payload[q]);
      tags.push_back({j, LoadStage::kEscape, static_cast<uint32_t>(q)});
    }
    pack_into(slots.data(), params_, next.data());
  }
  for (uint32_t k = o; k-- > 0;) {
    words.push_back(next[k]);
    tags.push_back({0, LoadStage::kInitial, k});
  }
  if (d != 0) {
    throw std::logic_error("dtANS digit pass left a residual state");
  }
  std::reverse(words.begin(), words.end());
  std::reverse(tags.begin(), tags.end());
  return out;
}

std::vector<uint64_t> DtansCodec::decode(std::span<const uint32_t> words,
                                         uint64_t n, DecodeTrace* trace) const {
  std::vector<uint64_t> out;
  if (trace) *trace = DecodeTrace{};
  if (n == 0) return out;
  out.reserve(n);
  const uint32_t o = params_.segment_words, f = params_.checks;
  size_t pos = 0;
  auto read = [&](LoadTag tag) {
    if (pos >= words.size()) {
      throw CorruptStreamError("dtANS stream exhausted");
    }
    if (trace) trace->loads.push_back(tag);
    return words[pos++];
  };
  LaneDecoder lane;
  lane.reset(*this, n, trace);
  for (uint32_t k = 0; k < o; ++k) {
    lane.set_word(k, read({0, LoadStage::kInitial, k}));
  }
  while (!lane.finished()) {
    const uint64_t j = lane.segment();
    lane.unpack();
    for (uint32_t q = 0; lane.pending_escape_words() > 0; ++q) {
      lane.push_escape_word(read({j, LoadStage::kEscape, q}));
    }
    for (uint32_t g = 0; g < f; ++g) {
      lane.accumulate_group(g);
      if (lane.check(g)) lane.set_word(g, read({j, LoadStage::kCheck, g}));
    }
    if (lane.loads_this_segment()) {
      for (uint32_t k = f; k < o; ++k) {
        lane.set_word(k, read({j, LoadStage::kUnconditional, k}));
      }
    }
    const auto s = lane.symbols();
    out.insert(out.end(), s.begin(), s.end());
    lane.end_segment();
  }
  if (trace) trace->words_consumed = pos;
  return out;
}

void LaneDecoder::reset(const DtansCodec& codec, uint64_t n,
                        DecodeTrace* trace) {
  const DtansParams& p = codec.params();
  codec_ = &codec;
  trace_ = trace;
  n_ = n;
  segments_ = codec.segment_count(n);
  segment_ = 0;
  state_ = {};
  words_.assign(p.segment_words, 0);
  slots_.assign(p.segment_symbols, 0);
  symbols_.assign(p.segment_symbols, 0);
  escape_positions_.clear();
  escape_words_total_ = 0;
  escape_words_seen_ = 0;
}

bool LaneDecoder::loads_this_segment() const {
  return segment_ + 1 < segments_ || codec_->tail() == TailLoads::kFull;
}

void LaneDecoder::set_word(uint32_t index, uint32_t word) {
  const DtansParams& p = codec_->params();
  if (p.word_bits < 32 && (word >> p.word_bits) != 0) {
    throw CorruptStreamError("stream word exceeds the word radix");
  }
  words_[index] = word;
  if (trace_ && !trace_->segments.empty() && trace_->segments.size() == segment_ + 1) {
    ++trace_->segments.back().words_loaded;
  }
}

void LaneDecoder::unpack() {
  const DtansParams& p = codec_->params();
  unpack_into(words_.data(), p, slots_.data());
  const size_t nd = codec_->domain_count();
  const uint64_t first = segment_ * p.segment_symbols;
  escape_positions_.clear();
  escape_words_total_ = 0;
  escape_words_seen_ = 0;
  for (uint32_t k = 0; k < p.segment_symbols; ++k) {
    const size_t dom = (first + k) % nd;
    const CodingTables& t = codec_->domain(dom);
    const uint32_t slot = slots_[k];
    switch (t.kind(slot)) {
      case SlotKind::kSymbol:
        symbols_[k] = t.symbol(slot);
        break;
      case SlotKind::kEscape:
        symbols_[k] = 0;
        escape_positions_.push_back(k);
        escape_words_total_ += codec_->payload_words(dom);
        break;
      default:
        throw CorruptStreamError("stream selects an unused slot");
    }
  }
  if (trace_) {
    SegmentRecord rec;
    rec.slots = slots_;
    rec.escapes = static_cast<uint32_t>(escape_positions_.size());
    trace_->segments.push_back(std::move(rec));
  }
}

void LaneDecoder::push_escape_word(uint32_t word) {
  const DtansParams& p = codec_->params();
  const size_t nd = codec_->domain_count();
  const uint64_t first = segment_ * p.segment_symbols;
  // Find which escaped position this word belongs to.
  uint32_t seen = escape_words_seen_;
  for (uint32_t k : escape_positions_) {
    const uint32_t pw = codec_->payload_words((first + k) % nd);
    if (seen < pw) {
      const uint32_t shift = seen * p.word_bits;
      if (shift < 64) symbols_[k] |= uint64_t{word} << shift;
      break;
    }
    seen -= pw;
  }
  ++escape_words_seen_;
  if (trace_) ++trace_->segments.back().words_loaded;
}

void LaneDecoder::accumulate_group(uint32_t group) {
  if (!loads_this_segment()) return;
  const DtansParams& p = codec_->params();
  const size_t nd = codec_->domain_count();
  const uint64_t first = segment_ * p.segment_symbols;
  const uint32_t gs = p.group_size();
  // Reduce the group to one (digit, radix) pair, then fold it into the state.
  DecoderState g;
  for (uint32_t k = group * gs; k < (group + 1) * gs; ++k) {
    const CodingTables& t = codec_->domain((first + k) % nd);
    g = accumulate(g, t.digit(slots_[k]), t.base(slots_[k]));
  }
  state_ = {state_.digit * g.radix + g.digit, state_.radix * g.radix};
}

bool LaneDecoder::check(uint32_t group) {
  CheckOutcome outcome;
  bool need_load = false;
  const uint64_t w = codec_->params().word_radix();
  if (!loads_this_segment()) {
    outcome = CheckOutcome::kSkipped;
  } else if (state_.radix >= w) {
    Extraction e = extract_word(state_, w);
    words_[group] = e.word;
    state_ = e.state;
    outcome = CheckOutcome::kExtracted;
  } else {
    outcome = CheckOutcome::kLoaded;
    need_load = true;
  }
  if (trace_) {
    trace_->segments.back().checks.push_back(outcome);
    trace_->segments.back().state_after_check.push_back(state_);
  }
  return need_load;
}

void LaneDecoder::end_segment() {
  if (trace_) trace_->segments.back().next_words = words_;
  ++segment_;
}

std::span<const uint64_t> LaneDecoder::symbols() const {
  const uint32_t l = codec_->params().segment_symbols;
  const uint64_t left = n_ - segment_ * l;
  return {symbols_.data(), static_cast<size_t>(std::min<uint64_t>(l, left))};
}

}  // namespace csrdtans
