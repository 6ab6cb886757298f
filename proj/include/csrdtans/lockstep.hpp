#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "csrdtans/dtans.hpp"
#include "csrdtans/errors.hpp"

namespace csrdtans {

inline constexpr uint32_t kWarpSize = 32;

// One synchronized load: every lane in lane_mask reads one word, lane i at
// stream position first + (number of mask bits below i).
struct LoadPoint {
  LoadTag tag;
  uint32_t lane_mask = 0;
  uint64_t first = 0;

  bool operator==(const LoadPoint&) const = default;
};

struct LockstepSchedule {
  std::vector<LoadPoint> events;

  uint64_t words() const;
  bool operator==(const LockstepSchedule&) const = default;
};

// True when the events tile the stream without gaps, in order. Together
// with the rank rule of LoadPoint this makes every warp load contiguous.
bool is_coalesced(const LockstepSchedule& schedule);

struct WarpStream {
  std::vector<uint32_t> words;
  LockstepSchedule schedule;
};

// Merges up to 32 per-lane streams so that each synchronized load reads the
// active lanes' words from consecutive positions.
WarpStream interleave_warp(std::span<const EncodedStream> lanes);

// Splits an interleaved stream back into per-lane streams.
std::vector<std::vector<uint32_t>> deinterleave_warp(
    std::span<const uint32_t> words, const LockstepSchedule& schedule,
    size_t lanes);

// Replays up to 32 lane decoders in lockstep over one interleaved stream.
// The sink is called as sink(lane, symbols) after every segment of an active
// lane. Returns the number of words consumed.
class WarpDecoder {
 public:
  explicit WarpDecoder(const DtansCodec& codec) : codec_(&codec) {}

  template <class Sink>
  uint64_t replay(std::span<const uint32_t> stream,
                  std::span<const uint64_t> counts, Sink&& sink,
                  LockstepSchedule* schedule = nullptr,
                  std::span<DecodeTrace> traces = {});

 private:
  template <class Assign>
  void load(uint32_t mask, LoadTag tag, Assign&& assign);

  const DtansCodec* codec_;
  std::array<LaneDecoder, kWarpSize> lanes_;
  std::span<const uint32_t> stream_;
  uint64_t pos_ = 0;
  LockstepSchedule* schedule_ = nullptr;
  std::span<DecodeTrace> traces_;
};

template <class Assign>
void WarpDecoder::load(uint32_t mask, LoadTag tag, Assign&& assign) {
  if (mask == 0) return;
  const uint64_t count = std::popcount(mask);
  if (pos_ + count > stream_.size()) {
    throw CorruptStreamError("interleaved stream exhausted");
  }
  if (schedule_) schedule_->events.push_back({tag, mask, pos_});
  uint64_t rank = 0;
  for (uint32_t m = mask; m != 0; m &= m - 1) {
    const uint32_t lane = static_cast<uint32_t>(std::countr_zero(m));
    assign(lane, stream_[pos_ + rank++]);
    if (lane < traces_.size()) {
      traces_[lane].loads.push_back(tag);
      ++traces_[lane].words_consumed;
    }
  }
  pos_ += count;
}

template <class Sink>
uint64_t WarpDecoder::replay(std::span<const uint32_t> stream,
                             std::span<const uint64_t> counts, Sink&& sink,
                             LockstepSchedule* schedule,
                             std::span<DecodeTrace> traces) {
  if (counts.size() > kWarpSize) {
    throw std::invalid_argument("a warp has at most 32 lanes");
  }
  stream_ = stream;
  pos_ = 0;
  schedule_ = schedule;
  traces_ = traces;
  const DtansParams& p = codec_->params();
  const uint32_t o = p.segment_words, f = p.checks;
  const uint32_t nl = static_cast<uint32_t>(counts.size());

  uint32_t active = 0;
  for (uint32_t i = 0; i < nl; ++i) {
    DecodeTrace* trace = nullptr;
    if (i < traces.size()) {
      traces[i] = DecodeTrace{};
      trace = &traces[i];
    }
    lanes_[i].reset(*codec_, counts[i], trace);
    if (counts[i] > 0) active |= 1u << i;
  }
  for (uint32_t k = 0; k < o; ++k) {
    load(active, {0, LoadStage::kInitial, k},
         [&](uint32_t lane, uint32_t w) { lanes_[lane].set_word(k, w); });
  }
  for (uint64_t j = 0; active != 0; ++j) {
    uint32_t escapes = 0;
    for (uint32_t m = active; m != 0; m &= m - 1) {
      LaneDecoder& lane = lanes_[std::countr_zero(m)];
      lane.unpack();
      if (lane.pending_escape_words() > 0) escapes |= m & -m;
    }
    for (uint32_t q = 0; escapes != 0; ++q) {
      load(escapes, {j, LoadStage::kEscape, q},
           [&](uint32_t lane, uint32_t w) { lanes_[lane].push_escape_word(w); });
      for (uint32_t m = escapes; m != 0; m &= m - 1) {
        if (lanes_[std::countr_zero(m)].pending_escape_words() == 0) {
          escapes &= ~(m & -m);
        }
      }
    }
    uint32_t loading = 0;
    for (uint32_t m = active; m != 0; m &= m - 1) {
      if (lanes_[std::countr_zero(m)].loads_this_segment()) loading |= m & -m;
    }
    for (uint32_t g = 0; g < f; ++g) {
      uint32_t need = 0;
      for (uint32_t m = active; m != 0; m &= m - 1) {
        LaneDecoder& lane = lanes_[std::countr_zero(m)];
        lane.accumulate_group(g);
        if (lane.check(g)) need |= m & -m;
      }
      load(need, {j, LoadStage::kCheck, g},
           [&](uint32_t lane, uint32_t w) { lanes_[lane].set_word(g, w); });
    }
    for (uint32_t k = f; k < o; ++k) {
      load(loading, {j, LoadStage::kUnconditional, k},
           [&](uint32_t lane, uint32_t w) { lanes_[lane].set_word(k, w); });
    }
    for (uint32_t m = active; m != 0; m &= m - 1) {
      const uint32_t i = static_cast<uint32_t>(std::countr_zero(m));
      sink(i, lanes_[i].symbols());
      lanes_[i].end_segment();
      if (lanes_[i].finished()) active &= ~(1u << i);
    }
  }
  return pos_;
}

}  // namespace csrdtans
