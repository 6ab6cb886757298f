#include "csrdtans/lockstep.hpp"

#include <stdexcept>

namespace csrdtans {

uint64_t LockstepSchedule::words() const {
  uint64_t total = 0;
  for (const LoadPoint& e : events) total += std::popcount(e.lane_mask);
  return total;
}

bool is_coalesced(const LockstepSchedule& schedule) {
  uint64_t expect = 0;
  for (size_t i = 0; i < schedule.events.size(); ++i) {
    const LoadPoint& e = schedule.events[i];
    if (e.lane_mask == 0 || e.first != expect) return false;
    if (i > 0 && !(schedule.events[i - 1].tag < e.tag)) return false;
    expect += std::popcount(e.lane_mask);
  }
  return true;
}

WarpStream interleave_warp(std::span<const EncodedStream> lanes) {
  if (lanes.size() > kWarpSize) {
    throw std::invalid_argument("a warp has at most 32 lanes");
  }
  for (const EncodedStream& s : lanes) {
    if (s.words.size() != s.loads.size()) {
      throw std::logic_error("lane stream and load trace differ in length");
    }
    for (size_t i = 1; i < s.loads.size(); ++i) {
      if (!(s.loads[i - 1] < s.loads[i])) {
        throw std::logic_error("lane load trace is not in decoder order");
      }
    }
  }
  WarpStream out;
  std::array<size_t, kWarpSize> cursor{};
  while (true) {
    const LoadTag* next = nullptr;
    for (size_t i = 0; i < lanes.size(); ++i) {
      if (cursor[i] < lanes[i].loads.size() &&
          (next == nullptr || lanes[i].loads[cursor[i]] < *next)) {
        next = &lanes[i].loads[cursor[i]];
      }
    }
    if (next == nullptr) break;
    const LoadTag tag = *next;
    LoadPoint event{tag, 0, out.words.size()};
    for (size_t i = 0; i < lanes.size(); ++i) {
      if (cursor[i] < lanes[i].loads.size() && lanes[i].loads[cursor[i]] == tag) {
        event.lane_mask |= 1u << i;
        out.words.push_back(lanes[i].words[cursor[i]++]);
      }
    }
    out.schedule.events.push_back(event);
  }
  return out;
}

std::vector<std::vector<uint32_t>> deinterleave_warp(
    std::span<const uint32_t> words, const LockstepSchedule& schedule,
    size_t lanes) {
  std::vector<std::vector<uint32_t>> out(lanes);
  for (const LoadPoint& e : schedule.events) {
    uint64_t pos = e.first;
    for (uint32_t m = e.lane_mask; m != 0; m &= m - 1) {
      const size_t lane = static_cast<size_t>(std::countr_zero(m));
      if (lane >= lanes || pos >= words.size()) {
        throw std::out_of_range("schedule does not match the stream");
      }
      out[lane].push_back(words[pos++]);
    }
  }
  return out;
}

}  // namespace csrdtans
