#include "csrdtans/entropy_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace csrdtans {

SymbolDistribution SymbolDistribution::from_counts(
    std::vector<uint64_t> symbols, std::vector<uint64_t> counts) {
  if (symbols.size() != counts.size()) {
    throw std::invalid_argument("symbol and count lists differ in length");
  }
  SymbolDistribution p;
  std::unordered_set<uint64_t> seen;
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (!seen.insert(symbols[i]).second) {
      throw std::invalid_argument("duplicate symbol " +
                                  std::to_string(symbols[i]));
    }
    if (counts[i] == 0) continue;
    p.symbols.push_back(symbols[i]);
    p.counts.push_back(counts[i]);
  }
  const double total = static_cast<double>(p.total());
  p.probs.reserve(p.counts.size());
  for (uint64_t c : p.counts) p.probs.push_back(static_cast<double>(c) / total);
  return p;
}

SymbolDistribution SymbolDistribution::from_samples(
    std::span<const uint64_t> samples) {
  std::unordered_map<uint64_t, uint64_t> counts;
  for (uint64_t s : samples) ++counts[s];
  std::vector<std::pair<uint64_t, uint64_t>> sorted(counts.begin(),
                                                    counts.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<uint64_t> symbols, freq;
  symbols.reserve(sorted.size());
  freq.reserve(sorted.size());
  for (const auto& [s, c] : sorted) {
    symbols.push_back(s);
    freq.push_back(c);
  }
  return from_counts(std::move(symbols), std::move(freq));
}

uint64_t SymbolDistribution::total() const {
  return std::accumulate(counts.begin(), counts.end(), uint64_t{0});
}

std::vector<uint64_t> QuantizedDistribution::escaped() const {
  std::vector<uint64_t> out;
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (multiplicities[i] == 0) out.push_back(symbols[i]);
  }
  return out;
}

size_t QuantizedDistribution::retained_count() const {
  return static_cast<size_t>(
      std::count_if(multiplicities.begin(), multiplicities.end(),
                    [](uint32_t m) { return m > 0; }));
}

void QuantizedDistribution::validate() const {
  if (symbols.size() != multiplicities.size()) {
    throw std::invalid_argument("multiplicity list length mismatch");
  }
  if (table_size < 1 || max_multiplicity < 1) {
    throw std::invalid_argument("table size and cap must be positive");
  }
  uint64_t used = escape_multiplicity;
  bool any_escaped = false;
  for (uint32_t m : multiplicities) {
    if (m > max_multiplicity) {
      throw std::invalid_argument("multiplicity " + std::to_string(m) +
                                  " exceeds cap " +
                                  std::to_string(max_multiplicity));
    }
    any_escaped |= (m == 0);
    used += m;
  }
  if (any_escaped != (escape_multiplicity > 0)) {
    throw std::invalid_argument(
        "escape multiplicity must be positive exactly when symbols are "
        "escaped");
  }
  if (escape_multiplicity > max_multiplicity) {
    throw std::invalid_argument("escape multiplicity exceeds cap");
  }
  if (used + unused_slots != table_size) {
    throw std::invalid_argument("slot counts sum to " +
                                std::to_string(used + unused_slots) +
                                ", table has " + std::to_string(table_size));
  }
  // Spare slots are only legal when every entry already sits at the cap.
  if (unused_slots > 0) {
    for (uint32_t m : multiplicities) {
      if (m != 0 && m != max_multiplicity) {
        throw std::invalid_argument("unused slots while below the cap");
      }
    }
    if (any_escaped && escape_multiplicity != max_multiplicity) {
      throw std::invalid_argument("unused slots while escape below the cap");
    }
  }
}

double entropy(const SymbolDistribution& p) {
  double h = 0.0;
  for (double pi : p.probs) {
    if (pi > 0.0) h -= pi * std::log2(pi);
  }
  return h;
}

double cross_entropy(const SymbolDistribution& p,
                     const QuantizedDistribution& q) {
  std::unordered_map<uint64_t, uint32_t> mult;
  for (size_t i = 0; i < q.symbols.size(); ++i) {
    mult.emplace(q.symbols[i], q.multiplicities[i]);
  }
  std::unordered_set<uint64_t> in_p(p.symbols.begin(), p.symbols.end());
  for (size_t i = 0; i < q.symbols.size(); ++i) {
    if (q.multiplicities[i] > 0 && !in_p.count(q.symbols[i])) {
      throw std::invalid_argument("symbol " + std::to_string(q.symbols[i]) +
                                  " is retained but absent from P");
    }
  }
  const double k = static_cast<double>(q.table_size);
  double h = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    auto it = mult.find(p.symbols[i]);
    uint32_t m = it == mult.end() ? 0 : it->second;
    if (m > 0) {
      h -= p.probs[i] * std::log2(m / k);
    } else if (q.escape_multiplicity > 0) {
      h += p.probs[i] * (q.raw_width_bits -
                         std::log2(q.escape_multiplicity / k));
    } else {
      throw std::invalid_argument("symbol " + std::to_string(p.symbols[i]) +
                                  " is neither retained nor escapable");
    }
  }
  return h;
}

double expected_size_bits(const SymbolDistribution& p,
                          const QuantizedDistribution& q) {
  return static_cast<double>(p.total()) * cross_entropy(p, q);
}

namespace {

// Optimal slot counts for a fixed set of weighted items, each starting at one
// slot and capped at m. The cost c*log2(K/x) is convex in x, so handing out
// slots one at a time to the largest marginal saving is exact.
double allocate(std::span<const double> weights, uint32_t k, uint32_t m,
                std::vector<uint32_t>& slots) {
  const size_t n = weights.size();
  slots.assign(n, 1);
  uint64_t used = n;
  struct Candidate {
    double gain;
    double weight;
    size_t index;
  };
  auto worse = [](const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    if (a.weight != b.weight) return a.weight < b.weight;
    return a.index > b.index;
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> heap(
      worse);
  auto gain = [&](size_t i) {
    return weights[i] * std::log2(1.0 + 1.0 / slots[i]);
  };
  if (m > 1) {
    for (size_t i = 0; i < n; ++i) heap.push({gain(i), weights[i], i});
  }
  while (used < k && !heap.empty()) {
    Candidate top = heap.top();
    heap.pop();
    ++slots[top.index];
    ++used;
    if (slots[top.index] < m) heap.push({gain(top.index), top.weight, top.index});
  }
  double cost = 0.0;
  const double kd = static_cast<double>(k);
  for (size_t i = 0; i < n; ++i) cost += weights[i] * std::log2(kd / slots[i]);
  return cost;
}

}  // namespace

QuantizedDistribution quantize(const SymbolDistribution& p, uint32_t k,
                               uint32_t m, uint32_t raw_width_bits) {
  if (k < 2) throw std::invalid_argument("table size must be at least 2");
  if (m < 1 || m > k) throw std::invalid_argument("cap must lie in [1, K]");

  QuantizedDistribution q;
  q.table_size = k;
  q.max_multiplicity = m;
  q.raw_width_bits = raw_width_bits;
  q.symbols = p.symbols;
  q.multiplicities.assign(p.size(), 0);
  const size_t n = p.size();
  if (n == 0) {
    q.unused_slots = k;
    return q;
  }

  // Rank by count, most frequent first; ties go to the lower index.
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return p.counts[a] > p.counts[b];
  });
  std::vector<double> suffix(n + 1, 0.0);  // escaped weight beyond a prefix
  for (size_t i = n; i-- > 0;) {
    suffix[i] = suffix[i + 1] + static_cast<double>(p.counts[order[i]]);
  }

  // Retaining the r most frequent symbols is optimal among sets of size r
  // whenever the raw payload costs at least log2 K bits, which holds for the
  // fixed-width domains used here.
  std::map<size_t, double> memo;
  std::vector<double> weights;
  std::vector<uint32_t> slots;
  auto cost_of = [&](size_t r) {
    auto it = memo.find(r);
    if (it != memo.end()) return it->second;
    weights.clear();
    for (size_t i = 0; i < r; ++i) {
      weights.push_back(static_cast<double>(p.counts[order[i]]));
    }
    if (r < n) weights.push_back(suffix[r]);
    double c = allocate(weights, k, m, slots);
    if (r < n) c += suffix[r] * raw_width_bits;
    memo.emplace(r, c);
    return c;
  };

  const size_t r_max = n <= k ? n : k - 1;
  size_t best = r_max;
  if (r_max <= 64) {
    for (size_t r = 0; r <= r_max; ++r) {
      if (cost_of(r) < cost_of(best) ||
          (cost_of(r) == cost_of(best) && r > best)) {
        best = r;
      }
    }
  } else {
    // The cost is close to unimodal in r; narrow down by ternary search and
    // settle the neighbourhood exhaustively.
    size_t lo = 0, hi = r_max;
    while (hi - lo > 32) {
      size_t a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
      if (cost_of(a) <= cost_of(b)) {
        hi = b;
      } else {
        lo = a;
      }
    }
    best = lo;
    size_t from = lo >= 32 ? lo - 32 : 0;
    size_t to = std::min(r_max, hi + 32);
    for (size_t r = from; r <= to; ++r) {
      if (cost_of(r) < cost_of(best) ||
          (cost_of(r) == cost_of(best) && r > best)) {
        best = r;
      }
    }
    for (size_t r : {size_t{0}, r_max}) {
      if (cost_of(r) < cost_of(best)) best = r;
    }
  }

  weights.clear();
  for (size_t i = 0; i < best; ++i) {
    weights.push_back(static_cast<double>(p.counts[order[i]]));
  }
  if (best < n) weights.push_back(suffix[best]);
  allocate(weights, k, m, slots);
  uint64_t used = 0;
  for (size_t i = 0; i < best; ++i) {
    q.multiplicities[order[i]] = slots[i];
    used += slots[i];
  }
  if (best < n) {
    q.escape_multiplicity = slots[best];
    used += slots[best];
  }
  q.unused_slots = static_cast<uint32_t>(k - used);
  return q;
}

}  // namespace csrdtans
