#include "csrdtans/graph_gen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "csrdtans/entropy_model.hpp"

namespace csrdtans {

namespace {

// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

uint64_t uniform_below(std::mt19937_64& rng, uint64_t bound) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

uint64_t edge_key(uint32_t a, uint32_t b) {
  if (a > b) std::swap(a, b);
  return (uint64_t{a} << 32) | b;
}

CsrMatrix<double> symmetric_pattern(uint32_t n,
                                    const std::vector<std::pair<uint32_t, uint32_t>>& edges) {
  CooMatrix<double> coo;
  coo.rows = coo.cols = n;
  coo.row.reserve(2 * edges.size());
  coo.col.reserve(2 * edges.size());
  for (auto [a, b] : edges) {
    coo.row.push_back(a);
    coo.col.push_back(b);
    coo.row.push_back(b);
    coo.col.push_back(a);
  }
  coo.values.assign(coo.row.size(), 1.0);
  return coo_to_csr(coo);
}

std::vector<std::pair<uint32_t, uint32_t>> erdos_renyi(uint32_t n, double deg,
                                                      std::mt19937_64& rng) {
  if (n < 2) throw std::invalid_argument("Erdos-Renyi needs at least 2 nodes");
  const double p = deg / (n - 1);
  if (p < 0 || p > 1) {
    throw std::invalid_argument("average degree must lie in [0, n-1]");
  }
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  if (p == 0) return edges;
  if (p == 1) {
    for (uint32_t v = 1; v < n; ++v) {
      for (uint32_t w = 0; w < v; ++w) edges.emplace_back(v, w);
    }
    return edges;
  }
  // Walk the pairs (v, w), w < v, jumping over geometric gaps of non-edges.
  const double log_q = std::log1p(-p);
  int64_t v = 1, w = -1;
  while (v < n) {
    const double r = uniform01(rng);
    w += 1 + static_cast<int64_t>(std::floor(std::log1p(-r) / log_q));
    while (w >= v && v < n) {
      w -= v;
      ++v;
    }
    if (v < n) edges.emplace_back(static_cast<uint32_t>(v), static_cast<uint32_t>(w));
  }
  return edges;
}

std::vector<std::pair<uint32_t, uint32_t>> watts_strogatz(uint32_t n, double deg,
                                                         double beta,
                                                         std::mt19937_64& rng) {
  if (deg < 1 || deg != std::floor(deg)) {
    throw std::invalid_argument("Watts-Strogatz needs an integral degree >= 1");
  }
  const uint32_t k = static_cast<uint32_t>(deg);
  if (n <= k + 1) throw std::invalid_argument("Watts-Strogatz needs n > degree + 1");
  const uint32_t half = k / 2;
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  std::unordered_set<uint64_t> present;
  auto add = [&](uint32_t a, uint32_t b) {
    if (a != b && present.insert(edge_key(a, b)).second) edges.emplace_back(a, b);
  };
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = 1; j <= half; ++j) add(i, (i + j) % n);
  }
  // An odd degree gets one extra, longer link on every second node.
  if (k % 2 == 1) {
    for (uint32_t i = 0; i < n; i += 2) add(i, (i + half + 1) % n);
  }
  if (beta > 0) {
    for (auto& e : edges) {
      if (uniform01(rng) >= beta) continue;
      const uint32_t a = e.first;
      uint32_t t = 0;
      bool found = false;
      for (int attempt = 0; attempt < 64 && !found; ++attempt) {
        t = static_cast<uint32_t>(uniform_below(rng, n));
        found = t != a && !present.count(edge_key(a, t));
      }
      if (!found) continue;
      present.erase(edge_key(e.first, e.second));
      present.insert(edge_key(a, t));
      e.second = t;
    }
  }
  return edges;
}

std::vector<std::pair<uint32_t, uint32_t>> barabasi_albert(uint32_t n, double deg,
                                                          std::mt19937_64& rng) {
  if (deg <= 0) throw std::invalid_argument("Barabasi-Albert needs degree > 0");
  const double m = deg / 2;
  const uint32_t seed_nodes = static_cast<uint32_t>(std::ceil(m)) + 1;
  if (n <= seed_nodes) {
    throw std::invalid_argument("Barabasi-Albert needs more than " +
                                std::to_string(seed_nodes) + " nodes");
  }
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  std::vector<uint32_t> ends;  // every edge endpoint, for degree-biased draws
  for (uint32_t v = 1; v < seed_nodes; ++v) {
    for (uint32_t w = 0; w < v; ++w) {
      edges.emplace_back(v, w);
      ends.push_back(v);
      ends.push_back(w);
    }
  }
  std::vector<uint32_t> targets;
  for (uint32_t v = seed_nodes; v < n; ++v) {
    // Fractional m alternates between floor and ceil so the mean is exact.
    const uint64_t step = v - seed_nodes;
    const uint32_t count = static_cast<uint32_t>(std::floor((step + 1) * m) -
                                                 std::floor(step * m));
    targets.clear();
    while (targets.size() < count) {
      const uint32_t t = ends[uniform_below(rng, ends.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
        targets.push_back(t);
      }
    }
    for (uint32_t t : targets) {
      edges.emplace_back(v, t);
      ends.push_back(v);
      ends.push_back(t);
    }
  }
  return edges;
}

}  // namespace

GraphModel parse_graph_model(const std::string& name) {
  if (name == "er" || name == "erdos_renyi") return GraphModel::kErdosRenyi;
  if (name == "ws" || name == "watts_strogatz") return GraphModel::kWattsStrogatz;
  if (name == "ba" || name == "barabasi_albert") return GraphModel::kBarabasiAlbert;
  throw std::invalid_argument("unknown graph model '" + name + "'");
}

std::string graph_model_name(GraphModel model) {
  switch (model) {
    case GraphModel::kErdosRenyi:
      return "er";
    case GraphModel::kWattsStrogatz:
      return "ws";
    case GraphModel::kBarabasiAlbert:
      return "ba";
  }
  return "?";
}

CsrMatrix<double> gen_graph(const GraphOptions& options) {
  std::mt19937_64 rng(options.seed);
  const uint32_t n = options.nodes;
  switch (options.model) {
    case GraphModel::kErdosRenyi:
      return symmetric_pattern(n, erdos_renyi(n, options.avg_degree, rng));
    case GraphModel::kWattsStrogatz:
      return symmetric_pattern(
          n, watts_strogatz(n, options.avg_degree, options.rewire, rng));
    case GraphModel::kBarabasiAlbert:
      return symmetric_pattern(n, barabasi_albert(n, options.avg_degree, rng));
  }
  throw std::invalid_argument("unknown graph model");
}

template <class T>
IndexEntropy index_entropy(const CsrMatrix<T>& m) {
  std::vector<uint64_t> cols(m.col_idx.begin(), m.col_idx.end());
  std::vector<uint64_t> deltas;
  deltas.reserve(m.nnz());
  for (uint32_t r = 0; r < m.rows; ++r) {
    uint32_t prev = 0;
    for (uint64_t i = m.row_start[r]; i < m.row_start[r + 1]; ++i) {
      deltas.push_back(m.col_idx[i] - prev);
      prev = m.col_idx[i];
    }
  }
  IndexEntropy out;
  out.raw_bits = entropy(SymbolDistribution::from_samples(cols));
  out.delta_bits = entropy(SymbolDistribution::from_samples(deltas));
  if (out.raw_bits > 0) {
    out.ratio = out.delta_bits / out.raw_bits;
  } else {
    out.ratio = out.delta_bits > 0 ? INFINITY : 1.0;
  }
  return out;
}

template IndexEntropy index_entropy(const CsrMatrix<float>&);
template IndexEntropy index_entropy(const CsrMatrix<double>&);

}  // namespace csrdtans
