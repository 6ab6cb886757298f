#pragma once

#include <cstdint>
#include <string>

#include "csrdtans/sparse.hpp"

namespace csrdtans {

enum class GraphModel { kErdosRenyi, kWattsStrogatz, kBarabasiAlbert };

GraphModel parse_graph_model(const std::string& name);
std::string graph_model_name(GraphModel model);

struct GraphOptions {
  GraphModel model = GraphModel::kErdosRenyi;
  uint32_t nodes = 0;
  double avg_degree = 10;
  uint64_t seed = 0;
  double rewire = 0.1;  // Watts-Strogatz only
};

// Undirected graph as a symmetric pattern matrix (all values 1.0).
CsrMatrix<double> gen_graph(const GraphOptions& options);

struct IndexEntropy {
  double raw_bits = 0;    // entropy of the column indices
  double delta_bits = 0;  // entropy of the delta-encoded indices
  double ratio = 1;       // delta / raw, with 0/0 taken as 1
};

template <class T>
IndexEntropy index_entropy(const CsrMatrix<T>& m);

template <class T>
double index_entropy_ratio(const CsrMatrix<T>& m) {
  return index_entropy(m).ratio;
}

}  // namespace csrdtans
