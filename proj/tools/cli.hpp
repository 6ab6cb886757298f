#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "csrdtans/csr_dtans.hpp"
#include "json.hpp"

namespace csrdtans::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,     // unreadable or malformed input, bad usage
  kEncodeError = 2,    // encoding, writing or computation failed
  kMismatch = 3,       // verification found a difference
};

struct StatsReport {
  std::string matrix;
  uint32_t rows = 0;
  uint32_t cols = 0;
  uint64_t nnz = 0;
  double annzpr = 0;
  uint32_t precision_bits = 64;
  uint64_t coo_bytes = 0;
  uint64_t csr_bytes = 0;
  uint64_t sell_bytes = 0;
  uint64_t dtans_bytes = 0;
  uint64_t best_baseline_bytes = 0;
  double ratio = 0;  // dtans_bytes / best_baseline_bytes
  double delta_entropy = 0;
  double delta_cross_entropy = 0;
  double value_entropy = 0;
  double value_cross_entropy = 0;
  uint64_t delta_symbols = 0;  // distinct
  uint64_t value_symbols = 0;
  uint64_t escaped_deltas = 0;  // occurrences
  uint64_t escaped_values = 0;
};

// Encodes in memory and fills every report field.
StatsReport compute_stats(const std::string& id, const CsrMatrix<double>& m,
                          Precision precision, const EncodeOptions& options);

std::string stats_csv_header();
std::string stats_csv_row(const StatsReport& r);
nlohmann::json stats_json(const StatsReport& r);

// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace csrdtans::cli
