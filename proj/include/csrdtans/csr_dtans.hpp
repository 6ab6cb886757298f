#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "csrdtans/coding_tables.hpp"
#include "csrdtans/dtans.hpp"
#include "csrdtans/entropy_model.hpp"
#include "csrdtans/lockstep.hpp"
#include "csrdtans/sparse.hpp"

namespace csrdtans {

enum class Precision : uint8_t { kSingle = 4, kDouble = 8 };

inline uint32_t value_width(Precision p) { return static_cast<uint32_t>(p); }

template <class T>
constexpr Precision precision_of() {
  return sizeof(T) == 8 ? Precision::kDouble : Precision::kSingle;
}

inline constexpr uint64_t kDefaultPermutationSeed = 0x9e3779b97f4a7c15ull;

struct EncodeOptions {
  DtansParams params = DtansParams::production();
  bool permute_slots = true;
  uint64_t permutation_seed = kDefaultPermutationSeed;
  unsigned threads = 1;  // 0 picks the hardware concurrency
};

// Compressed matrix. Rows are grouped into slices of 32 that share one
// interleaved word stream segment; symbol k of a row is a delta when k is
// even and a value bit pattern when k is odd.
struct CsrDtansContainer {
  uint32_t rows = 0;
  uint32_t cols = 0;
  uint64_t nnz = 0;
  Precision precision = Precision::kDouble;
  DtansParams params;
  bool permuted = false;
  uint64_t permutation_seed = 0;
  CodingTables delta_tables;
  CodingTables value_tables;
  std::vector<uint32_t> row_symbols;    // 2 * nnz of each row
  std::vector<uint64_t> slice_offsets;  // ceil(rows/32) + 1 word offsets
  std::vector<uint32_t> stream;

  uint64_t slices() const { return slice_offsets.size() - 1; }
  bool operator==(const CsrDtansContainer&) const = default;
};

// Distributions and slot assignments chosen while encoding, for reporting.
struct EncodeDiagnostics {
  SymbolDistribution delta_distribution;
  SymbolDistribution value_distribution;
  QuantizedDistribution delta_quantized;
  QuantizedDistribution value_quantized;
  uint64_t escaped_deltas = 0;  // occurrences
  uint64_t escaped_values = 0;
};

template <class T>
CsrDtansContainer encode_matrix(const CsrMatrix<T>& m,
                                const EncodeOptions& options = {},
                                EncodeDiagnostics* diagnostics = nullptr);

template <class T>
CsrMatrix<T> decode_matrix(const CsrDtansContainer& c, unsigned threads = 1);

// y <- A x + y with the lockstep decoder feeding the products on the fly.
template <class T>
void spmv(const CsrDtansContainer& c, std::span<const T> x, std::span<T> y,
          unsigned threads = 1);

// Interleaved stream and schedule of one slice, rebuilt by replaying the
// lockstep decoder.
LockstepSchedule slice_schedule(const CsrDtansContainer& c, uint64_t slice);

// Tables, row counts, slice directory and stream words. Header, parameter
// block, the stream length field and the checksum are framing and are not
// counted.
uint64_t size_bytes(const CsrDtansContainer& c);
uint64_t tables_bytes(Precision precision, uint32_t slot_count);

class ContainerError : public std::runtime_error {
 public:
  enum class Kind { kBadMagic, kVersion, kTruncated, kChecksum, kInvalid };
  ContainerError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SerializedLayout {
  uint64_t header = 0;
  uint64_t params = 0;
  uint64_t tables = 0;
  uint64_t row_counts = 0;
  uint64_t directory = 0;
  uint64_t stream = 0;
  uint64_t trailer = 0;
};

inline constexpr uint16_t kContainerVersion = 1;

std::vector<uint8_t> serialize(const CsrDtansContainer& c,
                               SerializedLayout* layout = nullptr);
CsrDtansContainer deserialize(std::span<const uint8_t> bytes);

void write_container(const std::string& path, const CsrDtansContainer& c);
CsrDtansContainer read_container(const std::string& path);

// Worker count from an explicit request, else CSRDTANS_THREADS, else the
// hardware concurrency.
unsigned resolve_threads(unsigned requested);

}  // namespace csrdtans
