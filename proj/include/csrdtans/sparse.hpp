#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace csrdtans {

template <class T>
struct CooMatrix {
  uint32_t rows = 0;
  uint32_t cols = 0;
  std::vector<uint32_t> row;
  std::vector<uint32_t> col;
  std::vector<T> values;

  uint64_t nnz() const { return values.size(); }
};

template <class T>
struct CsrMatrix {
  uint32_t rows = 0;
  uint32_t cols = 0;
  std::vector<uint64_t> row_start{0};
  std::vector<uint32_t> col_idx;
  std::vector<T> values;

  uint64_t nnz() const { return values.size(); }
  uint64_t row_length(uint32_t r) const {
    return row_start[r + 1] - row_start[r];
  }
  // Throws std::invalid_argument when the CSR invariants do not hold.
  void validate() const;
};

// Compares structure and value bit patterns, so -0.0 and NaN payloads count.
template <class T>
bool bitwise_equal(const CsrMatrix<T>& a, const CsrMatrix<T>& b);

template <class T>
struct SellMatrix {
  uint32_t rows = 0;
  uint32_t cols = 0;
  uint32_t slice_height = 32;
  std::vector<uint32_t> slice_width;
  std::vector<uint64_t> slice_offset;  // first cell of each slice, plus end
  // Column-major within a slice: cell (r, k) of slice s lives at
  // slice_offset[s] + k * slice_height + r.
  std::vector<uint32_t> col_idx;
  std::vector<T> values;
  std::vector<uint8_t> padding;  // 1 for padded cells

  uint64_t slices() const { return slice_width.size(); }
  uint64_t cells() const { return values.size(); }
  uint64_t padding_count() const;
};

template <class T>
CsrMatrix<T> coo_to_csr(const CooMatrix<T>& m);

template <class T>
CooMatrix<T> csr_to_coo(const CsrMatrix<T>& m);

// Padded positions carry column 0 and value 0. The trailing slice is padded
// to the full height, as sliced ELLPACK stores whole slices.
template <class T>
SellMatrix<T> csr_to_sell(const CsrMatrix<T>& m, uint32_t slice_height = 32);

template <class Dst, class Src>
CsrMatrix<Dst> convert_values(const CsrMatrix<Src>& m) {
  CsrMatrix<Dst> out;
  out.rows = m.rows;
  out.cols = m.cols;
  out.row_start = m.row_start;
  out.col_idx = m.col_idx;
  out.values.assign(m.values.begin(), m.values.end());
  return out;
}

enum class SparseFormat { kCoo, kCsr, kSell };

uint64_t coo_size_bytes(uint64_t nnz, uint32_t value_width);
uint64_t csr_size_bytes(uint64_t rows, uint64_t nnz, uint32_t value_width);
uint64_t sell_size_bytes(uint64_t cells, uint64_t slices, uint32_t value_width);

template <class T>
uint64_t format_size_bytes(const CsrMatrix<T>& m, SparseFormat format,
                           uint32_t value_width, uint32_t slice_height = 32);

// delta_0 = col_0, delta_j = col_j - col_{j-1}.
std::vector<uint32_t> delta_encode_row(std::span<const uint32_t> cols);
std::vector<uint32_t> delta_decode_row(std::span<const uint32_t> deltas);

// Fixed-width symbol of a value: its raw bit pattern.
template <class T>
uint64_t value_symbol(T v) {
  if constexpr (sizeof(T) == 8) {
    return std::bit_cast<uint64_t>(v);
  } else {
    return std::bit_cast<uint32_t>(v);
  }
}

template <class T>
T symbol_value(uint64_t s) {
  if constexpr (sizeof(T) == 8) {
    return std::bit_cast<T>(s);
  } else {
    return std::bit_cast<T>(static_cast<uint32_t>(s));
  }
}

// Interleaved (delta_0, value_0, delta_1, value_1, ...) for one row.
template <class T>
std::vector<uint64_t> row_symbols(const CsrMatrix<T>& m, uint32_t row);

template <class T>
std::vector<std::vector<uint64_t>> build_symbol_streams(const CsrMatrix<T>& m);

// y <- A x + y, each row summed strictly left to right before being added
// to y.
template <class T>
void reference_spmv(const CsrMatrix<T>& m, std::span<const T> x,
                    std::span<T> y);

}  // namespace csrdtans
