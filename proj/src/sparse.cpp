#include "csrdtans/sparse.hpp"

#include <algorithm>
#include <numeric>

namespace csrdtans {

template <class T>
void CsrMatrix<T>::validate() const {
  if (row_start.size() != static_cast<size_t>(rows) + 1) {
    throw std::invalid_argument("row_start must have rows + 1 entries");
  }
  if (row_start.front() != 0 || row_start.back() != values.size() ||
      col_idx.size() != values.size()) {
    throw std::invalid_argument("row_start does not frame the nonzeros");
  }
  for (uint32_t r = 0; r < rows; ++r) {
    if (row_start[r] > row_start[r + 1]) {
      throw std::invalid_argument("row_start decreases at row " +
                                  std::to_string(r));
    }
    for (uint64_t i = row_start[r]; i < row_start[r + 1]; ++i) {
      if (col_idx[i] >= cols) {
        throw std::invalid_argument("column index out of range in row " +
                                    std::to_string(r));
      }
      if (i > row_start[r] && col_idx[i] <= col_idx[i - 1]) {
        throw std::invalid_argument("columns not strictly ascending in row " +
                                    std::to_string(r));
      }
    }
  }
}

template <class T>
bool bitwise_equal(const CsrMatrix<T>& a, const CsrMatrix<T>& b) {
  if (a.rows != b.rows || a.cols != b.cols || a.row_start != b.row_start ||
      a.col_idx != b.col_idx || a.values.size() != b.values.size()) {
    return false;
  }
  for (size_t i = 0; i < a.values.size(); ++i) {
    if (value_symbol(a.values[i]) != value_symbol(b.values[i])) return false;
  }
  return true;
}

template <class T>
uint64_t SellMatrix<T>::padding_count() const {
  return static_cast<uint64_t>(
      std::count(padding.begin(), padding.end(), uint8_t{1}));
}

template <class T>
CsrMatrix<T> coo_to_csr(const CooMatrix<T>& m) {
  const size_t nnz = m.values.size();
  if (m.row.size() != nnz || m.col.size() != nnz) {
    throw std::invalid_argument("COO arrays differ in length");
  }
  std::vector<size_t> order(nnz);
  std::iota(order.begin(), order.end(), size_t{0});
  for (size_t i = 0; i < nnz; ++i) {
    if (m.row[i] >= m.rows || m.col[i] >= m.cols) {
      throw std::invalid_argument("COO entry out of range");
    }
  }
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (m.row[a] != m.row[b]) return m.row[a] < m.row[b];
    return m.col[a] < m.col[b];
  });
  CsrMatrix<T> out;
  out.rows = m.rows;
  out.cols = m.cols;
  out.row_start.assign(static_cast<size_t>(m.rows) + 1, 0);
  out.col_idx.reserve(nnz);
  out.values.reserve(nnz);
  for (size_t k = 0; k < nnz; ++k) {
    const size_t i = order[k];
    if (k > 0) {
      const size_t p = order[k - 1];
      if (m.row[p] == m.row[i] && m.col[p] == m.col[i]) {
        throw std::invalid_argument("duplicate entry (" +
                                    std::to_string(m.row[i] + 1) + ", " +
                                    std::to_string(m.col[i] + 1) + ")");
      }
    }
    ++out.row_start[m.row[i] + 1];
    out.col_idx.push_back(m.col[i]);
    out.values.push_back(m.values[i]);
  }
  for (uint32_t r = 0; r < m.rows; ++r) out.row_start[r + 1] += out.row_start[r];
  return out;
}

template <class T>
CooMatrix<T> csr_to_coo(const CsrMatrix<T>& m) {
  CooMatrix<T> out;
  out.rows = m.rows;
  out.cols = m.cols;
  out.col = m.col_idx;
  out.values = m.values;
  out.row.reserve(m.nnz());
  for (uint32_t r = 0; r < m.rows; ++r) {
    out.row.insert(out.row.end(), m.row_length(r), r);
  }
  return out;
}

template <class T>
SellMatrix<T> csr_to_sell(const CsrMatrix<T>& m, uint32_t slice_height) {
  if (slice_height == 0) throw std::invalid_argument("slice height must be >= 1");
  SellMatrix<T> out;
  out.rows = m.rows;
  out.cols = m.cols;
  out.slice_height = slice_height;
  const uint64_t slices = (uint64_t{m.rows} + slice_height - 1) / slice_height;
  out.slice_offset.push_back(0);
  for (uint64_t s = 0; s < slices; ++s) {
    uint64_t width = 0;
    const uint32_t r0 = static_cast<uint32_t>(s * slice_height);
    const uint32_t r1 = static_cast<uint32_t>(
        std::min<uint64_t>(m.rows, uint64_t{r0} + slice_height));
    for (uint32_t r = r0; r < r1; ++r) width = std::max(width, m.row_length(r));
    out.slice_width.push_back(static_cast<uint32_t>(width));
    out.slice_offset.push_back(out.slice_offset.back() + width * slice_height);
  }
  const uint64_t cells = out.slice_offset.back();
  out.col_idx.assign(cells, 0);
  out.values.assign(cells, T{0});
  out.padding.assign(cells, 1);
  for (uint32_t r = 0; r < m.rows; ++r) {
    const uint64_t s = r / slice_height;
    const uint64_t local = r % slice_height;
    for (uint64_t k = 0; k < m.row_length(r); ++k) {
      const uint64_t cell = out.slice_offset[s] + k * slice_height + local;
      out.col_idx[cell] = m.col_idx[m.row_start[r] + k];
      out.values[cell] = m.values[m.row_start[r] + k];
      out.padding[cell] = 0;
    }
  }
  return out;
}

uint64_t coo_size_bytes(uint64_t nnz, uint32_t value_width) {
  return nnz * (4 + 4 + value_width);
}

uint64_t csr_size_bytes(uint64_t rows, uint64_t nnz, uint32_t value_width) {
  return nnz * (4 + value_width) + 4 * (rows + 1);
}

uint64_t sell_size_bytes(uint64_t cells, uint64_t slices,
                         uint32_t value_width) {
  return cells * (4 + value_width) + 4 * (slices + 1);
}

template <class T>
uint64_t format_size_bytes(const CsrMatrix<T>& m, SparseFormat format,
                           uint32_t value_width, uint32_t slice_height) {
  switch (format) {
    case SparseFormat::kCoo:
      return coo_size_bytes(m.nnz(), value_width);
    case SparseFormat::kCsr:
      return csr_size_bytes(m.rows, m.nnz(), value_width);
    case SparseFormat::kSell: {
      // Same accounting as csr_to_sell without materializing the cells.
      uint64_t cells = 0, slices = 0;
      for (uint64_t r0 = 0; r0 < m.rows; r0 += slice_height, ++slices) {
        uint64_t width = 0;
        const uint64_t r1 = std::min<uint64_t>(m.rows, r0 + slice_height);
        for (uint64_t r = r0; r < r1; ++r) {
          width = std::max(width, m.row_length(static_cast<uint32_t>(r)));
        }
        cells += width * slice_height;
      }
      return sell_size_bytes(cells, slices, value_width);
    }
  }
  throw std::invalid_argument("unknown sparse format");
}

std::vector<uint32_t> delta_encode_row(std::span<const uint32_t> cols) {
  std::vector<uint32_t> out(cols.size());
  for (size_t j = 0; j < cols.size(); ++j) {
    if (j > 0 && cols[j] <= cols[j - 1]) {
      throw std::invalid_argument("row columns are not strictly ascending");
    }
    out[j] = j == 0 ? cols[0] : cols[j] - cols[j - 1];
  }
  return out;
}

std::vector<uint32_t> delta_decode_row(std::span<const uint32_t> deltas) {
  std::vector<uint32_t> out(deltas.size());
  uint64_t col = 0;
  for (size_t j = 0; j < deltas.size(); ++j) {
    if (j > 0 && deltas[j] == 0) {
      throw std::invalid_argument("zero delta after the first column");
    }
    col += deltas[j];
    if (col > UINT32_MAX) throw std::invalid_argument("column overflow");
    out[j] = static_cast<uint32_t>(col);
  }
  return out;
}

template <class T>
std::vector<uint64_t> row_symbols(const CsrMatrix<T>& m, uint32_t row) {
  std::vector<uint64_t> out;
  const uint64_t begin = m.row_start[row], end = m.row_start[row + 1];
  out.reserve(2 * (end - begin));
  uint32_t prev = 0;
  for (uint64_t i = begin; i < end; ++i) {
    out.push_back(m.col_idx[i] - prev);
    out.push_back(value_symbol(m.values[i]));
    prev = m.col_idx[i];
  }
  return out;
}

template <class T>
std::vector<std::vector<uint64_t>> build_symbol_streams(const CsrMatrix<T>& m) {
  std::vector<std::vector<uint64_t>> out(m.rows);
  for (uint32_t r = 0; r < m.rows; ++r) out[r] = row_symbols(m, r);
  return out;
}

template <class T>
void reference_spmv(const CsrMatrix<T>& m, std::span<const T> x,
                    std::span<T> y) {
  if (x.size() != m.cols || y.size() != m.rows) {
    throw std::invalid_argument("spmv dimension mismatch");
  }
  for (uint32_t r = 0; r < m.rows; ++r) {
    T sum = 0;
    for (uint64_t i = m.row_start[r]; i < m.row_start[r + 1]; ++i) {
      sum += m.values[i] * x[m.col_idx[i]];
    }
    y[r] = sum + y[r];
  }
}

#define CSRDTANS_INSTANTIATE(T)                                              \
  template struct CsrMatrix<T>;                                              \
  template struct SellMatrix<T>;                                             \
  template bool bitwise_equal(const CsrMatrix<T>&, const CsrMatrix<T>&);     \
  template CsrMatrix<T> coo_to_csr(const CooMatrix<T>&);                     \
  template CooMatrix<T> csr_to_coo(const CsrMatrix<T>&);                     \
  template SellMatrix<T> csr_to_sell(const CsrMatrix<T>&, uint32_t);         \
  template uint64_t format_size_bytes(const CsrMatrix<T>&, SparseFormat,     \
                                      uint32_t, uint32_t);                   \
  template std::vector<uint64_t> row_symbols(const CsrMatrix<T>&, uint32_t); \
  template std::vector<std::vector<uint64_t>> build_symbol_streams(          \
      const CsrMatrix<T>&);                                                  \
  template void reference_spmv(const CsrMatrix<T>&, std::span<const T>,      \
                               std::span<T>);

CSRDTANS_INSTANTIATE(float)
CSRDTANS_INSTANTIATE(double)

#undef CSRDTANS_INSTANTIATE

}  // namespace csrdtans
