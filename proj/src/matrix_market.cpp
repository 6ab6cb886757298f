#include "csrdtans/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace csrdtans {

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view* line) {
    if (pos_ >= text_.size()) return false;
    size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    *line = text_.substr(pos_, end - pos_);
    if (!line->empty() && line->back() == '\r') line->remove_suffix(1);
    pos_ = end + 1;
    ++number_;
    return true;
  }
  size_t number() const { return number_; }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  size_t number_ = 0;
};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return std::isspace(c);
  });
}

uint64_t parse_index(std::string_view tok, size_t line) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw MatrixMarketError(line, "expected an integer, got '" +
                                      std::string(tok) + "'");
  }
  return v;
}

double parse_value(std::string_view tok, size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec == std::errc::result_out_of_range) {
    // Denormal or overflowing literals: fall back to strtod semantics.
    std::string s(tok);
    return std::strtod(s.c_str(), nullptr);
  }
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw MatrixMarketError(line, "expected a number, got '" +
                                      std::string(tok) + "'");
  }
  return v;
}

}  // namespace

CooMatrix<double> parse_mtx(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(&line)) throw MatrixMarketError(1, "empty input");
  auto banner = split(line);
  if (banner.size() != 5 || lower(banner[0]) != "%%matrixmarket") {
    throw MatrixMarketError(1, "missing %%MatrixMarket banner");
  }
  if (lower(banner[1]) != "matrix") {
    throw MatrixMarketError(1, "only matrix objects are supported");
  }
  const std::string format = lower(banner[2]);
  const std::string field = lower(banner[3]);
  const std::string symmetry = lower(banner[4]);
  if (format == "array") {
    throw MatrixMarketError(1, "array format is not supported");
  }
  if (format != "coordinate") {
    throw MatrixMarketError(1, "unknown format '" + format + "'");
  }
  if (field == "complex") {
    throw MatrixMarketError(1, "complex matrices are not supported");
  }
  if (field != "real" && field != "integer" && field != "pattern") {
    throw MatrixMarketError(1, "unknown field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw MatrixMarketError(1, "unsupported symmetry '" + symmetry + "'");
  }
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";

  // Skip comments to the size line.
  std::vector<std::string_view> tok;
  while (true) {
    if (!reader.next(&line)) {
      throw MatrixMarketError(reader.number(), "missing size line");
    }
    if (blank(line) || line.front() == '%') continue;
    tok = split(line);
    break;
  }
  if (tok.size() != 3) {
    throw MatrixMarketError(reader.number(), "size line needs rows cols nnz");
  }
  const uint64_t rows = parse_index(tok[0], reader.number());
  const uint64_t cols = parse_index(tok[1], reader.number());
  const uint64_t entries = parse_index(tok[2], reader.number());
  if (rows > UINT32_MAX || cols > UINT32_MAX) {
    throw MatrixMarketError(reader.number(), "dimensions exceed 32 bits");
  }
  if (symmetric && rows != cols) {
    throw MatrixMarketError(reader.number(), "symmetric matrix is not square");
  }

  CooMatrix<double> m;
  m.rows = static_cast<uint32_t>(rows);
  m.cols = static_cast<uint32_t>(cols);
  const size_t expect = static_cast<size_t>(
      std::min<uint64_t>(entries, uint64_t{1} << 28) * (symmetric ? 2 : 1));
  m.row.reserve(expect);
  m.col.reserve(expect);
  m.values.reserve(expect);
  uint64_t seen = 0;
  while (reader.next(&line)) {
    if (blank(line) || line.front() == '%') continue;
    const size_t ln = reader.number();
    if (seen == entries) throw MatrixMarketError(ln, "more entries than declared");
    tok = split(line);
    if (tok.size() != (pattern ? 2u : 3u)) {
      throw MatrixMarketError(ln, pattern ? "expected 'row col'"
                                          : "expected 'row col value'");
    }
    const uint64_t i = parse_index(tok[0], ln);
    const uint64_t j = parse_index(tok[1], ln);
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw MatrixMarketError(ln, "index out of range");
    }
    const double v = pattern ? 1.0 : parse_value(tok[2], ln);
    m.row.push_back(static_cast<uint32_t>(i - 1));
    m.col.push_back(static_cast<uint32_t>(j - 1));
    m.values.push_back(v);
    if (symmetric && i != j) {
      m.row.push_back(static_cast<uint32_t>(j - 1));
      m.col.push_back(static_cast<uint32_t>(i - 1));
      m.values.push_back(v);
    }
    ++seen;
  }
  if (seen != entries) {
    throw MatrixMarketError(reader.number(),
                            "declared " + std::to_string(entries) +
                                " entries, found " + std::to_string(seen));
  }
  return m;
}

CooMatrix<double> read_mtx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mtx(buf.str());
}

std::string write_mtx(const CsrMatrix<double>& m) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(m.rows) + " " + std::to_string(m.cols) + " " +
         std::to_string(m.nnz()) + "\n";
  char buf[64];
  for (uint32_t r = 0; r < m.rows; ++r) {
    for (uint64_t i = m.row_start[r]; i < m.row_start[r + 1]; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", m.values[i]);
      out += std::to_string(r + 1) + " " + std::to_string(m.col_idx[i] + 1) +
             " " + buf + "\n";
    }
  }
  return out;
}

}  // namespace csrdtans
