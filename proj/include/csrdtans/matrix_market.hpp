#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "csrdtans/sparse.hpp"

namespace csrdtans {

class MatrixMarketError : public std::runtime_error {
 public:
  MatrixMarketError(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Coordinate-format MatrixMarket with real, integer or pattern fields and
// general or symmetric storage. Symmetric off-diagonal entries are mirrored;
// pattern entries become 1.0.
CooMatrix<double> parse_mtx(std::string_view text);
CooMatrix<double> read_mtx(const std::string& path);

std::string write_mtx(const CsrMatrix<double>& m);

}  // namespace csrdtans
