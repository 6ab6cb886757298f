#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "csrdtans/csr_dtans.hpp"
#include "csrdtans/entropy_model.hpp"
#include "csrdtans/graph_gen.hpp"
#include "csrdtans/matrix_market.hpp"

namespace py = pybind11;
using namespace csrdtans;

namespace {

template <class T>
using Array = py::array_t<T, py::array::c_style | py::array::forcecast>;

template <class T>
CsrMatrix<T> csr_from_arrays(uint32_t rows, uint32_t cols, const Array<int64_t>& indptr,
                             const Array<int64_t>& indices, const Array<T>& data) {
  if (indptr.ndim() != 1 || indices.ndim() != 1 || data.ndim() != 1) {
    throw std::invalid_argument("indptr, indices and data must be one-dimensional");
  }
  if (static_cast<uint64_t>(indptr.size()) != uint64_t{rows} + 1) {
    throw std::invalid_argument("indptr must have rows + 1 entries");
  }
  if (indices.size() != data.size()) {
    throw std::invalid_argument("indices and data differ in length");
  }
  CsrMatrix<T> m;
  m.rows = rows;
  m.cols = cols;
  m.row_start.assign(indptr.data(), indptr.data() + indptr.size());
  m.col_idx.resize(indices.size());
  for (py::ssize_t i = 0; i < indices.size(); ++i) {
    const int64_t c = indices.data()[i];
    if (c < 0 || c >= cols) throw std::invalid_argument("column index out of range");
    m.col_idx[i] = static_cast<uint32_t>(c);
  }
  m.values.assign(data.data(), data.data() + data.size());
  m.validate();
  return m;
}

template <class T>
py::tuple csr_to_arrays(const CsrMatrix<T>& m) {
  Array<int64_t> indptr(m.row_start.size());
  Array<int32_t> indices(m.col_idx.size());
  Array<T> data(m.values.size());
  std::copy(m.row_start.begin(), m.row_start.end(), indptr.mutable_data());
  std::copy(m.col_idx.begin(), m.col_idx.end(), indices.mutable_data());
  std::copy(m.values.begin(), m.values.end(), data.mutable_data());
  return py::make_tuple(indptr, indices, data);
}

EncodeOptions make_options(uint32_t slot_bits, uint32_t multiplicity_bits, bool permute,
                           uint64_t seed, unsigned threads) {
  EncodeOptions o;
  o.params.slot_bits = slot_bits;
  o.params.multiplicity_bits = multiplicity_bits;
  o.permute_slots = permute;
  o.permutation_seed = seed;
  o.threads = threads;
  return o;
}

template <class T>
Array<T> run_spmv(const CsrDtansContainer& c, const Array<T>& x, py::object y_in,
                  unsigned threads) {
  if (x.ndim() != 1 || static_cast<uint64_t>(x.size()) != c.cols) {
    throw std::invalid_argument("x must have cols entries");
  }
  Array<T> y(c.rows);
  if (y_in.is_none()) {
    std::fill(y.mutable_data(), y.mutable_data() + c.rows, T{0});
  } else {
    auto given = y_in.cast<Array<T>>();
    if (given.ndim() != 1 || static_cast<uint64_t>(given.size()) != c.rows) {
      throw std::invalid_argument("y must have rows entries");
    }
    std::copy(given.data(), given.data() + c.rows, y.mutable_data());
  }
  std::span<const T> xs(x.data(), x.size());
  std::span<T> ys(y.mutable_data(), c.rows);
  {
    py::gil_scoped_release release;
    spmv<T>(c, xs, ys, threads);
  }
  return y;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CSR matrices compressed with a segment-parallel tANS coder";

  py::register_exception<ContainerError>(m, "ContainerError", PyExc_ValueError);
  py::register_exception<MatrixMarketError>(m, "MatrixMarketError", PyExc_ValueError);

  py::class_<CsrDtansContainer>(m, "Container")
      .def_readonly("rows", &CsrDtansContainer::rows)
      .def_readonly("cols", &CsrDtansContainer::cols)
      .def_readonly("nnz", &CsrDtansContainer::nnz)
      .def_property_readonly("precision",
                             [](const CsrDtansContainer& c) { return 8 * value_width(c.precision); })
      .def_property_readonly("size_bytes", [](const CsrDtansContainer& c) { return size_bytes(c); })
      .def_property_readonly("stream_words",
                             [](const CsrDtansContainer& c) { return c.stream.size(); })
      .def("to_bytes",
           [](const CsrDtansContainer& c) {
             auto b = serialize(c);
             return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
           })
      .def_static("from_bytes",
                  [](const py::bytes& data) {
                    std::string_view s = data;
                    std::vector<uint8_t> b(s.begin(), s.end());
                    return deserialize(b);
                  })
      .def("save", [](const CsrDtansContainer& c, const std::string& path) {
        write_container(path, c);
      })
      .def_static("load", &read_container)
      .def(
          "decode",
          [](const CsrDtansContainer& c, unsigned threads) {
            if (c.precision == Precision::kDouble) return csr_to_arrays(decode_matrix<double>(c, threads));
            return csr_to_arrays(decode_matrix<float>(c, threads));
          },
          py::arg("threads") = 1,
          "Returns (indptr, indices, data) of the stored matrix.")
      .def(
          "spmv",
          [](const CsrDtansContainer& c, py::array x, py::object y, unsigned threads) -> py::array {
            if (c.precision == Precision::kDouble) {
              return run_spmv<double>(c, x.cast<Array<double>>(), y, threads);
            }
            return run_spmv<float>(c, x.cast<Array<float>>(), y, threads);
          },
          py::arg("x"), py::arg("y") = py::none(), py::arg("threads") = 1,
          "Returns A x + y (y defaults to zeros).")
      .def("__eq__", [](const CsrDtansContainer& a, const CsrDtansContainer& b) { return a == b; });

  m.def(
      "encode_csr",
      [](uint32_t rows, uint32_t cols, const Array<int64_t>& indptr,
         const Array<int64_t>& indices, py::array data, int precision, uint32_t slot_bits,
         uint32_t multiplicity_bits, bool permute, uint64_t seed, unsigned threads) {
        const auto opts = make_options(slot_bits, multiplicity_bits, permute, seed, threads);
        if (precision == 64) {
          auto csr = csr_from_arrays<double>(rows, cols, indptr, indices, data.cast<Array<double>>());
          py::gil_scoped_release release;
          return encode_matrix(csr, opts);
        }
        if (precision == 32) {
          auto csr = csr_from_arrays<float>(rows, cols, indptr, indices, data.cast<Array<float>>());
          py::gil_scoped_release release;
          return encode_matrix(csr, opts);
        }
        throw std::invalid_argument("precision must be 32 or 64");
      },
      py::arg("rows"), py::arg("cols"), py::arg("indptr"), py::arg("indices"), py::arg("data"),
      py::arg("precision") = 64, py::arg("slot_bits") = 12, py::arg("multiplicity_bits") = 8,
      py::arg("permute") = true, py::arg("seed") = kDefaultPermutationSeed,
      py::arg("threads") = 1);

  m.def(
      "read_mtx",
      [](const std::string& path) {
        auto csr = coo_to_csr(read_mtx(path));
        return py::make_tuple(csr.rows, csr.cols, csr_to_arrays(csr));
      },
      "Returns (rows, cols, (indptr, indices, data)).");

  m.def(
      "entropy",
      [](const std::vector<uint64_t>& counts) {
        std::vector<uint64_t> symbols(counts.size());
        for (size_t i = 0; i < symbols.size(); ++i) symbols[i] = i;
        return entropy(SymbolDistribution::from_counts(symbols, counts));
      },
      "Entropy in bits of a count vector.");

  m.def(
      "index_entropy_ratio",
      [](uint32_t rows, uint32_t cols, const Array<int64_t>& indptr,
         const Array<int64_t>& indices) {
        Array<double> ones(indices.size());
        std::fill(ones.mutable_data(), ones.mutable_data() + indices.size(), 1.0);
        return index_entropy_ratio(csr_from_arrays<double>(rows, cols, indptr, indices, ones));
      });

  m.def(
      "gen_graph",
      [](const std::string& model, uint32_t nodes, double degree, uint64_t seed, double rewire) {
        auto g = gen_graph({parse_graph_model(model), nodes, degree, seed, rewire});
        return py::make_tuple(g.rows, g.cols, csr_to_arrays(g));
      },
      py::arg("model"), py::arg("nodes"), py::arg("degree"), py::arg("seed") = 0,
      py::arg("rewire") = 0.1);
}
