#include "csrdtans/csr_dtans.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "csrdtans/errors.hpp"

namespace csrdtans {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CSRDTANS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace {

// Runs fn(begin, end) over contiguous chunks of [0, count). Each index is
// handled by exactly one worker, so outputs indexed by it need no locking.
template <class Fn>
void parallel_for(uint64_t count, unsigned threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count <= 1) {
    fn(uint64_t{0}, count);
    return;
  }
  const uint64_t workers = std::min<uint64_t>(threads, count);
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (uint64_t w = 0; w < workers; ++w) {
    const uint64_t begin = count * w / workers;
    const uint64_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

uint64_t slice_count(uint32_t rows) {
  return (uint64_t{rows} + kWarpSize - 1) / kWarpSize;
}

uint64_t escaped_occurrences(const SymbolDistribution& p,
                             const QuantizedDistribution& q) {
  uint64_t total = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (q.multiplicities[i] == 0) total += p.counts[i];
  }
  return total;
}

DtansCodec make_codec(const CsrDtansContainer& c) {
  return DtansCodec(c.params, {&c.delta_tables, &c.value_tables},
                    TailLoads::kSkip);
}

template <class T>
void check_precision(const CsrDtansContainer& c) {
  if (c.precision != precision_of<T>()) {
    throw std::invalid_argument("container precision does not match the "
                                "requested value type");
  }
}

// Drives the lockstep decoder over every slice; visit(slice, lane_row,
// decoder, counts) is called per slice with a ready decoder.
template <class Visit>
void for_each_slice(const CsrDtansContainer& c, unsigned threads,
                    Visit&& visit) {
  if (c.slice_offsets.size() != slice_count(c.rows) + 1 ||
      c.row_symbols.size() != c.rows) {
    throw CorruptStreamError("container directory does not match its rows");
  }
  const DtansCodec codec = make_codec(c);
  parallel_for(c.slices(), threads, [&](uint64_t begin, uint64_t end) {
    WarpDecoder decoder(codec);
    std::array<uint64_t, kWarpSize> counts{};
    for (uint64_t s = begin; s < end; ++s) {
      const uint64_t r0 = s * kWarpSize;
      const uint64_t lanes = std::min<uint64_t>(kWarpSize, c.rows - r0);
      for (uint64_t i = 0; i < lanes; ++i) counts[i] = c.row_symbols[r0 + i];
      const uint64_t a = c.slice_offsets[s], b = c.slice_offsets[s + 1];
      if (a > b || b > c.stream.size()) {
        throw CorruptStreamError("slice directory out of range");
      }
      std::span<const uint32_t> words(c.stream.data() + a, b - a);
      visit(s, r0, decoder, words,
            std::span<const uint64_t>(counts.data(), lanes));
    }
  });
}

}  // namespace

uint64_t tables_bytes(Precision precision, uint32_t slot_count) {
  return uint64_t{slot_count} * (precision == Precision::kDouble ? 16 : 12);
}

uint64_t size_bytes(const CsrDtansContainer& c) {
  return tables_bytes(c.precision, c.params.slot_count()) +
         4 * uint64_t{c.rows} + 8 * c.slice_offsets.size() +
         4 * c.stream.size();
}

template <class T>
CsrDtansContainer encode_matrix(const CsrMatrix<T>& m,
                                const EncodeOptions& options,
                                EncodeDiagnostics* diagnostics) {
  m.validate();
  const DtansParams& p = options.params;
  if (auto v = validate_params(p)) {
    throw std::invalid_argument("invalid dtANS parameters: " + v->constraint +
                                " violated (" + v->detail + ")");
  }
  if (p.multiplicity_bits > 8 || p.slot_bits > 16) {
    throw std::invalid_argument(
        "the container packs digits and bases into 8 bits each and needs "
        "M <= 256, K <= 65536");
  }

  std::vector<uint64_t> deltas, values;
  deltas.reserve(m.nnz());
  values.reserve(m.nnz());
  for (uint32_t r = 0; r < m.rows; ++r) {
    if (m.row_length(r) > UINT32_MAX / 2) {
      throw std::invalid_argument("row too long for a 32-bit symbol count");
    }
    uint32_t prev = 0;
    for (uint64_t i = m.row_start[r]; i < m.row_start[r + 1]; ++i) {
      deltas.push_back(m.col_idx[i] - prev);
      values.push_back(value_symbol(m.values[i]));
      prev = m.col_idx[i];
    }
  }
  EncodeDiagnostics diag;
  diag.delta_distribution = SymbolDistribution::from_samples(deltas);
  diag.value_distribution = SymbolDistribution::from_samples(values);
  deltas = {};
  values = {};
  const uint32_t k = p.slot_count(), cap = p.max_multiplicity();
  diag.delta_quantized = quantize(diag.delta_distribution, k, cap, 32);
  diag.value_quantized =
      quantize(diag.value_distribution, k, cap, 8 * sizeof(T));
  diag.escaped_deltas =
      escaped_occurrences(diag.delta_distribution, diag.delta_quantized);
  diag.escaped_values =
      escaped_occurrences(diag.value_distribution, diag.value_quantized);

  CsrDtansContainer c;
  c.rows = m.rows;
  c.cols = m.cols;
  c.nnz = m.nnz();
  c.precision = precision_of<T>();
  c.params = p;
  c.permuted = options.permute_slots;
  c.permutation_seed = options.permutation_seed;
  std::vector<uint32_t> perm_delta, perm_value;
  if (options.permute_slots) {
    perm_delta = random_slot_permutation(k, options.permutation_seed);
    perm_value = random_slot_permutation(k, options.permutation_seed + 1);
  }
  c.delta_tables = build_tables(diag.delta_quantized, perm_delta);
  c.value_tables = build_tables(diag.value_quantized, perm_value);

  c.row_symbols.resize(m.rows);
  for (uint32_t r = 0; r < m.rows; ++r) {
    c.row_symbols[r] = static_cast<uint32_t>(2 * m.row_length(r));
  }

  const DtansCodec codec = make_codec(c);
  const uint64_t slices = slice_count(m.rows);
  std::vector<std::vector<uint32_t>> slice_words(slices);
  parallel_for(slices, options.threads, [&](uint64_t begin, uint64_t end) {
    std::vector<EncodedStream> lanes;
    for (uint64_t s = begin; s < end; ++s) {
      lanes.clear();
      const uint64_t r0 = s * kWarpSize;
      const uint64_t r1 = std::min<uint64_t>(m.rows, r0 + kWarpSize);
      for (uint64_t r = r0; r < r1; ++r) {
        const auto symbols = row_symbols(m, static_cast<uint32_t>(r));
        lanes.push_back(codec.encode(symbols));
      }
      slice_words[s] = interleave_warp(lanes).words;
    }
  });
  c.slice_offsets.assign(1, 0);
  uint64_t total = 0;
  for (const auto& w : slice_words) total += w.size();
  c.stream.reserve(total);
  for (auto& w : slice_words) {
    c.stream.insert(c.stream.end(), w.begin(), w.end());
    c.slice_offsets.push_back(c.stream.size());
    w = {};
  }
  if (diagnostics) *diagnostics = std::move(diag);
  return c;
}

template <class T>
CsrMatrix<T> decode_matrix(const CsrDtansContainer& c, unsigned threads) {
  check_precision<T>(c);
  CsrMatrix<T> out;
  out.rows = c.rows;
  out.cols = c.cols;
  out.row_start.assign(uint64_t{c.rows} + 1, 0);
  for (uint32_t r = 0; r < c.rows; ++r) {
    if (c.row_symbols[r] % 2 != 0) {
      throw CorruptStreamError("row symbol count is odd");
    }
    out.row_start[r + 1] = out.row_start[r] + c.row_symbols[r] / 2;
  }
  if (out.row_start.back() != c.nnz) {
    throw CorruptStreamError("row symbol counts disagree with nnz");
  }
  out.col_idx.assign(c.nnz, 0);
  out.values.assign(c.nnz, T{0});

  for_each_slice(c, threads, [&](uint64_t, uint64_t r0, WarpDecoder& decoder,
                                 std::span<const uint32_t> words,
                                 std::span<const uint64_t> counts) {
    struct Cursor {
      uint64_t k = 0;
      uint64_t col = 0;
    };
    std::array<Cursor, kWarpSize> cur{};
    const uint64_t used = decoder.replay(
        words, counts, [&](uint32_t lane, std::span<const uint64_t> symbols) {
          Cursor& st = cur[lane];
          const uint64_t base = out.row_start[r0 + lane];
          for (uint64_t s : symbols) {
            const uint64_t i = base + st.k / 2;
            if (st.k % 2 == 0) {
              if (st.k > 0 && s == 0) throw CorruptStreamError("zero column delta");
              st.col += s;
              if (st.col >= c.cols) throw CorruptStreamError("column out of range");
              out.col_idx[i] = static_cast<uint32_t>(st.col);
            } else {
              out.values[i] = symbol_value<T>(s);
            }
            ++st.k;
          }
        });
    if (used != words.size()) {
      throw CorruptStreamError("slice stream has trailing words");
    }
  });
  return out;
}

template <class T>
void spmv(const CsrDtansContainer& c, std::span<const T> x, std::span<T> y,
          unsigned threads) {
  check_precision<T>(c);
  if (x.size() != c.cols || y.size() != c.rows) {
    throw std::invalid_argument("spmv dimension mismatch");
  }
  for_each_slice(c, threads, [&](uint64_t, uint64_t r0, WarpDecoder& decoder,
                                 std::span<const uint32_t> words,
                                 std::span<const uint64_t> counts) {
    struct Lane {
      uint64_t k = 0;
      uint64_t col = 0;
      T acc = 0;
    };
    std::array<Lane, kWarpSize> lane_state{};
    const uint64_t used = decoder.replay(
        words, counts, [&](uint32_t lane, std::span<const uint64_t> symbols) {
          Lane& st = lane_state[lane];
          for (uint64_t s : symbols) {
            if (st.k % 2 == 0) {
              if (st.k > 0 && s == 0) throw CorruptStreamError("zero column delta");
              st.col += s;
              if (st.col >= c.cols) throw CorruptStreamError("column out of range");
            } else {
              st.acc += symbol_value<T>(s) * x[st.col];
            }
            ++st.k;
          }
        });
    if (used != words.size()) {
      throw CorruptStreamError("slice stream has trailing words");
    }
    for (size_t i = 0; i < counts.size(); ++i) {
      y[r0 + i] = lane_state[i].acc + y[r0 + i];
    }
  });
}

LockstepSchedule slice_schedule(const CsrDtansContainer& c, uint64_t slice) {
  if (slice >= c.slices()) throw std::out_of_range("slice index out of range");
  LockstepSchedule schedule;
  const DtansCodec codec = make_codec(c);
  WarpDecoder decoder(codec);
  const uint64_t r0 = slice * kWarpSize;
  const uint64_t lanes = std::min<uint64_t>(kWarpSize, c.rows - r0);
  std::vector<uint64_t> counts(c.row_symbols.begin() + r0,
                               c.row_symbols.begin() + r0 + lanes);
  std::span<const uint32_t> words(c.stream.data() + c.slice_offsets[slice],
                                  c.slice_offsets[slice + 1] -
                                      c.slice_offsets[slice]);
  decoder.replay(words, counts, [](uint32_t, std::span<const uint64_t>) {},
                 &schedule);
  return schedule;
}

template CsrDtansContainer encode_matrix(const CsrMatrix<float>&,
                                         const EncodeOptions&,
                                         EncodeDiagnostics*);
template CsrDtansContainer encode_matrix(const CsrMatrix<double>&,
                                         const EncodeOptions&,
                                         EncodeDiagnostics*);
template CsrMatrix<float> decode_matrix(const CsrDtansContainer&, unsigned);
template CsrMatrix<double> decode_matrix(const CsrDtansContainer&, unsigned);
template void spmv(const CsrDtansContainer&, std::span<const float>,
                   std::span<float>, unsigned);
template void spmv(const CsrDtansContainer&, std::span<const double>,
                   std::span<double>, unsigned);

}  // namespace csrdtans
