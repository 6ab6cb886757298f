#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "csrdtans/csr_dtans.hpp"

namespace csrdtans {

namespace {

constexpr char kMagic[4] = {'C', 'D', 'T', 'A'};
constexpr uint16_t kUnusedCode = 0x0001;

enum Flags : uint8_t {
  kPermuted = 1u << 0,
  kDeltaEscape = 1u << 1,
  kValueEscape = 1u << 2,
};

class Writer {
 public:
  template <class U>
  void put(U v) {
    for (size_t i = 0; i < sizeof(U); ++i) {
      bytes_.push_back(static_cast<uint8_t>(static_cast<uint64_t>(v) >> (8 * i)));
    }
  }
  void raw(const void* p, size_t n) {
    const auto* b = static_cast<const uint8_t*>(p);
    bytes_.insert(bytes_.end(), b, b + n);
  }
  uint64_t size() const { return bytes_.size(); }
  std::vector<uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  template <class U>
  U get() {
    need(sizeof(U));
    uint64_t v = 0;
    for (size_t i = 0; i < sizeof(U); ++i) {
      v |= uint64_t{bytes_[pos_ + i]} << (8 * i);
    }
    pos_ += sizeof(U);
    return static_cast<U>(v);
  }
  void need(uint64_t n) const {
    if (n > bytes_.size() - pos_) {
      throw ContainerError(ContainerError::Kind::kTruncated,
                           "container ends inside a section");
    }
  }
  uint64_t pos() const { return pos_; }

 private:
  std::span<const uint8_t> bytes_;
  uint64_t pos_ = 0;
};

uint16_t slot_code(const CodingTables& t, uint32_t j) {
  if (t.kind(j) == SlotKind::kUnused) return kUnusedCode;
  return static_cast<uint16_t>(t.digit(j) | ((t.base(j) - 1) << 8));
}

struct SlotFields {
  std::vector<uint64_t> symbol;
  std::vector<uint32_t> digit, base;
  std::vector<SlotKind> kind;
};

void decode_slot(SlotFields& f, uint64_t symbol, uint16_t code,
                 bool has_escape, uint64_t sentinel) {
  if (code == kUnusedCode) {
    f.symbol.push_back(0);
    f.digit.push_back(0);
    f.base.push_back(1);
    f.kind.push_back(SlotKind::kUnused);
    return;
  }
  f.symbol.push_back(symbol);
  f.digit.push_back(code & 0xffu);
  f.base.push_back((code >> 8) + 1u);
  f.kind.push_back(has_escape && symbol == sentinel ? SlotKind::kEscape
                                                    : SlotKind::kSymbol);
}

uint32_t checksum(std::span<const uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  for (size_t done = 0; done < bytes.size();) {
    const size_t chunk = std::min<size_t>(bytes.size() - done, 1u << 30);
    crc = crc32(crc, bytes.data() + done, static_cast<uInt>(chunk));
    done += chunk;
  }
  return static_cast<uint32_t>(crc);
}

[[noreturn]] void invalid(const std::string& what) {
  throw ContainerError(ContainerError::Kind::kInvalid, what);
}

}  // namespace

std::vector<uint8_t> serialize(const CsrDtansContainer& c,
                               SerializedLayout* layout) {
  const uint32_t k = c.params.slot_count();
  if (c.delta_tables.size() != k || c.value_tables.size() != k) {
    throw std::invalid_argument("container tables do not have K slots");
  }
  if (c.params.multiplicity_bits > 8) {
    throw std::invalid_argument("bases do not fit the 8-bit slot packing");
  }
  Writer w;
  SerializedLayout lay;

  w.raw(kMagic, 4);
  w.put<uint16_t>(kContainerVersion);
  w.put<uint8_t>(static_cast<uint8_t>(c.precision));
  w.put<uint8_t>(0);
  w.put<uint64_t>(c.rows);
  w.put<uint64_t>(c.cols);
  w.put<uint64_t>(c.nnz);
  lay.header = w.size();

  const DtansParams& p = c.params;
  for (uint32_t v : {p.word_bits, p.slot_bits, p.multiplicity_bits,
                     p.segment_symbols, p.segment_words, p.checks}) {
    w.put<uint8_t>(static_cast<uint8_t>(v));
  }
  w.put<uint64_t>(c.permutation_seed);
  uint8_t flags = 0;
  if (c.permuted) flags |= kPermuted;
  if (c.delta_tables.has_escape()) flags |= kDeltaEscape;
  if (c.value_tables.has_escape()) flags |= kValueEscape;
  w.put<uint8_t>(flags);
  w.put<uint64_t>(c.delta_tables.escape_sentinel());
  w.put<uint64_t>(c.value_tables.escape_sentinel());
  lay.params = w.size() - lay.header;

  const uint64_t before_tables = w.size();
  for (uint32_t j = 0; j < k; ++j) {
    if (c.precision == Precision::kDouble) {
      w.put<uint64_t>(c.value_tables.symbol(j));
    } else {
      w.put<uint32_t>(static_cast<uint32_t>(c.value_tables.symbol(j)));
    }
    w.put<uint32_t>(static_cast<uint32_t>(c.delta_tables.symbol(j)));
    w.put<uint16_t>(slot_code(c.delta_tables, j));
    w.put<uint16_t>(slot_code(c.value_tables, j));
  }
  lay.tables = w.size() - before_tables;

  const uint64_t before_rows = w.size();
  for (uint32_t n : c.row_symbols) w.put<uint32_t>(n);
  lay.row_counts = w.size() - before_rows;

  const uint64_t before_dir = w.size();
  for (uint64_t off : c.slice_offsets) w.put<uint64_t>(off);
  lay.directory = w.size() - before_dir;

  const uint64_t before_stream = w.size();
  w.put<uint64_t>(c.stream.size());
  for (uint32_t word : c.stream) w.put<uint32_t>(word);
  lay.stream = w.size() - before_stream;

  w.put<uint32_t>(checksum(w.bytes()));
  lay.trailer = 4;
  if (layout) *layout = lay;
  return std::move(w.bytes());
}

CsrDtansContainer deserialize(std::span<const uint8_t> bytes) {
  using Kind = ContainerError::Kind;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ContainerError(Kind::kBadMagic, "not a CSR-dtANS container");
  }
  if (bytes.size() < 6 + 4) {
    throw ContainerError(Kind::kTruncated, "container too short");
  }
  const uint16_t version = static_cast<uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != kContainerVersion) {
    throw ContainerError(Kind::kVersion,
                         "unsupported container version " + std::to_string(version));
  }
  const size_t body = bytes.size() - 4;
  Reader trailer(bytes.subspan(body));
  if (trailer.get<uint32_t>() != checksum(bytes.first(body))) {
    throw ContainerError(Kind::kChecksum, "container checksum mismatch");
  }

  Reader r(bytes.first(body));
  r.get<uint32_t>();
  r.get<uint16_t>();
  CsrDtansContainer c;
  const uint8_t precision = r.get<uint8_t>();
  if (precision != 4 && precision != 8) invalid("unknown value precision");
  c.precision = static_cast<Precision>(precision);
  r.get<uint8_t>();
  const uint64_t rows = r.get<uint64_t>();
  const uint64_t cols = r.get<uint64_t>();
  if (rows > UINT32_MAX || cols > UINT32_MAX) invalid("dimensions exceed 32 bits");
  c.rows = static_cast<uint32_t>(rows);
  c.cols = static_cast<uint32_t>(cols);
  c.nnz = r.get<uint64_t>();

  DtansParams& p = c.params;
  p.word_bits = r.get<uint8_t>();
  p.slot_bits = r.get<uint8_t>();
  p.multiplicity_bits = r.get<uint8_t>();
  p.segment_symbols = r.get<uint8_t>();
  p.segment_words = r.get<uint8_t>();
  p.checks = r.get<uint8_t>();
  if (auto v = validate_params(p)) invalid("bad parameters: " + v->detail);
  if (p.multiplicity_bits > 8 || p.slot_bits > 16) {
    invalid("parameters exceed the container's slot packing");
  }
  c.permutation_seed = r.get<uint64_t>();
  const uint8_t flags = r.get<uint8_t>();
  c.permuted = flags & kPermuted;
  const uint64_t delta_sentinel = r.get<uint64_t>();
  const uint64_t value_sentinel = r.get<uint64_t>();

  const uint32_t k = p.slot_count();
  r.need(tables_bytes(c.precision, k));
  SlotFields delta, value;
  for (uint32_t j = 0; j < k; ++j) {
    const uint64_t vs = c.precision == Precision::kDouble ? r.get<uint64_t>()
                                                          : r.get<uint32_t>();
    const uint32_t ds = r.get<uint32_t>();
    const uint16_t dc = r.get<uint16_t>();
    const uint16_t vc = r.get<uint16_t>();
    decode_slot(delta, ds, dc, flags & kDeltaEscape, delta_sentinel);
    decode_slot(value, vs, vc, flags & kValueEscape, value_sentinel);
  }
  try {
    c.delta_tables = CodingTables::from_slots(
        std::move(delta.symbol), std::move(delta.digit), std::move(delta.base),
        std::move(delta.kind), p.max_multiplicity(), 32);
    c.value_tables = CodingTables::from_slots(
        std::move(value.symbol), std::move(value.digit), std::move(value.base),
        std::move(value.kind), p.max_multiplicity(), 8 * precision);
  } catch (const std::invalid_argument& e) {
    invalid(std::string("bad coding tables: ") + e.what());
  }

  r.need(4 * rows);
  c.row_symbols.resize(c.rows);
  uint64_t symbols = 0;
  for (auto& n : c.row_symbols) {
    n = r.get<uint32_t>();
    if (n % 2 != 0) invalid("odd row symbol count");
    symbols += n;
  }
  if (symbols != 2 * c.nnz) invalid("row symbol counts disagree with nnz");

  const uint64_t slices = (rows + kWarpSize - 1) / kWarpSize;
  r.need(8 * (slices + 1));
  c.slice_offsets.resize(slices + 1);
  for (auto& off : c.slice_offsets) off = r.get<uint64_t>();

  const uint64_t words = r.get<uint64_t>();
  r.need(4 * words);
  c.stream.resize(words);
  for (auto& w : c.stream) w = r.get<uint32_t>();
  if (r.pos() != body) invalid("trailing bytes after the stream");

  if (c.slice_offsets.front() != 0 || c.slice_offsets.back() != words) {
    invalid("slice directory does not span the stream");
  }
  for (size_t i = 1; i < c.slice_offsets.size(); ++i) {
    if (c.slice_offsets[i] < c.slice_offsets[i - 1]) {
      invalid("slice directory is not monotone");
    }
  }
  return c;
}

void write_container(const std::string& path, const CsrDtansContainer& c) {
  const auto bytes = serialize(c);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path);
}

CsrDtansContainer read_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace csrdtans
