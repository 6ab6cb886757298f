// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if
// any criterion fails.
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "csrdtans/coding_tables.hpp"
#include "csrdtans/csr_dtans.hpp"
#include "csrdtans/dtans.hpp"
#include "csrdtans/entropy_model.hpp"
#include "csrdtans/graph_gen.hpp"
#include "csrdtans/lockstep.hpp"
#include "csrdtans/matrix_market.hpp"
#include "csrdtans/tans.hpp"
#include "oracles.hpp"

using namespace csrdtans;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& body) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  char line[64];
  std::snprintf(line, sizeof line, " [%.1f ms]", ms_since(t0));
  std::printf("%s %2d %s: %s%s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(),
              v.detail.c_str(), line);
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

template <class T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (value_symbol(a[i]) != value_symbol(b[i])) return false;
  }
  return true;
}

constexpr uint64_t A = 'a', B = 'b', C = 'c';
const std::vector<uint64_t> kGoldenInput = {C, B, C, B, C, C, B, B, B, A};

QuantizedDistribution abc_q(uint32_t m) {
  QuantizedDistribution q;
  q.table_size = 8;
  q.max_multiplicity = m;
  q.raw_width_bits = 8;
  q.symbols = {A, B, C};
  q.multiplicities = {1, 4, 3};
  return q;
}

// ---------------------------------------------------------------- 1
Verdict golden_tans() {
  const auto t = build_tables(abc_q(8));
  const TansParams params{8, 16};
  const auto t0 = Clock::now();
  auto enc = tans_encode(kGoldenInput, t, params);
  auto dec = tans_decode(enc.state, enc.bits, t, params, kGoldenInput.size());
  const double ms = ms_since(t0);
  const bool ok = enc.state == 23 && enc.bits.to_string() == "00101010000000" &&
                  dec == kGoldenInput && ms < 1.0;
  return {ok, "s0=" + std::to_string(enc.state) + " v=" + enc.bits.to_string() +
                  (dec == kGoldenInput ? " decode ok" : " decode MISMATCH") +
                  " codec " + std::to_string(ms) + " ms"};
}

// ---------------------------------------------------------------- 2
Verdict golden_dtans() {
  const auto t = build_tables(abc_q(4));
  const std::vector<uint32_t> v = {1, 1, 1, 2, 3, 1, 2, 1, 1, 0, 0};
  DtansCodec codec(DtansParams::toy(), {&t}, TailLoads::kFull);
  DecodeTrace trace;
  const auto t0 = Clock::now();
  auto u = codec.decode(v, kGoldenInput.size(), &trace);
  const double ms = ms_since(t0);
  std::vector<std::string> problems;
  if (u != kGoldenInput) problems.push_back("decoded symbols differ");
  const std::vector<uint32_t> w = {1, 1, 1};
  if (unpack(w, DtansParams::toy()) != std::vector<uint32_t>{5, 2}) {
    problems.push_back("unpack(1,1,1) != (5,2)");
  }
  const auto& s0 = trace.segments.at(0);
  if (s0.slots != std::vector<uint32_t>{5, 2}) problems.push_back("segment slots");
  if (t.symbol(s0.slots[0]) != C || t.symbol(s0.slots[1]) != B) {
    problems.push_back("segment symbols");
  }
  if (s0.checks != std::vector<CheckOutcome>{CheckOutcome::kLoaded, CheckOutcome::kExtracted}) {
    problems.push_back("check outcomes");
  }
  if (s0.state_after_check.at(1) != DecoderState{0, 3}) problems.push_back("state after w2");
  if (s0.next_words != std::vector<uint32_t>{2, 1, 3}) problems.push_back("w1,w2,w3");
  if (codec.encode(kGoldenInput).words != v) problems.push_back("encoder output");
  if (ms >= 1.0) problems.push_back("decode took " + std::to_string(ms) + " ms");
  std::string detail = problems.empty() ? "u recovered; unpack (5,2); (c,b); w1<-2, "
                                          "w2=1 extracted, state (0,3); w3<-3"
                                        : "";
  for (auto& p : problems) detail += p + "; ";
  return {problems.empty(), detail};
}

// ---------------------------------------------------------------- 3
Verdict entropy_numbers() {
  auto p = SymbolDistribution::from_counts({A, B, C}, {1, 5, 4});
  auto q1 = abc_q(8);
  auto q2 = abc_q(8);
  q2.multiplicities = {2, 4, 2};
  const double h = entropy(p), h1 = cross_entropy(p, q1), h2 = cross_entropy(p, q2);
  const bool ok = std::abs(h - 1.361) <= 0.001 && std::abs(h1 - 1.366) <= 0.001 && h2 == 1.5;
  char buf[128];
  std::snprintf(buf, sizeof buf, "H=%.6f H(P,P')=%.6f H(P,P'')=%.17g", h, h1, h2);
  return {ok, buf};
}

// ---------------------------------------------------------------- 4
Verdict table_sizes() {
  const auto m = oracle::example_matrix();
  SerializedLayout l64, l32;
  serialize(encode_matrix(m), &l64);
  serialize(encode_matrix(convert_values<float>(m)), &l32);
  const bool ok = l64.tables == 65536 && l32.tables == 49152;
  return {ok, "64-bit " + std::to_string(l64.tables) + " B, 32-bit " +
                  std::to_string(l32.tables) + " B"};
}

// ---------------------------------------------------------------- 5
// Independent exact search over compositions by dynamic programming on
// (symbol, slots used, escaped count); the winner is re-scored with the
// shared canonical cost so both sides are evaluated identically.
oracle::BruteForceResult dp_minimum(const std::vector<uint64_t>& counts, uint32_t k,
                                    uint32_t m, uint32_t raw) {
  const size_t n = counts.size();
  uint64_t total = 0;
  for (auto c : counts) total += c;
  struct Cell {
    double cost = INFINITY;
    uint32_t take = 0;
  };
  // best[i][used][escaped]
  std::vector<std::vector<std::vector<Cell>>> best(
      n + 1, std::vector<std::vector<Cell>>(k + 1, std::vector<Cell>(total + 1)));
  best[0][0][0].cost = 0;
  for (size_t i = 0; i < n; ++i) {
    for (uint32_t used = 0; used <= k; ++used) {
      for (uint64_t e = 0; e <= total; ++e) {
        const double base = best[i][used][e].cost;
        if (!std::isfinite(base)) continue;
        for (uint32_t x = 0; x <= m && used + x <= k; ++x) {
          const uint64_t e2 = x == 0 ? e + counts[i] : e;
          const double c = x == 0 ? base : base + counts[i] * std::log2(double(k) / x);
          Cell& dst = best[i + 1][used + x][e2];
          if (c < dst.cost) dst = {c, x};
        }
      }
    }
  }
  double best_cost = INFINITY;
  uint32_t best_used = 0, best_esc = 0;
  uint64_t best_e = 0;
  for (uint32_t used = 0; used <= k; ++used) {
    for (uint64_t e = 0; e <= total; ++e) {
      const double base = best[n][used][e].cost;
      if (!std::isfinite(base)) continue;
      if (e == 0) {
        if (base < best_cost) best_cost = base, best_used = used, best_e = 0, best_esc = 0;
        continue;
      }
      for (uint32_t s = 1; s <= m && used + s <= k; ++s) {
        const double c = base + e * (std::log2(double(k) / s) + raw);
        if (c < best_cost) best_cost = c, best_used = used, best_e = e, best_esc = s;
      }
    }
  }
  oracle::BruteForceResult r;
  r.mult.assign(n, 0);
  uint32_t used = best_used;
  uint64_t e = best_e;
  for (size_t i = n; i-- > 0;) {
    const uint32_t x = best[i + 1][used][e].take;
    r.mult[i] = x;
    used -= x;
    if (x == 0) e -= counts[i];
  }
  r.escape_mult = best_esc;
  r.cost = oracle::composition_cost(counts, r.mult, r.escape_mult, k, raw);
  return r;
}

Verdict quantizer_oracle() {
  // Every count vector of 1..5 positive entries summing to at most 30.
  std::vector<std::vector<uint64_t>> vectors;
  std::vector<uint64_t> cur;
  std::function<void(uint64_t)> rec = [&](uint64_t left) {
    if (!cur.empty()) vectors.push_back(cur);
    if (cur.size() == 5) return;
    for (uint64_t c = 1; c <= left; ++c) {
      cur.push_back(c);
      rec(left - c);
      cur.pop_back();
    }
  };
  rec(30);

  struct Config {
    uint32_t k, m, raw;
  };
  std::vector<Config> configs;
  for (uint32_t k : {2u, 4u, 8u, 16u}) {
    for (uint32_t m = 1; m <= k; m *= 2) {
      for (uint32_t raw : {4u, 32u}) configs.push_back({k, m, raw});
    }
  }

  uint64_t checked = 0, exact = 0, worse = 0;
  double worst = 0;
  std::map<std::vector<uint64_t>, double> cache;
  std::vector<uint64_t> symbols;
  for (const auto& cfg : configs) {
    cache.clear();
    for (const auto& counts : vectors) {
      symbols.resize(counts.size());
      for (size_t i = 0; i < counts.size(); ++i) symbols[i] = 1000 + i;
      auto p = SymbolDistribution::from_counts(symbols, counts);
      auto q = quantize(p, cfg.k, cfg.m, cfg.raw);
      q.validate();
      std::map<uint64_t, uint32_t> mult_of;
      for (size_t i = 0; i < q.symbols.size(); ++i) mult_of[q.symbols[i]] = q.multiplicities[i];
      std::vector<uint32_t> mult(counts.size());
      for (size_t i = 0; i < counts.size(); ++i) mult[i] = mult_of[symbols[i]];
      const double got =
          oracle::composition_cost(counts, mult, q.escape_multiplicity, cfg.k, cfg.raw);

      auto key = counts;
      std::sort(key.begin(), key.end());
      auto it = cache.find(key);
      if (it == cache.end()) {
        it = cache.emplace(key, dp_minimum(key, cfg.k, cfg.m, cfg.raw).cost).first;
      }
      const double want = it->second;
      ++checked;
      if (got == want) {
        ++exact;
      } else {
        const double rel = (got - want) / std::max(1.0, want);
        worst = std::max(worst, std::abs(rel));
        if (rel > 1e-12) ++worse;
      }
    }
  }
  std::ostringstream s;
  s << checked << " cases (" << vectors.size() << " count vectors x " << configs.size()
    << " (K,M,raw) settings), " << exact << " bit-identical optima, " << worse
    << " above the minimum, max relative gap " << worst;
  return {worse == 0, s.str()};
}

// ---------------------------------------------------------------- 6, 7
struct Corpus {
  std::vector<CsrMatrix<double>> doubles;
  std::vector<CsrMatrix<float>> floats;
};

const Corpus& random_corpus() {
  static const Corpus corpus = [] {
    Corpus c;
    std::mt19937_64 rng(20240601);
    for (int i = 0; i < 1000; ++i) {
      if (i % 2 == 0) {
        c.doubles.push_back(oracle::random_matrix<double>(rng, 256, 10000));
      } else {
        c.floats.push_back(oracle::random_matrix<float>(rng, 256, 10000));
      }
    }
    return c;
  }();
  return corpus;
}

template <class T>
bool pipeline_roundtrip(const CsrMatrix<T>& m) {
  auto bytes = serialize(encode_matrix(m));
  return bitwise_equal(decode_matrix<T>(deserialize(bytes)), m);
}

Verdict roundtrip_property() {
  const auto& c = random_corpus();
  uint64_t ok = 0, total = 0, nnz = 0;
  uint32_t max_rows = 0;
  for (const auto& m : c.doubles) {
    ok += pipeline_roundtrip(m), ++total, nnz += m.nnz();
    max_rows = std::max(max_rows, m.rows);
  }
  for (const auto& m : c.floats) {
    ok += pipeline_roundtrip(m), ++total, nnz += m.nnz();
    max_rows = std::max(max_rows, m.rows);
  }
  std::ostringstream s;
  s << ok << "/" << total << " bit-identical (" << c.doubles.size() << " 64-bit, "
    << c.floats.size() << " 32-bit, " << nnz << " nonzeros, max rows " << max_rows << ")";
  return {ok == total && total == 1000, s.str()};
}

template <class T>
bool spmv_matches(const CsrMatrix<T>& m, std::mt19937_64& rng) {
  auto c = deserialize(serialize(encode_matrix(m)));
  std::uniform_real_distribution<double> u(-4, 4);
  std::vector<T> x(m.cols), y(m.rows);
  for (auto& v : x) v = static_cast<T>(u(rng));
  for (auto& v : y) v = static_cast<T>(u(rng));
  auto expect = y;
  reference_spmv<T>(m, x, expect);
  spmv<T>(c, x, y);
  return same_bits(y, expect);
}

Verdict spmv_oracle() {
  std::mt19937_64 rng(77);
  uint64_t ok = 0, total = 0;
  const auto& c = random_corpus();
  for (const auto& m : c.doubles) ok += spmv_matches(m, rng), ++total;
  for (const auto& m : c.floats) ok += spmv_matches(m, rng), ++total;

  const auto fig = oracle::example_matrix();
  auto fc = encode_matrix(fig);
  std::vector<double> x(4, 1.0), y(4, 0.0);
  spmv<double>(fc, x, y);
  const bool fig_ok = y == std::vector<double>{12, 5, 4, 1};
  ok += spmv_matches(fig, rng) && fig_ok;
  ++total;
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                           " bitwise equal to the reference kernel, example matrix y = (" +
                           (fig_ok ? "12,5,4,1)" : "wrong values)")};
}

// ---------------------------------------------------------------- 8
Verdict corpus_direction() {
  const char* env = std::getenv("CSRDTANS_CORPUS_DIR");
  const fs::path dir = env ? env : CSRDTANS_DEFAULT_CORPUS;
  if (!fs::is_directory(dir)) {
    return {false, "no SuiteSparse corpus at " + dir.string() +
                       " (set CSRDTANS_CORPUS_DIR or run scripts/fetch_suitesparse.sh)"};
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".mtx") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  uint64_t eligible = 0, compressed = 0;
  std::ostringstream worst;
  for (const auto& f : files) {
    CsrMatrix<double> m;
    try {
      m = coo_to_csr(read_mtx(f.string()));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "skipping %s: %s\n", f.c_str(), e.what());
      continue;
    }
    if (m.nnz() < (1u << 15) || m.rows == 0 || double(m.nnz()) / m.rows < 10) continue;
    ++eligible;
    auto r = cli::compute_stats(f.stem().string(), m, Precision::kDouble, {});
    if (r.ratio < 1) {
      ++compressed;
    } else {
      worst << " " << r.matrix << "=" << r.ratio;
    }
    std::fprintf(stderr, "  %s nnz=%llu annzpr=%.1f ratio=%.4f\n", r.matrix.c_str(),
                 static_cast<unsigned long long>(r.nnz), r.annzpr, r.ratio);
  }
  std::ostringstream s;
  s << compressed << "/" << eligible << " eligible matrices compressed below the best baseline";
  if (eligible < 10) s << "; need at least 10 eligible matrices, found " << eligible;
  if (!worst.str().empty()) s << "; not compressed:" << worst.str();
  const bool ok = eligible >= 10 && compressed * 10 >= eligible * 8;
  return {ok, s.str()};
}

// ---------------------------------------------------------------- 9
Verdict small_matrices() {
  uint64_t checked = 0, above = 0;
  double lowest = INFINITY;
  auto consider = [&](const CsrMatrix<double>& m, Precision p) {
    if (m.nnz() > 1024 || m.rows == 0) return;
    auto r = cli::compute_stats("m", m, p, {});
    ++checked;
    above += r.ratio > 1;
    lowest = std::min(lowest, r.ratio);
  };
  const auto& c = random_corpus();
  for (const auto& m : c.doubles) consider(m, Precision::kDouble), consider(m, Precision::kSingle);
  for (const auto& m : c.floats) consider(convert_values<double>(m), Precision::kSingle);
  consider(oracle::example_matrix(), Precision::kDouble);
  // Dense-ish small blocks: the most compressible small inputs.
  for (uint32_t n : {8u, 16u, 32u}) {
    CsrMatrix<double> d;
    d.rows = d.cols = n;
    for (uint32_t r = 0; r < n; ++r) {
      for (uint32_t k = 0; k < n && d.col_idx.size() < 1024; ++k) {
        d.col_idx.push_back(k);
        d.values.push_back(1.0);
      }
      d.row_start.push_back(d.col_idx.size());
    }
    consider(d, Precision::kSingle);
  }
  std::ostringstream s;
  s << above << "/" << checked << " matrices with nnz <= 1024 have ratio > 1 (lowest " << lowest
    << ")";
  return {checked > 0 && above == checked, s.str()};
}

// ---------------------------------------------------------------- 10
Verdict graph_entropy_cells() {
  int below = 0, cells = 0;
  std::ostringstream s, bad;
  double worst = 0;
  for (GraphModel model :
       {GraphModel::kErdosRenyi, GraphModel::kWattsStrogatz, GraphModel::kBarabasiAlbert}) {
    for (uint32_t n : {1000u, 10000u, 100000u}) {
      for (double deg : {5.0, 10.0, 20.0}) {
        std::vector<double> ratios;
        for (uint64_t seed = 1; seed <= 3; ++seed) {
          ratios.push_back(index_entropy_ratio(gen_graph({model, n, deg, seed})));
        }
        std::sort(ratios.begin(), ratios.end());
        const double median = ratios[1];
        ++cells;
        worst = std::max(worst, median);
        if (median < 1) {
          ++below;
        } else {
          bad << " " << graph_model_name(model) << "/" << n << "/" << deg << "=" << median;
        }
      }
    }
  }
  s << below << "/" << cells << " cells with median ratio < 1 (largest median " << worst << ")"
    << bad.str();
  return {below == 27, s.str()};
}

// ---------------------------------------------------------------- 11
Verdict rate_bound() {
  const auto p = DtansParams::production();
  std::mt19937_64 rng(11);
  struct Source {
    std::string name;
    std::function<uint64_t()> draw;
  };
  std::geometric_distribution<uint64_t> geo(0.2);
  std::vector<double> zipf_w;
  for (int i = 1; i <= 2000; ++i) zipf_w.push_back(1.0 / i);
  std::discrete_distribution<uint64_t> zipf(zipf_w.begin(), zipf_w.end());
  std::uniform_int_distribution<uint64_t> uni(0, 99);
  std::discrete_distribution<uint64_t> skew({90, 5, 3, 1, 1});
  std::vector<Source> sources = {
      {"geometric(0.2)", [&] { return geo(rng); }},
      {"zipf(2000)", [&] { return zipf(rng); }},
      {"uniform(100)", [&] { return uni(rng); }},
      {"skewed(5)", [&] { return skew(rng); }},
  };
  bool ok = true;
  std::ostringstream s;
  for (auto& src : sources) {
    std::vector<uint64_t> u(200000);
    for (auto& x : u) x = src.draw();
    auto dist = SymbolDistribution::from_samples(u);
    auto q = quantize(dist, p.slot_count(), p.max_multiplicity(), 32);
    auto t = build_tables(q, random_slot_permutation(p.slot_count(), 1));
    DtansCodec codec(p, {&t});
    auto enc = codec.encode(u);
    if (codec.decode(enc.words, u.size()) != u) ok = false;
    const double rate = 32.0 * enc.words.size() / u.size();
    const double h = entropy(dist), hx = cross_entropy(dist, q);
    const bool this_ok = rate <= hx + 0.1 && rate >= h;
    ok &= this_ok;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s%s: H=%.4f Hx=%.4f rate=%.4f", s.str().empty() ? "" : "; ",
                  src.name.c_str(), h, hx, rate);
    s << buf;
  }
  return {ok, s.str()};
}

// ---------------------------------------------------------------- 12
Verdict desk_scale_substitutes() {
  std::ostringstream s;
  bool ok = true;

  // Thread-count determinism of encoding and spmv.
  auto g = gen_graph({GraphModel::kBarabasiAlbert, 20000, 10, 5});
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : g.values) v = std::round(u(rng) * 64) / 64;
  std::vector<uint8_t> ref;
  for (unsigned threads : {1u, 2u, 4u, 8u}) {
    EncodeOptions o;
    o.threads = threads;
    auto bytes = serialize(encode_matrix(g, o));
    if (ref.empty()) ref = bytes;
    ok &= bytes == ref;
  }
  auto c = deserialize(ref);
  std::vector<double> x(g.cols), y0(g.rows);
  for (auto& v : x) v = u(rng);
  for (auto& v : y0) v = u(rng);
  std::vector<double> y_ref;
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    auto y = y0;
    spmv<double>(c, x, y, threads);
    if (y_ref.empty()) y_ref = y;
    ok &= same_bits(y, y_ref);
  }
  s << "encode bytes and spmv bits identical for 1-8 threads: " << (ok ? "yes" : "NO");

  // Coalescing on every slice schedule.
  uint64_t schedules = 0, coalesced = 0;
  auto check_all = [&](const CsrDtansContainer& cc) {
    for (uint64_t sl = 0; sl < cc.slices(); ++sl) {
      ++schedules;
      auto sched = slice_schedule(cc, sl);
      uint64_t pos = 0;
      bool good = is_coalesced(sched) &&
                  sched.words() == cc.slice_offsets[sl + 1] - cc.slice_offsets[sl];
      for (const auto& e : sched.events) {
        good &= e.first == pos && e.lane_mask != 0;
        pos += std::popcount(e.lane_mask);
      }
      coalesced += good;
    }
  };
  check_all(c);
  const auto& corpus = random_corpus();
  for (size_t i = 0; i < 100; ++i) check_all(encode_matrix(corpus.doubles[i]));
  ok &= schedules == coalesced;
  s << "; " << coalesced << "/" << schedules << " schedules coalesced";

  // Throughput smoke test on a 2^20-nonzero matrix.
  const uint32_t n = 1u << 16;
  CsrMatrix<double> big;
  big.rows = big.cols = n;
  std::mt19937_64 grng(13);
  for (uint32_t r = 0; r < n; ++r) {
    std::vector<uint32_t> cols;
    while (cols.size() < 16) {
      uint32_t col = static_cast<uint32_t>(grng() % n);
      if (std::find(cols.begin(), cols.end(), col) == cols.end()) cols.push_back(col);
    }
    std::sort(cols.begin(), cols.end());
    for (auto col : cols) {
      big.col_idx.push_back(col);
      big.values.push_back(static_cast<double>(grng() % 32) / 4.0);
    }
    big.row_start.push_back(big.col_idx.size());
  }
  auto bc = encode_matrix(big);
  std::vector<double> bx(n, 1.0), by(n, 0.0);
  const auto t0 = Clock::now();
  spmv<double>(bc, bx, by, 0);
  const double ms = ms_since(t0);
  auto expect = std::vector<double>(n, 0.0);
  reference_spmv<double>(big, bx, expect);
  const bool fast = ms < 5000 && same_bits(by, expect);
  ok &= fast;
  char buf[128];
  std::snprintf(buf, sizeof buf, "; spmv on %llu nonzeros took %.0f ms",
                static_cast<unsigned long long>(big.nnz()), ms);
  s << buf;
  return {ok, s.str()};
}

}  // namespace

int main() {
  report(1, "tANS golden vector", golden_tans);
  report(2, "dtANS toy golden vector", golden_dtans);
  report(3, "entropy numbers", entropy_numbers);
  report(4, "table-size constants", table_sizes);
  report(5, "quantizer oracle equivalence", quantizer_oracle);
  report(6, "full-pipeline roundtrip", roundtrip_property);
  report(7, "spmv bitwise oracle", spmv_oracle);
  report(8, "compression direction on SuiteSparse", corpus_direction);
  report(9, "small-matrix non-compression", small_matrices);
  report(10, "graph index entropy cells", graph_entropy_cells);
  report(11, "compression-rate bound", rate_bound);
  report(12, "desk-scale substitutes (determinism, coalescing, throughput)",
         desk_scale_substitutes);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
