#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "csrdtans/matrix_market.hpp"
#include "oracles.hpp"

using namespace csrdtans;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const char* env = std::getenv("CSRDTANS_TEST_TMP");
  fs::path dir = fs::path(env ? env : fs::temp_directory_path().string()) / "cli_scratch";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = (scratch_dir() / name).string();
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "csrdtans");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

// One nonzero per row at a random column with a value from a small pool.
CsrMatrix<double> one_per_row(uint32_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  CsrMatrix<double> m;
  m.rows = m.cols = n;
  for (uint32_t r = 0; r < n; ++r) {
    m.col_idx.push_back(static_cast<uint32_t>(rng() % n));
    m.values.push_back(static_cast<double>(1 + rng() % 4));
    m.row_start.push_back(r + 1);
  }
  return m;
}

CsrMatrix<double> banded(uint32_t n, uint32_t half_width) {
  CsrMatrix<double> m;
  m.rows = m.cols = n;
  for (uint32_t r = 0; r < n; ++r) {
    const uint32_t lo = r > half_width ? r - half_width : 0;
    const uint32_t hi = std::min(n - 1, r + half_width);
    for (uint32_t c = lo; c <= hi; ++c) {
      m.col_idx.push_back(c);
      m.values.push_back(c == r ? 4.0 : -1.0);
    }
    m.row_start.push_back(m.col_idx.size());
  }
  return m;
}

}  // namespace

TEST_CASE("encode, verify and spmv on the example matrix") {
  const auto mtx = write_file("example.mtx", oracle::example_mtx());
  const auto cdta = (scratch_dir() / "example.cdta").string();

  auto enc = run_cli({"encode", mtx, cdta});
  CHECK(enc.code == 0);
  auto lines = lines_of(enc.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == cli::stats_csv_header());
  CHECK(lines[1].find("example.mtx,4,4,6,") == 0);

  CHECK(run_cli({"verify", mtx, cdta}).code == 0);

  auto y = run_cli({"spmv", cdta, "--x", "ones"});
  CHECK(y.code == 0);
  CHECK(lines_of(y.out) == std::vector<std::string>{"12", "5", "4", "1"});
  CHECK(run_cli({"spmv", cdta, "--x", "random:3", "--y", "random:4", "--check"}).code == 0);

  auto json = run_cli({"encode", mtx, cdta, "--format", "json"});
  CHECK(json.code == 0);
  auto j = nlohmann::json::parse(json.out);
  CHECK(j["nnz"] == 6);
}

TEST_CASE("exit codes for bad inputs") {
  const auto mtx = write_file("example2.mtx", oracle::example_mtx());
  const auto cdta = (scratch_dir() / "example2.cdta").string();
  REQUIRE(run_cli({"encode", mtx, cdta}).code == 0);

  const auto complex_mtx = write_file(
      "complex.mtx", "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n");
  CHECK(run_cli({"encode", complex_mtx, cdta + ".x"}).code == 1);
  CHECK(run_cli({"encode", (scratch_dir() / "missing.mtx").string(), cdta + ".x"}).code == 1);
  CHECK(run_cli({"encode", mtx, (scratch_dir() / "no_dir" / "out.cdta").string()}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK(run_cli({"encode", mtx, cdta + ".y", "--precision", "16"}).code == 1);

  // Truncated container: checksum or truncation error, never success.
  std::ifstream in(cdta, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto cut = write_file("cut.cdta", bytes.substr(0, bytes.size() - 1));
  auto v = run_cli({"verify", mtx, cut});
  CHECK(v.code != 0);
  CHECK_FALSE(v.err.empty());

  // Container of a different matrix.
  auto other = oracle::example_matrix();
  other.values[2] = 9;
  const auto other_mtx = write_file("other.mtx", write_mtx(other));
  CHECK(run_cli({"verify", other_mtx, cdta}).code == 3);

  CHECK(run_cli({"spmv", cdta, "--x", "file:" + write_file("x3.txt", "1 2 3\n")}).code == 2);
  CHECK(run_cli({"spmv", cdta, "--x", "random:abc"}).code == 1);
}

TEST_CASE("spmv check on a random matrix and timing output") {
  std::mt19937_64 rng(31);
  auto m = oracle::random_matrix<double>(rng, 200, 5000);
  const auto mtx = write_file("random.mtx", write_mtx(m));
  const auto cdta = (scratch_dir() / "random.cdta").string();
  REQUIRE(run_cli({"encode", mtx, cdta, "--threads", "2"}).code == 0);
  CHECK(run_cli({"spmv", cdta, "--x", "random:9", "--check", "--mtx", mtx}).code == 0);

  auto t = run_cli({"spmv", cdta, "--repeat", "3"});
  CHECK(t.code == 0);
  auto lines = lines_of(t.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "rows,cols,nnz,threads,repeats,median_ns,min_ns,max_ns");

  REQUIRE(run_cli({"encode", mtx, cdta + "32", "--precision", "32"}).code == 0);
  CHECK(run_cli({"verify", mtx, cdta + "32"}).code == 0);
  CHECK(run_cli({"spmv", cdta + "32", "--x", "random:2", "--check"}).code == 0);
}

TEST_CASE("identical invocations give identical outputs") {
  const auto mtx = write_file("det.mtx", oracle::example_mtx());
  auto a = run_cli({"stats", mtx});
  auto b = run_cli({"stats", mtx, "--threads", "3"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto g1 = run_cli({"graph-entropy", "--models", "er,ba", "--degrees", "5", "--nodes", "500"});
  auto g2 = run_cli({"graph-entropy", "--models", "er,ba", "--degrees", "5", "--nodes", "500"});
  CHECK(g1.code == 0);
  CHECK(g1.out == g2.out);
}

TEST_CASE("stats ratio matches an independent recomputation") {
  std::mt19937_64 rng(32);
  auto m = oracle::random_matrix<double>(rng, 256, 10000);
  for (Precision p : {Precision::kSingle, Precision::kDouble}) {
    auto r = cli::compute_stats("m", m, p, {});
    const uint64_t vw = value_width(p);
    const uint64_t coo = m.nnz() * (8 + vw);
    const uint64_t csr = m.nnz() * (4 + vw) + 4 * (uint64_t{m.rows} + 1);
    const uint64_t slices = (m.rows + 31) / 32;
    uint64_t cells = 0;
    for (uint64_t s = 0; s < slices; ++s) {
      uint64_t width = 0;
      for (uint32_t r2 = s * 32; r2 < std::min<uint64_t>(m.rows, s * 32 + 32); ++r2) {
        width = std::max(width, m.row_length(r2));
      }
      cells += 32 * width;
    }
    const uint64_t sell = cells * (4 + vw) + 4 * (slices + 1);
    CHECK(r.coo_bytes == coo);
    CHECK(r.csr_bytes == csr);
    CHECK(r.sell_bytes == sell);
    const uint64_t best = std::min({coo, csr, sell});
    CHECK(r.ratio == doctest::Approx(double(r.dtans_bytes) / best));
    CHECK(r.annzpr == doctest::Approx(double(m.nnz()) / m.rows));
  }
}

TEST_CASE("stats directions on synthetic matrices") {
  // Small matrices cannot amortize the tables.
  auto small = cli::compute_stats("small", oracle::example_matrix(), Precision::kDouble, {});
  CHECK(small.ratio > 1);

  // A wide band with few distinct values compresses well.
  auto band = banded(4000, 8);
  REQUIRE(band.nnz() >= (1u << 15));
  auto br = cli::compute_stats("band", band, Precision::kDouble, {});
  CHECK(br.ratio < 1);

  // One nonzero per row pays for the row count and a whole segment.
  auto one = cli::compute_stats("one", one_per_row(1 << 18, 5), Precision::kSingle, {});
  MESSAGE("one nonzero per row, 32-bit: ratio " << one.ratio);
  CHECK(one.ratio >= 1.5);
  CHECK(one.ratio <= 2.5);
}

TEST_CASE("graph entropy output") {
  auto g = run_cli({"graph-entropy", "--models", "er", "--degrees", "10", "--nodes", "10000",
                    "--seeds", "3"});
  REQUIRE(g.code == 0);
  auto lines = lines_of(g.out);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "model,n,target_degree,seed,raw_entropy_bits,delta_entropy_bits,ratio");
  const auto& median = lines[4];
  CHECK(median.find(",median,") != std::string::npos);
  const double ratio = std::stod(median.substr(median.rfind(',') + 1));
  CHECK(ratio < 1);

  auto ws = run_cli({"graph-entropy", "--models", "ws", "--degrees", "10", "--nodes", "2000",
                     "--rewire", "0", "--seeds", "1"});
  REQUIRE(ws.code == 0);
  const auto last = lines_of(ws.out).back();
  CHECK(std::stod(last.substr(last.rfind(',') + 1)) < 0.5);

  CHECK(run_cli({"graph-entropy", "--models", "ba", "--degrees", "20", "--nodes", "5"}).code != 0);
  CHECK(run_cli({"graph-entropy", "--models", "lattice"}).code == 1);
}
