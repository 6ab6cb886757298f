#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "csrdtans/errors.hpp"
#include "csrdtans/graph_gen.hpp"
#include "csrdtans/matrix_market.hpp"

namespace csrdtans::cli {

namespace {

// Failure that maps to a specific exit code.
struct Failure {
  int code;
  std::string message;
};

std::string basename_of(const std::string& path) {
  const size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

CsrMatrix<double> load_matrix(const std::string& path) {
  try {
    return coo_to_csr(read_mtx(path));
  } catch (const std::exception& e) {
    throw Failure{kInputError, path + ": " + e.what()};
  }
}

uint32_t log2_exact(uint32_t v, const char* what) {
  if (v == 0 || (v & (v - 1)) != 0) {
    throw Failure{kInputError, std::string(what) + " must be a power of two"};
  }
  uint32_t b = 0;
  while ((1u << b) < v) ++b;
  return b;
}

Precision parse_precision(int bits) {
  if (bits == 32) return Precision::kSingle;
  if (bits == 64) return Precision::kDouble;
  throw Failure{kInputError, "precision must be 32 or 64"};
}

std::string format_double(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

CsrDtansContainer encode_with(const CsrMatrix<double>& m, Precision precision,
                              const EncodeOptions& options,
                              EncodeDiagnostics* diag) {
  if (precision == Precision::kSingle) {
    return encode_matrix(convert_values<float>(m), options, diag);
  }
  return encode_matrix(m, options, diag);
}

uint64_t median_of(std::vector<uint64_t> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct EncodeFlags {
  int precision = 64;
  uint32_t k = 4096;
  uint32_t m = 256;
  uint64_t seed = kDefaultPermutationSeed;
  bool no_permute = false;
  unsigned threads = 0;
  std::string format = "csv";

  void add_to(CLI::App* app) {
    app->add_option("--precision", precision, "Value precision in bits (32 or 64)")
        ->check(CLI::IsMember({32, 64}));
    app->add_option("--k", k, "Table size K (power of two)");
    app->add_option("--m", m, "Multiplicity cap M (power of two, <= 256)");
    app->add_option("--seed", seed, "Slot permutation seed");
    app->add_flag("--no-permute", no_permute, "Keep symbol slots consecutive");
    app->add_option("--threads", threads,
                    "Worker threads (default: CSRDTANS_THREADS or all cores)");
    app->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  EncodeOptions options() const {
    EncodeOptions o;
    o.params.slot_bits = log2_exact(k, "--k");
    o.params.multiplicity_bits = log2_exact(m, "--m");
    o.permute_slots = !no_permute;
    o.permutation_seed = seed;
    o.threads = threads;
    return o;
  }
};

void print_report(const StatsReport& r, const std::string& format,
                  std::ostream& out) {
  if (format == "json") {
    out << stats_json(r).dump(2) << "\n";
  } else {
    out << stats_csv_header() << "\n" << stats_csv_row(r) << "\n";
  }
}

StatsReport report_from(const std::string& id, const CsrMatrix<double>& m,
                        const CsrDtansContainer& c,
                        const EncodeDiagnostics& diag) {
  StatsReport r;
  r.matrix = id;
  r.rows = m.rows;
  r.cols = m.cols;
  r.nnz = m.nnz();
  r.annzpr = m.rows ? static_cast<double>(m.nnz()) / m.rows : 0.0;
  const uint32_t vw = value_width(c.precision);
  r.precision_bits = 8 * vw;
  r.coo_bytes = format_size_bytes(m, SparseFormat::kCoo, vw);
  r.csr_bytes = format_size_bytes(m, SparseFormat::kCsr, vw);
  r.sell_bytes = format_size_bytes(m, SparseFormat::kSell, vw);
  r.dtans_bytes = size_bytes(c);
  r.best_baseline_bytes = std::min({r.coo_bytes, r.csr_bytes, r.sell_bytes});
  r.ratio = static_cast<double>(r.dtans_bytes) / r.best_baseline_bytes;
  r.delta_entropy = entropy(diag.delta_distribution);
  r.delta_cross_entropy =
      cross_entropy(diag.delta_distribution, diag.delta_quantized);
  r.value_entropy = entropy(diag.value_distribution);
  r.value_cross_entropy =
      cross_entropy(diag.value_distribution, diag.value_quantized);
  r.delta_symbols = diag.delta_distribution.size();
  r.value_symbols = diag.value_distribution.size();
  r.escaped_deltas = diag.escaped_deltas;
  r.escaped_values = diag.escaped_values;
  return r;
}

std::vector<double> read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kInputError, "cannot open vector file " + path};
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    try {
      size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Failure{kInputError, path + ": not a number: " + tok};
    }
  }
  return v;
}

double uniform_pm1(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

std::vector<double> make_vector(const std::string& spec, size_t n,
                                const char* name) {
  std::vector<double> v;
  if (spec == "ones") {
    v.assign(n, 1.0);
  } else if (spec == "zeros") {
    v.assign(n, 0.0);
  } else if (spec.rfind("random:", 0) == 0) {
    uint64_t seed = 0;
    try {
      seed = std::stoull(spec.substr(7));
    } catch (const std::exception&) {
      throw Failure{kInputError, std::string(name) + ": bad seed in " + spec};
    }
    std::mt19937_64 rng(seed);
    v.resize(n);
    for (double& x : v) x = uniform_pm1(rng);
  } else {
    v = read_vector(spec.rfind("file:", 0) == 0 ? spec.substr(5) : spec);
  }
  if (v.size() != n) {
    throw Failure{kEncodeError, std::string(name) + " has length " +
                                    std::to_string(v.size()) + ", expected " +
                                    std::to_string(n)};
  }
  return v;
}

int cmd_encode(const std::string& input, const std::string& output,
               const EncodeFlags& flags, std::ostream& out) {
  const EncodeOptions options = flags.options();
  const Precision precision = parse_precision(flags.precision);
  const CsrMatrix<double> m = load_matrix(input);
  EncodeDiagnostics diag;
  CsrDtansContainer c;
  try {
    c = encode_with(m, precision, options, &diag);
    write_container(output, c);
  } catch (const std::exception& e) {
    throw Failure{kEncodeError, e.what()};
  }
  print_report(report_from(basename_of(input), m, c, diag), flags.format, out);
  return kOk;
}

template <class T>
bool first_difference(const CsrMatrix<T>& a, const CsrMatrix<T>& b,
                      uint64_t* row, uint64_t* pos) {
  const uint32_t rows = std::min(a.rows, b.rows);
  for (uint32_t r = 0; r < rows; ++r) {
    const uint64_t la = a.row_length(r), lb = b.row_length(r);
    for (uint64_t k = 0; k < std::max(la, lb); ++k) {
      if (k >= la || k >= lb ||
          a.col_idx[a.row_start[r] + k] != b.col_idx[b.row_start[r] + k] ||
          value_symbol(a.values[a.row_start[r] + k]) !=
              value_symbol(b.values[b.row_start[r] + k])) {
        *row = r;
        *pos = k;
        return true;
      }
    }
  }
  if (a.rows != b.rows || a.cols != b.cols) {
    *row = rows;
    *pos = 0;
    return true;
  }
  return false;
}

int cmd_verify(const std::string& input, const std::string& container,
               unsigned threads, std::ostream& out, std::ostream& err) {
  const CsrMatrix<double> m = load_matrix(input);
  CsrDtansContainer c;
  try {
    c = read_container(container);
  } catch (const ContainerError& e) {
    throw Failure{kInputError, container + ": " + e.what()};
  } catch (const std::exception& e) {
    throw Failure{kInputError, container + ": " + e.what()};
  }
  bool differ = false;
  uint64_t row = 0, pos = 0;
  try {
    if (c.precision == Precision::kSingle) {
      differ = first_difference(decode_matrix<float>(c, threads),
                                convert_values<float>(m), &row, &pos);
    } else {
      differ = first_difference(decode_matrix<double>(c, threads), m, &row, &pos);
    }
  } catch (const CorruptStreamError& e) {
    err << "error: " << container << ": " << e.what() << "\n";
    return kMismatch;
  }
  if (differ) {
    err << "mismatch: first difference at row " << row << ", position " << pos
        << "\n";
    return kMismatch;
  }
  out << "ok: " << m.rows << "x" << m.cols << ", " << m.nnz()
      << " nonzeros match\n";
  return kOk;
}

template <class T>
int spmv_typed(const CsrDtansContainer& c, const std::vector<double>& xd,
               const std::vector<double>& yd, bool check,
               const std::string& mtx, unsigned repeat, unsigned threads,
               const std::string& format, std::ostream& out,
               std::ostream& err) {
  const std::vector<T> x(xd.begin(), xd.end());
  const std::vector<T> y0(yd.begin(), yd.end());
  std::vector<T> y = y0;
  try {
    spmv<T>(c, x, y, threads);
  } catch (const std::exception& e) {
    throw Failure{kEncodeError, e.what()};
  }
  if (check) {
    CsrMatrix<T> ref_m = mtx.empty() ? decode_matrix<T>(c, threads)
                                     : convert_values<T>(load_matrix(mtx));
    std::vector<T> ref = y0;
    try {
      reference_spmv<T>(ref_m, x, ref);
    } catch (const std::exception& e) {
      throw Failure{kEncodeError, e.what()};
    }
    for (size_t i = 0; i < ref.size(); ++i) {
      if (value_symbol(ref[i]) != value_symbol(y[i])) {
        err << "check failed: row " << i << " differs from the reference\n";
        return kMismatch;
      }
    }
  }
  if (repeat == 0) {
    for (T v : y) out << format_double(v, sizeof(T) == 8 ? 17 : 9) << "\n";
    return kOk;
  }
  using clock = std::chrono::steady_clock;
  std::vector<uint64_t> times;
  for (unsigned i = 0; i <= repeat; ++i) {
    std::vector<T> yy = y0;
    const auto t0 = clock::now();
    spmv<T>(c, x, yy, threads);
    const auto t1 = clock::now();
    if (i > 0) {  // the first run is a warm-up
      times.push_back(static_cast<uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()));
    }
  }
  const uint64_t med = median_of(times);
  const uint64_t lo = *std::min_element(times.begin(), times.end());
  const uint64_t hi = *std::max_element(times.begin(), times.end());
  const unsigned used_threads = resolve_threads(threads);
  if (format == "json") {
    nlohmann::json j = {{"rows", c.rows},       {"cols", c.cols},
                        {"nnz", c.nnz},         {"threads", used_threads},
                        {"repeats", repeat},    {"median_ns", med},
                        {"min_ns", lo},         {"max_ns", hi}};
    out << j.dump(2) << "\n";
  } else {
    out << "rows,cols,nnz,threads,repeats,median_ns,min_ns,max_ns\n"
        << c.rows << "," << c.cols << "," << c.nnz << "," << used_threads << ","
        << repeat << "," << med << "," << lo << "," << hi << "\n";
  }
  return kOk;
}

int cmd_spmv(const std::string& container, const std::string& xspec,
             const std::string& yspec, bool check, const std::string& mtx,
             unsigned repeat, unsigned threads, const std::string& format,
             std::ostream& out, std::ostream& err) {
  CsrDtansContainer c;
  try {
    c = read_container(container);
  } catch (const std::exception& e) {
    throw Failure{kInputError, container + ": " + e.what()};
  }
  const auto x = make_vector(xspec, c.cols, "x");
  const auto y = make_vector(yspec, c.rows, "y");
  if (c.precision == Precision::kSingle) {
    return spmv_typed<float>(c, x, y, check, mtx, repeat, threads, format, out, err);
  }
  return spmv_typed<double>(c, x, y, check, mtx, repeat, threads, format, out, err);
}

int cmd_stats(const std::string& input, const EncodeFlags& flags,
              std::ostream& out) {
  const EncodeOptions options = flags.options();
  const Precision precision = parse_precision(flags.precision);
  const CsrMatrix<double> m = load_matrix(input);
  StatsReport r;
  try {
    r = compute_stats(basename_of(input), m, precision, options);
  } catch (const std::exception& e) {
    throw Failure{kEncodeError, e.what()};
  }
  print_report(r, flags.format, out);
  return kOk;
}

struct GraphFlags {
  std::vector<std::string> models{"er", "ws", "ba"};
  std::vector<double> degrees{5, 10, 20};
  std::vector<uint32_t> nodes{1000, 10000};
  unsigned seeds = 3;
  uint64_t seed_base = 0;
  double rewire = 0.1;
};

int cmd_graph_entropy(const GraphFlags& flags, std::ostream& out) {
  std::vector<GraphModel> models;
  for (const auto& name : flags.models) {
    try {
      models.push_back(parse_graph_model(name));
    } catch (const std::exception& e) {
      throw Failure{kInputError, e.what()};
    }
  }
  if (flags.seeds == 0) throw Failure{kInputError, "--seeds must be positive"};
  out << "model,n,target_degree,seed,raw_entropy_bits,delta_entropy_bits,ratio\n";
  for (GraphModel model : models) {
    for (uint32_t n : flags.nodes) {
      for (double degree : flags.degrees) {
        std::vector<double> raw, delta, ratio;
        const std::string prefix = graph_model_name(model) + "," +
                                   std::to_string(n) + "," +
                                   format_double(degree, 6) + ",";
        for (unsigned s = 0; s < flags.seeds; ++s) {
          GraphOptions g;
          g.model = model;
          g.nodes = n;
          g.avg_degree = degree;
          g.seed = flags.seed_base + s;
          g.rewire = flags.rewire;
          IndexEntropy e;
          try {
            e = index_entropy(gen_graph(g));
          } catch (const std::exception& ex) {
            throw Failure{kEncodeError, ex.what()};
          }
          raw.push_back(e.raw_bits);
          delta.push_back(e.delta_bits);
          ratio.push_back(e.ratio);
          out << prefix << g.seed << "," << format_double(e.raw_bits, 10) << ","
              << format_double(e.delta_bits, 10) << ","
              << format_double(e.ratio, 10) << "\n";
        }
        out << prefix << "median," << format_double(median_of(raw), 10) << ","
            << format_double(median_of(delta), 10) << ","
            << format_double(median_of(ratio), 10) << "\n";
      }
    }
  }
  return kOk;
}

}  // namespace

StatsReport compute_stats(const std::string& id, const CsrMatrix<double>& m,
                          Precision precision, const EncodeOptions& options) {
  EncodeDiagnostics diag;
  const CsrDtansContainer c = encode_with(m, precision, options, &diag);
  return report_from(id, m, c, diag);
}

std::string stats_csv_header() {
  return "matrix,rows,cols,nnz,annzpr,precision,coo_bytes,csr_bytes,"
         "sell_bytes,dtans_bytes,best_baseline_bytes,ratio,delta_entropy,"
         "delta_cross_entropy,value_entropy,value_cross_entropy,delta_symbols,"
         "value_symbols,escaped_deltas,escaped_values";
}

std::string stats_csv_row(const StatsReport& r) {
  std::ostringstream s;
  s << r.matrix << "," << r.rows << "," << r.cols << "," << r.nnz << ","
    << format_double(r.annzpr, 10) << "," << r.precision_bits << ","
    << r.coo_bytes << "," << r.csr_bytes << "," << r.sell_bytes << ","
    << r.dtans_bytes << "," << r.best_baseline_bytes << ","
    << format_double(r.ratio, 10) << "," << format_double(r.delta_entropy, 10)
    << "," << format_double(r.delta_cross_entropy, 10) << ","
    << format_double(r.value_entropy, 10) << ","
    << format_double(r.value_cross_entropy, 10) << "," << r.delta_symbols << ","
    << r.value_symbols << "," << r.escaped_deltas << "," << r.escaped_values;
  return s.str();
}

nlohmann::json stats_json(const StatsReport& r) {
  return {{"matrix", r.matrix},
          {"rows", r.rows},
          {"cols", r.cols},
          {"nnz", r.nnz},
          {"annzpr", r.annzpr},
          {"precision", r.precision_bits},
          {"coo_bytes", r.coo_bytes},
          {"csr_bytes", r.csr_bytes},
          {"sell_bytes", r.sell_bytes},
          {"dtans_bytes", r.dtans_bytes},
          {"best_baseline_bytes", r.best_baseline_bytes},
          {"ratio", r.ratio},
          {"delta_entropy", r.delta_entropy},
          {"delta_cross_entropy", r.delta_cross_entropy},
          {"value_entropy", r.value_entropy},
          {"value_cross_entropy", r.value_cross_entropy},
          {"delta_symbols", r.delta_symbols},
          {"value_symbols", r.value_symbols},
          {"escaped_deltas", r.escaped_deltas},
          {"escaped_values", r.escaped_values}};
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"CSR matrices compressed with a lockstep dtANS coder"};
  app.require_subcommand(1);

  std::string input, output, container;
  unsigned threads = 0;

  EncodeFlags enc;
  auto* encode = app.add_subcommand("encode", "Compress a .mtx file");
  encode->add_option("input", input, "MatrixMarket file")->required();
  encode->add_option("output", output, "Container file to write")->required();
  enc.add_to(encode);

  auto* verify = app.add_subcommand("verify", "Check a container against a .mtx");
  verify->add_option("input", input, "MatrixMarket file")->required();
  verify->add_option("container", container, "Container file")->required();
  verify->add_option("--threads", threads, "Worker threads");

  std::string xspec = "ones", yspec = "zeros", mtx, spmv_format = "csv";
  bool check = false;
  unsigned repeat = 0;
  auto* spmv_cmd = app.add_subcommand("spmv", "Compute y = A x + y from a container");
  spmv_cmd->add_option("container", container, "Container file")->required();
  spmv_cmd->add_option("--x", xspec, "ones | zeros | random:SEED | file:PATH");
  spmv_cmd->add_option("--y", yspec, "zeros | ones | random:SEED | file:PATH");
  spmv_cmd->add_flag("--check", check, "Compare bitwise with the reference kernel");
  spmv_cmd->add_option("--mtx", mtx, "Reference matrix for --check (default: decoded container)");
  spmv_cmd->add_option("--repeat", repeat, "Timed repetitions after one warm-up; prints timing CSV");
  spmv_cmd->add_option("--threads", threads, "Worker threads");
  spmv_cmd->add_option("--format", spmv_format, "Timing output format")
      ->check(CLI::IsMember({"csv", "json"}));

  EncodeFlags st;
  auto* stats = app.add_subcommand("stats", "Size and entropy report for a .mtx");
  stats->add_option("input", input, "MatrixMarket file")->required();
  st.add_to(stats);

  GraphFlags gf;
  auto* graph = app.add_subcommand("graph-entropy",
                                   "Column index entropy of random graphs");
  graph->add_option("--models", gf.models, "er, ws, ba")->delimiter(',');
  graph->add_option("--degrees", gf.degrees, "Target average degrees")->delimiter(',');
  graph->add_option("--nodes", gf.nodes, "Node counts")->delimiter(',');
  graph->add_option("--seeds", gf.seeds, "Seeds per cell");
  graph->add_option("--seed-base", gf.seed_base, "First seed");
  graph->add_option("--rewire", gf.rewire, "Watts-Strogatz rewiring probability");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  if (!argv.empty()) argv.pop_back();  // program name
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*encode) return cmd_encode(input, output, enc, out);
    if (*verify) return cmd_verify(input, container, threads, out, err);
    if (*spmv_cmd) {
      return cmd_spmv(container, xspec, yspec, check, mtx, repeat, threads,
                      spmv_format, out, err);
    }
    if (*stats) return cmd_stats(input, st, out);
    if (*graph) return cmd_graph_entropy(gf, out);
  } catch (const Failure& f) {
    err << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kEncodeError;
  }
  return kInputError;
}

}  // namespace csrdtans::cli
