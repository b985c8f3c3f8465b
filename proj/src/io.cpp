#include "rgs/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "rgs/sketch.hpp"

namespace rgs {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

double parse_double(const std::string& tok, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw ParseError(std::string("bad ") + what + " '" + tok + "'");
  return v;
}

long long parse_int(const std::string& tok, const char* what) {
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw ParseError(std::string("bad ") + what + " '" + tok + "'");
  return v;
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market file");
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw ParseError("unsupported object '" + object + "'");
  if (format != "coordinate") throw ParseError("unsupported format '" + format + "'");
  if (field == "pattern" || field == "complex")
    throw ParseError("unsupported field '" + field + "'");
  if (field != "real" && field != "integer" && field != "double")
    throw ParseError("unknown field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("unsupported symmetry '" + symmetry + "'");
  const bool sym = symmetry == "symmetric";

  do {
    if (!std::getline(in, line)) throw ParseError("missing size line");
  } while (line.empty() || line[0] == '%');
  std::istringstream ss(line);
  std::string a, b, c;
  if (!(ss >> a >> b >> c)) throw ParseError("malformed size line");
  const long long rows = parse_int(a, "row count"), cols = parse_int(b, "column count"),
                  nnz = parse_int(c, "entry count");
  if (rows < 0 || cols < 0 || nnz < 0) throw ParseError("negative sizes");
  if (rows != cols) throw ParseError("only square matrices are supported");

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(sym ? 2 * nnz : nnz));
  long long read = 0;
  while (read < nnz && std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream es(line);
    std::string si, sj, sv;
    if (!(es >> si >> sj >> sv)) throw ParseError("malformed entry line '" + line + "'");
    const long long i = parse_int(si, "row index"), j = parse_int(sj, "column index");
    const double v = parse_double(sv, "value");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw ParseError("index (" + si + "," + sj + ") out of bounds");
    t.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
    if (sym && i != j) t.push_back({static_cast<Index>(j - 1), static_cast<Index>(i - 1), v});
    ++read;
  }
  if (read != nnz) throw ParseError("file ended after " + std::to_string(read) + " of " +
                                    std::to_string(nnz) + " entries");
  return SparseMatrix::from_triplets(static_cast<Index>(rows), std::move(t), sym);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

void write_matrix_market(const SparseMatrix& A, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.n() << ' ' << A.n() << ' ' << A.nnz() << '\n';
  char buf[64];
  for (const auto& t : A.triplets()) {
    std::snprintf(buf, sizeof buf, "%.17g", t.value);
    out << (t.row + 1) << ' ' << (t.col + 1) << ' ' << buf << '\n';
  }
  if (!out) throw IoError("write failed");
}

void write_matrix_market(const SparseMatrix& A, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_matrix_market(A, out);
}

double synthetic_function(double mu, double x) {
  return std::sin(10.0 * (mu + x)) / (std::cos(100.0 * (mu - x)) + 1.1);
}

double synthetic_entry(Index n, Index m, Index i, Index j) {
  const double x = static_cast<double>(i) / static_cast<double>(n - 1);
  const double mu = static_cast<double>(j) / static_cast<double>(m - 1);
  return synthetic_function(mu, x);
}

Eigen::MatrixXd synthetic_matrix(Index n, Index m) {
  if (n < 2 || m < 2) throw InvalidArgument("synthetic_matrix needs n, m >= 2");
  Eigen::MatrixXd W(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) W(i, j) = synthetic_entry(n, m, i, j);
  return W;
}

ColumnSource synthetic_columns(Index n, Index m) {
  if (n < 2 || m < 2) throw InvalidArgument("synthetic_matrix needs n, m >= 2");
  return [n, m](Index j, std::span<double> out) {
    for (Index i = 0; i < n; ++i) out[i] = synthetic_entry(n, m, i, j);
  };
}

SparseMatrix laplacian_2d(Index grid) {
  if (grid < 1) throw InvalidArgument("laplacian grid must be >= 1");
  const Index n = grid * grid;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(5 * n));
  for (Index r = 0; r < grid; ++r)
    for (Index c = 0; c < grid; ++c) {
      const Index i = r * grid + c;
      if (r > 0) t.push_back({i, i - grid, -1.0});
      if (c > 0) t.push_back({i, i - 1, -1.0});
      t.push_back({i, i, 4.0});
      if (c + 1 < grid) t.push_back({i, i + 1, -1.0});
      if (r + 1 < grid) t.push_back({i, i + grid, -1.0});
    }
  return SparseMatrix::from_triplets(n, std::move(t));
}

SparseMatrix random_sparse(Index n, Index nnz_per_row, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("random_sparse: n must be >= 1");
  if (nnz_per_row < 0 || nnz_per_row > n - 1)
    throw InvalidArgument("random_sparse: nnz_per_row must lie in [0, n-1]");
  std::mt19937_64 eng(mix64(seed ^ 0x5BA25E00ULL));
  const double scale =
      nnz_per_row > 0 ? 0.5 / std::sqrt(static_cast<double>(nnz_per_row)) : 0.0;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n * (nnz_per_row + 1)));
  std::vector<Index> cols;
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, 1.0});
    cols.clear();
    while (static_cast<Index>(cols.size()) < nnz_per_row) {
      const auto c = static_cast<Index>(uniform_below(eng, static_cast<std::uint64_t>(n)));
      if (c == i || std::find(cols.begin(), cols.end(), c) != cols.end()) continue;
      cols.push_back(c);
      t.push_back({i, c, scale * (2.0 * uniform01(eng) - 1.0)});
    }
  }
  return SparseMatrix::from_triplets(n, std::move(t));
}

SparseMatrix load_sparse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string head(spec.substr(0, colon));
  if (colon != std::string_view::npos && (head == "laplacian" || head == "randsparse")) {
    std::vector<long long> args;
    std::string rest(spec.substr(colon + 1));
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) args.push_back(parse_int(tok, "matrix parameter"));
    if (head == "laplacian") {
      if (args.size() != 1) throw InvalidArgument("laplacian:SIZE takes one parameter");
      return laplacian_2d(static_cast<Index>(args[0]));
    }
    if (args.empty() || args.size() > 3)
      throw InvalidArgument("randsparse:N[,NNZ[,SEED]] takes one to three parameters");
    const Index nnz = args.size() > 1 ? static_cast<Index>(args[1]) : 5;
    const auto seed = args.size() > 2 ? static_cast<std::uint64_t>(args[2]) : 1ULL;
    return random_sparse(static_cast<Index>(args[0]), nnz, seed);
  }
  return read_matrix_market(std::filesystem::path(std::string(spec)));
}

// -------------------------------------------------------------------- report

ReportRow ReportRow::from(const IterationRecord& r) {
  ReportRow row;
  row.iteration = r.iteration;
  row.cond_q = r.cond_q;
  row.cond_s = r.cond_s;
  row.loss_of_orthogonality = r.loss_of_orthogonality;
  row.factorization_error = r.factorization_error;
  row.omega = r.omega;
  row.omega_bar = r.omega_bar;
  row.cert_margin = r.cert_margin;
  return row;
}

void ExperimentReport::set(const std::string& key, const std::string& value) {
  if (key.empty() || key.find_first_of("=\n\r") != std::string::npos)
    throw InvalidArgument("bad metadata key '" + key + "'");
  if (value.find_first_of("\n\r") != std::string::npos)
    throw InvalidArgument("metadata values must be single-line");
  for (auto& kv : metadata)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  metadata.emplace_back(key, value);
}

const std::string* ExperimentReport::get(const std::string& key) const {
  for (const auto& kv : metadata)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_report(const ExperimentReport& r, std::ostream& out) {
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    if (r.rows[i].iteration <= r.rows[i - 1].iteration)
      throw InvalidArgument("report iterations must be strictly increasing");
  for (const auto& kv : r.metadata) out << "# " << kv.first << '=' << kv.second << '\n';
  bool first = true;
  for (const char* c : kReportColumns) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << '\n';
  for (const auto& row : r.rows) {
    out << row.iteration;
    for (double v : {row.cond_q, row.cond_s, row.cond_w, row.loss_of_orthogonality,
                     row.factorization_error, row.omega, row.omega_bar, row.cert_margin,
                     row.residual_norm})
      out << ',' << format_number(v);
    out << '\n';
  }
  if (!out) throw IoError("report write failed");
}

void write_report(const ExperimentReport& r, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_report(r, out);
}

ExperimentReport read_report(std::istream& in) {
  ExperimentReport r;
  std::string line;
  bool header = false;
  constexpr std::size_t ncol = std::size(kReportColumns);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("metadata line without '='");
      r.metadata.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (!header) {
      if (f.size() != ncol) throw ParseError("unexpected report header");
      for (std::size_t i = 0; i < ncol; ++i)
        if (f[i] != kReportColumns[i]) throw ParseError("unexpected column '" + f[i] + "'");
      header = true;
      continue;
    }
    if (f.size() != ncol) throw ParseError("report row has the wrong field count");
    ReportRow row;
    row.iteration = static_cast<Index>(parse_int(f[0], "iteration"));
    double* dst[] = {&row.cond_q, &row.cond_s, &row.cond_w, &row.loss_of_orthogonality,
                     &row.factorization_error, &row.omega, &row.omega_bar, &row.cert_margin,
                     &row.residual_norm};
    for (std::size_t i = 1; i < ncol; ++i)
      *dst[i - 1] = f[i].empty() ? kMissing : parse_double(f[i], "number");
    r.rows.push_back(row);
  }
  if (!header) throw ParseError("report has no header");
  return r;
}

ExperimentReport read_report(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_report(in);
}

}  // namespace rgs
