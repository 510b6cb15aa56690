#include "hcrom/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "hcrom/errors.hpp"

namespace hcrom {

namespace fs = std::filesystem;

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  out.precision(17);
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path.string());
  return in;
}

double parse_double(const std::string& tok) {
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  if (used != tok.size()) throw ConfigError("malformed number '" + tok + "'");
  return v;
}

}  // namespace

void write_field(const fs::path& path, const StructuredMesh& mesh, const Field& u) {
  std::ofstream out = open_out(path);
  out << "# hcrom field cells_per_side=" << mesh.cells_per_side << " dofs=" << u.size() << "\n";
  for (Eigen::Index i = 0; i < u.size(); ++i) out << fmt(u[i]) << "\n";
}

Field read_field(const fs::path& path, int expect_cells) {
  std::ifstream in = open_in(path);
  std::string header;
  std::getline(in, header);
  int cells = -1;
  long dofs = -1;
  if (std::sscanf(header.c_str(), "# hcrom field cells_per_side=%d dofs=%ld", &cells, &dofs) != 2)
    throw ConfigError("not a field file: " + path.string());
  if (expect_cells >= 0 && cells != expect_cells)
    throw ConfigError("field file " + path.string() + " was written at cells_per_side=" +
                      std::to_string(cells) + ", expected " + std::to_string(expect_cells));
  Field u(dofs);
  std::string tok;
  for (long i = 0; i < dofs; ++i) {
    if (!(in >> tok)) throw ConfigError("truncated field file: " + path.string());
    u[i] = parse_double(tok);
  }
  return u;
}

void write_vector(const fs::path& path, const Eigen::VectorXd& v) {
  std::ofstream out = open_out(path);
  out << "# hcrom vector n=" << v.size() << "\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << fmt(v[i]) << "\n";
}

Eigen::VectorXd read_vector(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string header;
  std::getline(in, header);
  long n = -1;
  if (std::sscanf(header.c_str(), "# hcrom vector n=%ld", &n) != 1)
    throw ConfigError("not a vector file: " + path.string());
  Eigen::VectorXd v(n);
  std::string tok;
  for (long i = 0; i < n; ++i) {
    if (!(in >> tok)) throw ConfigError("truncated vector file: " + path.string());
    v[i] = parse_double(tok);
  }
  return v;
}

void write_dense(const fs::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out = open_out(path);
  out << "# hcrom matrix rows=" << m.rows() << " cols=" << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << fmt(m(i, j));
    out << "\n";
  }
}

Eigen::MatrixXd read_dense(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string header;
  std::getline(in, header);
  long rows = -1, cols = -1;
  if (std::sscanf(header.c_str(), "# hcrom matrix rows=%ld cols=%ld", &rows, &cols) != 2)
    throw ConfigError("not a matrix file: " + path.string());
  Eigen::MatrixXd m(rows, cols);
  std::string tok;
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) {
      if (!(in >> tok)) throw ConfigError("truncated matrix file: " + path.string());
      m(i, j) = parse_double(tok);
    }
  return m;
}

void write_sparse(const fs::path& path, const SparseMat& m) {
  std::ofstream out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMat::InnerIterator it(m, k); it; ++it)
      out << it.row() + 1 << " " << it.col() + 1 << " " << fmt(it.value()) << "\n";
}

void export_system(const fs::path& dir, const FemSystem& sys) {
  fs::create_directories(dir);
  for (int j = 0; j < sys.d(); ++j)
    write_sparse(dir / ("A_" + std::to_string(j) + ".mtx"), sys.A[j]);
  write_sparse(dir / "S.mtx", sys.S);
  write_vector(dir / "F.txt", sys.F);
}

CsvWriter::CsvWriter(const fs::path& path) : out_(path) {
  if (!out_) throw ConfigError("cannot open for writing: " + path.string());
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

void save_basis_archive(const fs::path& dir, const ReducedBasis& rb,
                        const std::string& meta_json) {
  fs::create_directories(dir);
  {
    CsvWriter csv(dir / "snapshots.csv");
    csv.row({"index", "parameter"});
    for (std::size_t i = 0; i < rb.sorted.size(); ++i)
      csv.row({std::to_string(i), "\"" + rb.sorted[i].y.to_string() + "\""});
  }
  {
    CsvWriter csv(dir / "selection.csv");
    csv.row({"rank", "parameter"});
    for (std::size_t i = 0; i < rb.picked.size(); ++i)
      csv.row({std::to_string(i), "\"" + rb.picked[i].y.to_string() + "\""});
  }
  write_dense(dir / "Q.txt", rb.Q);
  write_dense(dir / "R.txt", rb.R);
  for (std::size_t j = 0; j < rb.A_hat.size(); ++j)
    write_dense(dir / ("A_hat_" + std::to_string(j) + ".txt"), rb.A_hat[j]);
  write_vector(dir / "F_hat.txt", rb.F_hat);
  write_dense(dir / "S_hat.txt", rb.S_hat);
  std::ofstream meta = open_out(dir / "meta.json");
  meta << meta_json << "\n";
}

namespace {

std::vector<ParamVector> read_param_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<ParamVector> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t a = line.find('"');
    const std::size_t b = line.rfind('"');
    if (a == std::string::npos || b <= a)
      throw ConfigError("malformed parameter row in " + path.string() + ": " + line);
    out.push_back(ParamVector::parse(line.substr(a + 1, b - a - 1)));
  }
  return out;
}

}  // namespace

ReducedBasis load_basis_archive(const fs::path& dir, const FemSystem& sys) {
  ReducedBasis rb;
  const std::vector<ParamVector> sorted_params = read_param_csv(dir / "snapshots.csv");
  const std::vector<ParamVector> picked_params = read_param_csv(dir / "selection.csv");
  rb.Q = read_dense(dir / "Q.txt");
  rb.R = read_dense(dir / "R.txt");
  if (rb.Q.rows() != sys.dim())
    throw ConfigError("basis archive " + dir.string() + " was built for a different mesh (" +
                      std::to_string(rb.Q.rows()) + " DOFs vs " + std::to_string(sys.dim()) + ")");
  rb.A_hat.resize(sys.d());
  for (int j = 0; j < sys.d(); ++j)
    rb.A_hat[j] = read_dense(dir / ("A_hat_" + std::to_string(j) + ".txt"));
  rb.F_hat = read_vector(dir / "F_hat.txt");
  rb.S_hat = read_dense(dir / "S_hat.txt");

  const Eigen::MatrixXd fields = rb.Q * rb.R;
  for (std::size_t i = 0; i < sorted_params.size(); ++i)
    rb.sorted.push_back({sorted_params[i], fields.col(i)});
  for (const ParamVector& y : picked_params) {
    const auto it = std::find_if(rb.sorted.begin(), rb.sorted.end(),
                                 [&](const Snapshot& s) { return s.y == y; });
    if (it == rb.sorted.end())
      throw ConfigError("basis archive " + dir.string() + ": selection entry missing from snapshots");
    rb.picked.push_back(*it);
  }
  return rb;
}

std::string load_basis_meta(const fs::path& dir) {
  std::ifstream in = open_in(dir / "meta.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hcrom
