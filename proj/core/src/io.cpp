#include "robsub/io.hpp"

#include "robsub/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace robsub {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << std::setprecision(17);
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

double parse_double(const std::string& tok, const std::string& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ": bad number '" + tok + "'");
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Matrix read_matrix_market(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  std::istringstream header(lower(line));
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix")
    throw IoError(path + ": missing Matrix Market banner");
  if (field == "complex") throw IoError(path + ": complex matrices are not supported");
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric" || symmetry == "skew-symmetric";
  const double skew = symmetry == "skew-symmetric" ? -1.0 : 1.0;

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream size_line(line);
  long long rows = 0, cols = 0, entries = 0;
  if (format == "coordinate") {
    if (!(size_line >> rows >> cols >> entries)) throw IoError(path + ": bad size line");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(entries) * (symmetric ? 2 : 1));
    for (long long t = 0; t < entries; ++t) {
      long long i = 0, j = 0;
      double v = 1.0;
      if (!(in >> i >> j)) throw IoError(path + ": truncated entry list");
      if (!pattern && !(in >> v)) throw IoError(path + ": truncated entry list");
      if (i < 1 || j < 1 || i > rows || j > cols) throw IoError(path + ": index out of range");
      if (!std::isfinite(v)) throw IoError(path + ": non-finite entry");
      trip.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
      if (symmetric && i != j) trip.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), skew * v);
    }
    SparseMatrix m(rows, cols);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return Matrix(std::move(m));
  }
  if (format == "array") {
    if (!(size_line >> rows >> cols)) throw IoError(path + ": bad size line");
    DenseMatrix m = DenseMatrix::Zero(rows, cols);
    for (long long j = 0; j < cols; ++j) {
      for (long long i = symmetric ? j : 0; i < rows; ++i) {
        double v = 0.0;
        if (!(in >> v)) throw IoError(path + ": truncated array");
        if (!std::isfinite(v)) throw IoError(path + ": non-finite entry");
        m(i, j) = v;
        if (symmetric && i != j) m(j, i) = skew * v;
      }
    }
    return Matrix(std::move(m));
  }
  throw IoError(path + ": unknown Matrix Market format '" + format + "'");
}

void write_matrix_market(const std::string& path, const Matrix& m) {
  auto out = open_out(path);
  if (m.is_sparse()) {
    const SparseMatrix& s = m.sparse();
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << s.rows() << ' ' << s.cols() << ' ' << s.nonZeros() << '\n';
    for (Index i = 0; i < s.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(s, i); it; ++it)
        out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  } else {
    const DenseMatrix& d = m.dense();
    out << "%%MatrixMarket matrix array real general\n";
    out << d.rows() << ' ' << d.cols() << '\n';
    for (Index j = 0; j < d.cols(); ++j)
      for (Index i = 0; i < d.rows(); ++i) out << d(i, j) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

Matrix read_csv_matrix(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    for (const auto& tok : split_csv(line)) row.push_back(parse_double(tok, path));
    if (!rows.empty() && row.size() != rows.front().size()) throw IoError(path + ": ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": no data");
  DenseMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return Matrix(std::move(m));
}

void write_csv_matrix(const std::string& path, const DenseMatrix& m) {
  auto out = open_out(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

Matrix read_matrix(const std::string& path) {
  const std::string l = lower(path);
  if (l.size() >= 4 && l.compare(l.size() - 4, 4, ".mtx") == 0) return read_matrix_market(path);
  return read_csv_matrix(path);
}

Vector read_vector_csv(const std::string& path) {
  const Matrix m = read_csv_matrix(path);
  const DenseMatrix& d = m.dense();
  if (d.cols() != 1 && d.rows() != 1) throw IoError(path + ": expected a single column");
  return d.cols() == 1 ? Vector(d.col(0)) : Vector(d.row(0).transpose());
}

WeightVector read_weights_csv(const std::string& path) { return WeightVector(read_vector_csv(path)); }

Adjacency read_edge_list(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::pair<Index, Index>> edges;
  Index n = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    long long u = 0, v = 0;
    if (!(ls >> u)) continue;
    if (!(ls >> v) || u < 0 || v < 0)
      throw IoError(path + ":" + std::to_string(lineno) + ": expected two 0-based vertex ids");
    edges.emplace_back(u, v);
    n = std::max<Index>(n, std::max<Index>(u, v) + 1);
  }
  if (edges.empty()) throw IoError(path + ": no edges");
  return graph_from_edges(n, edges);
}

}  // namespace robsub
