#include "istiefel/mtx_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace istiefel {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

Matrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MtxError("empty Matrix Market stream");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw MtxError("missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw MtxError("unsupported object '" + object + "'");
  if (field != "real" && field != "integer" && field != "double" && field != "pattern") {
    throw MtxError("unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw MtxError("unsupported symmetry '" + symmetry + "'");
  }
  const bool symmetric = symmetry == "symmetric";

  if (!next_data_line(in, line)) throw MtxError("missing size line");
  std::istringstream size_line(line);

  if (format == "array") {
    if (field == "pattern") throw MtxError("pattern field is invalid for array format");
    Index rows = 0, cols = 0;
    if (!(size_line >> rows >> cols) || rows < 0 || cols < 0) throw MtxError("bad size line");
    if (symmetric && rows != cols) throw MtxError("symmetric matrix must be square");
    Matrix m = Matrix::Zero(rows, cols);
    // column-major; symmetric stores the lower triangle column by column
    for (Index j = 0; j < cols; ++j) {
      for (Index i = symmetric ? j : 0; i < rows; ++i) {
        double v = 0.0;
        if (!(in >> v)) throw MtxError("truncated array data");
        m(i, j) = v;
        if (symmetric) m(j, i) = v;
      }
    }
    return m;
  }

  if (format == "coordinate") {
    Index rows = 0, cols = 0, nnz = 0;
    if (!(size_line >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
      throw MtxError("bad size line");
    }
    if (symmetric && rows != cols) throw MtxError("symmetric matrix must be square");
    Matrix m = Matrix::Zero(rows, cols);
    for (Index e = 0; e < nnz; ++e) {
      if (!next_data_line(in, line)) throw MtxError("truncated coordinate data");
      std::istringstream entry(line);
      Index i = 0, j = 0;
      double v = 1.0;
      if (!(entry >> i >> j)) throw MtxError("bad coordinate entry: " + line);
      if (field != "pattern" && !(entry >> v)) throw MtxError("missing value: " + line);
      if (i < 1 || i > rows || j < 1 || j > cols) throw MtxError("index out of range: " + line);
      m(i - 1, j - 1) += v;
      if (symmetric && i != j) m(j - 1, i - 1) += v;
    }
    return m;
  }

  throw MtxError("unsupported format '" + format + "'");
}

Matrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MtxError("cannot open " + path.string());
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const Matrix& m, MtxLayout layout, bool symmetric) {
  if (symmetric && (m.rows() != m.cols() || (m - m.transpose()).norm() != 0.0)) {
    throw MtxError("write_matrix_market: matrix is not exactly symmetric");
  }
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  const char* sym_tag = symmetric ? "symmetric" : "general";
  if (layout == MtxLayout::array) {
    out << "%%MatrixMarket matrix array real " << sym_tag << '\n';
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = symmetric ? j : 0; i < m.rows(); ++i) out << m(i, j) << '\n';
    }
  } else {
    Index nnz = 0;
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = symmetric ? j : 0; i < m.rows(); ++i) nnz += m(i, j) != 0.0;
    }
    out << "%%MatrixMarket matrix coordinate real " << sym_tag << '\n';
    out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = symmetric ? j : 0; i < m.rows(); ++i) {
        if (m(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << m(i, j) << '\n';
      }
    }
  }
  out.precision(old_precision);
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& m, MtxLayout layout,
                         bool symmetric) {
  std::ofstream out(path);
  if (!out) throw MtxError("cannot write " + path.string());
  write_matrix_market(out, m, layout, symmetric);
}

}  // namespace istiefel
