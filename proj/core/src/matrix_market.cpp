#include "nepbe/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace nepbe {

MatrixMarketError::MatrixMarketError(const std::string& source, int line, int column,
                                     const std::string& msg)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + msg),
      line_(line),
      column_(column) {}

Coefficient MarketMatrix::coefficient() const {
  if (format == MarketFormat::coordinate) return Coefficient(sparse);
  return Coefficient(dense);
}

Matrix MarketMatrix::to_dense() const {
  if (format == MarketFormat::array) return dense;
  return Matrix(sparse);
}

namespace {

enum class Field { real, complex, integer, pattern };
enum class Symmetry { general, symmetric, skew, hermitian };

struct Token {
  std::string text;
  int column;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  [[noreturn]] void fail(int column, const std::string& msg) const {
    throw MatrixMarketError(source_, line_no_, column, msg);
  }

  // Next line that is neither blank nor a comment; false at end of input.
  bool next(std::vector<Token>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      tokens = tokenize(line);
      if (tokens.empty() || tokens[0].text[0] == '%') continue;
      return true;
    }
    return false;
  }

  bool header(std::vector<Token>& tokens) {
    std::string line;
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens = tokenize(line);
    return true;
  }

  double number(const Token& t) const {
    double v = 0.0;
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) fail(t.column, "expected a number, got '" + t.text + "'");
    return v;
  }

  long long integer(const Token& t) const {
    long long v = 0;
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) fail(t.column, "expected an integer, got '" + t.text + "'");
    return v;
  }

  int line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string source_;
  int line_no_ = 0;
};

Scalar mirror(Scalar v, Symmetry s) {
  switch (s) {
    case Symmetry::skew: return -v;
    case Symmetry::hermitian: return std::conj(v);
    default: return v;
  }
}

}  // namespace

MarketMatrix read_matrix_market(std::istream& in, const std::string& source) {
  Reader rd(in, source);
  std::vector<Token> tok;
  if (!rd.header(tok)) rd.fail(1, "empty input");
  if (tok.empty() || lower(tok[0].text) != "%%matrixmarket") {
    rd.fail(1, "missing %%MatrixMarket banner");
  }
  if (tok.size() != 5) rd.fail(1, "banner needs: %%MatrixMarket matrix <format> <field> <symmetry>");
  if (lower(tok[1].text) != "matrix") rd.fail(tok[1].column, "only 'matrix' objects are supported");

  MarketMatrix out;
  const std::string fmt = lower(tok[2].text);
  if (fmt == "coordinate") {
    out.format = MarketFormat::coordinate;
  } else if (fmt == "array") {
    out.format = MarketFormat::array;
  } else {
    rd.fail(tok[2].column, "unknown format '" + tok[2].text + "'");
  }

  Field field = Field::real;
  const std::string fs = lower(tok[3].text);
  if (fs == "real" || fs == "double") {
    field = Field::real;
  } else if (fs == "complex") {
    field = Field::complex;
  } else if (fs == "integer") {
    field = Field::integer;
  } else if (fs == "pattern") {
    field = Field::pattern;
  } else {
    rd.fail(tok[3].column, "unknown field '" + tok[3].text + "'");
  }
  if (field == Field::pattern && out.format == MarketFormat::array) {
    rd.fail(tok[3].column, "pattern field requires coordinate format");
  }
  out.complex = field == Field::complex;

  Symmetry sym = Symmetry::general;
  const std::string ss = lower(tok[4].text);
  if (ss == "general") {
    sym = Symmetry::general;
  } else if (ss == "symmetric") {
    sym = Symmetry::symmetric;
  } else if (ss == "skew-symmetric") {
    sym = Symmetry::skew;
  } else if (ss == "hermitian") {
    sym = Symmetry::hermitian;
  } else {
    rd.fail(tok[4].column, "unknown symmetry '" + tok[4].text + "'");
  }
  if (sym == Symmetry::hermitian && field != Field::complex) {
    rd.fail(tok[4].column, "hermitian symmetry requires complex field");
  }

  if (!rd.next(tok)) rd.fail(rd.line_no() + 1, "missing size line");
  const std::size_t want = out.format == MarketFormat::coordinate ? 3 : 2;
  if (tok.size() != want) {
    rd.fail(tok[0].column, "size line needs " + std::to_string(want) + " integers");
  }
  const long long rows = rd.integer(tok[0]);
  const long long cols = rd.integer(tok[1]);
  if (rows < 0) rd.fail(tok[0].column, "negative row count");
  if (cols < 0) rd.fail(tok[1].column, "negative column count");
  if (sym != Symmetry::general && rows != cols) {
    rd.fail(tok[0].column, "symmetric storage requires a square matrix");
  }

  const std::size_t nvals = field == Field::complex ? 2 : (field == Field::pattern ? 0 : 1);
  auto value_at = [&](const std::vector<Token>& t, std::size_t at) -> Scalar {
    if (field == Field::pattern) return 1.0;
    if (field == Field::integer) return static_cast<double>(rd.integer(t[at]));
    if (field == Field::complex) return {rd.number(t[at]), rd.number(t[at + 1])};
    return rd.number(t[at]);
  };

  if (out.format == MarketFormat::coordinate) {
    const long long nnz = rd.integer(tok[2]);
    if (nnz < 0) rd.fail(tok[2].column, "negative entry count");
    std::vector<Eigen::Triplet<Scalar>> trip;
    trip.reserve(static_cast<std::size_t>(sym == Symmetry::general ? nnz : 2 * nnz));
    for (long long e = 0; e < nnz; ++e) {
      if (!rd.next(tok)) {
        rd.fail(rd.line_no() + 1, "expected " + std::to_string(nnz) + " entries, found " +
                                      std::to_string(e));
      }
      if (tok.size() != 2 + nvals) {
        rd.fail(tok[0].column, "entry needs " + std::to_string(2 + nvals) + " fields");
      }
      const long long i = rd.integer(tok[0]);
      const long long j = rd.integer(tok[1]);
      if (i < 1 || i > rows) rd.fail(tok[0].column, "row index out of range");
      if (j < 1 || j > cols) rd.fail(tok[1].column, "column index out of range");
      if (sym != Symmetry::general && i < j) {
        rd.fail(tok[0].column, "symmetric storage expects the lower triangle only");
      }
      if (sym == Symmetry::skew && i == j) rd.fail(tok[0].column, "skew-symmetric diagonal entry");
      const Scalar v = value_at(tok, 2);
      trip.emplace_back(i - 1, j - 1, v);
      if (sym != Symmetry::general && i != j) trip.emplace_back(j - 1, i - 1, mirror(v, sym));
    }
    if (rd.next(tok)) rd.fail(tok[0].column, "trailing data after the last entry");
    out.sparse.resize(rows, cols);
    out.sparse.setFromTriplets(trip.begin(), trip.end());
    out.sparse.makeCompressed();
    return out;
  }

  out.dense = Matrix::Zero(rows, cols);
  // Column-major; symmetric storage lists the lower triangle only.
  for (long long j = 0; j < cols; ++j) {
    const long long first = sym == Symmetry::general ? 0 : (sym == Symmetry::skew ? j + 1 : j);
    for (long long i = first; i < rows; ++i) {
      if (!rd.next(tok)) rd.fail(rd.line_no() + 1, "too few array values");
      if (tok.size() != nvals) {
        rd.fail(tok[0].column, "array value needs " + std::to_string(nvals) + " fields");
      }
      const Scalar v = value_at(tok, 0);
      out.dense(i, j) = v;
      if (sym != Symmetry::general && i != j) out.dense(j, i) = mirror(v, sym);
    }
  }
  if (rd.next(tok)) rd.fail(tok[0].column, "trailing data after the last value");
  return out;
}

MarketMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open Matrix Market file '" + path + "'");
  return read_matrix_market(in, path);
}

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_value(std::ostream& out, Scalar v, bool complex) {
  out << fmt17(v.real());
  if (complex) out << ' ' << fmt17(v.imag());
}

}  // namespace

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
  bool complex = false;
  for (Index j = 0; j < a.outerSize() && !complex; ++j) {
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) complex = complex || it.value().imag() != 0.0;
  }
  out << "%%MatrixMarket matrix coordinate " << (complex ? "complex" : "real") << " general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  for (Index j = 0; j < a.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ';
      put_value(out, it.value(), complex);
      out << '\n';
    }
  }
}

void write_matrix_market(std::ostream& out, const Matrix& a) {
  const bool complex = a.size() > 0 && a.imag().cwiseAbs().maxCoeff() != 0.0;
  out << "%%MatrixMarket matrix array " << (complex ? "complex" : "real") << " general\n";
  out << a.rows() << ' ' << a.cols() << '\n';
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      put_value(out, a(i, j), complex);
      out << '\n';
    }
  }
}

void write_matrix_market(const std::string& path, const SparseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_matrix_market(out, a);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_matrix_market(const std::string& path, const Matrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_matrix_market(out, a);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace nepbe
