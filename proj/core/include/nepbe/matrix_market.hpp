#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "nepbe/coefficient.hpp"

namespace nepbe {

/// Parse failure with a 1-based position; what() reads "source:line:column: msg".
class MatrixMarketError : public std::runtime_error {
 public:
  MatrixMarketError(const std::string& source, int line, int column, const std::string& msg);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class MarketFormat { coordinate, array };

/// Coordinate files come back sparse, array files dense. Symmetric,
/// skew-symmetric and hermitian storage is expanded.
struct MarketMatrix {
  MarketFormat format = MarketFormat::coordinate;
  bool complex = false;
  SparseMatrix sparse;
  Matrix dense;

  Coefficient coefficient() const;
  Matrix to_dense() const;
};

MarketMatrix read_matrix_market(std::istream& in, const std::string& source = "<stream>");
MarketMatrix read_matrix_market(const std::string& path);

/// Writes real storage when every imaginary part is zero, complex otherwise.
/// Values carry 17 significant digits, enough to round-trip binary64.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);
void write_matrix_market(std::ostream& out, const Matrix& a);
void write_matrix_market(const std::string& path, const SparseMatrix& a);
void write_matrix_market(const std::string& path, const Matrix& a);

}  // namespace nepbe
