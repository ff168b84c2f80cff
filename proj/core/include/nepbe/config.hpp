#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "nepbe/gallery.hpp"
#include "nepbe/newton.hpp"
#include "nepbe/nep.hpp"

namespace nepbe {

/// Bad configuration. Syntax errors carry a 1-based line/column; semantic
/// errors name the offending term ("term 2: ...").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg, int line = 0, int column = 0)
      : std::runtime_error(msg), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ProblemConfig {
  std::string source;
  SplitNEP nep;
  /// Set when the config names a gallery problem instead of explicit terms.
  std::optional<GalleryProblem> gallery;
  /// Exactly one of pairs / solve is set.
  std::optional<EigenpairSet> pairs;
  std::optional<CollectOptions> solve;
};

/// Reads a JSON problem description; relative paths resolve against the
/// directory of the config file.
ProblemConfig load_problem(const std::string& path);

/// Same from text; base_dir resolves relative paths.
ProblemConfig parse_problem(const std::string& text, const std::string& base_dir = ".",
                            const std::string& source = "<config>");

/// Eigenvalues as one "re im" pair per line.
Vector read_eigenvalues(const std::string& path);
void write_eigenvalues(const std::string& path, const Vector& lambdas);

/// Eigenvalue list plus an n x p Matrix Market array for V.
EigenpairSet read_eigenpairs(const std::string& lambdas_path, const std::string& v_path);
void write_eigenpairs(const std::string& lambdas_path, const std::string& v_path,
                      const EigenpairSet& pairs);

}  // namespace nepbe
