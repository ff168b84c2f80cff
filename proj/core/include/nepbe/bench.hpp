#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nepbe/gallery.hpp"
#include "nepbe/trust_region.hpp"

namespace nepbe {

/// One output file: named numeric columns, one row per record.
struct BenchTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Written as CSV (table data) rather than .dat (figure data).
  bool csv = false;
};

struct BenchOptions {
  std::string out_dir = "results";
  /// Ensemble size for the sweep suites.
  int count = 1000;
  std::uint64_t seed = 0;
  /// Problem size override; 0 keeps the suite default.
  Index n = 0;
  /// Sizes for riemannian-beam-scaling; empty keeps the default list.
  std::vector<Index> sizes;
  /// Enables the large default sizes of the slow suites.
  bool slow = false;
  PerturbationLaw law = PerturbationLaw::equal_share;
  /// Perturbation norm of the Riemannian suites (absolute).
  double riemann_magnitude = 5e-3;
  riemann::ContinuationOptions continuation;
  /// Skips writing files when false.
  bool write = true;
  std::function<void(const std::string&)> progress;
};

struct BenchSuiteResult {
  std::string suite;
  std::vector<BenchTable> tables;
  std::vector<std::string> files;
  /// Eigenvalues used by the sweep, recorded for reproducibility.
  Vector lambdas;
  double seconds = 0.0;
};

/// A computed error exceeded one of its upper bounds.
class BoundViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

std::vector<std::string> bench_suites();
bool bench_suite_exists(const std::string& suite);

/// Runs one suite and writes <out_dir>/<suite>/<table>.dat|.csv. Throws
/// BoundViolation with diagnostics on any bound violation.
BenchSuiteResult run_benchmark(const std::string& suite, const BenchOptions& opts = {});

/// Whitespace-delimited columns after one "# col1 col2 ..." header line.
void write_dat(const std::string& path, const BenchTable& table);
/// RFC 4180 CSV with a header row.
void write_csv(const std::string& path, const BenchTable& table);

}  // namespace nepbe
