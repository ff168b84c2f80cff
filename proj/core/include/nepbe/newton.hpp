#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nepbe/nep.hpp"

namespace nepbe {

struct NewtonStart {
  Scalar lambda = 0.0;
  /// Empty means a seeded random real vector.
  Vector v;
};

struct NewtonOptions {
  int max_iter = 50;
  /// Converged once ||F(lambda) v||_2 <= tol ||F(lambda)||_F for unit v.
  double tol = 1e-12;
  /// Normalization vector of the bordered system; empty means ones / sqrt(n).
  Vector c;
  std::uint64_t seed = 1;
};

struct NewtonResult {
  Scalar lambda = 0.0;
  /// Unit 2-norm.
  Vector v;
  /// Relative residual ||F(lambda) v|| / ||F(lambda)||_F per iterate.
  std::vector<double> residual_history;
  int iterations = 0;
  bool converged = false;
  std::string failure;
};

/// Newton's method on [F(lambda) v; c^T v - 1] = 0, one linear solve with
/// F(lambda) per step.
NewtonResult newton_eigenpair(const SplitNEP& nep, const NewtonStart& start,
                              const NewtonOptions& opts = {});

struct CollectOptions {
  /// Number of distinct pairs wanted.
  Index p = 1;
  /// Random starts drawn when explicit starts are empty.
  int starts = 20;
  std::vector<NewtonStart> explicit_starts;
  std::uint64_t seed = 0;
  /// Starts are sampled uniformly from the disk (or, with real_starts, the
  /// interval) of this center and radius.
  Scalar center = 0.0;
  double radius = 1.0;
  bool real_starts = false;
  /// Relative to max |lambda| over converged runs.
  double dedup_tol = 1e-8;
  NewtonOptions newton;
};

struct CollectResult {
  EigenpairSet pairs;
  std::vector<NewtonResult> runs;
  bool complete = false;
  /// Set when fewer than p distinct pairs were found.
  std::string warning;
};

/// Runs Newton from every start (concurrently) and keeps the first p distinct
/// converged eigenvalues in start order.
CollectResult collect_pairs(const SplitNEP& nep, const CollectOptions& opts);

/// ||F(lambda) v||_2 / ||F(lambda)||_F for unit v.
double relative_residual(const SplitNEP& nep, Scalar lambda, const Vector& v);

/// ||F(lambda)||_F without densifying sparse problems.
double evaluation_norm(const SplitNEP& nep, Scalar lambda);

}  // namespace nepbe
