#pragma once

#include <string>
#include <vector>

#include "nepbe/linalg.hpp"

namespace nepbe {

/// Scalar function of the eigenvalue parameter together with its first
/// derivative (the Newton solver needs both).
struct ScalarFunction {
  std::string name;
  linalg::ComplexFunction value;
  linalg::ComplexFunction derivative;

  Scalar operator()(Scalar z) const { return value(z); }
};

namespace functions {

ScalarFunction one();
ScalarFunction lambda();
ScalarFunction lambda2();
/// exp(-lambda)
ScalarFunction exp_neg();
/// exp(-2 lambda)
ScalarFunction exp_neg2();
/// c0 + c1 z + c2 z^2 + ...
ScalarFunction polynomial(std::vector<Scalar> coeffs);
/// exp(rate * lambda)
ScalarFunction scaled_exp(Scalar rate);

/// Looks up one of the registered names (one, lambda, lambda2, exp_neg,
/// exp_neg2). Throws std::invalid_argument for anything else.
ScalarFunction by_name(const std::string& name);

}  // namespace functions
}  // namespace nepbe
