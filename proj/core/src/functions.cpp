#include "nepbe/functions.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace nepbe::functions {

ScalarFunction one() {
  return {"one", [](Scalar) { return Scalar(1.0); },
          [](Scalar) { return Scalar(0.0); }};
}

ScalarFunction lambda() {
  return {"lambda", [](Scalar z) { return z; },
          [](Scalar) { return Scalar(1.0); }};
}

ScalarFunction lambda2() {
  return {"lambda2", [](Scalar z) { return z * z; },
          [](Scalar z) { return 2.0 * z; }};
}

ScalarFunction exp_neg() {
  return {"exp_neg", [](Scalar z) { return std::exp(-z); },
          [](Scalar z) { return -std::exp(-z); }};
}

ScalarFunction exp_neg2() {
  return {"exp_neg2", [](Scalar z) { return std::exp(-2.0 * z); },
          [](Scalar z) { return -2.0 * std::exp(-2.0 * z); }};
}

ScalarFunction polynomial(std::vector<Scalar> coeffs) {
  std::ostringstream name;
  name << "polynomial[";
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (i) name << ",";
    name << coeffs[i].real();
    if (coeffs[i].imag() != 0.0) name << (coeffs[i].imag() > 0 ? "+" : "") << coeffs[i].imag() << "i";
  }
  name << "]";
  auto value = [c = coeffs](Scalar z) {
    Scalar acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
  };
  auto derivative = [c = std::move(coeffs)](Scalar z) {
    Scalar acc = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) {
      acc = acc * z + static_cast<double>(i) * c[i];
    }
    return acc;
  };
  return {name.str(), value, derivative};
}

ScalarFunction scaled_exp(Scalar rate) {
  std::ostringstream name;
  name << "scaled_exp[" << rate.real();
  if (rate.imag() != 0.0) name << (rate.imag() > 0 ? "+" : "") << rate.imag() << "i";
  name << "]";
  return {name.str(), [rate](Scalar z) { return std::exp(rate * z); },
          [rate](Scalar z) { return rate * std::exp(rate * z); }};
}

ScalarFunction by_name(const std::string& name) {
  if (name == "one") return one();
  if (name == "lambda") return lambda();
  if (name == "lambda2") return lambda2();
  if (name == "exp_neg") return exp_neg();
  if (name == "exp_neg2") return exp_neg2();
  throw std::invalid_argument("unknown scalar function '" + name + "'");
}

}  // namespace nepbe::functions
