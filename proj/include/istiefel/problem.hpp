#pragma once

#include "istiefel/manifold.hpp"

#include <map>
#include <optional>
#include <string>

namespace istiefel {

/// min f(X) subject to X^T A X = J, with the Euclidean gradient of a smooth
/// extension of f and the metric used for the Riemannian gradient.
struct Problem {
  ManifoldSpec spec;
  Metric metric;
  std::function<double(const Matrix&)> cost;
  std::function<Matrix(const Matrix&)> egrad;

  std::string name;
  std::map<std::string, std::string> params;

  /// Known optimal value / minimizer, when the instance was built with one.
  std::optional<double> optimal_value;
  std::optional<Matrix> known_minimizer;
};

}  // namespace istiefel
