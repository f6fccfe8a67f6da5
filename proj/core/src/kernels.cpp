#include "diffvec/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "diffvec/error.hpp"
#include "diffvec/matrix.hpp"

namespace diffvec {

double kernel_rbf(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) throw Error("kernel_rbf: dimension mismatch");
  if (!(gamma > 0.0)) throw Error("kernel_rbf: gamma must be positive");
  return std::exp(-gamma * squared_distance(x, y));
}

double kernel_cosine(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("kernel_cosine: dimension mismatch");
  const double nx = l2_norm(x);
  const double ny = l2_norm(y);
  if (nx == 0.0 || ny == 0.0) throw Error("kernel_cosine: zero vector");
  return std::clamp(dot(x, y) / (nx * ny), -1.0, 1.0);
}

double cosine_affinity(std::span<const double> x, std::span<const double> y) {
  return 0.5 * (1.0 + kernel_cosine(x, y));
}

}  // namespace diffvec
