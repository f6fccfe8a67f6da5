#pragma once

#include <span>

namespace diffvec {

// exp(-gamma * ||x - y||^2)
double kernel_rbf(std::span<const double> x, std::span<const double> y, double gamma);

// x.y / (||x|| ||y||); throws on a zero vector.
double kernel_cosine(std::span<const double> x, std::span<const double> y);

// Cosine shifted into [0, 1] for use as an affinity: (1 + cos) / 2.
double cosine_affinity(std::span<const double> x, std::span<const double> y);

}  // namespace diffvec
