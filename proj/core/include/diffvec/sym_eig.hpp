#pragma once

#include <vector>

#include "diffvec/matrix.hpp"

namespace diffvec {

// Square matrix checked on construction to be symmetric and finite:
// |A(i,j) - A(j,i)| <= 1e-12 * max(1, |A(i,j)|) for every pair.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Matrix values);

  std::size_t order() const { return values_.rows(); }
  const Matrix& values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }

 private:
  Matrix values_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j pairs with values[j]; orthonormal
};

// Householder tridiagonalization followed by implicit-shift QL.
EigenDecomposition sym_eig(const SymmetricMatrix& a);

}  // namespace diffvec
