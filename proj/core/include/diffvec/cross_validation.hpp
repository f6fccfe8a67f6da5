#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "diffvec/matrix.hpp"
#include "diffvec/metrics.hpp"
#include "diffvec/svm.hpp"

namespace diffvec {

// Given training and test row indices, returns one predicted label per test
// index.
using FoldPredictor =
    std::function<std::vector<std::string>(std::span<const std::size_t> train, std::span<const std::size_t> test)>;

struct CrossValidationResult {
  std::vector<ClassMetrics> per_class;  // label order
  ClassMetrics micro;                   // pooled over classes
  std::vector<std::string> predictions;  // out-of-fold prediction per instance
  std::vector<std::string> warnings;
};

// Seeded stratified assignment: each class is shuffled and dealt round-robin,
// continuing the rotation across classes so fold sizes stay balanced.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::string> labels, std::size_t folds,
                                                       std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

CrossValidationResult cross_validate(std::span<const std::string> labels, std::size_t folds,
                                     const FoldPredictor& predictor, std::uint64_t seed);

// Scores a fixed set of predictions against gold labels.
CrossValidationResult score_predictions(std::span<const std::string> gold, std::span<const std::string> predicted);

// Trains train_linear_multiclass on the training rows of `x` for each fold.
FoldPredictor linear_svm_predictor(const Matrix& x, std::span<const std::string> labels, LinearSvmOptions options);

}  // namespace diffvec
