#include "diffvec/cross_validation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "diffvec/error.hpp"
#include "diffvec/prng.hpp"

namespace diffvec {

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::string> labels, std::size_t folds,
                                                       std::uint64_t seed, std::vector<std::string>* warnings) {
  if (folds < 2) throw Error("cross-validation: at least 2 folds are required");
  if (folds > labels.size())
    throw Error("cross-validation: " + std::to_string(folds) + " folds requested for " +
                std::to_string(labels.size()) + " instances");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t next = 0;
  for (auto& [label, members] : by_class) {
    if (members.size() < folds && warnings)
      warnings->push_back("class '" + label + "' has " + std::to_string(members.size()) + " instances for " +
                          std::to_string(folds) + " folds");
    auto rng = Prng::split(seed, label);
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t i : members) {
      out[next].push_back(i);
      next = (next + 1) % folds;
    }
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

CrossValidationResult score_predictions(std::span<const std::string> gold, std::span<const std::string> predicted) {
  if (gold.size() != predicted.size()) throw Error("scoring: gold and predicted lengths differ");
  std::map<std::string, ClassMetrics> counts;
  for (const auto& g : gold) counts[g].label = g;
  CrossValidationResult r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == predicted[i]) {
      ++counts[gold[i]].tp;
    } else {
      ++counts[gold[i]].fn;
      auto& p = counts[predicted[i]];
      p.label = predicted[i];
      ++p.fp;
    }
  }
  r.micro.label = "micro";
  for (auto& [label, m] : counts) {
    r.per_class.push_back(m);
    r.micro += m;
  }
  r.predictions.assign(predicted.begin(), predicted.end());
  return r;
}

CrossValidationResult cross_validate(std::span<const std::string> labels, std::size_t folds,
                                     const FoldPredictor& predictor, std::uint64_t seed) {
  std::vector<std::string> warnings;
  const auto assignment = stratified_folds(labels, folds, seed, &warnings);
  std::vector<std::string> predicted(labels.size());
  for (std::size_t f = 0; f < folds; ++f) {
    const auto& test = assignment[f];
    if (test.empty()) continue;
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < folds; ++g)
      if (g != f) train.insert(train.end(), assignment[g].begin(), assignment[g].end());
    std::sort(train.begin(), train.end());
    auto out = predictor(train, test);
    if (out.size() != test.size()) throw Error("cross-validation: predictor returned wrong number of labels");
    for (std::size_t k = 0; k < test.size(); ++k) predicted[test[k]] = std::move(out[k]);
  }
  auto r = score_predictions(labels, predicted);
  r.warnings = std::move(warnings);
  return r;
}

FoldPredictor linear_svm_predictor(const Matrix& x, std::span<const std::string> labels, LinearSvmOptions options) {
  if (labels.size() != x.rows()) throw Error("cross-validation: label count does not match instance count");
  std::vector<std::string> y(labels.begin(), labels.end());
  return [&x, y = std::move(y), options](std::span<const std::size_t> train, std::span<const std::size_t> test) {
    std::vector<std::string> ytrain;
    ytrain.reserve(train.size());
    for (std::size_t i : train) ytrain.push_back(y[i]);
    const auto model = train_linear_multiclass(x.select_rows(train), ytrain, options);
    return model.predict(x.select_rows(test));
  };
}

}  // namespace diffvec
