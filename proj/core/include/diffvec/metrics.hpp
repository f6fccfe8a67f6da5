#pragma once

#include <cstdint>
#include <string>

namespace diffvec {

// Pooled decision counts for one class. Ratios with an empty denominator are 0.
struct ClassMetrics {
  std::string label;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }

  ClassMetrics& operator+=(const ClassMetrics& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

}  // namespace diffvec
