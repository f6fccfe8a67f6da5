#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "diffvec/matrix.hpp"

namespace diffvec {

struct LinearSvmOptions {
  double C = 1.0;
  double tolerance = 1e-4;  // relative duality gap
  std::size_t max_epochs = 1000;
  std::uint64_t seed = 0;
};

// Per-epoch objectives of one binary problem.
struct LinearTrace {
  std::vector<double> dual_objective;  // 1/2 ||w||^2 - sum(alpha); non-increasing
  std::vector<double> primal_objective;
  bool converged = false;
};

// One-vs-rest hinge-loss SVM. The bias is learned as the weight of an
// appended constant-1 feature.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(std::vector<std::string> classes, Matrix weights, std::vector<double> bias, double C);

  const std::vector<std::string>& classes() const { return classes_; }
  const Matrix& weights() const { return weights_; }  // classes x dim
  const std::vector<double>& bias() const { return bias_; }
  double C() const { return C_; }
  std::size_t dim() const { return weights_.cols(); }

  std::vector<double> scores(std::span<const double> x) const;
  // argmax of scores; ties go to the earlier class.
  const std::string& predict(std::span<const double> x) const;
  std::vector<std::string> predict(const Matrix& x) const;

 private:
  std::vector<std::string> classes_;
  Matrix weights_;
  std::vector<double> bias_;
  double C_ = 1.0;
};

// Classes are ordered lexicographically. Throws with fewer than two classes.
LinearModel train_linear_multiclass(const Matrix& x, std::span<const std::string> y, const LinearSvmOptions& options,
                                    std::vector<LinearTrace>* traces = nullptr);

struct BinaryLinear {
  std::vector<double> w;
  double bias = 0.0;
  std::vector<double> alpha;
};

// Dual coordinate descent for a single +1/-1 problem.
BinaryLinear train_binary_linear(const Matrix& x, std::span<const int> y, const LinearSvmOptions& options,
                                 LinearTrace* trace = nullptr);

struct KernelSvmOptions {
  double C = 1.0;
  double gamma = 0.0;       // <= 0 selects default_gamma(x)
  double tolerance = 1e-3;  // KKT violation
  std::size_t cache_mb = 256;
  std::size_t max_iterations = 0;  // 0 selects max(10^7, 100 n)
};

// 1 / (dim * variance of all feature values): 1 / dim for standardised
// features, and scale-free otherwise.
double default_gamma(const Matrix& x);

// Binary RBF-kernel SVM: f(x) = sum_i coef_i K(sv_i, x) + bias, with
// coef_i = alpha_i * y_i.
class KernelModel {
 public:
  KernelModel() = default;
  KernelModel(Matrix support_vectors, std::vector<double> coef, double bias, double gamma, double C);

  const Matrix& support_vectors() const { return support_vectors_; }
  const std::vector<double>& coef() const { return coef_; }
  double bias() const { return bias_; }
  double gamma() const { return gamma_; }
  double C() const { return C_; }
  std::size_t dim() const { return support_vectors_.cols(); }

  double decision(std::span<const double> x) const;
  std::vector<double> decision(const Matrix& x) const;
  int predict(std::span<const double> x) const { return decision(x) > 0.0 ? 1 : -1; }

  std::size_t iterations = 0;
  bool converged = true;

 private:
  Matrix support_vectors_;
  std::vector<double> coef_;
  double bias_ = 0.0;
  double gamma_ = 1.0;
  double C_ = 1.0;
};

// SMO with second-order working-set selection. Ties between equally
// violating points are broken by the content of the training rows, so the
// solution does not depend on row order.
KernelModel train_binary_rbf(const Matrix& x, std::span<const int> y, const KernelSvmOptions& options);

// Versioned JSON model files.
nlohmann::json to_json(const LinearModel& model, const std::string& source_id = "");
nlohmann::json to_json(const KernelModel& model, const std::string& positive_label = "",
                       const std::string& source_id = "");
LinearModel linear_model_from_json(const nlohmann::json& j);
KernelModel kernel_model_from_json(const nlohmann::json& j);

}  // namespace diffvec
