#include "diffvec/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numeric>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "diffvec/error.hpp"
#include "diffvec/kernels.hpp"
#include "diffvec/prng.hpp"

namespace diffvec {

namespace {

constexpr int kModelVersion = 1;

void check_finite(const Matrix& x) {
  for (double v : x.data())
    if (!std::isfinite(v)) throw Error("svm: non-finite feature value");
}

}  // namespace

LinearModel::LinearModel(std::vector<std::string> classes, Matrix weights, std::vector<double> bias, double C)
    : classes_(std::move(classes)), weights_(std::move(weights)), bias_(std::move(bias)), C_(C) {
  if (classes_.size() != weights_.rows() || classes_.size() != bias_.size())
    throw Error("LinearModel: one weight vector and bias per class required");
  for (double v : weights_.data())
    if (!std::isfinite(v)) throw Error("LinearModel: non-finite weight");
  for (double v : bias_)
    if (!std::isfinite(v)) throw Error("LinearModel: non-finite bias");
}

std::vector<double> LinearModel::scores(std::span<const double> x) const {
  if (x.size() != dim()) throw Error("LinearModel: dimension mismatch");
  std::vector<double> s(classes_.size());
  for (std::size_t c = 0; c < classes_.size(); ++c) s[c] = dot(weights_.row(c), x) + bias_[c];
  return s;
}

const std::string& LinearModel::predict(std::span<const double> x) const {
  const auto s = scores(x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < s.size(); ++c)
    if (s[c] > s[best]) best = c;
  return classes_.at(best);
}

std::vector<std::string> LinearModel::predict(const Matrix& x) const {
  std::vector<std::string> out;
  out.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(predict(x.row(i)));
  return out;
}

BinaryLinear train_binary_linear(const Matrix& x, std::span<const int> y, const LinearSvmOptions& options,
                                 LinearTrace* trace) {
  const std::size_t n = x.rows(), d = x.cols();
  if (y.size() != n) throw Error("svm: label count does not match instance count");
  if (!(options.C > 0.0) || !std::isfinite(options.C)) throw Error("svm: C must be positive");
  if (n == 0) throw Error("svm: no training instances");
  for (int v : y)
    if (v != 1 && v != -1) throw Error("svm: binary labels must be +1 or -1");
  check_finite(x);

  const double C = options.C;
  std::vector<double> w(d + 1, 0.0);  // last component is the bias weight
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) qd[i] = dot(x.row(i), x.row(i)) + 1.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Prng rng(options.seed);

  auto margin = [&](std::size_t i) { return dot(std::span<const double>(w.data(), d), x.row(i)) + w[d]; };
  auto objectives = [&](double& primal, double& dual) {
    double ww = 0.0;
    for (double v : w) ww += v * v;
    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) hinge += std::max(0.0, 1.0 - y[i] * margin(i));
    double asum = 0.0;
    for (double a : alpha) asum += a;
    primal = 0.5 * ww + C * hinge;
    dual = 0.5 * ww - asum;  // minimisation form of the dual
  };

  bool converged = false;
  for (std::size_t epoch = 0; epoch < std::max<std::size_t>(options.max_epochs, 1); ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      const double yi = y[i];
      const double g = yi * margin(i) - 1.0;
      double pg = g;
      if (alpha[i] == 0.0)
        pg = std::min(g, 0.0);
      else if (alpha[i] == C)
        pg = std::max(g, 0.0);
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / qd[i], 0.0, C);
      const double delta = (alpha[i] - old) * yi;
      if (delta == 0.0) continue;
      auto row = x.row(i);
      for (std::size_t k = 0; k < d; ++k) w[k] += delta * row[k];
      w[d] += delta;
    }
    double primal = 0.0, dual = 0.0;
    objectives(primal, dual);
    if (trace) {
      trace->dual_objective.push_back(dual);
      trace->primal_objective.push_back(primal);
    }
    if (primal + dual <= options.tolerance * std::abs(primal)) {
      converged = true;
      break;
    }
  }
  if (trace) trace->converged = converged;

  BinaryLinear out;
  out.bias = w[d];
  w.pop_back();
  out.w = std::move(w);
  out.alpha = std::move(alpha);
  return out;
}

LinearModel train_linear_multiclass(const Matrix& x, std::span<const std::string> y, const LinearSvmOptions& options,
                                    std::vector<LinearTrace>* traces) {
  if (y.size() != x.rows()) throw Error("svm: label count does not match instance count");
  std::set<std::string> distinct(y.begin(), y.end());
  if (distinct.size() < 2) throw Error("svm: at least two classes are required");
  std::vector<std::string> classes(distinct.begin(), distinct.end());

  Matrix weights(classes.size(), x.cols());
  std::vector<double> bias(classes.size());
  if (traces) traces->assign(classes.size(), {});
  std::vector<int> yb(y.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (std::size_t i = 0; i < y.size(); ++i) yb[i] = y[i] == classes[c] ? 1 : -1;
    LinearSvmOptions opt = options;
    opt.seed = Prng::split(options.seed, classes[c]).next();
    auto m = train_binary_linear(x, yb, opt, traces ? &(*traces)[c] : nullptr);
    std::copy(m.w.begin(), m.w.end(), weights.row(c).begin());
    bias[c] = m.bias;
  }
  return LinearModel(std::move(classes), std::move(weights), std::move(bias), options.C);
}

double default_gamma(const Matrix& x) {
  const std::size_t d = std::max<std::size_t>(x.cols(), 1);
  std::vector<double> cells(x.data().begin(), x.data().end());
  if (cells.empty()) return 1.0 / static_cast<double>(d);
  // Sorted summation keeps the result independent of row order.
  std::sort(cells.begin(), cells.end());
  double mean = 0.0;
  for (double v : cells) mean += v;
  mean /= static_cast<double>(cells.size());
  std::vector<double> sq(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) sq[i] = (cells[i] - mean) * (cells[i] - mean);
  std::sort(sq.begin(), sq.end());
  double var = 0.0;
  for (double v : sq) var += v;
  var /= static_cast<double>(cells.size());
  return var > 0.0 ? 1.0 / (static_cast<double>(d) * var) : 1.0 / static_cast<double>(d);
}

// ---------------------------------------------------------------------------

KernelModel::KernelModel(Matrix support_vectors, std::vector<double> coef, double bias, double gamma, double C)
    : support_vectors_(std::move(support_vectors)), coef_(std::move(coef)), bias_(bias), gamma_(gamma), C_(C) {
  if (coef_.size() != support_vectors_.rows()) throw Error("KernelModel: one coefficient per support vector required");
  if (!(gamma_ > 0.0)) throw Error("KernelModel: gamma must be positive");
  if (!(C_ > 0.0)) throw Error("KernelModel: C must be positive");
  for (double c : coef_)
    if (!std::isfinite(c) || std::abs(c) > C_) throw Error("KernelModel: dual coefficient outside [-C, C]");
  if (!std::isfinite(bias_)) throw Error("KernelModel: non-finite bias");
}

double KernelModel::decision(std::span<const double> x) const {
  if (x.size() != dim() && !coef_.empty()) throw Error("KernelModel: dimension mismatch");
  double f = 0.0;
  for (std::size_t i = 0; i < coef_.size(); ++i) f += coef_[i] * kernel_rbf(support_vectors_.row(i), x, gamma_);
  return f + bias_;
}

std::vector<double> KernelModel::decision(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = decision(x.row(i));
  return out;
}

namespace {

// LRU cache of kernel columns.
class KernelCache {
 public:
  KernelCache(const Matrix& x, double gamma, std::size_t budget_bytes)
      : x_(x), gamma_(gamma), capacity_(std::max<std::size_t>(2, budget_bytes / (sizeof(double) * std::max<std::size_t>(x.rows(), 1)))) {}

  const std::vector<double>& column(std::size_t i) {
    auto it = index_.find(i);
    if (it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    if (lru_.size() >= capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    std::vector<double> col(x_.rows());
    for (std::size_t t = 0; t < x_.rows(); ++t) col[t] = t == i ? 1.0 : kernel_rbf(x_.row(i), x_.row(t), gamma_);
    lru_.emplace_front(i, std::move(col));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  const Matrix& x_;
  double gamma_;
  std::size_t capacity_;
  std::list<std::pair<std::size_t, std::vector<double>>> lru_;
  std::unordered_map<std::size_t, std::list<std::pair<std::size_t, std::vector<double>>>::iterator> index_;
};

std::vector<std::size_t> content_rank(const Matrix& x, std::span<const int> y) {
  const std::size_t n = x.rows();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (y[a] != y[b]) return y[a] < y[b];
    auto ra = x.row(a), rb = x.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[idx[r]] = r;
  return rank;
}

}  // namespace

KernelModel train_binary_rbf(const Matrix& x, std::span<const int> y, const KernelSvmOptions& options) {
  const std::size_t n = x.rows();
  if (y.size() != n) throw Error("svm: label count does not match instance count");
  if (!(options.C > 0.0) || !std::isfinite(options.C)) throw Error("svm: C must be positive");
  if (options.gamma < 0.0 || !std::isfinite(options.gamma)) throw Error("svm: gamma must be positive");
  const double gamma = options.gamma > 0.0 ? options.gamma : default_gamma(x);
  if (!(gamma > 0.0)) throw Error("svm: gamma must be positive");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1)
      has_pos = true;
    else if (v == -1)
      has_neg = true;
    else
      throw Error("svm: binary labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw Error("svm: both classes must be present");
  check_finite(x);

  const double C = options.C;
  const double eps = options.tolerance;
  constexpr double tau = 1e-12;
  const std::size_t max_iter =
      options.max_iterations ? options.max_iterations : std::max<std::size_t>(10'000'000, n > SIZE_MAX / 100 ? SIZE_MAX : 100 * n);

  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  const auto rank = content_rank(x, y);
  KernelCache cache(x, gamma, options.cache_mb * 1024 * 1024);

  auto better = [&](double v, double best, std::size_t t, std::ptrdiff_t best_idx) {
    return best_idx < 0 || v > best || (v == best && rank[t] < rank[static_cast<std::size_t>(best_idx)]);
  };
  auto better_min = [&](double v, double best, std::size_t t, std::ptrdiff_t best_idx) {
    return best_idx < 0 || v < best || (v == best && rank[t] < rank[static_cast<std::size_t>(best_idx)]);
  };

  std::size_t iter = 0;
  bool converged = false;
  while (iter < max_iter) {
    // Maximal violating i, then second-order choice of j.
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t gi = -1;
    for (std::size_t t = 0; t < n; ++t) {
      double v;
      if (y[t] == 1) {
        if (alpha[t] >= C) continue;
        v = -grad[t];
      } else {
        if (alpha[t] <= 0.0) continue;
        v = grad[t];
      }
      if (better(v, gmax, t, gi)) {
        gmax = v;
        gi = static_cast<std::ptrdiff_t>(t);
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t gj = -1;
    double obj_min = std::numeric_limits<double>::infinity();
    if (gi >= 0) {
      const auto i = static_cast<std::size_t>(gi);
      const auto& ki = cache.column(i);
      for (std::size_t t = 0; t < n; ++t) {
        double grad_diff;
        if (y[t] == 1) {
          if (alpha[t] <= 0.0) continue;
          gmax2 = std::max(gmax2, grad[t]);
          grad_diff = gmax + grad[t];
        } else {
          if (alpha[t] >= C) continue;
          gmax2 = std::max(gmax2, -grad[t]);
          grad_diff = gmax - grad[t];
        }
        if (grad_diff > 0.0) {
          double quad = 2.0 - 2.0 * ki[t];
          if (quad <= 0.0) quad = tau;
          const double obj = -(grad_diff * grad_diff) / quad;
          if (better_min(obj, obj_min, t, gj)) {
            obj_min = obj;
            gj = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    if (gi < 0 || gj < 0 || gmax + gmax2 < eps) {
      converged = true;
      break;
    }
    ++iter;

    const auto i = static_cast<std::size_t>(gi), j = static_cast<std::size_t>(gj);
    const auto& ki = cache.column(i);
    const std::vector<double> kj = cache.column(j);
    const double kij = ki[j];
    const double old_ai = alpha[i], old_aj = alpha[j];
    double ai = old_ai, aj = old_aj;
    if (y[i] != y[j]) {
      double quad = 2.0 - 2.0 * kij;
      if (quad <= 0.0) quad = tau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > C) {
          ai = C;
          aj = C - diff;
        }
      } else if (aj > C) {
        aj = C;
        ai = C + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * kij;
      if (quad <= 0.0) quad = tau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) {
          ai = C;
          aj = sum - C;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > C) {
        if (aj > C) {
          aj = C;
          ai = sum - C;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    ai = std::clamp(ai, 0.0, C);
    aj = std::clamp(aj, 0.0, C);
    alpha[i] = ai;
    alpha[j] = aj;
    const double dai = ai - old_ai, daj = aj - old_aj;
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += y[t] * (y[i] * ki[t] * dai + y[j] * kj[t] * daj);
  }

  // Bias from free variables, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t nr_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] == -1)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] == 1)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++nr_free;
      sum_free += yg;
    }
  }
  const double rho = nr_free > 0 ? sum_free / static_cast<double>(nr_free) : (ub + lb) / 2.0;

  // Support vectors in content order so the stored model is row-order independent.
  std::vector<std::size_t> sv;
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0.0) sv.push_back(t);
  std::sort(sv.begin(), sv.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
  std::vector<double> coef;
  coef.reserve(sv.size());
  for (std::size_t t : sv) coef.push_back(alpha[t] * y[t]);

  KernelModel model(x.select_rows(sv), std::move(coef), -rho, gamma, C);
  model.iterations = iter;
  model.converged = converged;
  return model;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, std::size_t dim) {
  Matrix m(j.size(), dim);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& r = j.at(i);
    if (r.size() != dim) throw Error("model: row has wrong dimension");
    for (std::size_t k = 0; k < dim; ++k) m(i, k) = r.at(k).get<double>();
  }
  return m;
}

void check_header(const nlohmann::json& j, const char* kind) {
  if (!j.is_object() || j.value("kind", "") != kind) throw Error(std::string("model: expected kind '") + kind + "'");
  if (j.value("version", 0) != kModelVersion) throw Error("model: unsupported version");
}

}  // namespace

nlohmann::json to_json(const LinearModel& model, const std::string& source_id) {
  return {{"kind", "linear-ovr-svm"},
          {"version", kModelVersion},
          {"embedding_source", source_id},
          {"C", model.C()},
          {"dim", model.dim()},
          {"classes", model.classes()},
          {"bias", model.bias()},
          {"weights", matrix_json(model.weights())}};
}

nlohmann::json to_json(const KernelModel& model, const std::string& positive_label, const std::string& source_id) {
  return {{"kind", "rbf-binary-svm"},
          {"version", kModelVersion},
          {"embedding_source", source_id},
          {"positive_label", positive_label},
          {"C", model.C()},
          {"gamma", model.gamma()},
          {"dim", model.dim()},
          {"bias", model.bias()},
          {"coef", model.coef()},
          {"support_vectors", matrix_json(model.support_vectors())}};
}

LinearModel linear_model_from_json(const nlohmann::json& j) {
  try {
    check_header(j, "linear-ovr-svm");
    const auto dim = j.at("dim").get<std::size_t>();
    return LinearModel(j.at("classes").get<std::vector<std::string>>(), matrix_from_json(j.at("weights"), dim),
                       j.at("bias").get<std::vector<double>>(), j.at("C").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model: ") + e.what());
  }
}

KernelModel kernel_model_from_json(const nlohmann::json& j) {
  try {
    check_header(j, "rbf-binary-svm");
    const auto dim = j.at("dim").get<std::size_t>();
    return KernelModel(matrix_from_json(j.at("support_vectors"), dim), j.at("coef").get<std::vector<double>>(),
                       j.at("bias").get<double>(), j.at("gamma").get<double>(), j.at("C").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model: ") + e.what());
  }
}

}  // namespace diffvec
