#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "plopt/dataset.hpp"
#include "plopt/metrics.hpp"

namespace plopt {

enum class LossKind { log_loss, hinge };

inline const char* loss_name(LossKind k) { return k == LossKind::log_loss ? "log" : "hinge"; }

struct TrainConfig {
  double regularization = 1.0;   // C: weight of the data term
  double cost_fn = 1.0;          // per-example cost of missing a positive
  double cost_fp = 1.0;          // per-example cost of a false alarm
  LossKind loss = LossKind::log_loss;
  int max_iterations = 50000;
  double gradient_tolerance = 1e-6;
  // stop once accepted steps shrink the objective by less than this relative
  // amount ten times in a row (0 disables)
  double objective_tolerance = 1e-12;

  void validate() const {
    if (!(regularization > 0.0)) throw std::invalid_argument("TrainConfig: C must be positive");
    if (cost_fn < 0.0 || cost_fp < 0.0) throw std::invalid_argument("TrainConfig: negative cost");
    if (cost_fn == 0.0 && cost_fp == 0.0)
      throw std::invalid_argument("TrainConfig: both costs zero");
    if (max_iterations < 1) throw std::invalid_argument("TrainConfig: max_iterations < 1");
    if (!(gradient_tolerance > 0.0))
      throw std::invalid_argument("TrainConfig: gradient_tolerance must be positive");
    if (objective_tolerance < 0.0)
      throw std::invalid_argument("TrainConfig: objective_tolerance must be non-negative");
  }
};

struct TrainStats {
  int iterations = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
};

struct LinearModel {
  std::vector<double> weights;  // indexed by 1-based feature index minus one
  double threshold = 0.0;       // predict positive iff score >= threshold
  LossKind loss = LossKind::log_loss;
  double cost_level = 1.0;      // the t this model was trained at
  double regularization = 1.0;
  TrainStats stats;
};

namespace detail {

inline double dot_row(std::span<const double> w, const std::vector<Feature>& row) {
  double s = 0.0;
  for (const auto& f : row) s += w[f.index - 1] * f.value;
  return s;
}

// log(1 + exp(-z)) without overflow.
inline double log_loss_value(double z) {
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

inline void check_binary(const Dataset& ds) {
  if (ds.multilabel) throw std::invalid_argument("learner: dataset must be binary");
  if (ds.size() < 1) throw std::invalid_argument("learner: empty dataset");
  for (int y : ds.labels)
    if (y != 1 && y != 2) throw std::invalid_argument("learner: labels must be 1 or 2");
}

}  // namespace detail

// Objective: 0.5*||w||^2 + C * sum_i c_i * loss(y_i * <w, x_i>) with
// c_i = cost_fn for positives and cost_fp for negatives. Every component of
// w is regularized, including the one matching an appended bias column.
inline double objective_value(std::span<const double> w, const Dataset& ds,
                              const TrainConfig& cfg) {
  cfg.validate();
  detail::check_binary(ds);
  if (w.size() != static_cast<std::size_t>(ds.dim))
    throw std::invalid_argument("objective_value: weight dimension mismatch");
  double data = 0.0;
  for (int i = 0; i < ds.size(); ++i) {
    double y = ds.labels[i] == 1 ? 1.0 : -1.0;
    double c = ds.labels[i] == 1 ? cfg.cost_fn : cfg.cost_fp;
    if (c == 0.0) continue;
    double z = y * detail::dot_row(w, ds.rows[i]);
    data += c * (cfg.loss == LossKind::log_loss ? detail::log_loss_value(z)
                                                : std::max(0.0, 1.0 - z));
  }
  double reg = 0.0;
  for (double v : w) reg += v * v;
  return 0.5 * reg + cfg.regularization * data;
}

// Value plus (sub)gradient. The hinge kink at z == 1 takes the zero branch.
inline double objective_and_gradient(std::span<const double> w, const Dataset& ds,
                                     const TrainConfig& cfg, std::vector<double>& grad) {
  cfg.validate();
  detail::check_binary(ds);
  if (w.size() != static_cast<std::size_t>(ds.dim))
    throw std::invalid_argument("objective_and_gradient: weight dimension mismatch");
  grad.assign(w.begin(), w.end());
  double data = 0.0;
  for (int i = 0; i < ds.size(); ++i) {
    double y = ds.labels[i] == 1 ? 1.0 : -1.0;
    double c = ds.labels[i] == 1 ? cfg.cost_fn : cfg.cost_fp;
    if (c == 0.0) continue;
    double z = y * detail::dot_row(w, ds.rows[i]);
    double dldz;
    if (cfg.loss == LossKind::log_loss) {
      data += c * detail::log_loss_value(z);
      dldz = z >= 0.0 ? -std::exp(-z) / (1.0 + std::exp(-z)) : -1.0 / (1.0 + std::exp(z));
    } else {
      data += c * std::max(0.0, 1.0 - z);
      dldz = z < 1.0 ? -1.0 : 0.0;
    }
    if (dldz != 0.0) {
      double scale = cfg.regularization * c * dldz * y;
      for (const auto& f : ds.rows[i]) grad[f.index - 1] += scale * f.value;
    }
  }
  return 0.5 *
             std::inner_product(w.begin(), w.end(), w.begin(), 0.0) +
         cfg.regularization * data;
}

namespace detail {

// Objective and gradient in column-scaled coordinates u_j = w_j * s_j over a
// dataset whose features are already divided by s_j. The regularizer is
// mapped exactly — 0.5 * sum (u_j * inv_s_j)^2 equals 0.5 * ||w||^2 — so the
// minimizer is the same model as the raw problem, but the data term is well
// conditioned regardless of raw column magnitudes.
inline double scaled_value(std::span<const double> u, const Dataset& ds, const TrainConfig& cfg,
                           std::span<const double> inv_s) {
  double data = 0.0;
  for (int i = 0; i < ds.size(); ++i) {
    double y = ds.labels[i] == 1 ? 1.0 : -1.0;
    double c = ds.labels[i] == 1 ? cfg.cost_fn : cfg.cost_fp;
    if (c == 0.0) continue;
    double z = y * dot_row(u, ds.rows[i]);
    data += c * (cfg.loss == LossKind::log_loss ? log_loss_value(z) : std::max(0.0, 1.0 - z));
  }
  double reg = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) reg += (u[j] * inv_s[j]) * (u[j] * inv_s[j]);
  return 0.5 * reg + cfg.regularization * data;
}

inline double scaled_value_and_grad(std::span<const double> u, const Dataset& ds,
                                    const TrainConfig& cfg, std::span<const double> inv_s,
                                    std::vector<double>& grad) {
  grad.resize(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) grad[j] = u[j] * inv_s[j] * inv_s[j];
  double data = 0.0;
  for (int i = 0; i < ds.size(); ++i) {
    double y = ds.labels[i] == 1 ? 1.0 : -1.0;
    double c = ds.labels[i] == 1 ? cfg.cost_fn : cfg.cost_fp;
    if (c == 0.0) continue;
    double z = y * dot_row(u, ds.rows[i]);
    double dldz;
    if (cfg.loss == LossKind::log_loss) {
      data += c * log_loss_value(z);
      dldz = z >= 0.0 ? -std::exp(-z) / (1.0 + std::exp(-z)) : -1.0 / (1.0 + std::exp(z));
    } else {
      data += c * std::max(0.0, 1.0 - z);
      dldz = z < 1.0 ? -1.0 : 0.0;
    }
    if (dldz != 0.0) {
      double scale = cfg.regularization * c * dldz * y;
      for (const auto& f : ds.rows[i]) grad[f.index - 1] += scale * f.value;
    }
  }
  double reg = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) reg += (u[j] * inv_s[j]) * (u[j] * inv_s[j]);
  return 0.5 * reg + cfg.regularization * data;
}

}  // namespace detail

// Full-batch descent from w = 0 with a Barzilai-Borwein trial step and Armijo
// backtracking, so the objective decreases monotonically and the whole run is
// a deterministic function of (dataset, config). Stops when the gradient norm
// drops below tolerance or no descent step above the step floor exists (the
// usual terminator for the hinge subgradient). Internally each feature column
// is scaled to unit max magnitude with the regularizer mapped exactly, which
// leaves the minimizer unchanged but keeps the iteration count independent of
// raw column scales; the reported gradient norm is in the scaled metric.
inline LinearModel train_weighted_linear(const Dataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  detail::check_binary(ds);

  std::vector<double> scale(ds.dim, 0.0);
  for (const auto& row : ds.rows)
    for (const auto& f : row) scale[f.index - 1] = std::max(scale[f.index - 1], std::abs(f.value));
  for (double& s : scale)
    if (s == 0.0) s = 1.0;
  Dataset scaled = ds;
  for (auto& row : scaled.rows)
    for (auto& f : row) f.value /= scale[f.index - 1];
  std::vector<double> inv_s(ds.dim);
  for (int j = 0; j < ds.dim; ++j) inv_s[j] = 1.0 / scale[j];

  std::vector<double> w(ds.dim, 0.0), grad, prev_w, prev_grad, trial(ds.dim);
  double f = detail::scaled_value_and_grad(w, scaled, cfg, inv_s, grad);
  double step = 0.0;
  LinearModel model;
  model.loss = cfg.loss;
  model.regularization = cfg.regularization;
  int it = 0;
  int stagnant = 0;
  for (; it < cfg.max_iterations; ++it) {
    double gnorm = std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
    if (gnorm <= cfg.gradient_tolerance) {
      model.stats.converged = true;
      break;
    }
    if (cfg.objective_tolerance > 0.0 && stagnant >= 10) {
      model.stats.converged = true;  // objective has stopped moving
      break;
    }
    if (it == 0) {
      step = 1.0 / (1.0 + gnorm);
    } else {
      // BB1 step <dw, dw> / <dw, dg>, clamped; fall back on growth when the
      // curvature estimate is unusable.
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        double dw = w[j] - prev_w[j], dg = grad[j] - prev_grad[j];
        num += dw * dw;
        den += dw * dg;
      }
      step = den > 0.0 ? std::clamp(num / den, 1e-12, 1e12) : step * 2.0;
    }
    prev_w = w;
    prev_grad = grad;
    double gsq = gnorm * gnorm;
    bool accepted = false;
    while (step >= 1e-18) {
      for (std::size_t j = 0; j < w.size(); ++j) trial[j] = w[j] - step * grad[j];
      double ft = detail::scaled_value(trial, scaled, cfg, inv_s);
      if (ft <= f - 1e-4 * step * gsq) {
        w.swap(trial);
        double fnew = detail::scaled_value_and_grad(w, scaled, cfg, inv_s, grad);
        stagnant = f - fnew <= cfg.objective_tolerance * (1.0 + std::abs(f)) ? stagnant + 1 : 0;
        f = fnew;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      model.stats.converged = true;  // no descent direction left at this scale
      ++it;
      break;
    }
  }
  for (int j = 0; j < ds.dim; ++j) w[j] *= inv_s[j];
  model.weights = std::move(w);
  model.stats.iterations = it;
  model.stats.objective = f;
  model.stats.gradient_norm =
      std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
  return model;
}

inline std::vector<double> predict_scores(const LinearModel& model, const Dataset& ds) {
  if (model.weights.size() != static_cast<std::size_t>(ds.dim))
    throw std::invalid_argument("predict_scores: model/dataset dimension mismatch");
  std::vector<double> scores(ds.size());
  for (int i = 0; i < ds.size(); ++i) scores[i] = detail::dot_row(model.weights, ds.rows[i]);
  return scores;
}

inline std::vector<int> predict_binary(const LinearModel& model, const Dataset& ds) {
  auto scores = predict_scores(model, ds);
  std::vector<int> pred(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = scores[i] >= model.threshold ? 1 : 2;
  return pred;
}

struct ThresholdResult {
  double threshold = 0.0;
  std::optional<double> value;  // objective at the chosen threshold
};

namespace detail {

// Shared sweep over candidate thresholds: midpoints between consecutive
// distinct scores plus one value below the minimum and one above the maximum.
// Candidates are visited in ascending order and replacement requires a strict
// improvement, so ties resolve toward the smallest threshold.
template <typename Eval>
ThresholdResult sweep_thresholds(std::span<const double> scores, std::span<const int> labels,
                                 bool maximize, Eval&& eval) {
  if (scores.size() != labels.size() || labels.empty())
    throw std::invalid_argument("tune_threshold: scores/labels length mismatch or empty");
  int n = static_cast<int>(labels.size());
  int n_pos = 0;
  for (int y : labels) {
    if (y != 1 && y != 2) throw std::invalid_argument("tune_threshold: labels must be 1 or 2");
    if (y == 1) ++n_pos;
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] < scores[b]; });

  // Walking the candidates in ascending order shrinks the predicted-positive
  // set one distinct score at a time.
  int tp = n_pos, fp = n - n_pos;
  ThresholdResult best;
  best.threshold = scores[order[0]] - 1.0;
  bool have = false;
  double best_value = 0.0;
  auto consider = [&](double theta, int tp_now, int fp_now) {
    auto v = eval(tp_now, fp_now, n_pos, n);
    if (!v) return;
    bool better = !have || (maximize ? *v > best_value : *v < best_value);
    if (better) {
      have = true;
      best_value = *v;
      best.threshold = theta;
      best.value = *v;
    }
  };
  consider(scores[order[0]] - 1.0, tp, fp);
  int i = 0;
  while (i < n) {
    double s = scores[order[i]];
    while (i < n && scores[order[i]] == s) {
      if (labels[order[i]] == 1)
        --tp;
      else
        --fp;
      ++i;
    }
    double theta = i < n ? 0.5 * (s + scores[order[i]]) : s + 1.0;
    consider(theta, tp, fp);
  }
  if (!have) {
    // Every candidate was undefined; report the empty-prediction threshold.
    best.threshold = scores[order[n - 1]] + 1.0;
    best.value = std::nullopt;
  }
  return best;
}

}  // namespace detail

// Threshold maximizing a binary measure of the induced predictions.
inline ThresholdResult tune_threshold(std::span<const double> scores, std::span<const int> labels,
                                      const MeasureSpec& spec) {
  spec.validate();
  if (!spec.is_binary())
    throw std::invalid_argument("tune_threshold: measure objective must be binary");
  double b2 = spec.beta * spec.beta;
  bool jaccard = spec.is_jaccard();
  return detail::sweep_thresholds(
      scores, labels, /*maximize=*/true,
      [&](int tp, int fp, int n_pos, int n) -> std::optional<double> {
        double P = static_cast<double>(n_pos) / n;
        double fn_mass = static_cast<double>(n_pos - tp) / n;
        double fp_mass = static_cast<double>(fp) / n;
        double num, den;
        if (jaccard) {
          num = P - fn_mass;
          den = P + fp_mass;
        } else {
          num = (1.0 + b2) * (P - fn_mass);
          den = (1.0 + b2) * P + fp_mass - fn_mass;
        }
        if (!(den > 0.0)) return std::nullopt;
        return num / den;
      });
}

// Threshold minimizing the weighted misclassification cost of the induced
// predictions; the cost vector must be 4-dimensional (a binary hyperplane).
inline ThresholdResult tune_threshold(std::span<const double> scores, std::span<const int> labels,
                                      const CostVector& cv) {
  cv.validate();
  if (cv.costs.size() != 4)
    throw std::invalid_argument("tune_threshold: cost objective must be binary (4 costs)");
  return detail::sweep_thresholds(
      scores, labels, /*maximize=*/false,
      [&](int tp, int fp, int n_pos, int n) -> std::optional<double> {
        double fn_mass = static_cast<double>(n_pos - tp) / n;
        double fp_mass = static_cast<double>(fp) / n;
        return cv.costs[0] * fn_mass + cv.costs[1] * fp_mass + cv.costs[2] * fp_mass +
               cv.costs[3] * fn_mass;
      });
}

}  // namespace plopt
