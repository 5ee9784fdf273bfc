#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace plopt {

// Classification measures whose level sets are hyperplanes in error-profile
// space. The F family carries a beta parameter; the Jaccard family does not.
enum class MeasureKind {
  binary_f,
  macro_f,                  // mean of per-label binary F over a multilabel task
  micro_multilabel_f,       // pooled counts over all labels
  micro_multiclass_f,       // pooled counts over all classes except the default
  binary_jaccard,
  micro_multilabel_jaccard,
  micro_multiclass_jaccard,
};

enum class TaskKind { binary, multilabel, multiclass };

inline bool is_f_kind(MeasureKind k) {
  return k == MeasureKind::binary_f || k == MeasureKind::macro_f ||
         k == MeasureKind::micro_multilabel_f || k == MeasureKind::micro_multiclass_f;
}

inline const char* measure_name(MeasureKind k) {
  switch (k) {
    case MeasureKind::binary_f: return "binary-f";
    case MeasureKind::macro_f: return "macro-f";
    case MeasureKind::micro_multilabel_f: return "micro-f";
    case MeasureKind::micro_multiclass_f: return "micro-mc-f";
    case MeasureKind::binary_jaccard: return "binary-jaccard";
    case MeasureKind::micro_multilabel_jaccard: return "micro-jaccard";
    case MeasureKind::micro_multiclass_jaccard: return "micro-mc-jaccard";
  }
  return "?";
}

struct MeasureSpec {
  MeasureKind kind = MeasureKind::binary_f;
  double beta = 1.0;     // ignored by the Jaccard kinds
  int num_labels = 2;    // binary kinds: fixed to 2
  int default_class = 1; // micro-multiclass kinds only; fixed to class 1

  static MeasureSpec binary_f(double beta = 1.0) { return make(MeasureKind::binary_f, beta, 2); }
  static MeasureSpec macro_f(int num_labels, double beta = 1.0) {
    return make(MeasureKind::macro_f, beta, num_labels);
  }
  static MeasureSpec micro_f(int num_labels, double beta = 1.0) {
    return make(MeasureKind::micro_multilabel_f, beta, num_labels);
  }
  static MeasureSpec micro_mc_f(int num_labels, double beta = 1.0) {
    return make(MeasureKind::micro_multiclass_f, beta, num_labels);
  }
  static MeasureSpec binary_jaccard() { return make(MeasureKind::binary_jaccard, 1.0, 2); }
  static MeasureSpec micro_jaccard(int num_labels) {
    return make(MeasureKind::micro_multilabel_jaccard, 1.0, num_labels);
  }
  static MeasureSpec micro_mc_jaccard(int num_labels) {
    return make(MeasureKind::micro_multiclass_jaccard, 1.0, num_labels);
  }

  bool is_binary() const {
    return kind == MeasureKind::binary_f || kind == MeasureKind::binary_jaccard;
  }
  bool is_jaccard() const { return !is_f_kind(kind); }

  TaskKind task() const {
    switch (kind) {
      case MeasureKind::binary_f:
      case MeasureKind::binary_jaccard:
        return TaskKind::binary;
      case MeasureKind::macro_f:
      case MeasureKind::micro_multilabel_f:
      case MeasureKind::micro_multilabel_jaccard:
        return TaskKind::multilabel;
      case MeasureKind::micro_multiclass_f:
      case MeasureKind::micro_multiclass_jaccard:
        return TaskKind::multiclass;
    }
    return TaskKind::binary;
  }

  // Upper end of the admissible level range: F values live in [0, 1+beta^2]
  // by construction of the linear-fractional form, Jaccard values in [0, 1].
  double level_max() const { return is_jaccard() ? 1.0 : 1.0 + beta * beta; }

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("MeasureSpec: beta must be positive");
    // Multilabel measures make sense for a single label (they reduce to the
    // binary case); binary and multiclass ones need two.
    int min_labels = task() == TaskKind::multilabel ? 1 : 2;
    if (num_labels < min_labels) throw std::invalid_argument("MeasureSpec: too few labels");
    if (is_binary() && num_labels != 2)
      throw std::invalid_argument("MeasureSpec: binary measures require num_labels == 2");
    if (default_class != 1)
      throw std::invalid_argument("MeasureSpec: default_class is fixed to 1");
  }

 private:
  static MeasureSpec make(MeasureKind k, double beta, int num_labels) {
    MeasureSpec s;
    s.kind = k;
    s.beta = beta;
    s.num_labels = num_labels;
    s.validate();
    return s;
  }
};

// Population error profile: per-label false-negative and false-positive
// probability mass, plus the label priors. Flattened ordering is
// (fn1, fp1, fn2, fp2, ...), which is the coordinate system cost vectors use.
struct ErrorProfile {
  int num_labels = 0;
  std::vector<double> fn;      // size num_labels
  std::vector<double> fp;      // size num_labels
  std::vector<double> priors;  // size num_labels

  std::vector<double> flat() const {
    std::vector<double> e(2 * static_cast<std::size_t>(num_labels));
    for (int k = 0; k < num_labels; ++k) {
      e[2 * k] = fn[k];
      e[2 * k + 1] = fp[k];
    }
    return e;
  }

  void validate(TaskKind task) const {
    auto L = static_cast<std::size_t>(num_labels);
    int min_labels = task == TaskKind::multilabel ? 1 : 2;
    if (num_labels < min_labels || fn.size() != L || fp.size() != L || priors.size() != L)
      throw std::invalid_argument("ErrorProfile: inconsistent sizes");
    for (int k = 0; k < num_labels; ++k) {
      if (!(priors[k] >= 0.0 && priors[k] <= 1.0))
        throw std::invalid_argument("ErrorProfile: prior out of [0,1]");
      if (!(fn[k] >= 0.0 && fn[k] <= priors[k] + 1e-12))
        throw std::invalid_argument("ErrorProfile: fn[k] out of [0, priors[k]]");
      if (!(fp[k] >= 0.0 && fp[k] <= 1.0 - priors[k] + 1e-12))
        throw std::invalid_argument("ErrorProfile: fp[k] out of [0, 1-priors[k]]");
    }
    if (task == TaskKind::binary) {
      if (num_labels != 2) throw std::invalid_argument("ErrorProfile: binary task needs 2 labels");
      if (std::abs(fn[1] - fp[0]) > 1e-12 || std::abs(fp[1] - fn[0]) > 1e-12)
        throw std::invalid_argument("ErrorProfile: binary mirror invariant violated");
    }
    if (task == TaskKind::multiclass) {
      double s = std::accumulate(priors.begin(), priors.end(), 0.0);
      if (std::abs(s - 1.0) > 1e-9)
        throw std::invalid_argument("ErrorProfile: multiclass priors must sum to 1");
    }
  }
};

// Hyperplane description of a measure level set: the level-t set of a measure
// is {e : <costs, e> + offset == 0}, and values above t lie on the <= 0 side.
struct CostVector {
  std::vector<double> costs;  // length 2L, ordering (fn1, fp1, fn2, fp2, ...)
  double offset = 0.0;
  double level = 0.0;

  void validate() const {
    bool nonzero = false;
    for (double c : costs) {
      if (c < -1e-12) throw std::invalid_argument("CostVector: negative cost");
      if (c > 0.0) nonzero = true;
    }
    if (!nonzero) throw std::invalid_argument("CostVector: all costs zero");
  }
};

namespace detail {

inline void check_profile_shape(const MeasureSpec& spec, const ErrorProfile& e) {
  spec.validate();
  if (e.num_labels != spec.num_labels)
    throw std::invalid_argument("measure/profile label-count mismatch");
}

// Numerator/denominator of the per-label binary F ratio.
inline std::pair<double, double> binary_f_ratio(double beta, double prior, double fn, double fp) {
  double b2 = beta * beta;
  return {(1.0 + b2) * (prior - fn), (1.0 + b2) * prior + fp - fn};
}

}  // namespace detail

// Measure value of an error profile. Throws std::domain_error when the
// denominator is not positive (e.g. an empty positive class with no
// predictions); use try_measure_value for the lenient variant.
inline double measure_value(const MeasureSpec& spec, const ErrorProfile& e) {
  detail::check_profile_shape(spec, e);
  double b2 = spec.beta * spec.beta;
  double num = 0.0, den = 0.0;
  switch (spec.kind) {
    case MeasureKind::binary_f: {
      auto [n, d] = detail::binary_f_ratio(spec.beta, e.priors[0], e.fn[0], e.fp[0]);
      num = n;
      den = d;
      break;
    }
    case MeasureKind::macro_f: {
      double acc = 0.0;
      for (int k = 0; k < e.num_labels; ++k) {
        auto [n, d] = detail::binary_f_ratio(spec.beta, e.priors[k], e.fn[k], e.fp[k]);
        if (!(d > 0.0))
          throw std::domain_error("measure_value: macro-F label " + std::to_string(k + 1) +
                                  " has nonpositive denominator");
        acc += n / d;
      }
      return acc / e.num_labels;
    }
    case MeasureKind::micro_multilabel_f: {
      for (int k = 0; k < e.num_labels; ++k) {
        num += (1.0 + b2) * (e.priors[k] - e.fn[k]);
        den += (1.0 + b2) * e.priors[k] + e.fp[k] - e.fn[k];
      }
      break;
    }
    case MeasureKind::micro_multiclass_f: {
      double rest = 1.0 - e.priors[0];  // mass of the non-default classes
      double fn_rest = 0.0;
      for (int k = 1; k < e.num_labels; ++k) fn_rest += e.fn[k];
      num = (1.0 + b2) * (rest - fn_rest);
      den = (1.0 + b2) * rest - fn_rest + e.fn[0];
      break;
    }
    case MeasureKind::binary_jaccard: {
      num = e.priors[0] - e.fn[0];
      den = e.priors[0] + e.fp[0];
      break;
    }
    case MeasureKind::micro_multilabel_jaccard: {
      for (int k = 0; k < e.num_labels; ++k) {
        num += e.priors[k] - e.fn[k];
        den += e.priors[k] + e.fp[k];
      }
      break;
    }
    case MeasureKind::micro_multiclass_jaccard: {
      double rest = 1.0 - e.priors[0];
      double fn_rest = 0.0;
      for (int k = 1; k < e.num_labels; ++k) fn_rest += e.fn[k];
      num = rest - fn_rest;
      den = rest + e.fn[0];
      break;
    }
  }
  if (!(den > 0.0)) throw std::domain_error("measure_value: nonpositive denominator");
  return num / den;
}

inline std::optional<double> try_measure_value(const MeasureSpec& spec, const ErrorProfile& e) {
  try {
    return measure_value(spec, e);
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

// Error profile of hard predictions, for binary and multiclass tasks.
// Labels and predictions are 1-based class indices.
inline ErrorProfile error_profile(std::span<const int> predictions, std::span<const int> labels,
                                  const MeasureSpec& spec) {
  spec.validate();
  if (spec.task() == TaskKind::multilabel)
    throw std::invalid_argument("error_profile: multilabel measures need label sets");
  if (predictions.size() != labels.size() || labels.empty())
    throw std::invalid_argument("error_profile: predictions/labels length mismatch or empty");
  int L = spec.num_labels;
  std::vector<double> fn(L, 0.0), fp(L, 0.0), priors(L, 0.0);
  auto n = static_cast<double>(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int y = labels[i], h = predictions[i];
    if (y < 1 || y > L) throw std::invalid_argument("error_profile: label out of range");
    if (h < 1 || h > L) throw std::invalid_argument("error_profile: prediction out of range");
    priors[y - 1] += 1.0;
    if (h != y) {
      fn[y - 1] += 1.0;
      fp[h - 1] += 1.0;
    }
  }
  for (int k = 0; k < L; ++k) {
    fn[k] /= n;
    fp[k] /= n;
    priors[k] /= n;
  }
  ErrorProfile e{L, std::move(fn), std::move(fp), std::move(priors)};
  e.validate(spec.task());
  return e;
}

// Error profile of predicted label sets, for multilabel tasks. Sets hold
// 1-based label indices; order and duplicates are normalized away.
inline ErrorProfile error_profile(const std::vector<std::vector<int>>& predictions,
                                  const std::vector<std::vector<int>>& labels,
                                  const MeasureSpec& spec) {
  spec.validate();
  if (spec.task() != TaskKind::multilabel)
    throw std::invalid_argument("error_profile: label sets need a multilabel measure");
  if (predictions.size() != labels.size() || labels.empty())
    throw std::invalid_argument("error_profile: predictions/labels length mismatch or empty");
  int L = spec.num_labels;
  auto as_mask = [L](const std::vector<int>& set) {
    unsigned mask = 0;
    for (int v : set) {
      if (v < 1 || v > L) throw std::invalid_argument("error_profile: label out of range");
      mask |= 1u << (v - 1);
    }
    return mask;
  };
  std::vector<double> fn(L, 0.0), fp(L, 0.0), priors(L, 0.0);
  auto n = static_cast<double>(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    unsigned ym = as_mask(labels[i]), hm = as_mask(predictions[i]);
    for (int k = 0; k < L; ++k) {
      bool has = ym & (1u << k), pred = hm & (1u << k);
      if (has) priors[k] += 1.0;
      if (has && !pred) fn[k] += 1.0;
      if (!has && pred) fp[k] += 1.0;
    }
  }
  for (int k = 0; k < L; ++k) {
    fn[k] /= n;
    fp[k] /= n;
    priors[k] /= n;
  }
  ErrorProfile e{L, std::move(fn), std::move(fp), std::move(priors)};
  e.validate(TaskKind::multilabel);
  return e;
}

// Cost vector of the level-t hyperplane of a measure. `priors` supplies the
// label priors the offset depends on. Macro-F is not itself pseudo-linear;
// for it the function delegates to the per-label binary construction and
// returns the hyperplane of label `label` (1-based) embedded in profile
// space. The `label` argument is ignored by every other kind.
inline CostVector cost_vector(const MeasureSpec& spec, double level, std::span<const double> priors,
                              int label = 1) {
  spec.validate();
  if (priors.size() != static_cast<std::size_t>(spec.num_labels))
    throw std::invalid_argument("cost_vector: priors size mismatch");
  if (!(level >= 0.0 && level <= spec.level_max() + 1e-12))
    throw std::out_of_range("cost_vector: level outside [0, level_max]");
  double b2 = spec.beta * spec.beta;
  double t = level;
  int L = spec.num_labels;
  CostVector cv;
  cv.costs.assign(2 * static_cast<std::size_t>(L), 0.0);
  cv.level = t;
  double prior_sum = std::accumulate(priors.begin(), priors.end(), 0.0);
  switch (spec.kind) {
    case MeasureKind::binary_f:
      cv.costs[0] = 1.0 + b2 - t;
      cv.costs[1] = t;
      cv.offset = (1.0 + b2) * priors[0] * (t - 1.0);
      break;
    case MeasureKind::macro_f: {
      if (label < 1 || label > L) throw std::invalid_argument("cost_vector: label out of range");
      int k = label - 1;
      cv.costs[2 * k] = 1.0 + b2 - t;
      cv.costs[2 * k + 1] = t;
      cv.offset = (1.0 + b2) * priors[k] * (t - 1.0);
      break;
    }
    case MeasureKind::micro_multilabel_f:
      for (int k = 0; k < L; ++k) {
        cv.costs[2 * k] = 1.0 + b2 - t;
        cv.costs[2 * k + 1] = t;
      }
      cv.offset = (1.0 + b2) * (t - 1.0) * prior_sum;
      break;
    case MeasureKind::micro_multiclass_f:
      cv.costs[0] = t;
      for (int k = 1; k < L; ++k) cv.costs[2 * k] = 1.0 + b2 - t;
      cv.offset = (1.0 + b2) * (t - 1.0) * (1.0 - priors[0]);
      break;
    case MeasureKind::binary_jaccard:
      cv.costs[0] = 1.0;
      cv.costs[1] = t;
      cv.offset = priors[0] * (t - 1.0);
      break;
    case MeasureKind::micro_multilabel_jaccard:
      for (int k = 0; k < L; ++k) {
        cv.costs[2 * k] = 1.0;
        cv.costs[2 * k + 1] = t;
      }
      cv.offset = (t - 1.0) * prior_sum;
      break;
    case MeasureKind::micro_multiclass_jaccard:
      cv.costs[0] = t;
      for (int k = 1; k < L; ++k) cv.costs[2 * k] = 1.0;
      cv.offset = (t - 1.0) * (1.0 - priors[0]);
      break;
  }
  cv.validate();
  return cv;
}

// Constant Phi relating a cost-vector perturbation to the worst-case loss in
// measure value: F* - F(e) <= Phi * (2*eps0*M + eps1) for profiles that are
// eps1-optimal under a cost vector within eps0 of the level-F* one. For
// macro-F the returned value is the per-label worst case (smallest prior).
inline double discretization_factor(const MeasureSpec& spec, std::span<const double> priors) {
  spec.validate();
  if (priors.size() != static_cast<std::size_t>(spec.num_labels))
    throw std::invalid_argument("discretization_factor: priors size mismatch");
  double b2 = spec.beta * spec.beta;
  double prior_sum = std::accumulate(priors.begin(), priors.end(), 0.0);
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw std::domain_error(std::string("discretization_factor: ") + what);
    return v;
  };
  switch (spec.kind) {
    case MeasureKind::binary_f:
      return 1.0 / positive(b2 * priors[0], "zero positive prior");
    case MeasureKind::macro_f: {
      double pmin = *std::min_element(priors.begin(), priors.end());
      return 1.0 / positive(b2 * pmin, "zero label prior");
    }
    case MeasureKind::micro_multilabel_f:
      return 1.0 / positive(b2 * prior_sum, "zero prior mass");
    case MeasureKind::micro_multiclass_f:
      return 1.0 / positive(b2 * (1.0 - priors[0]), "default class has full mass");
    case MeasureKind::binary_jaccard:
      return 1.0 / positive(priors[0], "zero positive prior");
    case MeasureKind::micro_multilabel_jaccard:
      return 1.0 / positive(prior_sum, "zero prior mass");
    case MeasureKind::micro_multiclass_jaccard:
      return 1.0 / positive(1.0 - priors[0], "default class has full mass");
  }
  throw std::logic_error("discretization_factor: unreachable");
}

// Total misclassification cost <costs, flat(e)>.
inline double weighted_cost(const CostVector& cv, const ErrorProfile& e) {
  if (cv.costs.size() != 2 * static_cast<std::size_t>(e.num_labels))
    throw std::invalid_argument("weighted_cost: dimension mismatch");
  double acc = 0.0;
  for (int k = 0; k < e.num_labels; ++k)
    acc += cv.costs[2 * k] * e.fn[k] + cv.costs[2 * k + 1] * e.fp[k];
  return acc;
}

}  // namespace plopt
