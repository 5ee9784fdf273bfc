#pragma once

// Test-side oracles, kept independent of the library implementation: each
// measure is written here as an explicit affine-fraction over the flattened
// error profile, and cost vectors / thresholds are derived from that form
// rather than from the code under test.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "plopt/metrics.hpp"
#include "plopt/pareto.hpp"
#include "plopt/random.hpp"

namespace oracle {

using plopt::ErrorProfile;
using plopt::MeasureKind;
using plopt::MeasureSpec;
using plopt::TaskKind;

// value(e) = (num0 + <num, e>) / (den0 + <den, e>) over e = (fn1, fp1, ...).
struct AffineForm {
  double num0 = 0.0;
  std::vector<double> num;
  double den0 = 0.0;
  std::vector<double> den;

  double value(const std::vector<double>& e) const {
    double n = num0 + std::inner_product(num.begin(), num.end(), e.begin(), 0.0);
    double d = den0 + std::inner_product(den.begin(), den.end(), e.begin(), 0.0);
    return n / d;
  }

  // Level-t hyperplane: t*den - num, offset t*den0 - num0.
  std::vector<double> costs_at(double t) const {
    std::vector<double> a(num.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = t * den[i] - num[i];
    return a;
  }
  double offset_at(double t) const { return t * den0 - num0; }
};

inline AffineForm affine_form(const MeasureSpec& spec, const std::vector<double>& priors) {
  int L = spec.num_labels;
  double b2 = spec.beta * spec.beta;
  double psum = std::accumulate(priors.begin(), priors.end(), 0.0);
  AffineForm f;
  f.num.assign(2 * L, 0.0);
  f.den.assign(2 * L, 0.0);
  switch (spec.kind) {
    case MeasureKind::binary_f:
      f.num0 = (1 + b2) * priors[0];
      f.num[0] = -(1 + b2);
      f.den0 = (1 + b2) * priors[0];
      f.den[0] = -1.0;
      f.den[1] = 1.0;
      break;
    case MeasureKind::micro_multilabel_f:
      f.num0 = (1 + b2) * psum;
      f.den0 = (1 + b2) * psum;
      for (int k = 0; k < L; ++k) {
        f.num[2 * k] = -(1 + b2);
        f.den[2 * k] = -1.0;
        f.den[2 * k + 1] = 1.0;
      }
      break;
    case MeasureKind::micro_multiclass_f:
      f.num0 = (1 + b2) * (1.0 - priors[0]);
      f.den0 = (1 + b2) * (1.0 - priors[0]);
      f.den[0] = 1.0;
      for (int k = 1; k < L; ++k) {
        f.num[2 * k] = -(1 + b2);
        f.den[2 * k] = -1.0;
      }
      break;
    case MeasureKind::binary_jaccard:
      f.num0 = priors[0];
      f.num[0] = -1.0;
      f.den0 = priors[0];
      f.den[1] = 1.0;
      break;
    case MeasureKind::micro_multilabel_jaccard:
      f.num0 = psum;
      f.den0 = psum;
      for (int k = 0; k < L; ++k) {
        f.num[2 * k] = -1.0;
        f.den[2 * k + 1] = 1.0;
      }
      break;
    case MeasureKind::micro_multiclass_jaccard:
      f.num0 = 1.0 - priors[0];
      f.den0 = 1.0 - priors[0];
      f.den[0] = 1.0;
      for (int k = 1; k < L; ++k) f.num[2 * k] = -1.0;
      break;
    default:
      throw std::invalid_argument("affine_form: macro-F is not a single fraction");
  }
  return f;
}

// Random valid profile with all entries on a dyadic grid (multiples of
// 1/128), so distinct measure values are well separated.
inline ErrorProfile random_profile(plopt::Rng& rng, TaskKind task, int L) {
  ErrorProfile e;
  e.num_labels = L;
  e.fn.assign(L, 0.0);
  e.fp.assign(L, 0.0);
  e.priors.assign(L, 0.0);
  auto grid = [&](int units) { return static_cast<double>(units) / 128.0; };
  if (task == TaskKind::multiclass) {
    // Distribute 128 mass units over L classes, at least 4 each so that no
    // prior is degenerate.
    std::vector<int> units(L, 4);
    int rest = 128 - 4 * L;
    for (int i = 0; i < rest; ++i) units[rng.below(L)] += 1;
    for (int k = 0; k < L; ++k) {
      e.priors[k] = grid(units[k]);
      e.fn[k] = grid(static_cast<int>(rng.below(units[k] + 1)));
      e.fp[k] = grid(static_cast<int>(rng.below(128 - units[k] + 1)));
    }
    return e;
  }
  if (task == TaskKind::binary) {
    int units = 8 + static_cast<int>(rng.below(113));  // prior in [8/128, 120/128]
    e.priors = {grid(units), grid(128 - units)};
    e.fn[0] = grid(static_cast<int>(rng.below(units + 1)));
    e.fp[0] = grid(static_cast<int>(rng.below(128 - units + 1)));
    e.fn[1] = e.fp[0];
    e.fp[1] = e.fn[0];
    return e;
  }
  for (int k = 0; k < L; ++k) {
    int units = 8 + static_cast<int>(rng.below(113));
    e.priors[k] = grid(units);
    e.fn[k] = grid(static_cast<int>(rng.below(units + 1)));
    e.fp[k] = grid(static_cast<int>(rng.below(128 - units + 1)));
  }
  return e;
}

// Solves for the single coordinate `coord` that puts the profile on measure
// level t, leaving every other coordinate fixed; returns nullopt when the
// solution leaves the valid box.
inline std::optional<ErrorProfile> solve_on_level(const AffineForm& f, const ErrorProfile& base,
                                                  int coord, double t) {
  auto e = base.flat();
  // (num0 + <num,e>) = t (den0 + <den,e>)  =>  linear in e[coord].
  double a = f.num[coord] - t * f.den[coord];
  double rest_num = f.num0, rest_den = f.den0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (static_cast<int>(i) == coord) continue;
    rest_num += f.num[i] * e[i];
    rest_den += f.den[i] * e[i];
  }
  if (a == 0.0) return std::nullopt;
  double x = (t * rest_den - rest_num) / a;
  int k = coord / 2;
  double lo = 0.0;
  double hi = coord % 2 == 0 ? base.priors[k] : 1.0 - base.priors[k];
  if (!(x >= lo && x <= hi)) return std::nullopt;
  ErrorProfile out = base;
  if (coord % 2 == 0)
    out.fn[k] = x;
  else
    out.fp[k] = x;
  // keep the binary mirror coherent
  if (base.num_labels == 2 && std::abs(base.fn[1] - base.fp[0]) < 1e-15 &&
      std::abs(base.fp[1] - base.fn[0]) < 1e-15) {
    out.fn[1] = out.fp[0];
    out.fp[1] = out.fn[0];
  }
  return out;
}

// Random finite distribution with masses and conditionals on a dyadic grid.
inline plopt::FiniteDistribution random_distribution(plopt::Rng& rng, TaskKind task, int L,
                                                     int max_points) {
  plopt::FiniteDistribution dist;
  dist.task = task;
  dist.num_labels = L;
  int n = 1 + static_cast<int>(rng.below(max_points));
  std::vector<int> units(n, 1);
  int rest = 64 - n;
  for (int i = 0; i < rest; ++i) units[rng.below(n)] += 1;
  for (int i = 0; i < n; ++i) {
    plopt::DistributionPoint p;
    p.mass = units[i] / 64.0;
    // the first point keeps its conditionals strictly inside (0, 1) so no
    // label prior degenerates and every measure stays defined somewhere
    auto open_cond = [&] { return (1.0 + rng.below(31)) / 32.0; };
    auto any_cond = [&] { return static_cast<double>(rng.below(33)) / 32.0; };
    if (task == TaskKind::binary) {
      p.cond = {i == 0 ? open_cond() : any_cond()};
    } else if (task == TaskKind::multiclass) {
      std::vector<int> cu(L, 1);
      int crest = 32 - L;
      for (int j = 0; j < crest; ++j) cu[rng.below(L)] += 1;
      for (int k = 0; k < L; ++k) p.cond.push_back(cu[k] / 32.0);
    } else {
      for (int k = 0; k < L; ++k) p.cond.push_back(i == 0 ? open_cond() : any_cond());
    }
    dist.points.push_back(std::move(p));
  }
  dist.validate();
  return dist;
}

// Brute-force threshold search: explicitly forms predictions at every
// candidate and evaluates the objective from scratch.
struct BruteThreshold {
  double theta = 0.0;
  std::optional<double> value;
  double gap = 0.0;  // margin between the best and second-best candidate
};

template <typename Objective>
BruteThreshold brute_force_threshold(const std::vector<double>& scores,
                                     const std::vector<int>& labels, bool maximize,
                                     Objective&& objective) {
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> candidates;
  candidates.push_back(sorted.front() - 1.0);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
  candidates.push_back(sorted.back() + 1.0);

  BruteThreshold best;
  bool have = false;
  double second = 0.0;
  bool have_second = false;
  for (double theta : candidates) {
    int tp = 0, fp = 0, npos = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      bool pos = labels[i] == 1;
      npos += pos;
      if (scores[i] >= theta) (pos ? tp : fp) += 1;
    }
    std::optional<double> v = objective(tp, fp, npos, static_cast<int>(scores.size()));
    if (!v) continue;
    if (!have || (maximize ? *v > *best.value : *v < *best.value)) {
      if (have) {
        second = *best.value;
        have_second = true;
      }
      have = true;
      best.theta = theta;
      best.value = v;
    } else if (!have_second || (maximize ? *v > second : *v < second)) {
      second = *v;
      have_second = true;
    }
  }
  if (!have) best.theta = sorted.back() + 1.0;
  if (have && have_second) best.gap = std::abs(*best.value - second);
  if (have && !have_second) best.gap = 1e300;  // single defined candidate
  return best;
}

// F of integer counts, straight from the count-based definition.
inline std::optional<double> f_from_counts(double beta, int tp, int fn, int fp) {
  double b2 = beta * beta;
  double den = (1 + b2) * tp + b2 * fn + fp;
  if (!(den > 0.0)) return std::nullopt;
  return (1 + b2) * tp / den;
}

inline std::optional<double> jaccard_from_counts(int tp, int fn, int fp) {
  double den = tp + fn + fp;
  if (!(den > 0.0)) return std::nullopt;
  return tp / den;
}

}  // namespace oracle
