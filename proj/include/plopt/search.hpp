#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "plopt/dataset.hpp"
#include "plopt/learner.hpp"
#include "plopt/metrics.hpp"

namespace plopt {

// Grid of measure levels to sweep. The step is epsilon0 / max(1, beta^2),
// matching the Lipschitz scaling of the cost family; `paper` mode is the
// fixed coarse preset 0.1, 0.2, ..., 1.9.
struct GridSpec {
  enum class Mode { step, paper };
  Mode mode = Mode::step;
  double epsilon0 = 0.1;
  double t_min = 0.0;
  double t_max = -1.0;  // negative: use the measure's full level range
};

inline std::vector<double> cost_grid(const MeasureSpec& spec, const GridSpec& grid) {
  spec.validate();
  if (grid.mode == GridSpec::Mode::paper) {
    std::vector<double> ts;
    for (int i = 1; i <= 19; ++i) ts.push_back(i / 10.0);
    return ts;
  }
  if (!(grid.epsilon0 > 0.0)) throw std::invalid_argument("cost_grid: epsilon0 must be positive");
  double t_min = grid.t_min;
  double t_max = grid.t_max < 0.0 ? spec.level_max() : grid.t_max;
  if (!(t_max > t_min)) throw std::invalid_argument("cost_grid: empty range");
  if (t_min < 0.0 || t_max > spec.level_max() + 1e-12)
    throw std::invalid_argument("cost_grid: range outside [0, level_max]");
  double phi = std::max(1.0, spec.beta * spec.beta);
  double step = grid.epsilon0 / phi;
  std::vector<double> ts;
  for (int j = 0;; ++j) {
    double t = t_min + j * step;
    if (t > t_max + 1e-12) break;
    ts.push_back(std::min(t, t_max));
  }
  // Cover the whole range inclusively; the final interval may be shorter.
  if (ts.back() < t_max - 1e-12) ts.push_back(t_max);
  return ts;
}

enum class SelectionRule { max_value, min_cost };

struct SearchConfig {
  std::vector<double> c_grid{1.0};
  LossKind loss = LossKind::log_loss;
  bool tune = true;  // tune decision thresholds on validation (off: theta = 0)
  SelectionRule rule = SelectionRule::max_value;
  int max_iterations = 50000;
  double gradient_tolerance = 1e-6;
  int workers = 1;

  void validate() const {
    if (c_grid.empty()) throw std::invalid_argument("SearchConfig: empty C grid");
    for (double c : c_grid)
      if (!(c > 0.0)) throw std::invalid_argument("SearchConfig: C must be positive");
    if (workers < 1) throw std::invalid_argument("SearchConfig: workers must be >= 1");
  }
};

// One grid cell of the search: the cost level t and regularization C tried
// for one label, with the validation measure value (at the tuned threshold)
// and the validation weighted cost. `chosen` marks the cells assembled into
// the returned model.
struct TraceCell {
  int label = 1;
  double level = 0.0;
  double c = 1.0;
  std::optional<double> val_value;
  double val_cost = 0.0;
  double theta = 0.0;
  bool chosen = false;
  std::string note;
};

struct LabelSelection {
  int label = 1;
  double level = 0.0;
  double c = 1.0;
  double theta = 0.0;
  std::optional<double> val_value;  // per-label validation measure
  std::string note;
};

struct EvalReport {
  std::optional<double> value;
  ErrorProfile profile;
  std::vector<std::optional<double>> per_label;  // per-label binary F, multilabel only
};

struct OptResult {
  std::vector<LinearModel> models;       // one per label; binary: one entry
  std::vector<LabelSelection> selection;  // parallel to models
  std::optional<double> val_objective;    // overall validation measure
  std::vector<TraceCell> trace;
  std::optional<EvalReport> test;  // filled by the caller when test data exists
};

namespace detail {

// Runs fn(0..count-1) on `workers` threads. Tasks are independent and write
// to distinct slots, so the result is identical to the sequential order.
inline void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

inline std::vector<double> binary_priors(const Dataset& ds) {
  int pos = 0;
  for (int y : ds.labels) pos += y == 1;
  double p = static_cast<double>(pos) / std::max(1, ds.size());
  return {p, 1.0 - p};
}

inline ErrorProfile binary_profile_at(const std::vector<double>& scores, const Dataset& ds,
                                      double theta, const MeasureSpec& spec) {
  std::vector<int> pred(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = scores[i] >= theta ? 1 : 2;
  return error_profile(pred, ds.labels, spec);
}

inline LinearModel constant_negative_model(int dim, LossKind loss) {
  LinearModel m;
  m.weights.assign(dim, 0.0);
  m.threshold = 1.0;  // scores are identically 0
  m.loss = loss;
  return m;
}

}  // namespace detail

// Algorithm: sweep the level grid; per level, train one cost-sensitive
// classifier per C with costs (a1, a2) from the level's cost vector, tune the
// threshold on validation when enabled, and keep the cell with the best
// validation measure (default) or the smallest validation weighted cost
// (alternative selection rule). Cells that fail to train are skipped with a
// note; the search fails only if every cell does.
inline OptResult optimize_binary_f(const Dataset& train, const Dataset& val,
                                   const MeasureSpec& spec, const std::vector<double>& levels,
                                   const SearchConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (!spec.is_binary()) throw std::invalid_argument("optimize_binary_f: binary measure required");
  if (train.multilabel || val.multilabel)
    throw std::invalid_argument("optimize_binary_f: binary datasets required");
  if (train.dim != val.dim)
    throw std::invalid_argument("optimize_binary_f: train/val feature spaces differ");
  if (levels.empty()) throw std::invalid_argument("optimize_binary_f: empty level grid");

  auto train_priors = detail::binary_priors(train);
  auto val_priors = detail::binary_priors(val);

  struct Cell {
    TraceCell trace;
    LinearModel model;
    bool ok = false;
  };
  int nt = static_cast<int>(levels.size());
  int nc = static_cast<int>(cfg.c_grid.size());
  std::vector<Cell> cells(static_cast<std::size_t>(nt) * nc);
  detail::parallel_for(nt * nc, cfg.workers, [&](int idx) {
    int ti = idx / nc, ci = idx % nc;
    Cell& cell = cells[idx];
    cell.trace.label = 1;
    cell.trace.level = levels[ti];
    cell.trace.c = cfg.c_grid[ci];
    try {
      auto cv_train = cost_vector(spec, levels[ti], train_priors);
      TrainConfig tc;
      tc.regularization = cfg.c_grid[ci];
      tc.cost_fn = cv_train.costs[0];
      tc.cost_fp = cv_train.costs[1];
      tc.loss = cfg.loss;
      tc.max_iterations = cfg.max_iterations;
      tc.gradient_tolerance = cfg.gradient_tolerance;
      cell.model = train_weighted_linear(train, tc);
      cell.model.cost_level = levels[ti];
      auto scores = predict_scores(cell.model, val);
      if (cfg.tune) {
        auto tuned = tune_threshold(scores, val.labels, spec);
        cell.model.threshold = tuned.threshold;
        cell.trace.val_value = tuned.value;
      } else {
        cell.model.threshold = 0.0;
        auto prof = detail::binary_profile_at(scores, val, 0.0, spec);
        cell.trace.val_value = try_measure_value(spec, prof);
      }
      cell.trace.theta = cell.model.threshold;
      auto prof = detail::binary_profile_at(scores, val, cell.model.threshold, spec);
      cell.trace.val_cost = weighted_cost(cost_vector(spec, levels[ti], val_priors), prof);
      cell.ok = true;
    } catch (const std::exception& ex) {
      cell.trace.note = std::string("skipped: ") + ex.what();
    }
  });

  // Selection; iteration order (ascending t, then C) plus strict comparison
  // breaks ties toward smaller t, then smaller C.
  int best = -1;
  bool best_defined = false;
  double best_key = 0.0;
  for (int idx = 0; idx < nt * nc; ++idx) {
    const Cell& cell = cells[idx];
    if (!cell.ok) continue;
    if (cfg.rule == SelectionRule::max_value) {
      if (!cell.trace.val_value) {
        if (best < 0) best = idx;  // placeholder until a defined value shows up
        continue;
      }
      if (!best_defined || *cell.trace.val_value > best_key) {
        best = idx;
        best_key = *cell.trace.val_value;
        best_defined = true;
      }
    } else {
      if (best < 0 || cell.trace.val_cost < best_key) {
        best = idx;
        best_key = cell.trace.val_cost;
      }
    }
  }
  if (best < 0) throw std::runtime_error("optimize_binary_f: every grid cell failed to train");

  OptResult out;
  out.trace.reserve(cells.size());
  for (int idx = 0; idx < nt * nc; ++idx) {
    cells[idx].trace.chosen = idx == best;
    out.trace.push_back(cells[idx].trace);
  }
  out.models.push_back(cells[best].model);
  LabelSelection sel;
  sel.label = 1;
  sel.level = cells[best].trace.level;
  sel.c = cells[best].trace.c;
  sel.theta = cells[best].trace.theta;
  sel.val_value = cells[best].trace.val_value;
  sel.note = cells[best].trace.note;
  out.selection.push_back(sel);
  out.val_objective = cells[best].trace.val_value;
  return out;
}

// Per-label evaluation used by the multilabel drivers.
inline EvalReport evaluate_models(const std::vector<LinearModel>& models, const Dataset& ds,
                                  const MeasureSpec& spec) {
  spec.validate();
  if (spec.task() == TaskKind::multiclass)
    throw std::invalid_argument("evaluate_models: multiclass training is unsupported");
  EvalReport rep;
  if (spec.task() == TaskKind::binary) {
    if (models.size() != 1) throw std::invalid_argument("evaluate_models: one model expected");
    if (ds.multilabel) throw std::invalid_argument("evaluate_models: binary dataset expected");
    auto pred = predict_binary(models[0], ds);
    rep.profile = error_profile(pred, ds.labels, spec);
    rep.value = try_measure_value(spec, rep.profile);
    return rep;
  }
  if (!ds.multilabel) throw std::invalid_argument("evaluate_models: multilabel dataset expected");
  if (models.size() != static_cast<std::size_t>(spec.num_labels))
    throw std::invalid_argument("evaluate_models: one model per label expected");
  std::vector<std::vector<int>> pred_sets(ds.size());
  for (int k = 0; k < spec.num_labels; ++k) {
    auto scores = predict_scores(models[k], ds);
    for (int i = 0; i < ds.size(); ++i)
      if (scores[i] >= models[k].threshold) pred_sets[i].push_back(k + 1);
  }
  rep.profile = error_profile(pred_sets, ds.label_sets, spec);
  rep.value = try_measure_value(spec, rep.profile);
  auto per_label_spec = MeasureSpec::binary_f(spec.beta);
  rep.per_label.resize(spec.num_labels);
  for (int k = 0; k < spec.num_labels; ++k) {
    ErrorProfile b;
    b.num_labels = 2;
    b.fn = {rep.profile.fn[k], rep.profile.fp[k]};
    b.fp = {rep.profile.fp[k], rep.profile.fn[k]};
    b.priors = {rep.profile.priors[k], 1.0 - rep.profile.priors[k]};
    rep.per_label[k] = try_measure_value(per_label_spec, b);
  }
  return rep;
}

// Binary relevance: run the binary search independently per label; the macro
// measure is the mean of per-label validation values, with undefined labels
// contributing zero (noted in the selection).
inline OptResult optimize_macro_f(const Dataset& train, const Dataset& val,
                                  const MeasureSpec& spec, const std::vector<double>& levels,
                                  const SearchConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (spec.kind != MeasureKind::macro_f)
    throw std::invalid_argument("optimize_macro_f: macro-F measure required");
  if (!train.multilabel || !val.multilabel)
    throw std::invalid_argument("optimize_macro_f: multilabel datasets required");

  auto binary_spec = MeasureSpec::binary_f(spec.beta);
  OptResult out;
  double macro_sum = 0.0;
  for (int k = 1; k <= spec.num_labels; ++k) {
    Dataset train_b = binary_relevance_view(train, k);
    Dataset val_b = binary_relevance_view(val, k);
    bool present = std::find(train_b.labels.begin(), train_b.labels.end(), 1) != train_b.labels.end();
    if (!present) {
      out.models.push_back(detail::constant_negative_model(train.dim, cfg.loss));
      LabelSelection sel;
      sel.label = k;
      sel.theta = 1.0;
      sel.note = "label absent from training split; constant-negative model";
      out.selection.push_back(sel);
      TraceCell cell;
      cell.label = k;
      cell.note = sel.note;
      out.trace.push_back(cell);
      continue;
    }
    OptResult sub = optimize_binary_f(train_b, val_b, binary_spec, levels, cfg);
    for (auto& cell : sub.trace) {
      cell.label = k;
      out.trace.push_back(cell);
    }
    sub.selection[0].label = k;
    if (sub.selection[0].val_value)
      macro_sum += *sub.selection[0].val_value;
    else
      sub.selection[0].note =
          sub.selection[0].note.empty() ? "validation value undefined; counted as 0"
                                        : sub.selection[0].note;
    out.selection.push_back(sub.selection[0]);
    out.models.push_back(std::move(sub.models[0]));
  }
  out.val_objective = macro_sum / spec.num_labels;
  return out;
}

// Micro-F driver. All (level, label, C) cells are trained once; the two
// selection strategies read the same cache:
//   cost_min — per level, each label picks (C, theta) minimizing the label's
//     weighted cost on validation; the level maximizing validation micro-F
//     wins (the algorithm's printed rule).
//   value_max — each label independently picks (level, C, theta) maximizing
//     its own binary validation F; reported for comparison.
struct MicroOptResult {
  OptResult cost_min;
  OptResult value_max;
  std::vector<TraceCell> trace;  // shared by both strategies
};

inline MicroOptResult optimize_micro_f(const Dataset& train, const Dataset& val,
                                       const MeasureSpec& spec, const std::vector<double>& levels,
                                       const SearchConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (spec.kind != MeasureKind::micro_multilabel_f &&
      spec.kind != MeasureKind::micro_multilabel_jaccard)
    throw std::invalid_argument("optimize_micro_f: micro multilabel measure required");
  if (!train.multilabel || !val.multilabel)
    throw std::invalid_argument("optimize_micro_f: multilabel datasets required");
  if (levels.empty()) throw std::invalid_argument("optimize_micro_f: empty level grid");

  int L = spec.num_labels;
  int nt = static_cast<int>(levels.size());
  int nc = static_cast<int>(cfg.c_grid.size());
  auto binary_spec = MeasureSpec::binary_f(spec.beta);

  struct Cell {
    LinearModel model;   // trained weights (threshold unset)
    double theta_cost = 0.0;
    double cost = std::numeric_limits<double>::infinity();
    double theta_value = 0.0;
    std::optional<double> value;
    bool ok = false;
    std::string note;
  };
  std::vector<Dataset> train_views, val_views;
  std::vector<bool> present(L);
  for (int k = 1; k <= L; ++k) {
    train_views.push_back(binary_relevance_view(train, k));
    val_views.push_back(binary_relevance_view(val, k));
    present[k - 1] = std::find(train_views.back().labels.begin(), train_views.back().labels.end(),
                               1) != train_views.back().labels.end();
  }

  std::vector<Cell> cells(static_cast<std::size_t>(nt) * L * nc);
  auto cell_at = [&](int ti, int k, int ci) -> Cell& {
    return cells[(static_cast<std::size_t>(ti) * L + k) * nc + ci];
  };
  detail::parallel_for(nt * L * nc, cfg.workers, [&](int idx) {
    int ci = idx % nc;
    int k = (idx / nc) % L;
    int ti = idx / (nc * L);
    Cell& cell = cells[idx];
    if (!present[k]) {
      cell.note = "label absent from training split";
      return;
    }
    try {
      // The shared cost pair of this level, identical for every label.
      double b2 = spec.beta * spec.beta;
      double cost_fn = spec.is_jaccard() ? 1.0 : 1.0 + b2 - levels[ti];
      double cost_fp = levels[ti];
      TrainConfig tc;
      tc.regularization = cfg.c_grid[ci];
      tc.cost_fn = cost_fn;
      tc.cost_fp = cost_fp;
      tc.loss = cfg.loss;
      tc.max_iterations = cfg.max_iterations;
      tc.gradient_tolerance = cfg.gradient_tolerance;
      cell.model = train_weighted_linear(train_views[k], tc);
      cell.model.cost_level = levels[ti];
      auto scores = predict_scores(cell.model, val_views[k]);
      CostVector label_cost;
      label_cost.costs = {cost_fn, cost_fp, 0.0, 0.0};
      label_cost.level = levels[ti];
      auto by_cost = tune_threshold(scores, val_views[k].labels, label_cost);
      cell.theta_cost = by_cost.threshold;
      cell.cost = by_cost.value.value_or(std::numeric_limits<double>::infinity());
      auto by_value = tune_threshold(scores, val_views[k].labels, binary_spec);
      cell.theta_value = by_value.threshold;
      cell.value = by_value.value;
      cell.ok = true;
    } catch (const std::exception& ex) {
      cell.note = std::string("skipped: ") + ex.what();
    }
  });

  MicroOptResult out;
  // cost_min: assemble per level, then pick the level by validation micro
  // value; ties break toward the smaller level via strict comparison.
  int best_ti = -1;
  std::optional<double> best_micro;
  std::vector<int> best_cs;
  std::vector<LinearModel> best_models;
  for (int ti = 0; ti < nt; ++ti) {
    std::vector<LinearModel> assembly;
    std::vector<int> chosen_c(L, -1);
    bool any = false;
    for (int k = 0; k < L; ++k) {
      if (!present[k]) {
        assembly.push_back(detail::constant_negative_model(train.dim, cfg.loss));
        continue;
      }
      int best_ci = -1;
      double best_cost = std::numeric_limits<double>::infinity();
      for (int ci = 0; ci < nc; ++ci) {
        const Cell& cell = cell_at(ti, k, ci);
        if (!cell.ok) continue;
        if (best_ci < 0 || cell.cost < best_cost) {
          best_ci = ci;
          best_cost = cell.cost;
        }
      }
      if (best_ci < 0) {
        assembly.push_back(detail::constant_negative_model(train.dim, cfg.loss));
        continue;
      }
      any = true;
      chosen_c[k] = best_ci;
      LinearModel m = cell_at(ti, k, best_ci).model;
      m.threshold = cell_at(ti, k, best_ci).theta_cost;
      assembly.push_back(std::move(m));
    }
    if (!any) continue;
    auto val_rep = evaluate_models(assembly, val, spec);
    if (val_rep.value && (!best_micro || *val_rep.value > *best_micro)) {
      best_ti = ti;
      best_micro = val_rep.value;
      best_cs = chosen_c;
      best_models = std::move(assembly);
    }
  }
  if (best_ti < 0) throw std::runtime_error("optimize_micro_f: every grid cell failed to train");
  out.cost_min.models = std::move(best_models);
  out.cost_min.val_objective = best_micro;
  for (int k = 0; k < L; ++k) {
    LabelSelection sel;
    sel.label = k + 1;
    sel.level = levels[best_ti];
    if (best_cs[k] >= 0) {
      const Cell& cell = cell_at(best_ti, k, best_cs[k]);
      sel.c = cfg.c_grid[best_cs[k]];
      sel.theta = cell.theta_cost;
      sel.val_value = cell.value;
    } else {
      sel.theta = 1.0;
      sel.note = present[k] ? "no trainable cell; constant-negative model"
                            : "label absent from training split; constant-negative model";
    }
    out.cost_min.selection.push_back(sel);
  }

  // value_max: per-label best cell by validation F over every (level, C).
  std::vector<LinearModel> vmax_models;
  for (int k = 0; k < L; ++k) {
    int sel_ti = -1, sel_ci = -1;
    double best_val = 0.0;
    bool have = false;
    for (int ti = 0; ti < nt; ++ti)
      for (int ci = 0; ci < nc; ++ci) {
        const Cell& cell = cell_at(ti, k, ci);
        if (!cell.ok || !cell.value) continue;
        if (!have || *cell.value > best_val) {
          have = true;
          best_val = *cell.value;
          sel_ti = ti;
          sel_ci = ci;
        }
      }
    LabelSelection sel;
    sel.label = k + 1;
    if (!have) {
      vmax_models.push_back(detail::constant_negative_model(train.dim, cfg.loss));
      sel.theta = 1.0;
      sel.note = present[k] ? "validation F undefined everywhere; constant-negative model"
                            : "label absent from training split; constant-negative model";
    } else {
      const Cell& cell = cell_at(sel_ti, k, sel_ci);
      LinearModel m = cell.model;
      m.threshold = cell.theta_value;
      vmax_models.push_back(std::move(m));
      sel.level = levels[sel_ti];
      sel.c = cfg.c_grid[sel_ci];
      sel.theta = cell.theta_value;
      sel.val_value = cell.value;
    }
    out.value_max.selection.push_back(sel);
  }
  out.value_max.models = std::move(vmax_models);
  auto vmax_rep = evaluate_models(out.value_max.models, val, spec);
  out.value_max.val_objective = vmax_rep.value;

  // Shared trace: theta/val_cost reflect the cost tuning (the printed inner
  // rule), val_value the F tuning; chosen marks the cost_min assembly.
  for (int ti = 0; ti < nt; ++ti)
    for (int k = 0; k < L; ++k)
      for (int ci = 0; ci < nc; ++ci) {
        const Cell& cell = cell_at(ti, k, ci);
        TraceCell tr;
        tr.label = k + 1;
        tr.level = levels[ti];
        tr.c = cfg.c_grid[ci];
        tr.val_value = cell.value;
        tr.val_cost = cell.cost;
        tr.theta = cell.theta_cost;
        tr.chosen = ti == best_ti && best_cs[k] == ci;
        tr.note = cell.note;
        out.trace.push_back(tr);
      }
  return out;
}

// Narrows [lo, hi] by repeated five-point evaluation (ends, midpoint, two
// quarter points), keeping the half-width interval centered on the dominant
// interior point; ties break toward the left. Points live on a dyadic integer
// grid so revisited points are bit-identical and the memo hits. The returned
// interval always contains the best evaluated point: if a non-quasi-concave
// input drives the loop away from it, the interval is recentered on it.
struct BracketResult {
  double lo = 0.0;
  double hi = 0.0;
  int evaluations = 0;
  bool tied = false;       // some step saw all interior points equal
  bool recentered = false;  // non-quasi-concave input triggered the fallback
};

inline BracketResult bracket_interval(const std::function<double(double)>& f, double lo, double hi,
                                      double min_width) {
  if (!(hi > lo)) throw std::invalid_argument("bracket_interval: empty range");
  if (!(min_width > 0.0)) throw std::invalid_argument("bracket_interval: min_width must be positive");
  BracketResult out;
  out.lo = lo;
  out.hi = hi;
  double range = hi - lo;
  if (range <= min_width) return out;
  int m = 1;
  while (range / std::pow(2.0, m) > min_width) ++m;
  long long D = 4LL << m;
  std::map<long long, double> memo;
  double best_seen = -std::numeric_limits<double>::infinity();
  long long best_pos = 0;
  auto eval = [&](long long p) {
    auto it = memo.find(p);
    if (it != memo.end()) return it->second;
    double v = f(lo + range * (static_cast<double>(p) / static_cast<double>(D)));
    ++out.evaluations;
    memo.emplace(p, v);
    if (v > best_seen) {
      best_seen = v;
      best_pos = p;
    }
    return v;
  };
  long long a = 0, b = D;
  while (range * static_cast<double>(b - a) / static_cast<double>(D) > min_width && b - a >= 4) {
    long long q = (b - a) / 4;
    eval(a);
    eval(b);
    double v1 = eval(a + q), v2 = eval(a + 2 * q), v3 = eval(a + 3 * q);
    long long center = a + q;
    double best_interior = v1;
    if (v2 > best_interior) {
      best_interior = v2;
      center = a + 2 * q;
    }
    if (v3 > best_interior) {
      best_interior = v3;
      center = a + 3 * q;
    }
    if (v1 == v2 && v2 == v3) out.tied = true;
    a = center - q;
    b = center + q;
  }
  if (best_pos < a || best_pos > b) {
    long long w = b - a;
    a = std::clamp(best_pos - w / 2, 0LL, D - w);
    b = a + w;
    out.recentered = true;
  }
  out.lo = lo + range * (static_cast<double>(a) / static_cast<double>(D));
  out.hi = lo + range * (static_cast<double>(b) / static_cast<double>(D));
  return out;
}

}  // namespace plopt
