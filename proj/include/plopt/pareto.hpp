#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "plopt/metrics.hpp"
#include "plopt/random.hpp"

namespace plopt {

// A finite distribution over feature points: each point carries a probability
// mass and a conditional label distribution. Binary points hold a single
// P(label 1 | x); multiclass points hold L probabilities summing to 1;
// multilabel points hold L independent per-label marginals.
struct DistributionPoint {
  double mass = 0.0;
  std::vector<double> cond;
};

struct FiniteDistribution {
  TaskKind task = TaskKind::binary;
  int num_labels = 2;
  std::vector<DistributionPoint> points;

  void validate() const {
    if (points.empty()) throw std::invalid_argument("FiniteDistribution: no points");
    int min_labels = task == TaskKind::multilabel ? 1 : 2;
    if (num_labels < min_labels)
      throw std::invalid_argument("FiniteDistribution: too few labels");
    if (task == TaskKind::binary && num_labels != 2)
      throw std::invalid_argument("FiniteDistribution: binary task needs num_labels == 2");
    double total = 0.0;
    for (const auto& p : points) {
      if (!(p.mass > 0.0)) throw std::invalid_argument("FiniteDistribution: nonpositive mass");
      total += p.mass;
      std::size_t want = task == TaskKind::binary ? 1 : static_cast<std::size_t>(num_labels);
      if (p.cond.size() != want)
        throw std::invalid_argument("FiniteDistribution: conditional size mismatch");
      double csum = 0.0;
      for (double q : p.cond) {
        if (q < 0.0 || q > 1.0)
          throw std::invalid_argument("FiniteDistribution: conditional out of [0,1]");
        csum += q;
      }
      if (task == TaskKind::multiclass && std::abs(csum - 1.0) > 1e-9)
        throw std::invalid_argument("FiniteDistribution: multiclass conditional must sum to 1");
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("FiniteDistribution: masses must sum to 1");
  }

  // Marginal P(label k present) for each label.
  std::vector<double> priors() const {
    std::vector<double> pri(num_labels, 0.0);
    for (const auto& p : points) {
      if (task == TaskKind::binary) {
        pri[0] += p.mass * p.cond[0];
        pri[1] += p.mass * (1.0 - p.cond[0]);
      } else {
        for (int k = 0; k < num_labels; ++k) pri[k] += p.mass * p.cond[k];
      }
    }
    return pri;
  }
};

// Text format: '#' starts a comment, each remaining line is
// "mass q1 [q2 ... qL]". The expected task decides how the conditionals are
// read; binary lines carry exactly one conditional. Values may be written as
// ratios "p/q"; division rounds once, so dyadic ratios stay exact.
inline FiniteDistribution parse_distribution(std::string_view text, TaskKind task, int num_labels) {
  FiniteDistribution dist;
  dist.task = task;
  dist.num_labels = num_labels;
  auto parse_value = [](const std::string& tok, std::size_t line_no) {
    std::istringstream in{tok};
    double num;
    if (!(in >> num))
      throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": bad number ('" +
                               tok + "')");
    if (in.peek() == '/') {
      in.get();
      double den;
      if (!(in >> den) || den == 0.0)
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": bad ratio ('" + tok + "')");
      num /= den;
    }
    if (!in.eof() && (in >> std::ws, !in.eof()))
      throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": bad number ('" +
                               tok + "')");
    return num;
  };
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::istringstream in{std::string(line)};
    std::vector<double> vals;
    std::string tok;
    while (in >> tok) vals.push_back(parse_value(tok, line_no));
    if (vals.empty()) continue;
    std::size_t want = 1 + (task == TaskKind::binary ? 1 : static_cast<std::size_t>(num_labels));
    if (vals.size() != want)
      throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": expected " +
                               std::to_string(want) + " numbers, got " + std::to_string(vals.size()));
    DistributionPoint p;
    p.mass = vals[0];
    p.cond.assign(vals.begin() + 1, vals.end());
    dist.points.push_back(std::move(p));
  }
  dist.validate();
  return dist;
}

// One deterministic classifier on the distribution's points, with its exact
// population error profile. The assignment stores, per point, the predicted
// label (binary/multiclass) or the predicted label subset as a bitmask
// (multilabel).
struct ProfileEntry {
  std::vector<int> assignment;
  ErrorProfile profile;
};

struct ProfileSet {
  std::vector<ProfileEntry> entries;
  double max_norm = 0.0;  // max over entries of ||flat(profile)||_2
};

namespace detail {

inline ErrorProfile profile_of_assignment(const FiniteDistribution& dist,
                                          std::span<const int> assignment,
                                          std::span<const double> priors) {
  int L = dist.num_labels;
  ErrorProfile e;
  e.num_labels = L;
  e.fn.assign(L, 0.0);
  e.fp.assign(L, 0.0);
  e.priors.assign(priors.begin(), priors.end());
  for (std::size_t i = 0; i < dist.points.size(); ++i) {
    const auto& p = dist.points[i];
    if (dist.task == TaskKind::binary) {
      double pos = p.cond[0];
      if (assignment[i] == 1)
        e.fp[0] += p.mass * (1.0 - pos);  // predicted positive, actually negative
      else
        e.fn[0] += p.mass * pos;
    } else if (dist.task == TaskKind::multiclass) {
      int h = assignment[i];
      for (int k = 0; k < L; ++k) {
        if (k + 1 == h)
          e.fp[k] += p.mass * (1.0 - p.cond[k]);
        else
          e.fn[k] += p.mass * p.cond[k];
      }
    } else {
      auto mask = static_cast<unsigned>(assignment[i]);
      for (int k = 0; k < L; ++k) {
        if (mask & (1u << k))
          e.fp[k] += p.mass * (1.0 - p.cond[k]);
        else
          e.fn[k] += p.mass * p.cond[k];
      }
    }
  }
  if (dist.task == TaskKind::binary) {
    e.fn[1] = e.fp[0];
    e.fp[1] = e.fn[0];
  }
  return e;
}

inline double flat_norm(const ErrorProfile& e) {
  double s = 0.0;
  for (int k = 0; k < e.num_labels; ++k) s += e.fn[k] * e.fn[k] + e.fp[k] * e.fp[k];
  return std::sqrt(s);
}

}  // namespace detail

// Exact error profiles of every deterministic point-wise classifier on the
// distribution. The number of classifiers is |choices|^n with |choices| = 2
// (binary), L (multiclass) or 2^L (multilabel); enumeration refuses to start
// past `cap` classifiers.
inline ProfileSet enumerate_profiles(const FiniteDistribution& dist, std::uint64_t cap = 1u << 20) {
  dist.validate();
  auto n = dist.points.size();
  std::uint64_t choices;
  switch (dist.task) {
    case TaskKind::binary: choices = 2; break;
    case TaskKind::multiclass: choices = static_cast<std::uint64_t>(dist.num_labels); break;
    default: choices = std::uint64_t{1} << dist.num_labels; break;
  }
  long double total_ld = 1.0L;
  for (std::size_t i = 0; i < n; ++i) total_ld *= choices;
  if (total_ld > static_cast<long double>(cap))
    throw std::invalid_argument("enumerate_profiles: classifier count exceeds cap");
  auto total = static_cast<std::uint64_t>(total_ld);
  auto priors = dist.priors();

  ProfileSet out;
  out.entries.reserve(total);
  std::vector<int> assignment(n);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t rest = code;
    for (std::size_t i = 0; i < n; ++i) {
      auto digit = static_cast<int>(rest % choices);
      rest /= choices;
      if (dist.task == TaskKind::binary)
        assignment[i] = digit + 1;  // 1 = positive, 2 = negative
      else if (dist.task == TaskKind::multiclass)
        assignment[i] = digit + 1;
      else
        assignment[i] = digit;  // label subset bitmask
    }
    ProfileEntry entry;
    entry.assignment = assignment;
    entry.profile = detail::profile_of_assignment(dist, assignment, priors);
    out.max_norm = std::max(out.max_norm, detail::flat_norm(entry.profile));
    out.entries.push_back(std::move(entry));
  }
  return out;
}

// Indices of entries whose profiles are not componentwise dominated. Profiles
// equal within 1e-12 count as duplicates and only the first index survives.
inline std::vector<int> pareto_front(const ProfileSet& set) {
  auto m = set.entries.size();
  std::vector<std::vector<double>> flats(m);
  for (std::size_t i = 0; i < m; ++i) flats[i] = set.entries[i].profile.flat();
  auto duplicate = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < flats[i].size(); ++k)
      if (std::abs(flats[i][k] - flats[j][k]) > 1e-12) return false;
    return true;
  };
  // j dominates i: j <= i everywhere and strictly somewhere.
  auto dominates = [&](std::size_t j, std::size_t i) {
    bool strict = false;
    for (std::size_t k = 0; k < flats[i].size(); ++k) {
      if (flats[j][k] > flats[i][k] + 1e-12) return false;
      if (flats[j][k] < flats[i][k] - 1e-12) strict = true;
    }
    return strict;
  };
  std::vector<int> front;
  for (std::size_t i = 0; i < m; ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < m && keep; ++j) {
      if (j == i) continue;
      if (dominates(j, i)) keep = false;
      if (j < i && duplicate(i, j)) keep = false;
    }
    if (keep) front.push_back(static_cast<int>(i));
  }
  return front;
}

// Vertices of the lower-left convex hull of the (fp, fn) cloud of a binary
// profile set, in ascending fp order. Only hull vertices can minimize a
// nonnegative cost vector, so these are the candidate optima. Collinear
// interior points are dropped.
inline std::vector<int> hull_candidates(const ProfileSet& set) {
  if (set.entries.empty()) throw std::invalid_argument("hull_candidates: empty set");
  for (const auto& e : set.entries)
    if (e.profile.num_labels != 2)
      throw std::invalid_argument("hull_candidates: binary profiles only");
  std::vector<int> order(set.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  auto x = [&](int i) { return set.entries[i].profile.fp[0]; };
  auto y = [&](int i) { return set.entries[i].profile.fn[0]; };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (x(a) != x(b)) return x(a) < x(b);
    if (y(a) != y(b)) return y(a) < y(b);
    return a < b;  // duplicates resolve to the first witness, as in the front
  });
  // For equal fp keep only the lowest fn.
  std::vector<int> pts;
  for (int i : order) {
    if (!pts.empty() && std::abs(x(pts.back()) - x(i)) <= 1e-12) continue;
    pts.push_back(i);
  }
  std::vector<int> hull;
  auto cross = [&](int o, int a, int b) {
    return (x(a) - x(o)) * (y(b) - y(o)) - (y(a) - y(o)) * (x(b) - x(o));
  };
  for (int i : pts) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), i) <= 1e-15) hull.pop_back();
    hull.push_back(i);
  }
  // A flat-or-rising tail means the rightmost point is dominated (same or
  // higher fn at larger fp); only the chain that strictly descends in fn can
  // minimize a nonnegative cost without being beaten on both coordinates.
  while (hull.size() >= 2 && y(hull[hull.size() - 2]) <= y(hull.back()) + 1e-12) hull.pop_back();
  return hull;
}

// Indices minimizing <costs, flat(e)> within `tol` of the minimum.
inline std::vector<int> best_for_cost(const ProfileSet& set, const CostVector& cv,
                                      double tol = 1e-12) {
  cv.validate();
  if (set.entries.empty()) throw std::invalid_argument("best_for_cost: empty set");
  std::vector<double> costs(set.entries.size());
  double cmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.entries.size(); ++i) {
    costs[i] = weighted_cost(cv, set.entries[i].profile);
    cmin = std::min(cmin, costs[i]);
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < set.entries.size(); ++i)
    if (costs[i] <= cmin + tol) out.push_back(static_cast<int>(i));
  return out;
}

// Brute-force check of the optimal-cost characterization: with a* the cost
// vector at level F* (the exact maximum of the measure over all classifiers),
// the classifiers minimizing <a*, e> are exactly the measure-optimal ones.
struct ReductionReport {
  double best_value = 0.0;
  CostVector best_cost;
  std::vector<int> optimal;          // measure-optimal entry indices
  std::vector<int> cost_minimizers;  // <a*, .>-minimizing entry indices
  std::vector<std::string> violations;
  bool passed = false;
};

inline ReductionReport verify_reduction(const FiniteDistribution& dist, const MeasureSpec& spec,
                                        std::uint64_t cap = 1u << 20) {
  spec.validate();
  if (spec.task() != dist.task || spec.num_labels != dist.num_labels)
    throw std::invalid_argument("verify_reduction: measure/distribution mismatch");
  auto set = enumerate_profiles(dist, cap);
  auto priors = dist.priors();

  ReductionReport rep;
  std::vector<std::optional<double>> values(set.entries.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.entries.size(); ++i) {
    values[i] = try_measure_value(spec, set.entries[i].profile);
    if (values[i] && *values[i] > best) best = *values[i];
  }
  if (!std::isfinite(best))
    throw std::domain_error("verify_reduction: measure undefined for every classifier");
  rep.best_value = best;
  rep.best_cost = cost_vector(spec, best, priors);
  for (std::size_t i = 0; i < set.entries.size(); ++i)
    if (values[i] && *values[i] >= best - 1e-12) rep.optimal.push_back(static_cast<int>(i));
  rep.cost_minimizers = best_for_cost(set, rep.best_cost);

  auto contains = [](const std::vector<int>& v, int x) {
    return std::binary_search(v.begin(), v.end(), x);
  };
  for (int i : rep.optimal)
    if (!contains(rep.cost_minimizers, i))
      rep.violations.push_back("optimal entry " + std::to_string(i) + " does not minimize cost");
  for (int i : rep.cost_minimizers)
    if (!contains(rep.optimal, i))
      rep.violations.push_back("cost minimizer " + std::to_string(i) + " is not measure-optimal");
  rep.passed = rep.violations.empty();
  return rep;
}

// Brute-force check of the approximation bound: perturb the optimal cost
// vector within an eps0 ball (clipping keeps costs nonnegative, which only
// shrinks the distance), take every eps1-optimal classifier under the
// perturbed costs, and compare its measure value against
// F* - Phi * (2 * eps0 * M + eps1) where M is the largest profile norm.
struct PhiBoundReport {
  int samples = 0;
  int checked = 0;     // (perturbation, classifier) pairs examined
  int violations = 0;
  double max_ratio = 0.0;  // largest observed gap / bound, over positive bounds
  double phi = 0.0;
  double max_norm = 0.0;
  bool passed = false;
};

inline PhiBoundReport phi_bound_witness(const FiniteDistribution& dist, const MeasureSpec& spec,
                                        double epsilon0, double epsilon1, int samples,
                                        std::uint64_t seed, std::uint64_t cap = 1u << 20) {
  spec.validate();
  if (epsilon0 < 0.0 || epsilon1 < 0.0)
    throw std::invalid_argument("phi_bound_witness: negative epsilon");
  if (samples < 1) throw std::invalid_argument("phi_bound_witness: samples must be positive");
  auto set = enumerate_profiles(dist, cap);
  auto priors = dist.priors();
  double phi = discretization_factor(spec, priors);

  std::vector<std::optional<double>> values(set.entries.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.entries.size(); ++i) {
    values[i] = try_measure_value(spec, set.entries[i].profile);
    if (values[i] && *values[i] > best) best = *values[i];
  }
  if (!std::isfinite(best))
    throw std::domain_error("phi_bound_witness: measure undefined for every classifier");
  auto astar = cost_vector(spec, best, priors);

  PhiBoundReport rep;
  rep.samples = samples;
  rep.phi = phi;
  rep.max_norm = set.max_norm;
  double bound = phi * (2.0 * epsilon0 * set.max_norm + epsilon1);
  Rng rng(seed);
  std::size_t d = astar.costs.size();
  std::vector<double> delta(d);
  for (int s = 0; s < samples; ++s) {
    // Uniform draw from the eps0 ball: gaussian direction, radius u^(1/d).
    double norm2 = 0.0;
    for (auto& v : delta) {
      v = rng.gaussian();
      norm2 += v * v;
    }
    double r = epsilon0 * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    double scale = norm2 > 0.0 ? r / std::sqrt(norm2) : 0.0;
    CostVector perturbed = astar;
    for (std::size_t j = 0; j < d; ++j)
      perturbed.costs[j] = std::max(0.0, astar.costs[j] + scale * delta[j]);

    double cmin = std::numeric_limits<double>::infinity();
    std::vector<double> costs(set.entries.size());
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
      costs[i] = weighted_cost(perturbed, set.entries[i].profile);
      cmin = std::min(cmin, costs[i]);
    }
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
      if (costs[i] > cmin + epsilon1 + 1e-15) continue;
      ++rep.checked;
      double gap = values[i] ? best - *values[i] : std::numeric_limits<double>::infinity();
      if (gap > bound + 1e-12) ++rep.violations;
      if (bound > 0.0 && std::isfinite(gap)) rep.max_ratio = std::max(rep.max_ratio, gap / bound);
    }
  }
  rep.passed = rep.violations == 0;
  return rep;
}

}  // namespace plopt
