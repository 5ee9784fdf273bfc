#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "plopt/dataset.hpp"
#include "plopt/random.hpp"

namespace plopt {

namespace detail {

inline std::runtime_error parse_error(const char* what, std::size_t line_no, std::string_view tok) {
  std::string msg = "parse error at line " + std::to_string(line_no) + ": " + what;
  if (!tok.empty()) msg += " ('" + std::string(tok) + "')";
  return std::runtime_error(msg);
}

// from_chars does not accept an explicit '+' sign, but "+1" labels are the
// libsvm convention, so strip one here.
inline std::string_view drop_plus(std::string_view tok) {
  if (tok.size() > 1 && tok.front() == '+') tok.remove_prefix(1);
  return tok;
}

inline double parse_double(std::string_view tok, std::size_t line_no) {
  auto body = drop_plus(tok);
  double v = 0.0;
  auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || p != body.data() + body.size())
    throw parse_error("bad number", line_no, tok);
  return v;
}

inline int parse_int(std::string_view tok, std::size_t line_no) {
  auto body = drop_plus(tok);
  int v = 0;
  auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || p != body.data() + body.size())
    throw parse_error("bad integer", line_no, tok);
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

// Parses libsvm-format text. Binary labels may be written +1/-1 (or 1/-1/0,
// where non-positive means negative) and are mapped to classes 1/2;
// multilabel rows start with a comma-separated label list, possibly empty.
// A bias column of constant value `bias_value` is appended after the highest
// feature index unless bias_value == 0.
inline Dataset parse_libsvm(std::string_view text, bool multilabel, double bias_value = 100.0) {
  Dataset ds;
  ds.multilabel = multilabel;
  int max_index = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;

    std::vector<Feature> row;
    std::size_t first_feature = 1;
    if (multilabel) {
      std::vector<int> set;
      std::string_view head = toks[0];
      // A bare feature token means the label list is empty.
      if (head.find(':') != std::string_view::npos) {
        first_feature = 0;
      } else {
        std::size_t i = 0;
        while (i < head.size()) {
          std::size_t j = head.find(',', i);
          if (j == std::string_view::npos) j = head.size();
          if (j > i) set.push_back(detail::parse_int(head.substr(i, j - i), line_no));
          i = j + 1;
        }
        for (int v : set)
          if (v < 1) throw detail::parse_error("label must be >= 1", line_no, head);
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
      }
      ds.label_sets.push_back(std::move(set));
      if (first_feature == 0) ds.label_sets.back().clear();
    } else {
      double y = detail::parse_double(toks[0], line_no);
      if (y == 1.0)
        ds.labels.push_back(1);
      else if (y == -1.0 || y == 0.0 || y == 2.0)
        ds.labels.push_back(2);
      else
        throw detail::parse_error("unsupported binary label", line_no, toks[0]);
    }

    int prev = 0;
    for (std::size_t i = first_feature; i < toks.size(); ++i) {
      std::string_view tok = toks[i];
      auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw detail::parse_error("expected index:value", line_no, tok);
      int idx = detail::parse_int(tok.substr(0, colon), line_no);
      double val = detail::parse_double(tok.substr(colon + 1), line_no);
      if (idx < 1) throw detail::parse_error("feature index must be >= 1", line_no, tok);
      if (idx <= prev) throw detail::parse_error("feature indices must be ascending", line_no, tok);
      prev = idx;
      row.push_back({idx, val});
      max_index = std::max(max_index, idx);
    }
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty()) throw std::runtime_error("parse error: empty dataset");
  ds.dim = max_index;
  if (bias_value != 0.0) {
    ds.bias_index = ++ds.dim;
    ds.bias_value = bias_value;
    for (auto& row : ds.rows) row.push_back({ds.bias_index, bias_value});
  }
  ds.validate();
  return ds;
}

// Appends a constant bias column at `index`, which must lie beyond every
// existing feature. Lets callers parse several files with bias_value = 0,
// unify their dims, and then add one shared bias column.
inline void append_bias(Dataset& ds, int index, double value) {
  if (ds.bias_index != 0) throw std::invalid_argument("append_bias: bias already present");
  if (index <= ds.dim) throw std::invalid_argument("append_bias: index collides with features");
  if (value == 0.0) return;
  ds.dim = index;
  ds.bias_index = index;
  ds.bias_value = value;
  for (auto& row : ds.rows) row.push_back({index, value});
  ds.validate();
}

inline std::string serialize_libsvm(const Dataset& ds) {
  std::ostringstream out;
  char buf[64];
  for (int i = 0; i < ds.size(); ++i) {
    if (ds.multilabel) {
      const auto& set = ds.label_sets[i];
      for (std::size_t k = 0; k < set.size(); ++k) out << (k ? "," : "") << set[k];
    } else {
      out << (ds.labels[i] == 1 ? "+1" : "-1");
    }
    for (const auto& f : ds.rows[i]) {
      if (f.index == ds.bias_index) continue;  // bias is re-appended on parse
      std::snprintf(buf, sizeof buf, " %d:%.17g", f.index, f.value);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

// Deterministic shuffled splits. Each (seed, replicate) pair yields its own
// permutation; fractions follow the usual protocol of carving the test part
// first and then a validation part from the remainder.
struct SplitSpec {
  std::uint64_t seed = 0;
  double val_fraction = 1.0 / 3.0;
  double test_fraction = 1.0 / 4.0;
  int replicates = 5;
};

struct SplitResult {
  Dataset train;
  Dataset val;
  std::optional<Dataset> test;
};

inline SplitResult split_dataset(const Dataset& ds, const SplitSpec& spec, int replicate,
                                 bool carve_test) {
  if (replicate < 0 || replicate >= spec.replicates)
    throw std::invalid_argument("split_dataset: replicate out of range");
  if (!(spec.val_fraction > 0.0 && spec.val_fraction < 1.0))
    throw std::invalid_argument("split_dataset: val_fraction out of (0,1)");
  if (carve_test && !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw std::invalid_argument("split_dataset: test_fraction out of (0,1)");
  int n = ds.size();
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  Rng rng(Rng::mix(spec.seed, static_cast<std::uint64_t>(replicate)));
  rng.shuffle(idx);

  SplitResult out;
  int cut = 0;
  if (carve_test) {
    int n_test = std::max(1, static_cast<int>(std::llround(n * spec.test_fraction)));
    if (n_test >= n) throw std::invalid_argument("split_dataset: test part swallows dataset");
    out.test = ds.select({idx.begin(), idx.begin() + n_test});
    cut = n_test;
  }
  int m = n - cut;
  int n_val = std::max(1, static_cast<int>(std::llround(m * spec.val_fraction)));
  if (n_val >= m) throw std::invalid_argument("split_dataset: validation part swallows train");
  out.val = ds.select({idx.begin() + cut, idx.begin() + cut + n_val});
  out.train = ds.select({idx.begin() + cut + n_val, idx.end()});
  return out;
}

// Galaxy mixture: four isotropic Gaussian clusters with very different sizes
// and positive rates, built so the positive mass hides inside two clusters
// that a vanilla learner ignores. Cluster priors and positive rates are the
// defining parameters; geometry keeps the two positive-heavy clusters
// linearly separable from the rest.
struct GalaxySpec {
  int n = 20000;
  std::uint64_t seed = 1;
  std::array<double, 4> cluster_priors{0.01, 0.1, 0.001, 0.889};
  std::array<double, 4> positive_rates{0.9, 0.09, 0.9, 0.0};
  std::array<std::array<double, 2>, 4> centers{{{0.0, 0.0}, {4.0, 0.0}, {0.0, 4.0}, {4.0, 4.0}}};
  double stddev = 0.5;
  double bias_value = 100.0;

  double positive_prior() const {
    double p = 0.0;
    for (int c = 0; c < 4; ++c) p += cluster_priors[c] * positive_rates[c];
    return p;
  }
};

struct GalaxySample {
  Dataset data;            // 2 features + bias column, labels 1/2
  std::vector<int> clusters;  // 0-based cluster of each example
};

inline GalaxySample generate_galaxy(const GalaxySpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("generate_galaxy: n must be positive");
  double prior_sum = 0.0;
  for (double p : spec.cluster_priors) {
    if (p < 0.0) throw std::invalid_argument("generate_galaxy: negative cluster prior");
    prior_sum += p;
  }
  if (std::abs(prior_sum - 1.0) > 1e-9)
    throw std::invalid_argument("generate_galaxy: cluster priors must sum to 1");
  for (double r : spec.positive_rates)
    if (r < 0.0 || r > 1.0) throw std::invalid_argument("generate_galaxy: positive rate out of [0,1]");

  GalaxySample out;
  out.data.dim = 2;
  out.data.multilabel = false;
  Rng rng(spec.seed);
  for (int i = 0; i < spec.n; ++i) {
    double u = rng.uniform();
    int c = 0;
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) {
      acc += spec.cluster_priors[k];
      if (u < acc || k == 3) {
        c = k;
        break;
      }
    }
    double x1 = spec.centers[c][0] + spec.stddev * rng.gaussian();
    double x2 = spec.centers[c][1] + spec.stddev * rng.gaussian();
    bool positive = rng.uniform() < spec.positive_rates[c];
    out.data.rows.push_back({{1, x1}, {2, x2}});
    out.data.labels.push_back(positive ? 1 : 2);
    out.clusters.push_back(c);
  }
  if (spec.bias_value != 0.0) {
    out.data.bias_index = ++out.data.dim;
    out.data.bias_value = spec.bias_value;
    for (auto& row : out.data.rows) row.push_back({out.data.bias_index, spec.bias_value});
  }
  out.data.validate();
  return out;
}

}  // namespace plopt
