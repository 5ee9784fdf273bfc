#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace plopt {

// Sparse feature with a 1-based column index.
struct Feature {
  int index = 0;
  double value = 0.0;
};

// Sparse dataset. Binary and multiclass tasks fill `labels` with 1-based
// class indices (binary: 1 = positive, 2 = negative); multilabel tasks fill
// `label_sets` with sorted 1-based label indices. A bias column may be
// appended as the last feature of every row; `bias_index`/`bias_value`
// record it (bias_index == 0 means none).
struct Dataset {
  std::vector<std::vector<Feature>> rows;
  std::vector<int> labels;
  std::vector<std::vector<int>> label_sets;
  bool multilabel = false;
  int dim = 0;
  int bias_index = 0;
  double bias_value = 0.0;

  int size() const { return static_cast<int>(rows.size()); }

  void validate() const {
    if (multilabel) {
      if (label_sets.size() != rows.size())
        throw std::invalid_argument("Dataset: label_sets/rows size mismatch");
    } else if (labels.size() != rows.size()) {
      throw std::invalid_argument("Dataset: labels/rows size mismatch");
    }
    for (const auto& row : rows) {
      int prev = 0;
      for (const auto& f : row) {
        if (f.index <= prev) throw std::invalid_argument("Dataset: feature indices not ascending");
        if (f.index > dim) throw std::invalid_argument("Dataset: feature index beyond dim");
        prev = f.index;
      }
    }
  }

  Dataset select(const std::vector<int>& idx) const {
    Dataset out;
    out.multilabel = multilabel;
    out.dim = dim;
    out.bias_index = bias_index;
    out.bias_value = bias_value;
    out.rows.reserve(idx.size());
    for (int i : idx) {
      out.rows.push_back(rows[i]);
      if (multilabel)
        out.label_sets.push_back(label_sets[i]);
      else
        out.labels.push_back(labels[i]);
    }
    return out;
  }
};

// One-vs-rest view of a multilabel dataset: label present -> class 1,
// absent -> class 2. Rows are shared values, so this copies feature storage;
// fine at the sizes the search loops handle.
inline Dataset binary_relevance_view(const Dataset& ds, int label) {
  if (!ds.multilabel) throw std::invalid_argument("binary_relevance_view: dataset not multilabel");
  Dataset out = ds;
  out.multilabel = false;
  out.label_sets.clear();
  out.labels.resize(ds.rows.size());
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    const auto& set = ds.label_sets[i];
    bool has = std::find(set.begin(), set.end(), label) != set.end();
    out.labels[i] = has ? 1 : 2;
  }
  return out;
}

// Binary view of a multiclass label vector: class `positive` -> 1, rest -> 2.
inline Dataset one_vs_rest_view(const Dataset& ds, int positive) {
  if (ds.multilabel) throw std::invalid_argument("one_vs_rest_view: dataset is multilabel");
  Dataset out = ds;
  for (auto& y : out.labels) y = (y == positive) ? 1 : 2;
  return out;
}

}  // namespace plopt
