#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace catrob {

// Dense feature matrix, row-major n x dim (embedded or one-hot vectors).
struct Matrix {
  std::vector<double> data;
  int n = 0, dim = 0;

  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * dim; }
  double* row(int r) { return data.data() + static_cast<size_t>(r) * dim; }
  static Matrix zeros(int n, int dim) { return Matrix{std::vector<double>(static_cast<size_t>(n) * dim, 0.0), n, dim}; }
};

struct Stump {
  int feature = -1; // -1: constant stump, both leaves equal
  double threshold = 0.0;
  double left = 0.0;  // value when x[feature] < threshold
  double right = 0.0;

  double eval(const double* x) const {
    if (feature < 0) return left;
    return x[feature] < threshold ? left : right;
  }
};

// Regression tree stored as a flat node array; node 0 is the root.
struct TreeNode {
  int feature = -1; // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  double value = 0.0;
};

struct RegTree {
  std::vector<TreeNode> nodes;
  double eval(const double* x) const;
};

// Additive logistic-boosting model: score = base + lr * sum of tree outputs;
// probability via sigmoid.
struct BoostedEnsemble {
  std::vector<Stump> stumps;  // used when depth == 1
  std::vector<RegTree> trees; // used when depth > 1
  double learning_rate = 0.1;
  double base_score = 0.0;
  std::vector<double> round_losses; // mean training loss after each round

  double score(const double* x) const;
  double prob(const double* x) const;
};

// Classification tree with leaf class-1 fractions, gini splits.
struct Forest {
  std::vector<RegTree> trees;
  uint64_t seed = 0;

  double prob(const double* x) const; // mean of per-tree leaf fractions
};

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 0;     // 0 = unlimited
  bool bootstrap = true; // off: every tree sees all rows
  uint64_t seed = 0;
};

// Gradient-boosted stumps: per round one depth-1 split fit to the logistic
// gradients, exact threshold search over sorted unique feature values.
BoostedEnsemble fit_gbs(const Matrix& X, const std::vector<int>& y, int n_estimators, double lr);

// Same boosting with greedy depth-k regression trees.
BoostedEnsemble fit_boosted_trees(const Matrix& X, const std::vector<int>& y, int depth,
                                  int n_estimators, double lr);

Forest fit_forest(const Matrix& X, const std::vector<int>& y, const ForestConfig& cfg);

std::vector<double> predict_prob(const BoostedEnsemble& m, const Matrix& X);
std::vector<double> predict_prob(const Forest& m, const Matrix& X);
std::vector<int> to_labels(const std::vector<double>& probs);

} // namespace catrob
