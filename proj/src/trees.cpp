#include "catrob/trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "catrob/net.hpp"
#include "catrob/parallel.hpp"

namespace catrob {

namespace {

constexpr double kLeafLambda = 1e-6;
constexpr double kMinGain = 1e-12;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

struct SortedFeatures {
  // per feature, all row indices ordered by feature value (ties by index)
  std::vector<std::vector<int>> order;

  static SortedFeatures build(const Matrix& X) {
    SortedFeatures sf;
    sf.order.resize(X.dim);
    for (int f = 0; f < X.dim; ++f) {
      auto& ord = sf.order[f];
      ord.resize(X.n);
      for (int r = 0; r < X.n; ++r) ord[r] = r;
      std::stable_sort(ord.begin(), ord.end(),
                       [&](int a, int b) { return X.row(a)[f] < X.row(b)[f]; });
    }
    return sf;
  }
};

double leaf_value(double G, double H) { return -G / (H + kLeafLambda); }

// best gradient/hessian split of the rows flagged in `member`
Split find_split(const Matrix& X, const SortedFeatures& sf, const std::vector<uint8_t>& member,
                 const std::vector<double>& g, const std::vector<double>& h, double G, double H) {
  std::vector<Split> per_feature(X.dim);
  const double parent = G * G / (H + kLeafLambda);

#pragma omp parallel for schedule(static)
  for (int f = 0; f < X.dim; ++f) {
    Split best;
    best.feature = f;
    double GL = 0.0, HL = 0.0;
    double prev_val = 0.0;
    bool have_prev = false;
    for (int idx : sf.order[f]) {
      if (!member[idx]) continue;
      const double val = X.row(idx)[f];
      if (have_prev && val > prev_val) {
        const double GR = G - GL, HR = H - HL;
        const double gain = GL * GL / (HL + kLeafLambda) + GR * GR / (HR + kLeafLambda) - parent;
        if (gain > best.gain + kMinGain) {
          best.gain = gain;
          best.threshold = 0.5 * (prev_val + val);
        }
      }
      GL += g[idx];
      HL += h[idx];
      prev_val = val;
      have_prev = true;
    }
    per_feature[f] = best;
  }

  Split best; // feature -1 when no split improves
  for (int f = 0; f < X.dim; ++f)
    if (per_feature[f].gain > best.gain + kMinGain ||
        (best.feature < 0 && per_feature[f].gain > kMinGain))
      best = per_feature[f];
  return best;
}

int grow_tree(RegTree& tree, const Matrix& X, const SortedFeatures& sf,
              std::vector<uint8_t>& member, const std::vector<int>& samples,
              const std::vector<double>& g, const std::vector<double>& h, int depth_left) {
  double G = 0.0, H = 0.0;
  for (int idx : samples) {
    G += g[idx];
    H += h[idx];
  }

  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (depth_left == 0 || samples.size() < 2) {
    tree.nodes[node_id].value = leaf_value(G, H);
    return node_id;
  }

  for (int idx : samples) member[idx] = 1;
  Split split = find_split(X, sf, member, g, h, G, H);
  for (int idx : samples) member[idx] = 0;

  if (split.feature < 0) {
    tree.nodes[node_id].value = leaf_value(G, H);
    return node_id;
  }

  std::vector<int> left, right;
  for (int idx : samples)
    (X.row(idx)[split.feature] < split.threshold ? left : right).push_back(idx);
  if (left.empty() || right.empty()) {
    tree.nodes[node_id].value = leaf_value(G, H);
    return node_id;
  }

  tree.nodes[node_id].feature = split.feature;
  tree.nodes[node_id].threshold = split.threshold;
  const int l = grow_tree(tree, X, sf, member, left, g, h, depth_left - 1);
  const int r = grow_tree(tree, X, sf, member, right, g, h, depth_left - 1);
  tree.nodes[node_id].left = l;
  tree.nodes[node_id].right = r;
  return node_id;
}

double margin_loss(const std::vector<double>& F, const std::vector<int>& y) {
  double s = 0.0;
  for (size_t i = 0; i < y.size(); ++i)
    s += std::max(F[i], 0.0) - F[i] * y[i] + std::log1p(std::exp(-std::fabs(F[i])));
  return s / static_cast<double>(y.size());
}

BoostedEnsemble fit_boosted(const Matrix& X, const std::vector<int>& y, int depth,
                            int n_estimators, double lr) {
  if (X.n == 0 || X.n != static_cast<int>(y.size()))
    throw std::invalid_argument("feature matrix and labels disagree");
  if (depth < 1 || n_estimators < 0) throw std::invalid_argument("bad boosting parameters");

  BoostedEnsemble m;
  m.learning_rate = lr;
  double p = 0.0;
  for (int v : y) p += v;
  p = std::clamp(p / X.n, 1e-6, 1.0 - 1e-6);
  m.base_score = std::log(p / (1.0 - p));

  const SortedFeatures sf = SortedFeatures::build(X);
  std::vector<double> F(X.n, m.base_score), g(X.n), h(X.n);
  std::vector<uint8_t> member(X.n, 0);
  std::vector<int> all(X.n);
  for (int r = 0; r < X.n; ++r) all[r] = r;

  for (int round = 0; round < n_estimators; ++round) {
    for (int i = 0; i < X.n; ++i) {
      const double s = sigmoid(F[i]);
      g[i] = s - y[i];
      h[i] = std::max(s * (1.0 - s), 1e-12);
    }

    if (depth == 1) {
      double G = 0.0, H = 0.0;
      for (int i = 0; i < X.n; ++i) {
        G += g[i];
        H += h[i];
      }
      std::fill(member.begin(), member.end(), 1);
      Split split = find_split(X, sf, member, g, h, G, H);
      Stump st;
      if (split.feature < 0) {
        st.left = st.right = leaf_value(G, H);
      } else {
        double GL = 0.0, HL = 0.0;
        for (int i = 0; i < X.n; ++i)
          if (X.row(i)[split.feature] < split.threshold) {
            GL += g[i];
            HL += h[i];
          }
        st.feature = split.feature;
        st.threshold = split.threshold;
        st.left = leaf_value(GL, HL);
        st.right = leaf_value(G - GL, H - HL);
      }
      for (int i = 0; i < X.n; ++i) F[i] += lr * st.eval(X.row(i));
      m.stumps.push_back(st);
    } else {
      RegTree tree;
      grow_tree(tree, X, sf, member, all, g, h, depth);
      for (int i = 0; i < X.n; ++i) F[i] += lr * tree.eval(X.row(i));
      m.trees.push_back(std::move(tree));
    }
    m.round_losses.push_back(margin_loss(F, y));
  }
  return m;
}

// ---- random forest ----

double gini(double n1, double n) {
  if (n <= 0.0) return 0.0;
  const double p = n1 / n;
  return 2.0 * p * (1.0 - p);
}

struct CartCtx {
  const Matrix& X;
  const std::vector<int>& y;
  std::mt19937_64& rng;
  int mtry;
  int max_depth; // 0 = unlimited
};

int grow_cart(RegTree& tree, CartCtx& ctx, const std::vector<int>& samples, int depth) {
  double n1 = 0.0;
  for (int idx : samples) n1 += ctx.y[idx];
  const double n = static_cast<double>(samples.size());

  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  const bool pure = n1 == 0.0 || n1 == n;
  const bool depth_cap = ctx.max_depth > 0 && depth >= ctx.max_depth;
  if (pure || depth_cap || samples.size() < 2) {
    tree.nodes[node_id].value = n1 / n;
    return node_id;
  }

  // feature subset for this split
  std::vector<int> feats(ctx.X.dim);
  for (int f = 0; f < ctx.X.dim; ++f) feats[f] = f;
  for (int k = 0; k < ctx.mtry; ++k) {
    std::uniform_int_distribution<int> pick(k, ctx.X.dim - 1);
    std::swap(feats[k], feats[pick(ctx.rng)]);
  }
  feats.resize(ctx.mtry);
  std::sort(feats.begin(), feats.end());

  const double parent_impurity = gini(n1, n);
  int best_f = -1;
  double best_thr = 0.0, best_gain = kMinGain;
  std::vector<std::pair<double, int>> vals(samples.size());
  for (int f : feats) {
    for (size_t i = 0; i < samples.size(); ++i)
      vals[i] = {ctx.X.row(samples[i])[f], ctx.y[samples[i]]};
    std::sort(vals.begin(), vals.end());
    double l1 = 0.0;
    for (size_t i = 1; i < vals.size(); ++i) {
      l1 += vals[i - 1].second;
      if (vals[i].first <= vals[i - 1].first) continue;
      const double nl = static_cast<double>(i), nr = n - nl;
      const double gain =
          parent_impurity - (nl / n) * gini(l1, nl) - (nr / n) * gini(n1 - l1, nr);
      if (gain > best_gain) {
        best_gain = gain;
        best_f = f;
        best_thr = 0.5 * (vals[i - 1].first + vals[i].first);
      }
    }
  }

  if (best_f < 0) {
    tree.nodes[node_id].value = n1 / n;
    return node_id;
  }

  std::vector<int> left, right;
  for (int idx : samples) (ctx.X.row(idx)[best_f] < best_thr ? left : right).push_back(idx);
  tree.nodes[node_id].feature = best_f;
  tree.nodes[node_id].threshold = best_thr;
  const int l = grow_cart(tree, ctx, left, depth + 1);
  const int r = grow_cart(tree, ctx, right, depth + 1);
  tree.nodes[node_id].left = l;
  tree.nodes[node_id].right = r;
  return node_id;
}

} // namespace

double RegTree::eval(const double* x) const {
  int node = 0;
  while (nodes[node].feature >= 0)
    node = x[nodes[node].feature] < nodes[node].threshold ? nodes[node].left : nodes[node].right;
  return nodes[node].value;
}

double BoostedEnsemble::score(const double* x) const {
  double s = 0.0;
  for (const auto& st : stumps) s += st.eval(x);
  for (const auto& t : trees) s += t.eval(x);
  return base_score + learning_rate * s;
}

double BoostedEnsemble::prob(const double* x) const { return sigmoid(score(x)); }

double Forest::prob(const double* x) const {
  double s = 0.0;
  for (const auto& t : trees) s += t.eval(x);
  return s / static_cast<double>(trees.size());
}

BoostedEnsemble fit_gbs(const Matrix& X, const std::vector<int>& y, int n_estimators, double lr) {
  return fit_boosted(X, y, 1, n_estimators, lr);
}

BoostedEnsemble fit_boosted_trees(const Matrix& X, const std::vector<int>& y, int depth,
                                  int n_estimators, double lr) {
  return fit_boosted(X, y, depth, n_estimators, lr);
}

Forest fit_forest(const Matrix& X, const std::vector<int>& y, const ForestConfig& cfg) {
  if (X.n == 0 || X.n != static_cast<int>(y.size()))
    throw std::invalid_argument("feature matrix and labels disagree");
  if (cfg.n_trees < 1) throw std::invalid_argument("forest needs at least one tree");

  Forest forest;
  forest.seed = cfg.seed;
  forest.trees.resize(cfg.n_trees);
  const int mtry = std::max(1, static_cast<int>(std::lround(std::sqrt(X.dim))));

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < cfg.n_trees; ++k) {
    std::mt19937_64 rng(cfg.seed + static_cast<uint64_t>(k) * 0x9e3779b97f4a7c15ULL);
    std::vector<int> samples(X.n);
    if (cfg.bootstrap) {
      std::uniform_int_distribution<int> pick(0, X.n - 1);
      for (int i = 0; i < X.n; ++i) samples[i] = pick(rng);
      std::sort(samples.begin(), samples.end());
    } else {
      for (int i = 0; i < X.n; ++i) samples[i] = i;
    }
    CartCtx ctx{X, y, rng, mtry, cfg.max_depth};
    RegTree tree;
    grow_cart(tree, ctx, samples, 0);
    forest.trees[k] = std::move(tree);
  }
  return forest;
}

std::vector<double> predict_prob(const BoostedEnsemble& m, const Matrix& X) {
  std::vector<double> p(X.n);
  for (int r = 0; r < X.n; ++r) p[r] = m.prob(X.row(r));
  return p;
}

std::vector<double> predict_prob(const Forest& m, const Matrix& X) {
  std::vector<double> p(X.n);
  for (int r = 0; r < X.n; ++r) p[r] = m.prob(X.row(r));
  return p;
}

std::vector<int> to_labels(const std::vector<double>& probs) {
  std::vector<int> out(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] >= 0.5 ? 1 : 0;
  return out;
}

} // namespace catrob
