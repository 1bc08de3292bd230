#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "catrob/cost_model.hpp"
#include "catrob/projections.hpp"

namespace catrob {

// Per-feature embedding tables. cols[i] is d x t_i stored column-major, so
// the embedding of value j of feature i is the slice [j*d, (j+1)*d).
struct EmbeddingSet {
  int d = 0;
  std::vector<std::vector<double>> cols;
  // optional, filled by merging: per feature, value index -> cluster id
  std::vector<std::vector<int>> cluster_maps;

  static EmbeddingSet random(const FeatureSpecs& specs, int d, std::mt19937_64& rng);

  int n_features() const { return static_cast<int>(cols.size()); }
  int cardinality(int i) const { return static_cast<int>(cols[i].size()) / d; }
  const double* column(int i, int j) const { return cols[i].data() + static_cast<size_t>(j) * d; }
  double* column(int i, int j) { return cols[i].data() + static_cast<size_t>(j) * d; }
};

struct Layer {
  int in = 0, out = 0;
  std::vector<double> W; // row-major out x in
  std::vector<double> b;
};

// Fully-connected ReLU net ending in one linear logit.
struct NetParams {
  std::vector<Layer> layers;

  static NetParams init(int input_dim, const std::vector<int>& hidden, std::mt19937_64& rng);
  int input_dim() const { return layers.front().in; }
};

struct GradBundle {
  std::vector<Layer> d_theta;              // shape-matched with NetParams
  std::vector<std::vector<double>> d_Q;    // shape-matched with EmbeddingSet
  std::vector<double> d_input;             // t-vector

  static GradBundle zeros_like(const NetParams& theta, const EmbeddingSet& Q, int t);
  void add_scaled(const GradBundle& g, double s);
};

// phi(x) = concat_i Q_i x_i for a block-structured relaxed encoding.
std::vector<double> embed(std::span<const double> xtilde, const EmbeddingSet& Q);

double bce_with_logit(double logit, int y);
double sigmoid(double z);

struct ForwardResult {
  double logit = 0.0;
  double loss = 0.0;
};

ForwardResult forward(std::span<const double> xtilde, const EmbeddingSet& Q,
                      const NetParams& theta, int y);

// Reverse-mode gradients of the scalar loss for all three parameter groups.
GradBundle backward(std::span<const double> xtilde, const EmbeddingSet& Q, const NetParams& theta,
                    int y);

// Same backward pass restricted to the input gradient (the attack hot path).
std::vector<double> input_gradient(std::span<const double> xtilde, const EmbeddingSet& Q,
                                   const NetParams& theta, int y);

// theta -= lr_theta * d_theta ; Q -= lr_q * d_Q (either rate may be 0).
void apply_sgd(NetParams& theta, EmbeddingSet& Q, const GradBundle& g, double lr_theta,
               double lr_q);

} // namespace catrob
