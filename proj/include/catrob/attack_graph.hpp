#pragma once

#include <functional>
#include <vector>

#include "catrob/cost_model.hpp"
#include "catrob/merging.hpp"
#include "catrob/net.hpp"
#include "catrob/trees.hpp"

namespace catrob {

// Probability of class 1 for a discrete row; must be safe for concurrent
// read-only evaluation.
using RowScorer = std::function<double(const std::vector<int>&)>;

struct SearchMode {
  bool exact = true;
  int beam_width = 1000; // open-list cap when not exact

  static SearchMode exact_mode() { return SearchMode{true, 0}; }
  static SearchMode beam(int width) { return SearchMode{false, width}; }
};

struct DiscreteAttackResult {
  std::vector<int> row;   // cheapest misclassified row found, or the input
  double cost = 0.0;      // exact matrix-sum price of `row`
  bool success = false;
  double score = 0.0;     // model score at `row`
  size_t expanded = 0;    // nodes popped, for diagnostics
};

// Cheapest-first search over single-feature value substitutions, priced from
// the original row so node cost equals the additive transformation cost.
// Exact mode enumerates every candidate within budget in cost order, so the
// first misclassified node is a minimum-cost adversarial row. Rows whose
// label differs from the cost model's target class are returned unperturbed.
DiscreteAttackResult graph_attack(const std::vector<int>& row, int y, const RowScorer& model,
                                  const CostModel& cm, double eps, const SearchMode& mode);

// Fraction of examples still classified correctly after a per-example attack
// with budget eps; non-target-class rows are evaluated clean.
double robust_accuracy(const Dataset& data, const RowScorer& model, const CostModel& cm,
                       double eps, const SearchMode& mode);
double robust_accuracy_serial(const Dataset& data, const RowScorer& model, const CostModel& cm,
                              double eps, const SearchMode& mode);

double clean_accuracy(const Dataset& data, const RowScorer& model);

// Scorer adapters.
RowScorer make_net_scorer(const EmbeddingSet& Q, const NetParams& theta, SpecsPtr specs);
RowScorer make_boosted_scorer(const BoostedEnsemble& m, const EmbeddingSet& Q);
RowScorer make_forest_scorer(const Forest& m, const EmbeddingSet& Q);
// One-hot inputs, for models trained without embeddings.
RowScorer make_boosted_onehot_scorer(const BoostedEnsemble& m, SpecsPtr specs);
RowScorer make_forest_onehot_scorer(const Forest& m, SpecsPtr specs);

} // namespace catrob
