#pragma once

#include <vector>

#include "catrob/cost_model.hpp"
#include "catrob/net.hpp"

namespace catrob {

struct PgdConfig {
  double alpha = 0.0;  // 0 = auto: 2.5 * eps / (pgd_steps * mean finite weight)
  int pgd_steps = 20;
  int d_steps = 20;
  double eps = 0.0;
};

struct RelaxedAdvExample {
  std::vector<double> xtilde_prime;
  double spent_cost = 0.0;
  double loss_before = 0.0;
  double loss_after = 0.0;
};

// Projected gradient ascent on the relaxed perturbation. Only rows of the
// cost model's target class are attacked; everything else is returned as its
// unperturbed encoding.
RelaxedAdvExample cat_pgd(const std::vector<int>& row, int y, const EmbeddingSet& Q,
                          const NetParams& theta, const CostModel& cm, const PgdConfig& cfg);

// cat_pgd over every row, OpenMP across examples. Output order follows input
// order regardless of thread count.
std::vector<RelaxedAdvExample> attack_batch(const Dataset& data, const EmbeddingSet& Q,
                                            const NetParams& theta, const CostModel& cm,
                                            const PgdConfig& cfg);

// Plain loop kept as the reference for the parallel kernel.
std::vector<RelaxedAdvExample> attack_batch_serial(const Dataset& data, const EmbeddingSet& Q,
                                                   const NetParams& theta, const CostModel& cm,
                                                   const PgdConfig& cfg);

double pgd_step_size(const PgdConfig& cfg, std::span<const double> w);

} // namespace catrob
