#include "catrob/attack_pgd.hpp"

#include <cmath>
#include <stdexcept>

#include "catrob/parallel.hpp"
#include "catrob/projections.hpp"

namespace catrob {

double pgd_step_size(const PgdConfig& cfg, std::span<const double> w) {
  if (cfg.alpha > 0.0) return cfg.alpha;
  double sum = 0.0;
  int n = 0;
  for (double wj : w) {
    if (wj > 0.0 && wj < kMaxCost) {
      sum += wj;
      ++n;
    }
  }
  const double mean_w = n > 0 ? sum / n : 1.0;
  return 2.5 * cfg.eps / (cfg.pgd_steps * mean_w);
}

RelaxedAdvExample cat_pgd(const std::vector<int>& row, int y, const EmbeddingSet& Q,
                          const NetParams& theta, const CostModel& cm, const PgdConfig& cfg) {
  if (cfg.pgd_steps < 1 || cfg.d_steps < 1) throw std::invalid_argument("step counts must be >= 1");
  if (cfg.eps < 0.0) throw std::invalid_argument("eps must be nonnegative");

  const FeatureSpecs& specs = *cm.features;
  std::vector<double> xtilde = one_hot(row, specs);

  RelaxedAdvExample out;
  out.loss_before = forward(xtilde, Q, theta, y).loss;

  // a zero budget admits only the original point; skipping the loop keeps the
  // output bit-identical to the clean encoding for any step size
  if (y != cm.target_class || cfg.eps == 0.0) {
    out.xtilde_prime = std::move(xtilde);
    out.loss_after = out.loss_before;
    return out;
  }

  const BlockLayout layout = BlockLayout::from(specs);
  const std::vector<double> w = cost_weights(row, cm);
  const double alpha = pgd_step_size(cfg, w);

  const size_t t = xtilde.size();
  std::vector<double> delta(t, 0.0), point(t);
  for (int step = 0; step < cfg.pgd_steps; ++step) {
    for (size_t j = 0; j < t; ++j) point[j] = xtilde[j] + delta[j];
    std::vector<double> grad = input_gradient(point, Q, theta, y);
    for (size_t j = 0; j < t; ++j) delta[j] += alpha * grad[j];
    delta = dykstra_project(xtilde, delta, w, cfg.eps, layout, cfg.d_steps);
  }

  out.xtilde_prime.resize(t);
  for (size_t j = 0; j < t; ++j) out.xtilde_prime[j] = xtilde[j] + delta[j];
  out.spent_cost = relaxed_cost(xtilde, out.xtilde_prime, w);
  out.loss_after = forward(out.xtilde_prime, Q, theta, y).loss;
  return out;
}

std::vector<RelaxedAdvExample> attack_batch(const Dataset& data, const EmbeddingSet& Q,
                                            const NetParams& theta, const CostModel& cm,
                                            const PgdConfig& cfg) {
  std::vector<RelaxedAdvExample> out(data.size());
  const int n = static_cast<int>(data.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (int r = 0; r < n; ++r) out[r] = cat_pgd(data.rows[r], data.labels[r], Q, theta, cm, cfg);
  return out;
}

std::vector<RelaxedAdvExample> attack_batch_serial(const Dataset& data, const EmbeddingSet& Q,
                                                   const NetParams& theta, const CostModel& cm,
                                                   const PgdConfig& cfg) {
  std::vector<RelaxedAdvExample> out(data.size());
  for (size_t r = 0; r < data.size(); ++r)
    out[r] = cat_pgd(data.rows[r], data.labels[r], Q, theta, cm, cfg);
  return out;
}

} // namespace catrob
