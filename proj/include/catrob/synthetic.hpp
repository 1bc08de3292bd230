#pragma once

#include <cstdint>
#include <vector>

#include "catrob/cost_model.hpp"

namespace catrob {

// Desk-scale benchmark generator. Labels come from a hidden per-value
// utility, so some low-priced substitutions genuinely flip the optimal
// decision and robustness is a real constraint, not a no-op.
struct SyntheticSpec {
  int n_samples = 5000;
  int n_categorical = 8;
  int card_min = 3;
  int card_max = 10;
  int n_numeric = 4;
  int n_bins = 10;
  double price_min = 0.1;
  double price_max = 50.0;
  double impossible_fraction = 0.1;
  double label_noise = 0.5; // std of the noise added to the utility score
  int target_class = 1;
};

struct SyntheticData {
  Dataset data;     // numeric columns already binned
  CostModel cost;   // categorical matrices + synthesized per-unit matrices
  // raw numeric draws, kept so the CSV carries decimals; aligned with the
  // numeric features (the last n_numeric entries of the spec list)
  std::vector<std::vector<double>> numeric_raw;
  std::vector<Binner> numeric_binners;
};

SyntheticData gen_synthetic(const SyntheticSpec& spec, uint64_t seed);

// Deterministic shuffle split; test gets round(n * test_fraction) rows.
void split_dataset(const Dataset& data, double test_fraction, uint64_t seed, Dataset& train,
                   Dataset& test, std::vector<size_t>* test_indices = nullptr);

} // namespace catrob
