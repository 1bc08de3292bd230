#pragma once

#include <vector>

#include "catrob/net.hpp"

namespace catrob {

struct MergeResult {
  EmbeddingSet merged;                         // cluster columns replaced by their mean
  std::vector<std::vector<int>> cluster_maps;  // per feature: value index -> cluster id
  double threshold = 0.0;                      // pooled-distance quantile actually used
  size_t n_distances = 0;                      // size of the pooled distance list
};

// Collapses embedding columns that sit within the pooled p-quantile distance
// of each other. Distances are pairwise within each feature, pooled across
// features into one sorted list; clustering is complete-linkage, so every
// cluster certifies max pairwise distance <= threshold. p = 0 performs no
// merging and returns the embeddings unchanged.
//
// per_feature_thresholds computes a separate quantile within each feature
// instead of one pooled value; off by default.
MergeResult merge_embeddings(const EmbeddingSet& Q, double p,
                             bool per_feature_thresholds = false);

// Embeds a discrete row through the merged columns.
std::vector<double> apply_merged(const std::vector<int>& row, const MergeResult& mr);

} // namespace catrob
