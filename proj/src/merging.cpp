#include "catrob/merging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace catrob {

namespace {

double column_distance(const EmbeddingSet& Q, int feat, int a, int b) {
  const double* ca = Q.column(feat, a);
  const double* cb = Q.column(feat, b);
  double s = 0.0;
  for (int r = 0; r < Q.d; ++r) {
    double diff = ca[r] - cb[r];
    s += diff * diff;
  }
  return std::sqrt(s);
}

// empirical quantile, smallest value with at least ceil(p*N) values <= it
double quantile(std::vector<double>& sorted, double p) {
  const size_t n = sorted.size();
  size_t k = static_cast<size_t>(std::ceil(p * static_cast<double>(n)));
  if (k > 0) --k;
  if (k >= n) k = n - 1;
  return sorted[k];
}

// complete-linkage agglomeration bounded by t: merge the closest admissible
// pair of clusters until no pair has max cross distance <= t. Ties go to the
// pair with the lowest member indices.
std::vector<int> cluster_feature(const EmbeddingSet& Q, int feat, double t) {
  const int n = Q.cardinality(feat);
  std::vector<std::vector<int>> clusters(n);
  for (int j = 0; j < n; ++j) clusters[j] = {j};

  auto linkage = [&](const std::vector<int>& a, const std::vector<int>& b) {
    double worst = 0.0;
    for (int x : a)
      for (int y : b) worst = std::max(worst, column_distance(Q, feat, x, y));
    return worst;
  };

  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (size_t i = 0; i < clusters.size(); ++i) {
      for (size_t j = i + 1; j < clusters.size(); ++j) {
        double d = linkage(clusters[i], clusters[j]);
        if (d < best) {
          best = d;
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
        }
      }
    }
    if (bi < 0 || best > t) break;
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    std::sort(clusters[bi].begin(), clusters[bi].end());
    clusters.erase(clusters.begin() + bj);
  }

  // cluster ids ordered by smallest member
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  std::vector<int> map(n, -1);
  for (size_t c = 0; c < clusters.size(); ++c)
    for (int j : clusters[c]) map[j] = static_cast<int>(c);
  return map;
}

} // namespace

MergeResult merge_embeddings(const EmbeddingSet& Q, double p, bool per_feature_thresholds) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("percentile must be in [0,1]");

  MergeResult mr;
  mr.merged = Q;
  mr.cluster_maps.resize(Q.n_features());

  std::vector<std::vector<double>> per_feature(Q.n_features());
  std::vector<double> pooled;
  for (int i = 0; i < Q.n_features(); ++i) {
    const int ti = Q.cardinality(i);
    for (int a = 0; a < ti; ++a)
      for (int b = a + 1; b < ti; ++b) per_feature[i].push_back(column_distance(Q, i, a, b));
    pooled.insert(pooled.end(), per_feature[i].begin(), per_feature[i].end());
  }
  mr.n_distances = pooled.size();

  if (p == 0.0 || pooled.empty()) {
    // no merging: identity maps, embeddings returned bit-identical
    mr.threshold = -1.0;
    for (int i = 0; i < Q.n_features(); ++i) {
      mr.cluster_maps[i].resize(Q.cardinality(i));
      for (int j = 0; j < Q.cardinality(i); ++j) mr.cluster_maps[i][j] = j;
    }
    mr.merged.cluster_maps = mr.cluster_maps;
    return mr;
  }

  std::sort(pooled.begin(), pooled.end());
  mr.threshold = quantile(pooled, p);

  for (int i = 0; i < Q.n_features(); ++i) {
    double t = mr.threshold;
    if (per_feature_thresholds && !per_feature[i].empty()) {
      std::sort(per_feature[i].begin(), per_feature[i].end());
      t = quantile(per_feature[i], p);
    }
    mr.cluster_maps[i] = cluster_feature(Q, i, t);

    // replace every member column by its cluster mean
    const int ti = Q.cardinality(i);
    const int n_clusters = *std::max_element(mr.cluster_maps[i].begin(), mr.cluster_maps[i].end()) + 1;
    std::vector<double> mean(static_cast<size_t>(n_clusters) * Q.d, 0.0);
    std::vector<int> count(n_clusters, 0);
    for (int j = 0; j < ti; ++j) {
      const int c = mr.cluster_maps[i][j];
      const double* col = Q.column(i, j);
      for (int r = 0; r < Q.d; ++r) mean[static_cast<size_t>(c) * Q.d + r] += col[r];
      ++count[c];
    }
    for (int c = 0; c < n_clusters; ++c)
      for (int r = 0; r < Q.d; ++r) mean[static_cast<size_t>(c) * Q.d + r] /= count[c];
    for (int j = 0; j < ti; ++j) {
      const int c = mr.cluster_maps[i][j];
      if (count[c] == 1) continue; // singleton: keep the original column bits
      double* col = mr.merged.column(i, j);
      for (int r = 0; r < Q.d; ++r) col[r] = mean[static_cast<size_t>(c) * Q.d + r];
    }
  }
  mr.merged.cluster_maps = mr.cluster_maps;
  return mr;
}

std::vector<double> apply_merged(const std::vector<int>& row, const MergeResult& mr) {
  const int d = mr.merged.d;
  std::vector<double> out(static_cast<size_t>(mr.merged.n_features()) * d);
  if (static_cast<int>(row.size()) != mr.merged.n_features())
    throw std::invalid_argument("row arity mismatch");
  for (int i = 0; i < mr.merged.n_features(); ++i) {
    if (row[i] < 0 || row[i] >= mr.merged.cardinality(i))
      throw std::invalid_argument("value index out of range");
    const double* col = mr.merged.column(i, row[i]);
    std::copy(col, col + d, out.begin() + static_cast<size_t>(i) * d);
  }
  return out;
}

} // namespace catrob
