#include "catrob/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

namespace catrob {

int total_categories(const FeatureSpecs& specs) {
  int t = 0;
  for (const auto& s : specs) t += s.cardinality;
  return t;
}

CostMatrix::CostMatrix(int n, std::vector<double> row_major_entries)
    : n_(n), e_(std::move(row_major_entries)) {
  if (n_ < 2) throw std::invalid_argument("cost matrix needs at least 2 values");
  if (e_.size() != static_cast<size_t>(n_) * n_)
    throw std::invalid_argument("cost matrix entry count does not match dimension");
  for (int j = 0; j < n_; ++j) {
    for (int k = 0; k < n_; ++k) {
      double& v = e_[static_cast<size_t>(j) * n_ + k];
      if (j == k) {
        v = 0.0;
      } else if (std::isfinite(v)) {
        if (v < 0.0) throw std::invalid_argument("negative cost entry");
        v = std::clamp(v, kMinCost, kMaxCost);
      } else {
        v = kImpossible;
      }
    }
  }
}

double CostMatrix::capped(int from, int to) const {
  double v = at(from, to);
  return std::isfinite(v) ? v : kMaxCost;
}

CostMatrix CostMatrix::from_per_unit(const std::vector<double>& midpoints, double per_unit) {
  const int n = static_cast<int>(midpoints.size());
  std::vector<double> e(static_cast<size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j != k) e[static_cast<size_t>(j) * n + k] = per_unit * std::fabs(midpoints[j] - midpoints[k]);
  return CostMatrix(n, std::move(e));
}

std::vector<double> one_hot(const std::vector<int>& row, const FeatureSpecs& specs) {
  if (row.size() != specs.size()) throw std::invalid_argument("row arity mismatch");
  std::vector<double> x(total_categories(specs), 0.0);
  int off = 0;
  for (size_t i = 0; i < specs.size(); ++i) {
    if (row[i] < 0 || row[i] >= specs[i].cardinality)
      throw std::invalid_argument("value index out of range for feature " + specs[i].name);
    x[off + row[i]] = 1.0;
    off += specs[i].cardinality;
  }
  return x;
}

std::vector<double> cost_weights(const std::vector<int>& row, const CostModel& cm) {
  const FeatureSpecs& specs = *cm.features;
  if (row.size() != specs.size()) throw std::invalid_argument("row arity mismatch");
  std::vector<double> w(cm.total(), 0.0);
  int off = 0;
  for (size_t i = 0; i < specs.size(); ++i) {
    const int j = row[i];
    if (j < 0 || j >= specs[i].cardinality)
      throw std::invalid_argument("value index out of range for feature " + specs[i].name);
    const CostMatrix& C = cm.matrices[i];
    for (int k = 0; k < specs[i].cardinality; ++k) w[off + k] = C.capped(j, k);
    off += specs[i].cardinality;
  }
  return w;
}

double cost(const std::vector<int>& a, const std::vector<int>& b, const CostModel& cm) {
  if (a.size() != b.size() || a.size() != cm.features->size())
    throw std::invalid_argument("row arity mismatch");
  double total = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double c = cm.matrices[i].at(a[i], b[i]);
    if (c == kImpossible) return kImpossible;
    total += c;
  }
  return total;
}

double relaxed_cost(std::span<const double> xbar, std::span<const double> xtilde,
                    std::span<const double> w) {
  if (xbar.size() != xtilde.size() || xbar.size() != w.size())
    throw std::invalid_argument("vector length mismatch");
  double total = 0.0;
  for (size_t j = 0; j < w.size(); ++j) total += w[j] * std::fabs(xbar[j] - xtilde[j]);
  return total;
}

int Binner::bin(double v) const {
  // first bin whose upper edge is >= v; values above every edge map to the last bin
  int k = 0;
  while (k < static_cast<int>(edges.size()) && v > edges[k]) ++k;
  return k;
}

std::vector<double> Binner::midpoints() const {
  std::vector<double> mids(n_bins());
  for (int k = 0; k < n_bins(); ++k) {
    double a = (k == 0) ? lo : edges[k - 1];
    double b = (k == n_bins() - 1) ? hi : edges[k];
    mids[k] = 0.5 * (a + b);
  }
  return mids;
}

Binner fit_bins(const std::vector<double>& column, int n_bins) {
  if (n_bins < 2) throw std::invalid_argument("n_bins must be >= 2");
  if (column.empty()) throw std::invalid_argument("cannot bin an empty column");
  std::vector<double> sorted = column;
  std::sort(sorted.begin(), sorted.end());

  Binner b;
  b.lo = sorted.front();
  b.hi = sorted.back();

  // interior edges at the k/n_bins quantiles, linear interpolation
  const size_t n = sorted.size();
  for (int k = 1; k < n_bins; ++k) {
    double pos = static_cast<double>(k) / n_bins * (n - 1);
    size_t i = static_cast<size_t>(pos);
    double frac = pos - static_cast<double>(i);
    double q = (i + 1 < n) ? sorted[i] * (1.0 - frac) + sorted[i + 1] * frac : sorted[i];
    if (b.edges.empty() || q > b.edges.back()) b.edges.push_back(q);
  }

  if (b.edges.empty()) {
    // constant column: keep one edge at the constant so cardinality stays 2;
    // the upper bin is simply never populated by the training data
    std::fprintf(stderr, "warning: constant column binned into a single usable bin\n");
    b.edges.push_back(b.lo);
  }
  return b;
}

std::vector<int> apply_bins(const std::vector<double>& column, const Binner& binner) {
  std::vector<int> idx(column.size());
  for (size_t r = 0; r < column.size(); ++r) idx[r] = binner.bin(column[r]);
  return idx;
}

Dataset balance_undersample(const Dataset& data, uint64_t seed) {
  std::vector<size_t> pos, neg;
  for (size_t r = 0; r < data.size(); ++r) (data.labels[r] == 1 ? pos : neg).push_back(r);
  if (pos.empty() || neg.empty())
    throw std::invalid_argument("undersampling needs both classes present");

  std::vector<size_t>& majority = pos.size() > neg.size() ? pos : neg;
  const size_t keep = std::min(pos.size(), neg.size());
  std::mt19937_64 rng(seed);
  std::shuffle(majority.begin(), majority.end(), rng);
  majority.resize(keep);

  std::vector<size_t> kept;
  kept.reserve(2 * keep);
  kept.insert(kept.end(), pos.begin(), pos.end());
  kept.insert(kept.end(), neg.begin(), neg.end());
  std::sort(kept.begin(), kept.end()); // original row order, deterministic

  Dataset out;
  out.specs = data.specs;
  out.rows.reserve(kept.size());
  out.labels.reserve(kept.size());
  for (size_t r : kept) {
    out.rows.push_back(data.rows[r]);
    out.labels.push_back(data.labels[r]);
  }
  return out;
}

} // namespace catrob
