#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace catrob {

// Marker for transformations the adversary cannot perform at any price.
constexpr double kImpossible = std::numeric_limits<double>::infinity();
// Loaded finite off-diagonal costs are clamped into [kMinCost, kMaxCost].
// kMaxCost doubles as the finite stand-in for impossible moves inside the
// continuous solvers (the discrete search keeps the exact marker instead).
constexpr double kMinCost = 0.1;
constexpr double kMaxCost = 10000.0;

struct FeatureSpec {
  std::string name;
  int cardinality = 0;                   // t_i >= 2
  std::vector<std::string> value_labels; // unique, size == cardinality
};

using FeatureSpecs = std::vector<FeatureSpec>;
using SpecsPtr = std::shared_ptr<const FeatureSpecs>;

int total_categories(const FeatureSpecs& specs); // t = sum of t_i

// Per-feature price table. entry(j,k) is the dollar cost of moving value j
// to value k; the diagonal is always exactly 0 and entries need not be
// symmetric. Construction clamps finite off-diagonal entries into
// [kMinCost, kMaxCost] and forces the diagonal to zero.
class CostMatrix {
public:
  CostMatrix() = default;
  CostMatrix(int n, std::vector<double> row_major_entries);

  double at(int from, int to) const { return e_[static_cast<size_t>(from) * n_ + to]; }
  bool possible(int from, int to) const { return at(from, to) != kImpossible; }
  // at(), with impossible moves replaced by the kMaxCost cap.
  double capped(int from, int to) const;
  int size() const { return n_; }

  // Synthesized table for a binned numeric feature: cost per unit of change
  // times the distance between bin midpoints.
  static CostMatrix from_per_unit(const std::vector<double>& midpoints, double per_unit);

private:
  int n_ = 0;
  std::vector<double> e_;
};

struct CostModel {
  SpecsPtr features;
  std::vector<CostMatrix> matrices; // aligned with *features
  int target_class = 1;             // only rows of this class get attacked

  int n_features() const { return static_cast<int>(features->size()); }
  int total() const { return total_categories(*features); }
};

struct Dataset {
  SpecsPtr specs;
  std::vector<std::vector<int>> rows; // value indices, rows[r][i] < t_i
  std::vector<int> labels;            // {0,1}, same length as rows

  size_t size() const { return rows.size(); }
};

// Concatenated indicator encoding; block i has a single 1 at row[i].
std::vector<double> one_hot(const std::vector<int>& row, const FeatureSpecs& specs);

// w[k] = price of moving feature i from its current value to k, for every
// coordinate k of the concatenated encoding. Impossible moves carry the
// kMaxCost cap so the vector stays finite; each current value maps to 0.
std::vector<double> cost_weights(const std::vector<int>& row, const CostModel& cm);

// Total discrete transformation price, sum over features of matrix entries.
// Returns kImpossible if any per-feature step is impossible.
double cost(const std::vector<int>& a, const std::vector<int>& b, const CostModel& cm);

// Weighted l1 distance between two relaxed encodings.
double relaxed_cost(std::span<const double> xbar, std::span<const double> xtilde,
                    std::span<const double> w);

// Equal-frequency binning for one numeric column.
struct Binner {
  std::vector<double> edges; // strictly increasing, finite
  double lo = 0.0;           // observed data range, used for midpoints
  double hi = 0.0;

  int n_bins() const { return static_cast<int>(edges.size()) + 1; }
  int bin(double v) const; // total mapping: out-of-range values hit the end bins
  std::vector<double> midpoints() const;
};

Binner fit_bins(const std::vector<double>& column, int n_bins);
std::vector<int> apply_bins(const std::vector<double>& column, const Binner& binner);

// Random undersampling of the majority class; minority rows are kept as-is.
Dataset balance_undersample(const Dataset& data, uint64_t seed);

} // namespace catrob
