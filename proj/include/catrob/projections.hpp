#pragma once

#include <span>
#include <vector>

#include "catrob/cost_model.hpp"

namespace catrob {

// Offsets and lengths of the per-feature one-hot blocks inside a t-vector.
struct BlockLayout {
  std::vector<int> offset;
  std::vector<int> length;
  int total = 0;

  static BlockLayout from(const FeatureSpecs& specs);
  int n_blocks() const { return static_cast<int>(offset.size()); }
};

// Euclidean projection onto the probability simplex {z >= 0, sum z = 1},
// via sort-and-threshold. O(n log n), exact up to float rounding.
std::vector<double> project_simplex(std::span<const double> v);

// Euclidean projection onto {z : sum_j w_j |z_j| <= eps}, w >= 0.
// Coordinates with w_j = 0 pass through bit-identically; a feasible input is
// returned unchanged. Dual soft-thresholding with the multiplier located by
// bisection (tolerance 1e-10, at most 200 halvings).
std::vector<double> project_weighted_l1(std::span<const double> v, std::span<const double> w,
                                        double eps);

// Alternating projection with correction terms onto the intersection of the
// per-block simplices (in x-space, around xtilde) and the weighted-l1 cost
// ball (in delta-space). Runs exactly d_steps iterations and returns the
// final delta. If `violations` is non-null it receives, per iteration, the
// max of block-simplex deviation and cost excess at the iterate.
std::vector<double> dykstra_project(std::span<const double> xtilde, std::span<const double> delta,
                                    std::span<const double> w, double eps,
                                    const BlockLayout& layout, int d_steps,
                                    std::vector<double>* violations = nullptr);

// Max of per-block |sum - 1| and entry negativity for xtilde + delta, and of
// the cost excess of delta; the feasibility measure used by dykstra_project.
double constraint_violation(std::span<const double> xtilde, std::span<const double> delta,
                            std::span<const double> w, double eps, const BlockLayout& layout);

} // namespace catrob
