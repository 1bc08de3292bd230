#include "catrob/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace catrob {

BlockLayout BlockLayout::from(const FeatureSpecs& specs) {
  BlockLayout layout;
  int off = 0;
  for (const auto& s : specs) {
    layout.offset.push_back(off);
    layout.length.push_back(s.cardinality);
    off += s.cardinality;
  }
  layout.total = off;
  return layout;
}

std::vector<double> project_simplex(std::span<const double> v) {
  const size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());

  // largest rho with u_rho + (1 - cumsum_rho)/rho > 0
  double cumsum = 0.0, tau = 0.0;
  int rho = 0;
  double running = 0.0;
  for (size_t j = 0; j < n; ++j) {
    running += u[j];
    double cand = (1.0 - running) / static_cast<double>(j + 1);
    if (u[j] + cand > 0.0) {
      rho = static_cast<int>(j + 1);
      cumsum = running;
    }
  }
  tau = (cumsum - 1.0) / static_cast<double>(rho);

  std::vector<double> z(n);
  for (size_t j = 0; j < n; ++j) z[j] = std::max(v[j] - tau, 0.0);
  return z;
}

namespace {

// total weighted mass of the soft-thresholded point at multiplier lam
double thresholded_mass(std::span<const double> v, std::span<const double> w, double lam) {
  double s = 0.0;
  for (size_t j = 0; j < v.size(); ++j) {
    if (w[j] <= 0.0) continue;
    double m = std::fabs(v[j]) - lam * w[j];
    if (m > 0.0) s += w[j] * m;
  }
  return s;
}

} // namespace

std::vector<double> project_weighted_l1(std::span<const double> v, std::span<const double> w,
                                        double eps) {
  if (v.size() != w.size()) throw std::invalid_argument("vector length mismatch");
  if (eps < 0.0) throw std::invalid_argument("eps must be nonnegative");

  double mass = 0.0, lam_hi = 0.0;
  for (size_t j = 0; j < v.size(); ++j) {
    if (w[j] > 0.0) {
      mass += w[j] * std::fabs(v[j]);
      lam_hi = std::max(lam_hi, std::fabs(v[j]) / w[j]);
    }
  }
  if (mass <= eps) return {v.begin(), v.end()}; // already feasible, return exactly

  double lo = 0.0, hi = lam_hi;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    double mid = 0.5 * (lo + hi);
    if (thresholded_mass(v, w, mid) > eps)
      lo = mid;
    else
      hi = mid;
  }
  const double lam = hi; // feasible side of the bracket

  std::vector<double> z(v.size());
  for (size_t j = 0; j < v.size(); ++j) {
    if (w[j] <= 0.0) {
      z[j] = v[j]; // unconstrained coordinate, keep bit-identical
    } else {
      double m = std::fabs(v[j]) - lam * w[j];
      z[j] = m > 0.0 ? (v[j] < 0.0 ? -m : m) : 0.0;
    }
  }
  return z;
}

double constraint_violation(std::span<const double> xtilde, std::span<const double> delta,
                            std::span<const double> w, double eps, const BlockLayout& layout) {
  double viol = 0.0;
  for (int b = 0; b < layout.n_blocks(); ++b) {
    double sum = 0.0, neg = 0.0;
    for (int j = layout.offset[b]; j < layout.offset[b] + layout.length[b]; ++j) {
      double x = xtilde[j] + delta[j];
      sum += x;
      neg = std::max(neg, -x);
    }
    viol = std::max(viol, std::fabs(sum - 1.0));
    viol = std::max(viol, neg);
  }
  double spent = 0.0;
  for (size_t j = 0; j < w.size(); ++j) spent += w[j] * std::fabs(delta[j]);
  viol = std::max(viol, spent - eps);
  return std::max(viol, 0.0);
}

std::vector<double> dykstra_project(std::span<const double> xtilde, std::span<const double> delta,
                                    std::span<const double> w, double eps,
                                    const BlockLayout& layout, int d_steps,
                                    std::vector<double>* violations) {
  const size_t t = xtilde.size();
  if (delta.size() != t || w.size() != t) throw std::invalid_argument("vector length mismatch");
  if (d_steps < 1) throw std::invalid_argument("d_steps must be >= 1");

  std::vector<double> d(delta.begin(), delta.end());
  std::vector<double> p(t, 0.0), q(t, 0.0), z(t, 0.0);
  if (violations) violations->clear();

  for (int it = 0; it < d_steps; ++it) {
    // z := per-block simplex projection of xtilde + (delta + p), in delta-space
    for (int b = 0; b < layout.n_blocks(); ++b) {
      const int off = layout.offset[b], len = layout.length[b];
      std::vector<double> y(len);
      for (int j = 0; j < len; ++j) y[j] = xtilde[off + j] + d[off + j] + p[off + j];
      std::vector<double> zb = project_simplex(y);
      for (int j = 0; j < len; ++j) z[off + j] = zb[j] - xtilde[off + j];
    }
    for (size_t j = 0; j < t; ++j) {
      p[j] = d[j] + p[j] - z[j];
      z[j] += q[j]; // reuse z as the cost-projection argument z + q
    }
    d = project_weighted_l1(z, w, eps);
    for (size_t j = 0; j < t; ++j) q[j] = z[j] - d[j];

    if (violations) violations->push_back(constraint_violation(xtilde, d, w, eps, layout));
  }

  // capped coordinates stand in for impossible moves; sweep out float dust
  for (size_t j = 0; j < t; ++j)
    if (w[j] >= kMaxCost && std::fabs(d[j]) < 1e-12) d[j] = 0.0;
  return d;
}

} // namespace catrob
