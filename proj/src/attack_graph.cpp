#include "catrob/attack_graph.hpp"

#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "catrob/parallel.hpp"

namespace catrob {

namespace {

struct RowHash {
  size_t operator()(const std::vector<int>& r) const {
    size_t h = 1469598103934665603ULL;
    for (int v : r) {
      h ^= static_cast<size_t>(v) + 0x9e3779b9;
      h *= 1099511628211ULL;
    }
    return h;
  }
};

// exact additive price of `row` relative to `orig`, summed in feature order
double row_cost(const std::vector<int>& orig, const std::vector<int>& row, const CostModel& cm) {
  double total = 0.0;
  for (size_t i = 0; i < orig.size(); ++i) {
    const double c = cm.matrices[i].at(orig[i], row[i]);
    if (c == kImpossible) return kImpossible;
    total += c;
  }
  return total;
}

struct OpenEntry {
  double cost;
  uint64_t seq;
  std::vector<int> row;

  bool operator<(const OpenEntry& o) const {
    if (cost != o.cost) return cost < o.cost;
    return seq < o.seq;
  }
};

} // namespace

DiscreteAttackResult graph_attack(const std::vector<int>& row, int y, const RowScorer& model,
                                  const CostModel& cm, double eps, const SearchMode& mode) {
  if (eps < 0.0) throw std::invalid_argument("eps must be nonnegative");
  const FeatureSpecs& specs = *cm.features;
  if (row.size() != specs.size()) throw std::invalid_argument("row arity mismatch");

  DiscreteAttackResult res;
  res.row = row;
  res.score = model(row);
  if (y != cm.target_class) return res;

  // ordered open list so beam mode can evict its most expensive entries
  std::set<OpenEntry> open;
  std::unordered_set<std::vector<int>, RowHash> visited;
  uint64_t seq = 0;
  open.insert({0.0, seq++, row});
  visited.insert(row);

  while (!open.empty()) {
    OpenEntry cur = *open.begin();
    open.erase(open.begin());
    ++res.expanded;

    const double score = model(cur.row);
    const int predicted = score >= 0.5 ? 1 : 0;
    if (predicted != y) {
      res.row = std::move(cur.row);
      res.cost = cur.cost;
      res.success = true;
      res.score = score;
      return res;
    }

    std::vector<int> next = cur.row;
    for (size_t i = 0; i < specs.size(); ++i) {
      const int cur_v = cur.row[i];
      for (int v = 0; v < specs[i].cardinality; ++v) {
        if (v == cur_v || !cm.matrices[i].possible(row[i], v)) continue;
        next[i] = v;
        if (visited.count(next)) continue;
        const double c = row_cost(row, next, cm);
        if (c <= eps) {
          visited.insert(next);
          open.insert({c, seq++, next});
          if (!mode.exact && static_cast<int>(open.size()) > mode.beam_width)
            open.erase(std::prev(open.end()));
        }
      }
      next[i] = cur_v;
    }
  }
  return res; // no flip within budget
}

double clean_accuracy(const Dataset& data, const RowScorer& model) {
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  int correct = 0;
  for (size_t r = 0; r < data.size(); ++r) {
    const int predicted = model(data.rows[r]) >= 0.5 ? 1 : 0;
    correct += predicted == data.labels[r];
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

int example_survives(const Dataset& data, size_t r, const RowScorer& model, const CostModel& cm,
                     double eps, const SearchMode& mode) {
  const int y = data.labels[r];
  if (y != cm.target_class) {
    const int predicted = model(data.rows[r]) >= 0.5 ? 1 : 0;
    return predicted == y;
  }
  DiscreteAttackResult res = graph_attack(data.rows[r], y, model, cm, eps, mode);
  return res.success ? 0 : (res.score >= 0.5 ? 1 : 0) == y;
}

} // namespace

double robust_accuracy(const Dataset& data, const RowScorer& model, const CostModel& cm,
                       double eps, const SearchMode& mode) {
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  const int n = static_cast<int>(data.size());
  std::vector<int> ok(n, 0);
#pragma omp parallel for schedule(dynamic, 4)
  for (int r = 0; r < n; ++r) ok[r] = example_survives(data, r, model, cm, eps, mode);
  int correct = 0;
  for (int v : ok) correct += v;
  return static_cast<double>(correct) / static_cast<double>(n);
}

double robust_accuracy_serial(const Dataset& data, const RowScorer& model, const CostModel& cm,
                              double eps, const SearchMode& mode) {
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  int correct = 0;
  for (size_t r = 0; r < data.size(); ++r)
    correct += example_survives(data, r, model, cm, eps, mode);
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

RowScorer make_net_scorer(const EmbeddingSet& Q, const NetParams& theta, SpecsPtr specs) {
  return [&Q, &theta, specs](const std::vector<int>& row) {
    const std::vector<double> x = one_hot(row, *specs);
    return sigmoid(forward(x, Q, theta, 0).logit);
  };
}

namespace {

std::vector<double> embed_row(const std::vector<int>& row, const EmbeddingSet& Q) {
  std::vector<double> out(static_cast<size_t>(Q.n_features()) * Q.d);
  for (int i = 0; i < Q.n_features(); ++i) {
    const double* col = Q.column(i, row[i]);
    std::copy(col, col + Q.d, out.begin() + static_cast<size_t>(i) * Q.d);
  }
  return out;
}

std::vector<double> onehot_row(const std::vector<int>& row, const FeatureSpecs& specs) {
  return one_hot(row, specs);
}

} // namespace

RowScorer make_boosted_scorer(const BoostedEnsemble& m, const EmbeddingSet& Q) {
  return [&m, &Q](const std::vector<int>& row) { return m.prob(embed_row(row, Q).data()); };
}

RowScorer make_forest_scorer(const Forest& m, const EmbeddingSet& Q) {
  return [&m, &Q](const std::vector<int>& row) { return m.prob(embed_row(row, Q).data()); };
}

RowScorer make_boosted_onehot_scorer(const BoostedEnsemble& m, SpecsPtr specs) {
  return [&m, specs](const std::vector<int>& row) { return m.prob(onehot_row(row, *specs).data()); };
}

RowScorer make_forest_onehot_scorer(const Forest& m, SpecsPtr specs) {
  return [&m, specs](const std::vector<int>& row) { return m.prob(onehot_row(row, *specs).data()); };
}

} // namespace catrob
