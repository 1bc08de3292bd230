#include "catrob/net.hpp"

#include <cmath>
#include <stdexcept>

namespace catrob {

EmbeddingSet EmbeddingSet::random(const FeatureSpecs& specs, int d, std::mt19937_64& rng) {
  EmbeddingSet Q;
  Q.d = d;
  std::normal_distribution<double> dist(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (const auto& s : specs) {
    std::vector<double> m(static_cast<size_t>(d) * s.cardinality);
    for (double& v : m) v = dist(rng) * scale;
    Q.cols.push_back(std::move(m));
  }
  return Q;
}

NetParams NetParams::init(int input_dim, const std::vector<int>& hidden, std::mt19937_64& rng) {
  NetParams theta;
  int in = input_dim;
  std::vector<int> outs = hidden;
  outs.push_back(1);
  for (int out : outs) {
    Layer l;
    l.in = in;
    l.out = out;
    const double a = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-a, a);
    l.W.resize(static_cast<size_t>(out) * in);
    for (double& v : l.W) v = dist(rng);
    l.b.assign(out, 0.0);
    theta.layers.push_back(std::move(l));
    in = out;
  }
  return theta;
}

GradBundle GradBundle::zeros_like(const NetParams& theta, const EmbeddingSet& Q, int t) {
  GradBundle g;
  for (const auto& l : theta.layers) {
    Layer z;
    z.in = l.in;
    z.out = l.out;
    z.W.assign(l.W.size(), 0.0);
    z.b.assign(l.b.size(), 0.0);
    g.d_theta.push_back(std::move(z));
  }
  for (const auto& m : Q.cols) g.d_Q.emplace_back(m.size(), 0.0);
  g.d_input.assign(t, 0.0);
  return g;
}

void GradBundle::add_scaled(const GradBundle& g, double s) {
  for (size_t l = 0; l < d_theta.size(); ++l) {
    for (size_t i = 0; i < d_theta[l].W.size(); ++i) d_theta[l].W[i] += s * g.d_theta[l].W[i];
    for (size_t i = 0; i < d_theta[l].b.size(); ++i) d_theta[l].b[i] += s * g.d_theta[l].b[i];
  }
  for (size_t i = 0; i < d_Q.size(); ++i)
    for (size_t j = 0; j < d_Q[i].size(); ++j) d_Q[i][j] += s * g.d_Q[i][j];
  for (size_t j = 0; j < d_input.size(); ++j) d_input[j] += s * g.d_input[j];
}

std::vector<double> embed(std::span<const double> xtilde, const EmbeddingSet& Q) {
  const int d = Q.d;
  std::vector<double> out(static_cast<size_t>(Q.n_features()) * d, 0.0);
  size_t off = 0;
  for (int i = 0; i < Q.n_features(); ++i) {
    const int ti = Q.cardinality(i);
    if (off + ti > xtilde.size()) throw std::invalid_argument("encoding shorter than embeddings expect");
    double* oi = out.data() + static_cast<size_t>(i) * d;
    for (int j = 0; j < ti; ++j) {
      const double xj = xtilde[off + j];
      if (xj == 0.0) continue;
      const double* col = Q.column(i, j);
      for (int r = 0; r < d; ++r) oi[r] += xj * col[r];
    }
    off += ti;
  }
  if (off != xtilde.size()) throw std::invalid_argument("encoding longer than embeddings expect");
  return out;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double bce_with_logit(double logit, int y) {
  // stable: max(z,0) - z*y + log(1 + exp(-|z|))
  return std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::fabs(logit)));
}

namespace {

// activations per layer; a[0] is the embedded input
struct Tape {
  std::vector<std::vector<double>> pre;  // pre-activation per layer
  std::vector<std::vector<double>> act;  // act[0] = input, act[l+1] = post-activation
};

double run_forward(std::span<const double> xtilde, const EmbeddingSet& Q, const NetParams& theta,
                   Tape* tape) {
  std::vector<double> h = embed(xtilde, Q);
  if (tape) tape->act.push_back(h);
  const size_t L = theta.layers.size();
  for (size_t l = 0; l < L; ++l) {
    const Layer& lay = theta.layers[l];
    std::vector<double> z(lay.out, 0.0);
    for (int o = 0; o < lay.out; ++o) {
      const double* wrow = lay.W.data() + static_cast<size_t>(o) * lay.in;
      double s = lay.b[o];
      for (int i = 0; i < lay.in; ++i) s += wrow[i] * h[i];
      z[o] = s;
    }
    if (tape) tape->pre.push_back(z);
    if (l + 1 < L)
      for (double& v : z) v = v > 0.0 ? v : 0.0; // ReLU on hidden layers
    h = std::move(z);
    if (tape) tape->act.push_back(h);
  }
  return h[0];
}

} // namespace

ForwardResult forward(std::span<const double> xtilde, const EmbeddingSet& Q,
                      const NetParams& theta, int y) {
  ForwardResult r;
  r.logit = run_forward(xtilde, Q, theta, nullptr);
  r.loss = bce_with_logit(r.logit, y);
  return r;
}

GradBundle backward(std::span<const double> xtilde, const EmbeddingSet& Q, const NetParams& theta,
                    int y) {
  Tape tape;
  const double logit = run_forward(xtilde, Q, theta, &tape);
  GradBundle g = GradBundle::zeros_like(theta, Q, static_cast<int>(xtilde.size()));

  const size_t L = theta.layers.size();
  std::vector<double> dh{sigmoid(logit) - static_cast<double>(y)}; // d loss / d logit
  for (size_t l = L; l-- > 0;) {
    const Layer& lay = theta.layers[l];
    Layer& dlay = g.d_theta[l];
    const std::vector<double>& h_prev = tape.act[l];
    // dh currently holds d loss / d pre-activation of layer l (ReLU already applied below)
    std::vector<double> dprev(lay.in, 0.0);
    for (int o = 0; o < lay.out; ++o) {
      const double da = dh[o];
      dlay.b[o] += da;
      const double* wrow = lay.W.data() + static_cast<size_t>(o) * lay.in;
      double* dwrow = dlay.W.data() + static_cast<size_t>(o) * lay.in;
      for (int i = 0; i < lay.in; ++i) {
        dwrow[i] += da * h_prev[i];
        dprev[i] += da * wrow[i];
      }
    }
    if (l > 0) {
      const std::vector<double>& pre_prev = tape.pre[l - 1];
      for (int i = 0; i < lay.in; ++i)
        if (pre_prev[i] <= 0.0) dprev[i] = 0.0;
    }
    dh = std::move(dprev);
  }

  // dh is now the gradient at the embedded input; push through Q
  const int d = Q.d;
  size_t off = 0;
  for (int i = 0; i < Q.n_features(); ++i) {
    const int ti = Q.cardinality(i);
    const double* de = dh.data() + static_cast<size_t>(i) * d;
    for (int j = 0; j < ti; ++j) {
      const double xj = xtilde[off + j];
      const double* col = Q.column(i, j);
      double* dcol = g.d_Q[i].data() + static_cast<size_t>(j) * d;
      double din = 0.0;
      for (int r = 0; r < d; ++r) {
        dcol[r] += xj * de[r];
        din += col[r] * de[r];
      }
      g.d_input[off + j] = din;
    }
    off += ti;
  }
  return g;
}

std::vector<double> input_gradient(std::span<const double> xtilde, const EmbeddingSet& Q,
                                   const NetParams& theta, int y) {
  Tape tape;
  const double logit = run_forward(xtilde, Q, theta, &tape);

  const size_t L = theta.layers.size();
  std::vector<double> dh{sigmoid(logit) - static_cast<double>(y)};
  for (size_t l = L; l-- > 0;) {
    const Layer& lay = theta.layers[l];
    std::vector<double> dprev(lay.in, 0.0);
    for (int o = 0; o < lay.out; ++o) {
      const double da = dh[o];
      const double* wrow = lay.W.data() + static_cast<size_t>(o) * lay.in;
      for (int i = 0; i < lay.in; ++i) dprev[i] += da * wrow[i];
    }
    if (l > 0) {
      const std::vector<double>& pre_prev = tape.pre[l - 1];
      for (int i = 0; i < lay.in; ++i)
        if (pre_prev[i] <= 0.0) dprev[i] = 0.0;
    }
    dh = std::move(dprev);
  }

  const int d = Q.d;
  std::vector<double> din(xtilde.size(), 0.0);
  size_t off = 0;
  for (int i = 0; i < Q.n_features(); ++i) {
    const int ti = Q.cardinality(i);
    const double* de = dh.data() + static_cast<size_t>(i) * d;
    for (int j = 0; j < ti; ++j) {
      const double* col = Q.column(i, j);
      double s = 0.0;
      for (int r = 0; r < d; ++r) s += col[r] * de[r];
      din[off + j] = s;
    }
    off += ti;
  }
  return din;
}

void apply_sgd(NetParams& theta, EmbeddingSet& Q, const GradBundle& g, double lr_theta,
               double lr_q) {
  if (lr_theta != 0.0) {
    for (size_t l = 0; l < theta.layers.size(); ++l) {
      Layer& lay = theta.layers[l];
      const Layer& dl = g.d_theta[l];
      for (size_t i = 0; i < lay.W.size(); ++i) lay.W[i] -= lr_theta * dl.W[i];
      for (size_t i = 0; i < lay.b.size(); ++i) lay.b[i] -= lr_theta * dl.b[i];
    }
  }
  if (lr_q != 0.0) {
    for (size_t i = 0; i < Q.cols.size(); ++i)
      for (size_t j = 0; j < Q.cols[i].size(); ++j) Q.cols[i][j] -= lr_q * g.d_Q[i][j];
  }
}

} // namespace catrob
