#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

double risk(const NetworkState& s, const Dataset& data, const Activation& act) {
  double total = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    double f = 0.0;
    for (int k = 0; k < s.width(); ++k) {
      double z = 0.0;
      for (int j = 0; j < s.input_dim(); ++j) z += s.W(k, j) * data.points()(i, j);
      f += s.a[k] * act.value(z);
    }
    const double r = f - data.targets()[i];
    total += 0.5 * data.weights()[i] * r * r;
  }
  return total;
}

Gradient fd_gradient(const NetworkState& s, const Dataset& data, const Activation& act, double h) {
  Gradient g{stagelab::Vector(s.width()), stagelab::RowMatrix(s.width(), s.input_dim())};
  NetworkState copy = s;
  for (int k = 0; k < s.width(); ++k) {
    {
      const double keep = copy.a[k];
      const double step = h * std::max(1.0, std::abs(keep));
      copy.a[k] = keep + step;
      const double up = oracle::risk(copy, data, act);
      copy.a[k] = keep - step;
      const double down = oracle::risk(copy, data, act);
      copy.a[k] = keep;
      g.a[k] = (up - down) / (2.0 * step);
    }
    for (int j = 0; j < s.input_dim(); ++j) {
      const double keep = copy.W(k, j);
      const double step = h * std::max(1.0, std::abs(keep));
      copy.W(k, j) = keep + step;
      const double up = oracle::risk(copy, data, act);
      copy.W(k, j) = keep - step;
      const double down = oracle::risk(copy, data, act);
      copy.W(k, j) = keep;
      g.W(k, j) = (up - down) / (2.0 * step);
    }
  }
  return g;
}

double relative_error(const Gradient& g, const Gradient& ref, double floor) {
  const double err = std::max((g.a - ref.a).cwiseAbs().maxCoeff(), (g.W - ref.W).cwiseAbs().maxCoeff());
  const double scale = std::max(ref.a.cwiseAbs().maxCoeff(), ref.W.cwiseAbs().maxCoeff());
  return err / std::max(scale, floor);
}

double w2_brute_force(std::vector<double> a, std::vector<double> b) {
  std::vector<int> perm(b.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  double best = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double diff = a[i] - b[static_cast<std::size_t>(perm[i])];
      sum += diff * diff;
    }
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best / static_cast<double>(a.size()));
}

NetworkState random_state(Random& rng, int m, int d, double sd) {
  stagelab::Vector a(m);
  stagelab::RowMatrix W(m, d);
  for (int k = 0; k < m; ++k) {
    a[k] = rng.normal(sd);
    for (int j = 0; j < d; ++j) W(k, j) = rng.normal(sd);
  }
  return NetworkState(a, W);
}

Dataset random_dataset(Random& rng, int n, int d) {
  Eigen::MatrixXd x(n, d);
  stagelab::Vector w(n);
  stagelab::Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = rng.uniform(-1.5, 1.5);
    w[i] = rng.uniform(0.1, 1.0);
    y[i] = rng.normal();
  }
  w /= w.sum();
  return Dataset(x, w, y);
}

Dataset normalized_grid(int n_half) {
  const int n = 2 * n_half;
  Eigen::MatrixXd x(n, 1);
  stagelab::Vector w = stagelab::Vector::Constant(n, 1.0 / n);
  stagelab::Vector y(n);
  for (int i = 0; i < n_half; ++i) {
    const double v = (i + 0.5) / n_half;
    x(i, 0) = v;
    x(n - 1 - i, 0) = -v;
  }
  const double scale = 1.0 / std::sqrt((x.col(0).array().square() * w.array()).sum());
  x *= scale;
  for (int i = 0; i < n; ++i) y[i] = std::tanh(x(i, 0));
  const double lead = (w.array() * y.array() * x.col(0).array()).sum();
  y /= lead;
  return Dataset(x, w, y);
}

}  // namespace oracle
