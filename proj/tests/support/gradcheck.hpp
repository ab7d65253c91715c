#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "spellnet/tensor.hpp"

namespace testsup {

// Relative error with the spec's denominator convention.
inline double rel_err(double a, double n) {
  return std::abs(a - n) / std::max(1e-8, std::abs(a) + std::abs(n));
}

// Central finite differences (step h, in double) against the tape's analytic
// gradients. `build` must register each parameter on the graph it is given
// and return a scalar loss ref.
template <class Builder>
double max_grad_rel_err(const std::vector<spellnet::MatT<double>*>& params, Builder build,
                        double h = 1e-3) {
  using spellnet::GraphT;
  for (auto* p : params) {
    p->ensure_grad();
    p->zero_grad();
  }
  GraphT<double> g;
  auto loss = build(g);
  g.backward(loss);
  std::vector<std::vector<double>> analytic;
  for (auto* p : params) analytic.push_back(p->g);

  auto eval = [&]() {
    GraphT<double> g2;
    return g2.value(build(g2))[0];
  };

  double worst = 0.0;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    auto* p = params[pi];
    for (size_t j = 0; j < p->v.size(); ++j) {
      const double orig = p->v[j];
      p->v[j] = orig + h;
      const double up = eval();
      p->v[j] = orig - h;
      const double dn = eval();
      p->v[j] = orig;
      const double numeric = (up - dn) / (2.0 * h);
      worst = std::max(worst, rel_err(analytic[pi][j], numeric));
    }
  }
  return worst;
}

inline spellnet::MatT<double> random_mat(int r, int c, std::mt19937_64& rng, double range = 1.0) {
  spellnet::MatT<double> m(r, c);
  spellnet::fill_uniform(m, range, rng);
  return m;
}

inline spellnet::Mat random_matf(int r, int c, std::mt19937_64& rng, float range = 1.0f) {
  spellnet::Mat m(r, c);
  spellnet::fill_uniform(m, range, rng);
  return m;
}

}  // namespace testsup
