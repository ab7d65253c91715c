#include "spellnet/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace spellnet {

static void check_shapes(const std::vector<Mat*>& params, const AdamState& state) {
  for (size_t i = 0; i < params.size(); ++i) {
    if (state.m[i].size() != params[i]->size() || state.v[i].size() != params[i]->size())
      throw std::invalid_argument("adam_step: moment shape mismatch at parameter " +
                                  std::to_string(i));
  }
}

void adam_step(const std::vector<Mat*>& params, AdamState& state) {
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i]->size(), 0.0f);
      state.v[i].assign(params[i]->size(), 0.0f);
    }
  }
  if (state.m.size() != params.size())
    throw std::invalid_argument("adam_step: parameter count changed under one state");
  check_shapes(params, state);

  state.t += 1;
  const double bc1 = 1.0 - std::pow(static_cast<double>(state.beta1), state.t);
  const double bc2 = 1.0 - std::pow(static_cast<double>(state.beta2), state.t);
  for (size_t i = 0; i < params.size(); ++i) {
    Mat& p = *params[i];
    p.ensure_grad();
    float* m = state.m[i].data();
    float* v = state.v[i].data();
    for (size_t j = 0; j < p.size(); ++j) {
      const float g = p.g[j];
      m[j] = state.beta1 * m[j] + (1.0f - state.beta1) * g;
      v[j] = state.beta2 * v[j] + (1.0f - state.beta2) * g * g;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p.v[j] -= static_cast<float>(state.lr * mhat / (std::sqrt(vhat) + state.eps));
    }
  }
}

float SgdSchedule::effective_lr() const {
  return lr0 * std::pow(2.0f, -static_cast<float>(step / halve_every));
}

void sgd_step(const std::vector<Mat*>& params, SgdSchedule& schedule) {
  const float lr = schedule.effective_lr();
  for (Mat* p : params) {
    p->ensure_grad();
    for (size_t j = 0; j < p->size(); ++j) p->v[j] -= lr * p->g[j];
  }
  schedule.step += 1;
}

double clip_global_norm(const std::vector<Mat*>& params, double max_norm) {
  double sq = 0.0;
  for (Mat* p : params) {
    p->ensure_grad();
    for (float g : p->g) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const float scale = static_cast<float>(max_norm / norm);
    for (Mat* p : params)
      for (float& g : p->g) g *= scale;
  }
  return norm;
}

void zero_grads(const std::vector<Mat*>& params) {
  for (Mat* p : params) {
    p->ensure_grad();
    p->zero_grad();
  }
}

std::vector<Mat*> pointers(const NamedParams& named) {
  std::vector<Mat*> out;
  out.reserve(named.size());
  for (const auto& [name, p] : named) out.push_back(p);
  return out;
}

}  // namespace spellnet
