#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spellnet/tensor.hpp"

namespace spellnet {

using NamedParams = std::vector<std::pair<std::string, Mat*>>;

// Adam with bias correction. Moment buffers are lazily sized to the parameter
// list on the first step and must keep matching it afterwards.
struct AdamState {
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  long t = 0;
  std::vector<std::vector<float>> m;
  std::vector<std::vector<float>> v;
};

// p <- p - lr * m_hat / (sqrt(v_hat) + eps), reading gradients from Mat::g.
void adam_step(const std::vector<Mat*>& params, AdamState& state);

// Step-decayed SGD: effective lr = lr0 * 2^-floor(step / halve_every).
struct SgdSchedule {
  float lr0 = 0.2f;
  long halve_every = 50000;
  long step = 0;

  float effective_lr() const;
};

void sgd_step(const std::vector<Mat*>& params, SgdSchedule& schedule);

// Scales all gradients so their global L2 norm is at most max_norm.
// Returns the pre-clip norm. max_norm <= 0 disables clipping.
double clip_global_norm(const std::vector<Mat*>& params, double max_norm);

void zero_grads(const std::vector<Mat*>& params);

std::vector<Mat*> pointers(const NamedParams& named);

}  // namespace spellnet
