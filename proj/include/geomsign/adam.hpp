#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "geomsign/tensor.hpp"

namespace geomsign {

// Adam with linear learning-rate warmup and decoupled weight decay applied
// only to flagged parameters (the temporal-convolution weights).
template <typename Real>
struct AdamState {
  size_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<Tensor<Real>> first_moment;
  std::vector<Tensor<Real>> second_moment;

  static AdamState init(const std::vector<Tensor<Real>>& params) {
    AdamState s;
    s.first_moment.reserve(params.size());
    s.second_moment.reserve(params.size());
    for (const auto& p : params) {
      s.first_moment.push_back(Tensor<Real>(p.shape));
      s.second_moment.push_back(Tensor<Real>(p.shape));
    }
    return s;
  }
};

inline double warmup_lr(double base_lr, size_t step, size_t warmup_steps) {
  if (warmup_steps == 0) return base_lr;
  const double f = static_cast<double>(step) / static_cast<double>(warmup_steps);
  return base_lr * std::min(1.0, f);
}

// grads[i] may be empty (disconnected parameter): the moment update then
// sees a zero gradient. decay_set[i] marks parameters that receive the
// decoupled decay p -= lr*wd*p.
template <typename Real>
void adam_step(std::vector<Tensor<Real>>& params, const std::vector<Tensor<Real>>& grads,
               AdamState<Real>& state, double base_lr, size_t warmup_steps,
               double weight_decay, const std::vector<bool>& decay_set) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != decay_set.size())
    throw std::invalid_argument("adam_step: parameter/gradient/state count mismatch");
  state.step += 1;
  const double lr = warmup_lr(base_lr, state.step, warmup_steps);
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    if (!grads[i].data.empty() && grads[i].shape != p.shape)
      throw std::invalid_argument("adam_step: gradient shape mismatch at parameter " +
                                  std::to_string(i));
    const bool has_g = !grads[i].data.empty();
    for (size_t j = 0; j < p.numel(); ++j) {
      const double g = has_g ? static_cast<double>(grads[i].data[j]) : 0.0;
      const double mj = state.beta1 * m.data[j] + (1.0 - state.beta1) * g;
      const double vj = state.beta2 * v.data[j] + (1.0 - state.beta2) * g * g;
      m.data[j] = static_cast<Real>(mj);
      v.data[j] = static_cast<Real>(vj);
      double upd = lr * (mj / bc1) / (std::sqrt(vj / bc2) + state.epsilon);
      if (decay_set[i] && weight_decay != 0.0) upd += lr * weight_decay * p.data[j];
      p.data[j] = static_cast<Real>(p.data[j] - upd);
    }
  }
}

}  // namespace geomsign
