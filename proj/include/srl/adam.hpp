#pragma once

// Standard Adam with bias correction, plus global-norm gradient clipping.

#include "srl/tensor.hpp"

#include <cmath>
#include <vector>

namespace srl {

template <typename S>
struct AdamState {
  std::vector<Mat<S>> m1, m2;  // first/second moments, parameter order
  long step = 0;

  void init(const std::vector<Param<S>*>& params) {
    m1.clear();
    m2.clear();
    for (const auto* p : params) {
      m1.push_back(Mat<S>::Zero(p->value.rows(), p->value.cols()));
      m2.push_back(Mat<S>::Zero(p->value.rows(), p->value.cols()));
    }
    step = 0;
  }
};

template <typename S>
void clip_global_norm(const std::vector<Param<S>*>& params, double max_norm) {
  double sq = 0.0;
  for (const auto* p : params) sq += static_cast<double>(p->grad.squaredNorm());
  double norm = std::sqrt(sq);
  if (norm > max_norm) {
    S factor = static_cast<S>(max_norm / norm);
    for (auto* p : params) p->grad *= factor;
  }
}

template <typename S>
void adam_step(const std::vector<Param<S>*>& params, AdamState<S>& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
  if (state.m1.size() != params.size()) throw ContractError("adam_step: state not initialized");
  for (const auto* p : params) {
    if (!p->grad.allFinite()) {
      throw ContractError("adam_step: non-finite gradient for parameter " + p->name);
    }
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param<S>& p = *params[i];
    state.m1[i] = static_cast<S>(beta1) * state.m1[i] + static_cast<S>(1.0 - beta1) * p.grad;
    state.m2[i] = static_cast<S>(beta2) * state.m2[i] +
                  static_cast<S>(1.0 - beta2) * p.grad.cwiseProduct(p.grad).eval();
    Mat<S> mhat = state.m1[i] / static_cast<S>(bc1);
    Mat<S> vhat = state.m2[i] / static_cast<S>(bc2);
    p.value -= (static_cast<S>(lr) * mhat.array() /
                (vhat.array().sqrt() + static_cast<S>(eps)))
                   .matrix();
  }
}

}  // namespace srl
