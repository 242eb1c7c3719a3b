#pragma once

// Central finite-difference verification of backward rules. Runs in fp64
// only; the loss builder is re-invoked for every perturbed entry.

#include "srl/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace srl {

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;

  double max_rel_err() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.max_rel_err);
    return m;
  }
  bool pass(double threshold) const { return max_rel_err() < threshold; }
};

// The denominator floor reflects what central differences can certify: with
// loss values of order 1..100 in fp64, (f(x+e) - f(x-e)) / 2e carries
// roundoff noise of roughly |f| * 2^-52 / e (~1e-10 for e = 1e-5), so
// gradients far below 1e-5 cannot be resolved entrywise and are compared
// against the floor instead.
inline double rel_err(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-5});
}

// loss_fn builds the loss from the current parameter values in a fresh graph.
inline GradCheckReport grad_check(
    std::vector<Param<double>*> params,
    const std::function<Tensor<double>(Graph<double>&)>& loss_fn, double eps = 1e-5) {
  if (!(eps > 0.0 && eps <= 1e-3)) throw ContractError("grad_check: eps must be in (0, 1e-3]");

  for (auto* p : params) p->zero_grad();
  {
    Graph<double> g;
    Tensor<double> loss = loss_fn(g);
    if (!std::isfinite(loss.value()(0, 0))) throw ContractError("grad_check: non-finite loss");
    g.backward(loss);
  }

  auto eval = [&]() {
    Graph<double> g;
    return loss_fn(g).value()(0, 0);
  };

  GradCheckReport report;
  for (auto* p : params) {
    GradCheckEntry e{p->name, 0.0};
    for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
        double saved = p->value(r, c);
        p->value(r, c) = saved + eps;
        double up = eval();
        p->value(r, c) = saved - eps;
        double down = eval();
        p->value(r, c) = saved;
        double numeric = (up - down) / (2.0 * eps);
        double analytic = p->grad(r, c);
        if (!std::isfinite(numeric) || !std::isfinite(analytic)) {
          throw ContractError("grad_check: non-finite gradient for parameter " + p->name);
        }
        e.max_rel_err = std::max(e.max_rel_err, rel_err(analytic, numeric));
      }
    }
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace srl
