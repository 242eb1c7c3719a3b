#pragma once

// High-order refining: every token attends over all pair-score
// representations, the attended feature is concatenated with the token
// representation and projected back to token width, for N iterations:
//   u_k = w_u^T tanh(W3 h_t + W4 v_k)   (learned scalarization)
//   alpha = softmax(u),  o_t = sum_k alpha_k v_k
//   h_t <- FFN([o_t ; h_t])
// Parameters are shared across iterations; pair scores are recomputed from
// the refreshed token representations each iteration.

#include "srl/model.hpp"
#include "srl/scorer.hpp"
#include "srl/tensor.hpp"

#include <vector>

namespace srl {

// Attention weights recorded for diagnostics: one 1xK row per token per
// iteration, together with the attended pair reps they mixed.
template <typename S>
struct RefineTrace {
  struct Iteration {
    std::vector<Mat<S>> alphas;  // per token, 1 x K
    Mat<S> pair_reps;            // K x d_s
  };
  std::vector<Iteration> iterations;
};

template <typename S>
struct AttendResult {
  Tensor<S> o;      // 1 x d_s
  Mat<S> alpha;     // 1 x K (values, for diagnostics)
};

// All K pairs participate by default; the own-pairs mask restricts to pairs
// containing the token.
template <typename S>
AttendResult<S> attend(Graph<S>& g, ModelParams<S>& m, Tensor<S> h_row, Tensor<S> attn_base,
                       Tensor<S> pair_reps, Tensor<S> w3_node, Tensor<S> w_u_node,
                       const std::vector<Eigen::Index>& mask = {}) {
  const int d_s = m.cfg.score_dim;
  if (pair_reps.rows() == 0) {
    return {g.constant(Mat<S>::Zero(1, d_s)), Mat<S>(1, 0)};
  }
  Tensor<S> base = attn_base;   // K x d_u, = Vs · W4^T
  Tensor<S> reps = pair_reps;   // K x d_s
  if (!mask.empty()) {
    base = row_gather(base, mask);
    reps = row_gather(reps, mask);
  }
  Tensor<S> h_feat = matmul(h_row, transpose(w3_node));              // 1 x d_u
  Tensor<S> u = tanh_t(add_rowvec(base, h_feat));                    // K x d_u
  Tensor<S> alpha = softmax_rows(transpose(matmul(u, w_u_node)));    // 1 x K
  Tensor<S> o = matmul(alpha, reps);                                 // 1 x d_s
  return {o, alpha.value()};
}

template <typename S>
Tensor<S> refine_token(Graph<S>& g, ModelParams<S>& m, Tensor<S> h_row, Tensor<S> o_row) {
  return ffn_apply(g, m.ffn_refine, concat(std::vector<Tensor<S>>{o_row, h_row}, 1));
}

// One full refinement iteration from current token representations.
template <typename S>
Tensor<S> refine_once(Graph<S>& g, ModelParams<S>& m, Tensor<S> H, PairPolicy policy,
                      typename RefineTrace<S>::Iteration* trace = nullptr) {
  const int n = static_cast<int>(H.rows());
  Projections<S> proj = project(g, m, H);
  PairScores<S> ps = score_all_pairs(g, m, proj, policy);
  Tensor<S> attn_base = matmul(ps.reps, transpose(g.param(m.w4)));  // K x d_u
  Tensor<S> w3_node = g.param(m.w3);
  Tensor<S> w_u_node = g.param(m.w_u);

  std::vector<std::vector<Eigen::Index>> masks;
  if (m.cfg.attend_own_pairs_only) {
    masks.resize(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < ps.pairs.size(); ++k) {
      masks[static_cast<std::size_t>(ps.pairs[k].first)].push_back(static_cast<Eigen::Index>(k));
      if (ps.pairs[k].second != ps.pairs[k].first) {
        masks[static_cast<std::size_t>(ps.pairs[k].second)].push_back(static_cast<Eigen::Index>(k));
      }
    }
  }

  std::vector<Tensor<S>> o_rows;
  o_rows.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    AttendResult<S> ar =
        attend(g, m, rows(H, t, 1), attn_base, ps.reps, w3_node, w_u_node,
               m.cfg.attend_own_pairs_only ? masks[static_cast<std::size_t>(t)]
                                           : std::vector<Eigen::Index>{});
    if (trace) trace->alphas.push_back(ar.alpha);
    o_rows.push_back(ar.o);
  }
  if (trace) trace->pair_reps = ps.reps.value();

  Tensor<S> O = concat(o_rows, 0);  // n x d_s
  return ffn_apply(g, m.ffn_refine, concat(std::vector<Tensor<S>>{O, H}, 1));
}

// N = 0 returns H unchanged and reproduces the baseline exactly.
template <typename S>
Tensor<S> refine_iterate(Graph<S>& g, ModelParams<S>& m, Tensor<S> H, int n_iterations,
                         PairPolicy policy, RefineTrace<S>* trace = nullptr) {
  if (n_iterations < 0) throw ContractError("refine_iterate: negative iteration count");
  for (int i = 0; i < n_iterations; ++i) {
    typename RefineTrace<S>::Iteration it;
    H = refine_once(g, m, H, policy, trace ? &it : nullptr);
    if (trace) trace->iterations.push_back(std::move(it));
  }
  return H;
}

}  // namespace srl
