#pragma once

// Predicate/argument projections, exhaustive biaffine pair scoring and
// per-role unary scores:
//   v_s(p,a) = v_p · W1 · v_a + W2 · [v_p; v_a] + b
//   phi(p,a,·) = Wp relu(v_p) + Wa relu(v_a) + Ws relu(v_s)

#include "srl/config.hpp"
#include "srl/model.hpp"
#include "srl/tensor.hpp"

#include <utility>
#include <vector>

namespace srl {

inline long pair_count(int n, PairPolicy policy) {
  long ln = n;
  switch (policy) {
    case PairPolicy::OrderedAll: return ln * ln;
    case PairPolicy::OrderedNoSelf: return ln * ln - ln;
    case PairPolicy::Unordered: return ln * (ln - 1) / 2;
  }
  return 0;
}

// 0-based (p, a) pairs in stable row-major order.
inline std::vector<std::pair<int, int>> enumerate_pairs(int n, PairPolicy policy) {
  if (n <= 0) throw ContractError("enumerate_pairs: empty sentence");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(pair_count(n, policy)));
  for (int p = 0; p < n; ++p) {
    for (int a = 0; a < n; ++a) {
      if (policy == PairPolicy::OrderedNoSelf && p == a) continue;
      if (policy == PairPolicy::Unordered && p >= a) continue;
      pairs.emplace_back(p, a);
    }
  }
  return pairs;
}

template <typename S>
struct Projections {
  Tensor<S> v_p;  // n x d_r
  Tensor<S> v_a;  // n x d_r
};

template <typename S>
Tensor<S> ffn_apply(Graph<S>& g, FfnParams<S>& f, Tensor<S> x) {
  Tensor<S> hidden = relu(add_rowvec(matmul(x, transpose(g.param(f.w1))), g.param(f.b1)));
  return add_rowvec(matmul(hidden, transpose(g.param(f.w2))), g.param(f.b2));
}

// The two FFNs share no parameters.
template <typename S>
Projections<S> project(Graph<S>& g, ModelParams<S>& m, Tensor<S> H) {
  return {ffn_apply(g, m.ffn_p, H), ffn_apply(g, m.ffn_a, H)};
}

template <typename S>
struct PairScores {
  std::vector<std::pair<int, int>> pairs;  // 0-based (p, a)
  Tensor<S> reps;                          // K x d_s
};

// One biaffine score vector per enumerated pair, batched per channel:
// bilinear channel c over all pairs is Vp · W1_c · Va^T.
template <typename S>
PairScores<S> score_all_pairs(Graph<S>& g, ModelParams<S>& m, const Projections<S>& proj,
                              PairPolicy policy) {
  const int n = static_cast<int>(proj.v_p.rows());
  const int d_r = m.cfg.rep_dim;
  const int d_s = m.cfg.score_dim;

  auto pairs = enumerate_pairs(n, policy);

  Tensor<S> w1 = g.param(m.w1);
  Tensor<S> w2 = g.param(m.w2);
  Tensor<S> vaT = transpose(proj.v_a);

  std::vector<Tensor<S>> channels;
  channels.reserve(static_cast<std::size_t>(d_s));
  for (int c = 0; c < d_s; ++c) {
    Tensor<S> w1c = cols(w1, static_cast<Eigen::Index>(c) * d_r, d_r);
    Tensor<S> grid = matmul(matmul(proj.v_p, w1c), vaT);  // n x n, entry (i,j)
    channels.push_back(flatten_rows(grid));               // n^2 x 1, row-major (p,a)
  }
  Tensor<S> bilinear = concat(channels, 1);  // n^2 x d_s

  Tensor<S> lin_p = matmul(proj.v_p, transpose(cols(w2, 0, d_r)));    // n x d_s
  Tensor<S> lin_a = matmul(proj.v_a, transpose(cols(w2, d_r, d_r)));  // n x d_s

  std::vector<Eigen::Index> p_idx, a_idx;
  p_idx.reserve(static_cast<std::size_t>(n) * n);
  a_idx.reserve(static_cast<std::size_t>(n) * n);
  for (int p = 0; p < n; ++p) {
    for (int a = 0; a < n; ++a) {
      p_idx.push_back(p);
      a_idx.push_back(a);
    }
  }
  Tensor<S> full = add_rowvec(
      add(bilinear, add(row_gather(lin_p, std::move(p_idx)), row_gather(lin_a, std::move(a_idx)))),
      g.param(m.b));

  if (policy != PairPolicy::OrderedAll) {
    std::vector<Eigen::Index> sel;
    sel.reserve(pairs.size());
    for (const auto& [p, a] : pairs) sel.push_back(static_cast<Eigen::Index>(p) * n + a);
    full = row_gather(full, std::move(sel));
  }
  return {std::move(pairs), full};
}

// K x |R| unary role scores for the enumerated pairs.
template <typename S>
Tensor<S> role_scores(Graph<S>& g, ModelParams<S>& m, const Projections<S>& proj,
                      const PairScores<S>& ps) {
  Tensor<S> sp = matmul(relu(proj.v_p), transpose(g.param(m.w_role_p)));  // n x |R|
  Tensor<S> sa = matmul(relu(proj.v_a), transpose(g.param(m.w_role_a)));  // n x |R|
  Tensor<S> ss = matmul(relu(ps.reps), transpose(g.param(m.w_role_s)));   // K x |R|

  std::vector<Eigen::Index> p_idx, a_idx;
  p_idx.reserve(ps.pairs.size());
  a_idx.reserve(ps.pairs.size());
  for (const auto& [p, a] : ps.pairs) {
    p_idx.push_back(p);
    a_idx.push_back(a);
  }
  return add(add(row_gather(sp, std::move(p_idx)), row_gather(sa, std::move(a_idx))), ss);
}

// Softmax over roles for each pair.
template <typename S>
Tensor<S> role_distribution(Tensor<S> scores) {
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      if (!std::isfinite(scores.value()(r, c))) {
        throw ContractError("role_distribution: non-finite score at pair row " + std::to_string(r));
      }
    }
  }
  return softmax_rows(scores);
}

}  // namespace srl
