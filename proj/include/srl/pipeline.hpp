#pragma once

// End-to-end forward pass and training loss: encoder -> N refinement
// iterations -> projections -> pair scores -> role scores, with the
// negative log-likelihood over all enumerated pairs (null role where no
// gold triplet exists).

#include "srl/encoder.hpp"
#include "srl/model.hpp"
#include "srl/refiner.hpp"
#include "srl/scorer.hpp"
#include "srl/tensor.hpp"

#include <map>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

namespace srl {

template <typename S>
struct ForwardResult {
  std::vector<std::pair<int, int>> pairs;  // 0-based
  Tensor<S> scores;                        // K x |R|
  std::vector<Tensor<S>> aux_scores;       // pre-final iterations, if aux_loss
  RefineTrace<S> trace;
};

template <typename S>
ForwardResult<S> forward_scores(Graph<S>& g, ModelParams<S>& m, const EncodedSentence& sent,
                                int n_iterations, std::mt19937_64* dropout_rng = nullptr,
                                bool want_trace = false) {
  if (n_iterations < 0) throw ContractError("forward_scores: negative iteration count");
  const PairPolicy policy = m.cfg.pair_policy;

  ForwardResult<S> result;
  Tensor<S> H = encode_tokens(g, m, sent, dropout_rng);
  for (int i = 0; i < n_iterations; ++i) {
    if (m.cfg.aux_loss) {
      Projections<S> proj = project(g, m, H);
      PairScores<S> ps = score_all_pairs(g, m, proj, policy);
      result.aux_scores.push_back(role_scores(g, m, proj, ps));
    }
    typename RefineTrace<S>::Iteration it;
    H = refine_once(g, m, H, policy, want_trace ? &it : nullptr);
    if (want_trace) result.trace.iterations.push_back(std::move(it));
  }
  Projections<S> proj = project(g, m, H);
  PairScores<S> ps = score_all_pairs(g, m, proj, policy);
  result.scores = role_scores(g, m, proj, ps);
  result.pairs = std::move(ps.pairs);
  return result;
}

// First-order path with the refiner bypassed entirely; must match
// forward_scores at N = 0 bit for bit.
template <typename S>
ForwardResult<S> baseline_scores(Graph<S>& g, ModelParams<S>& m, const EncodedSentence& sent,
                                 std::mt19937_64* dropout_rng = nullptr) {
  ForwardResult<S> result;
  Tensor<S> H = encode_tokens(g, m, sent, dropout_rng);
  Projections<S> proj = project(g, m, H);
  PairScores<S> ps = score_all_pairs(g, m, proj, m.cfg.pair_policy);
  result.scores = role_scores(g, m, proj, ps);
  result.pairs = std::move(ps.pairs);
  return result;
}

// Gold role id per enumerated pair (ε for pairs absent from gold). A gold
// pair outside the enumeration policy is a data/config mismatch.
inline std::vector<int> gold_roles_per_pair(const EncodedSentence& sent,
                                            const std::vector<std::pair<int, int>>& pairs) {
  std::map<std::pair<int, int>, int> by_pair;
  for (std::size_t i = 0; i < sent.gold.size(); ++i) {
    const Triplet& t = sent.gold[i];
    if (sent.gold_role_ids[i] < 0) {
      throw ContractError("gold triplet (" + std::to_string(t.p) + "," + std::to_string(t.a) +
                          "," + t.role + ") has a role unseen in the training vocabulary");
    }
    by_pair[{t.p - 1, t.a - 1}] = sent.gold_role_ids[i];
  }
  std::vector<int> roles(pairs.size(), Vocabulary::kEpsilonRole);
  std::size_t matched = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto it = by_pair.find(pairs[k]);
    if (it != by_pair.end()) {
      roles[k] = it->second;
      ++matched;
    }
  }
  if (matched != by_pair.size()) {
    for (const auto& [pa, rid] : by_pair) {
      bool found = false;
      for (const auto& pr : pairs) {
        if (pr == pa) {
          found = true;
          break;
        }
      }
      if (!found) {
        std::ostringstream os;
        os << "gold triplet (p=" << pa.first + 1 << ", a=" << pa.second + 1
           << ", role_id=" << rid << ") is outside the configured pair enumeration policy";
        throw ContractError(os.str());
      }
    }
  }
  return roles;
}

template <typename S>
Tensor<S> nll_from_scores(Graph<S>& g, ModelParams<S>& m, Tensor<S> scores,
                          const std::vector<int>& gold_roles) {
  Tensor<S> logp = log_softmax_rows(scores);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> picks;
  picks.reserve(gold_roles.size());
  for (std::size_t k = 0; k < gold_roles.size(); ++k) {
    picks.emplace_back(static_cast<Eigen::Index>(k), gold_roles[k]);
  }
  Tensor<S> picked = select_entries(logp, std::move(picks));
  if (m.cfg.epsilon_weight != 1.0) {
    Mat<S> w(picked.rows(), 1);
    for (std::size_t k = 0; k < gold_roles.size(); ++k) {
      w(static_cast<Eigen::Index>(k), 0) =
          gold_roles[k] == Vocabulary::kEpsilonRole ? static_cast<S>(m.cfg.epsilon_weight) : S(1);
    }
    picked = cmul(picked, g.constant(std::move(w)));
  }
  return scale(sum(picked), S(-1));
}

// Negative log-likelihood of the gold structure, summed over pairs.
template <typename S>
Tensor<S> sentence_loss(Graph<S>& g, ModelParams<S>& m, const EncodedSentence& sent,
                        std::mt19937_64* dropout_rng = nullptr) {
  ForwardResult<S> fwd = forward_scores(g, m, sent, m.cfg.iterations, dropout_rng);
  std::vector<int> gold = gold_roles_per_pair(sent, fwd.pairs);
  Tensor<S> loss = nll_from_scores(g, m, fwd.scores, gold);
  for (Tensor<S> aux : fwd.aux_scores) {
    loss = add(loss, nll_from_scores(g, m, aux, gold));
  }
  return loss;
}

}  // namespace srl
