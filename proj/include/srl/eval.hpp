#pragma once

// Decoding and metrics: labeled argument P/R/F1, predicate
// detection F1, per-role counts, distance-bucketed F1, and the
// refinement-iteration sweep.

#include "srl/corpus.hpp"
#include "srl/pipeline.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace srl {

struct Metrics {
  long correct = 0;
  long predicted = 0;
  long gold = 0;

  double precision() const { return predicted == 0 ? 0.0 : double(correct) / double(predicted); }
  double recall() const { return gold == 0 ? 0.0 : double(correct) / double(gold); }
  double f1() const {
    double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

inline constexpr int kDistanceBuckets = 7;  // 1,2,3,4,5,6,>=7

// |p - a| mapped to bucket index 0..6; self-pairs land in bucket 0.
inline int distance_bucket(const Triplet& t) {
  int d = std::abs(t.p - t.a);
  if (d <= 1) return 0;
  if (d >= 7) return 6;
  return d - 1;
}

struct EvalReport {
  Metrics arguments;
  Metrics predicates;
  std::map<std::string, Metrics> per_role;
  std::array<Metrics, kDistanceBuckets> distance;
  long sentence_count = 0;
  long self_pair_warnings = 0;
  bool no_data = false;  // pred and gold both empty

  std::string text() const;
  std::string machine() const;  // one "key\tvalue" record per metric/bucket
};

Metrics score_arguments(const std::vector<std::vector<Triplet>>& pred,
                        const std::vector<std::vector<Triplet>>& gold);
Metrics score_predicates(const std::vector<std::vector<Triplet>>& pred,
                         const std::vector<std::vector<int>>& gold_predicates);
std::array<Metrics, kDistanceBuckets> distance_report(
    const std::vector<std::vector<Triplet>>& pred, const std::vector<std::vector<Triplet>>& gold,
    long* self_pair_warnings = nullptr);

EvalReport evaluate(const std::vector<std::vector<Triplet>>& pred,
                    const std::vector<Sentence>& gold);

// Argmax decoding: emit (p, a, r*) for every enumerated pair whose best
// role is not ε; ties break toward the lowest role id.
template <typename S>
std::vector<Triplet> decode(ModelParams<S>& m, const EncodedSentence& sent, int n_iterations,
                            const std::vector<std::string>& role_names,
                            RefineTrace<S>* trace = nullptr) {
  Graph<S> g;
  ForwardResult<S> fwd = forward_scores(g, m, sent, n_iterations, nullptr, trace != nullptr);
  if (trace) *trace = std::move(fwd.trace);
  std::vector<Triplet> out;
  const Mat<S>& scores = fwd.scores.value();
  for (std::size_t k = 0; k < fwd.pairs.size(); ++k) {
    Eigen::Index best = 0;
    S best_score = scores(static_cast<Eigen::Index>(k), 0);
    for (Eigen::Index r = 1; r < scores.cols(); ++r) {
      if (scores(static_cast<Eigen::Index>(k), r) > best_score) {
        best = r;
        best_score = scores(static_cast<Eigen::Index>(k), r);
      }
    }
    if (best != Vocabulary::kEpsilonRole) {
      out.push_back(Triplet{fwd.pairs[k].first + 1, fwd.pairs[k].second + 1,
                            role_names[static_cast<std::size_t>(best)]});
    }
  }
  return out;
}

struct SweepRow {
  int iterations;
  double arg_f1;
  double prd_f1;
};

// Shared-parameter model evaluated at multiple N values.
template <typename S>
std::vector<SweepRow> iteration_sweep(ModelParams<S>& m, const std::vector<Sentence>& dev,
                                      const Vocabulary& vocab, const std::vector<int>& n_values) {
  if (n_values.empty()) throw ContractError("iteration_sweep: empty N range");
  std::vector<SweepRow> rows;
  for (int n : n_values) {
    std::vector<std::vector<Triplet>> preds;
    for (const auto& sent : dev) {
      preds.push_back(decode(m, encode_sentence(sent, vocab), n, vocab.role_names));
    }
    EvalReport rep = evaluate(preds, dev);
    rows.push_back({n, rep.arguments.f1(), rep.predicates.f1()});
  }
  return rows;
}

std::string sweep_table(const std::vector<SweepRow>& rows);
std::string distance_table(const std::array<Metrics, kDistanceBuckets>& buckets);

}  // namespace srl
