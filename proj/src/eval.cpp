#include "srl/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

namespace srl {

namespace {

void check_aligned(std::size_t pred, std::size_t gold) {
  if (pred != gold) {
    throw ContractError("evaluation: prediction/gold sentence count mismatch: " +
                        std::to_string(pred) + " vs " + std::to_string(gold));
  }
}

}  // namespace

Metrics score_arguments(const std::vector<std::vector<Triplet>>& pred,
                        const std::vector<std::vector<Triplet>>& gold) {
  check_aligned(pred.size(), gold.size());
  Metrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    m.predicted += static_cast<long>(pred[i].size());
    m.gold += static_cast<long>(gold[i].size());
    std::set<Triplet> gset(gold[i].begin(), gold[i].end());
    for (const auto& t : pred[i]) {
      if (gset.count(t)) ++m.correct;
    }
  }
  return m;
}

Metrics score_predicates(const std::vector<std::vector<Triplet>>& pred,
                         const std::vector<std::vector<int>>& gold_predicates) {
  check_aligned(pred.size(), gold_predicates.size());
  Metrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    std::set<int> psset;
    for (const auto& t : pred[i]) psset.insert(t.p);
    std::set<int> gset(gold_predicates[i].begin(), gold_predicates[i].end());
    m.predicted += static_cast<long>(psset.size());
    m.gold += static_cast<long>(gset.size());
    for (int p : psset) {
      if (gset.count(p)) ++m.correct;
    }
  }
  return m;
}

std::array<Metrics, kDistanceBuckets> distance_report(
    const std::vector<std::vector<Triplet>>& pred, const std::vector<std::vector<Triplet>>& gold,
    long* self_pair_warnings) {
  check_aligned(pred.size(), gold.size());
  std::array<Metrics, kDistanceBuckets> buckets{};
  long self_pairs = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    std::set<Triplet> gset(gold[i].begin(), gold[i].end());
    for (const auto& t : pred[i]) {
      if (t.p == t.a) ++self_pairs;
      Metrics& b = buckets[static_cast<std::size_t>(distance_bucket(t))];
      ++b.predicted;
      if (gset.count(t)) ++b.correct;
    }
    for (const auto& t : gold[i]) {
      if (t.p == t.a) ++self_pairs;
      ++buckets[static_cast<std::size_t>(distance_bucket(t))].gold;
    }
  }
  if (self_pair_warnings) *self_pair_warnings = self_pairs;
  return buckets;
}

EvalReport evaluate(const std::vector<std::vector<Triplet>>& pred,
                    const std::vector<Sentence>& gold) {
  check_aligned(pred.size(), gold.size());
  EvalReport rep;
  rep.sentence_count = static_cast<long>(gold.size());

  std::vector<std::vector<Triplet>> gold_triplets;
  std::vector<std::vector<int>> gold_preds;
  for (const auto& s : gold) {
    gold_triplets.push_back(s.gold);
    gold_preds.push_back(s.predicates);
  }

  rep.arguments = score_arguments(pred, gold_triplets);
  rep.predicates = score_predicates(pred, gold_preds);
  rep.distance = distance_report(pred, gold_triplets, &rep.self_pair_warnings);
  rep.no_data = rep.arguments.predicted == 0 && rep.arguments.gold == 0;

  for (std::size_t i = 0; i < pred.size(); ++i) {
    std::set<Triplet> gset(gold_triplets[i].begin(), gold_triplets[i].end());
    for (const auto& t : pred[i]) {
      Metrics& m = rep.per_role[t.role];
      ++m.predicted;
      if (gset.count(t)) ++m.correct;
    }
    for (const auto& t : gold_triplets[i]) ++rep.per_role[t.role].gold;
  }
  return rep;
}

namespace {

const char* bucket_name(int i) {
  static const char* names[] = {"1", "2", "3", "4", "5", "6", ">=7"};
  return names[i];
}

void print_metrics(std::ostream& os, const char* label, const Metrics& m) {
  os << std::left << std::setw(12) << label << std::right << std::fixed << std::setprecision(4)
     << "  P=" << m.precision() << "  R=" << m.recall() << "  F1=" << m.f1() << "  ("
     << m.correct << "/" << m.predicted << "/" << m.gold << " correct/pred/gold)\n";
}

}  // namespace

std::string EvalReport::text() const {
  std::ostringstream os;
  os << "sentences: " << sentence_count << "\n";
  if (no_data) os << "warning: no data (no predictions and no gold)\n";
  if (self_pair_warnings > 0) {
    os << "warning: " << self_pair_warnings << " self-pair triplets counted in bucket 1\n";
  }
  print_metrics(os, "arguments", arguments);
  print_metrics(os, "predicates", predicates);
  os << "per-role:\n";
  for (const auto& [role, m] : per_role) print_metrics(os, ("  " + role).c_str(), m);
  os << "distance buckets:\n";
  for (int i = 0; i < kDistanceBuckets; ++i) {
    print_metrics(os, (std::string("  ") + bucket_name(i)).c_str(), distance[static_cast<std::size_t>(i)]);
  }
  return os.str();
}

std::string EvalReport::machine() const {
  std::ostringstream os;
  os << std::setprecision(17);
  auto emit = [&os](const std::string& key, const Metrics& m) {
    os << key << ".precision\t" << m.precision() << "\n";
    os << key << ".recall\t" << m.recall() << "\n";
    os << key << ".f1\t" << m.f1() << "\n";
    os << key << ".correct\t" << m.correct << "\n";
    os << key << ".predicted\t" << m.predicted << "\n";
    os << key << ".gold\t" << m.gold << "\n";
  };
  os << "sentences\t" << sentence_count << "\n";
  emit("arguments", arguments);
  emit("predicates", predicates);
  for (const auto& [role, m] : per_role) emit("role." + role, m);
  for (int i = 0; i < kDistanceBuckets; ++i) {
    emit(std::string("distance.") + bucket_name(i), distance[static_cast<std::size_t>(i)]);
  }
  return os.str();
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "iterations\targ_f1\tprd_f1\n" << std::fixed << std::setprecision(6);
  for (const auto& r : rows) os << r.iterations << "\t" << r.arg_f1 << "\t" << r.prd_f1 << "\n";
  return os.str();
}

std::string distance_table(const std::array<Metrics, kDistanceBuckets>& buckets) {
  std::ostringstream os;
  os << "bucket\tcorrect\tpredicted\tgold\tf1\n" << std::fixed << std::setprecision(6);
  for (int i = 0; i < kDistanceBuckets; ++i) {
    const Metrics& m = buckets[static_cast<std::size_t>(i)];
    os << bucket_name(i) << "\t" << m.correct << "\t" << m.predicted << "\t" << m.gold << "\t"
       << m.f1() << "\n";
  }
  return os.str();
}

}  // namespace srl
