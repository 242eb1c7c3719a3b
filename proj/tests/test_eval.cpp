#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "srl/eval.hpp"
#include "srl/synthetic.hpp"

#include "test_helpers.hpp"

#include <random>

using namespace srl;
using namespace srl::testing;

namespace {

std::vector<std::vector<Triplet>> one(std::vector<Triplet> ts) { return {std::move(ts)}; }

}  // namespace

TEST_CASE("score_arguments: direct formula") {
  auto m = score_arguments(one({{1, 2, "A0"}, {1, 3, "A1"}}), one({{1, 2, "A0"}}));
  CHECK(m.precision() == doctest::Approx(0.5));
  CHECK(m.recall() == doctest::Approx(1.0));
  CHECK(m.f1() == doctest::Approx(2.0 / 3));
}

TEST_CASE("score_arguments: empty sets flagged, 0/0 -> 0") {
  auto m = score_arguments(one({}), one({}));
  CHECK(m.precision() == 0.0);
  CHECK(m.recall() == 0.0);
  CHECK(m.f1() == 0.0);

  std::vector<Sentence> gold(1);
  auto rep = evaluate({{}}, gold);
  CHECK(rep.no_data);
}

TEST_CASE("score_arguments: identical nonempty sets give F1 = 1") {
  auto m = score_arguments(one({{1, 2, "A0"}, {2, 3, "A1"}}), one({{1, 2, "A0"}, {2, 3, "A1"}}));
  CHECK(m.f1() == doctest::Approx(1.0));
}

TEST_CASE("score_arguments: symmetric under pred/gold swap with P and R exchanged") {
  auto pred = one({{1, 2, "A0"}, {1, 3, "A1"}, {2, 2, "A2"}});
  auto gold = one({{1, 2, "A0"}, {2, 5, "A0"}});
  auto a = score_arguments(pred, gold);
  auto b = score_arguments(gold, pred);
  CHECK(a.precision() == doctest::Approx(b.recall()));
  CHECK(a.recall() == doctest::Approx(b.precision()));
}

TEST_CASE("score_arguments: sentence count mismatch is a contract error") {
  CHECK_THROWS_AS(score_arguments({{}, {}}, {{}}), ContractError);
}

TEST_CASE("score_predicates: derived from triplets, counts token identity") {
  auto m = score_predicates(one({{1, 2, "A0"}}), {{1, 4}});
  CHECK(m.precision() == doctest::Approx(1.0));
  CHECK(m.recall() == doctest::Approx(0.5));
  CHECK(m.f1() == doctest::Approx(2.0 / 3));

  // No predicted triplets, nonempty gold.
  auto m2 = score_predicates(one({}), {{3}});
  CHECK(m2.recall() == 0.0);
  // A gold predicate with zero gold arguments still counts as gold.
  CHECK(m2.gold == 1);
}

TEST_CASE("distance buckets: assignment and partition") {
  CHECK(distance_bucket({1, 8, "A0"}) == 6);   // >= 7
  CHECK(distance_bucket({3, 4, "A0"}) == 0);   // |3-4| = 1
  CHECK(distance_bucket({2, 2, "A0"}) == 0);   // self-pair warns into bucket 1
  CHECK(distance_bucket({1, 7, "A0"}) == 5);

  std::mt19937_64 rng(3);
  std::vector<std::vector<Triplet>> gold(5);
  std::uniform_int_distribution<int> tok(1, 20);
  for (auto& s : gold) {
    for (int i = 0; i < 6; ++i) s.push_back({tok(rng), tok(rng), "A0"});
  }
  long warnings = 0;
  auto buckets = distance_report(std::vector<std::vector<Triplet>>(5), gold, &warnings);
  long total = 0;
  for (const auto& b : buckets) total += b.gold;
  CHECK(total == 30);  // buckets partition the gold set
}

TEST_CASE("self-pairs produce a warning count") {
  std::vector<Sentence> gold(1);
  gold[0].gold = {{2, 2, "A0"}};
  auto rep = evaluate(one({{2, 2, "A0"}}), gold);
  CHECK(rep.self_pair_warnings > 0);
  CHECK(rep.arguments.f1() == doctest::Approx(1.0));
}

TEST_CASE("micro-F1 equals F1 of summed counts, never per-sentence averaged") {
  // Two sentences with very different sizes; per-sentence averaging would
  // give a different number.
  std::vector<std::vector<Triplet>> pred = {{{1, 2, "A0"}},
                                            {{1, 2, "A0"}, {1, 3, "A1"}, {1, 4, "A2"}}};
  std::vector<std::vector<Triplet>> gold = {{{1, 2, "A1"}},
                                            {{1, 2, "A0"}, {1, 3, "A1"}, {1, 4, "A2"}}};
  auto m = score_arguments(pred, gold);
  CHECK(m.correct == 3);
  CHECK(m.predicted == 4);
  CHECK(m.gold == 4);
  CHECK(m.precision() == doctest::Approx(3.0 / 4));
}

TEST_CASE("decode: epsilon-dominant parameters give the empty set") {
  auto cfg = tiny_config();
  auto m = make_model_params<double>(cfg, tiny_sizes(), 5);
  // Drive the ε score up for every pair.
  m.w_role_p.value.setZero();
  m.w_role_a.value.setZero();
  m.w_role_s.value.setZero();
  std::mt19937_64 rng(6);
  auto sent = random_encoded(rng, 4, m.sizes.n_roles);
  std::vector<std::string> roles = {"<eps>", "R1", "R2", "R3"};
  // All-zero scores: argmax ties resolve to the lowest role id, which is ε.
  auto out = decode(m, sent, 0, roles);
  CHECK(out.empty());
}

TEST_CASE("decode: never emits epsilon and scales do not change the set") {
  auto cfg = tiny_config();
  cfg.iterations = 1;
  auto m = make_model_params<double>(cfg, tiny_sizes(), 7);
  std::mt19937_64 rng(8);
  auto sent = random_encoded(rng, 5, m.sizes.n_roles);
  std::vector<std::string> roles = {"<eps>", "R1", "R2", "R3"};
  auto out = decode(m, sent, 1, roles);
  for (const auto& t : out) CHECK(t.role != "<eps>");

  // Doubling every role weight doubles scores; argmax set is unchanged.
  m.w_role_p.value *= 2;
  m.w_role_a.value *= 2;
  m.w_role_s.value *= 2;
  auto out2 = decode(m, sent, 1, roles);
  CHECK(out.size() == out2.size());
}

TEST_CASE("iteration_sweep: structure") {
  auto corpus = synthetic_overfit_corpus(3, 6);
  auto vocab = build_vocab(corpus, 1);
  auto cfg = tiny_config();
  auto m = make_model_params<double>(cfg, ModelSizes::from_vocab(vocab), 9);

  CHECK_THROWS_AS(iteration_sweep(m, corpus, vocab, {}), ContractError);

  auto rows = iteration_sweep(m, corpus, vocab, {0, 1, 2});
  REQUIRE(rows.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(rows[static_cast<std::size_t>(i)].iterations == i);

  auto table = sweep_table(rows);
  CHECK(table.find("iterations\targ_f1\tprd_f1") == 0);
}

TEST_CASE("report serialization mentions every bucket") {
  std::vector<Sentence> gold(2);
  gold[0].gold = {{1, 8, "A0"}};
  gold[0].predicates = {1};
  auto rep = evaluate({{{1, 8, "A0"}}, {}}, gold);
  auto text = rep.text();
  CHECK(text.find(">=7") != std::string::npos);
  auto machine = rep.machine();
  CHECK(machine.find("arguments.f1\t1") != std::string::npos);
  CHECK(machine.find("distance.>=7.gold\t1") != std::string::npos);
}
