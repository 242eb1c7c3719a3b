#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "srl/gradcheck.hpp"
#include "srl/pipeline.hpp"
#include "srl/refiner.hpp"

#include "oracle.hpp"
#include "test_helpers.hpp"

#include <random>

using namespace srl;
using namespace srl::testing;

namespace {

ModelParams<double> tiny_model(std::uint64_t seed = 3) {
  return make_model_params<double>(tiny_config(), tiny_sizes(), seed);
}

Mat<double> random_mat(std::mt19937_64& rng, int r, int c) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat<double> m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = dist(rng);
  return m;
}

template <typename F>
AttendResult<double> run_attend(ModelParams<double>& m, Graph<double>& g, const Mat<double>& h,
                                const Mat<double>& vs, F&& setup) {
  setup();
  Tensor<double> reps = g.constant(vs);
  Tensor<double> base = matmul(reps, transpose(g.param(m.w4)));
  return attend(g, m, g.constant(h), base, reps, g.param(m.w3), g.param(m.w_u));
}

}  // namespace

TEST_CASE("attend: identical pair reps give that vector regardless of alpha") {
  auto m = tiny_model();
  std::mt19937_64 rng(7);
  Mat<double> h = random_mat(rng, 1, m.cfg.token_dim());
  Mat<double> row = random_mat(rng, 1, m.cfg.score_dim);
  Mat<double> vs(5, m.cfg.score_dim);
  for (int k = 0; k < 5; ++k) vs.row(k) = row;
  Graph<double> g;
  auto ar = run_attend(m, g, h, vs, [] {});
  CHECK((ar.o.value() - row).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("attend: single pair gets weight one") {
  auto m = tiny_model();
  std::mt19937_64 rng(8);
  Mat<double> h = random_mat(rng, 1, m.cfg.token_dim());
  Mat<double> vs = random_mat(rng, 1, m.cfg.score_dim);
  Graph<double> g;
  auto ar = run_attend(m, g, h, vs, [] {});
  CHECK(ar.alpha(0, 0) == doctest::Approx(1.0));
  CHECK((ar.o.value() - vs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("attend: zero attention weights give the mean of pair reps") {
  auto m = tiny_model();
  std::mt19937_64 rng(9);
  Mat<double> h = random_mat(rng, 1, m.cfg.token_dim());
  Mat<double> vs = random_mat(rng, 4, m.cfg.score_dim);
  Graph<double> g;
  auto ar = run_attend(m, g, h, vs, [&] {
    m.w3.value.setZero();
    m.w4.value.setZero();
  });
  Mat<double> mean = vs.colwise().mean();
  CHECK((ar.o.value() - mean).cwiseAbs().maxCoeff() < 1e-12);
  for (int k = 0; k < 4; ++k) CHECK(ar.alpha(0, k) == doctest::Approx(0.25));
}

TEST_CASE("attend: K=0 degenerates to the zero vector") {
  auto m = tiny_model();
  Graph<double> g;
  Tensor<double> empty = g.constant(Mat<double>(0, m.cfg.score_dim));
  auto ar = attend(g, m, g.constant(Mat<double>::Zero(1, m.cfg.token_dim())), empty, empty,
                   g.param(m.w3), g.param(m.w_u));
  CHECK(ar.o.value() == Mat<double>::Zero(1, m.cfg.score_dim));
}

TEST_CASE("refine_token: zero FFN maps every token to the bias image") {
  auto m = tiny_model();
  m.ffn_refine.w1.value.setZero();
  m.ffn_refine.w2.value.setZero();
  m.ffn_refine.b1.value.setZero();
  m.ffn_refine.b2.value.setConstant(0.5);
  std::mt19937_64 rng(10);
  Graph<double> g;
  auto h1 = refine_token(g, m, g.constant(random_mat(rng, 1, m.cfg.token_dim())),
                         g.constant(random_mat(rng, 1, m.cfg.score_dim)));
  auto h2 = refine_token(g, m, g.constant(random_mat(rng, 1, m.cfg.token_dim())),
                         g.constant(random_mat(rng, 1, m.cfg.score_dim)));
  CHECK(h1.value() == h2.value());
  CHECK(h1.value()(0, 0) == 0.5);
  CHECK(h1.cols() == m.cfg.token_dim());
}

TEST_CASE("refine_token: identical inputs produce identical outputs") {
  auto m = tiny_model(11);
  std::mt19937_64 rng(12);
  Mat<double> h = random_mat(rng, 1, m.cfg.token_dim());
  Mat<double> o = random_mat(rng, 1, m.cfg.score_dim);
  Graph<double> g;
  auto a = refine_token(g, m, g.constant(h), g.constant(o));
  auto b = refine_token(g, m, g.constant(h), g.constant(o));
  CHECK(a.value() == b.value());
}

TEST_CASE("refine_iterate: N=0 is the identity, negative N is an error") {
  auto m = tiny_model(13);
  std::mt19937_64 rng(14);
  Mat<double> H = random_mat(rng, 3, m.cfg.token_dim());
  Graph<double> g;
  auto t = g.constant(H);
  auto out = refine_iterate(g, m, t, 0, PairPolicy::OrderedAll);
  CHECK(out.id == t.id);
  CHECK(out.value() == H);
  CHECK_THROWS_AS(refine_iterate(g, m, t, -1, PairPolicy::OrderedAll), ContractError);
}

TEST_CASE("refine_iterate: N then M more equals N+M (bitwise, fp64)") {
  auto m = tiny_model(15);
  std::mt19937_64 rng(16);
  Mat<double> H = random_mat(rng, 3, m.cfg.token_dim());
  Graph<double> g;
  auto a = refine_iterate(g, m, g.constant(H), 3, PairPolicy::OrderedAll);
  auto b = refine_iterate(g, m, refine_iterate(g, m, g.constant(H), 2, PairPolicy::OrderedAll), 1,
                          PairPolicy::OrderedAll);
  CHECK(a.value() == b.value());
}

TEST_CASE("refine_once matches hand-composed oracle at N=1") {
  auto m = tiny_model(17);
  std::mt19937_64 rng(18);
  Mat<double> H = random_mat(rng, 2, m.cfg.token_dim());
  Graph<double> g;
  auto out = refine_once(g, m, g.constant(H), PairPolicy::OrderedAll);
  Eigen::MatrixXd expected = oracle::refine_once(m, H, PairPolicy::OrderedAll);
  CHECK((out.value() - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("alpha rows sum to one and o_t stays in the convex hull") {
  auto m = tiny_model(19);
  std::mt19937_64 rng(20);
  Mat<double> H = random_mat(rng, 4, m.cfg.token_dim());
  Graph<double> g;
  RefineTrace<double> trace;
  refine_iterate(g, m, g.constant(H), 2, PairPolicy::OrderedAll, &trace);
  REQUIRE(trace.iterations.size() == 2);
  for (const auto& it : trace.iterations) {
    REQUIRE(it.alphas.size() == 4);
    for (std::size_t t = 0; t < it.alphas.size(); ++t) {
      const auto& alpha = it.alphas[t];
      CHECK(alpha.sum() == doctest::Approx(1.0).epsilon(1e-6));
      Mat<double> o = alpha * it.pair_reps;
      for (Eigen::Index c = 0; c < o.cols(); ++c) {
        CHECK(o(0, c) >= it.pair_reps.col(c).minCoeff() - 1e-12);
        CHECK(o(0, c) <= it.pair_reps.col(c).maxCoeff() + 1e-12);
      }
    }
  }
}

TEST_CASE("gradients flow through the refinement stack into W3/W4/w_u") {
  auto m = tiny_model(21);
  std::mt19937_64 rng(22);
  auto sent = random_encoded(rng, 3, m.sizes.n_roles);
  m.cfg.iterations = 2;
  m.zero_grads();
  Graph<double> g;
  auto loss = sentence_loss(g, m, sent);
  g.backward(loss);
  CHECK(m.w3.grad.cwiseAbs().maxCoeff() > 0.0);
  CHECK(m.w4.grad.cwiseAbs().maxCoeff() > 0.0);
  CHECK(m.w_u.grad.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("gradient check through attend + refine and upstream biaffine") {
  auto m = tiny_model(23);
  std::mt19937_64 rng(24);
  Mat<double> H = random_mat(rng, 2, m.cfg.token_dim());
  auto report = grad_check(
      {&m.w3, &m.w4, &m.w_u, &m.ffn_refine.w1, &m.ffn_refine.b1, &m.ffn_refine.w2,
       &m.ffn_refine.b2, &m.w1, &m.w2, &m.b},
      [&](Graph<double>& g) {
        auto out = refine_once(g, m, g.constant(H), PairPolicy::OrderedAll);
        return sum(tanh_t(out));
      });
  CHECK(report.max_rel_err() < 1e-4);
}

TEST_CASE("own-pairs attention mask restricts the mixture support") {
  auto m = tiny_model(25);
  m.cfg.attend_own_pairs_only = true;
  std::mt19937_64 rng(26);
  Mat<double> H = random_mat(rng, 3, m.cfg.token_dim());
  Graph<double> g;
  typename RefineTrace<double>::Iteration it;
  refine_once(g, m, g.constant(H), PairPolicy::OrderedAll, &it);
  // With n=3 ordered-all, each token participates in 2n-1 = 5 pairs.
  for (const auto& alpha : it.alphas) CHECK(alpha.cols() == 5);
}
