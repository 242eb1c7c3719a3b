#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "srl/gradcheck.hpp"
#include "srl/tensor.hpp"

#include <random>

using namespace srl;

namespace {

Mat<double> random_mat(std::mt19937_64& rng, int r, int c) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat<double> m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = dist(rng);
  return m;
}

// Finite-difference check of a scalar built from a single parameter.
double fd_check(Param<double>& p, const std::function<Tensor<double>(Graph<double>&)>& f) {
  return grad_check({&p}, f).max_rel_err();
}

}  // namespace

TEST_CASE("matmul forward") {
  Graph<double> g;
  Mat<double> id(2, 2), b(2, 2);
  id << 1, 0, 0, 1;
  b << 5, 6, 7, 8;
  auto r = matmul(g.constant(id), g.constant(b));
  CHECK(r.value() == b);

  Mat<double> s1(1, 1), s2(1, 1);
  s1 << 2;
  s2 << 3;
  CHECK(matmul(g.constant(s1), g.constant(s2)).value()(0, 0) == 6);
}

TEST_CASE("matmul shape mismatch names both shapes") {
  Graph<double> g;
  auto a = g.constant(Mat<double>::Zero(2, 3));
  auto b = g.constant(Mat<double>::Zero(4, 2));
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("[2x3]"), DimensionError);
}

TEST_CASE("matmul gradients vs finite differences") {
  std::mt19937_64 rng(7);
  Param<double> a("a", 3, 4), b("b", 4, 2);
  a.value = random_mat(rng, 3, 4);
  b.value = random_mat(rng, 4, 2);
  auto report = grad_check({&a, &b}, [&](Graph<double>& g) {
    return sum(tanh_t(matmul(g.param(a), g.param(b))));
  });
  CHECK(report.max_rel_err() < 1e-4);
}

TEST_CASE("softmax basics") {
  Graph<double> g;
  Mat<double> x(1, 2);
  x << 0, 0;
  auto y = softmax_rows(g.constant(x));
  CHECK(y.value()(0, 0) == doctest::Approx(0.5));
  CHECK(y.value()(0, 1) == doctest::Approx(0.5));

  Mat<double> big(1, 3);
  big << 1000, 1000, 1000;
  auto yb = softmax_rows(g.constant(big));
  for (int c = 0; c < 3; ++c) {
    CHECK(std::isfinite(yb.value()(0, c)));
    CHECK(yb.value()(0, c) == doctest::Approx(1.0 / 3));
  }

  CHECK_THROWS_AS(softmax_rows(g.constant(Mat<double>(0, 0))), DimensionError);
}

TEST_CASE("softmax shift invariance is bitwise after max-subtraction") {
  Graph<double> g;
  Mat<double> x(1, 4);
  x << 0.3, -1.2, 2.5, 0.0;
  Mat<double> shifted = x.array() + 7.0;
  auto a = softmax_rows(g.constant(x));
  auto b = softmax_rows(g.constant(shifted));
  for (int c = 0; c < 4; ++c) CHECK(a.value()(0, c) == b.value()(0, c));
}

TEST_CASE("softmax gradient vs finite differences") {
  Param<double> p("p", 1, 3);
  p.value << 1, 2, 3;
  double err = fd_check(p, [&](Graph<double>& g) {
    Mat<double> w(3, 1);
    w << 0.2, -0.7, 1.1;
    return matmul(softmax_rows(g.param(p)), g.constant(w));
  });
  CHECK(err < 1e-4);
}

TEST_CASE("activations") {
  Graph<double> g;
  Mat<double> x(1, 3);
  x << -1, 0, 2;
  auto r = relu(g.constant(x));
  CHECK(r.value()(0, 0) == 0);
  CHECK(r.value()(0, 1) == 0);
  CHECK(r.value()(0, 2) == 2);

  Mat<double> z(1, 1);
  z << 0;
  CHECK(tanh_t(g.constant(z)).value()(0, 0) == 0);
}

TEST_CASE("relu gradient at zero is zero") {
  Param<double> p("p", 1, 1);
  p.value << 0.0;
  p.zero_grad();
  Graph<double> g;
  g.backward(sum(relu(g.param(p))));
  CHECK(p.grad(0, 0) == 0.0);
}

TEST_CASE("tanh gradient vs finite differences") {
  Param<double> p("p", 1, 2);
  p.value << 0.5, -0.3;
  double err = fd_check(p, [&](Graph<double>& g) { return sum(tanh_t(g.param(p))); });
  CHECK(err < 1e-4);
}

TEST_CASE("concat") {
  Graph<double> g;
  Mat<double> a(1, 2), b(1, 1);
  a << 1, 2;
  b << 3;
  auto r = concat(std::vector<Tensor<double>>{g.constant(a), g.constant(b)}, 1);
  CHECK(r.cols() == 3);
  CHECK(r.value()(0, 2) == 3);

  auto one = concat(std::vector<Tensor<double>>{g.constant(a)}, 0);
  CHECK(one.value() == a);

  auto c = g.constant(Mat<double>::Zero(2, 3));
  CHECK_THROWS_AS(concat(std::vector<Tensor<double>>{g.constant(a), c}, 0), DimensionError);
}

TEST_CASE("concat backward distributes ones") {
  Param<double> a("a", 1, 2), b("b", 1, 3);
  a.value << 1, 2;
  b.value << 3, 4, 5;
  a.zero_grad();
  b.zero_grad();
  Graph<double> g;
  auto cat = concat(std::vector<Tensor<double>>{g.param(a), g.param(b)}, 1);
  g.backward(sum(cat));
  CHECK(a.grad == Mat<double>::Ones(1, 2));
  CHECK(b.grad == Mat<double>::Ones(1, 3));
}

TEST_CASE("backward product rule and accumulation") {
  Param<double> x("x", 1, 1), y("y", 1, 1);
  x.value << 2;
  y.value << 3;
  x.zero_grad();
  y.zero_grad();
  {
    Graph<double> g;
    g.backward(cmul(g.param(x), g.param(y)));
    CHECK(x.grad(0, 0) == 3);
    CHECK(y.grad(0, 0) == 2);
  }
  x.zero_grad();
  {
    Graph<double> g;
    auto xt = g.param(x);
    g.backward(add(xt, xt));  // same node used twice
    CHECK(x.grad(0, 0) == 2);
  }
}

TEST_CASE("backward rejects non-scalar loss") {
  Graph<double> g;
  auto t = g.constant(Mat<double>::Zero(2, 2));
  CHECK_THROWS_AS(g.backward(t), ContractError);
}

TEST_CASE("grad_check exact for linear functions") {
  Param<double> p("p", 2, 2);
  p.value << 1, 2, 3, 4;
  auto report = grad_check({&p}, [&](Graph<double>& g) {
    Mat<double> w(2, 1);
    w << 0.5, -2.0;
    return sum(matmul(g.param(p), g.constant(w)));
  });
  CHECK(report.max_rel_err() < 1e-9);
}

TEST_CASE("grad_check on softmax cross-entropy toy") {
  Param<double> p("logits", 1, 4);
  p.value << 0.1, -0.4, 0.9, 0.2;
  auto report = grad_check({&p}, [&](Graph<double>& g) {
    auto logp = log_softmax_rows(g.param(p));
    auto picked = select_entries(logp, {{0, 2}});
    return scale(picked, -1.0);
  });
  CHECK(report.max_rel_err() < 1e-6);
}

TEST_CASE("grad_check flags a corrupted backward rule") {
  Param<double> p("p", 1, 3);
  p.value << 0.4, -0.2, 0.7;
  auto bad_square = [](Tensor<double> a) {
    Graph<double>* g = a.g;
    Tensor<double> out = g->constant(a.value().cwiseProduct(a.value()));
    int ai = a.id, oi = out.id;
    // Wrong rule: 3x instead of 2x.
    g->set_backprop(oi, [g, ai, oi]() {
      g->grad(ai) += 3.0 * g->grad(oi).cwiseProduct(g->value(ai));
    });
    return out;
  };
  auto report = grad_check({&p}, [&](Graph<double>& g) { return sum(bad_square(g.param(p))); });
  CHECK(report.max_rel_err() > 1e-2);
}

TEST_CASE("property: randomized op pipelines match finite differences") {
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed) + 100);
    Param<double> a("a", 3, 4), b("b", 4, 3), c("c", 1, 3);
    a.value = random_mat(rng, 3, 4);
    b.value = random_mat(rng, 4, 3);
    c.value = random_mat(rng, 1, 3);
    auto report = grad_check({&a, &b, &c}, [&](Graph<double>& g) {
      auto m = matmul(g.param(a), g.param(b));               // 3x3
      auto act = add_rowvec(tanh_t(m), g.param(c));          // 3x3
      auto sm = softmax_rows(act);
      auto gathered = row_gather(sm, {2, 0, 1, 0});          // duplicate use
      auto pooled = colwise_max(sigmoid(gathered));
      auto flat = flatten_rows(transpose(pooled));
      return sum(cmul(flat, flat));
    });
    CAPTURE(seed);
    CHECK(report.max_rel_err() < 1e-4);
  }
}

TEST_CASE("row ops backward") {
  Param<double> p("p", 3, 2);
  p.value << 1, 2, 3, 4, 5, 6;
  auto report = grad_check({&p}, [&](Graph<double>& g) {
    auto t = g.param(p);
    auto top = rows(t, 0, 2);
    auto left = cols(t, 0, 1);
    return add(sum(cmul(top, top)), sum(sigmoid(left)));
  });
  CHECK(report.max_rel_err() < 1e-6);
}

TEST_CASE("determinism: identical seeds give bit-identical results") {
  auto run = [](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Param<double> a("a", 4, 4);
    a.value = random_mat(rng, 4, 4);
    a.zero_grad();
    Graph<double> g;
    auto loss = sum(softmax_rows(matmul(g.param(a), g.param(a))));
    g.backward(loss);
    return std::make_pair(loss.value()(0, 0), a.grad);
  };
  auto [l1, g1] = run(99);
  auto [l2, g2] = run(99);
  CHECK(l1 == l2);
  CHECK(g1 == g2);
}
