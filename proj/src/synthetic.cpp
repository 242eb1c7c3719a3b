#include "srl/synthetic.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace srl {

namespace {

Token make_token(int index, std::string form, std::string pos) {
  Token t;
  t.index = index;
  t.form = std::move(form);
  t.pos = std::move(pos);
  t.chars = utf8_decode(t.form);
  return t;
}

}  // namespace

std::vector<Sentence> synthetic_overfit_corpus(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length(4, 8);
  std::uniform_int_distribution<int> filler(0, 4);
  std::uniform_int_distribution<int> role(0, 2);
  std::bernoulli_distribution arg_here(0.45);

  std::vector<Sentence> out;
  for (int s = 0; s < count; ++s) {
    int n = length(rng);
    std::uniform_int_distribution<int> pred_pos(1, n);
    int p = pred_pos(rng);

    Sentence sent;
    for (int i = 1; i <= n; ++i) {
      if (i == p) {
        sent.tokens.push_back(make_token(i, "pred", "VV"));
      } else if (arg_here(rng)) {
        int r = role(rng);
        sent.tokens.push_back(make_token(i, "x" + std::to_string(r), "NN"));
        sent.gold.push_back(Triplet{p, i, "A" + std::to_string(r)});
      } else {
        sent.tokens.push_back(make_token(i, "w" + std::to_string(filler(rng)), "NN"));
      }
    }
    sent.predicates.push_back(p);
    sent.senses.push_back("pred.01");
    std::sort(sent.gold.begin(), sent.gold.end());
    out.push_back(std::move(sent));
  }
  return out;
}

std::vector<Sentence> synthetic_longrange_corpus(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  const int n = 16;
  std::uniform_int_distribution<int> selector(0, 2);
  std::uniform_int_distribution<int> filler(0, 9);
  std::uniform_int_distribution<int> far_pos(13, n);  // distance from 1 is >= 12

  std::vector<Sentence> out;
  for (int s = 0; s < count; ++s) {
    int sel = selector(rng);
    int far = far_pos(rng);

    Sentence sent;
    sent.tokens.push_back(make_token(1, "pred", "VV"));
    sent.tokens.push_back(make_token(2, "s" + std::to_string(sel), "SS"));
    for (int i = 3; i <= n; ++i) {
      if (i == far) {
        sent.tokens.push_back(make_token(i, "arg", "AA"));
      } else {
        sent.tokens.push_back(make_token(i, "w" + std::to_string(filler(rng)), "NN"));
      }
    }
    sent.predicates.push_back(1);
    sent.senses.push_back("pred.01");
    // The adjacent pair carries a constant role (learnable from the argument
    // token alone); only the distant pair's role depends on the selector.
    sent.gold.push_back(Triplet{1, 2, "AM"});
    sent.gold.push_back(Triplet{1, far, "A" + std::to_string(sel)});
    out.push_back(std::move(sent));
  }
  return out;
}

}  // namespace srl
