#pragma once

// All learned arrays of the labeler, with shapes derived from the config and
// vocabulary sizes. Scalar-templated so the same model runs in fp32 for
// training and fp64 for gradient checking.

#include "srl/config.hpp"
#include "srl/corpus.hpp"
#include "srl/tensor.hpp"

#include <array>
#include <random>
#include <string>
#include <vector>

namespace srl {

inline constexpr std::array<int, 3> kKernelWidths = {3, 4, 5};

struct ModelSizes {
  int n_words = 0;
  int n_pos = 0;
  int n_chars = 0;
  int n_roles = 0;  // includes ε

  static ModelSizes from_vocab(const Vocabulary& v) {
    return ModelSizes{v.n_words(), v.n_pos(), v.n_chars(), v.n_roles()};
  }
};

template <typename S>
struct LstmDirParams {
  Param<S> wx;  // [4h x d_in]
  Param<S> wh;  // [4h x h]
  Param<S> b;   // [1 x 4h], gate order i,f,g,o; forget block init 1
};

template <typename S>
struct FfnParams {
  Param<S> w1, b1, w2, b2;
};

template <typename S>
struct ModelParams;

template <typename S>
ModelParams<S> make_model_params(const ModelConfig& cfg, const ModelSizes& sizes,
                                 std::uint64_t seed);

template <typename S>
struct ModelParams {
  ModelConfig cfg;
  ModelSizes sizes;

  Param<S> word_emb;  // [n_words x d_w]
  Param<S> pos_emb;   // [n_pos x d_pos]
  Param<S> char_emb;  // [n_chars x d_ce]

  std::array<Param<S>, 3> conv_w;  // [f x width*d_ce]
  std::array<Param<S>, 3> conv_b;  // [1 x f]

  std::vector<LstmDirParams<S>> lstm;  // layer-major: l0.fwd, l0.bwd, l1.fwd, ...

  FfnParams<S> ffn_p;  // 2h -> ffn_hidden -> d_r
  FfnParams<S> ffn_a;

  Param<S> w1;      // bilinear [d_r x d_s*d_r]; channel c is cols [c*d_r, (c+1)*d_r)
  Param<S> w2;      // [d_s x 2d_r]
  Param<S> b;       // [1 x d_s]
  Param<S> w_role_p, w_role_a;  // [|R| x d_r]
  Param<S> w_role_s;            // [|R| x d_s]

  Param<S> w3;   // [d_u x 2h]
  Param<S> w4;   // [d_u x d_s]
  Param<S> w_u;  // [d_u x 1] scalarizes the tanh attention feature
  FfnParams<S> ffn_refine;  // (d_s + 2h) -> refine_hidden -> 2h

  std::vector<Param<S>*> all() {
    std::vector<Param<S>*> ps = {&word_emb, &pos_emb, &char_emb};
    for (auto& p : conv_w) ps.push_back(&p);
    for (auto& p : conv_b) ps.push_back(&p);
    for (auto& d : lstm) {
      ps.push_back(&d.wx);
      ps.push_back(&d.wh);
      ps.push_back(&d.b);
    }
    for (FfnParams<S>* f : {&ffn_p, &ffn_a, &ffn_refine}) {
      ps.push_back(&f->w1);
      ps.push_back(&f->b1);
      ps.push_back(&f->w2);
      ps.push_back(&f->b2);
    }
    ps.push_back(&w1);
    ps.push_back(&w2);
    ps.push_back(&b);
    ps.push_back(&w_role_p);
    ps.push_back(&w_role_a);
    ps.push_back(&w_role_s);
    ps.push_back(&w3);
    ps.push_back(&w4);
    ps.push_back(&w_u);
    return ps;
  }

  std::vector<Param<S>*> trainable() {
    auto ps = all();
    if (cfg.freeze_embeddings) {
      std::erase(ps, &word_emb);
    }
    return ps;
  }

  void zero_grads() {
    for (auto* p : all()) p->zero_grad();
  }

  template <typename T>
  ModelParams<T> cast() const {
    ModelParams<T> out = make_model_params<T>(cfg, sizes, /*seed=*/0);
    auto src = const_cast<ModelParams*>(this)->all();
    auto dst = out.all();
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i]->value = src[i]->value.template cast<T>();
      dst[i]->grad = Mat<T>::Zero(dst[i]->value.rows(), dst[i]->value.cols());
    }
    return out;
  }
};

// Xavier-uniform for weight matrices, ±0.05 for embeddings, zero biases,
// LSTM forget-gate bias 1.0. Shapes only when seed use is skipped (seed
// still consumed deterministically per parameter creation order).
template <typename S>
ModelParams<S> make_model_params(const ModelConfig& cfg, const ModelSizes& sizes,
                                 std::uint64_t seed) {
  cfg.validate();
  if (sizes.n_words < 2 || sizes.n_pos < 2 || sizes.n_chars < 2 || sizes.n_roles < 1) {
    throw ContractError("make_model_params: vocabulary sizes too small");
  }
  ModelParams<S> m;
  m.cfg = cfg;
  m.sizes = sizes;
  std::mt19937_64 rng(seed);

  auto fill_uniform = [&rng](Param<S>& p, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index r = 0; r < p.value.rows(); ++r)
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) p.value(r, c) = static_cast<S>(dist(rng));
  };
  auto embedding = [&](Param<S>& p, std::string name, int rows, int cols) {
    p = Param<S>(std::move(name), rows, cols);
    fill_uniform(p, 0.05);
    p.value.row(Vocabulary::kPad).setZero();
  };
  auto weight = [&](Param<S>& p, std::string name, int rows, int cols) {
    p = Param<S>(std::move(name), rows, cols);
    fill_uniform(p, std::sqrt(6.0 / (rows + cols)));
  };
  auto bias = [&](Param<S>& p, std::string name, int cols) { p = Param<S>(std::move(name), 1, cols); };

  const int h = cfg.lstm_hidden;
  const int two_h = cfg.token_dim();
  const int d_r = cfg.rep_dim;
  const int d_s = cfg.score_dim;

  embedding(m.word_emb, "emb.word", sizes.n_words, cfg.word_dim);
  embedding(m.pos_emb, "emb.pos", sizes.n_pos, cfg.pos_dim);
  embedding(m.char_emb, "emb.char", sizes.n_chars, cfg.char_dim);

  for (std::size_t k = 0; k < kKernelWidths.size(); ++k) {
    int w = kKernelWidths[k];
    weight(m.conv_w[k], "cnn.w" + std::to_string(w), cfg.char_filters, w * cfg.char_dim);
    bias(m.conv_b[k], "cnn.b" + std::to_string(w), cfg.char_filters);
  }

  for (int layer = 0; layer < cfg.lstm_layers; ++layer) {
    int d_in = layer == 0 ? cfg.input_dim() : two_h;
    for (const char* dir : {"fwd", "bwd"}) {
      LstmDirParams<S> d;
      std::string base = "lstm.l" + std::to_string(layer) + "." + dir;
      weight(d.wx, base + ".wx", 4 * h, d_in);
      weight(d.wh, base + ".wh", 4 * h, h);
      bias(d.b, base + ".b", 4 * h);
      d.b.value.middleCols(h, h).setConstant(S(1));  // forget gate
      m.lstm.push_back(std::move(d));
    }
  }

  auto ffn = [&](FfnParams<S>& f, const std::string& base, int in, int hidden, int out) {
    weight(f.w1, base + ".w1", hidden, in);
    bias(f.b1, base + ".b1", hidden);
    weight(f.w2, base + ".w2", out, hidden);
    bias(f.b2, base + ".b2", out);
  };
  ffn(m.ffn_p, "ffn_p", two_h, cfg.ffn_hidden, d_r);
  ffn(m.ffn_a, "ffn_a", two_h, cfg.ffn_hidden, d_r);

  weight(m.w1, "biaffine.w1", d_r, d_s * d_r);
  weight(m.w2, "biaffine.w2", d_s, 2 * d_r);
  bias(m.b, "biaffine.b", d_s);
  weight(m.w_role_p, "role.wp", sizes.n_roles, d_r);
  weight(m.w_role_a, "role.wa", sizes.n_roles, d_r);
  weight(m.w_role_s, "role.ws", sizes.n_roles, d_s);

  weight(m.w3, "refine.w3", cfg.attn_dim, two_h);
  weight(m.w4, "refine.w4", cfg.attn_dim, d_s);
  weight(m.w_u, "refine.wu", cfg.attn_dim, 1);
  ffn(m.ffn_refine, "refine.ffn", d_s + two_h, cfg.refine_hidden, two_h);

  return m;
}

// Token-level id view of a sentence under a vocabulary.
struct EncodedSentence {
  std::vector<int> word_ids;
  std::vector<int> pos_ids;
  std::vector<std::vector<int>> char_ids;  // per token, >= 1 entry each
  std::vector<Triplet> gold;
  std::vector<int> gold_role_ids;  // parallel to gold; -1 when unseen in vocab
  std::vector<int> gold_predicates;
  int n = 0;
};

inline EncodedSentence encode_sentence(const Sentence& sent, const Vocabulary& vocab) {
  EncodedSentence e;
  e.n = sent.size();
  for (const auto& tok : sent.tokens) {
    e.word_ids.push_back(vocab.word_id(tok.form));
    e.pos_ids.push_back(vocab.pos_id(tok.pos));
    std::vector<int> cs;
    for (std::uint32_t c : tok.chars) cs.push_back(vocab.char_id(c));
    if (cs.empty()) cs.push_back(Vocabulary::kUnk);
    e.char_ids.push_back(std::move(cs));
  }
  e.gold = sent.gold;
  for (const auto& t : sent.gold) {
    auto id = vocab.role_id(t.role);
    e.gold_role_ids.push_back(id ? *id : -1);
  }
  e.gold_predicates = sent.predicates;
  return e;
}

}  // namespace srl
