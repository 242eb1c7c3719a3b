#pragma once

// Token encoder: word/POS/char-CNN input concatenation followed by a
// multi-layer BiLSTM. Builds autodiff graph nodes; pure given params.

#include "srl/model.hpp"
#include "srl/tensor.hpp"

#include <random>
#include <vector>

namespace srl {

// Per-word character CNN: for each kernel width, a 1-d convolution over char
// embeddings, relu, then max-pool over positions; outputs concatenated.
// Words shorter than a kernel width are PAD-padded to that width.
template <typename S>
Tensor<S> char_cnn(Graph<S>& g, ModelParams<S>& m, Tensor<S> char_emb_node,
                   const std::vector<int>& char_ids) {
  if (char_ids.empty()) throw ContractError("char_cnn: word has no characters");
  const int max_w = kKernelWidths.back();
  std::vector<Eigen::Index> ids(char_ids.begin(), char_ids.end());
  while (static_cast<int>(ids.size()) < max_w) ids.push_back(Vocabulary::kPad);
  const int len = static_cast<int>(ids.size());

  Tensor<S> emb = row_gather(char_emb_node, ids);  // len x d_ce

  std::vector<Tensor<S>> pooled;
  for (std::size_t k = 0; k < kKernelWidths.size(); ++k) {
    const int w = kKernelWidths[k];
    const int n_pos = len - w + 1;
    // Window matrix: row p is chars p..p+w-1 flattened, built column-group
    // per in-window offset.
    std::vector<Tensor<S>> parts;
    for (int off = 0; off < w; ++off) {
      std::vector<Eigen::Index> sel(static_cast<std::size_t>(n_pos));
      for (int p = 0; p < n_pos; ++p) sel[static_cast<std::size_t>(p)] = p + off;
      parts.push_back(row_gather(emb, std::move(sel)));
    }
    Tensor<S> windows = concat(parts, 1);  // n_pos x w*d_ce
    Tensor<S> conv = relu(add_rowvec(matmul(windows, transpose(g.param(m.conv_w[k]))),
                                     g.param(m.conv_b[k])));
    pooled.push_back(colwise_max(conv));  // 1 x f
  }
  return concat(pooled, 1);  // 1 x 3f
}

// Row t is [x_w ; x_pos ; x_c] for token t.
template <typename S>
Tensor<S> embed_tokens(Graph<S>& g, ModelParams<S>& m, const EncodedSentence& sent) {
  Tensor<S> word_node = g.param(m.word_emb);
  Tensor<S> pos_node = g.param(m.pos_emb);
  Tensor<S> char_node = g.param(m.char_emb);

  std::vector<Eigen::Index> wids(sent.word_ids.begin(), sent.word_ids.end());
  std::vector<Eigen::Index> pids(sent.pos_ids.begin(), sent.pos_ids.end());
  Tensor<S> words = row_gather(word_node, std::move(wids));
  Tensor<S> poss = row_gather(pos_node, std::move(pids));

  std::vector<Tensor<S>> char_rows;
  char_rows.reserve(sent.char_ids.size());
  for (const auto& cs : sent.char_ids) char_rows.push_back(char_cnn(g, m, char_node, cs));
  Tensor<S> chars = concat(char_rows, 0);  // n x d_c

  return concat(std::vector<Tensor<S>>{words, poss, chars}, 1);
}

namespace detail {

template <typename S>
struct LstmStep {
  Tensor<S> h, c;
};

template <typename S>
LstmStep<S> lstm_step(Graph<S>& g, Tensor<S> x, LstmStep<S> prev, Tensor<S> wxT, Tensor<S> whT,
                      Tensor<S> b, int h) {
  Tensor<S> gates = add(add(matmul(x, wxT), matmul(prev.h, whT)), b);
  Tensor<S> i = sigmoid(cols(gates, 0, h));
  Tensor<S> f = sigmoid(cols(gates, h, h));
  Tensor<S> cc = tanh_t(cols(gates, 2 * h, h));
  Tensor<S> o = sigmoid(cols(gates, 3 * h, h));
  Tensor<S> c = add(cmul(f, prev.c), cmul(i, cc));
  Tensor<S> hh = cmul(o, tanh_t(c));
  return {hh, c};
}

// One direction over the sequence; returns n x h in original token order.
template <typename S>
Tensor<S> lstm_dir(Graph<S>& g, ModelParams<S>& m, LstmDirParams<S>& d, Tensor<S> X, bool reverse) {
  const int n = static_cast<int>(X.rows());
  const int h = m.cfg.lstm_hidden;
  Tensor<S> wxT = transpose(g.param(d.wx));
  Tensor<S> whT = transpose(g.param(d.wh));
  Tensor<S> b = g.param(d.b);
  LstmStep<S> st{g.constant(Mat<S>::Zero(1, h)), g.constant(Mat<S>::Zero(1, h))};
  std::vector<Tensor<S>> outs(static_cast<std::size_t>(n));
  for (int step = 0; step < n; ++step) {
    int t = reverse ? n - 1 - step : step;
    st = lstm_step(g, rows(X, t, 1), st, wxT, whT, b, h);
    outs[static_cast<std::size_t>(t)] = st.h;
  }
  return concat(outs, 0);
}

}  // namespace detail

// Multi-layer BiLSTM; per layer the two directions are concatenated and fed
// to the next. Optional inverted dropout on layer inputs (training only).
template <typename S>
Tensor<S> bilstm_encode(Graph<S>& g, ModelParams<S>& m, Tensor<S> X,
                        std::mt19937_64* dropout_rng = nullptr) {
  if (X.rows() < 1) throw ContractError("bilstm_encode: empty sentence");
  Tensor<S> input = X;
  for (int layer = 0; layer < m.cfg.lstm_layers; ++layer) {
    if (m.cfg.dropout > 0.0 && dropout_rng != nullptr) {
      std::bernoulli_distribution keep(1.0 - m.cfg.dropout);
      Mat<S> mask(input.rows(), input.cols());
      const S inv = static_cast<S>(1.0 / (1.0 - m.cfg.dropout));
      for (Eigen::Index r = 0; r < mask.rows(); ++r)
        for (Eigen::Index c = 0; c < mask.cols(); ++c)
          mask(r, c) = keep(*dropout_rng) ? inv : S(0);
      input = cmul(input, g.constant(std::move(mask)));
    }
    Tensor<S> fwd = detail::lstm_dir(g, m, m.lstm[static_cast<std::size_t>(2 * layer)], input, false);
    Tensor<S> bwd = detail::lstm_dir(g, m, m.lstm[static_cast<std::size_t>(2 * layer + 1)], input, true);
    input = concat(std::vector<Tensor<S>>{fwd, bwd}, 1);
  }
  return input;  // n x 2h
}

template <typename S>
Tensor<S> encode_tokens(Graph<S>& g, ModelParams<S>& m, const EncodedSentence& sent,
                        std::mt19937_64* dropout_rng = nullptr) {
  return bilstm_encode(g, m, embed_tokens(g, m, sent), dropout_rng);
}

}  // namespace srl
