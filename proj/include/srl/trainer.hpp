#pragma once

// Mini-batch Adam training with seeded shuffling, dev-F1 early stopping and
// best-epoch parameter selection.

#include "srl/adam.hpp"
#include "srl/eval.hpp"
#include "srl/pipeline.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

namespace srl {

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;  // mean per-sentence loss over the epoch
  double dev_p = 0.0, dev_r = 0.0, dev_f1 = 0.0;

  std::string line() const {
    std::ostringstream os;
    os << "epoch=" << epoch << std::fixed << std::setprecision(6) << " loss=" << loss
       << " dev_p=" << dev_p << " dev_r=" << dev_r << " dev_f1=" << dev_f1;
    return os.str();
  }
};

template <typename S>
struct TrainResult {
  ModelParams<S> model;  // parameters from the best dev epoch
  int best_epoch = 0;
  double best_f1 = 0.0;
  std::vector<EpochLog> log;
};

template <typename S>
double dev_f1(ModelParams<S>& m, const std::vector<Sentence>& dev, const Vocabulary& vocab,
              EpochLog* into = nullptr) {
  std::vector<std::vector<Triplet>> preds;
  for (const auto& sent : dev) {
    preds.push_back(decode(m, encode_sentence(sent, vocab), m.cfg.iterations, vocab.role_names));
  }
  EvalReport rep = evaluate(preds, dev);
  if (into) {
    into->dev_p = rep.arguments.precision();
    into->dev_r = rep.arguments.recall();
    into->dev_f1 = rep.arguments.f1();
  }
  return rep.arguments.f1();
}

template <typename S>
TrainResult<S> train(const std::vector<Sentence>& train_corpus,
                     const std::vector<Sentence>& dev_corpus, const Vocabulary& vocab,
                     const ModelConfig& cfg, const Eigen::MatrixXf* word_embeddings = nullptr,
                     std::ostream* log_stream = nullptr) {
  if (train_corpus.empty() || dev_corpus.empty()) {
    throw ContractError("train: empty train or dev corpus");
  }
  cfg.validate();

  ModelParams<S> model = make_model_params<S>(cfg, ModelSizes::from_vocab(vocab), cfg.seed);
  if (word_embeddings) {
    if (word_embeddings->rows() != model.word_emb.value.rows() ||
        word_embeddings->cols() != model.word_emb.value.cols()) {
      throw ContractError("train: embedding matrix shape does not match vocabulary/config");
    }
    model.word_emb.value = word_embeddings->template cast<S>();
  }

  std::vector<EncodedSentence> encoded;
  encoded.reserve(train_corpus.size());
  for (const auto& s : train_corpus) encoded.push_back(encode_sentence(s, vocab));

  auto params = model.trainable();
  AdamState<S> adam;
  adam.init(params);

  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
  std::mt19937_64 dropout_rng(cfg.seed ^ 0x2545F4914F6CDD1Dull);
  std::mt19937_64* drop = cfg.dropout > 0.0 ? &dropout_rng : nullptr;

  TrainResult<S> result;
  result.best_f1 = -1.0;
  int since_improvement = 0;

  std::vector<std::size_t> order(encoded.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      model.zero_grads();
      for (std::size_t i = start; i < end; ++i) {
        Graph<S> g;
        Tensor<S> loss = sentence_loss(g, model, encoded[order[i]], drop);
        loss_sum += static_cast<double>(loss.value()(0, 0));
        g.backward(loss);
      }
      const S inv_batch = static_cast<S>(1.0 / static_cast<double>(end - start));
      for (auto* p : params) p->grad *= inv_batch;
      clip_global_norm(params, cfg.clip_norm);
      adam_step(params, adam, cfg.learning_rate);
    }

    EpochLog log;
    log.epoch = epoch;
    log.loss = loss_sum / static_cast<double>(encoded.size());
    double f1 = dev_f1(model, dev_corpus, vocab, &log);
    result.log.push_back(log);
    if (log_stream) *log_stream << log.line() << "\n";

    if (f1 > result.best_f1) {
      result.best_f1 = f1;
      result.best_epoch = epoch;
      result.model = model;
      since_improvement = 0;
    } else {
      ++since_improvement;
      if (since_improvement >= cfg.patience) break;
    }
  }
  if (result.best_epoch == 0) {
    result.model = model;  // degenerate: no epoch ran
  }
  return result;
}

}  // namespace srl
