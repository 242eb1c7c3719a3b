#pragma once

// Line-oriented "key = value" configuration with typed validation.

#include "srl/errors.hpp"

#include <cstdint>
#include <string>

namespace srl {

enum class PairPolicy { OrderedAll, OrderedNoSelf, Unordered };

std::string to_string(PairPolicy p);
PairPolicy pair_policy_from_string(const std::string& s);

struct ModelConfig {
  // encoder
  int word_dim = 300;
  int pos_dim = 50;
  int char_dim = 30;
  int char_filters = 32;      // per kernel width; widths are fixed {3,4,5}
  int lstm_hidden = 350;      // per direction
  int lstm_layers = 3;
  double dropout = 0.0;       // on BiLSTM inputs; off by default
  bool freeze_embeddings = false;

  // scorer
  int rep_dim = 300;          // d_r
  int score_dim = 150;        // d_s
  int ffn_hidden = 300;
  PairPolicy pair_policy = PairPolicy::OrderedAll;

  // refiner
  int attn_dim = 150;         // d_u
  int refine_hidden = 300;
  int iterations = 2;         // N
  bool attend_own_pairs_only = false;
  bool aux_loss = false;      // per-iteration auxiliary loss

  // training
  double learning_rate = 1e-5;
  int batch_size = 32;
  int max_epochs = 1000;
  int patience = 10;
  double clip_norm = 5.0;
  double epsilon_weight = 1.0;  // optional downweighting of the null role
  int min_freq = 2;
  std::uint64_t seed = 42;

  int char_encoding_dim() const { return 3 * char_filters; }       // d_c
  int input_dim() const { return word_dim + pos_dim + char_encoding_dim(); }
  int token_dim() const { return 2 * lstm_hidden; }                // 2h

  void validate() const;
};

ModelConfig parse_config(const std::string& text);
ModelConfig load_config_file(const std::string& path);
std::string serialize_config(const ModelConfig& cfg);

}  // namespace srl
