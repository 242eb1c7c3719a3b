#pragma once

// Single-file model container: text header (version, config, vocabulary,
// training metadata, array manifest) followed by raw little-endian fp32
// arrays. Round trips are bit-exact; version mismatches are rejected.

#include "srl/config.hpp"
#include "srl/corpus.hpp"
#include "srl/model.hpp"

#include <string>

namespace srl {

inline constexpr int kArchiveVersion = 1;

struct TrainMeta {
  int best_epoch = 0;
  double dev_f1 = 0.0;
};

struct ModelArchive {
  Vocabulary vocab;
  TrainMeta meta;
  ModelParams<float> params;  // cfg and sizes live inside
};

void save_model(const std::string& path, ModelParams<float>& params, const Vocabulary& vocab,
                const TrainMeta& meta);
ModelArchive load_model(const std::string& path);

}  // namespace srl
