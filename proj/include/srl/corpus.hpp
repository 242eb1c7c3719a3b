#pragma once

// CoNLL-2009 and Universal Proposition Bank readers/writers, vocabulary
// construction, and pretrained embedding loading. Dependency-based SRL:
// arguments are single head tokens, triplets are (predicate, argument, role).

#include <Eigen/Core>

#include "srl/errors.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace srl {

struct Token {
  int index = 0;  // 1-based position
  std::string form;
  std::string pos;
  std::vector<std::uint32_t> chars;  // unicode scalar values of form
};

struct Triplet {
  int p = 0;  // predicate token index
  int a = 0;  // argument token index
  std::string role;

  friend bool operator==(const Triplet&, const Triplet&) = default;
  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<Triplet> gold;       // sorted by (p, a); no duplicate (p, a); never role ε
  std::vector<int> predicates;     // gold predicate token indices, ascending
  std::vector<std::string> senses; // parallel to predicates ("_" if none)

  int size() const { return static_cast<int>(tokens.size()); }
};

struct ParseResult {
  std::vector<Sentence> sentences;
  int dropped_annotations = 0;  // UPB range/empty-node rows carrying annotations
};

std::vector<Sentence> parse_conll09(const std::string& text);
std::vector<Sentence> parse_upb(const std::string& text);
ParseResult parse_conll09_ex(const std::string& text);
ParseResult parse_upb_ex(const std::string& text);

std::string serialize_conll09(const std::vector<Sentence>& sentences);
std::string serialize_upb(const std::vector<Sentence>& sentences);

enum class CorpusFormat { Conll09, Upb };
std::vector<Sentence> parse_corpus(const std::string& text, CorpusFormat fmt);
std::string serialize_corpus(const std::vector<Sentence>& sentences, CorpusFormat fmt);

std::vector<std::uint32_t> utf8_decode(const std::string& s);

struct Vocabulary {
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kEpsilonRole = 0;

  std::map<std::string, int> word;           // reserved: 0=PAD, 1=UNK
  std::map<std::string, int> pos;            // reserved: 0=PAD, 1=UNK
  std::map<std::uint32_t, int> chars;        // reserved: 0=PAD, 1=UNK
  std::map<std::string, int> role;           // reserved: 0=ε
  std::vector<std::string> role_names;       // id -> name; role_names[0] = "<eps>"

  int word_id(const std::string& w) const {
    auto it = word.find(w);
    return it == word.end() ? kUnk : it->second;
  }
  int pos_id(const std::string& p) const {
    auto it = pos.find(p);
    return it == pos.end() ? kUnk : it->second;
  }
  int char_id(std::uint32_t c) const {
    auto it = chars.find(c);
    return it == chars.end() ? kUnk : it->second;
  }
  std::optional<int> role_id(const std::string& r) const {
    auto it = role.find(r);
    if (it == role.end()) return std::nullopt;
    return it->second;
  }
  int n_words() const { return static_cast<int>(word.size()) + 2; }
  int n_pos() const { return static_cast<int>(pos.size()) + 2; }
  int n_chars() const { return static_cast<int>(chars.size()) + 2; }
  int n_roles() const { return static_cast<int>(role_names.size()); }
};

Vocabulary build_vocab(const std::vector<Sentence>& sentences, int min_freq = 2);

// Text .vec format: optional "count dim" header, then "word v1 ... v_dim".
// In-vocabulary rows are copied; missing words and UNK get seeded uniform
// ±0.05; PAD row is zeros.
Eigen::MatrixXf load_embeddings(const std::string& path, const Vocabulary& vocab, int dim,
                                std::uint64_t seed);
Eigen::MatrixXf random_embeddings(const Vocabulary& vocab, int dim, std::uint64_t seed);

}  // namespace srl
