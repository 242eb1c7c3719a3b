#include "srl/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace srl {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) {
    if (cur.back() == '\r') cur.pop_back();
    lines.push_back(std::move(cur));
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == '\t' || ch == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

int parse_int(const std::string& s, int line_no, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": non-integer " + what + " '" + s + "'");
  }
  return v;
}

void add_triplet(Sentence& sent, Triplet t) {
  sent.gold.push_back(std::move(t));
}

void finish_sentence(Sentence& sent) {
  std::sort(sent.gold.begin(), sent.gold.end());
  sent.gold.erase(std::unique(sent.gold.begin(), sent.gold.end(),
                              [](const Triplet& x, const Triplet& y) {
                                return x.p == y.p && x.a == y.a;
                              }),
                  sent.gold.end());
}

}  // namespace

std::vector<std::uint32_t> utf8_decode(const std::string& s) {
  std::vector<std::uint32_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::uint32_t cp = 0;
    int extra = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c >> 4) == 0xE) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c >> 3) == 0x1E) {
      cp = c & 0x07;
      extra = 3;
    } else {
      cp = 0xFFFD;  // invalid lead byte
    }
    ++i;
    for (int k = 0; k < extra && i < s.size(); ++k, ++i) {
      unsigned char cc = static_cast<unsigned char>(s[i]);
      if ((cc >> 6) != 0x2) {
        cp = 0xFFFD;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    out.push_back(cp);
  }
  return out;
}

// ----- CoNLL-2009 -----
// Columns: ID FORM LEMMA PLEMMA POS PPOS FEAT PFEAT HEAD PHEAD DEPREL PDEPREL
//          FILLPRED PRED APRED1..APREDk

ParseResult parse_conll09_ex(const std::string& text) {
  ParseResult result;
  std::vector<std::string> lines = split_lines(text);

  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;

  auto flush = [&]() {
    if (rows.empty()) return;
    Sentence sent;
    int n_pred = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& f = rows[i];
      Token tok;
      tok.index = parse_int(f[0], row_lines[i], "ID");
      if (tok.index != static_cast<int>(i) + 1) {
        throw ParseError("line " + std::to_string(row_lines[i]) + ": ID " + f[0] +
                         " does not match position " + std::to_string(i + 1));
      }
      tok.form = f[1];
      tok.pos = f[4];
      tok.chars = utf8_decode(tok.form);
      sent.tokens.push_back(std::move(tok));
      if (f[12] == "Y") {
        sent.predicates.push_back(static_cast<int>(i) + 1);
        sent.senses.push_back(f.size() > 13 ? f[13] : "_");
        ++n_pred;
      }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& f = rows[i];
      int n_apred = static_cast<int>(f.size()) - 14;
      if (n_apred < n_pred) {
        throw ParseError("line " + std::to_string(row_lines[i]) + ": row has " +
                         std::to_string(std::max(n_apred, 0)) + " APRED columns but sentence has " +
                         std::to_string(n_pred) + " predicates");
      }
      for (int j = 0; j < n_pred; ++j) {
        const std::string& cell = f[14 + j];
        if (cell != "_") {
          add_triplet(sent, Triplet{sent.predicates[j], static_cast<int>(i) + 1, cell});
        }
      }
    }
    finish_sentence(sent);
    result.sentences.push_back(std::move(sent));
    rows.clear();
    row_lines.clear();
  };

  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (blank(lines[li])) {
      flush();
      continue;
    }
    auto f = split_fields(lines[li]);
    if (f.size() < 14) {
      throw ParseError("line " + std::to_string(li + 1) + ": expected >= 14 columns, got " +
                       std::to_string(f.size()));
    }
    rows.push_back(std::move(f));
    row_lines.push_back(static_cast<int>(li) + 1);
  }
  flush();
  return result;
}

std::vector<Sentence> parse_conll09(const std::string& text) {
  return parse_conll09_ex(text).sentences;
}

std::string serialize_conll09(const std::vector<Sentence>& sentences) {
  std::ostringstream os;
  for (const auto& sent : sentences) {
    int n_pred = static_cast<int>(sent.predicates.size());
    for (int i = 1; i <= sent.size(); ++i) {
      const Token& tok = sent.tokens[static_cast<std::size_t>(i - 1)];
      bool is_pred = std::binary_search(sent.predicates.begin(), sent.predicates.end(), i);
      std::string sense = "_";
      if (is_pred) {
        auto it = std::lower_bound(sent.predicates.begin(), sent.predicates.end(), i);
        sense = sent.senses[static_cast<std::size_t>(it - sent.predicates.begin())];
        if (sense == "_") sense = tok.form + ".01";
      }
      os << i << '\t' << tok.form << "\t_\t_\t" << tok.pos << '\t' << tok.pos
         << "\t_\t_\t0\t0\t_\t_\t" << (is_pred ? "Y" : "_") << '\t' << (is_pred ? sense : "_");
      for (int j = 0; j < n_pred; ++j) {
        std::string cell = "_";
        for (const auto& t : sent.gold) {
          if (t.p == sent.predicates[static_cast<std::size_t>(j)] && t.a == i) cell = t.role;
        }
        os << '\t' << cell;
      }
      os << '\n';
    }
    os << '\n';
  }
  return os.str();
}

// ----- UPB (CoNLL-U plus) -----
// 10 CoNLL-U columns, then predicate sense, then one argument column per
// predicate. Range ids ("3-4") and empty nodes ("5.1") are excluded from
// token indexing.

namespace {

enum class UIdKind { Plain, Range, Empty };

UIdKind classify_id(const std::string& id, int line_no) {
  bool digit_only = !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isdigit(c);
  });
  if (digit_only) return UIdKind::Plain;
  auto dash = id.find('-');
  auto dot = id.find('.');
  auto ok_num = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  if (dash != std::string::npos && ok_num(id.substr(0, dash)) && ok_num(id.substr(dash + 1))) {
    return UIdKind::Range;
  }
  if (dot != std::string::npos && ok_num(id.substr(0, dot)) && ok_num(id.substr(dot + 1))) {
    return UIdKind::Empty;
  }
  throw ParseError("line " + std::to_string(line_no) + ": malformed id '" + id + "'");
}

}  // namespace

ParseResult parse_upb_ex(const std::string& text) {
  ParseResult result;
  std::vector<std::string> lines = split_lines(text);

  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;

  auto flush = [&]() {
    if (rows.empty()) return;
    Sentence sent;
    int n_pred = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& f = rows[i];
      Token tok;
      tok.index = static_cast<int>(i) + 1;
      tok.form = f[1];
      tok.pos = f[3];
      tok.chars = utf8_decode(tok.form);
      sent.tokens.push_back(std::move(tok));
      if (f.size() > 10 && f[10] != "_") {
        sent.predicates.push_back(static_cast<int>(i) + 1);
        sent.senses.push_back(f[10]);
        ++n_pred;
      }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& f = rows[i];
      int n_apred = static_cast<int>(f.size()) - 11;
      if (n_apred < n_pred) {
        throw ParseError("line " + std::to_string(row_lines[i]) + ": row has " +
                         std::to_string(std::max(n_apred, 0)) +
                         " argument columns but sentence has " + std::to_string(n_pred) +
                         " predicates");
      }
      for (int j = 0; j < n_pred; ++j) {
        const std::string& cell = f[11 + j];
        if (cell != "_") {
          add_triplet(sent, Triplet{sent.predicates[j], static_cast<int>(i) + 1, cell});
        }
      }
    }
    finish_sentence(sent);
    result.sentences.push_back(std::move(sent));
    rows.clear();
    row_lines.clear();
  };

  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    if (blank(line)) {
      flush();
      continue;
    }
    if (line[0] == '#') continue;
    auto f = split_fields(line);
    if (f.size() < 10) {
      throw ParseError("line " + std::to_string(li + 1) + ": expected >= 10 columns, got " +
                       std::to_string(f.size()));
    }
    UIdKind kind = classify_id(f[0], static_cast<int>(li) + 1);
    if (kind != UIdKind::Plain) {
      for (std::size_t c = 10; c < f.size(); ++c) {
        if (f[c] != "_") {
          ++result.dropped_annotations;
          break;
        }
      }
      continue;
    }
    rows.push_back(std::move(f));
    row_lines.push_back(static_cast<int>(li) + 1);
  }
  flush();
  return result;
}

std::vector<Sentence> parse_upb(const std::string& text) {
  return parse_upb_ex(text).sentences;
}

std::string serialize_upb(const std::vector<Sentence>& sentences) {
  std::ostringstream os;
  for (const auto& sent : sentences) {
    int n_pred = static_cast<int>(sent.predicates.size());
    for (int i = 1; i <= sent.size(); ++i) {
      const Token& tok = sent.tokens[static_cast<std::size_t>(i - 1)];
      bool is_pred = std::binary_search(sent.predicates.begin(), sent.predicates.end(), i);
      std::string sense = "_";
      if (is_pred) {
        auto it = std::lower_bound(sent.predicates.begin(), sent.predicates.end(), i);
        sense = sent.senses[static_cast<std::size_t>(it - sent.predicates.begin())];
        if (sense == "_") sense = tok.form + ".01";
      }
      os << i << '\t' << tok.form << "\t_\t" << tok.pos << "\t_\t_\t0\t_\t_\t_\t" << sense;
      for (int j = 0; j < n_pred; ++j) {
        std::string cell = "_";
        for (const auto& t : sent.gold) {
          if (t.p == sent.predicates[static_cast<std::size_t>(j)] && t.a == i) cell = t.role;
        }
        os << '\t' << cell;
      }
      os << '\n';
    }
    os << '\n';
  }
  return os.str();
}

std::vector<Sentence> parse_corpus(const std::string& text, CorpusFormat fmt) {
  return fmt == CorpusFormat::Conll09 ? parse_conll09(text) : parse_upb(text);
}

std::string serialize_corpus(const std::vector<Sentence>& sentences, CorpusFormat fmt) {
  return fmt == CorpusFormat::Conll09 ? serialize_conll09(sentences) : serialize_upb(sentences);
}

// ----- vocabulary -----

Vocabulary build_vocab(const std::vector<Sentence>& sentences, int min_freq) {
  if (sentences.empty()) throw ContractError("build_vocab: empty corpus");
  if (min_freq < 1) throw ContractError("build_vocab: min_freq must be >= 1");

  std::map<std::string, long> wf, pf, rf;
  std::map<std::uint32_t, long> cf;
  for (const auto& sent : sentences) {
    for (const auto& tok : sent.tokens) {
      ++wf[tok.form];
      ++pf[tok.pos];
      for (std::uint32_t c : tok.chars) ++cf[c];
    }
    for (const auto& t : sent.gold) ++rf[t.role];
  }

  // Ids by frequency desc, then key ascending; reserved ids come first.
  auto assign = [](auto& freqs, auto& out, int first_id, long min) {
    std::vector<std::pair<long, typename std::decay_t<decltype(freqs)>::key_type>> order;
    for (const auto& [k, f] : freqs) {
      if (f >= min) order.emplace_back(-f, k);
    }
    std::sort(order.begin(), order.end());
    int id = first_id;
    for (const auto& [nf, k] : order) out[k] = id++;
  };

  Vocabulary v;
  assign(wf, v.word, 2, min_freq);
  assign(pf, v.pos, 2, 1);
  assign(cf, v.chars, 2, 1);
  assign(rf, v.role, 1, 1);
  v.role_names.resize(v.role.size() + 1);
  v.role_names[0] = "<eps>";
  for (const auto& [name, id] : v.role) v.role_names[static_cast<std::size_t>(id)] = name;
  return v;
}

// ----- embeddings -----

Eigen::MatrixXf random_embeddings(const Vocabulary& vocab, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-0.05f, 0.05f);
  Eigen::MatrixXf m(vocab.n_words(), dim);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
  m.row(Vocabulary::kPad).setZero();
  return m;
}

Eigen::MatrixXf load_embeddings(const std::string& path, const Vocabulary& vocab, int dim,
                                std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open embeddings file: " + path);

  Eigen::MatrixXf m = random_embeddings(vocab, dim, seed);

  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    auto f = split_fields(line);
    if (first) {
      first = false;
      // Optional "count dim" header.
      if (f.size() == 2) {
        int d = 0;
        auto [p, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), d);
        if (ec == std::errc() && p == f[1].data() + f[1].size()) {
          if (d != dim) {
            throw FormatError("line 1: embedding dim " + std::to_string(d) +
                              " does not match requested " + std::to_string(dim));
          }
          continue;
        }
      }
    }
    if (static_cast<int>(f.size()) != dim + 1) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(dim + 1) + " fields, got " + std::to_string(f.size()));
    }
    auto it = vocab.word.find(f[0]);
    if (it == vocab.word.end()) continue;
    for (int c = 0; c < dim; ++c) {
      m(it->second, c) = std::stof(f[static_cast<std::size_t>(c) + 1]);
    }
  }
  m.row(Vocabulary::kPad).setZero();
  return m;
}

}  // namespace srl
