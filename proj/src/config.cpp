#include "srl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace srl {

std::string to_string(PairPolicy p) {
  switch (p) {
    case PairPolicy::OrderedAll: return "ordered-all";
    case PairPolicy::OrderedNoSelf: return "ordered-no-self";
    case PairPolicy::Unordered: return "unordered";
  }
  return "ordered-all";
}

PairPolicy pair_policy_from_string(const std::string& s) {
  if (s == "ordered-all") return PairPolicy::OrderedAll;
  if (s == "ordered-no-self") return PairPolicy::OrderedNoSelf;
  if (s == "unordered") return PairPolicy::Unordered;
  throw FormatError("unknown pair policy '" + s +
                    "' (expected ordered-all, ordered-no-self, unordered)");
}

void ModelConfig::validate() const {
  std::vector<std::string> bad;
  auto require = [&](bool ok, const char* key) {
    if (!ok) bad.push_back(key);
  };
  require(word_dim > 0, "word_dim");
  require(pos_dim > 0, "pos_dim");
  require(char_dim > 0, "char_dim");
  require(char_filters > 0, "char_filters");
  require(lstm_hidden > 0, "lstm_hidden");
  require(lstm_layers > 0, "lstm_layers");
  require(dropout >= 0.0 && dropout < 1.0, "dropout");
  require(rep_dim > 0, "rep_dim");
  require(score_dim > 0, "score_dim");
  require(ffn_hidden > 0, "ffn_hidden");
  require(attn_dim > 0, "attn_dim");
  require(refine_hidden > 0, "refine_hidden");
  require(iterations >= 0, "iterations");
  require(learning_rate > 0.0, "learning_rate");
  require(batch_size >= 1, "batch_size");
  require(max_epochs >= 1, "max_epochs");
  require(patience >= 1, "patience");
  require(clip_norm > 0.0, "clip_norm");
  require(epsilon_weight > 0.0, "epsilon_weight");
  require(min_freq >= 1, "min_freq");
  if (!bad.empty()) {
    std::string msg = "invalid config values for keys:";
    for (const auto& k : bad) msg += " " + k;
    throw FormatError(msg);
  }
}

namespace {

struct Field {
  std::function<void(ModelConfig&, const std::string&)> set;
  std::function<std::string(const ModelConfig&)> get;
};

template <typename T>
T parse_num(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  T out;
  is >> out;
  if (is.fail() || !is.eof()) throw FormatError("config key '" + key + "': bad value '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw FormatError("config key '" + key + "': bad boolean '" + v + "'");
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> f = [] {
    std::map<std::string, Field> m;
    auto num = [&m](const std::string& key, auto member) {
      m[key] = Field{
          [key, member](ModelConfig& c, const std::string& v) {
            c.*member = parse_num<std::decay_t<decltype(std::declval<ModelConfig>().*member)>>(key, v);
          },
          [member](const ModelConfig& c) {
            std::ostringstream os;
            os << c.*member;
            return os.str();
          }};
    };
    auto boolean = [&m](const std::string& key, auto member) {
      m[key] = Field{
          [key, member](ModelConfig& c, const std::string& v) { c.*member = parse_bool(key, v); },
          [member](const ModelConfig& c) { return c.*member ? std::string("true") : std::string("false"); }};
    };
    num("word_dim", &ModelConfig::word_dim);
    num("pos_dim", &ModelConfig::pos_dim);
    num("char_dim", &ModelConfig::char_dim);
    num("char_filters", &ModelConfig::char_filters);
    num("lstm_hidden", &ModelConfig::lstm_hidden);
    num("lstm_layers", &ModelConfig::lstm_layers);
    num("dropout", &ModelConfig::dropout);
    boolean("freeze_embeddings", &ModelConfig::freeze_embeddings);
    num("rep_dim", &ModelConfig::rep_dim);
    num("score_dim", &ModelConfig::score_dim);
    num("ffn_hidden", &ModelConfig::ffn_hidden);
    m["pair_policy"] = Field{
        [](ModelConfig& c, const std::string& v) { c.pair_policy = pair_policy_from_string(v); },
        [](const ModelConfig& c) { return to_string(c.pair_policy); }};
    num("attn_dim", &ModelConfig::attn_dim);
    num("refine_hidden", &ModelConfig::refine_hidden);
    num("iterations", &ModelConfig::iterations);
    boolean("attend_own_pairs_only", &ModelConfig::attend_own_pairs_only);
    boolean("aux_loss", &ModelConfig::aux_loss);
    num("learning_rate", &ModelConfig::learning_rate);
    num("batch_size", &ModelConfig::batch_size);
    num("max_epochs", &ModelConfig::max_epochs);
    num("patience", &ModelConfig::patience);
    num("clip_norm", &ModelConfig::clip_norm);
    num("epsilon_weight", &ModelConfig::epsilon_weight);
    num("min_freq", &ModelConfig::min_freq);
    num("seed", &ModelConfig::seed);
    return m;
  }();
  return f;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

ModelConfig parse_config(const std::string& text) {
  ModelConfig cfg;
  std::vector<std::string> unknown;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto it = fields().find(key);
    if (it == fields().end()) {
      unknown.push_back(key);
      continue;
    }
    it->second.set(cfg, value);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw FormatError(msg);
  }
  cfg.validate();
  return cfg;
}

ModelConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ModelConfig& cfg) {
  std::ostringstream os;
  for (const auto& [key, field] : fields()) {
    os << key << " = " << field.get(cfg) << "\n";
  }
  return os.str();
}

}  // namespace srl
