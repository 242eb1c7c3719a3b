// Command-line front end: training, prediction, evaluation, analysis tables,
// and gradient certification.
//
// Exit codes: 0 success, 1 check failure, 2 usage/data error, 3 model-file
// incompatibility.

#include <CLI11.hpp>

#include "srl/archive.hpp"
#include "srl/eval.hpp"
#include "srl/gradcheck.hpp"
#include "srl/pipeline.hpp"
#include "srl/trainer.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitArchive = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write file: " + path);
  out << content;
  if (!out) throw UsageError("write failed: " + path);
}

srl::CorpusFormat parse_format(const std::string& s) {
  if (s == "conll09") return srl::CorpusFormat::Conll09;
  if (s == "upb") return srl::CorpusFormat::Upb;
  throw UsageError("unknown corpus format '" + s + "' (expected conll09 or upb)");
}

// --seed flag, then SRL_SEED, then the config default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SRL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("SRL_SEED is not an integer: ") + env);
    }
  }
  return fallback;
}

// "0..4" or a comma list "0,2,4".
std::vector<int> parse_sweep(const std::string& s) {
  std::vector<int> out;
  auto dots = s.find("..");
  try {
    if (dots != std::string::npos) {
      int lo = std::stoi(s.substr(0, dots));
      int hi = std::stoi(s.substr(dots + 2));
      if (lo < 0 || hi < lo) throw UsageError("bad sweep range: " + s);
      for (int n = lo; n <= hi; ++n) out.push_back(n);
    } else {
      std::istringstream is(s);
      std::string item;
      while (std::getline(is, item, ',')) out.push_back(std::stoi(item));
    }
  } catch (const std::invalid_argument&) {
    throw UsageError("bad sweep specification: " + s);
  } catch (const std::out_of_range&) {
    throw UsageError("bad sweep specification: " + s);
  }
  if (out.empty()) throw UsageError("empty sweep specification: " + s);
  for (int n : out) {
    if (n < 0) throw UsageError("sweep iteration counts must be >= 0");
  }
  return out;
}

std::vector<std::vector<srl::Triplet>> predict_corpus(srl::ModelArchive& ar,
                                                      const std::vector<srl::Sentence>& corpus,
                                                      int n_iterations) {
  std::vector<std::vector<srl::Triplet>> preds;
  preds.reserve(corpus.size());
  for (const auto& sent : corpus) {
    auto enc = srl::encode_sentence(sent, ar.vocab);
    preds.push_back(srl::decode(ar.params, enc, n_iterations, ar.vocab.role_names));
  }
  return preds;
}

int cmd_train(const std::string& config_path, const std::string& train_path,
              const std::string& dev_path, const std::string& format,
              const std::string& embeddings_path, const std::string& out_path,
              const std::string& log_path, const std::optional<std::uint64_t>& seed,
              bool print_config) {
  srl::ModelConfig cfg;
  if (!config_path.empty()) cfg = srl::parse_config(read_file(config_path));
  cfg.seed = resolve_seed(seed, cfg.seed);
  if (print_config) {
    std::cout << srl::serialize_config(cfg);
    return kExitOk;
  }
  if (train_path.empty()) throw UsageError("--train is required");
  if (dev_path.empty()) throw UsageError("--dev is required");
  if (out_path.empty()) throw UsageError("--out is required");
  cfg.validate();

  srl::CorpusFormat fmt = parse_format(format);
  auto train_corpus = srl::parse_corpus(read_file(train_path), fmt);
  auto dev_corpus = srl::parse_corpus(read_file(dev_path), fmt);
  if (train_corpus.empty()) throw UsageError("training corpus is empty: " + train_path);
  if (dev_corpus.empty()) throw UsageError("dev corpus is empty: " + dev_path);

  srl::Vocabulary vocab = srl::build_vocab(train_corpus, cfg.min_freq);

  std::optional<Eigen::MatrixXf> emb;
  if (!embeddings_path.empty()) {
    emb = srl::load_embeddings(embeddings_path, vocab, cfg.word_dim, cfg.seed);
  }

  auto result = srl::train<float>(train_corpus, dev_corpus, vocab, cfg,
                                  emb ? &*emb : nullptr, &std::cout);

  if (!log_path.empty()) {
    std::ostringstream os;
    for (const auto& row : result.log) os << row.line() << "\n";
    write_file(log_path, os.str());
  }
  srl::TrainMeta meta{result.best_epoch, result.best_f1};
  srl::save_model(out_path, result.model, vocab, meta);
  std::cout << "model written to " << out_path << " (best epoch " << result.best_epoch
            << ", dev F1 " << result.best_f1 << ")\n";
  return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& input_path,
                const std::string& format, int iterations, const std::string& out_path) {
  srl::CorpusFormat fmt = parse_format(format);
  srl::ModelArchive ar = srl::load_model(model_path);
  int n = iterations >= 0 ? iterations : ar.params.cfg.iterations;

  auto corpus = srl::parse_corpus(read_file(input_path), fmt);
  if (corpus.empty()) {
    std::cerr << "warning: input file has no sentences: " << input_path << "\n";
    write_file(out_path, "");
    return kExitOk;
  }

  auto preds = predict_corpus(ar, corpus, n);
  std::vector<srl::Sentence> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    srl::Sentence s;
    s.tokens = corpus[i].tokens;
    s.gold = preds[i];
    std::sort(s.gold.begin(), s.gold.end());
    std::set<int> pset;
    for (const auto& t : s.gold) pset.insert(t.p);
    s.predicates.assign(pset.begin(), pset.end());
    s.senses.assign(s.predicates.size(), "_");
    out.push_back(std::move(s));
  }
  write_file(out_path, srl::serialize_corpus(out, fmt));
  return kExitOk;
}

int cmd_eval(const std::string& gold_path, const std::string& pred_path,
             const std::string& format, const std::string& machine_path) {
  srl::CorpusFormat fmt = parse_format(format);
  auto gold = srl::parse_corpus(read_file(gold_path), fmt);
  auto pred = srl::parse_corpus(read_file(pred_path), fmt);
  if (gold.size() != pred.size()) {
    throw UsageError("sentence count mismatch: gold has " + std::to_string(gold.size()) +
                     ", predictions have " + std::to_string(pred.size()));
  }
  std::vector<std::vector<srl::Triplet>> triplets;
  triplets.reserve(pred.size());
  for (const auto& s : pred) triplets.push_back(s.gold);

  srl::EvalReport rep = srl::evaluate(triplets, gold);
  if (rep.no_data) std::cerr << "warning: no predictions and no gold triplets\n";
  std::cout << rep.text();
  if (!machine_path.empty()) write_file(machine_path, rep.machine());
  return kExitOk;
}

int cmd_analyze(const std::string& model_path, const std::string& dev_path,
                const std::string& format, const std::string& sweep_spec,
                const std::string& sweep_out, const std::string& distance_out) {
  srl::CorpusFormat fmt = parse_format(format);
  srl::ModelArchive ar = srl::load_model(model_path);
  auto dev = srl::parse_corpus(read_file(dev_path), fmt);
  if (dev.empty()) throw UsageError("analysis corpus is empty: " + dev_path);

  auto sweep = parse_sweep(sweep_spec);
  auto rows = srl::iteration_sweep(ar.params, dev, ar.vocab, sweep);
  write_file(sweep_out, srl::sweep_table(rows));

  auto preds = predict_corpus(ar, dev, ar.params.cfg.iterations);
  srl::EvalReport rep = srl::evaluate(preds, dev);
  write_file(distance_out, srl::distance_table(rep.distance));

  std::cout << rep.text();
  std::cout << "sweep table written to " << sweep_out << "\n";
  std::cout << "distance table written to " << distance_out << "\n";
  return kExitOk;
}

int cmd_gradcheck(int n, int n_roles, int iterations, const std::optional<std::uint64_t>& seed,
                  double eps, bool inject_fault) {
  if (n < 2 || n > 6) throw UsageError("--size must be in [2, 6]");
  if (n_roles < 2) throw UsageError("--roles must be >= 2");
  if (iterations < 0) throw UsageError("--iterations must be >= 0");
  std::uint64_t s = resolve_seed(seed, 42);

  // Compact dimensions: finite differences re-run the forward pass once per
  // parameter entry, so the certification model is small. Every parameter
  // group of the full model is present.
  srl::ModelConfig cfg;
  cfg.word_dim = 6;
  cfg.pos_dim = 3;
  cfg.char_dim = 4;
  cfg.char_filters = 3;
  cfg.lstm_hidden = 5;
  cfg.lstm_layers = 2;
  cfg.rep_dim = 6;
  cfg.score_dim = 4;
  cfg.ffn_hidden = 6;
  cfg.attn_dim = 4;
  cfg.refine_hidden = 6;
  cfg.iterations = iterations;

  srl::ModelSizes sizes{n + 2, 3, 6, n_roles};
  auto m = srl::make_model_params<double>(cfg, sizes, s);

  std::mt19937_64 rng(s ^ 0xA24BAED4963EE407ull);
  // Move off the symmetric zero-bias initialization: it parks relu and
  // max-pool pre-activations exactly on their kinks, where two-sided
  // differences legitimately disagree with the subgradient convention.
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  for (auto* p : m.all()) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] += jitter(rng);
  }
  // Keep a share of the relu-gated pair-score channels active so the role
  // scorer's W_s group carries real gradient signal.
  m.b.value.array() += 0.3;

  srl::EncodedSentence sent;
  sent.n = n;
  std::uniform_int_distribution<int> word(1, sizes.n_words - 1);
  std::uniform_int_distribution<int> pos(1, sizes.n_pos - 1);
  std::uniform_int_distribution<int> chr(1, sizes.n_chars - 1);
  std::uniform_int_distribution<int> wlen(1, 4);
  for (int t = 0; t < n; ++t) {
    sent.word_ids.push_back(word(rng));
    sent.pos_ids.push_back(pos(rng));
    std::vector<int> cs(static_cast<std::size_t>(wlen(rng)));
    for (auto& c : cs) c = chr(rng);
    sent.char_ids.push_back(std::move(cs));
  }
  std::uniform_int_distribution<int> tok(1, n);
  std::uniform_int_distribution<int> role(1, n_roles - 1);
  int p = tok(rng);
  sent.gold_predicates.push_back(p);
  for (int a = 1; a <= n; ++a) {
    if (a % 2 == 1) {
      int r = role(rng);
      sent.gold.push_back(srl::Triplet{p, a, "R" + std::to_string(r)});
      sent.gold_role_ids.push_back(r);
    }
  }

  bool fault_pending = inject_fault;
  auto report = srl::grad_check(
      m.trainable(),
      [&](srl::Graph<double>& g) {
        srl::Tensor<double> loss = srl::sentence_loss(g, m, sent);
        if (fault_pending) {
          fault_pending = false;
          m.w_role_s.grad.array() += 0.5;
        }
        return loss;
      },
      eps);

  bool all_pass = true;
  for (const auto& e : report.entries) {
    bool ok = e.max_rel_err < 1e-4;
    all_pass = all_pass && ok;
    std::cout << e.name << "\t" << e.max_rel_err << "\t" << (ok ? "pass" : "FAIL") << "\n";
  }
  std::cout << "max_rel_err\t" << report.max_rel_err() << "\t" << (all_pass ? "pass" : "FAIL")
            << "\n";
  return all_pass ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic role labeler: biaffine pair scoring with iterative "
               "attention-based refinement"};
  app.require_subcommand(1);

  // train
  std::string t_config, t_train, t_dev, t_format = "conll09", t_emb, t_out, t_log;
  std::optional<std::uint64_t> t_seed;
  bool t_print_config = false;
  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--config", t_config, "Configuration file (key = value lines)");
  train->add_option("--train", t_train, "Training corpus");
  train->add_option("--dev", t_dev, "Development corpus");
  train->add_option("--format", t_format, "Corpus format: conll09 or upb");
  train->add_option("--embeddings", t_emb, "Pretrained .vec word embeddings");
  train->add_option("--out", t_out, "Output model path");
  train->add_option("--log", t_log, "Also write the training log to this file");
  train->add_option("--seed", t_seed, "Random seed (overrides config and SRL_SEED)");
  train->add_flag("--print-config", t_print_config, "Print the effective configuration and exit");

  // predict
  std::string p_model, p_input, p_format = "conll09", p_out;
  int p_iterations = -1;
  auto* predict = app.add_subcommand("predict", "Predict triplets for a corpus");
  predict->add_option("--model", p_model, "Trained model file")->required();
  predict->add_option("--input", p_input, "Input corpus")->required();
  predict->add_option("--format", p_format, "Corpus format: conll09 or upb");
  predict->add_option("--iterations", p_iterations,
                      "Refinement iteration override (default: trained value)");
  predict->add_option("--out", p_out, "Output predictions path")->required();

  // eval
  std::string e_gold, e_pred, e_format = "conll09", e_machine;
  auto* eval = app.add_subcommand("eval", "Score predictions against gold");
  eval->add_option("--gold", e_gold, "Gold corpus")->required();
  eval->add_option("--pred", e_pred, "Predicted corpus")->required();
  eval->add_option("--format", e_format, "Corpus format: conll09 or upb");
  eval->add_option("--machine", e_machine, "Write machine-readable records to this file");

  // analyze
  std::string a_model, a_dev, a_format = "conll09", a_sweep = "0..2";
  std::string a_sweep_out = "sweep.tsv", a_distance_out = "distance.tsv";
  auto* analyze = app.add_subcommand("analyze", "Iteration sweep and distance tables");
  analyze->add_option("--model", a_model, "Trained model file")->required();
  analyze->add_option("--dev", a_dev, "Corpus to analyze")->required();
  analyze->add_option("--format", a_format, "Corpus format: conll09 or upb");
  analyze->add_option("--sweep", a_sweep, "Iteration counts: \"lo..hi\" or comma list");
  analyze->add_option("--out-sweep", a_sweep_out, "Sweep table output path");
  analyze->add_option("--out-distance", a_distance_out, "Distance table output path");

  // gradcheck
  int g_size = 3, g_roles = 4, g_iterations = 2;
  std::optional<std::uint64_t> g_seed;
  double g_eps = 1e-5;
  bool g_fault = false;
  auto* gradcheck = app.add_subcommand("gradcheck", "Certify gradients by finite differences");
  gradcheck->add_option("--size", g_size, "Sentence length (2..6)");
  gradcheck->add_option("--roles", g_roles, "Role inventory size including the null role");
  gradcheck->add_option("--iterations", g_iterations, "Refinement iterations");
  gradcheck->add_option("--seed", g_seed, "Random seed (overrides SRL_SEED)");
  gradcheck->add_option("--eps", g_eps, "Central-difference step");
  gradcheck->add_flag("--inject-fault", g_fault, "Corrupt one gradient (negative control)")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (train->parsed()) {
      return cmd_train(t_config, t_train, t_dev, t_format, t_emb, t_out, t_log, t_seed,
                       t_print_config);
    }
    if (predict->parsed()) return cmd_predict(p_model, p_input, p_format, p_iterations, p_out);
    if (eval->parsed()) return cmd_eval(e_gold, e_pred, e_format, e_machine);
    if (analyze->parsed()) {
      return cmd_analyze(a_model, a_dev, a_format, a_sweep, a_sweep_out, a_distance_out);
    }
    if (gradcheck->parsed()) {
      return cmd_gradcheck(g_size, g_roles, g_iterations, g_seed, g_eps, g_fault);
    }
  } catch (const srl::ArchiveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArchive;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
