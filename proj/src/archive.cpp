#include "srl/archive.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "archive format assumes a little-endian host");

namespace srl {

namespace {

constexpr const char* kMagic = "SRL-MODEL";

template <typename K>
std::vector<std::pair<K, int>> by_id(const std::map<K, int>& m) {
  std::vector<std::pair<K, int>> out(m.begin(), m.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

}  // namespace

void save_model(const std::string& path, ModelParams<float>& params, const Vocabulary& vocab,
                const TrainMeta& meta) {
  std::ostringstream header;
  header << kMagic << " v" << kArchiveVersion << "\n";
  header << "[config]\n" << serialize_config(params.cfg);
  header << "[sizes]\n"
         << params.sizes.n_words << " " << params.sizes.n_pos << " " << params.sizes.n_chars
         << " " << params.sizes.n_roles << "\n";
  header << "[meta]\nbest_epoch = " << meta.best_epoch << "\ndev_f1 = ";
  {
    std::ostringstream f1;
    f1.precision(17);
    f1 << meta.dev_f1;
    header << f1.str() << "\n";
  }

  header << "[vocab.word]\n";
  for (const auto& [w, id] : by_id(vocab.word)) header << id << "\t" << w << "\n";
  header << "[vocab.pos]\n";
  for (const auto& [p, id] : by_id(vocab.pos)) header << id << "\t" << p << "\n";
  header << "[vocab.char]\n";
  for (const auto& [c, id] : by_id(vocab.chars)) header << id << "\t" << c << "\n";
  header << "[vocab.role]\n";
  for (const auto& [r, id] : by_id(vocab.role)) header << id << "\t" << r << "\n";

  auto ps = params.all();
  header << "[manifest]\n";
  std::uint64_t offset = 0;
  for (const auto* p : ps) {
    header << p->name << " " << p->value.rows() << " " << p->value.cols() << " " << offset << "\n";
    offset += static_cast<std::uint64_t>(p->value.size()) * sizeof(float);
  }
  header << "[end-header]\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArchiveError("cannot open for writing: " + path);
  out << header.str();
  for (const auto* p : ps) {
    // Row-major entry order.
    for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
        float v = p->value(r, c);
        out.write(reinterpret_cast<const char*>(&v), sizeof(float));
      }
    }
  }
  if (!out) throw ArchiveError("write failed: " + path);
}

ModelArchive load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArchiveError("cannot open model archive: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ArchiveError("empty archive: " + path);
  {
    std::istringstream is(line);
    std::string magic, ver;
    is >> magic >> ver;
    if (magic != kMagic || ver.size() < 2 || ver[0] != 'v') {
      throw ArchiveError("not a model archive: " + path);
    }
    int version = std::stoi(ver.substr(1));
    if (version != kArchiveVersion) {
      throw ArchiveError("archive version mismatch: file has v" + std::to_string(version) +
                         ", this build reads v" + std::to_string(kArchiveVersion));
    }
  }

  ModelArchive ar;
  std::string config_text;
  ModelSizes sizes;
  std::vector<std::tuple<std::string, Eigen::Index, Eigen::Index, std::uint64_t>> manifest;

  std::string section;
  while (std::getline(in, line)) {
    if (line == "[end-header]") break;
    if (!line.empty() && line.front() == '[' && line.back() == ']') {
      section = line;
      continue;
    }
    if (section == "[config]") {
      config_text += line + "\n";
    } else if (section == "[sizes]") {
      std::istringstream is(line);
      is >> sizes.n_words >> sizes.n_pos >> sizes.n_chars >> sizes.n_roles;
      if (is.fail()) throw ArchiveError("bad [sizes] line");
    } else if (section == "[meta]") {
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ArchiveError("bad [meta] line: " + line);
      std::string key = line.substr(0, eq);
      std::string value = line.substr(eq + 1);
      if (key.find("best_epoch") != std::string::npos) ar.meta.best_epoch = std::stoi(value);
      if (key.find("dev_f1") != std::string::npos) ar.meta.dev_f1 = std::stod(value);
    } else if (section == "[vocab.word]" || section == "[vocab.pos]" ||
               section == "[vocab.role]" || section == "[vocab.char]") {
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw ArchiveError("bad vocab line: " + line);
      int id = std::stoi(line.substr(0, tab));
      std::string key = line.substr(tab + 1);
      if (section == "[vocab.word]") ar.vocab.word[key] = id;
      else if (section == "[vocab.pos]") ar.vocab.pos[key] = id;
      else if (section == "[vocab.role]") ar.vocab.role[key] = id;
      else ar.vocab.chars[static_cast<std::uint32_t>(std::stoul(key))] = id;
    } else if (section == "[manifest]") {
      std::istringstream is(line);
      std::string name;
      Eigen::Index rows, cols;
      std::uint64_t offset;
      is >> name >> rows >> cols >> offset;
      if (is.fail()) throw ArchiveError("bad manifest line: " + line);
      manifest.emplace_back(name, rows, cols, offset);
    }
  }
  if (section != "[manifest]") throw ArchiveError("truncated archive header: " + path);

  ar.vocab.role_names.resize(ar.vocab.role.size() + 1);
  ar.vocab.role_names[0] = "<eps>";
  for (const auto& [name, id] : ar.vocab.role) {
    if (id <= 0 || static_cast<std::size_t>(id) >= ar.vocab.role_names.size()) {
      throw ArchiveError("bad role id in archive: " + std::to_string(id));
    }
    ar.vocab.role_names[static_cast<std::size_t>(id)] = name;
  }

  ModelConfig cfg = parse_config(config_text);
  ar.params = make_model_params<float>(cfg, sizes, 0);

  auto ps = ar.params.all();
  if (ps.size() != manifest.size()) {
    throw ArchiveError("manifest has " + std::to_string(manifest.size()) + " arrays, expected " +
                       std::to_string(ps.size()));
  }
  std::streampos data_start = in.tellg();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto& [name, rows, cols, offset] = manifest[i];
    Param<float>* p = ps[i];
    if (name != p->name || rows != p->value.rows() || cols != p->value.cols()) {
      throw ArchiveError("manifest entry '" + name + "' does not match expected array '" +
                         p->name + "'");
    }
    in.seekg(data_start + static_cast<std::streamoff>(offset));
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        float v;
        in.read(reinterpret_cast<char*>(&v), sizeof(float));
        p->value(r, c) = v;
      }
    }
    if (!in) throw ArchiveError("truncated array data for '" + name + "'");
  }
  return ar;
}

}  // namespace srl
