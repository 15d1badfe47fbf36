#include "flowguard/harness/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "flowguard/errors.hpp"
#include "flowguard/features.hpp"
#include "flowguard/rng.hpp"

namespace flowguard::harness {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

void save_dataset(const Dataset& data, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream manifest(dir / "manifest.csv", std::ios::binary | std::ios::trunc);
  if (!manifest) throw InputError("cannot write manifest in '" + dir.string() + "'");
  manifest << "file,label,chain\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto file = fmt::format("{:06d}.json", i);
    std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + (dir / file).string() + "'");
    out << graph_to_json(data[i].graph);
    manifest << file << ',' << data[i].label() << ',' << to_string(data[i].chain) << '\n';
  }
}

Dataset load_dataset(const fs::path& dir) {
  std::istringstream manifest(read_file(dir / "manifest.csv"));
  std::string line;
  if (!std::getline(manifest, line) || line != "file,label,chain")
    throw SchemaError("manifest.csv", "expected header 'file,label,chain'");

  Dataset data;
  std::size_t row = 1;
  while (std::getline(manifest, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    const auto where = fmt::format("manifest.csv:{}", row);
    if (fields.size() != 3) throw SchemaError(where, "expected 3 fields");
    if (fields[1] != "0" && fields[1] != "1") throw SchemaError(where + ".label", "expected 0 or 1");
    auto chain = chain_from_string(fields[2]);
    if (!chain) throw SchemaError(where + ".chain", "expected ethereum or bsc");

    LabeledGraph lg;
    lg.id = fields[0];
    lg.chain = *chain;
    lg.graph = graph_from_json(read_file(dir / fields[0]));
    lg.graph.label = fields[1] == "1" ? 1 : 0;
    data.push_back(std::move(lg));
  }
  return data;
}

void AblationMask::validate() const {
  if (!include_type && !include_frequency && !include_diversity && !include_profit)
    throw ConfigError("ablation mask removes every feature family");
}

std::vector<int> AblationMask::columns() const {
  namespace col = feature_col;
  std::vector<int> out;
  if (include_type) out.insert(out.end(), {col::kTypeOpaque, col::kTypeTransparent, col::kTypeEoa});
  if (include_frequency) out.insert(out.end(), {col::kFreqIn, col::kFreqOut});
  if (include_diversity) out.insert(out.end(), {col::kDivIn, col::kDivOut});
  if (include_profit) out.push_back(col::kProfit);
  return out;
}

AblationMask AblationMask::without(const std::string& families) {
  AblationMask m;
  std::stringstream ss(families);
  for (std::string f; std::getline(ss, f, ',');) {
    if (f.empty()) continue;
    if (f == "type") m.include_type = false;
    else if (f == "frequency") m.include_frequency = false;
    else if (f == "diversity") m.include_diversity = false;
    else if (f == "profit") m.include_profit = false;
    else throw ConfigError("unknown feature family '" + f + "' (type, frequency, diversity, profit)");
  }
  m.validate();
  return m;
}

std::string AblationMask::name() const {
  std::vector<std::string> dropped;
  if (!include_type) dropped.push_back("type");
  if (!include_frequency) dropped.push_back("frequency");
  if (!include_diversity) dropped.push_back("diversity");
  if (!include_profit) dropped.push_back("profit");
  return dropped.empty() ? "full" : "without-" + fmt::format("{}", fmt::join(dropped, "-"));
}

CashFlowGraph select_columns(const CashFlowGraph& g, const std::vector<int>& columns) {
  if (!g.features) throw FeatureMissing("graph has no feature matrix");
  CashFlowGraph out = g;
  FeatureMatrix x(g.features->rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] < 0 || columns[c] >= g.features->cols()) throw ShapeError("feature column out of range");
    x.col(static_cast<Eigen::Index>(c)) = g.features->col(columns[c]);
  }
  out.features = std::move(x);
  return out;
}

Split split_dataset(const Dataset& data, int train_size_per_class, std::uint64_t seed) {
  if (train_size_per_class < 1) throw ConfigError("train size per class must be at least 1");
  Split split;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data[i].label() == cls) members.push_back(i);
    if (members.size() <= static_cast<std::size_t>(train_size_per_class))
      throw ConfigError(fmt::format("class {} has {} graphs; train size {} per class needs more", cls, members.size(),
                                    train_size_per_class));
    SplitMix64 rng(derive_seed(seed, 0x73706c6974ull + static_cast<std::uint64_t>(cls)));  // "split"
    rng.shuffle(members);
    split.train.insert(split.train.end(), members.begin(), members.begin() + train_size_per_class);
    split.test.insert(split.test.end(), members.begin() + train_size_per_class, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace flowguard::harness
