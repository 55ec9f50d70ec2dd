#include "tsf/io/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tsf::io {

using nlohmann::json;

namespace {

constexpr const char* kForest = "tsf.forest";
constexpr const char* kStructure = "tsf.structure_distribution";
constexpr const char* kDepthwise = "tsf.depthwise_distribution";
constexpr const char* kNetwork = "tsf.network_model";

json header(const char* format) { return json{{"format", format}, {"format_version", kFormatVersion}}; }

void check_header(const json& doc, const char* format) {
  if (!doc.is_object() || doc.value("format", "") != format) {
    throw std::runtime_error(std::string("expected a '") + format + "' document");
  }
  if (doc.at("format_version").get<int>() != kFormatVersion) {
    throw std::runtime_error("unsupported format_version for " + std::string(format));
  }
}

json growth_to_json(const GrowthConfig& c) {
  return json{{"max_depth", c.max_depth ? json(*c.max_depth) : json(nullptr)},
              {"min_leaf_size", c.min_leaf_size},
              {"min_split_events", c.min_split_events},
              {"mtry", c.mtry},
              {"n_split_candidates", c.n_split_candidates},
              {"bootstrap", c.bootstrap},
              {"rng_seed", c.rng_seed}};
}

GrowthConfig growth_from_json(const json& j) {
  GrowthConfig c;
  if (!j.at("max_depth").is_null()) c.max_depth = j.at("max_depth").get<int>();
  c.min_leaf_size = j.at("min_leaf_size").get<int>();
  c.min_split_events = j.at("min_split_events").get<int>();
  c.mtry = j.at("mtry").get<int>();
  c.n_split_candidates = j.at("n_split_candidates").get<int>();
  c.bootstrap = j.at("bootstrap").get<bool>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return c;
}

json node_to_json(const SurvivalTree& tree, int id) {
  const TreeNode& node = tree.node(id);
  if (node.is_terminal()) return json{{"n_samples", node.n_samples}, {"cum_hazard", node.cum_hazard}};
  return json{{"feature", node.feature},
              {"split_value", node.split_value},
              {"n_samples", node.n_samples},
              {"left", node_to_json(tree, node.left)},
              {"right", node_to_json(tree, node.right)}};
}

int node_from_json(const json& j, std::vector<TreeNode>& nodes, std::size_t grid_size) {
  TreeNode node;
  node.n_samples = j.at("n_samples").get<int>();
  const int id = static_cast<int>(nodes.size());
  if (j.contains("feature")) {
    node.feature = j.at("feature").get<int>();
    node.split_value = j.at("split_value").get<double>();
    nodes.push_back(node);
    const int left = node_from_json(j.at("left"), nodes, grid_size);
    const int right = node_from_json(j.at("right"), nodes, grid_size);
    nodes[static_cast<std::size_t>(id)].left = left;
    nodes[static_cast<std::size_t>(id)].right = right;
  } else {
    node.cum_hazard = j.at("cum_hazard").get<std::vector<double>>();
    if (node.cum_hazard.size() != grid_size) throw std::runtime_error("forest: terminal curve does not match time grid");
    nodes.push_back(std::move(node));
  }
  return id;
}

json step_to_json(const StepFunction& f) {
  return json{{"knots", f.knots()}, {"values", f.values()}, {"initial_value", f.initial_value()}};
}

StepFunction step_from_json(const json& j) {
  return StepFunction(j.at("knots").get<std::vector<double>>(), j.at("values").get<std::vector<double>>(),
                      j.at("initial_value").get<double>());
}

json forest_doc(const Forest& forest) {
  json doc = header(kForest);
  doc["config"] = growth_to_json(forest.config);
  doc["n_features"] = forest.n_features;
  doc["time_grid"] = forest.time_grid;
  json trees = json::array();
  for (const auto& tree : forest.trees) trees.push_back(node_to_json(tree, 0));
  doc["trees"] = std::move(trees);
  return doc;
}

Forest forest_from_doc(const json& doc) {
  check_header(doc, kForest);
  Forest forest;
  forest.config = growth_from_json(doc.at("config"));
  forest.n_features = doc.at("n_features").get<std::size_t>();
  forest.time_grid = doc.at("time_grid").get<std::vector<double>>();
  for (const auto& t : doc.at("trees")) {
    std::vector<TreeNode> nodes;
    node_from_json(t, nodes, forest.time_grid.size());
    forest.trees.emplace_back(std::move(nodes));
  }
  if (forest.trees.empty()) throw std::runtime_error("forest: no trees");
  return forest;
}

json structure_doc(const StructureDistribution& dist) {
  json doc = header(kStructure);
  doc["levels"] = dist.levels;
  doc["source_n_trees"] = dist.source_n_trees;
  json entries = json::array();
  for (std::size_t k = 0; k < dist.signatures.size(); ++k) {
    entries.push_back({{"signature", dist.signatures[k].positions()},
                       {"count", dist.counts[k]},
                       {"probability", dist.probabilities[k]}});
  }
  doc["entries"] = std::move(entries);
  return doc;
}

StructureDistribution structure_from_doc(const json& doc) {
  check_header(doc, kStructure);
  StructureDistribution dist;
  dist.levels = doc.at("levels").get<int>();
  dist.source_n_trees = doc.at("source_n_trees").get<std::uint64_t>();
  for (const auto& e : doc.at("entries")) {
    dist.signatures.emplace_back(dist.levels, e.at("signature").get<std::vector<int>>());
    dist.counts.push_back(e.at("count").get<std::uint64_t>());
    dist.probabilities.push_back(e.at("probability").get<double>());
  }
  return dist;
}

json depthwise_doc(const DepthwiseDistribution& dp) {
  json doc = header(kDepthwise);
  json levels = json::array();
  for (const auto& level : dp.levels) {
    json entries = json::array();
    for (const auto& [f, p] : level) entries.push_back({{"feature", f}, {"probability", p}});
    levels.push_back(std::move(entries));
  }
  doc["levels"] = std::move(levels);
  return doc;
}

DepthwiseDistribution depthwise_from_doc(const json& doc) {
  check_header(doc, kDepthwise);
  DepthwiseDistribution dp;
  for (const auto& level : doc.at("levels")) {
    auto& out = dp.levels.emplace_back();
    for (const auto& e : level) out[e.at("feature").get<int>()] = e.at("probability").get<double>();
  }
  return dp;
}

json network_doc(const nn::NetworkModel& model) {
  json doc = header(kNetwork);
  doc["loss"] = nn::to_string(model.kind);
  doc["activation"] = model.net.activation() == nn::Activation::Relu ? "relu" : "tanh";
  doc["head"] = model.net.head() == nn::OutputHead::Linear ? "linear" : "softmax";
  json layers = json::array();
  for (const auto& layer : model.net.layers()) {
    layers.push_back({{"in", layer.in}, {"out", layer.out}, {"weights", layer.weights}, {"bias", layer.bias}});
  }
  doc["layers"] = std::move(layers);
  doc["scaler"] = {{"mean", model.scaler.mean}, {"scale", model.scaler.scale}};
  doc["baseline"] = model.baseline ? step_to_json(*model.baseline) : json(nullptr);
  doc["grid"] = model.grid ? json(model.grid->cuts()) : json(nullptr);
  return doc;
}

nn::NetworkModel network_from_doc(const json& doc) {
  check_header(doc, kNetwork);
  nn::NetworkModel model;
  model.kind = nn::loss_kind_from_string(doc.at("loss").get<std::string>());
  std::vector<nn::DenseLayer> layers;
  for (const auto& l : doc.at("layers")) {
    nn::DenseLayer layer;
    layer.in = l.at("in").get<std::size_t>();
    layer.out = l.at("out").get<std::size_t>();
    layer.weights = l.at("weights").get<std::vector<double>>();
    layer.bias = l.at("bias").get<std::vector<double>>();
    layers.push_back(std::move(layer));
  }
  const auto act = doc.at("activation").get<std::string>() == "relu" ? nn::Activation::Relu : nn::Activation::Tanh;
  const auto head = doc.at("head").get<std::string>() == "linear" ? nn::OutputHead::Linear : nn::OutputHead::Softmax;
  model.net = nn::SurvivalNetwork(std::move(layers), act, head);
  model.scaler.mean = doc.at("scaler").at("mean").get<std::vector<double>>();
  model.scaler.scale = doc.at("scaler").at("scale").get<std::vector<double>>();
  if (!doc.at("baseline").is_null()) model.baseline = step_from_json(doc.at("baseline"));
  if (!doc.at("grid").is_null()) model.grid = nn::DiscreteTimeGrid(doc.at("grid").get<std::vector<double>>());
  return model;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed artifact document: ") + e.what());
  }
}

}  // namespace

std::string to_json(const Forest& forest) { return forest_doc(forest).dump(); }
std::string to_json(const StructureDistribution& dist) { return structure_doc(dist).dump(1); }
std::string to_json(const DepthwiseDistribution& dp) { return depthwise_doc(dp).dump(1); }
std::string to_json(const nn::NetworkModel& model) { return network_doc(model).dump(); }

Forest forest_from_json(const std::string& text) { return forest_from_doc(parse(text)); }
StructureDistribution structure_distribution_from_json(const std::string& text) {
  return structure_from_doc(parse(text));
}
DepthwiseDistribution depthwise_distribution_from_json(const std::string& text) {
  return depthwise_from_doc(parse(text));
}
nn::NetworkModel network_model_from_json(const std::string& text) { return network_from_doc(parse(text)); }

Artifact artifact_from_json(const std::string& text) {
  const json doc = parse(text);
  const std::string format = doc.is_object() ? doc.value("format", "") : "";
  if (format == kForest) return forest_from_doc(doc);
  if (format == kStructure) return structure_from_doc(doc);
  if (format == kDepthwise) return depthwise_from_doc(doc);
  if (format == kNetwork) return network_from_doc(doc);
  throw std::runtime_error("unknown artifact format '" + format + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Artifact load_artifact(const std::filesystem::path& path) { return artifact_from_json(read_text(path)); }

void save_artifact(const std::filesystem::path& path, const Artifact& artifact) {
  write_text(path, std::visit([](const auto& a) { return to_json(a); }, artifact) + "\n");
}

}  // namespace tsf::io
