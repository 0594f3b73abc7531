#include "geco/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace geco {

using nlohmann::json;

void Dataset::validate() const {
  if (ground_truth.size() != graphs.size()) {
    throw std::invalid_argument("Dataset: ground_truth list count != graph count");
  }
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const Graph& g = graphs[i];
    const std::string where = "Dataset: graph " + std::to_string(i) + ": ";
    if (g.feature_dim() != feature_dim) {
      throw std::invalid_argument(where + "feature_dim " + std::to_string(g.feature_dim()) +
                                  " != " + std::to_string(feature_dim));
    }
    if (g.label() && *g.label() >= num_classes) {
      throw std::invalid_argument(where + "label out of range");
    }
    for (const NodeMask& m : ground_truth[i]) {
      if (m.size() != g.num_nodes()) throw std::invalid_argument(where + "ground-truth mask length");
    }
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.num_classes = num_classes;
  out.feature_dim = feature_dim;
  out.graphs.reserve(indices.size());
  out.ground_truth.reserve(indices.size());
  for (std::size_t i : indices) {
    out.graphs.push_back(graphs.at(i));
    out.ground_truth.push_back(ground_truth.at(i));
  }
  return out;
}

std::string dataset_to_json(const Dataset& data, int indent) {
  json doc;
  doc["num_classes"] = data.num_classes;
  doc["feature_dim"] = data.feature_dim;
  json graphs = json::array();
  for (std::size_t i = 0; i < data.graphs.size(); ++i) {
    const Graph& g = data.graphs[i];
    json jg;
    jg["num_nodes"] = g.num_nodes();
    json edges = json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
    jg["edges"] = std::move(edges);
    json features = json::array();
    for (Eigen::Index r = 0; r < g.features().rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < g.features().cols(); ++c) row.push_back(g.features()(r, c));
      features.push_back(std::move(row));
    }
    jg["features"] = std::move(features);
    jg["label"] = g.label() ? json(*g.label()) : json(nullptr);
    json gt = json::array();
    if (i < data.ground_truth.size()) {
      for (const NodeMask& m : data.ground_truth[i]) gt.push_back(m.indices());
    }
    jg["ground_truth"] = std::move(gt);
    graphs.push_back(std::move(jg));
  }
  doc["graphs"] = std::move(graphs);
  return doc.dump(indent);
}

Dataset dataset_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("dataset JSON: ") + e.what());
  }
  try {
    Dataset data;
    data.num_classes = doc.at("num_classes").get<std::size_t>();
    data.feature_dim = doc.at("feature_dim").get<std::size_t>();
    for (const json& jg : doc.at("graphs")) {
      const auto n = jg.at("num_nodes").get<std::size_t>();
      std::vector<Edge> edges;
      for (const json& je : jg.at("edges")) {
        if (je.size() != 2) throw std::invalid_argument("dataset JSON: edge must have two endpoints");
        edges.push_back({je[0].get<NodeId>(), je[1].get<NodeId>()});
      }
      const json& jf = jg.at("features");
      if (jf.size() != n) throw std::invalid_argument("dataset JSON: feature row count != num_nodes");
      Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(data.feature_dim));
      for (std::size_t r = 0; r < n; ++r) {
        if (jf[r].size() != data.feature_dim) {
          throw std::invalid_argument("dataset JSON: feature row width != feature_dim");
        }
        for (std::size_t c = 0; c < data.feature_dim; ++c) {
          features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = jf[r][c].get<double>();
        }
      }
      std::optional<ClassId> label;
      if (jg.contains("label") && !jg["label"].is_null()) label = jg["label"].get<ClassId>();
      data.graphs.emplace_back(n, std::move(edges), std::move(features), label);

      std::vector<NodeMask> gt;
      if (jg.contains("ground_truth")) {
        for (const json& jm : jg["ground_truth"]) {
          gt.push_back(NodeMask::from_indices(n, jm.get<std::vector<NodeId>>()));
        }
      }
      data.ground_truth.push_back(std::move(gt));
    }
    data.validate();
    return data;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("dataset JSON: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  write_text_file(path, dataset_to_json(data));
}

Dataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_json(read_text_file(path));
}

}  // namespace geco
