#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace exem {

// Undirected graph over densely indexed nodes. Construction normalizes the
// edge set: self-loops are dropped and parallel edges merged, so adjacency
// lists are strictly increasing and every edge appears in both lists.
// External string ids are retained for file I/O and for embedding modes that
// look at node names.
class Graph {
 public:
  using NodeId = std::uint32_t;

  Graph() = default;
  Graph(std::vector<std::string> names,
        const std::vector<std::pair<NodeId, NodeId>>& edges);

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {adjacency_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
  std::size_t max_degree() const;
  bool has_edge(NodeId u, NodeId v) const;

  const std::string& node_name(NodeId u) const { return names_[u]; }
  const std::vector<std::string>& node_names() const { return names_; }
  std::optional<NodeId> find_node(std::string_view name) const;

  // Canonical edge list: each {u, v} with u < v, ascending.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> name_index_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::size_t edge_count_ = 0;
};

// Multi-label assignment over graph nodes. Nodes absent from the map are
// unlabeled; a present node always carries at least one label.
class LabelMap {
 public:
  using NodeId = Graph::NodeId;

  std::uint32_t intern_label(std::string_view name);
  std::optional<std::uint32_t> find_label(std::string_view name) const;
  const std::string& label_name(std::uint32_t label) const { return label_names_[label]; }
  std::size_t label_count() const { return label_names_.size(); }

  // Merges into any existing assignment; stores sorted unique label ids.
  void assign(NodeId node, const std::vector<std::uint32_t>& labels);
  const std::vector<std::uint32_t>* labels_of(NodeId node) const;
  bool has_label(NodeId node, std::uint32_t label) const;

  std::size_t labeled_count() const { return node_labels_.size(); }
  std::vector<NodeId> labeled_nodes() const;  // ascending

 private:
  std::vector<std::string> label_names_;
  std::unordered_map<std::string, std::uint32_t> label_index_;
  std::unordered_map<NodeId, std::vector<std::uint32_t>> node_labels_;
};

struct SbmSpec {
  std::uint32_t nodes = 0;
  std::uint32_t communities = 1;
  double p_in = 0.0;   // edge probability within a community
  double p_out = 0.0;  // edge probability across communities
  std::uint64_t seed = 1;
};

// Edge-list text file: '#' comments, blank lines ignored, each data line is
// "u v" or "u v w" (weight ignored). Node ids are arbitrary tokens.
Graph load_graph(const std::filesystem::path& path);
void save_graph(const Graph& graph, const std::filesystem::path& path);

// Label file: "node_id labels" where labels is a comma-separated list.
LabelMap load_labels(const std::filesystem::path& path, const Graph& graph);
void save_labels(const LabelMap& labels, const Graph& graph,
                 const std::filesystem::path& path);

// Planted-partition generator. Nodes are named "0".."n-1", split into
// near-equal communities; the returned LabelMap tags each node with its
// community id. Deterministic for a given spec.
std::pair<Graph, LabelMap> generate_sbm(const SbmSpec& spec);

}  // namespace exem
