#include "exem/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "exem/rng.hpp"
#include "exem/text_io.hpp"

namespace exem {

Graph::Graph(std::vector<std::string> names,
             const std::vector<std::pair<NodeId, NodeId>>& edges)
    : names_(std::move(names)) {
  const std::size_t n = names_.size();
  name_index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = name_index_.emplace(names_[i], static_cast<NodeId>(i));
    if (!fresh) throw std::runtime_error("duplicate node id '" + names_[i] + "'");
  }

  std::vector<std::vector<NodeId>> adj(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::runtime_error("edge endpoint out of range");
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  offsets_.assign(n + 1, 0);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& a = adj[i];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    total += a.size();
    offsets_[i + 1] = total;
  }
  adjacency_.reserve(total);
  for (auto& a : adj) adjacency_.insert(adjacency_.end(), a.begin(), a.end());
  edge_count_ = total / 2;
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < node_count(); ++i) best = std::max(best, degree(static_cast<NodeId>(i)));
  return best;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::optional<Graph::NodeId> Graph::find_node(std::string_view name) const {
  auto it = name_index_.find(std::string(name));
  if (it == name_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<Graph::NodeId, Graph::NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < node_count(); ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

std::uint32_t LabelMap::intern_label(std::string_view name) {
  auto it = label_index_.find(std::string(name));
  if (it != label_index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(label_names_.size());
  label_names_.emplace_back(name);
  label_index_.emplace(label_names_.back(), id);
  return id;
}

std::optional<std::uint32_t> LabelMap::find_label(std::string_view name) const {
  auto it = label_index_.find(std::string(name));
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

void LabelMap::assign(NodeId node, const std::vector<std::uint32_t>& labels) {
  if (labels.empty()) throw std::runtime_error("empty label list for node");
  for (auto l : labels)
    if (l >= label_names_.size()) throw std::runtime_error("unknown label id");
  auto& slot = node_labels_[node];
  slot.insert(slot.end(), labels.begin(), labels.end());
  std::sort(slot.begin(), slot.end());
  slot.erase(std::unique(slot.begin(), slot.end()), slot.end());
}

const std::vector<std::uint32_t>* LabelMap::labels_of(NodeId node) const {
  auto it = node_labels_.find(node);
  if (it == node_labels_.end()) return nullptr;
  return &it->second;
}

bool LabelMap::has_label(NodeId node, std::uint32_t label) const {
  const auto* ls = labels_of(node);
  return ls && std::binary_search(ls->begin(), ls->end(), label);
}

std::vector<Graph::NodeId> LabelMap::labeled_nodes() const {
  std::vector<NodeId> out;
  out.reserve(node_labels_.size());
  for (const auto& [node, _] : node_labels_) out.push_back(node);
  std::sort(out.begin(), out.end());
  return out;
}

Graph load_graph(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<std::string> names;
  std::unordered_map<std::string, Graph::NodeId> index;
  auto intern = [&](std::string_view tok) {
    auto it = index.find(std::string(tok));
    if (it != index.end()) return it->second;
    auto id = static_cast<Graph::NodeId>(names.size());
    names.emplace_back(tok);
    index.emplace(names.back(), id);
    return id;
  };

  std::vector<std::pair<Graph::NodeId, Graph::NodeId>> pairs;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (!line.empty() && line[0] == '#') continue;
    auto toks = split_whitespace(line);
    if (toks.empty()) continue;
    if (toks.size() < 2 || toks.size() > 3) {
      std::ostringstream msg;
      msg << path.string() << ":" << (ln + 1) << ": expected 'u v [weight]', got "
          << toks.size() << " token(s)";
      throw std::runtime_error(msg.str());
    }
    // Sequenced explicitly: argument evaluation order would otherwise decide
    // which endpoint interns first, making node numbering compiler-dependent.
    const auto u = intern(toks[0]);
    const auto v = intern(toks[1]);
    pairs.emplace_back(u, v);
  }
  if (names.empty())
    throw std::runtime_error(path.string() + ": no edges or nodes");
  return Graph(std::move(names), pairs);
}

void save_graph(const Graph& graph, const std::filesystem::path& path) {
  std::string out;
  for (auto [u, v] : graph.edges()) {
    out += graph.node_name(u);
    out += ' ';
    out += graph.node_name(v);
    out += '\n';
  }
  // An isolated node has no edge line to appear in; a self-loop line keeps it
  // in the file and loads back as the same isolated node.
  for (Graph::NodeId u = 0; u < graph.node_count(); ++u) {
    if (graph.degree(u) == 0) {
      out += graph.node_name(u);
      out += ' ';
      out += graph.node_name(u);
      out += '\n';
    }
  }
  write_text_atomic(path, out);
}

LabelMap load_labels(const std::filesystem::path& path, const Graph& graph) {
  const auto lines = read_lines(path);
  LabelMap map;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (!line.empty() && line[0] == '#') continue;
    if (trim(line).empty()) continue;
    auto toks = split_whitespace(line);
    auto where = [&] {
      std::ostringstream msg;
      msg << path.string() << ":" << (ln + 1);
      return msg.str();
    };
    if (toks.size() != 2)
      throw std::runtime_error(where() + ": expected 'node labels', got " +
                               std::to_string(toks.size()) + " token(s)");
    auto node = graph.find_node(toks[0]);
    if (!node)
      throw std::runtime_error(where() + ": unknown node '" + std::string(toks[0]) + "'");
    std::vector<std::uint32_t> labels;
    for (auto part : split_on(toks[1], ',')) {
      auto name = trim(part);
      if (name.empty())
        throw std::runtime_error(where() + ": empty label for node '" +
                                 std::string(toks[0]) + "'");
      labels.push_back(map.intern_label(name));
    }
    map.assign(*node, labels);
  }
  return map;
}

void save_labels(const LabelMap& labels, const Graph& graph,
                 const std::filesystem::path& path) {
  std::string out;
  for (auto node : labels.labeled_nodes()) {
    out += graph.node_name(node);
    out += ' ';
    const auto& ls = *labels.labels_of(node);
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (i) out += ',';
      out += labels.label_name(ls[i]);
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::pair<Graph, LabelMap> generate_sbm(const SbmSpec& spec) {
  if (spec.nodes == 0) throw std::runtime_error("sbm: node count must be positive");
  if (spec.communities == 0 || spec.communities > spec.nodes)
    throw std::runtime_error("sbm: community count must be in [1, nodes]");
  if (spec.p_in < 0.0 || spec.p_in > 1.0 || spec.p_out < 0.0 || spec.p_out > 1.0)
    throw std::runtime_error("sbm: edge probabilities must be in [0, 1]");

  const std::uint32_t n = spec.nodes;
  const std::uint32_t k = spec.communities;
  // Near-equal split: the first n % k communities get one extra node.
  std::vector<std::uint32_t> community(n);
  {
    std::uint32_t node = 0;
    for (std::uint32_t c = 0; c < k; ++c) {
      std::uint32_t size = n / k + (c < n % k ? 1 : 0);
      for (std::uint32_t i = 0; i < size; ++i) community[node++] = c;
    }
  }

  std::vector<std::string> names(n);
  for (std::uint32_t i = 0; i < n; ++i) names[i] = std::to_string(i);

  Rng rng(mix_seed({spec.seed, 0x5b5du}));
  std::vector<std::pair<Graph::NodeId, Graph::NodeId>> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      double p = community[i] == community[j] ? spec.p_in : spec.p_out;
      if (rng.next_unit() < p) edges.emplace_back(i, j);
    }
  }

  Graph graph(std::move(names), edges);
  LabelMap labels;
  for (std::uint32_t c = 0; c < k; ++c) labels.intern_label(std::to_string(c));
  for (std::uint32_t i = 0; i < n; ++i) labels.assign(i, {community[i]});
  return {std::move(graph), std::move(labels)};
}

}  // namespace exem
