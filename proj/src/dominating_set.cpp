#include "exem/dominating_set.hpp"

#include <algorithm>
#include <stdexcept>

#include "exem/rng.hpp"
#include "exem/text_io.hpp"

namespace exem {

namespace {
constexpr std::uint64_t kDomsSalt = 0xd035u;
}

DominatingSet::DominatingSet(std::vector<Graph::NodeId> members,
                             std::size_t node_count, std::uint64_t seed)
    : members_(std::move(members)), membership_(node_count, 0), seed_(seed) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  for (auto m : members_) {
    if (m >= node_count)
      throw std::runtime_error("dominating set member out of range");
    membership_[m] = 1;
  }
}

void DominatingSet::extend_to(std::size_t node_count) {
  if (node_count > membership_.size()) membership_.resize(node_count, 0);
}

void DominatingSet::add_member(Graph::NodeId u) {
  if (u >= membership_.size())
    throw std::runtime_error("dominating set member out of range");
  if (membership_[u]) return;
  membership_[u] = 1;
  members_.insert(std::lower_bound(members_.begin(), members_.end(), u), u);
}

DominatingSet find_dominating_set(const Graph& graph, std::uint64_t seed) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw std::runtime_error("cannot build dominating set of empty graph");

  // Candidate pool with O(1) removal: position[u] is u's slot in candidates,
  // or npos once removed.
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<Graph::NodeId> candidates(n);
  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) {
    candidates[i] = static_cast<Graph::NodeId>(i);
    position[i] = i;
  }
  auto remove = [&](Graph::NodeId u) {
    std::size_t pos = position[u];
    if (pos == npos) return;
    Graph::NodeId last = candidates.back();
    candidates[pos] = last;
    position[last] = pos;
    candidates.pop_back();
    position[u] = npos;
  };

  Rng rng(mix_seed({seed, kDomsSalt}));
  std::vector<Graph::NodeId> members;
  while (!candidates.empty()) {
    Graph::NodeId pick = candidates[rng.next_below(candidates.size())];
    members.push_back(pick);
    remove(pick);
    for (Graph::NodeId v : graph.neighbors(pick)) remove(v);
  }
  return DominatingSet(std::move(members), n, seed);
}

DominatingSetReport verify_dominating_set(const Graph& graph,
                                          const DominatingSet& ds) {
  const std::size_t n = graph.node_count();
  if (ds.node_count() != n)
    throw std::runtime_error("dominating set built for a different node count");

  DominatingSetReport report;
  std::vector<char> covered(n, 0);
  report.independent = true;
  for (Graph::NodeId m : ds.members()) {
    covered[m] = 1;
    for (Graph::NodeId v : graph.neighbors(m)) {
      covered[v] = 1;
      if (ds.contains(v)) report.independent = false;
    }
  }
  for (std::size_t u = 0; u < n; ++u)
    if (!covered[u]) report.uncovered.push_back(static_cast<Graph::NodeId>(u));
  report.dominating = report.uncovered.empty();
  return report;
}

void save_dominating_set(const DominatingSet& ds, const Graph& graph,
                         const std::filesystem::path& path) {
  std::string out = "# seed " + std::to_string(ds.seed()) + "\n";
  for (Graph::NodeId m : ds.members()) {
    out += graph.node_name(m);
    out += '\n';
  }
  write_text_atomic(path, out);
}

DominatingSet load_dominating_set(const std::filesystem::path& path,
                                  const Graph& graph) {
  const auto lines = read_lines(path);
  std::uint64_t seed = 0;
  std::vector<Graph::NodeId> members;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (!line.empty() && line[0] == '#') {
      auto toks = split_whitespace(line.substr(1));
      if (toks.size() == 2 && toks[0] == "seed") seed = parse_u64(toks[1], "seed");
      continue;
    }
    auto tok = trim(line);
    if (tok.empty()) continue;
    auto node = graph.find_node(tok);
    if (!node)
      throw std::runtime_error(path.string() + ":" + std::to_string(ln + 1) +
                               ": unknown node '" + std::string(tok) + "'");
    members.push_back(*node);
  }
  if (members.empty())
    throw std::runtime_error(path.string() + ": empty dominating set");
  return DominatingSet(std::move(members), graph.node_count(), seed);
}

}  // namespace exem
