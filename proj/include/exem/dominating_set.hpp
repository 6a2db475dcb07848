#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "exem/graph.hpp"

namespace exem {

// An independent dominating set: every node is a member or adjacent to one,
// and no two members are adjacent. Remembers the seed it was grown from so
// downstream artifacts can record their provenance.
class DominatingSet {
 public:
  DominatingSet(std::vector<Graph::NodeId> members, std::size_t node_count,
                std::uint64_t seed);

  const std::vector<Graph::NodeId>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(Graph::NodeId u) const {
    return u < membership_.size() && membership_[u] != 0;
  }
  std::size_t node_count() const { return membership_.size(); }
  std::uint64_t seed() const { return seed_; }

  // Support for graphs that grew after the set was built.
  void extend_to(std::size_t node_count);
  void add_member(Graph::NodeId u);

 private:
  std::vector<Graph::NodeId> members_;  // ascending
  std::vector<char> membership_;
  std::uint64_t seed_ = 0;
};

struct DominatingSetReport {
  bool dominating = false;
  bool independent = false;
  std::vector<Graph::NodeId> uncovered;  // ascending
};

// Grows the set by repeatedly picking a uniformly random node from the pool
// of nodes that are neither chosen nor adjacent to a chosen node, until the
// pool empties. The result is dominating and independent by construction.
DominatingSet find_dominating_set(const Graph& graph, std::uint64_t seed);

DominatingSetReport verify_dominating_set(const Graph& graph,
                                          const DominatingSet& ds);

// One external node id per line; a leading "# seed N" comment preserves the
// growth seed across a round trip.
void save_dominating_set(const DominatingSet& ds, const Graph& graph,
                         const std::filesystem::path& path);
DominatingSet load_dominating_set(const std::filesystem::path& path,
                                  const Graph& graph);

}  // namespace exem
