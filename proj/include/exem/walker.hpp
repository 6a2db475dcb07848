#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "exem/dominating_set.hpp"
#include "exem/graph.hpp"

namespace exem {

// exem modes start every walk at a dominating node; the strict variant also
// insists (with bounded retries) that a second, distinct dominating node
// appears somewhere in the walk. uniform starts walks from every node and
// needs no dominating set.
enum class WalkMode { ExemRelaxed, ExemStrict, Uniform };

std::string_view to_string(WalkMode mode);
WalkMode walk_mode_from(std::string_view name);

struct WalkConfig {
  std::uint32_t walks_per_start = 10;  // replicas per start node
  std::uint32_t walk_length = 80;      // nodes per walk, counting the start
  WalkMode mode = WalkMode::ExemRelaxed;
  std::uint64_t seed = 1;
  // When nonzero, overrides walks_per_start: the total is spread over the
  // start nodes as evenly as possible (earlier starts get the remainder).
  std::uint64_t walks_total = 0;
  std::uint32_t workers = 1;
  std::uint32_t strict_max_retries = 8;
};

struct WalkCorpus {
  std::vector<std::vector<Graph::NodeId>> walks;
  WalkConfig config;
  // Seed the dominating set was grown from; absent in uniform mode.
  std::optional<std::uint64_t> ds_seed;
  // Strict mode only, aligned with walks: 1 where the walk was accepted
  // without a second dominating node after exhausting retries.
  std::vector<std::uint8_t> warned;
};

struct WalkStats {
  double fraction_with_second_dominating = 0.0;  // >= 2 distinct members seen
  double mean_length = 0.0;
  double start_coverage = 0.0;  // members that start at least one walk
};

// Walks are dealt per (start, replica) with an independent random stream
// each, so the corpus is identical for a given config at any worker count.
WalkCorpus generate_walks(const Graph& graph, const DominatingSet* ds,
                          const WalkConfig& config);

WalkStats walk_stats(const WalkCorpus& corpus, const DominatingSet& ds);

// Refreshes coverage after a local graph change: every dominating node in or
// adjacent to a changed node contributes a fresh batch of walks, and changed
// nodes that ended up uncovered join the set (each contributing a batch too).
// Untouched walks are carried over verbatim.
WalkCorpus update_walks_incremental(const WalkCorpus& corpus, const Graph& graph,
                                    DominatingSet& ds,
                                    const std::vector<Graph::NodeId>& changed_nodes,
                                    const WalkConfig& config);

// One walk per line, external node ids, space separated.
void save_corpus(const WalkCorpus& corpus, const Graph& graph,
                 const std::filesystem::path& path);
std::vector<std::vector<std::string>> load_corpus_sentences(
    const std::filesystem::path& path);

}  // namespace exem
