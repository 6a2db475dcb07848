#include "exem/walker.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "exem/rng.hpp"
#include "exem/text_io.hpp"

namespace exem {

namespace {

constexpr std::uint64_t kWalkSalt = 0x3a1cu;
constexpr std::uint64_t kUpdateSalt = 0x9e2fu;

std::vector<Graph::NodeId> random_walk(const Graph& graph, Graph::NodeId start,
                                       std::uint32_t length, Rng& rng) {
  std::vector<Graph::NodeId> walk;
  walk.reserve(length);
  walk.push_back(start);
  Graph::NodeId cur = start;
  while (walk.size() < length) {
    auto nb = graph.neighbors(cur);
    if (nb.empty()) break;  // dead end: the walk stops early
    cur = nb[rng.next_below(nb.size())];
    walk.push_back(cur);
  }
  return walk;
}

bool has_two_distinct_members(const std::vector<Graph::NodeId>& walk,
                              const DominatingSet& ds) {
  bool seen = false;
  Graph::NodeId first = 0;
  for (Graph::NodeId u : walk) {
    if (!ds.contains(u)) continue;
    if (!seen) {
      seen = true;
      first = u;
    } else if (u != first) {
      return true;
    }
  }
  return false;
}

// One walk slot. Each (start, replica) pair owns an independent stream, so
// the corpus does not depend on scheduling.
std::vector<Graph::NodeId> make_walk(const Graph& graph, const DominatingSet* ds,
                                     const WalkConfig& config, std::uint64_t salt,
                                     Graph::NodeId start, std::uint64_t replica,
                                     std::uint8_t* warned) {
  Rng rng(mix_seed({config.seed, salt, start, replica}));
  auto walk = random_walk(graph, start, config.walk_length, rng);
  if (config.mode == WalkMode::ExemStrict) {
    std::uint32_t retries = 0;
    while (!has_two_distinct_members(walk, *ds) &&
           retries < config.strict_max_retries) {
      walk = random_walk(graph, start, config.walk_length, rng);
      ++retries;
    }
    if (warned && !has_two_distinct_members(walk, *ds)) *warned = 1;
  }
  return walk;
}

}  // namespace

std::string_view to_string(WalkMode mode) {
  switch (mode) {
    case WalkMode::ExemRelaxed: return "exem-relaxed";
    case WalkMode::ExemStrict: return "exem-strict";
    case WalkMode::Uniform: return "uniform";
  }
  return "?";
}

WalkMode walk_mode_from(std::string_view name) {
  if (name == "exem-relaxed") return WalkMode::ExemRelaxed;
  if (name == "exem-strict") return WalkMode::ExemStrict;
  if (name == "uniform") return WalkMode::Uniform;
  throw std::runtime_error("unknown walk mode '" + std::string(name) +
                           "' (expected exem-relaxed, exem-strict or uniform)");
}

WalkCorpus generate_walks(const Graph& graph, const DominatingSet* ds,
                          const WalkConfig& config) {
  if (graph.node_count() == 0)
    throw std::runtime_error("cannot walk an empty graph");
  if (config.walk_length == 0)
    throw std::runtime_error("walk length must be positive");

  const bool exem = config.mode != WalkMode::Uniform;
  if (exem) {
    if (!ds || ds->members().empty())
      throw std::runtime_error("exem walk modes require a non-empty dominating set");
    if (ds->node_count() != graph.node_count())
      throw std::runtime_error("dominating set built for a different node count");
  } else if (ds) {
    throw std::runtime_error("uniform walk mode takes no dominating set");
  }

  std::vector<Graph::NodeId> starts;
  if (exem) {
    starts = ds->members();
  } else {
    starts.resize(graph.node_count());
    std::iota(starts.begin(), starts.end(), 0);
  }

  std::vector<std::uint64_t> replicas(starts.size(), config.walks_per_start);
  if (config.walks_total > 0) {
    const std::uint64_t base = config.walks_total / starts.size();
    const std::uint64_t rem = config.walks_total % starts.size();
    for (std::size_t i = 0; i < starts.size(); ++i)
      replicas[i] = base + (i < rem ? 1 : 0);
  }
  std::vector<std::uint64_t> offsets(starts.size() + 1, 0);
  for (std::size_t i = 0; i < starts.size(); ++i)
    offsets[i + 1] = offsets[i] + replicas[i];
  const std::uint64_t total = offsets.back();
  if (total * config.walk_length > (1ull << 28))
    throw std::runtime_error("walk corpus too large (" + std::to_string(total) +
                             " walks of length " + std::to_string(config.walk_length) + ")");

  WalkCorpus corpus;
  corpus.config = config;
  if (exem) corpus.ds_seed = ds->seed();
  corpus.walks.resize(total);
  const bool strict = config.mode == WalkMode::ExemStrict;
  if (strict) corpus.warned.assign(total, 0);

  auto run_starts = [&](std::size_t begin, std::size_t end) {
    for (std::size_t si = begin; si < end; ++si)
      for (std::uint64_t r = 0; r < replicas[si]; ++r) {
        const std::uint64_t slot = offsets[si] + r;
        std::uint8_t warned = 0;
        corpus.walks[slot] =
            make_walk(graph, ds, config, kWalkSalt, starts[si], r, &warned);
        if (strict) corpus.warned[slot] = warned;
      }
  };

  const std::uint32_t workers =
      std::max<std::uint32_t>(1, std::min<std::uint32_t>(
                                     config.workers,
                                     static_cast<std::uint32_t>(starts.size())));
  if (workers == 1) {
    run_starts(0, starts.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (starts.size() + workers - 1) / workers;
    for (std::uint32_t w = 0; w < workers; ++w) {
      std::size_t b = w * chunk;
      std::size_t e = std::min(starts.size(), b + chunk);
      if (b < e) pool.emplace_back(run_starts, b, e);
    }
    for (auto& t : pool) t.join();
  }

  if (strict) {
    std::uint64_t warned_count =
        std::count(corpus.warned.begin(), corpus.warned.end(), std::uint8_t{1});
    if (warned_count > 0)
      std::fprintf(stderr,
                   "warning: %llu of %llu strict walks kept without a second "
                   "dominating node after %u retries\n",
                   static_cast<unsigned long long>(warned_count),
                   static_cast<unsigned long long>(total),
                   config.strict_max_retries);
  }
  return corpus;
}

WalkStats walk_stats(const WalkCorpus& corpus, const DominatingSet& ds) {
  if (corpus.walks.empty())
    throw std::runtime_error("cannot compute statistics of an empty corpus");
  if (ds.members().empty())
    throw std::runtime_error("cannot compute statistics against an empty dominating set");

  std::size_t with_second = 0;
  std::size_t total_length = 0;
  std::vector<char> started(ds.node_count(), 0);
  for (const auto& walk : corpus.walks) {
    if (has_two_distinct_members(walk, ds)) ++with_second;
    total_length += walk.size();
    if (!walk.empty() && ds.contains(walk.front())) started[walk.front()] = 1;
  }
  std::size_t covered_starts = 0;
  for (Graph::NodeId m : ds.members()) covered_starts += started[m] ? 1 : 0;

  WalkStats stats;
  stats.fraction_with_second_dominating =
      static_cast<double>(with_second) / static_cast<double>(corpus.walks.size());
  stats.mean_length =
      static_cast<double>(total_length) / static_cast<double>(corpus.walks.size());
  stats.start_coverage =
      static_cast<double>(covered_starts) / static_cast<double>(ds.size());
  return stats;
}

WalkCorpus update_walks_incremental(const WalkCorpus& corpus, const Graph& graph,
                                    DominatingSet& ds,
                                    const std::vector<Graph::NodeId>& changed_nodes,
                                    const WalkConfig& config) {
  if (config.mode == WalkMode::Uniform)
    throw std::runtime_error("incremental update applies to exem walk modes only");
  for (Graph::NodeId c : changed_nodes)
    if (c >= graph.node_count())
      throw std::runtime_error("changed node " + std::to_string(c) + " out of range");

  ds.extend_to(graph.node_count());

  std::vector<Graph::NodeId> changed(changed_nodes);
  std::sort(changed.begin(), changed.end());
  changed.erase(std::unique(changed.begin(), changed.end()), changed.end());

  // A changed node left uncovered (e.g. freshly added with no dominating
  // neighbor) joins the set so its neighborhood gets walk coverage.
  for (Graph::NodeId c : changed) {
    if (ds.contains(c)) continue;
    bool covered = false;
    for (Graph::NodeId v : graph.neighbors(c))
      if (ds.contains(v)) {
        covered = true;
        break;
      }
    if (!covered) ds.add_member(c);
  }

  std::vector<Graph::NodeId> affected;
  for (Graph::NodeId c : changed) {
    if (ds.contains(c)) affected.push_back(c);
    for (Graph::NodeId v : graph.neighbors(c))
      if (ds.contains(v)) affected.push_back(v);
  }
  std::sort(affected.begin(), affected.end());
  affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

  WalkCorpus out = corpus;
  out.config = config;
  const bool strict = config.mode == WalkMode::ExemStrict;
  if (strict) out.warned.resize(corpus.walks.size(), 0);

  // Fold the current corpus size into the stream salt so repeated updates
  // never reuse a stream.
  const std::uint64_t salt = mix_seed({kUpdateSalt, corpus.walks.size()});
  for (Graph::NodeId m : affected) {
    for (std::uint64_t r = 0; r < config.walks_per_start; ++r) {
      std::uint8_t warned = 0;
      out.walks.push_back(make_walk(graph, &ds, config, salt, m, r, &warned));
      if (strict) out.warned.push_back(warned);
    }
  }
  return out;
}

void save_corpus(const WalkCorpus& corpus, const Graph& graph,
                 const std::filesystem::path& path) {
  std::string out;
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) out += ' ';
      out += graph.node_name(walk[i]);
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::vector<std::vector<std::string>> load_corpus_sentences(
    const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<std::string>> sentences;
  for (const auto& line : lines) {
    auto toks = split_whitespace(line);
    if (toks.empty()) continue;
    std::vector<std::string> sent;
    sent.reserve(toks.size());
    for (auto t : toks) sent.emplace_back(t);
    sentences.push_back(std::move(sent));
  }
  return sentences;
}

}  // namespace exem
