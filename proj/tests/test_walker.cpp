#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "exem/dominating_set.hpp"
#include "exem/graph.hpp"
#include "exem/walker.hpp"
#include "test_util.hpp"

using namespace exem;
using testutil::TempDir;

namespace {

std::vector<std::string> names_upto(std::size_t n) {
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = std::to_string(i);
  return names;
}

Graph hub_tree() {
  return Graph({"A1", "A2", "A3", "A4", "A5", "A6"},
               {{0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
}

std::size_t distinct_members(const std::vector<Graph::NodeId>& walk,
                             const DominatingSet& ds) {
  std::set<Graph::NodeId> seen;
  for (auto u : walk)
    if (ds.contains(u)) seen.insert(u);
  return seen.size();
}

}  // namespace

TEST_CASE("walk mode names") {
  CHECK(to_string(WalkMode::ExemRelaxed) == "exem-relaxed");
  CHECK(walk_mode_from("exem-strict") == WalkMode::ExemStrict);
  CHECK(walk_mode_from("uniform") == WalkMode::Uniform);
  CHECK_THROWS_WITH_AS(walk_mode_from("levy"), doctest::Contains("unknown walk mode"),
                       std::runtime_error);
}

TEST_CASE("walks respect the graph and the dominating set") {
  Graph g = hub_tree();
  auto ds = find_dominating_set(g, 11);
  WalkConfig cfg;
  cfg.walks_per_start = 6;
  cfg.walk_length = 12;
  cfg.seed = 3;

  auto corpus = generate_walks(g, &ds, cfg);
  REQUIRE(corpus.walks.size() == ds.size() * 6);
  CHECK(corpus.ds_seed == ds.seed());

  for (const auto& walk : corpus.walks) {
    REQUIRE_FALSE(walk.empty());
    // Starts at a member; the next hop cannot be one (independence).
    CHECK(ds.contains(walk.front()));
    if (walk.size() >= 2) CHECK_FALSE(ds.contains(walk[1]));
    // Every consecutive pair is an edge.
    for (std::size_t i = 0; i + 1 < walk.size(); ++i)
      CHECK(g.has_edge(walk[i], walk[i + 1]));
    // Full length unless the walk died at a degree-0 node.
    if (walk.size() < cfg.walk_length) CHECK(g.degree(walk.back()) == 0);
  }
}

TEST_CASE("a middle start paces the whole path") {
  Graph path(names_upto(3), {{0, 1}, {1, 2}});
  DominatingSet ds({1}, 3, 0);
  WalkConfig cfg;
  cfg.walks_per_start = 4;
  cfg.walk_length = 5;
  auto corpus = generate_walks(path, &ds, cfg);
  REQUIRE(corpus.walks.size() == 4);
  for (const auto& walk : corpus.walks) {
    CHECK(walk.size() == 5);  // no dead ends anywhere on this path
    CHECK(walk.front() == 1);
  }
}

TEST_CASE("an isolated member contributes single-node walks") {
  Graph g(names_upto(3), {{1, 2}});
  auto ds = find_dominating_set(g, 2);
  REQUIRE(ds.contains(0));  // isolated nodes can only be covered by themselves
  WalkConfig cfg;
  cfg.walks_per_start = 5;
  cfg.walk_length = 9;
  auto corpus = generate_walks(g, &ds, cfg);
  std::size_t from_isolated = 0;
  for (const auto& walk : corpus.walks)
    if (walk.front() == 0) {
      ++from_isolated;
      CHECK(walk.size() == 1);
    }
  CHECK(from_isolated == 5);
}

TEST_CASE("strict mode retries for a second dominating node") {
  Graph g = hub_tree();
  DominatingSet ds({*g.find_node("A3"), *g.find_node("A5")}, g.node_count(), 0);
  WalkConfig cfg;
  cfg.mode = WalkMode::ExemStrict;
  cfg.walks_per_start = 20;
  cfg.walk_length = 10;
  cfg.seed = 7;

  auto corpus = generate_walks(g, &ds, cfg);
  REQUIRE(corpus.warned.size() == corpus.walks.size());
  std::size_t satisfied = 0;
  for (std::size_t i = 0; i < corpus.walks.size(); ++i) {
    if (corpus.warned[i])
      CHECK(distinct_members(corpus.walks[i], ds) < 2);
    else {
      CHECK(distinct_members(corpus.walks[i], ds) >= 2);
      ++satisfied;
    }
  }
  // On this graph the two hubs are three hops apart: most walks succeed.
  CHECK(satisfied > corpus.walks.size() / 2);

  SUBCASE("a single-member set can never satisfy strictness") {
    Graph path(names_upto(3), {{0, 1}, {1, 2}});
    DominatingSet lone({1}, 3, 0);
    WalkConfig strict;
    strict.mode = WalkMode::ExemStrict;
    strict.walks_per_start = 3;
    strict.walk_length = 4;
    auto warned_corpus = generate_walks(path, &lone, strict);
    for (auto w : warned_corpus.warned) CHECK(w == 1);
  }
}

TEST_CASE("uniform mode starts every node equally and takes no set") {
  Graph g = hub_tree();
  WalkConfig cfg;
  cfg.mode = WalkMode::Uniform;
  cfg.walks_per_start = 3;
  cfg.walk_length = 6;

  auto corpus = generate_walks(g, nullptr, cfg);
  CHECK(corpus.walks.size() == g.node_count() * 3);
  CHECK_FALSE(corpus.ds_seed.has_value());
  std::map<Graph::NodeId, int> starts;
  for (const auto& walk : corpus.walks) ++starts[walk.front()];
  for (Graph::NodeId u = 0; u < g.node_count(); ++u) CHECK(starts[u] == 3);

  auto ds = find_dominating_set(g, 1);
  CHECK_THROWS_WITH_AS(generate_walks(g, &ds, cfg),
                       doctest::Contains("takes no dominating set"),
                       std::runtime_error);
}

TEST_CASE("a total walk budget spreads evenly with remainder first") {
  Graph g = hub_tree();
  DominatingSet ds({*g.find_node("A1"), *g.find_node("A4"), *g.find_node("A6")},
                   g.node_count(), 0);
  WalkConfig cfg;
  cfg.walks_total = 7;
  cfg.walk_length = 3;
  auto corpus = generate_walks(g, &ds, cfg);
  REQUIRE(corpus.walks.size() == 7);
  std::map<Graph::NodeId, int> starts;
  for (const auto& walk : corpus.walks) ++starts[walk.front()];
  CHECK(starts[ds.members()[0]] == 3);  // 7 = 3 + 2 + 2
  CHECK(starts[ds.members()[1]] == 2);
  CHECK(starts[ds.members()[2]] == 2);
}

TEST_CASE("corpus generation is deterministic and worker-count invariant") {
  Graph g = hub_tree();
  auto ds = find_dominating_set(g, 4);
  WalkConfig cfg;
  cfg.walks_per_start = 8;
  cfg.walk_length = 15;
  cfg.seed = 21;

  auto a = generate_walks(g, &ds, cfg);
  auto b = generate_walks(g, &ds, cfg);
  CHECK(a.walks == b.walks);

  WalkConfig threaded = cfg;
  threaded.workers = 2;
  auto c = generate_walks(g, &ds, threaded);
  CHECK(a.walks == c.walks);

  WalkConfig other = cfg;
  other.seed = 22;
  auto d = generate_walks(g, &ds, other);
  CHECK(a.walks != d.walks);
}

TEST_CASE("walk generation validates its inputs") {
  Graph g = hub_tree();
  auto ds = find_dominating_set(g, 1);
  WalkConfig cfg;

  CHECK_THROWS_WITH_AS(generate_walks(Graph(), nullptr, cfg),
                       doctest::Contains("empty graph"), std::runtime_error);

  WalkConfig zero = cfg;
  zero.walk_length = 0;
  CHECK_THROWS_WITH_AS(generate_walks(g, &ds, zero),
                       doctest::Contains("walk length"), std::runtime_error);

  CHECK_THROWS_WITH_AS(generate_walks(g, nullptr, cfg),
                       doctest::Contains("require a non-empty dominating set"),
                       std::runtime_error);

  DominatingSet mismatched({0}, 3, 0);
  CHECK_THROWS_WITH_AS(generate_walks(g, &mismatched, cfg),
                       doctest::Contains("different node count"),
                       std::runtime_error);

  WalkConfig huge = cfg;
  huge.walks_total = 1ull << 24;
  huge.walk_length = 100;
  CHECK_THROWS_WITH_AS(generate_walks(g, &ds, huge),
                       doctest::Contains("corpus too large"), std::runtime_error);
}

TEST_CASE("walk statistics recount the corpus") {
  Graph path(names_upto(3), {{0, 1}, {1, 2}});
  DominatingSet ds({0, 2}, 3, 0);

  WalkCorpus corpus;
  corpus.config = WalkConfig{};
  corpus.walks = {{0, 1, 2}, {0}, {2, 1}};
  auto stats = walk_stats(corpus, ds);
  CHECK(stats.fraction_with_second_dominating == doctest::Approx(1.0 / 3.0));
  CHECK(stats.mean_length == doctest::Approx(2.0));
  CHECK(stats.start_coverage == doctest::Approx(1.0));

  SUBCASE("coverage sees only walk starts") {
    WalkCorpus partial;
    partial.walks = {{0, 1, 2}};
    CHECK(walk_stats(partial, ds).start_coverage == doctest::Approx(0.5));
  }

  SUBCASE("errors") {
    WalkCorpus empty;
    CHECK_THROWS_WITH_AS(walk_stats(empty, ds), doctest::Contains("empty corpus"),
                         std::runtime_error);
    DominatingSet none(std::vector<Graph::NodeId>{}, 3, 0);
    CHECK_THROWS_WITH_AS(walk_stats(corpus, none),
                         doctest::Contains("empty dominating set"),
                         std::runtime_error);
  }
}

TEST_CASE("incremental updates") {
  Graph g = hub_tree();
  auto ds = find_dominating_set(g, 17);
  WalkConfig cfg;
  cfg.walks_per_start = 4;
  cfg.walk_length = 8;
  cfg.seed = 17;
  auto corpus = generate_walks(g, &ds, cfg);

  SUBCASE("no changed nodes leaves the corpus untouched") {
    auto ds_copy = ds;
    auto updated = update_walks_incremental(corpus, g, ds_copy, {}, corpus.config);
    CHECK(updated.walks == corpus.walks);
    CHECK(updated.warned == corpus.warned);
    CHECK(ds_copy.members() == ds.members());
  }

  SUBCASE("a new leaf under a member refreshes only that member") {
    // Grow the graph by one node hanging off a dominating node.
    Graph::NodeId member = ds.members()[0];
    auto names = g.node_names();
    names.push_back("N");
    auto edges = g.edges();
    edges.emplace_back(member, Graph::NodeId{6});
    Graph grown(names, edges);

    auto ds_copy = ds;
    auto updated = update_walks_incremental(corpus, grown, ds_copy, {6}, cfg);
    CHECK(ds_copy.members() == ds.members());  // leaf is covered, set unchanged
    REQUIRE(updated.walks.size() == corpus.walks.size() + cfg.walks_per_start);
    // Old walks survive verbatim as a prefix.
    for (std::size_t i = 0; i < corpus.walks.size(); ++i)
      CHECK(updated.walks[i] == corpus.walks[i]);
    for (std::size_t i = corpus.walks.size(); i < updated.walks.size(); ++i) {
      CHECK(updated.walks[i].front() == member);
      for (std::size_t j = 0; j + 1 < updated.walks[i].size(); ++j)
        CHECK(grown.has_edge(updated.walks[i][j], updated.walks[i][j + 1]));
    }
  }

  SUBCASE("a new isolated node joins the set with single-node walks") {
    auto names = g.node_names();
    names.push_back("loner");
    Graph grown(names, g.edges());

    auto ds_copy = ds;
    auto updated = update_walks_incremental(corpus, grown, ds_copy, {6}, cfg);
    CHECK(ds_copy.contains(6));
    REQUIRE(updated.walks.size() == corpus.walks.size() + cfg.walks_per_start);
    for (std::size_t i = corpus.walks.size(); i < updated.walks.size(); ++i)
      CHECK(updated.walks[i] == std::vector<Graph::NodeId>{6});
  }

  SUBCASE("successive updates draw fresh streams") {
    Graph::NodeId member = ds.members()[0];
    auto ds_copy = ds;
    auto once = update_walks_incremental(corpus, g, ds_copy, {member}, cfg);
    auto twice = update_walks_incremental(once, g, ds_copy, {member}, cfg);
    REQUIRE(twice.walks.size() == corpus.walks.size() + 2 * cfg.walks_per_start);
    std::vector<std::vector<Graph::NodeId>> first_batch(
        once.walks.begin() + corpus.walks.size(), once.walks.end());
    std::vector<std::vector<Graph::NodeId>> second_batch(
        twice.walks.begin() + once.walks.size(), twice.walks.end());
    CHECK(first_batch != second_batch);
  }

  SUBCASE("validation") {
    auto ds_copy = ds;
    WalkConfig uniform = cfg;
    uniform.mode = WalkMode::Uniform;
    CHECK_THROWS_WITH_AS(update_walks_incremental(corpus, g, ds_copy, {}, uniform),
                         doctest::Contains("exem walk modes only"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(update_walks_incremental(corpus, g, ds_copy, {42}, cfg),
                         doctest::Contains("out of range"), std::runtime_error);
  }
}

TEST_CASE("corpus files") {
  TempDir tmp;
  Graph g = hub_tree();
  auto ds = find_dominating_set(g, 8);
  WalkConfig cfg;
  cfg.walks_per_start = 3;
  cfg.walk_length = 7;
  auto corpus = generate_walks(g, &ds, cfg);

  auto path = tmp.file("walks.txt");
  save_corpus(corpus, g, path);
  auto sentences = load_corpus_sentences(path);
  REQUIRE(sentences.size() == corpus.walks.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    REQUIRE(sentences[i].size() == corpus.walks[i].size());
    for (std::size_t j = 0; j < sentences[i].size(); ++j)
      CHECK(sentences[i][j] == g.node_name(corpus.walks[i][j]));
  }
}
