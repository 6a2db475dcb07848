#include "exem/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "exem/rng.hpp"
#include "exem/text_io.hpp"

namespace exem {

namespace {

constexpr std::uint64_t kClassifySalt = 0xc1a5u;
constexpr std::uint64_t kLinkSalt = 0x11e6u;
constexpr std::uint64_t kEmbedSalt = 0xe3bdu;

double mean_of(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace

void EvalReport::set_metric(const std::string& name, std::vector<double> values) {
  if (values.empty()) throw std::runtime_error("metric '" + name + "' has no values");
  if (!means.count(name)) metric_names.push_back(name);
  means[name] = mean_of(values);
  series[name] = std::move(values);
}

double EvalReport::mean(const std::string& name) const {
  auto it = means.find(name);
  if (it == means.end()) throw std::runtime_error("no metric '" + name + "'");
  return it->second;
}

std::string format_report(const EvalReport& report) {
  std::string out;
  out += "task=" + report.task + "\n";
  out += "split_ratio=" + format_double(report.split_ratio) + "\n";
  out += "repetitions=" + std::to_string(report.repetitions) + "\n";
  out += "seed=" + std::to_string(report.seed) + "\n";
  for (const auto& [key, value] : report.notes) out += key + "=" + value + "\n";
  for (const auto& name : report.metric_names) {
    out += name + "=" + format_double(report.means.at(name)) + "\n";
    auto it = report.series.find(name);
    if (it != report.series.end() && it->second.size() > 1) {
      out += name + "_reps=";
      for (std::size_t i = 0; i < it->second.size(); ++i) {
        if (i) out += ',';
        out += format_double(it->second[i]);
      }
      out += '\n';
    }
  }
  return out;
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  write_text_atomic(path, format_report(report));
}

EvalReport read_report(const std::filesystem::path& path) {
  EvalReport report;
  const auto lines = read_lines(path);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = trim(lines[ln]);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::runtime_error(path.string() + ":" + std::to_string(ln + 1) +
                               ": expected key=value");
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key == "task") {
      report.task = value;
    } else if (key == "split_ratio") {
      report.split_ratio = parse_double(value, "split_ratio");
    } else if (key == "repetitions") {
      report.repetitions = parse_u64(value, "repetitions");
    } else if (key == "seed") {
      report.seed = parse_u64(value, "seed");
    } else if (key.size() > 5 && key.substr(key.size() - 5) == "_reps") {
      std::string name = key.substr(0, key.size() - 5);
      std::vector<double> values;
      for (auto part : split_on(value, ','))
        values.push_back(parse_double(trim(part), "metric value"));
      report.series[name] = std::move(values);
    } else {
      // Numeric values are metrics, anything else is a note.
      double v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec == std::errc() && ptr == value.data() + value.size()) {
        if (!report.means.count(key)) report.metric_names.push_back(key);
        report.means[key] = v;
      } else {
        report.notes.emplace_back(key, value);
      }
    }
  }
  return report;
}

EvalReport evaluate_classification(const EmbeddingMatrix& embeddings,
                                   const Graph& graph, const LabelMap& labels,
                                   const ClassificationOptions& options) {
  if (!(options.train_ratio > 0.0 && options.train_ratio < 1.0))
    throw std::runtime_error("train ratio must lie strictly between 0 and 1");
  if (options.repetitions == 0)
    throw std::runtime_error("need at least one repetition");

  const auto nodes = labels.labeled_nodes();
  if (nodes.size() < 2)
    throw std::runtime_error("need at least two labeled nodes");

  const std::size_t dim = embeddings.dimension();
  std::vector<std::size_t> row_of(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto row = embeddings.find(graph.node_name(nodes[i]));
    if (!row)
      throw std::runtime_error("labeled node '" + graph.node_name(nodes[i]) +
                               "' missing from the embedding");
    row_of[i] = *row;
  }

  std::vector<std::uint32_t> universe;
  for (auto n : nodes) {
    const auto& ls = *labels.labels_of(n);
    universe.insert(universe.end(), ls.begin(), ls.end());
  }
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());

  std::vector<double> micro_reps, macro_reps;
  std::vector<std::size_t> order(nodes.size());
  for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
    Rng rng(mix_seed({options.seed, kClassifySalt, rep}));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    const auto train_count = std::clamp<std::size_t>(
        static_cast<std::size_t>(
            std::llround(options.train_ratio * static_cast<double>(nodes.size()))),
        1, nodes.size() - 1);

    std::vector<double> train_features(train_count * dim);
    for (std::size_t i = 0; i < train_count; ++i) {
      auto src = embeddings.row(row_of[order[i]]);
      std::copy(src.begin(), src.end(), train_features.begin() + i * dim);
    }

    std::vector<std::optional<LogisticRegression>> classifiers(universe.size());
    std::vector<std::uint8_t> targets(train_count);
    for (std::size_t li = 0; li < universe.size(); ++li) {
      bool any_positive = false;
      for (std::size_t i = 0; i < train_count; ++i) {
        targets[i] = labels.has_label(nodes[order[i]], universe[li]) ? 1 : 0;
        any_positive |= targets[i] != 0;
      }
      // A label absent from the training split cannot be learned; it simply
      // scores zero for every test node.
      if (any_positive)
        classifiers[li] =
            LogisticRegression::fit(train_features, targets, dim, options.logreg);
    }

    std::vector<std::vector<std::uint32_t>> truth, predicted;
    std::vector<std::pair<double, std::uint32_t>> scored(universe.size());
    for (std::size_t i = train_count; i < nodes.size(); ++i) {
      const auto node = nodes[order[i]];
      auto x = embeddings.row(row_of[order[i]]);
      for (std::size_t li = 0; li < universe.size(); ++li) {
        const double p =
            classifiers[li] ? classifiers[li]->probability(x) : 0.0;
        scored[li] = {p, universe[li]};
      }
      std::vector<std::uint32_t> pred;
      if (options.fixed_threshold) {
        for (const auto& [p, label] : scored)
          if (p >= options.threshold) pred.push_back(label);
      } else {
        const std::size_t k = labels.labels_of(node)->size();
        std::partial_sort(scored.begin(), scored.begin() + k, scored.end(),
                          [](const auto& a, const auto& b) {
                            if (a.first != b.first) return a.first > b.first;
                            return a.second < b.second;
                          });
        for (std::size_t t = 0; t < k; ++t) pred.push_back(scored[t].second);
        std::sort(pred.begin(), pred.end());
      }
      truth.push_back(*labels.labels_of(node));
      predicted.push_back(std::move(pred));
    }

    const auto f1 = f1_scores(truth, predicted);
    micro_reps.push_back(f1.micro);
    macro_reps.push_back(f1.macro);
  }

  EvalReport report;
  report.task = "classification";
  report.split_ratio = options.train_ratio;
  report.repetitions = options.repetitions;
  report.seed = options.seed;
  report.set_metric("micro_f1", std::move(micro_reps));
  report.set_metric("macro_f1", std::move(macro_reps));
  return report;
}

EvalReport evaluate_link_prediction(const Graph& graph, const EmbedFn& embed,
                                    const LinkPredictionOptions& options) {
  if (!(options.hide_ratio > 0.0 && options.hide_ratio < 1.0))
    throw std::runtime_error("hide ratio must lie strictly between 0 and 1");
  if (options.repetitions == 0)
    throw std::runtime_error("need at least one repetition");

  const auto all_edges = graph.edges();
  const std::size_t m = all_edges.size();
  const std::size_t n = graph.node_count();
  const auto hide = static_cast<std::size_t>(
      std::llround(options.hide_ratio * static_cast<double>(m)));
  if (hide < 2 || hide + 1 > m)
    throw std::runtime_error("cannot hide " + std::to_string(hide) + " of " +
                             std::to_string(m) +
                             " edges; need at least two hidden and one kept");
  const std::size_t possible_non_edges = n * (n - 1) / 2 - m;
  if (possible_non_edges < hide)
    throw std::runtime_error("graph too dense to sample " + std::to_string(hide) +
                             " non-edges");

  std::vector<double> auc_reps;
  for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
    Rng rng(mix_seed({options.seed, kLinkSalt, rep}));
    auto edges = all_edges;
    rng.shuffle(edges);
    std::vector<std::pair<Graph::NodeId, Graph::NodeId>> hidden(
        edges.begin(), edges.begin() + hide);
    std::vector<std::pair<Graph::NodeId, Graph::NodeId>> residual(
        edges.begin() + hide, edges.end());

    Graph residual_graph(graph.node_names(), residual);
    const EmbeddingMatrix emb =
        embed(residual_graph, mix_seed({options.seed, kEmbedSalt, rep}));
    if (emb.dimension() == 0) throw std::runtime_error("embedding has dimension 0");

    // Walks need not visit every node of the residual graph; missing nodes
    // fall back to the zero vector.
    const std::vector<double> zero(emb.dimension(), 0.0);
    std::size_t missing = 0;
    auto vector_of = [&](Graph::NodeId u) -> std::span<const double> {
      auto row = emb.find(graph.node_name(u));
      if (!row) {
        ++missing;
        return zero;
      }
      return emb.row(*row);
    };

    std::unordered_set<std::uint64_t> chosen;
    std::vector<std::pair<Graph::NodeId, Graph::NodeId>> negatives;
    negatives.reserve(hide);
    while (negatives.size() < hide) {
      auto u = static_cast<Graph::NodeId>(rng.next_below(n));
      auto v = static_cast<Graph::NodeId>(rng.next_below(n));
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (graph.has_edge(u, v)) continue;
      const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
      if (!chosen.insert(key).second) continue;
      negatives.emplace_back(u, v);
    }

    auto features_of = [&](const std::pair<Graph::NodeId, Graph::NodeId>& e) {
      return edge_feature(vector_of(e.first), vector_of(e.second), options.op);
    };

    // Stratified half/half split keeps both classes on both sides.
    const std::size_t train_pos = hide / 2;
    const std::size_t train_neg = hide / 2;
    const std::size_t dim = emb.dimension();
    std::vector<double> train_features;
    std::vector<std::uint8_t> train_targets;
    auto push_train = [&](const std::pair<Graph::NodeId, Graph::NodeId>& e,
                          std::uint8_t y) {
      auto f = features_of(e);
      train_features.insert(train_features.end(), f.begin(), f.end());
      train_targets.push_back(y);
    };
    for (std::size_t i = 0; i < train_pos; ++i) push_train(hidden[i], 1);
    for (std::size_t i = 0; i < train_neg; ++i) push_train(negatives[i], 0);
    const auto model = LogisticRegression::fit(train_features, train_targets,
                                               dim, options.logreg);

    std::vector<double> positive_scores, negative_scores;
    for (std::size_t i = train_pos; i < hidden.size(); ++i)
      positive_scores.push_back(model.probability(features_of(hidden[i])));
    for (std::size_t i = train_neg; i < negatives.size(); ++i)
      negative_scores.push_back(model.probability(features_of(negatives[i])));

    if (missing > 0)
      std::fprintf(stderr,
                   "note: repetition %zu used the zero vector for %zu pair "
                   "endpoints missing from the embedding\n",
                   rep, missing);
    auc_reps.push_back(auc(positive_scores, negative_scores));
  }

  EvalReport report;
  report.task = "link_prediction";
  report.split_ratio = options.hide_ratio;
  report.repetitions = options.repetitions;
  report.seed = options.seed;
  report.notes.emplace_back("op", std::string(to_string(options.op)));
  report.set_metric("auc", std::move(auc_reps));
  return report;
}

namespace {

std::vector<Graph::NodeId> topic_members(const Graph& graph, const LabelMap& labels,
                                         std::string_view topic) {
  auto label = labels.find_label(topic);
  std::vector<Graph::NodeId> members;
  if (label) {
    for (auto n : labels.labeled_nodes())
      if (labels.has_label(n, *label)) members.push_back(n);
  }
  if (members.empty())
    throw std::runtime_error("no node carries topic '" + std::string(topic) + "'");
  return members;
}

}  // namespace

std::vector<double> topic_centroid(const EmbeddingMatrix& embeddings,
                                   const Graph& graph, const LabelMap& labels,
                                   std::string_view topic) {
  const auto members = topic_members(graph, labels, topic);
  std::vector<double> centroid(embeddings.dimension(), 0.0);
  for (auto n : members) {
    auto row = embeddings.find(graph.node_name(n));
    if (!row)
      throw std::runtime_error("topic node '" + graph.node_name(n) +
                               "' missing from the embedding");
    auto v = embeddings.row(*row);
    for (std::size_t d = 0; d < centroid.size(); ++d) centroid[d] += v[d];
  }
  for (double& x : centroid) x /= static_cast<double>(members.size());
  if (std::all_of(centroid.begin(), centroid.end(),
                  [](double x) { return x == 0.0; }))
    throw std::runtime_error("degenerate centroid for topic '" +
                             std::string(topic) + "'");
  return centroid;
}

RankedList recommend(const EmbeddingMatrix& embeddings, const Graph& graph,
                     const LabelMap& labels, std::string_view topic,
                     std::size_t k) {
  if (k == 0) throw std::runtime_error("recommend: k must be positive");
  const auto members = topic_members(graph, labels, topic);
  const auto centroid = topic_centroid(embeddings, graph, labels, topic);

  RankedList ranked;
  ranked.reserve(members.size());
  for (auto n : members) {
    const auto& name = graph.node_name(n);
    auto row = embeddings.find(name);
    ranked.push_back({name, cosine_similarity(embeddings.row(*row), centroid)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

RankedList nearest(const EmbeddingMatrix& embeddings,
                   std::span<const double> query, std::size_t k) {
  if (k == 0) throw std::runtime_error("nearest: k must be positive");
  if (query.size() != embeddings.dimension())
    throw std::runtime_error("nearest: query dimension mismatch");
  if (std::all_of(query.begin(), query.end(), [](double x) { return x == 0.0; }))
    throw std::runtime_error("nearest: zero query vector");

  RankedList ranked;
  ranked.reserve(embeddings.size());
  for (std::size_t i = 0; i < embeddings.size(); ++i)
    ranked.push_back(
        {embeddings.id(i), cosine_similarity(embeddings.row(i), query)});
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

RankedList nearest_to_id(const EmbeddingMatrix& embeddings, std::string_view id,
                         std::size_t k) {
  auto row = embeddings.find(id);
  if (!row) throw std::runtime_error("unknown id '" + std::string(id) + "'");
  auto full = nearest(embeddings, embeddings.row(*row),
                      std::min(embeddings.size(), k + 1));
  RankedList out;
  for (auto& e : full) {
    if (e.id == id) continue;
    out.push_back(std::move(e));
    if (out.size() == k) break;
  }
  return out;
}

}  // namespace exem
