#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "exem/graph.hpp"
#include "exem/logreg.hpp"
#include "exem/metrics.hpp"
#include "exem/skipgram.hpp"

namespace exem {

// Key=value evaluation summary. Metric values are means over repetitions,
// with the per-repetition series kept alongside. Contains nothing volatile
// (no timestamps, no paths), so equal runs produce identical files.
struct EvalReport {
  std::string task;
  double split_ratio = 0.0;
  std::size_t repetitions = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> notes;  // e.g. op=hadamard
  std::vector<std::string> metric_names;                   // insertion order
  std::unordered_map<std::string, double> means;
  std::unordered_map<std::string, std::vector<double>> series;

  void set_metric(const std::string& name, std::vector<double> values);
  double mean(const std::string& name) const;
};

void write_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report(const std::filesystem::path& path);
std::string format_report(const EvalReport& report);

struct ClassificationOptions {
  double train_ratio = 0.5;    // in (0, 1)
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  // Default: rank labels by probability and keep as many as the node truly
  // has. The fixed threshold variant keeps every label scoring >= threshold.
  bool fixed_threshold = false;
  double threshold = 0.5;
  LogRegConfig logreg;
};

// One-vs-rest logistic regression over labeled nodes; reports mean micro and
// macro F1 over repeated random splits.
EvalReport evaluate_classification(const EmbeddingMatrix& embeddings,
                                   const Graph& graph, const LabelMap& labels,
                                   const ClassificationOptions& options);

using EmbedFn =
    std::function<EmbeddingMatrix(const Graph& graph, std::uint64_t seed)>;

struct LinkPredictionOptions {
  double hide_ratio = 0.5;  // fraction of edges hidden, in (0, 1)
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  EdgeOperator op = EdgeOperator::Hadamard;
  LogRegConfig logreg;
};

// Hides part of the edge set, re-embeds the residual graph via embed, and
// scores hidden edges against an equal number of uniform non-edges with a
// logistic classifier on pair features; reports mean AUC.
EvalReport evaluate_link_prediction(const Graph& graph, const EmbedFn& embed,
                                    const LinkPredictionOptions& options);

// Mean embedding vector of the nodes carrying `topic`.
std::vector<double> topic_centroid(const EmbeddingMatrix& embeddings,
                                   const Graph& graph, const LabelMap& labels,
                                   std::string_view topic);

// Nodes of the topic cluster ranked by cosine similarity to its centroid
// (ties broken by external id), truncated to k.
RankedList recommend(const EmbeddingMatrix& embeddings, const Graph& graph,
                     const LabelMap& labels, std::string_view topic,
                     std::size_t k);

// All embedded ids ranked by cosine similarity to the query vector.
RankedList nearest(const EmbeddingMatrix& embeddings,
                   std::span<const double> query, std::size_t k);
RankedList nearest_to_id(const EmbeddingMatrix& embeddings, std::string_view id,
                         std::size_t k);  // excludes the query id itself

}  // namespace exem
