#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace exem {

struct F1Result {
  double micro = 0.0;
  double macro = 0.0;
};

// Multi-label F1 over parallel per-node label sets (sorted unique ids).
// Micro pools true/false positives and negatives across labels; macro
// averages per-label F1 over every label appearing in truth or predictions,
// scoring 0 for labels with an undefined precision or recall.
F1Result f1_scores(const std::vector<std::vector<std::uint32_t>>& truth,
                   const std::vector<std::vector<std::uint32_t>>& predicted);

// Probability that a random positive outscores a random negative, ties
// counted half. Rank-based, so ties are exact rather than order-dependent.
double auc(std::span<const double> positive_scores,
           std::span<const double> negative_scores);

struct RankedEntry {
  std::string id;
  double score = 0.0;
};
using RankedList = std::vector<RankedEntry>;

// Discounted cumulative gain of the first k entries in list order: the first
// two positions count fully, position i >= 2 is discounted by log2(i).
double dcg_at_k(const RankedList& ranked,
                const std::unordered_map<std::string, double>& relevance,
                std::size_t k);

// DCG normalized by the ideal ordering of the relevance values; 0 when the
// ideal gain is 0. Items absent from the relevance map count 0; k larger
// than the list is truncated with a warning.
double ndcg_at_k(const RankedList& ranked,
                 const std::unordered_map<std::string, double>& relevance,
                 std::size_t k);

enum class EdgeOperator { Average, Hadamard, WeightedL1, WeightedL2 };

std::string_view to_string(EdgeOperator op);
EdgeOperator edge_operator_from(std::string_view name);

// Elementwise pair feature: average (u+v)/2, hadamard u*v, weighted-l1
// |u-v|, weighted-l2 (u-v)^2.
std::vector<double> edge_feature(std::span<const double> u,
                                 std::span<const double> v, EdgeOperator op);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace exem
