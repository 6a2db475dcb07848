#include "exem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace exem {

F1Result f1_scores(const std::vector<std::vector<std::uint32_t>>& truth,
                   const std::vector<std::vector<std::uint32_t>>& predicted) {
  if (truth.empty()) throw std::runtime_error("f1: empty input");
  if (truth.size() != predicted.size())
    throw std::runtime_error("f1: truth and prediction cover different node counts");

  struct Tally {
    std::uint64_t tp = 0, fp = 0, fn = 0;
  };
  std::map<std::uint32_t, Tally> per_label;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& t = truth[i];
    const auto& p = predicted[i];
    for (std::uint32_t l : t) {
      if (std::binary_search(p.begin(), p.end(), l))
        ++per_label[l].tp;
      else
        ++per_label[l].fn;
    }
    for (std::uint32_t l : p)
      if (!std::binary_search(t.begin(), t.end(), l)) ++per_label[l].fp;
  }

  std::uint64_t tp = 0, fp = 0, fn = 0;
  double macro_sum = 0.0;
  for (const auto& [label, tally] : per_label) {
    tp += tally.tp;
    fp += tally.fp;
    fn += tally.fn;
    const double denom = static_cast<double>(2 * tally.tp + tally.fp + tally.fn);
    macro_sum += denom > 0.0 ? 2.0 * static_cast<double>(tally.tp) / denom : 0.0;
  }

  F1Result result;
  const double micro_denom = static_cast<double>(2 * tp + fp + fn);
  result.micro = micro_denom > 0.0 ? 2.0 * static_cast<double>(tp) / micro_denom : 0.0;
  result.macro = per_label.empty() ? 0.0 : macro_sum / static_cast<double>(per_label.size());
  return result;
}

double auc(std::span<const double> positive_scores,
           std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty())
    throw std::runtime_error("auc: both score sets must be non-empty");

  // Rank-sum formulation with average ranks for ties:
  // AUC = (R+ - n+(n+ + 1)/2) / (n+ n-).
  std::vector<std::pair<double, int>> scored;
  scored.reserve(positive_scores.size() + negative_scores.size());
  for (double s : positive_scores) scored.emplace_back(s, 1);
  for (double s : negative_scores) scored.emplace_back(s, 0);
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < scored.size()) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t t = i; t < j; ++t)
      if (scored[t].second) positive_rank_sum += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(positive_scores.size());
  const double nn = static_cast<double>(negative_scores.size());
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

namespace {

double discount(std::size_t position) {  // 1-based
  return position <= 2 ? 1.0 : 1.0 / std::log2(static_cast<double>(position));
}

void check_relevance(const std::unordered_map<std::string, double>& relevance) {
  for (const auto& [id, rel] : relevance)
    if (rel < 0.0)
      throw std::runtime_error("negative relevance for '" + id + "'");
}

}  // namespace

double dcg_at_k(const RankedList& ranked,
                const std::unordered_map<std::string, double>& relevance,
                std::size_t k) {
  check_relevance(relevance);
  double dcg = 0.0;
  const std::size_t limit = std::min(k, ranked.size());
  for (std::size_t i = 0; i < limit; ++i) {
    auto it = relevance.find(ranked[i].id);
    const double rel = it == relevance.end() ? 0.0 : it->second;
    dcg += rel * discount(i + 1);
  }
  return dcg;
}

double ndcg_at_k(const RankedList& ranked,
                 const std::unordered_map<std::string, double>& relevance,
                 std::size_t k) {
  if (k == 0) throw std::runtime_error("ndcg: k must be positive");
  if (ranked.empty()) throw std::runtime_error("ndcg: empty ranking");
  check_relevance(relevance);
  if (k > ranked.size()) {
    std::fprintf(stderr,
                 "warning: ndcg cutoff %zu exceeds ranking of %zu entries; "
                 "truncating\n",
                 k, ranked.size());
    k = ranked.size();
  }

  const double dcg = dcg_at_k(ranked, relevance, k);

  std::vector<double> ideal;
  ideal.reserve(relevance.size());
  for (const auto& [id, rel] : relevance) ideal.push_back(rel);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i)
    idcg += ideal[i] * discount(i + 1);

  return idcg > 0.0 ? dcg / idcg : 0.0;
}

std::string_view to_string(EdgeOperator op) {
  switch (op) {
    case EdgeOperator::Average: return "average";
    case EdgeOperator::Hadamard: return "hadamard";
    case EdgeOperator::WeightedL1: return "weighted-l1";
    case EdgeOperator::WeightedL2: return "weighted-l2";
  }
  return "?";
}

EdgeOperator edge_operator_from(std::string_view name) {
  if (name == "average") return EdgeOperator::Average;
  if (name == "hadamard") return EdgeOperator::Hadamard;
  if (name == "weighted-l1") return EdgeOperator::WeightedL1;
  if (name == "weighted-l2") return EdgeOperator::WeightedL2;
  throw std::runtime_error(
      "unknown edge operator '" + std::string(name) +
      "' (expected average, hadamard, weighted-l1 or weighted-l2)");
}

std::vector<double> edge_feature(std::span<const double> u,
                                 std::span<const double> v, EdgeOperator op) {
  if (u.size() != v.size())
    throw std::runtime_error("edge feature: dimension mismatch");
  std::vector<double> out(u.size());
  switch (op) {
    case EdgeOperator::Average:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = 0.5 * (u[i] + v[i]);
      break;
    case EdgeOperator::Hadamard:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * v[i];
      break;
    case EdgeOperator::WeightedL1:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::abs(u[i] - v[i]);
      break;
    case EdgeOperator::WeightedL2:
      for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = (u[i] - v[i]) * (u[i] - v[i]);
      break;
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::runtime_error("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace exem
