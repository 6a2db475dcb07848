#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "exem/graph.hpp"
#include "exem/walker.hpp"

namespace exem {

// Token table with counts and the smoothed noise distribution used for
// negative sampling: P(t) proportional to count(t)^0.75.
class Vocabulary {
 public:
  static constexpr double kNoiseSmoothing = 0.75;

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::uint32_t id) const { return tokens_[id]; }
  std::optional<std::uint32_t> find(std::string_view token) const;
  std::uint64_t count(std::uint32_t id) const { return counts_[id]; }
  std::uint64_t total_count() const { return total_count_; }

  double noise_probability(std::uint32_t id) const;
  // Maps a uniform draw in [0, 1) to a token id via the noise CDF.
  std::uint32_t sample_noise(double unit) const;

 private:
  friend class CorpusBuilder;
  std::vector<std::string> tokens_;  // first-appearance order
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> noise_cdf_;
  std::uint64_t total_count_ = 0;
};

// Sentences re-encoded against the vocabulary.
struct TokenCorpus {
  Vocabulary vocab;
  std::vector<std::vector<std::uint32_t>> sentences;

  std::uint64_t token_count() const { return vocab.total_count(); }
};

TokenCorpus build_corpus(const std::vector<std::vector<std::string>>& sentences);
TokenCorpus build_corpus(const WalkCorpus& walks, const Graph& graph);
TokenCorpus load_corpus_file(const std::filesystem::path& path);

}  // namespace exem
