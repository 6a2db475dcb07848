#include "exem/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exem {

std::optional<std::uint32_t> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::noise_probability(std::uint32_t id) const {
  return noise_cdf_[id] - (id == 0 ? 0.0 : noise_cdf_[id - 1]);
}

std::uint32_t Vocabulary::sample_noise(double unit) const {
  auto it = std::upper_bound(noise_cdf_.begin(), noise_cdf_.end(), unit);
  if (it == noise_cdf_.end()) --it;
  return static_cast<std::uint32_t>(it - noise_cdf_.begin());
}

class CorpusBuilder {
 public:
  std::uint32_t intern(std::string_view token) {
    auto it = vocab_.index_.find(std::string(token));
    if (it != vocab_.index_.end()) {
      ++vocab_.counts_[it->second];
      ++vocab_.total_count_;
      return it->second;
    }
    auto id = static_cast<std::uint32_t>(vocab_.tokens_.size());
    vocab_.tokens_.emplace_back(token);
    vocab_.index_.emplace(vocab_.tokens_.back(), id);
    vocab_.counts_.push_back(1);
    ++vocab_.total_count_;
    return id;
  }

  Vocabulary finish() {
    if (vocab_.tokens_.empty()) throw std::runtime_error("empty corpus");
    double norm = 0.0;
    for (auto c : vocab_.counts_)
      norm += std::pow(static_cast<double>(c), Vocabulary::kNoiseSmoothing);
    vocab_.noise_cdf_.resize(vocab_.counts_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < vocab_.counts_.size(); ++i) {
      acc += std::pow(static_cast<double>(vocab_.counts_[i]),
                      Vocabulary::kNoiseSmoothing) /
             norm;
      vocab_.noise_cdf_[i] = acc;
    }
    vocab_.noise_cdf_.back() = 1.0;  // absorb rounding in the last bin
    return std::move(vocab_);
  }

 private:
  Vocabulary vocab_;
};

TokenCorpus build_corpus(const std::vector<std::vector<std::string>>& sentences) {
  CorpusBuilder builder;
  TokenCorpus corpus;
  for (const auto& sentence : sentences) {
    std::vector<std::uint32_t> encoded;
    encoded.reserve(sentence.size());
    for (const auto& token : sentence) encoded.push_back(builder.intern(token));
    if (!encoded.empty()) corpus.sentences.push_back(std::move(encoded));
  }
  corpus.vocab = builder.finish();
  return corpus;
}

TokenCorpus build_corpus(const WalkCorpus& walks, const Graph& graph) {
  CorpusBuilder builder;
  TokenCorpus corpus;
  for (const auto& walk : walks.walks) {
    std::vector<std::uint32_t> encoded;
    encoded.reserve(walk.size());
    for (Graph::NodeId u : walk) encoded.push_back(builder.intern(graph.node_name(u)));
    if (!encoded.empty()) corpus.sentences.push_back(std::move(encoded));
  }
  corpus.vocab = builder.finish();
  return corpus;
}

TokenCorpus load_corpus_file(const std::filesystem::path& path) {
  return build_corpus(load_corpus_sentences(path));
}

}  // namespace exem
