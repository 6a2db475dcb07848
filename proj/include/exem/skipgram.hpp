#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "exem/rng.hpp"
#include "exem/vocab.hpp"

namespace exem {

// w2v trains whole-token vectors; ft adds hashed character n-gram features.
// com / sum / avg are built by combining a w2v and an ft run (concatenation,
// elementwise sum, elementwise average).
enum class EmbeddingMode { W2v, Ft, Com, Sum, Avg };

std::string_view to_string(EmbeddingMode mode);
EmbeddingMode embedding_mode_from(std::string_view name);
inline bool is_base_mode(EmbeddingMode m) {
  return m == EmbeddingMode::W2v || m == EmbeddingMode::Ft;
}

struct TrainConfig {
  std::uint32_t dimension = 128;
  std::uint32_t window = 10;  // max offset; effective window uniform in 1..window
  std::uint32_t epochs = 5;
  std::uint32_t negatives = 5;
  double initial_step = 0.025;        // decays linearly over processed tokens
  double min_step_fraction = 1e-4;    // floor as a fraction of initial_step
  std::uint32_t min_ngram = 3;        // ft only
  std::uint32_t max_ngram = 6;        // ft only
  std::uint32_t bucket_count = 1u << 21;
  double subsample = 0.0;             // frequent-token downsampling; 0 disables
  std::uint64_t seed = 1;
  std::uint32_t workers = 1;
};

// Plain row-major parameter table used during training.
struct EmbeddingTable {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  EmbeddingTable() = default;
  EmbeddingTable(std::size_t rows_, std::size_t dim_)
      : rows(rows_), dim(dim_), data(rows_ * dim_, 0.0) {}
  std::span<double> row(std::size_t r) { return {data.data() + r * dim, dim}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * dim, dim};
  }
};

// Final embeddings keyed by external ids.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(EmbeddingMode mode, std::vector<std::string> ids, std::size_t dim);

  EmbeddingMode mode() const { return mode_; }
  std::size_t size() const { return ids_.size(); }
  std::size_t dimension() const { return dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  std::optional<std::size_t> find(std::string_view id) const;
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

 private:
  EmbeddingMode mode_ = EmbeddingMode::W2v;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// Padded character n-grams of "<token>", enumerated by length then position;
// repeated substrings are kept.
std::vector<std::string> char_ngrams(std::string_view token, std::uint32_t min_n,
                                     std::uint32_t max_n);

// 32-bit FNV-1a over the n-gram bytes; bucket = hash % bucket_count.
std::uint32_t ngram_hash(std::string_view gram);

// Feature rows for a token: the whole-token row first, then one hashed row
// per character n-gram (offset past the vocabulary rows).
std::vector<std::uint32_t> ngram_decompose(std::string_view token,
                                           std::uint32_t token_id,
                                           std::uint32_t vocab_size,
                                           const TrainConfig& config);

// Skip-gram pair generation for one sentence: each center draws an effective
// window b uniform in 1..window and pairs with every token within b steps,
// so an offset d occurs with probability (window - d + 1) / window.
void positive_pairs(std::span<const std::uint32_t> sentence, std::uint32_t window,
                    Rng& rng,
                    std::vector<std::pair<std::uint32_t, std::uint32_t>>& out);

// One negative-sampling update. The center is represented by the sum of its
// feature rows; both tables take an exact simultaneous gradient step of size
// `step`. Returns the log-loss of the pair before the update. `scratch` must
// hold 2 * dim doubles. Throws if activations stop being finite.
double sgd_step(std::span<const std::uint32_t> center_features,
                std::uint32_t context, bool positive, double step,
                EmbeddingTable& input, EmbeddingTable& output,
                std::span<double> scratch);

// Trains w2v or ft embeddings over the corpus. Deterministic for a given
// config with workers = 1; larger worker counts update shared tables
// lock-free and are only reproducible run-to-run in aggregate.
EmbeddingMatrix train_embeddings(const TokenCorpus& corpus,
                                 const TrainConfig& config, EmbeddingMode mode);

// Combines two runs over the same ids. scheme: Com (concatenate), Sum, Avg.
EmbeddingMatrix combine(const EmbeddingMatrix& a, const EmbeddingMatrix& b,
                        EmbeddingMode scheme);

// Text format: "count dimension" header, then one "id v1 .. vd" row per id.
void save_embeddings(const EmbeddingMatrix& matrix,
                     const std::filesystem::path& path);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path,
                                EmbeddingMode tag = EmbeddingMode::W2v);

}  // namespace exem
