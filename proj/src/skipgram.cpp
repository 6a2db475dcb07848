#include "exem/skipgram.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "exem/text_io.hpp"

namespace exem {

namespace {

constexpr std::uint64_t kInitSalt = 0x1217u;
constexpr std::uint64_t kTrainSalt = 0x7e41u;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
}

}  // namespace

std::string_view to_string(EmbeddingMode mode) {
  switch (mode) {
    case EmbeddingMode::W2v: return "w2v";
    case EmbeddingMode::Ft: return "ft";
    case EmbeddingMode::Com: return "com";
    case EmbeddingMode::Sum: return "sum";
    case EmbeddingMode::Avg: return "avg";
  }
  return "?";
}

EmbeddingMode embedding_mode_from(std::string_view name) {
  if (name == "w2v") return EmbeddingMode::W2v;
  if (name == "ft") return EmbeddingMode::Ft;
  if (name == "com" || name == "concat") return EmbeddingMode::Com;
  if (name == "sum") return EmbeddingMode::Sum;
  if (name == "avg") return EmbeddingMode::Avg;
  throw std::runtime_error("unknown embedding mode '" + std::string(name) +
                           "' (expected w2v, ft, com, sum or avg)");
}

EmbeddingMatrix::EmbeddingMatrix(EmbeddingMode mode, std::vector<std::string> ids,
                                 std::size_t dim)
    : mode_(mode), ids_(std::move(ids)), dim_(dim), data_(ids_.size() * dim, 0.0) {
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    auto [it, fresh] = index_.emplace(ids_[i], i);
    if (!fresh) throw std::runtime_error("duplicate embedding id '" + ids_[i] + "'");
  }
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> char_ngrams(std::string_view token, std::uint32_t min_n,
                                     std::uint32_t max_n) {
  std::string padded = "<" + std::string(token) + ">";
  std::vector<std::string> grams;
  for (std::uint32_t n = min_n; n <= max_n; ++n) {
    if (n > padded.size()) break;
    for (std::size_t i = 0; i + n <= padded.size(); ++i)
      grams.emplace_back(padded.substr(i, n));
  }
  return grams;
}

std::uint32_t ngram_hash(std::string_view gram) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : gram) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

std::vector<std::uint32_t> ngram_decompose(std::string_view token,
                                           std::uint32_t token_id,
                                           std::uint32_t vocab_size,
                                           const TrainConfig& config) {
  std::vector<std::uint32_t> features;
  features.push_back(token_id);
  for (const auto& gram : char_ngrams(token, config.min_ngram, config.max_ngram))
    features.push_back(vocab_size + ngram_hash(gram) % config.bucket_count);
  return features;
}

void positive_pairs(std::span<const std::uint32_t> sentence, std::uint32_t window,
                    Rng& rng,
                    std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) {
  out.clear();
  if (window == 0) throw std::runtime_error("window must be positive");
  const std::size_t n = sentence.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t b = 1 + rng.next_below(window);
    const std::size_t lo = i > b ? i - b : 0;
    const std::size_t hi = std::min(n - 1, i + b);
    for (std::size_t j = lo; j <= hi; ++j)
      if (j != i) out.emplace_back(sentence[i], sentence[j]);
  }
}

double sgd_step(std::span<const std::uint32_t> center_features,
                std::uint32_t context, bool positive, double step,
                EmbeddingTable& input, EmbeddingTable& output,
                std::span<double> scratch) {
  const std::size_t dim = input.dim;
  if (center_features.empty()) throw std::runtime_error("empty feature list");
  if (scratch.size() < 2 * dim) throw std::runtime_error("scratch too small");

  double* hidden = scratch.data();
  double* grad = scratch.data() + dim;
  std::fill(hidden, hidden + dim, 0.0);
  for (std::uint32_t f : center_features) {
    const double* r = input.data.data() + static_cast<std::size_t>(f) * dim;
    for (std::size_t d = 0; d < dim; ++d) hidden[d] += r[d];
  }

  double* out = output.data.data() + static_cast<std::size_t>(context) * dim;
  double dot = 0.0;
  for (std::size_t d = 0; d < dim; ++d) dot += hidden[d] * out[d];
  if (!std::isfinite(dot))
    throw std::runtime_error("skip-gram training diverged (non-finite activation)");

  const double label = positive ? 1.0 : 0.0;
  const double g = (sigmoid(dot) - label) * step;
  const double loss = positive ? softplus(-dot) : softplus(dot);

  // Simultaneous update: both gradients use pre-update values.
  for (std::size_t d = 0; d < dim; ++d) grad[d] = g * out[d];
  for (std::size_t d = 0; d < dim; ++d) out[d] -= g * hidden[d];
  for (std::uint32_t f : center_features) {
    double* r = input.data.data() + static_cast<std::size_t>(f) * dim;
    for (std::size_t d = 0; d < dim; ++d) r[d] -= grad[d];
  }
  return loss;
}

EmbeddingMatrix train_embeddings(const TokenCorpus& corpus,
                                 const TrainConfig& config, EmbeddingMode mode) {
  if (!is_base_mode(mode))
    throw std::runtime_error(
        "train handles modes w2v and ft; combined modes are produced by combine()");
  if (config.dimension == 0) throw std::runtime_error("dimension must be positive");
  if (config.window == 0) throw std::runtime_error("window must be positive");
  if (config.epochs == 0) throw std::runtime_error("epochs must be positive");
  if (config.negatives == 0) throw std::runtime_error("negatives must be positive");
  if (!(config.initial_step > 0.0))
    throw std::runtime_error("initial step must be positive");
  if (mode == EmbeddingMode::Ft) {
    if (config.min_ngram == 0 || config.min_ngram > config.max_ngram)
      throw std::runtime_error("require 1 <= min_ngram <= max_ngram");
    if (config.bucket_count == 0)
      throw std::runtime_error("bucket count must be positive");
  }

  const Vocabulary& vocab = corpus.vocab;
  const std::size_t V = vocab.size();
  if (V == 0 || corpus.sentences.empty()) throw std::runtime_error("empty corpus");

  const std::size_t dim = config.dimension;
  std::vector<std::vector<std::uint32_t>> features(V);
  std::size_t input_rows = V;
  if (mode == EmbeddingMode::Ft) {
    input_rows = V + config.bucket_count;
    for (std::size_t i = 0; i < V; ++i)
      features[i] = ngram_decompose(vocab.token(static_cast<std::uint32_t>(i)),
                                    static_cast<std::uint32_t>(i),
                                    static_cast<std::uint32_t>(V), config);
  } else {
    for (std::size_t i = 0; i < V; ++i) features[i] = {static_cast<std::uint32_t>(i)};
  }

  // Vocabulary rows are initialized before bucket rows from one stream, so
  // w2v and ft start from identical whole-token vectors.
  EmbeddingTable input(input_rows, dim);
  {
    Rng init(mix_seed({config.seed, kInitSalt}));
    for (double& x : input.data)
      x = (init.next_unit() - 0.5) / static_cast<double>(dim);
  }
  EmbeddingTable output(V, dim);  // zeros

  const std::uint64_t total_tokens =
      corpus.token_count() * static_cast<std::uint64_t>(config.epochs);
  std::atomic<std::uint64_t> processed{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto run_range = [&](std::uint32_t worker, std::size_t begin, std::size_t end) {
    try {
      Rng rng(mix_seed({config.seed, kTrainSalt, worker}));
      std::vector<double> scratch(2 * dim);
      std::vector<std::uint32_t> filtered;
      for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t s = begin; s < end; ++s) {
          if (failed.load(std::memory_order_relaxed)) return;
          const auto& sentence = corpus.sentences[s];
          const std::uint64_t base =
              processed.fetch_add(sentence.size(), std::memory_order_relaxed);

          std::span<const std::uint32_t> tokens(sentence);
          if (config.subsample > 0.0) {
            filtered.clear();
            const double t =
                config.subsample * static_cast<double>(vocab.total_count());
            for (std::uint32_t tok : sentence) {
              const double f = static_cast<double>(vocab.count(tok));
              const double keep = (std::sqrt(f / t) + 1.0) * t / f;
              if (keep >= rng.next_unit()) filtered.push_back(tok);
            }
            tokens = filtered;
          }

          const std::size_t n = tokens.size();
          for (std::size_t c = 0; c < n; ++c) {
            const double progress = static_cast<double>(base + c) /
                                    static_cast<double>(total_tokens);
            const double step =
                config.initial_step *
                std::max(1.0 - progress, config.min_step_fraction);
            const auto& center_features = features[tokens[c]];

            const std::uint64_t b = 1 + rng.next_below(config.window);
            const std::size_t lo = c > b ? c - b : 0;
            const std::size_t hi = std::min(n - 1, c + b);
            for (std::size_t j = lo; j <= hi; ++j) {
              if (j == c) continue;
              const std::uint32_t context = tokens[j];
              sgd_step(center_features, context, true, step, input, output,
                       scratch);
              for (std::uint32_t k = 0; k < config.negatives; ++k) {
                const std::uint32_t neg = vocab.sample_noise(rng.next_unit());
                if (neg == context) continue;
                sgd_step(center_features, neg, false, step, input, output,
                         scratch);
              }
            }
          }
        }
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failed.exchange(true)) failure = e.what();
    }
  };

  const std::size_t S = corpus.sentences.size();
  const std::uint32_t workers = std::max<std::uint32_t>(
      1, std::min<std::uint32_t>(config.workers,
                                 static_cast<std::uint32_t>(S)));
  if (workers == 1) {
    run_range(0, 0, S);
  } else {
    // Lock-free shared updates across workers (hogwild); deterministic only
    // with a single worker.
    std::vector<std::thread> pool;
    const std::size_t chunk = (S + workers - 1) / workers;
    for (std::uint32_t w = 0; w < workers; ++w) {
      std::size_t b = w * chunk;
      std::size_t e = std::min(S, b + chunk);
      if (b < e) pool.emplace_back(run_range, w, b, e);
    }
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error(failure);

  // A token's embedding is the same representation training used: the sum of
  // its feature rows (for w2v that is just its own row).
  std::vector<std::string> ids(V);
  for (std::size_t i = 0; i < V; ++i) ids[i] = vocab.token(static_cast<std::uint32_t>(i));
  EmbeddingMatrix matrix(mode, std::move(ids), dim);
  for (std::size_t i = 0; i < V; ++i) {
    auto row = matrix.row(i);
    for (std::uint32_t f : features[i]) {
      auto src = input.row(f);
      for (std::size_t d = 0; d < dim; ++d) row[d] += src[d];
    }
  }
  return matrix;
}

EmbeddingMatrix combine(const EmbeddingMatrix& a, const EmbeddingMatrix& b,
                        EmbeddingMode scheme) {
  if (is_base_mode(scheme))
    throw std::runtime_error("combine expects scheme com, sum or avg");

  // Both inputs must cover exactly the same ids.
  std::vector<std::string> only_a, only_b;
  for (const auto& id : a.ids())
    if (!b.find(id)) only_a.push_back(id);
  for (const auto& id : b.ids())
    if (!a.find(id)) only_b.push_back(id);
  if (!only_a.empty() || !only_b.empty()) {
    std::ostringstream msg;
    msg << "combine: id sets differ (" << only_a.size()
        << " missing from second input, " << only_b.size() << " from first";
    std::size_t shown = 0;
    for (const auto& id : only_a) {
      if (shown++ == 3) break;
      msg << "; -" << id;
    }
    shown = 0;
    for (const auto& id : only_b) {
      if (shown++ == 3) break;
      msg << "; +" << id;
    }
    msg << ")";
    throw std::runtime_error(msg.str());
  }

  if (scheme == EmbeddingMode::Com) {
    EmbeddingMatrix out(scheme, a.ids(), a.dimension() + b.dimension());
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto dst = out.row(i);
      auto ra = a.row(i);
      auto rb = b.row(*b.find(a.id(i)));
      std::copy(ra.begin(), ra.end(), dst.begin());
      std::copy(rb.begin(), rb.end(), dst.begin() + ra.size());
    }
    return out;
  }

  if (a.dimension() != b.dimension())
    throw std::runtime_error("combine: sum/avg require equal dimensions, got " +
                             std::to_string(a.dimension()) + " and " +
                             std::to_string(b.dimension()));
  EmbeddingMatrix out(scheme, a.ids(), a.dimension());
  const double scale = scheme == EmbeddingMode::Avg ? 0.5 : 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto dst = out.row(i);
    auto ra = a.row(i);
    auto rb = b.row(*b.find(a.id(i)));
    for (std::size_t d = 0; d < dst.size(); ++d) dst[d] = (ra[d] + rb[d]) * scale;
  }
  return out;
}

void save_embeddings(const EmbeddingMatrix& matrix,
                     const std::filesystem::path& path) {
  std::string out = std::to_string(matrix.size()) + " " +
                    std::to_string(matrix.dimension()) + "\n";
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out += matrix.id(i);
    for (double v : matrix.row(i)) {
      out += ' ';
      out += format_double(v);
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path,
                                EmbeddingMode tag) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error(path.string() + ": empty embedding file");
  auto header = split_whitespace(lines[0]);
  if (header.size() != 2)
    throw std::runtime_error(path.string() + ":1: expected 'count dimension' header");
  const auto count = parse_u64(header[0], "embedding count");
  const auto dim = parse_u64(header[1], "embedding dimension");
  if (dim == 0) throw std::runtime_error(path.string() + ": dimension must be positive");

  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  ids.reserve(count);
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    auto toks = split_whitespace(lines[ln]);
    if (toks.size() != dim + 1)
      throw std::runtime_error(path.string() + ":" + std::to_string(ln + 1) +
                               ": expected id plus " + std::to_string(dim) +
                               " values, got " + std::to_string(toks.size()) +
                               " token(s)");
    ids.emplace_back(toks[0]);
    std::vector<double> row(dim);
    for (std::size_t d = 0; d < dim; ++d)
      row[d] = parse_double(toks[d + 1], "embedding value");
    rows.push_back(std::move(row));
  }
  if (ids.size() != count)
    throw std::runtime_error(path.string() + ": header promises " +
                             std::to_string(count) + " rows, found " +
                             std::to_string(ids.size()));

  EmbeddingMatrix matrix(tag, std::move(ids), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), matrix.row(i).begin());
  return matrix;
}

}  // namespace exem
