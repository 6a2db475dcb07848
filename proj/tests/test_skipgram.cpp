#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "exem/graph.hpp"
#include "exem/rng.hpp"
#include "exem/skipgram.hpp"
#include "exem/vocab.hpp"
#include "exem/walker.hpp"
#include "test_util.hpp"

using namespace exem;
using testutil::TempDir;
using testutil::write_file;

namespace {

TokenCorpus corpus_of(const std::vector<std::vector<std::string>>& sentences) {
  return build_corpus(sentences);
}

// Loss oracle independent of sgd_step's own bookkeeping: direct
// -log sigmoid(+-dot) over the summed feature rows.
double pair_loss(const EmbeddingTable& input, const EmbeddingTable& output,
                 std::span<const std::uint32_t> features, std::uint32_t context,
                 bool positive) {
  std::vector<double> hidden(input.dim, 0.0);
  for (auto f : features) {
    auto r = input.row(f);
    for (std::size_t d = 0; d < input.dim; ++d) hidden[d] += r[d];
  }
  double dot = 0.0;
  auto out = output.row(context);
  for (std::size_t d = 0; d < input.dim; ++d) dot += hidden[d] * out[d];
  const double s = 1.0 / (1.0 + std::exp(-dot));
  return positive ? -std::log(s) : -std::log(1.0 - s);
}

double activation(const EmbeddingTable& input, const EmbeddingTable& output,
                  std::span<const std::uint32_t> features, std::uint32_t context) {
  std::vector<double> hidden(input.dim, 0.0);
  for (auto f : features) {
    auto r = input.row(f);
    for (std::size_t d = 0; d < input.dim; ++d) hidden[d] += r[d];
  }
  double dot = 0.0;
  auto out = output.row(context);
  for (std::size_t d = 0; d < input.dim; ++d) dot += hidden[d] * out[d];
  return dot;
}

double mean_cosine(const EmbeddingMatrix& emb,
                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  double total = 0.0;
  for (auto [i, j] : pairs) {
    double dot = 0.0, ni = 0.0, nj = 0.0;
    auto a = emb.row(i);
    auto b = emb.row(j);
    for (std::size_t d = 0; d < emb.dimension(); ++d) {
      dot += a[d] * b[d];
      ni += a[d] * a[d];
      nj += b[d] * b[d];
    }
    total += dot / std::sqrt(ni * nj);
  }
  return total / static_cast<double>(pairs.size());
}

}  // namespace

TEST_CASE("embedding mode names") {
  CHECK(to_string(EmbeddingMode::Com) == "com");
  CHECK(embedding_mode_from("w2v") == EmbeddingMode::W2v);
  CHECK(embedding_mode_from("concat") == EmbeddingMode::Com);  // alias
  CHECK(embedding_mode_from("avg") == EmbeddingMode::Avg);
  CHECK(is_base_mode(EmbeddingMode::Ft));
  CHECK_FALSE(is_base_mode(EmbeddingMode::Sum));
  CHECK_THROWS_WITH_AS(embedding_mode_from("glove"),
                       doctest::Contains("unknown embedding mode"),
                       std::runtime_error);
}

TEST_CASE("character n-grams") {
  SUBCASE("a four-character token yields seven grams of length 3 and 4") {
    auto grams = char_ngrams("1234", 3, 4);
    CHECK(grams == std::vector<std::string>{"<12", "123", "234", "34>", "<123",
                                            "1234", "234>"});
  }

  SUBCASE("a short token keeps only the padded whole-token gram") {
    auto grams = char_ngrams("7", 3, 6);
    CHECK(grams == std::vector<std::string>{"<7>"});
  }

  SUBCASE("repeated substrings are kept") {
    auto grams = char_ngrams("aaa", 2, 2);
    CHECK(grams == std::vector<std::string>{"<a", "aa", "aa", "a>"});
  }

  SUBCASE("decomposition puts the whole-token row first") {
    TrainConfig cfg;
    cfg.min_ngram = 3;
    cfg.max_ngram = 4;
    cfg.bucket_count = 64;
    auto features = ngram_decompose("1234", 5, 10, cfg);
    REQUIRE(features.size() == 8);  // token + 7 grams
    CHECK(features[0] == 5);
    for (std::size_t i = 1; i < features.size(); ++i) {
      CHECK(features[i] >= 10);
      CHECK(features[i] < 10 + 64);
    }
  }

  SUBCASE("hash matches the published 32-bit FNV-1a vectors") {
    CHECK(ngram_hash("") == 2166136261u);
    CHECK(ngram_hash("a") == 0xe40c292cu);
    CHECK(ngram_hash("foobar") == 0xbf9cf968u);
  }
}

TEST_CASE("skip-gram pair window") {
  SUBCASE("offset frequency follows (W - d + 1) / W") {
    const std::uint32_t W = 5;
    const std::size_t L = 41;
    std::vector<std::uint32_t> sentence(L);
    for (std::size_t i = 0; i < L; ++i) sentence[i] = static_cast<std::uint32_t>(i);

    Rng rng(2024);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::map<std::uint32_t, std::uint64_t> offset_counts;
    const std::size_t rounds = 4000;
    std::size_t interior = 0;
    for (std::size_t r = 0; r < rounds; ++r) {
      positive_pairs(sentence, W, rng, pairs);
      for (auto [c, x] : pairs) {
        if (c < W || c >= L - W) continue;  // boundary centers lose pairs
        const std::uint32_t d = c > x ? c - x : x - c;
        ++offset_counts[d];
      }
    }
    interior = (L - 2 * W) * rounds;

    for (std::uint32_t d = 1; d <= W; ++d) {
      const double expected = static_cast<double>(W - d + 1) / W;
      const double observed = static_cast<double>(offset_counts[d]) /
                              (2.0 * static_cast<double>(interior));
      CHECK(observed == doctest::Approx(expected).epsilon(0.03));
    }
    CHECK(offset_counts.rbegin()->first <= W);  // never beyond the window
  }

  SUBCASE("window 1 pairs only adjacent tokens") {
    std::vector<std::uint32_t> sentence{0, 1, 2, 3};
    Rng rng(1);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    positive_pairs(sentence, 1, rng, pairs);
    CHECK(pairs == std::vector<std::pair<std::uint32_t, std::uint32_t>>{
                       {0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}});
  }

  SUBCASE("a center never pairs with itself") {
    std::vector<std::uint32_t> sentence(9, 7);  // same token everywhere
    Rng rng(3);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    positive_pairs(sentence, 3, rng, pairs);
    // Self-pairs by position are excluded; count must match the b draws.
    for (auto [c, x] : pairs) {
      CHECK(c == 7);
      CHECK(x == 7);
    }
    CHECK(pairs.size() < 9 * 6);  // strictly fewer than all-with-all
  }

  SUBCASE("zero window is rejected") {
    std::vector<std::uint32_t> sentence{0, 1};
    Rng rng(1);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    CHECK_THROWS_WITH_AS(positive_pairs(sentence, 0, rng, pairs),
                         doctest::Contains("window"), std::runtime_error);
  }
}

TEST_CASE("one negative-sampling step") {
  Rng rng(99);
  auto fill = [&](EmbeddingTable& t) {
    for (double& x : t.data) x = rng.next_range(-0.1, 0.1);
  };

  SUBCASE("the update matches finite differences of the loss") {
    for (int trial = 0; trial < 12; ++trial) {
      const std::size_t dim = 3 + trial % 5;
      EmbeddingTable input(6, dim), output(4, dim);
      fill(input);
      fill(output);
      std::vector<std::uint32_t> features;
      switch (trial % 3) {
        case 0: features = {2}; break;
        case 1: features = {0, 3, 5}; break;
        default: features = {1, 1, 4}; break;  // a repeated feature row
      }
      const std::uint32_t context = trial % 4;
      const bool positive = trial % 2 == 0;
      const double step = 0.05;

      EmbeddingTable in_before = input, out_before = output;
      std::vector<double> scratch(2 * dim);
      const double reported =
          sgd_step(features, context, positive, step, input, output, scratch);
      CHECK(reported ==
            doctest::Approx(pair_loss(in_before, out_before, features, context,
                                      positive))
                .epsilon(1e-10));

      // Analytic gradient recovered from the parameter delta, versus a central
      // finite difference of the oracle loss.
      const double eps = 1e-6;
      auto check_param = [&](EmbeddingTable& table, EmbeddingTable& before,
                             std::size_t flat) {
        const double analytic = (before.data[flat] - table.data[flat]) / step;
        const double saved = before.data[flat];
        before.data[flat] = saved + eps;
        const double up = pair_loss(&table == &input ? before : in_before,
                                    &table == &input ? out_before : before,
                                    features, context, positive);
        before.data[flat] = saved - eps;
        const double down = pair_loss(&table == &input ? before : in_before,
                                      &table == &input ? out_before : before,
                                      features, context, positive);
        before.data[flat] = saved;
        const double fd = (up - down) / (2 * eps);
        const double scale = std::max({1e-8, std::abs(fd), std::abs(analytic)});
        CHECK(std::abs(fd - analytic) / scale < 1e-4);
      };
      for (std::uint32_t f : {features[0], features.back()})
        for (std::size_t d = 0; d < dim; ++d)
          check_param(input, in_before, static_cast<std::size_t>(f) * dim + d);
      for (std::size_t d = 0; d < dim; ++d)
        check_param(output, out_before,
                    static_cast<std::size_t>(context) * dim + d);
    }
  }

  SUBCASE("positive pairs pull the activation up, negatives push it down") {
    EmbeddingTable input(3, 4), output(3, 4);
    fill(input);
    fill(output);
    std::vector<std::uint32_t> features{0, 2};
    std::vector<double> scratch(8);

    double before = activation(input, output, features, 1);
    sgd_step(features, 1, true, 0.1, input, output, scratch);
    CHECK(activation(input, output, features, 1) > before);

    before = activation(input, output, features, 2);
    sgd_step(features, 2, false, 0.1, input, output, scratch);
    CHECK(activation(input, output, features, 2) < before);
  }

  SUBCASE("untouched rows stay untouched") {
    EmbeddingTable input(4, 3), output(4, 3);
    fill(input);
    fill(output);
    EmbeddingTable in_before = input, out_before = output;
    std::vector<double> scratch(6);
    sgd_step(std::vector<std::uint32_t>{1}, 2, true, 0.1, input, output, scratch);
    for (std::size_t d = 0; d < 3; ++d) {
      CHECK(input.data[0 * 3 + d] == in_before.data[0 * 3 + d]);
      CHECK(input.data[3 * 3 + d] == in_before.data[3 * 3 + d]);
      CHECK(output.data[0 * 3 + d] == out_before.data[0 * 3 + d]);
    }
  }

  SUBCASE("validation and divergence") {
    EmbeddingTable input(2, 3), output(2, 3);
    std::vector<double> scratch(6), small(5);
    CHECK_THROWS_WITH_AS(
        sgd_step(std::vector<std::uint32_t>{}, 0, true, 0.1, input, output, scratch),
        doctest::Contains("empty feature list"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        sgd_step(std::vector<std::uint32_t>{0}, 0, true, 0.1, input, output, small),
        doctest::Contains("scratch too small"), std::runtime_error);

    for (double& x : input.data) x = 1e200;
    for (double& x : output.data) x = 1e200;
    CHECK_THROWS_WITH_AS(
        sgd_step(std::vector<std::uint32_t>{0}, 0, true, 0.1, input, output, scratch),
        doctest::Contains("diverged"), std::runtime_error);
  }
}

TEST_CASE("vocabulary and noise distribution") {
  SUBCASE("tokens intern in first-appearance order with counts") {
    auto corpus = corpus_of({{"a", "b", "c"}});
    CHECK(corpus.vocab.size() == 3);
    CHECK(corpus.vocab.token(0) == "a");
    CHECK(corpus.vocab.count(*corpus.vocab.find("b")) == 1);
    CHECK(corpus.vocab.total_count() == 3);

    auto rep = corpus_of({{"a", "a", "a"}});
    CHECK(rep.vocab.size() == 1);
    CHECK(rep.vocab.count(0) == 3);
    CHECK(rep.token_count() == 3);
  }

  SUBCASE("noise probabilities follow the 0.75-power law") {
    // counts a:4, b:1 -> P(a) = 4^0.75 / (4^0.75 + 1)
    auto corpus = corpus_of({{"a", "a", "a", "a", "b"}});
    const double expected = std::pow(4.0, 0.75) / (std::pow(4.0, 0.75) + 1.0);
    CHECK(corpus.vocab.noise_probability(0) == doctest::Approx(expected));
    CHECK(expected == doctest::Approx(0.7388).epsilon(1e-3));
    CHECK(corpus.vocab.noise_probability(0) +
              corpus.vocab.noise_probability(1) ==
          doctest::Approx(1.0));
  }

  SUBCASE("noise sampling maps the unit interval through the CDF") {
    auto corpus = corpus_of({{"a", "a", "a", "a", "b"}});
    const double pa = corpus.vocab.noise_probability(0);
    CHECK(corpus.vocab.sample_noise(0.0) == 0);
    CHECK(corpus.vocab.sample_noise(pa - 1e-9) == 0);
    CHECK(corpus.vocab.sample_noise(pa + 1e-9) == 1);
    CHECK(corpus.vocab.sample_noise(0.999999999) == 1);
  }

  SUBCASE("empty corpora are rejected") {
    CHECK_THROWS_WITH_AS(corpus_of({}), doctest::Contains("empty corpus"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(corpus_of({{}, {}}), doctest::Contains("empty corpus"),
                         std::runtime_error);
  }

  SUBCASE("walk corpora re-encode node names") {
    Graph g({"x", "y", "z"}, {{0, 1}, {1, 2}});
    WalkCorpus walks;
    walks.walks = {{0, 1, 2}, {1, 0}};
    auto corpus = build_corpus(walks, g);
    CHECK(corpus.vocab.size() == 3);
    CHECK(corpus.vocab.token(0) == "x");
    CHECK(corpus.sentences.size() == 2);
    CHECK(corpus.sentences[0] == std::vector<std::uint32_t>{0, 1, 2});
  }

  SUBCASE("corpus files round trip through the sentence loader") {
    TempDir tmp;
    auto path = write_file(tmp.file("c.txt"), "a b\nb c b\n");
    auto corpus = load_corpus_file(path);
    CHECK(corpus.vocab.size() == 3);
    CHECK(corpus.vocab.count(*corpus.vocab.find("b")) == 3);
    CHECK(corpus.sentences.size() == 2);
  }
}

TEST_CASE("training") {
  auto tiny = corpus_of({{"a", "b", "c", "a", "b"}, {"c", "a", "b", "c"}});
  TrainConfig cfg;
  cfg.dimension = 8;
  cfg.window = 2;
  cfg.epochs = 3;
  cfg.negatives = 2;
  cfg.seed = 5;

  SUBCASE("ids come out in vocabulary order") {
    auto emb = train_embeddings(tiny, cfg, EmbeddingMode::W2v);
    CHECK(emb.ids() == std::vector<std::string>{"a", "b", "c"});
    CHECK(emb.dimension() == 8);
    CHECK(emb.mode() == EmbeddingMode::W2v);
    CHECK(emb.find("c") == std::size_t{2});
    CHECK_FALSE(emb.find("d").has_value());
    for (std::size_t i = 0; i < emb.size(); ++i)
      for (double v : emb.row(i)) CHECK(std::isfinite(v));
  }

  SUBCASE("deterministic for a fixed seed, sensitive to it otherwise") {
    auto a = train_embeddings(tiny, cfg, EmbeddingMode::W2v);
    auto b = train_embeddings(tiny, cfg, EmbeddingMode::W2v);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t d = 0; d < a.dimension(); ++d)
        CHECK(a.row(i)[d] == b.row(i)[d]);

    TrainConfig other = cfg;
    other.seed = 6;
    auto c = train_embeddings(tiny, other, EmbeddingMode::W2v);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.size() && !any_difference; ++i)
      for (std::size_t d = 0; d < a.dimension(); ++d)
        if (a.row(i)[d] != c.row(i)[d]) {
          any_difference = true;
          break;
        }
    CHECK(any_difference);
  }

  SUBCASE("without n-grams the subword trainer degenerates to whole tokens") {
    TrainConfig ft = cfg;
    ft.min_ngram = 10;  // longer than any padded token here
    ft.max_ngram = 12;
    ft.bucket_count = 32;
    auto w2v = train_embeddings(tiny, cfg, EmbeddingMode::W2v);
    auto sub = train_embeddings(tiny, ft, EmbeddingMode::Ft);
    REQUIRE(w2v.size() == sub.size());
    for (std::size_t i = 0; i < w2v.size(); ++i)
      for (std::size_t d = 0; d < w2v.dimension(); ++d)
        CHECK(w2v.row(i)[d] == sub.row(i)[d]);  // bit-identical
  }

  SUBCASE("subword features change the result when n-grams exist") {
    TrainConfig ft = cfg;
    ft.min_ngram = 1;
    ft.max_ngram = 3;
    ft.bucket_count = 64;
    auto w2v = train_embeddings(tiny, cfg, EmbeddingMode::W2v);
    auto sub = train_embeddings(tiny, ft, EmbeddingMode::Ft);
    bool any_difference = false;
    for (std::size_t i = 0; i < w2v.size() && !any_difference; ++i)
      for (std::size_t d = 0; d < w2v.dimension(); ++d)
        if (w2v.row(i)[d] != sub.row(i)[d]) {
          any_difference = true;
          break;
        }
    CHECK(any_difference);
  }

  SUBCASE("two cliques separate in embedding space") {
    auto [g, labels] = generate_sbm({16, 2, 1.0, 0.0, 3});
    WalkConfig wcfg;
    wcfg.mode = WalkMode::Uniform;
    wcfg.walks_per_start = 10;
    wcfg.walk_length = 10;
    wcfg.seed = 5;
    auto corpus = build_corpus(generate_walks(g, nullptr, wcfg), g);

    TrainConfig tcfg;
    tcfg.dimension = 16;
    tcfg.window = 4;
    tcfg.epochs = 8;
    tcfg.seed = 5;
    auto emb = train_embeddings(corpus, tcfg, EmbeddingMode::W2v);

    std::vector<std::pair<std::size_t, std::size_t>> intra, inter;
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = i + 1; j < 16; ++j) {
        auto ri = *emb.find(g.node_name(static_cast<Graph::NodeId>(i)));
        auto rj = *emb.find(g.node_name(static_cast<Graph::NodeId>(j)));
        if ((i < 8) == (j < 8))
          intra.emplace_back(ri, rj);
        else
          inter.emplace_back(ri, rj);
      }
    CHECK(mean_cosine(emb, intra) > mean_cosine(emb, inter) + 0.1);
  }

  SUBCASE("frequent-token subsampling still trains") {
    std::vector<std::vector<std::string>> skewed;
    for (int i = 0; i < 30; ++i) skewed.push_back({"hub", "a", "hub", "b"});
    auto corpus = corpus_of(skewed);
    TrainConfig sub = cfg;
    sub.subsample = 1e-2;
    auto emb = train_embeddings(corpus, sub, EmbeddingMode::W2v);
    for (std::size_t i = 0; i < emb.size(); ++i)
      for (double v : emb.row(i)) CHECK(std::isfinite(v));
  }

  SUBCASE("multi-worker training completes with finite vectors") {
    TrainConfig threaded = cfg;
    threaded.workers = 2;
    auto emb = train_embeddings(tiny, threaded, EmbeddingMode::W2v);
    for (std::size_t i = 0; i < emb.size(); ++i)
      for (double v : emb.row(i)) CHECK(std::isfinite(v));
  }

  SUBCASE("validation") {
    auto expect = [&](TrainConfig bad, EmbeddingMode mode, const char* text) {
      CHECK_THROWS_WITH_AS(train_embeddings(tiny, bad, mode),
                           doctest::Contains(text), std::runtime_error);
    };
    CHECK_THROWS_WITH_AS(train_embeddings(tiny, cfg, EmbeddingMode::Com),
                         doctest::Contains("combined modes"), std::runtime_error);
    TrainConfig bad = cfg;
    bad.dimension = 0;
    expect(bad, EmbeddingMode::W2v, "dimension");
    bad = cfg;
    bad.window = 0;
    expect(bad, EmbeddingMode::W2v, "window");
    bad = cfg;
    bad.epochs = 0;
    expect(bad, EmbeddingMode::W2v, "epochs");
    bad = cfg;
    bad.negatives = 0;
    expect(bad, EmbeddingMode::W2v, "negatives");
    bad = cfg;
    bad.initial_step = 0.0;
    expect(bad, EmbeddingMode::W2v, "step");
    bad = cfg;
    bad.min_ngram = 5;
    bad.max_ngram = 4;
    expect(bad, EmbeddingMode::Ft, "min_ngram");
    bad = cfg;
    bad.bucket_count = 0;
    expect(bad, EmbeddingMode::Ft, "bucket");
  }
}

TEST_CASE("combining embeddings") {
  EmbeddingMatrix a(EmbeddingMode::W2v, {"x", "y"}, 2);
  a.row(0)[0] = 1;
  a.row(0)[1] = 2;
  a.row(1)[0] = 3;
  a.row(1)[1] = 4;

  SUBCASE("concatenation aligns rows by id even when permuted") {
    EmbeddingMatrix b(EmbeddingMode::Ft, {"y", "x"}, 3);
    b.row(0)[0] = 9;
    b.row(0)[1] = 8;
    b.row(0)[2] = 7;
    b.row(1)[0] = 6;
    b.row(1)[1] = 5;
    b.row(1)[2] = 4;
    auto out = combine(a, b, EmbeddingMode::Com);
    CHECK(out.mode() == EmbeddingMode::Com);
    CHECK(out.dimension() == 5);
    CHECK(out.ids() == std::vector<std::string>{"x", "y"});
    CHECK(std::vector<double>(out.row(0).begin(), out.row(0).end()) ==
          std::vector<double>{1, 2, 6, 5, 4});
    CHECK(std::vector<double>(out.row(1).begin(), out.row(1).end()) ==
          std::vector<double>{3, 4, 9, 8, 7});
  }

  SUBCASE("sum with a zero matrix is the identity") {
    EmbeddingMatrix zero(EmbeddingMode::Ft, {"x", "y"}, 2);
    auto out = combine(a, zero, EmbeddingMode::Sum);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t d = 0; d < 2; ++d) CHECK(out.row(i)[d] == a.row(i)[d]);
  }

  SUBCASE("average of a matrix with itself is the identity") {
    auto out = combine(a, a, EmbeddingMode::Avg);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t d = 0; d < 2; ++d) CHECK(out.row(i)[d] == a.row(i)[d]);
  }

  SUBCASE("mismatched id sets are spelled out") {
    EmbeddingMatrix b(EmbeddingMode::Ft, {"y", "z"}, 2);
    CHECK_THROWS_WITH_AS(combine(a, b, EmbeddingMode::Sum),
                         doctest::Contains("id sets differ (1 missing from second input, 1 from first; -x; +z)"),
                         std::runtime_error);
  }

  SUBCASE("sum and avg need equal dimensions") {
    EmbeddingMatrix b(EmbeddingMode::Ft, {"x", "y"}, 3);
    CHECK_THROWS_WITH_AS(combine(a, b, EmbeddingMode::Sum),
                         doctest::Contains("equal dimensions"), std::runtime_error);
    CHECK_NOTHROW(combine(a, b, EmbeddingMode::Com));
  }

  SUBCASE("base schemes are rejected") {
    CHECK_THROWS_WITH_AS(combine(a, a, EmbeddingMode::W2v),
                         doctest::Contains("com, sum or avg"), std::runtime_error);
  }

  SUBCASE("duplicate ids cannot form a matrix") {
    CHECK_THROWS_WITH_AS(EmbeddingMatrix(EmbeddingMode::W2v, {"x", "x"}, 2),
                         doctest::Contains("duplicate embedding id"),
                         std::runtime_error);
  }
}

TEST_CASE("embedding files") {
  TempDir tmp;

  SUBCASE("round trip is bit exact") {
    EmbeddingMatrix m(EmbeddingMode::W2v, {"n1", "n2", "n3"}, 3);
    Rng rng(7);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t d = 0; d < 3; ++d)
        m.row(i)[d] = rng.next_range(-5.0, 5.0) * std::pow(10.0, double(i) - 1);
    m.row(2)[1] = -0.0;
    m.row(2)[2] = 1e-300;

    auto path = tmp.file("emb.txt");
    save_embeddings(m, path);
    auto back = load_embeddings(path, EmbeddingMode::W2v);
    REQUIRE(back.size() == 3);
    REQUIRE(back.dimension() == 3);
    CHECK(back.ids() == m.ids());
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t d = 0; d < 3; ++d) CHECK(back.row(i)[d] == m.row(i)[d]);
  }

  SUBCASE("header and row shape are validated") {
    auto bad_header = write_file(tmp.file("h.txt"), "3\n");
    CHECK_THROWS_WITH_AS(load_embeddings(bad_header),
                         doctest::Contains("h.txt:1: expected 'count dimension'"),
                         std::runtime_error);

    auto bad_row = write_file(tmp.file("r.txt"), "1 3\nn1 0.5 0.25\n");
    CHECK_THROWS_WITH_AS(load_embeddings(bad_row),
                         doctest::Contains("r.txt:2: expected id plus 3 values, got 3 token(s)"),
                         std::runtime_error);

    auto bad_count = write_file(tmp.file("c.txt"), "2 2\nn1 0 0\n");
    CHECK_THROWS_WITH_AS(load_embeddings(bad_count),
                         doctest::Contains("header promises 2 rows, found 1"),
                         std::runtime_error);

    auto bad_value = write_file(tmp.file("v.txt"), "1 2\nn1 0.5 oops\n");
    CHECK_THROWS_WITH_AS(load_embeddings(bad_value),
                         doctest::Contains("embedding value"), std::runtime_error);

    auto empty = write_file(tmp.file("e.txt"), "");
    CHECK_THROWS_WITH_AS(load_embeddings(empty), doctest::Contains("empty"),
                         std::runtime_error);

    auto zero_dim = write_file(tmp.file("z.txt"), "1 0\nn1\n");
    CHECK_THROWS_WITH_AS(load_embeddings(zero_dim),
                         doctest::Contains("dimension must be positive"),
                         std::runtime_error);
  }
}
