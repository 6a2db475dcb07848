#include "exem/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "exem/dominating_set.hpp"
#include "exem/rng.hpp"
#include "exem/text_io.hpp"
#include "exem/vocab.hpp"

namespace exem {

namespace {

// Stage tags folded into the run seed.
enum : std::uint64_t {
  kStageDoms = 1,
  kStageWalks = 2,
  kStageTrainW2v = 3,
  kStageTrainFt = 4,
  kStageClassify = 5,
  kStageLinkpred = 6,
};

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error("stage " + std::string(name) + ": " + e.what());
  }
}

std::vector<EmbeddingMode> base_modes(EmbeddingMode variant) {
  if (is_base_mode(variant)) return {variant};
  return {EmbeddingMode::W2v, EmbeddingMode::Ft};
}

std::uint64_t train_stage_tag(EmbeddingMode mode) {
  return mode == EmbeddingMode::Ft ? kStageTrainFt : kStageTrainW2v;
}

}  // namespace

EmbeddingMatrix embed_graph(const Graph& graph, const EmbedRecipe& recipe,
                            std::uint64_t seed) {
  WalkConfig wcfg = recipe.walk;
  wcfg.seed = mix_seed({seed, kStageWalks});

  WalkCorpus walks;
  if (wcfg.mode == WalkMode::Uniform) {
    walks = generate_walks(graph, nullptr, wcfg);
  } else {
    const auto ds = find_dominating_set(graph, mix_seed({seed, kStageDoms}));
    walks = generate_walks(graph, &ds, wcfg);
  }
  const TokenCorpus corpus = build_corpus(walks, graph);

  auto train_base = [&](EmbeddingMode mode) {
    TrainConfig tcfg = recipe.train;
    tcfg.seed = mix_seed({seed, train_stage_tag(mode)});
    return train_embeddings(corpus, tcfg, mode);
  };

  if (is_base_mode(recipe.variant)) return train_base(recipe.variant);
  return combine(train_base(EmbeddingMode::W2v), train_base(EmbeddingMode::Ft),
                 recipe.variant);
}

EmbedFn make_embedder(const EmbedRecipe& recipe) {
  return [recipe](const Graph& graph, std::uint64_t seed) {
    return embed_graph(graph, recipe, seed);
  };
}

void apply_config_entry(PipelineConfig& config, std::string_view key,
                        std::string_view value) {
  const std::string v(trim(value));
  if (key == "graph") {
    config.graph_path = v;
  } else if (key == "labels") {
    config.labels_path = v;
  } else if (key == "out_dir") {
    config.out_dir = v;
  } else if (key == "variant") {
    config.variant = embedding_mode_from(v);
  } else if (key == "mode") {
    config.walk.mode = walk_mode_from(v);
  } else if (key == "walks_per_start") {
    config.walk.walks_per_start = static_cast<std::uint32_t>(parse_u64(v, key));
  } else if (key == "walk_length") {
    config.walk.walk_length = static_cast<std::uint32_t>(parse_u64(v, key));
  } else if (key == "walks_total") {
    config.walk.walks_total = parse_u64(v, key);
  } else if (key == "dim") {
    config.train.dimension = static_cast<std::uint32_t>(parse_u64(v, key));
  } else if (key == "window") {
    config.train.window = static_cast<std::uint32_t>(parse_u64(v, key));
  } else if (key == "epochs") {
    config.train.epochs = static_cast<std::uint32_t>(parse_u64(v, key));
  } else if (key == "negatives") {
    config.train.negatives = static_cast<std::uint32_t>(parse_u64(v, key));
  } else if (key == "step") {
    config.train.initial_step = parse_double(v, key);
  } else if (key == "min_ngram") {
    config.train.min_ngram = static_cast<std::uint32_t>(parse_u64(v, key));
  } else if (key == "max_ngram") {
    config.train.max_ngram = static_cast<std::uint32_t>(parse_u64(v, key));
  } else if (key == "buckets") {
    config.train.bucket_count = static_cast<std::uint32_t>(parse_u64(v, key));
  } else if (key == "subsample") {
    config.train.subsample = parse_double(v, key);
  } else if (key == "seed") {
    config.seed = parse_u64(v, key);
  } else if (key == "workers") {
    config.workers = static_cast<std::uint32_t>(parse_u64(v, key));
  } else if (key == "eval") {
    config.evals.clear();
    for (auto part : split_on(v, ',')) {
      const std::string name(trim(part));
      if (name != "classify" && name != "linkpred" && name != "recommend")
        throw std::runtime_error("unknown eval task '" + name +
                                 "' (expected classify, linkpred or recommend)");
      config.evals.push_back(name);
    }
  } else if (key == "train_ratio") {
    config.classify.train_ratio = parse_double(v, key);
  } else if (key == "threshold") {
    config.classify.fixed_threshold = true;
    config.classify.threshold = parse_double(v, key);
  } else if (key == "reps") {
    const auto reps = parse_u64(v, key);
    config.classify.repetitions = reps;
    config.linkpred.repetitions = reps;
  } else if (key == "hide_ratio") {
    config.linkpred.hide_ratio = parse_double(v, key);
  } else if (key == "op") {
    config.linkpred.op = edge_operator_from(v);
  } else if (key == "topic") {
    config.topic = v;
  } else if (key == "k") {
    config.top_k = parse_u64(v, key);
  } else {
    throw std::runtime_error("unknown config key '" + std::string(key) + "'");
  }
}

PipelineConfig parse_config_file(const std::filesystem::path& path) {
  PipelineConfig config;
  const auto lines = read_lines(path);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = trim(lines[ln]);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    const auto where = path.string() + ":" + std::to_string(ln + 1);
    if (eq == std::string_view::npos)
      throw std::runtime_error(where + ": expected key=value");
    try {
      apply_config_entry(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }
  return config;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult result;

  // Upfront validation so misconfiguration fails before any heavy work.
  stage("config", [&] {
    if (config.graph_path.empty()) throw std::runtime_error("no graph file set");
    if (!std::filesystem::exists(config.graph_path))
      throw std::runtime_error("graph file '" + config.graph_path + "' not found");
    if (!config.labels_path.empty() && !std::filesystem::exists(config.labels_path))
      throw std::runtime_error("label file '" + config.labels_path + "' not found");
    for (const auto& e : config.evals) {
      if ((e == "classify" || e == "recommend") && config.labels_path.empty())
        throw std::runtime_error("eval task '" + e + "' needs a label file");
      if (e == "recommend" && config.topic.empty())
        throw std::runtime_error("eval task 'recommend' needs a topic");
    }
  });

  const Graph graph = stage("load", [&] { return load_graph(config.graph_path); });
  LabelMap labels;
  if (!config.labels_path.empty())
    labels = stage("load", [&] { return load_labels(config.labels_path, graph); });

  const std::filesystem::path out(config.out_dir);
  std::filesystem::create_directories(out);
  auto note_artifact = [&](const std::filesystem::path& p) {
    result.artifacts.push_back(p);
  };

  // Dominating set (skipped entirely by the uniform walk baseline).
  DominatingSet ds({}, 0, 0);
  bool have_ds = false;
  if (config.walk.mode != WalkMode::Uniform) {
    const auto ds_path = out / "dominating_set.txt";
    stage("doms", [&] {
      if (std::filesystem::exists(ds_path) && !config.force) {
        ds = load_dominating_set(ds_path, graph);
        const auto check = verify_dominating_set(graph, ds);
        if (!check.dominating || !check.independent)
          throw std::runtime_error(
              "existing artifact " + ds_path.string() +
              " is not an independent dominating set of this graph "
              "(rerun with --force to regenerate)");
        result.stages.push_back("doms (reused)");
      } else {
        ds = find_dominating_set(graph, mix_seed({config.seed, kStageDoms}));
        save_dominating_set(ds, graph, ds_path);
        result.stages.push_back("doms");
      }
    });
    have_ds = true;
    note_artifact(ds_path);
  }

  // Walks.
  const auto walks_path = out / "walks.txt";
  TokenCorpus corpus = stage("walks", [&] {
    WalkConfig wcfg = config.walk;
    wcfg.seed = mix_seed({config.seed, kStageWalks});
    wcfg.workers = config.workers;
    if (std::filesystem::exists(walks_path) && !config.force) {
      auto sentences = load_corpus_sentences(walks_path);
      for (const auto& sentence : sentences)
        for (const auto& token : sentence)
          if (!graph.find_node(token))
            throw std::runtime_error("existing artifact " + walks_path.string() +
                                     " mentions unknown node '" + token +
                                     "' (rerun with --force to regenerate)");
      result.stages.push_back("walks (reused)");
      return build_corpus(sentences);
    }
    const WalkCorpus walks =
        generate_walks(graph, have_ds ? &ds : nullptr, wcfg);
    save_corpus(walks, graph, walks_path);
    result.stages.push_back("walks");
    return build_corpus(walks, graph);
  });
  note_artifact(walks_path);

  // Training, one artifact per base mode plus one for a combined variant.
  std::vector<EmbeddingMatrix> bases;
  for (const EmbeddingMode mode : base_modes(config.variant)) {
    const std::string name = "train_" + std::string(to_string(mode));
    const auto emb_path =
        out / ("embeddings_" + std::string(to_string(mode)) + ".txt");
    bases.push_back(stage(name.c_str(), [&] {
      if (std::filesystem::exists(emb_path) && !config.force) {
        result.stages.push_back(name + " (reused)");
        return load_embeddings(emb_path, mode);
      }
      TrainConfig tcfg = config.train;
      tcfg.seed = mix_seed({config.seed, train_stage_tag(mode)});
      tcfg.workers = config.workers;
      auto emb = train_embeddings(corpus, tcfg, mode);
      save_embeddings(emb, emb_path);
      result.stages.push_back(name);
      return emb;
    }));
    note_artifact(emb_path);
  }

  EmbeddingMatrix embeddings;
  if (is_base_mode(config.variant)) {
    embeddings = std::move(bases[0]);
  } else {
    const auto emb_path =
        out / ("embeddings_" + std::string(to_string(config.variant)) + ".txt");
    embeddings = stage("combine", [&] {
      if (std::filesystem::exists(emb_path) && !config.force) {
        result.stages.push_back("combine (reused)");
        return load_embeddings(emb_path, config.variant);
      }
      auto emb = combine(bases[0], bases[1], config.variant);
      save_embeddings(emb, emb_path);
      result.stages.push_back("combine");
      return emb;
    });
    note_artifact(emb_path);
  }

  // Evaluations, in the order requested.
  for (const auto& task : config.evals) {
    if (task == "classify") {
      const auto report_path = out / "report_classify.txt";
      result.reports.push_back(stage("eval-classify", [&] {
        if (std::filesystem::exists(report_path) && !config.force) {
          result.stages.push_back("eval-classify (reused)");
          return read_report(report_path);
        }
        ClassificationOptions opts = config.classify;
        opts.seed = mix_seed({config.seed, kStageClassify});
        auto report = evaluate_classification(embeddings, graph, labels, opts);
        write_report(report, report_path);
        result.stages.push_back("eval-classify");
        return report;
      }));
      note_artifact(report_path);
    } else if (task == "linkpred") {
      const auto report_path = out / "report_linkpred.txt";
      result.reports.push_back(stage("eval-linkpred", [&] {
        if (std::filesystem::exists(report_path) && !config.force) {
          result.stages.push_back("eval-linkpred (reused)");
          return read_report(report_path);
        }
        LinkPredictionOptions opts = config.linkpred;
        opts.seed = mix_seed({config.seed, kStageLinkpred});
        EmbedRecipe recipe{config.walk, config.train, config.variant};
        recipe.walk.workers = config.workers;
        recipe.train.workers = config.workers;
        auto report =
            evaluate_link_prediction(graph, make_embedder(recipe), opts);
        write_report(report, report_path);
        result.stages.push_back("eval-linkpred");
        return report;
      }));
      note_artifact(report_path);
    } else if (task == "recommend") {
      const auto report_path = out / "report_recommend.txt";
      const auto list_path = out / "recommend.txt";
      result.reports.push_back(stage("eval-recommend", [&] {
        if (std::filesystem::exists(report_path) && !config.force) {
          result.stages.push_back("eval-recommend (reused)");
          return read_report(report_path);
        }
        const auto ranked =
            recommend(embeddings, graph, labels, config.topic, config.top_k);
        std::string list_text;
        for (const auto& entry : ranked)
          list_text += entry.id + " " + format_double(entry.score) + "\n";
        write_text_atomic(list_path, list_text);

        EvalReport report;
        report.task = "recommendation";
        report.repetitions = 1;
        report.seed = config.seed;
        report.notes.emplace_back("topic", config.topic);
        std::vector<double> scores;
        for (const auto& entry : ranked) scores.push_back(entry.score);
        double sum = 0.0;
        for (double s : scores) sum += s;
        report.set_metric("top_score", {scores.front()});
        report.set_metric("mean_score", {sum / static_cast<double>(scores.size())});
        write_report(report, report_path);
        result.stages.push_back("eval-recommend");
        return report;
      }));
      note_artifact(list_path);
      note_artifact(report_path);
    }
  }

  return result;
}

}  // namespace exem
