#include <cctype>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "exem/dominating_set.hpp"
#include "exem/evaluation.hpp"
#include "exem/graph.hpp"
#include "exem/pipeline.hpp"
#include "exem/skipgram.hpp"
#include "exem/text_io.hpp"
#include "exem/vocab.hpp"
#include "exem/walker.hpp"

namespace {

using namespace exem;

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("EXEM_OUT_DIR"); env && *env) return env;
  return "exem-out";
}

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::uint32_t workers = 1;
  bool force = false;
};

// Walk/train knobs shared by `walk`, `train`, `eval-linkpred` and `pipeline`.
// Each setting funnels through apply_config_entry so flag and config-file
// handling cannot drift apart.
struct RecipeFlags {
  void attach_walk(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "walk mode: exem-relaxed, exem-strict, uniform");
    cmd->add_option("--walks-per-start", walks_per_start, "walks per start node");
    cmd->add_option("--length,--walk-length", walk_length, "nodes per walk");
    cmd->add_option("--walks-total", walks_total,
                    "total walk budget, spread over start nodes");
  }
  void attach_train(CLI::App* cmd) {
    cmd->add_option("--dim", dim, "embedding dimension");
    cmd->add_option("--window", window, "maximum skip-gram window");
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--negatives", negatives, "negative samples per pair");
    cmd->add_option("--step", step, "initial learning step");
    cmd->add_option("--min-ngram", min_ngram, "shortest character n-gram (ft)");
    cmd->add_option("--max-ngram", max_ngram, "longest character n-gram (ft)");
    cmd->add_option("--buckets", buckets, "hashed n-gram bucket count (ft)");
    cmd->add_option("--subsample", subsample,
                    "frequent-token downsampling threshold, 0 disables");
  }

  void apply(CLI::App* cmd, PipelineConfig& config) const {
    auto set = [&](const char* flag, const char* key, const std::string& value) {
      const auto* opt = cmd->get_option_no_throw(flag);
      if (opt && opt->count()) apply_config_entry(config, key, value);
    };
    set("--mode", "mode", mode);
    set("--walks-per-start", "walks_per_start", std::to_string(walks_per_start));
    set("--length", "walk_length", std::to_string(walk_length));
    set("--walks-total", "walks_total", std::to_string(walks_total));
    set("--dim", "dim", std::to_string(dim));
    set("--window", "window", std::to_string(window));
    set("--epochs", "epochs", std::to_string(epochs));
    set("--negatives", "negatives", std::to_string(negatives));
    set("--step", "step", format_double(step));
    set("--min-ngram", "min_ngram", std::to_string(min_ngram));
    set("--max-ngram", "max_ngram", std::to_string(max_ngram));
    set("--buckets", "buckets", std::to_string(buckets));
    set("--subsample", "subsample", format_double(subsample));
  }

  std::string mode = "exem-relaxed";
  std::uint32_t walks_per_start = WalkConfig{}.walks_per_start;
  std::uint32_t walk_length = WalkConfig{}.walk_length;
  std::uint64_t walks_total = 0;
  std::uint32_t dim = TrainConfig{}.dimension;
  std::uint32_t window = TrainConfig{}.window;
  std::uint32_t epochs = TrainConfig{}.epochs;
  std::uint32_t negatives = TrainConfig{}.negatives;
  double step = TrainConfig{}.initial_step;
  std::uint32_t min_ngram = TrainConfig{}.min_ngram;
  std::uint32_t max_ngram = TrainConfig{}.max_ngram;
  std::uint32_t buckets = TrainConfig{}.bucket_count;
  double subsample = TrainConfig{}.subsample;
};

void print_report(const EvalReport& report) { std::cout << format_report(report); }

// Builds a query vector from an expression over stored ids joined by '+' or
// '-' (optional leading sign), e.g. "12+97" or "alice-bob". Ids containing
// those characters are not expressible here; `--id` covers single lookups.
std::vector<double> query_vector(const EmbeddingMatrix& emb,
                                 const std::string& expr) {
  std::vector<double> query(emb.dimension(), 0.0);
  const std::size_t n = expr.size();
  std::size_t i = 0;
  double sign = 1.0;
  while (i < n && std::isspace(static_cast<unsigned char>(expr[i]))) ++i;
  if (i < n && (expr[i] == '+' || expr[i] == '-')) {
    sign = expr[i] == '-' ? -1.0 : 1.0;
    ++i;
  }
  while (true) {
    const std::size_t from = i;
    while (i < n && expr[i] != '+' && expr[i] != '-') ++i;
    const std::string id{trim(std::string_view(expr).substr(from, i - from))};
    if (id.empty())
      throw std::runtime_error("query expression '" + expr + "' has an empty term");
    const auto row = emb.find(id);
    if (!row)
      throw std::runtime_error("unknown embedding id '" + id + "' in query");
    const auto v = emb.row(*row);
    for (std::size_t d = 0; d < query.size(); ++d) query[d] += sign * v[d];
    if (i >= n) break;
    sign = expr[i] == '-' ? -1.0 : 1.0;
    ++i;
  }
  return query;
}

int run(int argc, char** argv) {
  CLI::App app{"dominating-set guided graph embeddings"};
  app.require_subcommand(1);
  app.fallthrough();
  // Usage errors share the one-line error contract of domain errors.
  app.failure_message([](const CLI::App*, const CLI::Error& e) {
    return "error: " + std::string(e.what()) + "\n";
  });

  GlobalOptions global;
  app.add_option("--seed", global.seed, "random seed")->capture_default_str();
  app.add_option("--workers", global.workers, "worker threads")
      ->capture_default_str();
  app.add_flag("--force", global.force, "recompute existing artifacts");

  const auto out_dir = default_out_dir();

  // synth -------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a planted-partition graph");
  SbmSpec sbm;
  std::string synth_out = (out_dir / "graph.txt").string();
  std::string synth_labels = (out_dir / "labels.txt").string();
  synth->add_option("--nodes", sbm.nodes, "node count")->required();
  synth->add_option("--communities", sbm.communities, "community count")
      ->capture_default_str();
  synth->add_option("--p-in", sbm.p_in, "within-community edge probability")
      ->required();
  synth->add_option("--p-out", sbm.p_out, "cross-community edge probability")
      ->required();
  synth->add_option("--out", synth_out, "edge list output")->capture_default_str();
  synth->add_option("--labels-out", synth_labels, "label file output")
      ->capture_default_str();
  synth->callback([&] {
    sbm.seed = global.seed;
    const auto [graph, labels] = generate_sbm(sbm);
    save_graph(graph, synth_out);
    save_labels(labels, graph, synth_labels);
    std::cout << "nodes=" << graph.node_count() << " edges=" << graph.edge_count()
              << " communities=" << sbm.communities << "\n";
  });

  // doms --------------------------------------------------------------
  auto* doms = app.add_subcommand("doms", "grow an independent dominating set");
  std::string doms_graph;
  std::string doms_out = (out_dir / "dominating_set.txt").string();
  doms->add_option("--graph", doms_graph, "edge list input")->required();
  doms->add_option("--out", doms_out, "dominating set output")
      ->capture_default_str();
  doms->callback([&] {
    const auto graph = load_graph(doms_graph);
    const auto ds = find_dominating_set(graph, global.seed);
    save_dominating_set(ds, graph, doms_out);
    std::cout << "size=" << ds.size() << " nodes=" << graph.node_count() << "\n";
  });

  // walk --------------------------------------------------------------
  auto* walk = app.add_subcommand("walk", "sample random walks");
  std::string walk_graph, walk_doms;
  std::string walk_out = (out_dir / "walks.txt").string();
  RecipeFlags walk_flags;
  walk->add_option("--graph", walk_graph, "edge list input")->required();
  walk->add_option("--doms", walk_doms, "dominating set input (exem modes)");
  walk->add_option("--out", walk_out, "walk corpus output")->capture_default_str();
  walk_flags.attach_walk(walk);
  walk->callback([&] {
    const auto graph = load_graph(walk_graph);
    PipelineConfig cfg;
    walk_flags.apply(walk, cfg);
    WalkConfig wcfg = cfg.walk;
    wcfg.seed = global.seed;
    wcfg.workers = global.workers;

    WalkCorpus corpus;
    if (wcfg.mode == WalkMode::Uniform) {
      if (!walk_doms.empty())
        throw std::runtime_error("uniform walk mode takes no dominating set");
      corpus = generate_walks(graph, nullptr, wcfg);
      save_corpus(corpus, graph, walk_out);
      std::cout << "walks=" << corpus.walks.size() << "\n";
    } else {
      if (walk_doms.empty())
        throw std::runtime_error("exem walk modes need --doms");
      const auto ds = load_dominating_set(walk_doms, graph);
      corpus = generate_walks(graph, &ds, wcfg);
      save_corpus(corpus, graph, walk_out);
      const auto stats = walk_stats(corpus, ds);
      std::cout << "walks=" << corpus.walks.size()
                << " mean_length=" << format_double(stats.mean_length)
                << " second_dominating="
                << format_double(stats.fraction_with_second_dominating)
                << " start_coverage=" << format_double(stats.start_coverage)
                << "\n";
    }
  });

  // train ---------------------------------------------------------------
  auto* train = app.add_subcommand("train", "train skip-gram embeddings");
  std::string train_corpus, train_mode = "w2v";
  std::string train_out;
  RecipeFlags train_flags;
  train->add_option("--corpus", train_corpus, "walk corpus input")->required();
  train->add_option("--mode", train_mode, "w2v or ft")->capture_default_str();
  train->add_option("--out", train_out,
                    "embedding output (default <out-dir>/embeddings_<mode>.txt)");
  train_flags.attach_train(train);
  train->callback([&] {
    const auto mode = embedding_mode_from(train_mode);
    if (!is_base_mode(mode))
      throw std::runtime_error("train handles modes w2v and ft; use combine for " +
                               train_mode);
    const auto corpus = load_corpus_file(train_corpus);
    PipelineConfig cfg;
    train_flags.apply(train, cfg);
    TrainConfig tcfg = cfg.train;
    tcfg.seed = global.seed;
    tcfg.workers = global.workers;
    const auto emb = train_embeddings(corpus, tcfg, mode);
    const std::string out_path =
        train_out.empty()
            ? (out_dir / ("embeddings_" + std::string(to_string(mode)) + ".txt"))
                  .string()
            : train_out;
    save_embeddings(emb, out_path);
    std::cout << "vocab=" << emb.size() << " dim=" << emb.dimension()
              << " tokens=" << corpus.token_count() << "\n";
  });

  // combine -------------------------------------------------------------
  auto* comb = app.add_subcommand("combine", "combine two embedding files");
  std::string comb_a, comb_b, comb_scheme = "concat";
  std::string comb_out;
  comb->add_option("--a", comb_a, "first embedding file")->required();
  comb->add_option("--b", comb_b, "second embedding file")->required();
  comb->add_option("--scheme", comb_scheme, "concat, sum or avg")
      ->capture_default_str();
  comb->add_option("--out", comb_out, "combined embedding output")->required();
  comb->callback([&] {
    const auto scheme = embedding_mode_from(comb_scheme);
    if (is_base_mode(scheme))
      throw std::runtime_error("combine expects scheme concat, sum or avg");
    const auto a = load_embeddings(comb_a);
    const auto b = load_embeddings(comb_b);
    const auto out = combine(a, b, scheme);
    save_embeddings(out, comb_out);
    std::cout << "ids=" << out.size() << " dim=" << out.dimension()
              << " scheme=" << to_string(scheme) << "\n";
  });

  // eval-classify ---------------------------------------------------------
  auto* clf = app.add_subcommand("eval-classify",
                                 "node classification from an embedding");
  std::string clf_graph, clf_labels, clf_emb, clf_out;
  ClassificationOptions clf_opts;
  clf->add_option("--graph", clf_graph, "edge list input")->required();
  clf->add_option("--labels", clf_labels, "label file input")->required();
  clf->add_option("--embeddings", clf_emb, "embedding file input")->required();
  clf->add_option("--train-ratio", clf_opts.train_ratio, "training fraction")
      ->capture_default_str();
  clf->add_option("--reps", clf_opts.repetitions, "repetitions")
      ->capture_default_str();
  double clf_threshold = 0.5;
  auto* thr =
      clf->add_option("--threshold", clf_threshold,
                      "fixed decision threshold instead of top-k selection");
  clf->add_option("--report", clf_out, "also write the report to this file");
  clf->callback([&] {
    const auto graph = load_graph(clf_graph);
    const auto labels = load_labels(clf_labels, graph);
    const auto emb = load_embeddings(clf_emb);
    clf_opts.seed = global.seed;
    if (thr->count()) {
      clf_opts.fixed_threshold = true;
      clf_opts.threshold = clf_threshold;
    }
    const auto report = evaluate_classification(emb, graph, labels, clf_opts);
    print_report(report);
    if (!clf_out.empty()) write_report(report, clf_out);
  });

  // eval-linkpred ----------------------------------------------------------
  auto* lp = app.add_subcommand("eval-linkpred",
                                "link prediction with re-embedding per split");
  std::string lp_graph, lp_variant = "w2v", lp_op = "hadamard", lp_out;
  LinkPredictionOptions lp_opts;
  RecipeFlags lp_flags;
  lp->add_option("--graph", lp_graph, "edge list input")->required();
  lp->add_option("--variant", lp_variant, "embedding variant: w2v, ft, com, sum, avg")
      ->capture_default_str();
  lp->add_option("--op", lp_op, "pair operator: average, hadamard, weighted-l1, weighted-l2")
      ->capture_default_str();
  lp->add_option("--hide-ratio", lp_opts.hide_ratio, "fraction of edges hidden")
      ->capture_default_str();
  lp->add_option("--reps", lp_opts.repetitions, "repetitions")->capture_default_str();
  lp->add_option("--report", lp_out, "also write the report to this file");
  lp_flags.attach_walk(lp);
  lp_flags.attach_train(lp);
  lp->callback([&] {
    const auto graph = load_graph(lp_graph);
    PipelineConfig cfg;
    lp_flags.apply(lp, cfg);
    EmbedRecipe recipe{cfg.walk, cfg.train, embedding_mode_from(lp_variant)};
    recipe.walk.workers = global.workers;
    recipe.train.workers = global.workers;
    lp_opts.op = edge_operator_from(lp_op);
    lp_opts.seed = global.seed;
    const auto report =
        evaluate_link_prediction(graph, make_embedder(recipe), lp_opts);
    print_report(report);
    if (!lp_out.empty()) write_report(report, lp_out);
  });

  // eval-recommend -----------------------------------------------------------
  auto* rec = app.add_subcommand("eval-recommend",
                                 "rank a topic cluster around its centroid");
  std::string rec_graph, rec_labels, rec_emb, rec_topic, rec_out;
  std::size_t rec_k = 10;
  rec->add_option("--graph", rec_graph, "edge list input")->required();
  rec->add_option("--labels", rec_labels, "label file input")->required();
  rec->add_option("--embeddings", rec_emb, "embedding file input")->required();
  rec->add_option("--topic", rec_topic, "label to recommend within")->required();
  rec->add_option("--k", rec_k, "list length")->capture_default_str();
  rec->add_option("--out", rec_out, "also write the ranked list to this file");
  rec->callback([&] {
    const auto graph = load_graph(rec_graph);
    const auto labels = load_labels(rec_labels, graph);
    const auto emb = load_embeddings(rec_emb);
    const auto ranked = recommend(emb, graph, labels, rec_topic, rec_k);
    std::string text;
    for (const auto& entry : ranked)
      text += entry.id + " " + format_double(entry.score) + "\n";
    std::cout << text;
    if (!rec_out.empty()) write_text_atomic(rec_out, text);
  });

  // nearest -------------------------------------------------------------------
  auto* near = app.add_subcommand("nearest", "nearest neighbors of a node or query");
  std::string near_emb, near_id, near_query;
  std::size_t near_k = 10;
  near->add_option("--embeddings", near_emb, "embedding file input")->required();
  auto* near_id_opt =
      near->add_option("--id", near_id, "query id (result excludes it)");
  auto* near_query_opt = near->add_option(
      "--query", near_query, "id expression, e.g. 'a+b' or 'x-y'");
  near_id_opt->excludes(near_query_opt);
  near->add_option("--k", near_k, "neighbor count")->capture_default_str();
  near->callback([&] {
    const auto emb = load_embeddings(near_emb);
    RankedList ranked;
    if (near_query_opt->count()) {
      ranked = nearest(emb, query_vector(emb, near_query), near_k);
    } else if (near_id_opt->count()) {
      ranked = nearest_to_id(emb, near_id, near_k);
    } else {
      throw std::runtime_error("nearest needs --id or --query");
    }
    for (const auto& entry : ranked)
      std::cout << entry.id << " " << format_double(entry.score) << "\n";
  });

  // pipeline --------------------------------------------------------------------
  auto* pipe = app.add_subcommand("pipeline", "run every stage end to end");
  std::string pipe_config, pipe_graph, pipe_labels, pipe_out, pipe_variant,
      pipe_eval, pipe_topic, pipe_op;
  double pipe_train_ratio = 0.5, pipe_hide_ratio = 0.5;
  std::size_t pipe_reps = 10, pipe_k = 10;
  RecipeFlags pipe_flags;
  pipe->add_option("--config", pipe_config, "key=value config file");
  pipe->add_option("--graph", pipe_graph, "edge list input");
  pipe->add_option("--labels", pipe_labels, "label file input");
  pipe->add_option("--out", pipe_out, "artifact directory");
  pipe->add_option("--variant", pipe_variant, "w2v, ft, com, sum or avg");
  pipe->add_option("--eval", pipe_eval,
                   "comma list of evaluations: classify, linkpred, recommend");
  pipe->add_option("--train-ratio", pipe_train_ratio, "classification training fraction");
  pipe->add_option("--hide-ratio", pipe_hide_ratio, "link prediction hidden fraction");
  pipe->add_option("--reps", pipe_reps, "evaluation repetitions");
  pipe->add_option("--op", pipe_op, "link prediction pair operator");
  pipe->add_option("--topic", pipe_topic, "recommendation topic");
  pipe->add_option("--k", pipe_k, "recommendation list length");
  pipe_flags.attach_walk(pipe);
  pipe_flags.attach_train(pipe);
  pipe->callback([&] {
    PipelineConfig config;
    if (!pipe_config.empty()) {
      config = parse_config_file(pipe_config);
      // A file that leaves out_dir unset still gets the environment default.
      if (config.out_dir == PipelineConfig{}.out_dir)
        config.out_dir = out_dir.string();
    } else {
      config.out_dir = out_dir.string();
    }

    // Explicit flags win over the config file.
    auto set = [&](const char* flag, const char* key, const std::string& value) {
      if (pipe->count(flag)) apply_config_entry(config, key, value);
    };
    set("--graph", "graph", pipe_graph);
    set("--labels", "labels", pipe_labels);
    set("--out", "out_dir", pipe_out);
    set("--variant", "variant", pipe_variant);
    set("--eval", "eval", pipe_eval);
    set("--train-ratio", "train_ratio", format_double(pipe_train_ratio));
    set("--hide-ratio", "hide_ratio", format_double(pipe_hide_ratio));
    set("--reps", "reps", std::to_string(pipe_reps));
    set("--op", "op", pipe_op);
    set("--topic", "topic", pipe_topic);
    set("--k", "k", std::to_string(pipe_k));
    pipe_flags.apply(pipe, config);
    if (app.count("--seed")) config.seed = global.seed;
    if (app.count("--workers")) config.workers = global.workers;
    config.force = global.force;

    const auto result = run_pipeline(config);
    for (const auto& s : result.stages) std::cout << "stage " << s << "\n";
    for (const auto& report : result.reports) {
      std::cout << "---\n";
      print_report(report);
    }
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
