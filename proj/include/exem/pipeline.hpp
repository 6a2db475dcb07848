#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "exem/evaluation.hpp"
#include "exem/graph.hpp"
#include "exem/skipgram.hpp"
#include "exem/walker.hpp"

namespace exem {

// Everything needed to turn a graph into embeddings. Seeds inside walk/train
// are ignored; stage seeds are derived from the seed handed to embed_graph,
// so one number reproduces the whole run.
struct EmbedRecipe {
  WalkConfig walk;
  TrainConfig train;
  EmbeddingMode variant = EmbeddingMode::W2v;
};

// dominating set -> walks -> training (-> combine for com/sum/avg).
EmbeddingMatrix embed_graph(const Graph& graph, const EmbedRecipe& recipe,
                            std::uint64_t seed);
EmbedFn make_embedder(const EmbedRecipe& recipe);

struct PipelineConfig {
  std::string graph_path;
  std::string labels_path;  // required by classify / recommend
  std::string out_dir = "exem-out";
  EmbeddingMode variant = EmbeddingMode::W2v;
  WalkConfig walk;
  TrainConfig train;
  std::uint64_t seed = 1;
  std::uint32_t workers = 1;
  bool force = false;  // recompute even when artifacts exist
  std::vector<std::string> evals;  // subset of classify, linkpred, recommend
  ClassificationOptions classify;
  LinkPredictionOptions linkpred;
  std::string topic;
  std::size_t top_k = 10;
};

// Applies one key=value setting; unknown keys are an error.
void apply_config_entry(PipelineConfig& config, std::string_view key,
                        std::string_view value);
// key=value file, '#' comments and blank lines ignored.
PipelineConfig parse_config_file(const std::filesystem::path& path);

struct PipelineResult {
  std::vector<std::string> stages;  // e.g. "walks", "train_w2v (reused)"
  std::vector<std::filesystem::path> artifacts;
  std::vector<EvalReport> reports;
};

// Runs the stages, writing each artifact under out_dir via a .partial rename
// so interrupted runs can resume: existing valid artifacts are reused unless
// force is set. Errors are prefixed with the stage that raised them.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace exem
