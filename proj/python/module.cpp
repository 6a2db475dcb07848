#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>

#include "exem/dominating_set.hpp"
#include "exem/evaluation.hpp"
#include "exem/graph.hpp"
#include "exem/pipeline.hpp"
#include "exem/skipgram.hpp"
#include "exem/vocab.hpp"
#include "exem/walker.hpp"

namespace py = pybind11;
using namespace exem;

namespace {

Graph::NodeId node_id_of(const Graph& graph, const std::string& name) {
  auto id = graph.find_node(name);
  if (!id) throw std::runtime_error("unknown node '" + name + "'");
  return *id;
}

py::dict report_to_dict(const EvalReport& report) {
  py::dict out;
  for (const auto& name : report.metric_names)
    out[py::str(name)] = report.means.at(name);
  return out;
}

}  // namespace

PYBIND11_MODULE(_exem, m) {
  m.doc() = "Graph embeddings from dominating-set-guided random walks";

  py::class_<Graph>(m, "Graph")
      .def_property_readonly("node_count", &Graph::node_count)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def("nodes", [](const Graph& g) { return g.node_names(); })
      .def("degree",
           [](const Graph& g, const std::string& name) {
             return g.degree(node_id_of(g, name));
           })
      .def("neighbors", [](const Graph& g, const std::string& name) {
        std::vector<std::string> out;
        for (auto v : g.neighbors(node_id_of(g, name)))
          out.push_back(g.node_name(v));
        return out;
      });

  py::class_<LabelMap>(m, "LabelMap")
      .def_property_readonly("label_count", &LabelMap::label_count)
      .def("topics",
           [](const LabelMap& lm) {
             std::vector<std::string> out;
             for (std::uint32_t i = 0; i < lm.label_count(); ++i)
               out.push_back(lm.label_name(i));
             return out;
           })
      .def("labels_of", [](const LabelMap& lm, const Graph& g,
                           const std::string& name) {
        std::vector<std::string> out;
        const auto* labels = lm.labels_of(node_id_of(g, name));
        if (labels)
          for (auto l : *labels) out.push_back(lm.label_name(l));
        return out;
      });

  py::class_<EmbeddingMatrix>(m, "Embedding")
      .def_property_readonly("dim", &EmbeddingMatrix::dimension)
      .def("__len__", &EmbeddingMatrix::size)
      .def("ids", &EmbeddingMatrix::ids)
      .def("vector",
           [](const EmbeddingMatrix& e, const std::string& id) {
             auto row = e.find(id);
             if (!row) throw std::runtime_error("unknown id '" + id + "'");
             auto span = e.row(*row);
             return std::vector<double>(span.begin(), span.end());
           })
      .def("save",
           [](const EmbeddingMatrix& e, const std::string& path) {
             save_embeddings(e, path);
           })
      .def_static("load",
                  [](const std::string& path) { return load_embeddings(path); });

  m.def(
      "load_graph", [](const std::string& path) { return load_graph(path); },
      py::arg("path"));
  m.def(
      "save_graph",
      [](const Graph& g, const std::string& path) { save_graph(g, path); },
      py::arg("graph"), py::arg("path"));
  m.def(
      "load_labels",
      [](const std::string& path, const Graph& g) { return load_labels(path, g); },
      py::arg("path"), py::arg("graph"));

  m.def(
      "generate_sbm",
      [](std::uint32_t nodes, std::uint32_t communities, double p_in, double p_out,
         std::uint64_t seed) {
        SbmSpec spec;
        spec.nodes = nodes;
        spec.communities = communities;
        spec.p_in = p_in;
        spec.p_out = p_out;
        spec.seed = seed;
        auto [graph, labels] = generate_sbm(spec);
        return py::make_tuple(std::move(graph), std::move(labels));
      },
      py::arg("nodes"), py::arg("communities"), py::arg("p_in"), py::arg("p_out"),
      py::arg("seed") = 1);

  m.def(
      "find_dominating_set",
      [](const Graph& g, std::uint64_t seed) {
        const auto ds = find_dominating_set(g, seed);
        std::vector<std::string> names;
        for (auto mb : ds.members()) names.push_back(g.node_name(mb));
        return names;
      },
      py::arg("graph"), py::arg("seed") = 1);

  m.def(
      "verify_dominating_set",
      [](const Graph& g, const std::vector<std::string>& members) {
        std::vector<Graph::NodeId> ids;
        for (const auto& name : members) ids.push_back(node_id_of(g, name));
        const DominatingSet ds(ids, g.node_count(), 0);
        const auto report = verify_dominating_set(g, ds);
        return py::make_tuple(report.dominating, report.independent);
      },
      py::arg("graph"), py::arg("members"));

  m.def(
      "generate_walks",
      [](const Graph& g, const std::optional<std::vector<std::string>>& members,
         const std::string& mode, std::uint32_t walks_per_start,
         std::uint32_t walk_length, std::uint64_t seed) {
        WalkConfig config;
        config.mode = walk_mode_from(mode);
        config.walks_per_start = walks_per_start;
        config.walk_length = walk_length;
        config.seed = seed;
        std::optional<DominatingSet> ds;
        if (members) {
          std::vector<Graph::NodeId> ids;
          for (const auto& name : *members) ids.push_back(node_id_of(g, name));
          ds.emplace(ids, g.node_count(), seed);
        }
        const auto corpus = generate_walks(g, ds ? &*ds : nullptr, config);
        std::vector<std::vector<std::string>> out;
        for (const auto& walk : corpus.walks) {
          std::vector<std::string> names;
          for (auto u : walk) names.push_back(g.node_name(u));
          out.push_back(std::move(names));
        }
        return out;
      },
      py::arg("graph"), py::arg("members") = std::nullopt,
      py::arg("mode") = "exem-relaxed", py::arg("walks_per_start") = 10,
      py::arg("walk_length") = 80, py::arg("seed") = 1);

  m.def(
      "embed_graph",
      [](const Graph& g, const std::string& variant, std::uint64_t seed,
         std::uint32_t dim, std::uint32_t window, std::uint32_t epochs,
         std::uint32_t negatives, double step, const std::string& mode,
         std::uint32_t walks_per_start, std::uint32_t walk_length,
         std::uint32_t workers) {
        EmbedRecipe recipe;
        recipe.variant = embedding_mode_from(variant);
        recipe.walk.mode = walk_mode_from(mode);
        recipe.walk.walks_per_start = walks_per_start;
        recipe.walk.walk_length = walk_length;
        recipe.walk.workers = workers;
        recipe.train.dimension = dim;
        recipe.train.window = window;
        recipe.train.epochs = epochs;
        recipe.train.negatives = negatives;
        recipe.train.initial_step = step;
        recipe.train.workers = workers;
        return embed_graph(g, recipe, seed);
      },
      py::arg("graph"), py::arg("variant") = "w2v", py::arg("seed") = 1,
      py::arg("dim") = 128, py::arg("window") = 10, py::arg("epochs") = 5,
      py::arg("negatives") = 5, py::arg("step") = 0.025,
      py::arg("mode") = "exem-relaxed", py::arg("walks_per_start") = 10,
      py::arg("walk_length") = 80, py::arg("workers") = 1);

  m.def(
      "combine",
      [](const EmbeddingMatrix& a, const EmbeddingMatrix& b,
         const std::string& scheme) {
        return combine(a, b, embedding_mode_from(scheme));
      },
      py::arg("a"), py::arg("b"), py::arg("scheme") = "concat");

  m.def(
      "evaluate_classification",
      [](const EmbeddingMatrix& emb, const Graph& g, const LabelMap& labels,
         double train_ratio, std::size_t reps, std::uint64_t seed) {
        ClassificationOptions options;
        options.train_ratio = train_ratio;
        options.repetitions = reps;
        options.seed = seed;
        return report_to_dict(evaluate_classification(emb, g, labels, options));
      },
      py::arg("embedding"), py::arg("graph"), py::arg("labels"),
      py::arg("train_ratio") = 0.5, py::arg("reps") = 10, py::arg("seed") = 1);

  m.def(
      "evaluate_link_prediction",
      [](const Graph& g, const std::string& variant, const std::string& op,
         double hide_ratio, std::size_t reps, std::uint64_t seed,
         std::uint32_t dim, std::uint32_t walks_per_start,
         std::uint32_t walk_length, std::uint32_t epochs) {
        EmbedRecipe recipe;
        recipe.variant = embedding_mode_from(variant);
        recipe.walk.walks_per_start = walks_per_start;
        recipe.walk.walk_length = walk_length;
        recipe.train.dimension = dim;
        recipe.train.epochs = epochs;
        LinkPredictionOptions options;
        options.hide_ratio = hide_ratio;
        options.repetitions = reps;
        options.seed = seed;
        options.op = edge_operator_from(op);
        return report_to_dict(
            evaluate_link_prediction(g, make_embedder(recipe), options));
      },
      py::arg("graph"), py::arg("variant") = "w2v", py::arg("op") = "hadamard",
      py::arg("hide_ratio") = 0.5, py::arg("reps") = 10, py::arg("seed") = 1,
      py::arg("dim") = 128, py::arg("walks_per_start") = 10,
      py::arg("walk_length") = 80, py::arg("epochs") = 5);

  m.def(
      "recommend",
      [](const EmbeddingMatrix& emb, const Graph& g, const LabelMap& labels,
         const std::string& topic, std::size_t k) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& entry : recommend(emb, g, labels, topic, k))
          out.emplace_back(entry.id, entry.score);
        return out;
      },
      py::arg("embedding"), py::arg("graph"), py::arg("labels"), py::arg("topic"),
      py::arg("k") = 10);

  m.def(
      "nearest",
      [](const EmbeddingMatrix& emb, const std::string& id, std::size_t k) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& entry : nearest_to_id(emb, id, k))
          out.emplace_back(entry.id, entry.score);
        return out;
      },
      py::arg("embedding"), py::arg("id"), py::arg("k") = 10);
}
