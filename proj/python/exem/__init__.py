"""Graph embeddings from dominating-set-guided random walks."""

from ._exem import (
    Embedding,
    Graph,
    LabelMap,
    combine,
    embed_graph,
    evaluate_classification,
    evaluate_link_prediction,
    find_dominating_set,
    generate_sbm,
    generate_walks,
    load_graph,
    load_labels,
    nearest,
    recommend,
    save_graph,
    verify_dominating_set,
)

__all__ = [
    "Embedding",
    "Graph",
    "LabelMap",
    "combine",
    "embed_graph",
    "evaluate_classification",
    "evaluate_link_prediction",
    "find_dominating_set",
    "generate_sbm",
    "generate_walks",
    "load_graph",
    "load_labels",
    "nearest",
    "recommend",
    "save_graph",
    "verify_dominating_set",
]
