from typing import Optional, TextIO

import numpy as np

from csbm_attention_lab.models.csbm import GraphSample


def samples_equal(first: GraphSample, second: GraphSample) -> bool:
    return (
        np.array_equal(first.labels, second.labels)
        and np.array_equal(first.adjacency.edges, second.adjacency.edges)
        and np.array_equal(first.node_features, second.node_features)
        and np.array_equal(first.edge_features, second.edge_features)
    )


def replace_node_features(
    sample: GraphSample,
    node_features: np.ndarray,
    labels: Optional[np.ndarray] = None,
) -> GraphSample:
    return GraphSample(
        labels=sample.labels if labels is None else labels,
        adjacency=sample.adjacency,
        node_features=node_features,
        edge_features=sample.edge_features,
    )


def read_dump_edges(handle: TextIO) -> np.ndarray:
    """Edge endpoints of a graph dump, in file order."""
    pairs = []
    for line in handle:
        if line.startswith("#"):
            continue
        if line.strip() == "labels":
            break
        i, j = line.split()[:2]
        pairs.append((int(i), int(j)))
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)
