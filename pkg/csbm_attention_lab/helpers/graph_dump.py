"""
Plain-text dump of one GraphSample, for debugging.

    # csbm sample n=<n> edges=<m> d=<d> h=<h>
    # i j f_1 ... f_h
    <one line per undirected edge, i <= j>
    labels
    <one line per node: i eps_i>
    node_features
    <one line per node: i x_1 ... x_d>
"""
from typing import Iterable, TextIO

from csbm_attention_lab.models.csbm import GraphSample


def _numbers(values: Iterable[float]) -> str:
    return " ".join(f"{value:.9g}" for value in values)


def write_graph_dump(sample: GraphSample, handle: TextIO) -> None:
    edges = sample.adjacency.edges
    d = sample.node_features.shape[1]
    h = sample.edge_features.shape[1]
    handle.write(f"# csbm sample n={sample.n} edges={len(edges)} d={d} h={h}\n")
    handle.write("# i j " + " ".join(f"f_{k + 1}" for k in range(h)) + "\n")
    for (i, j), feature in zip(edges, sample.edge_features):
        handle.write(f"{i} {j} {_numbers(feature)}\n")
    handle.write("labels\n")
    for i, label in enumerate(sample.labels):
        handle.write(f"{i} {label}\n")
    handle.write("node_features\n")
    for i, row in enumerate(sample.node_features):
        handle.write(f"{i} {_numbers(row)}\n")
