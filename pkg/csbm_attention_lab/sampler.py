from typing import List, Tuple

import numpy as np
from she_logging import logger

from csbm_attention_lab.error_handler import ConfigurationError
from csbm_attention_lab.helpers.rng import make_rng
from csbm_attention_lab.models.csbm import (
    Adjacency,
    BalanceMode,
    CsbmParams,
    GraphSample,
)


def class_signs(labels: np.ndarray) -> np.ndarray:
    """2 * eps - 1: class 0 maps to -1, class 1 to +1."""
    return 2.0 * np.asarray(labels, dtype=float) - 1.0


def sample_labels(params: CsbmParams, rng: np.random.Generator) -> np.ndarray:
    n = params.n
    if params.balance_mode == BalanceMode.BERNOULLI:
        return (rng.random(n) < 0.5).astype(np.int8)
    if n % 2:
        raise ConfigurationError(f"exact_half balance requires an even n, got {n}")
    labels = np.zeros(n, dtype=np.int8)
    labels[rng.permutation(n)[: n // 2]] = 1
    return labels


def sample_graph(
    labels: np.ndarray, params: CsbmParams, rng: np.random.Generator
) -> Adjacency:
    """
    Draws every unordered pair {i, j}, i < j, once, row by row, so the edge
    list comes out in lexicographic order and memory stays O(n) per draw.
    """
    labels = np.asarray(labels)
    n = len(labels)
    if n != params.n:
        raise ConfigurationError(f"expected {params.n} labels, got {n}")

    rows: List[np.ndarray] = []
    for i in range(n):
        if params.self_loops:
            rows.append(np.array([[i, i]], dtype=np.int64))
        others = np.arange(i + 1, n)
        if not len(others):
            continue
        probability = np.where(labels[others] == labels[i], params.p, params.q)
        hits = others[rng.random(len(others)) < probability]
        if len(hits):
            rows.append(np.column_stack([np.full(len(hits), i), hits]))

    edges = np.concatenate(rows) if rows else np.empty((0, 2), dtype=np.int64)
    return Adjacency.from_edges(n, edges)


def sample_features(
    labels: np.ndarray,
    adjacency: Adjacency,
    params: CsbmParams,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    signs = class_signs(labels)
    node_features = np.outer(signs, params.mu_array)
    if params.sigma > 0.0:
        node_features += params.sigma * rng.standard_normal(node_features.shape)

    edges = adjacency.edges
    edge_signs = signs[edges[:, 0]] * signs[edges[:, 1]]
    edge_features = np.outer(edge_signs, params.nu_array).reshape(
        len(edges), params.h
    )
    if params.zeta > 0.0:
        edge_features += params.zeta * rng.standard_normal(edge_features.shape)
    return node_features, edge_features


def sample_csbm(params: CsbmParams, seed: int) -> GraphSample:
    rng = make_rng(seed)
    labels = sample_labels(params, rng)
    adjacency = sample_graph(labels, params, rng)
    node_features, edge_features = sample_features(labels, adjacency, params, rng)
    logger.debug(
        "Sampled CSBM graph with %d nodes and %d edges",
        params.n,
        adjacency.edge_count,
        extra={"seed": seed, "p": params.p, "q": params.q},
    )
    return GraphSample(
        labels=labels,
        adjacency=adjacency,
        node_features=node_features,
        edge_features=edge_features,
    )
