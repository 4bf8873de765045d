from typing import Any, Callable, List, Optional, Sequence

import numpy as np
import pytest
from _pytest.config import Config
from _pytest.config.argparsing import Parser

from csbm_attention_lab.models.csbm import Adjacency, CsbmParams, GraphSample


def pytest_addoption(parser: Parser) -> None:
    parser.addoption(
        "--slow",
        action="store_true",
        default=False,
        help="run Monte Carlo acceptance tests",
    )


def pytest_configure(config: Config) -> None:
    config.addinivalue_line("markers", "slow: Monte Carlo test over many seeds")


def pytest_collection_modifyitems(config: Config, items: List) -> None:
    if config.getoption("--slow"):
        return

    skip_slow = pytest.mark.skip(reason="need --slow option to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def make_params() -> Callable[..., CsbmParams]:
    def _make_params(**overrides: Any) -> CsbmParams:
        values: dict = {
            "n": 400,
            "p": 0.4,
            "q": 0.33,
            "mu_norm": 1.0,
            "nu_norm": 1.0,
            "sigma": 0.1,
            "zeta": 0.1,
        }
        values.update(overrides)
        return CsbmParams.from_norms(**values)

    return _make_params


@pytest.fixture
def make_sample() -> Callable[..., GraphSample]:
    """Hand-built sample; features default to zeros of dimension 1."""

    def _make_sample(
        labels: Sequence[int],
        edges: Sequence[Sequence[int]],
        node_features: Optional[Any] = None,
        edge_features: Optional[Any] = None,
    ) -> GraphSample:
        n = len(labels)
        adjacency = Adjacency.from_edges(n, edges)
        if node_features is None:
            node_features = np.zeros((n, 1))
        if edge_features is None:
            edge_features = np.zeros((adjacency.edge_count, 1))
        return GraphSample(
            labels=labels,
            adjacency=adjacency,
            node_features=node_features,
            edge_features=edge_features,
        )

    return _make_sample


@pytest.fixture
def star_sample(make_sample: Callable[..., GraphSample]) -> GraphSample:
    """Node 0 (class 0) with intra neighbours 1, 2 and inter neighbours 3, 4."""
    return make_sample(
        labels=[0, 0, 0, 1, 1],
        edges=[(0, 1), (0, 2), (0, 3), (0, 4)],
        edge_features=[[1.0], [1.0], [-1.0], [-1.0]],
    )
