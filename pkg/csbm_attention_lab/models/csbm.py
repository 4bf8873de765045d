from __future__ import annotations

import math
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator
from scipy.sparse import csr_matrix


class BalanceMode(str, Enum):
    BERNOULLI = "bernoulli"
    EXACT_HALF = "exact_half"


def axis_vector(norm: float, dim: int) -> Tuple[float, ...]:
    """Vector of the given norm along the first coordinate axis."""
    return (float(norm),) + (0.0,) * (dim - 1)


def default_feature_dim(n: int) -> int:
    return max(1, round(n / math.log(n) ** 2))


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class CsbmParams(BaseModel):
    """
    Parameters of CSBM(n, p, q, mu, nu, sigma, zeta).
    """

    class Config:
        allow_mutation = False
        use_enum_values = False

    n: int = Field(..., ge=2, description="Number of nodes", example=400)
    p: float = Field(..., ge=0.0, le=1.0, description="Intra-class edge probability")
    q: float = Field(..., ge=0.0, le=1.0, description="Inter-class edge probability")
    mu: Tuple[float, ...] = Field(..., description="Node feature mean, length d")
    nu: Tuple[float, ...] = Field(..., description="Edge feature mean, length h")
    sigma: float = Field(..., ge=0.0, description="Node feature noise scale")
    zeta: float = Field(..., ge=0.0, description="Edge feature noise scale")
    d: Optional[int] = Field(None, ge=1, description="Node feature dimension")
    h: Optional[int] = Field(None, ge=1, description="Edge feature dimension")
    balance_mode: BalanceMode = BalanceMode.EXACT_HALF
    self_loops: bool = False

    @root_validator(skip_on_failure=True)
    def check_dimensions(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        mu, nu = values["mu"], values["nu"]
        if not mu or not nu:
            raise ValueError("mu and nu need at least one coordinate")
        for name, vector in (("d", mu), ("h", nu)):
            declared = values.get(name)
            if declared is None:
                values[name] = len(vector)
            elif declared != len(vector):
                raise ValueError(
                    f"{name}={declared} does not match vector length {len(vector)}"
                )
        if values["balance_mode"] == BalanceMode.EXACT_HALF and values["n"] % 2:
            raise ValueError("exact_half balance requires an even node count")
        return values

    @property
    def mu_array(self) -> np.ndarray:
        return np.asarray(self.mu, dtype=float)

    @property
    def nu_array(self) -> np.ndarray:
        return np.asarray(self.nu, dtype=float)

    @property
    def mu_norm(self) -> float:
        return float(np.linalg.norm(self.mu_array))

    @property
    def nu_norm(self) -> float:
        return float(np.linalg.norm(self.nu_array))

    @property
    def log_edge_scale(self) -> float:
        """log(0.5 n^2 (p + q)), the stand-in for log|E| used by the thresholds."""
        return math.log(0.5 * self.n**2 * (self.p + self.q))

    @classmethod
    def from_norms(
        cls,
        n: int,
        p: float,
        q: float,
        mu_norm: float,
        nu_norm: float,
        sigma: float,
        zeta: float,
        d: Optional[int] = None,
        h: Optional[int] = None,
        **kwargs: Any,
    ) -> "CsbmParams":
        d = d or default_feature_dim(n)
        h = h or d
        return cls(
            n=n,
            p=p,
            q=q,
            mu=axis_vector(mu_norm, d),
            nu=axis_vector(nu_norm, h),
            sigma=sigma,
            zeta=zeta,
            **kwargs,
        )


class Adjacency(BaseModel):
    """
    Undirected edge list plus a CSR neighbour index over directed slots.

    Row k of `edges` is the undirected edge {i, j} with i <= j; `edge_ids[s]`
    maps directed slot s back to that row, so any per-edge array aligned with
    `edges` can be gathered per neighbourhood.
    """

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    n: int
    edges: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    edge_ids: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[Sequence[int]]) -> "Adjacency":
        pairs = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        pairs = np.sort(pairs, axis=1)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise ValueError("edge endpoint out of range")
        if len(pairs) and len(np.unique(pairs, axis=0)) != len(pairs):
            raise ValueError("duplicate undirected edge")

        ids = np.arange(len(pairs), dtype=np.int64)
        proper = pairs[:, 0] != pairs[:, 1]
        sources = np.concatenate([pairs[:, 0], pairs[proper, 1]])
        targets = np.concatenate([pairs[:, 1], pairs[proper, 0]])
        slot_ids = np.concatenate([ids, ids[proper]])
        order = np.lexsort((targets, sources))

        counts = np.bincount(sources, minlength=n)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        return cls(
            n=n,
            edges=_frozen(pairs),
            indptr=_frozen(indptr),
            indices=_frozen(targets[order]),
            edge_ids=_frozen(slot_ids[order]),
        )

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def sources(self) -> np.ndarray:
        """Row index of every directed slot."""
        return np.repeat(np.arange(self.n), self.degrees)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def to_csr(self, values: Optional[np.ndarray] = None) -> csr_matrix:
        data = np.ones(len(self.indices)) if values is None else values
        return csr_matrix(
            (data, self.indices, self.indptr), shape=(self.n, self.n), copy=True
        )

    def same_structure(self, indptr: np.ndarray, indices: np.ndarray) -> bool:
        return np.array_equal(self.indptr, indptr) and np.array_equal(
            self.indices, indices
        )


class GraphSample(BaseModel):
    """One draw (labels, A, X, E) from the CSBM."""

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    labels: np.ndarray
    adjacency: Adjacency
    node_features: np.ndarray
    edge_features: np.ndarray

    @validator("labels", pre=True)
    def labels_are_bits(cls, value: Any) -> np.ndarray:
        labels = np.array(value, dtype=np.int8)
        if labels.ndim != 1 or not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be a vector of 0/1 class bits")
        return _frozen(labels)

    @validator("node_features", "edge_features", pre=True)
    def as_matrix(cls, value: Any) -> np.ndarray:
        return _frozen(np.array(value, dtype=float, ndmin=2))

    @root_validator(skip_on_failure=True)
    def check_shapes(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        labels: np.ndarray = values["labels"]
        adjacency: Adjacency = values["adjacency"]
        if adjacency.n != len(labels):
            raise ValueError("adjacency and labels disagree on node count")
        if values["node_features"].shape[0] != len(labels):
            raise ValueError("node_features must have one row per node")
        if values["edge_features"].shape[0] != adjacency.edge_count:
            raise ValueError("edge_features must have one row per undirected edge")
        return values

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return self.adjacency.edge_count

    @property
    def slot_is_intra(self) -> np.ndarray:
        """Per directed slot: True when both endpoints share a class."""
        adjacency = self.adjacency
        return self.labels[adjacency.sources] == self.labels[adjacency.indices]

    def edge_feature(self, i: int, j: int) -> np.ndarray:
        adjacency = self.adjacency
        start, stop = adjacency.indptr[i], adjacency.indptr[i + 1]
        hits = np.nonzero(adjacency.indices[start:stop] == j)[0]
        if not len(hits):
            raise KeyError(f"no edge between {i} and {j}")
        return self.edge_features[adjacency.edge_ids[start + hits[0]]]
