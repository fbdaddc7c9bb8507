"""Strong chains: minimal total jump cost between sample points.

``value[x, y]`` is the least sum of gaps over walks from x to y with at
least one edge.  Thresholding it at eps gives the strong-chain relation at
that scale; intersecting over a family of metrics over-approximates the
generalized recurrent set (the true intersection ranges over every
compatible metric and cannot be computed).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, shortest_path

from .errors import ConfigError
from .relations import GapMatrix, build_gap_matrix
from .systems import EvaluableSystem


@dataclass(frozen=True, eq=False)
class StrongChainValues:
    value: np.ndarray

    @property
    def n(self) -> int:
        return self.value.shape[0]


def strong_chain_values(g: GapMatrix) -> StrongChainValues:
    # zero gaps are genuine edges, so the null value must be inf, not 0
    graph = csgraph_from_dense(g.gap, null_value=np.inf)
    dist = shortest_path(graph, method="D", directed=True)
    # one forced first step, then a shortest path that may be empty
    value = _first_step_min(g.gap, dist)
    value.setflags(write=False)
    return StrongChainValues(value)


def _first_step_min(gap: np.ndarray, dist: np.ndarray) -> np.ndarray:
    # off the diagonal the shortest path already has >= 1 edge; only loops
    # need the explicit first step
    value = dist.copy()
    np.fill_diagonal(value, (gap + dist.T).min(axis=1))
    return value


def strong_chain_recurrent_set(v: StrongChainValues, eps: float) -> frozenset:
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return frozenset(int(x) for x in np.flatnonzero(np.diag(v.value) < eps))


@dataclass(frozen=True)
class MetricTransform:
    """A function phi with phi(d) a metric inducing the same topology as d."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, d):
        return self.fn(d)


def parse_metric(spec: str) -> MetricTransform:
    """``d``, ``sqrt``, ``min:c`` (c > 0) or ``power:p`` (0 < p <= 1)."""
    spec = spec.strip()
    if spec == "d":
        return MetricTransform("d", lambda d: np.asarray(d, dtype=float))
    if spec == "sqrt":
        return MetricTransform("sqrt", np.sqrt)
    kind, _, arg = spec.partition(":")
    try:
        val = float(arg)
    except ValueError:
        raise ConfigError(f"unknown metric transform {spec!r}") from None
    if kind == "min":
        if not (val > 0 and math.isfinite(val)):
            raise ConfigError(f"min:c needs c > 0, got {arg}")
        return MetricTransform(f"min:{val!r}", lambda d: np.minimum(d, val))
    if kind == "power":
        if not 0 < val <= 1:
            raise ConfigError(f"power:p is a metric only for 0 < p <= 1, got {arg}")
        return MetricTransform(f"power:{val!r}", lambda d: np.power(d, val))
    raise ConfigError(f"unknown metric transform {spec!r}")


DEFAULT_METRICS = ("d", "sqrt")


def scr_family_intersection(source, metrics: Iterable = DEFAULT_METRICS, eps: float = 0.1) -> frozenset:
    """Intersection of strong-chain-recurrent sets over a finite metric family.

    ``source`` is an EvaluableSystem or a GapMatrix; each metric is rebuilt as
    ``phi(d(f(a), b))``.  The result contains GR(f) restricted to the samples
    at this threshold, never less.
    """
    g = build_gap_matrix(source) if isinstance(source, EvaluableSystem) else source
    result = None
    for m in metrics:
        t = parse_metric(m) if isinstance(m, str) else m
        scr = strong_chain_recurrent_set(strong_chain_values(g.transformed(t)), eps)
        result = scr if result is None else result & scr
    if result is None:
        raise ValueError("at least one metric is required")
    return result


def strong_report(g: GapMatrix, eps: float, metrics: Sequence[str], include_values: bool = False) -> dict:
    per_metric = []
    for name in metrics:
        t = parse_metric(name)
        v = strong_chain_values(g.transformed(t))
        entry = {"metric": t.name, "eps": eps, "scr_set": sorted(strong_chain_recurrent_set(v, eps))}
        if include_values:
            if g.n > 512:
                raise ConfigError("dense value matrices are only reported for n <= 512")
            entry["values"] = [[float(x) for x in row] for row in v.value]
        per_metric.append(entry)
    inter = set(per_metric[0]["scr_set"])
    for e in per_metric[1:]:
        inter &= set(e["scr_set"])
    return {
        "schema": 1,
        "eps": eps,
        "metrics": per_metric,
        "gr_upper_bound": sorted(inter),
        "note": "intersection over a finite metric family; an over-approximation of GR",
    }
