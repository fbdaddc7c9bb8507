"""Gap matrices, epsilon-chains and the relations O, R, N~ and C_eps.

A gap matrix stores ``gap[a, b] = d(f(a), b)`` over a finite sample set;
thresholding it strictly at ``eps`` gives the digraph whose walks are exactly
the eps-chains through sample points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import PreconditionError
from .graph import ThresholdGraph
from .systems import EvaluableSystem, format_state


@dataclass(frozen=True, eq=False)
class GapMatrix:
    gap: np.ndarray
    labels: tuple

    def __post_init__(self):
        gap = np.array(self.gap, dtype=float)
        if gap.ndim != 2 or gap.shape[0] != gap.shape[1]:
            raise ValueError("gap matrix must be square")
        if np.any(gap < 0) or np.any(np.isnan(gap)):
            raise ValueError("gap entries must be nonnegative numbers")
        if len(self.labels) != gap.shape[0]:
            raise ValueError("one label per row is required")
        gap.setflags(write=False)
        object.__setattr__(self, "gap", gap)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return self.gap.shape[0]

    @classmethod
    def from_array(cls, gap) -> "GapMatrix":
        gap = np.asarray(gap, dtype=float)
        return cls(gap, tuple(range(gap.shape[0])))

    def index_of(self, label) -> int:
        return self.labels.index(label)

    def graph(self, eps: float, within: Optional[Iterable[int]] = None) -> ThresholdGraph:
        if not eps > 0:
            raise ValueError(f"eps must be positive, got {eps}")
        return ThresholdGraph(self.gap, eps, within)

    def induced(self, indices: Sequence[int]) -> "GapMatrix":
        idx = list(indices)
        return GapMatrix(self.gap[np.ix_(idx, idx)], tuple(self.labels[i] for i in idx))

    def min_out_gap(self) -> np.ndarray:
        return self.gap.min(axis=1)

    def resolution(self) -> float:
        """Projection resolution: the largest of the per-row minimum gaps."""
        return float(self.min_out_gap().max())

    def transformed(self, fn) -> "GapMatrix":
        return GapMatrix(fn(self.gap), self.labels)


def build_gap_matrix(system: EvaluableSystem) -> GapMatrix:
    """``gap[a, b] = dist(eval(a), b)`` over the system's samples."""
    if system.n < 2:
        raise PreconditionError("a gap matrix needs at least 2 samples")
    if system.eval_array is not None and system.dist_array is not None:
        s = np.asarray(system.samples)
        img = system.eval_array(s)
        gap = system.dist_array(img[:, None], s[None, :]).astype(float)
    else:
        images = [system.eval(a) for a in system.samples]
        gap = np.array([[system.dist(fa, b) for b in system.samples] for fa in images], dtype=float)
    return GapMatrix(gap, system.samples)


@dataclass(frozen=True)
class Chain:
    """A finite sequence of states x_0..x_n (n >= 1) read as a pseudo-orbit."""

    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) < 2:
            raise ValueError("a chain needs at least two points")

    @property
    def source(self):
        return self.points[0]

    @property
    def target(self):
        return self.points[-1]

    def __len__(self) -> int:
        return len(self.points)

    def gaps(self, g: GapMatrix) -> tuple[float, ...]:
        return tuple(float(g.gap[a, b]) for a, b in zip(self.points, self.points[1:]))

    def is_valid(self, g: GapMatrix, eps: float) -> bool:
        return all(x < eps for x in self.gaps(g))

    def state_gaps(self, system: EvaluableSystem) -> tuple[float, ...]:
        """Gaps for a chain of raw states rather than sample indices."""
        return tuple(float(system.dist(system.eval(a), b)) for a, b in zip(self.points, self.points[1:]))

    def is_valid_states(self, system: EvaluableSystem, eps: float) -> bool:
        return all(x < eps for x in self.state_gaps(system))

    def point_set(self) -> frozenset:
        return frozenset(self.points)


def chain_reaches(g: GapMatrix, eps: float, x: int, y: int) -> Optional[Chain]:
    """Shortest eps-chain from x to y (at least one edge), or None."""
    walk = g.graph(eps).shortest_walk(x, [y])
    return None if walk is None else Chain(walk)


@dataclass(frozen=True)
class SccDecomposition:
    labels: tuple
    members: tuple
    edges: frozenset
    terminal: tuple
    nontrivial: tuple

    @property
    def count(self) -> int:
        return len(self.members)

    def component_of(self, v: int) -> int:
        return self.labels[v]

    def terminal_ids(self) -> list[int]:
        return [c for c in range(self.count) if self.terminal[c]]


def scc_decomposition(g: GapMatrix, eps: float, graph: Optional[ThresholdGraph] = None) -> SccDecomposition:
    gr = graph or g.graph(eps)
    members = gr.components()
    edges = gr.condensation_edges()
    has_out = {u for u, _ in edges}
    return SccDecomposition(
        labels=tuple(int(c) for c in gr.scc()),
        members=tuple(members),
        edges=frozenset(edges),
        terminal=tuple(c not in has_out for c in range(len(members))),
        nontrivial=tuple(gr.nontrivial(m) for m in members),
    )


def chain_recurrent_set(g: GapMatrix, eps: float) -> frozenset:
    """Sample indices x with an eps-chain from x back to x."""
    dec = scc_decomposition(g, eps)
    return frozenset(v for v in range(g.n) if dec.nontrivial[dec.labels[v]])


def _require_out_edges(g: GapMatrix, eps: float):
    low = g.min_out_gap()
    stuck = np.flatnonzero(low >= eps)
    if stuck.size:
        need = float(np.nextafter(low[stuck].max(), np.inf))
        raise PreconditionError(
            f"{stuck.size} vertices have no outgoing edge at eps={eps}; eps > {low[stuck].max()!r} is needed",
            vertices=stuck.tolist(),
            min_eps=need,
        )


def scc_terminal_components(g: GapMatrix, eps: float) -> SccDecomposition:
    """SCC decomposition, requiring that every vertex has an outgoing edge."""
    _require_out_edges(g, eps)
    dec = scc_decomposition(g, eps)
    assert any(dec.terminal)
    assert all(dec.nontrivial[c] for c in dec.terminal_ids())
    return dec


def reach_transitive(g: GapMatrix, eps: float, x: int) -> tuple[tuple[int, ...], Chain]:
    """A terminal component reachable from x and an eps-chain from x into it."""
    return reach_transitive_all(g, eps, [x])[x]


def reach_transitive_all(g: GapMatrix, eps: float, sources: Optional[Iterable[int]] = None) -> dict:
    """``reach_transitive`` for many sources, sharing one graph and decomposition.

    Each source gets the terminal component with the smallest id it can reach.
    """
    _require_out_edges(g, eps)
    gr = g.graph(eps)
    dec = scc_decomposition(g, eps, gr)
    reach = gr.component_reach()
    terminal = dec.terminal_ids()
    dists = {}
    out = {}
    for x in range(g.n) if sources is None else sources:
        # with every out-degree positive, x reaches its own component by >= 1 edge
        bits = reach[dec.labels[x]]
        c = next(c for c in terminal if bits >> c & 1)
        comp = dec.members[c]
        if c not in dists:
            dists[c] = gr.dist_to(comp)
        out[x] = (comp, Chain(gr.shortest_walk(x, comp, dist=dists[c])))
    return out


def internally_chain_transitive(g: GapMatrix, eps: float, M: Iterable[int]) -> bool:
    """Every ordered pair of M (including x = y) joined by eps-chains inside M."""
    M = sorted(set(M))
    if not M:
        raise ValueError("M must be nonempty")
    sub = g.induced(M)
    adj = sub.gap < eps
    if len(M) == 1:
        return bool(adj[0, 0])
    gr = sub.graph(eps)
    return len(gr.components()) == 1


# ---------------------------------------------------------------------------
# orbit relations on raw states.  Quantifiers over k are truncated at k_max;
# a False answer means "not found within budget".


def _orbit(system: EvaluableSystem, x, k_max: int, start: int):
    """Yield (k, f^k(x)) for start <= k <= k_max, stopping once the orbit cycles."""
    seen = set()
    v = x
    for k in range(k_max + 1):
        if k >= start:
            yield k, v
        if v in seen:
            return
        seen.add(v)
        v = system.eval(v)


def orbit_witness(system, x, y, k_max: int) -> Optional[int]:
    for k, v in _orbit(system, x, k_max, 1):
        if v == y:
            return k
    return None


def recurrence_witness(system, x, y, eps: float, k_max: int) -> Optional[int]:
    for k, v in _orbit(system, x, k_max, 1):
        if system.dist(v, y) < eps:
            return k
    return None


def ntilde_candidates(system: EvaluableSystem, x, eps: float) -> list:
    """The exact image f(x) followed by every sample within eps of it."""
    fx = system.eval(x)
    cands = [fx]
    cands += [z for z in system.samples if z != fx and system.dist(fx, z) < eps]
    return cands


def ntilde_witness(system, x, y, eps: float, k_max: int):
    """Return (z, k) with d(f(x), z) < eps and d(f^k(z), y) < eps, or None."""
    for z in ntilde_candidates(system, x, eps):
        for k, v in _orbit(system, z, k_max, 0):
            if system.dist(v, y) < eps:
                return z, k
    return None


def relation_O(system, x, y, k_max: int) -> bool:
    return orbit_witness(system, x, y, k_max) is not None


def relation_R(system, x, y, eps: float, k_max: int) -> bool:
    return recurrence_witness(system, x, y, eps, k_max) is not None


def relation_Ntilde(system, x, y, eps: float, k_max: int) -> bool:
    return ntilde_witness(system, x, y, eps, k_max) is not None


def ntilde_chain(system, x, y, z, k: int) -> Chain:
    """Raw-state chain x, z, f(z), ..., f^(k-1)(z), y built from an N~ witness."""
    pts = [x]
    if k >= 1:
        v = z
        for _ in range(k):
            pts.append(v)
            v = system.eval(v)
    pts.append(y)
    return Chain(pts)


def ntilde_self_matrix(system: EvaluableSystem, eps: float, k_max: int) -> np.ndarray:
    """Vectorized N~(x, x) for every sample x of an interval system.

    Orbits of all candidate z are advanced together; each orbit records the
    set of samples it came within eps of.  Equivalent to calling
    :func:`relation_Ntilde` with ``y = x`` on every sample.
    """
    if system.eval_array is None:
        return np.array([relation_Ntilde(system, x, x, eps, k_max) for x in system.samples])
    s = np.asarray(system.samples, dtype=float)
    n = s.size
    img = system.eval_array(s)
    starts = np.concatenate([s, img])          # rows 0..n-1 samples, n..2n-1 exact images
    rows = np.arange(2 * n)
    diff = np.zeros((2 * n, n + 1), dtype=np.int32)
    v = starts.copy()
    for _ in range(k_max + 1):
        lo, hi = _window(s, v, eps)
        np.add.at(diff, (rows, lo), 1)
        np.add.at(diff, (rows, hi), -1)
        nxt = system.eval_array(v)
        if np.array_equal(nxt, v):
            break
        v = nxt
    visited = np.cumsum(diff[:, :n], axis=1) > 0
    near = np.abs(img[:, None] - s[None, :]) < eps     # sample candidates z for each x
    diag = np.arange(n)
    hit_samples = (near.astype(np.float32) @ visited[:n, :].astype(np.float32)) > 0
    return hit_samples[diag, diag] | visited[n + diag, diag]


def _window(s: np.ndarray, v: np.ndarray, eps: float):
    """Index range [lo, hi) of sorted samples s with |s - v| < eps, exactly."""
    n = s.size
    lo = np.searchsorted(s, v - eps, side="left")
    hi = np.searchsorted(s, v + eps, side="right")
    for _ in range(3):
        bad = (lo < n) & (lo < hi) & ~(np.abs(v - s[np.minimum(lo, n - 1)]) < eps)
        lo = lo + bad
        bad = (hi > lo) & ~(np.abs(v - s[np.maximum(hi - 1, 0)]) < eps)
        hi = hi - bad
    hi = np.maximum(hi, lo)
    return lo, hi


# ---------------------------------------------------------------------------
# reports


_PALETTE = ("lightblue", "lightcoral", "palegreen", "khaki", "plum", "lightsalmon", "lightcyan", "wheat")


def to_dot(g: GapMatrix, eps: float, dec: Optional[SccDecomposition] = None) -> str:
    """Graphviz digraph of the eps-graph; terminal components double-circled."""
    dec = dec or scc_decomposition(g, eps)
    lines = ["digraph eps_graph {", f'  label="eps={eps!r}";']
    for v in range(g.n):
        c = dec.labels[v]
        shape = "doublecircle" if dec.terminal[c] else "circle"
        label = str(format_state(g.labels[v]))
        lines.append(
            f'  n{v} [label="{label}", shape={shape}, style=filled, '
            f'fillcolor={_PALETTE[c % len(_PALETTE)]}, comment="component {c}"];'
        )
    a, b = np.nonzero(g.gap < eps)
    for u, w in zip(a.tolist(), b.tolist()):
        lines.append(f'  n{u} -> n{w} [label="{g.gap[u, w]:.6g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cr_report(g: GapMatrix, eps: float) -> dict:
    dec = scc_decomposition(g, eps)
    gr = g.graph(eps)
    witnesses = {}
    for c in range(dec.count):
        if dec.terminal[c] and dec.nontrivial[c]:
            v = dec.members[c][0]
            witnesses[str(v)] = gr.shortest_walk(v, [v])
    return {
        "schema": 1,
        "eps": eps,
        "cr_set": sorted(chain_recurrent_set(g, eps)),
        "components": [
            {
                "id": c,
                "members": list(dec.members[c]),
                "terminal": dec.terminal[c],
                "nontrivial": dec.nontrivial[c],
            }
            for c in range(dec.count)
        ],
        "witnesses": witnesses,
        "labels": [format_state(s) for s in g.labels],
    }
