"""Locate chain-recurrent cycles by following the map projected onto the samples.

``F(a)`` is the sample nearest to ``f(a)`` (smallest index on ties).  Its
orbit from any seed revisits a sample within n steps; the periodic part is
a cycle of eps-chains for every eps above the largest gap used on it.
Revisit detection stands in for the ordinal collision of the transfinite
construction; no equivalence is claimed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .relations import Chain, GapMatrix, scc_decomposition


@dataclass(frozen=True)
class ProjectedOrbit:
    seed: int
    steps: tuple
    cycle_start: int
    cycle: tuple
    eps_star: float
    rho: float

    @property
    def artifact(self) -> bool:
        # a positive-gap cycle below the projection resolution may exist only
        # because the grid is coarse
        return 0.0 < self.eps_star <= self.rho

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "steps": list(self.steps),
            "cycle": list(self.cycle),
            "eps_star": self.eps_star,
            "rho": self.rho,
            "artifact_flag": self.artifact,
        }


def projection(g: GapMatrix) -> np.ndarray:
    return np.argmin(g.gap, axis=1)


def locate_cr(g: GapMatrix, x0: int) -> ProjectedOrbit:
    F = projection(g)
    pos = {}
    steps = []
    v = int(x0)
    while v not in pos:
        pos[v] = len(steps)
        steps.append(v)
        v = int(F[v])
    steps.append(v)
    start = pos[v]
    cycle = tuple(steps[start:-1])
    eps_star = max(float(g.gap[a, F[a]]) for a in cycle)
    return ProjectedOrbit(int(x0), tuple(steps), start, cycle, eps_star, g.resolution())


@dataclass(frozen=True)
class TerminalComponent:
    id: int
    members: tuple
    cycle: Chain
    basin: frozenset

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "members": list(self.members),
            "cycle": list(self.cycle.points),
            "basin": sorted(self.basin),
        }


def locate_all_components(g: GapMatrix, eps: float) -> list[TerminalComponent]:
    """Every terminal component at eps, with a closed chain inside it and its basin."""
    rho = g.resolution()
    if not eps > rho:
        raise PreconditionError(f"eps={eps!r} must exceed the projection resolution rho={rho!r}", min_eps=rho)
    gr = g.graph(eps)
    dec = scc_decomposition(g, eps, gr)
    out = []
    for c in dec.terminal_ids():
        comp = dec.members[c]
        v = comp[0]
        basin = frozenset(int(u) for u in np.flatnonzero(gr.dist_to(comp) >= 0))
        out.append(TerminalComponent(c, comp, Chain(gr.shortest_walk(v, [v])), basin))
    return out
