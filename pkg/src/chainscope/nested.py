"""Nested chains over a decreasing threshold schedule.

A nested family is one eps_l-chain per level whose point sets grow:
``points(C_1) ⊆ points(C_2) ⊆ ... ⊆ points(C_L)``.  Deciding existence is
done in two stages:

* ``greedy``: a shortest level-1 chain, then every consecutive pair is
  re-joined at the next threshold.  Sound, not complete.
* ``exact``: greedy first, then a descent through the levels whose state
  is the accumulated must-visit set, moving on only with point sets the
  finest level can still cover.  Complete for finite schedules: any
  eps_L-chain repeated at every level is already a nested family.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import ConfigError, RefinementError
from .graph import ThresholdGraph
from .relations import Chain, GapMatrix


@dataclass(frozen=True)
class Schedule:
    levels: tuple

    def __post_init__(self):
        lv = tuple(float(e) for e in self.levels)
        if not lv:
            raise ConfigError("a schedule needs at least one level")
        if any(not e > 0 for e in lv):
            raise ConfigError(f"schedule levels must be positive: {lv}")
        if any(a <= b for a, b in zip(lv, lv[1:])):
            raise ConfigError(f"schedule must be strictly decreasing: {lv}")
        object.__setattr__(self, "levels", lv)

    def __len__(self) -> int:
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    @classmethod
    def geometric(cls, first: float, count: int, ratio: float = 0.5) -> "Schedule":
        return cls(tuple(first * ratio**i for i in range(count)))

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        """``geometric:first,count`` (ratio 1/2) or a comma-separated list."""
        text = text.strip()
        try:
            if text.startswith("geometric:"):
                first, count = text[len("geometric:"):].split(",")
                return cls.geometric(float(first), int(count))
            return cls(tuple(float(t) for t in text.split(",")))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"cannot parse schedule {text!r}") from None


@dataclass(frozen=True)
class NestedFamily:
    chains: tuple
    source: int
    target: int

    def to_json(self) -> list:
        return [list(c.points) for c in self.chains]


@dataclass
class NestedResult:
    """Outcome of a nested-chain decision.

    ``status`` is ``success``, ``infeasible`` (no eps_L-chain exists) or
    ``undecided`` (greedy refinement blocked, nothing proved).
    """

    status: str
    schedule: Schedule
    family: Optional[NestedFamily] = None
    obstruction: Optional[tuple] = None        # (level index, sorted must-visit)
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "success"

    def certificate(self, labels: Optional[Sequence] = None) -> dict:
        from .systems import format_state

        out = {
            "schema": 1,
            "status": self.status,
            "levels": list(self.schedule.levels),
            "chains": self.family.to_json() if self.family else [],
            "obstruction": None,
            "reason": self.reason,
        }
        if self.obstruction is not None:
            lvl, must = self.obstruction
            out["obstruction"] = {"level": lvl, "eps": self.schedule.levels[lvl], "must_visit": list(must)}
        if labels is not None:
            out["chain_labels"] = [[format_state(labels[i]) for i in ch] for ch in out["chains"]]
        return out


# ---------------------------------------------------------------------------
# single level


def _covering_order(gr: ThresholdGraph, x: int, y: int, must: Iterable[int]) -> Optional[list[int]]:
    """Waypoints x, ..., y visiting ``must`` in condensation order, or None."""
    labels = gr.scc()
    reach = gr.component_reach()
    rank = gr.topo_rank()
    cx, cy = int(labels[x]), int(labels[y])
    comps = {int(labels[v]) for v in must} | {cx, cy}
    chain = sorted(comps, key=lambda c: rank[c])
    if chain[0] != cx or chain[-1] != cy:
        return None
    for a, b in zip(chain, chain[1:]):
        if not (reach[a] >> b) & 1:
            return None
    if len(chain) == 1 and x == y and not gr.nontrivial(gr.components()[cx]):
        return None
    inner = sorted(set(must) - {x, y}, key=lambda v: (rank[int(labels[v])], v))
    return [x] + inner + [y]


def _assemble(gr: ThresholdGraph, waypoints: list[int]) -> list[int]:
    walk = [waypoints[0]]
    for b in waypoints[1:]:
        a = walk[-1]
        if a == b:
            continue
        walk.extend(gr.shortest_walk(a, [b])[1:])
    if len(walk) == 1:
        walk = gr.shortest_walk(walk[0], [walk[0]])
    return walk


def covering_walk_feasible(g: GapMatrix, eps: float, x: int, y: int, must_visit: Iterable[int] = (),
                           within: Optional[Iterable[int]] = None) -> Optional[Chain]:
    """An eps-walk from x to y (>= 1 edge) through every vertex of must_visit.

    Returns a witness chain, or None when no such walk exists.
    """
    gr = g.graph(eps, within)
    return _covering(gr, x, y, must_visit)


def _covering(gr: ThresholdGraph, x: int, y: int, must_visit: Iterable[int]) -> Optional[Chain]:
    order = _covering_order(gr, x, y, must_visit)
    return None if order is None else Chain(_assemble(gr, order))


def refine_chain(g: GapMatrix, chain: Chain, eps_next: float, within: Optional[Iterable[int]] = None,
                 graph: Optional[ThresholdGraph] = None) -> Chain:
    """Re-join each consecutive pair of ``chain`` with a shortest eps_next-chain."""
    gr = graph or g.graph(eps_next, within)
    walk = [chain.points[0]]
    for j, (a, b) in enumerate(zip(chain.points, chain.points[1:])):
        seg = gr.shortest_walk(a, [b])
        if seg is None:
            raise RefinementError(
                f"no {eps_next!r}-chain from {a} to {b} (segment {j})", position=j, source=a, target=b
            )
        walk.extend(seg[1:])
    return Chain(walk)


# ---------------------------------------------------------------------------
# multi level


def _descend(graphs: list, x: int, y: int) -> Optional[list]:
    """Level-by-level family; each level's point set stays coverable at the finest level.

    A walk valid at the finest threshold is valid at every coarser one, so a
    must-visit set that the finest level can cover never dead-ends.  The
    level's own covering walk is kept when its point set passes that test;
    otherwise the finest covering walk is reused.
    """
    finest = graphs[-1]
    must = frozenset({x, y})
    chains = []
    for gr in graphs:
        w = _covering(gr, x, y, must)
        if w is None or _covering(finest, x, y, w.point_set()) is None:
            w = _covering(finest, x, y, must)
            if w is None:
                return None
        chains.append(w)
        must = w.point_set()
    return chains


def greedy_family(g: GapMatrix, sched: Schedule, x: int, y: int,
                  within: Optional[Iterable[int]] = None, graphs=None) -> tuple[Optional[NestedFamily], Optional[tuple]]:
    """Shortest level-1 chain refined level by level.

    Returns (family, None) or (None, (level, blocked pair)).
    """
    graphs = graphs or [g.graph(e, within) for e in sched]
    first = graphs[0].shortest_walk(x, [y])
    if first is None:
        return None, (0, (x, y))
    chains = [Chain(first)]
    for lvl in range(1, len(sched)):
        try:
            chains.append(refine_chain(g, chains[-1], sched.levels[lvl], graph=graphs[lvl]))
        except RefinementError as exc:
            return None, (lvl, (exc.source, exc.target))
    return NestedFamily(tuple(chains), x, y), None


def nested_decide(g: GapMatrix, sched: Schedule, x: int, y: int, mode: str = "exact",
                  within: Optional[Iterable[int]] = None) -> NestedResult:
    """Decide whether a nested family of chains from x to y exists.

    Over a finite schedule a family exists iff an eps_L-chain exists at the
    finest level L.  ``infeasible`` certificates name the first level with no
    chain at all; ``greedy`` mode reports ``undecided`` when refinement blocks.
    """
    if mode not in ("greedy", "exact"):
        raise ConfigError(f"mode must be 'greedy' or 'exact', got {mode!r}")
    within = None if within is None else sorted(set(within))
    graphs = [g.graph(e, within) for e in sched]
    # each level alone must already be reachable
    for lvl, gr in enumerate(graphs):
        if _covering(gr, x, y, ()) is None:
            return NestedResult("infeasible", sched, obstruction=(lvl, tuple(sorted({x, y}))),
                                reason=f"no chain from {x} to {y} at level {lvl}")
    fam, blocked = greedy_family(g, sched, x, y, graphs=graphs)
    if fam is not None:
        return NestedResult("success", sched, family=fam, reason="greedy refinement")
    if mode == "greedy":
        lvl, (a, b) = blocked
        return NestedResult("undecided", sched, reason=f"greedy refinement blocked at level {lvl} on pair ({a}, {b})")
    chains = _descend(graphs, x, y)
    if chains is None:
        raise AssertionError("finest level was checked reachable")
    return NestedResult("success", sched, family=NestedFamily(tuple(chains), x, y), reason="coverable descent")


def verify_nested(fam: NestedFamily, g: GapMatrix, sched: Schedule) -> bool:
    if len(fam.chains) != len(sched):
        return False
    for chain, eps in zip(fam.chains, sched):
        if chain.source != fam.source or chain.target != fam.target:
            return False
        if not chain.is_valid(g, eps):
            return False
    return all(a.point_set() <= b.point_set() for a, b in zip(fam.chains, fam.chains[1:]))


def nested_transitive_check(g: GapMatrix, sched: Schedule, M: Iterable[int], mode: str = "exact",
                            **kwargs) -> bool:
    """True iff nested_decide succeeds for every ordered pair of M."""
    M = sorted(set(M))
    if not M:
        raise ValueError("M must be nonempty")
    return all(nested_decide(g, sched, a, b, mode, **kwargs).ok for a in M for b in M)
