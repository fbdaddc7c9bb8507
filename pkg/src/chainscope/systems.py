"""Evaluable dynamical systems and the builtin examples.

Interval maps live on [0, 1] with the metric |x - y|.  The two subshifts are
spaces of eventually-constant binary words with the metric
``2 ** -(n - 1)``, ``n`` being the first (1-based) index where two words
differ.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Optional, Sequence

import numpy as np

from .errors import ConfigError, DomainError

State = Hashable


@dataclass(frozen=True)
class EvaluableSystem:
    """A map ``f`` with a metric ``d`` and a finite ordered sample set.

    ``eval_array`` and ``dist_array`` are optional vectorized versions of
    ``eval`` and ``dist`` (numpy broadcasting semantics) used to build gap
    matrices quickly on large grids.
    """

    name: str
    eval: Callable[[Any], Any]
    dist: Callable[[Any, Any], float]
    samples: tuple
    kind: str = "interval"
    params: dict = field(default_factory=dict, compare=False)
    eval_array: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    dist_array: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = field(
        default=None, compare=False
    )

    @property
    def n(self) -> int:
        return len(self.samples)

    def index_of(self, state) -> int:
        try:
            return self.samples.index(state)
        except ValueError:
            raise ConfigError(f"state {state!r} is not a sample of {self.name}") from None

    def iterate(self, x, k: int):
        for _ in range(k):
            x = self.eval(x)
        return x


# ---------------------------------------------------------------------------
# piecewise interval maps


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x, True, True)

    def __contains__(self, x) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def mask(self, x: np.ndarray) -> np.ndarray:
        lo_ok = x >= self.lo if self.lo_closed else x > self.lo
        hi_ok = x <= self.hi if self.hi_closed else x < self.hi
        return lo_ok & hi_ok

    def clamp(self, y):
        """Nudge ``y`` into the interval by at most the rounding it escaped by.

        Floating point can round an orbit onto an excluded endpoint (for
        example ``x/2 + 1/4`` collapsing onto 1/2).  Results are pushed back
        to the nearest representable point inside.
        """
        arr = np.asarray(y, dtype=float)
        lo_in = np.nextafter(self.lo, np.inf) if not self.lo_closed else self.lo
        hi_in = np.nextafter(self.hi, -np.inf) if not self.hi_closed else self.hi
        out = np.minimum(np.maximum(arr, lo_in), hi_in)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Piece:
    part: Interval
    formula: Callable
    image: Optional[Interval] = None


@dataclass(frozen=True)
class PiecewiseMap:
    """Map of [lo, hi] given as pieces that partition the domain exactly.

    Single-point pieces own their breakpoint; the neighbouring intervals must
    exclude it.  ``image`` on a piece, when given, is the exact range of its
    formula and is enforced on the floating point result.
    """

    pieces: tuple
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        self._check_partition()

    def _check_partition(self):
        cuts = sorted({self.lo, self.hi} | {p.part.lo for p in self.pieces} | {p.part.hi for p in self.pieces})
        probes = list(cuts) + [(a + b) / 2 for a, b in zip(cuts, cuts[1:])]
        for x in probes:
            owners = [p for p in self.pieces if x in p.part]
            inside = self.lo <= x <= self.hi
            if inside and len(owners) != 1:
                raise ValueError(f"pieces do not partition [{self.lo}, {self.hi}] at x={x} ({len(owners)} owners)")
            if not inside and owners:
                raise ValueError(f"piece extends outside the domain at x={x}")
            if inside:
                y = owners[0].formula(x)
                if not (self.lo <= y <= self.hi):
                    raise ValueError(f"formula maps {x} to {y}, outside the domain")

    def piece_at(self, x: float) -> Piece:
        for p in self.pieces:
            if x in p.part:
                return p
        raise DomainError(f"{x!r} outside [{self.lo}, {self.hi}]")

    def __call__(self, x: float) -> float:
        return interval_eval(self, x)

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any((x < self.lo) | (x > self.hi)):
            raise DomainError("array contains points outside the domain")
        out = np.empty_like(x)
        for p in self.pieces:
            m = p.part.mask(x)
            if np.any(m):
                y = np.asarray(p.formula(x[m]), dtype=float) * np.ones(int(m.sum()))
                out[m] = p.image.clamp(y) if p.image is not None else y
        return out


def interval_eval(fmap: PiecewiseMap, x: float) -> float:
    """Evaluate a piecewise map at ``x`` using the unique piece owning ``x``."""
    x = float(x)
    if not (fmap.lo <= x <= fmap.hi):
        raise DomainError(f"{x!r} outside [{fmap.lo}, {fmap.hi}]")
    p = fmap.piece_at(x)
    y = float(p.formula(x))
    return p.image.clamp(y) if p.image is not None else y


def grid_sample(domain: tuple[float, float], n: int, required: Iterable[float] = ()) -> tuple[float, ...]:
    """Uniform ``n``-point grid on ``domain`` merged with ``required`` points."""
    if n < 2:
        raise ConfigError(f"grid needs at least 2 points, got {n}")
    lo, hi = float(domain[0]), float(domain[1])
    pts = {lo + (hi - lo) * i / (n - 1) for i in range(n)}
    pts.add(hi)
    for r in required:
        r = float(r)
        if not lo <= r <= hi:
            raise ConfigError(f"required point {r} outside [{lo}, {hi}]")
        pts.add(r)
    return tuple(sorted(pts))


def _akin_map() -> PiecewiseMap:
    return PiecewiseMap(
        (
            Piece(Interval.point(0.0), lambda x: 0.75 + 0 * x),
            Piece(Interval(0.0, 0.5, False, False), lambda x: x * (x + 0.5), Interval(0.0, 0.5, False, False)),
            Piece(Interval.point(0.5), lambda x: 0.25 + 0 * x),
            Piece(Interval(0.5, 1.0, False, True), lambda x: 0.5 * x + 0.25, Interval(0.5, 0.75, False, True)),
        )
    )


def _whole(formula) -> PiecewiseMap:
    return PiecewiseMap((Piece(Interval(0.0, 1.0), formula, Interval(0.0, 1.0)),))


INTERVAL_MAPS: dict[str, Callable[[], PiecewiseMap]] = {
    "akin": _akin_map,
    "square": lambda: _whole(lambda x: x * x),
    "logistic4": lambda: _whole(lambda x: 4.0 * x * (1.0 - x)),
    "identity": lambda: _whole(lambda x: x + 0.0),
}



def interval_map(name: str) -> PiecewiseMap:
    try:
        return INTERVAL_MAPS[name]()
    except KeyError:
        raise ConfigError(f"unknown interval map {name!r}") from None


# grid sizes used when a config does not say
DEFAULT_GRID = {"akin": 101, "square": 5, "logistic4": 101, "identity": 3}


def _abs_dist(a, b) -> float:
    return abs(float(a) - float(b))


def interval_system(name: str, grid_n: Optional[int] = None, required: Iterable[float] = (),
                    samples: Optional[Sequence[float]] = None) -> EvaluableSystem:
    fmap = INTERVAL_MAPS[name]()
    req = set(float(r) for r in required)
    if name == "akin":
        req |= {0.0, 0.5}
    if samples is None:
        pts = grid_sample((0.0, 1.0), grid_n if grid_n is not None else DEFAULT_GRID[name], req)
    else:
        pts = tuple(sorted({float(s) for s in samples} | req))
        if len(pts) < 2:
            raise ConfigError("need at least 2 samples")
        for s in pts:
            if not 0.0 <= s <= 1.0:
                raise ConfigError(f"sample {s} outside [0, 1]")
    return EvaluableSystem(
        name=name,
        eval=fmap,
        dist=_abs_dist,
        samples=pts,
        kind="interval",
        params={"grid_n": grid_n, "required": sorted(req), "explicit": samples is not None},
        eval_array=fmap.eval_array,
        dist_array=lambda a, b: np.abs(a - b),
    )


def cycle_system(n: int) -> EvaluableSystem:
    """Rotation ``x -> (x + 1) mod n`` on n equispaced points of a unit circle."""
    if n < 2:
        raise ConfigError(f"cycle needs n >= 2, got {n}")

    def rot(x):
        return (x + 1) % n

    def arc(a, b):
        k = abs(int(a) - int(b)) % n
        return min(k, n - k) / n

    def arc_array(a, b):
        k = np.abs(np.asarray(a) - np.asarray(b)) % n
        return np.minimum(k, n - k) / n

    return EvaluableSystem(
        name="cycle",
        eval=rot,
        dist=arc,
        samples=tuple(range(n)),
        kind="cycle",
        params={"cycle_n": n},
        eval_array=lambda x: (np.asarray(x) + 1) % n,
        dist_array=arc_array,
    )


# ---------------------------------------------------------------------------
# eventually-constant words and the two subshifts


@dataclass(frozen=True, order=True)
class Word:
    """Infinite binary word ``prefix + tail*``, kept in canonical form."""

    prefix: str
    tail: str

    def __post_init__(self):
        if self.tail not in ("0", "1"):
            raise ValueError(f"tail must be '0' or '1', got {self.tail!r}")
        if set(self.prefix) - {"0", "1"}:
            raise ValueError(f"prefix must be binary, got {self.prefix!r}")
        object.__setattr__(self, "prefix", self.prefix.rstrip(self.tail))

    def symbol(self, i: int) -> str:
        """Symbol at 0-based position ``i``."""
        return self.prefix[i] if i < len(self.prefix) else self.tail

    def __str__(self) -> str:
        return f"{self.prefix}{self.tail}inf"

    @classmethod
    def parse(cls, text: str) -> "Word":
        m = re.fullmatch(r"([01]*)([01])inf", text.strip())
        if not m:
            raise ConfigError(f"cannot parse word {text!r}; expected e.g. '1inf' or '1100111inf'")
        return cls(m.group(1), m.group(2))

    def pretty(self) -> str:
        runs = [(m.group(0)[0], len(m.group(0))) for m in re.finditer(r"0+|1+", self.prefix)]
        body = " ".join(s if k == 1 else f"{s}^{k}" for s, k in runs)
        return (body + " " if body else "") + f"{self.tail}^inf"


ONES = Word("", "1")
ZEROS = Word("", "0")


def word_shift(w: Word) -> Word:
    return Word(w.prefix[1:], w.tail) if w.prefix else w


def first_difference(u: Word, v: Word) -> Optional[int]:
    """1-based index of the first differing symbol, or None if equal."""
    if u == v:
        return None
    for i in range(max(len(u.prefix), len(v.prefix)) + 1):
        if u.symbol(i) != v.symbol(i):
            return i + 1
    raise AssertionError("distinct canonical words must differ within the prefix horizon")


def word_dist(u: Word, v: Word) -> float:
    n = first_difference(u, v)
    return 0.0 if n is None else math.ldexp(1.0, -(n - 1))


_ONE_ZERO_ONE = re.compile(r"(?=0(1+)0)")
_BLOCKS = re.compile(r"(?=(?<!1)(1+)(0+)1)")


@dataclass(frozen=True)
class Subshift:
    """One of the two subshifts built from the words ``w_k``.

    Forbidden factors are ``0 1^j 0`` (j >= 1 for sigma1, j >= 2 for sigma2)
    and ``1^j 0^h 1`` with ``j > h``: a block of ones followed by a shorter,
    terminated block of zeros.
    """

    id: str
    K: int = 6

    def __post_init__(self):
        if self.id not in ("sigma1", "sigma2"):
            raise ConfigError(f"unknown subshift {self.id!r}")
        if self.K < 1:
            raise ConfigError(f"truncation K must be >= 1, got {self.K}")

    @property
    def min_inner_ones(self) -> int:
        return 1 if self.id == "sigma1" else 2

    def forbidden(self, s: str) -> bool:
        """True if the finite string ``s`` contains a forbidden factor."""
        for m in _ONE_ZERO_ONE.finditer(s):
            if len(m.group(1)) >= self.min_inner_ones:
                return True
        for m in _BLOCKS.finditer(s):
            if len(m.group(1)) > len(m.group(2)):
                return True
        return False

    def admissible(self, w: Word) -> bool:
        # one tail period past the prefix exposes every factor that can ever close
        return not self.forbidden(w.prefix + w.tail)

    def generator(self, k: int) -> Word:
        if self.id == "sigma1":
            return Word("1" * k + "0" * k, "1")
        return Word("1" * k + "0" * k + "1", "0")

    def universe(self, K: Optional[int] = None) -> tuple:
        return subshift_universe(self, self.K if K is None else K)


def subshift_universe(s: Subshift, K: int) -> tuple:
    """All distinct ``shift^j(w_k)`` for 1 <= k <= K, then 1^inf and 0^inf."""
    if K < 1:
        raise ConfigError(f"K must be >= 1, got {K}")
    seen: dict[Word, None] = {}
    for k in range(1, K + 1):
        w = s.generator(k)
        while w not in (ONES, ZEROS):
            seen.setdefault(w, None)
            w = word_shift(w)
    words = list(seen) + [ONES, ZEROS]
    bad = [w for w in words if not s.admissible(w)]
    if bad:
        raise AssertionError(f"universe contains forbidden words: {bad}")
    return tuple(words)


def subshift_system(sid: str, K: int, dist_scale: float = 1.0) -> EvaluableSystem:
    shift = Subshift(sid, K)
    dist = word_dist if dist_scale == 1.0 else (lambda u, v: dist_scale * word_dist(u, v))
    return EvaluableSystem(
        name=sid,
        eval=word_shift,
        dist=dist,
        samples=shift.universe(),
        kind="subshift",
        params={"truncation_k": K},
    )


SYSTEM_NAMES = ("akin", "square", "logistic4", "identity", "cycle", "sigma1", "sigma2")


def builtin_system(name: str, **params) -> EvaluableSystem:
    """Construct a named builtin system.

    Interval systems accept ``grid_n``, ``required`` and ``samples``;
    ``cycle`` takes ``n``; the subshifts take ``k`` (truncation).
    """
    if name in INTERVAL_MAPS:
        return interval_system(name, params.get("grid_n"), params.get("required", ()), params.get("samples"))
    if name == "cycle":
        return cycle_system(int(params.get("n", 3)))
    if name in ("sigma1", "sigma2"):
        return subshift_system(name, int(params.get("k", 6)))
    raise ConfigError(f"unknown system {name!r}; choose from {', '.join(SYSTEM_NAMES)}")


def load_system_config(cfg: dict) -> EvaluableSystem:
    """Build a system from the JSON configuration schema."""
    if "system" not in cfg:
        raise ConfigError("config field 'system' is required")
    name = cfg["system"]
    if name in INTERVAL_MAPS:
        grid_n = cfg.get("grid_n")
        if grid_n is not None and (not isinstance(grid_n, int) or grid_n < 2):
            raise ConfigError(f"field 'grid_n' must be an integer >= 2, got {grid_n!r}")
        return builtin_system(name, grid_n=grid_n, required=cfg.get("required_points", ()),
                              samples=cfg.get("samples"))
    if name == "cycle":
        n = cfg.get("cycle_n", 3)
        if not isinstance(n, int) or n < 2:
            raise ConfigError(f"field 'cycle_n' must be an integer >= 2, got {n!r}")
        return builtin_system(name, n=n)
    if name in ("sigma1", "sigma2"):
        k = cfg.get("truncation_k", 6)
        if not isinstance(k, int) or k < 1:
            raise ConfigError(f"field 'truncation_k' must be an integer >= 1, got {k!r}")
        return builtin_system(name, k=k)
    raise ConfigError(f"field 'system': unknown system {name!r}")


def parse_state(system: EvaluableSystem, text: str):
    """Parse a CLI state literal: ``@i`` index, a word, a real, or an integer."""
    text = str(text).strip()
    if text.startswith("@"):
        i = int(text[1:])
        if not 0 <= i < system.n:
            raise ConfigError(f"index {i} out of range 0..{system.n - 1}")
        return system.samples[i]
    if system.kind == "subshift":
        return Word.parse(text)
    if system.kind == "cycle":
        return int(text)
    return float(text)


def format_state(state) -> Any:
    if isinstance(state, Word):
        return str(state)
    if isinstance(state, (int, np.integer)):
        return int(state)
    return float(state)
