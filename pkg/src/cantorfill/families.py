"""Hereditary families of finite sets and the built-in examples.

A family is a membership predicate on sorted tuples of points.  Points are
bitstrings of one depth (Cantor ground) or non-negative integers (ℕ ground).
Families may override ``max_member_size`` / ``largest_member`` /
``member_table`` / ``max_weight_member`` with exact fast paths; generic
searches live in :mod:`cantorfill.density`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .errors import PreconditionError, SearchFailed
from .nodes import meet

__all__ = [
    "HereditaryFamily",
    "AllSets",
    "BoundedSize",
    "SchreierFamily",
    "FremlinFamily",
    "StronglyMonotoneFamily",
    "CoordinateFamily",
    "ExplicitFamily",
    "PredicateFamily",
    "ThresholdSequence",
    "threshold_sequence",
    "fremlin_density_bound",
    "hereditary_closure",
    "schreier_family",
    "fremlin_family",
    "strongly_monotone_family",
    "F_FUNCTIONS",
    "is_strongly_increasing",
    "is_strongly_decreasing",
]


def _ceil_sqrt(n):
    r = math.isqrt(n)
    return r if r * r == n else r + 1


# Named growth functions usable from the CLI; each satisfies n >= f(n) > 0.
F_FUNCTIONS: dict[str, Callable[[int], int]] = {
    "sqrt": _ceil_sqrt,
    "one": lambda n: 1,
    "log": lambda n: n.bit_length(),
}


class HereditaryFamily:
    """Base class.  Subclasses implement :meth:`member`."""

    name = "family"
    ground = "cantor"  # "cantor", "nat" or "any"
    determination_depth: int | None = None
    size_determined = False
    contains_singletons = True

    def member(self, points: tuple) -> bool:
        raise NotImplementedError

    def __contains__(self, points) -> bool:
        return self.member(tuple(sorted(points)))

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"name": self.name, "params": self.params()}

    # Optional fast paths; ``None`` means "use the generic search".
    def max_member_size(self, points: tuple) -> int | None:
        return None

    def largest_member(self, points: tuple) -> tuple | None:
        return None

    def member_table(self, points: tuple):
        return None

    def max_weight_member(self, weights: dict):
        return None

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class AllSets(HereditaryFamily):
    """Every finite set."""

    name = "all"
    ground = "any"
    size_determined = True
    determination_depth = 0

    def member(self, points):
        return True

    def max_member_size(self, points):
        return len(points)

    def largest_member(self, points):
        return tuple(points)

    def member_table(self, points):
        return np.ones(1 << len(points), dtype=np.uint8)

    def max_weight_member(self, weights):
        pts = tuple(sorted(weights))
        return sum((abs(weights[p]) for p in pts), Fraction(0)), pts


class BoundedSize(HereditaryFamily):
    """``[X]^{≤k}``: all sets with at most ``k`` elements."""

    name = "bounded"
    ground = "any"
    size_determined = True
    determination_depth = 0

    def __init__(self, k: int):
        if k < 0:
            raise ValueError("k must be non-negative")
        self.k = k
        self.contains_singletons = k >= 1

    def params(self):
        return {"k": self.k}

    def member(self, points):
        return len(points) <= self.k

    def max_member_size(self, points):
        return min(len(points), self.k)

    def largest_member(self, points):
        return tuple(points[: self.k])

    def member_table(self, points):
        from .kernels import popcounts

        return (popcounts(len(points)) <= self.k).astype(np.uint8)


class SchreierFamily(HereditaryFamily):
    """``{F ⊆ ℕ : |F| ≤ min F + 1}``."""

    name = "schreier"
    ground = "nat"

    def member(self, points):
        return not points or len(points) <= min(points) + 1

    def max_member_size(self, points):
        pts = sorted(points)
        n = len(pts)
        return max((min(n - i, a + 1) for i, a in enumerate(pts)), default=0)

    def largest_member(self, points):
        pts = sorted(points)
        size = self.max_member_size(pts)
        if size == 0:
            return ()
        n = len(pts)
        # smallest usable minimum, then the next size-1 points
        for i, a in enumerate(pts):
            if a + 1 >= size and n - i >= size:
                return tuple(pts[i : i + size])
        raise AssertionError("unreachable")

    def member_table(self, points):
        from .kernels import popcounts

        pts = sorted(points)
        nbits = len(pts)
        if pts and pts[-1] > 30000:
            return None
        low = np.full(1, 255, dtype=np.uint8)
        for i in range(nbits):
            low = np.concatenate((low, np.where(low == 255, i, low).astype(np.uint8)))
        vals = np.array(pts + [0], dtype=np.int16)
        minimum = vals[np.where(low == 255, nbits, low)]
        table = popcounts(nbits).astype(np.int16) <= minimum + 1
        table[0] = True
        return table.astype(np.uint8)


def is_strongly_increasing(points) -> bool:
    lens = [len(meet(a, b)) for a, b in zip(points, points[1:])]
    return all(x < y for x, y in zip(lens, lens[1:]))


def is_strongly_decreasing(points) -> bool:
    lens = [len(meet(a, b)) for a, b in zip(points, points[1:])]
    return all(x > y for x, y in zip(lens, lens[1:]))


class StronglyMonotoneFamily(HereditaryFamily):
    """Strongly increasing or strongly decreasing finite sets."""

    name = "monotone"

    def __init__(self, depth: int | None = None):
        self.depth = depth

    def params(self):
        return {"depth": self.depth}

    def member(self, points):
        return len(points) <= 2 or is_strongly_increasing(points) or is_strongly_decreasing(points)

    def max_member_size(self, points):
        pts = sorted(points)
        m = len(pts)
        if m <= 2:
            return m
        lens = [[len(meet(a, b)) for b in pts] for a in pts]
        best = 2
        for sign in (1, -1):
            # chain[i][j]: longest chain whose last two points are i < j
            chain = [[2] * m for _ in range(m)]
            for j in range(m):
                for i in range(j):
                    lij = sign * lens[i][j]
                    top = 2
                    for h in range(i):
                        if sign * lens[h][i] < lij and chain[h][i] + 1 > top:
                            top = chain[h][i] + 1
                    chain[i][j] = top
                    if top > best:
                        best = top
        return best


class CoordinateFamily(HereditaryFamily):
    """Sets whose points all agree at one coordinate (a 1/2-filling family)."""

    name = "coordinate"

    def __init__(self, coordinate: int = 0):
        self.coordinate = coordinate
        self.determination_depth = coordinate + 1

    def params(self):
        return {"c": self.coordinate}

    def member(self, points):
        return len({p[self.coordinate] for p in points}) <= 1

    def largest_member(self, points):
        zeros = tuple(p for p in points if p[self.coordinate] == "0")
        ones = tuple(p for p in points if p[self.coordinate] == "1")
        if len(zeros) != len(ones):
            return zeros if len(zeros) > len(ones) else ones
        return min(zeros, ones)

    def max_member_size(self, points):
        return len(self.largest_member(tuple(sorted(points))))


class ExplicitFamily(HereditaryFamily):
    """A finite family given by its members, stored subset-closed."""

    name = "explicit"

    def __init__(self, members: Iterable[Iterable], depth: int | None = None):
        given = {frozenset(m) for m in members}
        self.members = _close(given)
        self.added = len(self.members) - len(given | {frozenset()})
        self.depth = depth
        self.contains_singletons = False
        if depth is None:
            self.ground = "any"

    def params(self):
        return {"depth": self.depth, "size": len(self.members)}

    def member(self, points):
        return frozenset(points) in self.members

    def __iter__(self):
        return iter(sorted((tuple(sorted(m)) for m in self.members), key=lambda t: (len(t), t)))

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        return isinstance(other, ExplicitFamily) and self.members == other.members

    def __hash__(self):
        return hash(self.members)


def _close(members: set) -> frozenset:
    out = {frozenset()}
    for m in members:
        if m in out:
            continue
        items = sorted(m)
        for r in range(len(items) + 1):
            out.update(frozenset(c) for c in itertools.combinations(items, r))
    return frozenset(out)


def hereditary_closure(family: ExplicitFamily | Iterable) -> ExplicitFamily:
    """Smallest subset-closed family containing the given members."""
    if isinstance(family, ExplicitFamily):
        return ExplicitFamily(family.members, depth=family.depth)
    return ExplicitFamily(family)


class PredicateFamily(HereditaryFamily):
    """Wrap an arbitrary predicate; heredity is the caller's promise."""

    def __init__(self, predicate, name="predicate", ground="cantor", determination_depth=None,
                 contains_singletons=True):
        self.predicate = predicate
        self.name = name
        self.ground = ground
        self.determination_depth = determination_depth
        self.contains_singletons = contains_singletons

    def member(self, points):
        return bool(self.predicate(tuple(points)))


@dataclass(frozen=True)
class ThresholdSequence:
    """``n_0 = 1 < n_1 < ... < n_K`` with ``sup_{i ≥ n_k} f(i)/i ≤ 2^-k``.

    ``certified`` is ``"monotone"`` when the caller declared the ratio
    f(i)/i non-increasing (checked up to the horizon), else ``"horizon"``:
    the sup was only verified on ``[n_k, horizon]``.
    """

    values: tuple
    horizon: int
    certified: str
    f_name: str = field(default="f")

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)

    def to_json(self):
        return {"values": list(self.values), "horizon": self.horizon, "certified": self.certified}


def threshold_sequence(f, K: int, horizon: int | None = None, monotone_ratio=False) -> ThresholdSequence:
    """Minimal threshold sequence for ``f`` with ``K+1`` terms (k = 0..K)."""
    f_name = f if isinstance(f, str) else getattr(f, "__name__", "f")
    if isinstance(f, str):
        f = F_FUNCTIONS[f]
    if K < 0:
        raise ValueError("K must be non-negative")
    if horizon is None:
        horizon = max(4096, 1 << (K + 8))
    ratios = []
    for i in range(1, horizon + 1):
        v = f(i)
        if not 0 < v <= i:
            raise PreconditionError(f"need i >= f(i) > 0, got f({i})={v}", i=i, value=v)
        ratios.append(Fraction(v, i))
    if monotone_ratio and any(b > a for a, b in zip(ratios, ratios[1:])):
        raise PreconditionError("declared monotone ratio but f(i)/i increases within the horizon")
    # tail[i-1] = max_{i <= j <= horizon} f(j)/j
    tail = list(itertools.accumulate(reversed(ratios), max))[::-1]
    values = [1]
    for k in range(1, K + 1):
        bound = Fraction(1, 2**k)
        start = values[-1] + 1
        found = next((i for i in range(start, horizon + 1) if tail[i - 1] <= bound), None)
        if found is None:
            raise SearchFailed(f"threshold n_{k} not attained within horizon {horizon}", k=k, horizon=horizon)
        values.append(found)
    return ThresholdSequence(tuple(values), horizon, "monotone" if monotone_ratio else "horizon", f_name)


class FremlinFamily(HereditaryFamily):
    """Sets inside one level-k cylinder C_t (k ≤ K) of size at most ⌈n_{k+1}/2^k⌉."""

    name = "fremlin"

    def __init__(self, f="sqrt", K: int = 2, depth: int | None = None, horizon: int | None = None,
                 monotone_ratio=False):
        if depth is not None and depth < K:
            raise PreconditionError("depth must be at least K", depth=depth, K=K)
        self.f_name = f if isinstance(f, str) else getattr(f, "__name__", "f")
        self.f = F_FUNCTIONS[f] if isinstance(f, str) else f
        self.K = K
        self.depth = depth
        self.thresholds = threshold_sequence(f, K + 1, horizon, monotone_ratio)
        n = self.thresholds.values
        self.caps = tuple(-(-n[k + 1] // 2**k) for k in range(K + 1))
        # best cap usable when all points share a prefix of length k
        self.reach = tuple(itertools.accumulate(self.caps, max))
        self.determination_depth = K

    def params(self):
        return {"f": self.f_name, "K": self.K, "depth": self.depth}

    def describe(self):
        d = super().describe()
        d["thresholds"] = self.thresholds.to_json()
        d["caps"] = list(self.caps)
        return d

    def _common_level(self, points):
        if len(points) < 2:
            return self.K
        w = len(meet(points[0], points[-1]))  # sorted, so this is the meet of all
        return min(w, self.K)

    def member(self, points):
        return len(points) <= self.reach[self._common_level(points)]

    def _candidates(self, points):
        pts = sorted(points)
        for k in range(self.K + 1):
            groups = {}
            for p in pts:
                groups.setdefault(p[:k], []).append(p)
            for group in groups.values():
                yield k, group

    def largest_member(self, points):
        best = ()
        for k, group in self._candidates(points):
            cand = tuple(group[: self.caps[k]])
            if len(cand) > len(best) or (len(cand) == len(best) and cand < best):
                best = cand
        return best

    def max_member_size(self, points):
        return len(self.largest_member(points))

    def max_weight_member(self, weights):
        best, arg = Fraction(0), ()
        for k, group in self._candidates(weights):
            top = sorted(group, key=lambda p: (-abs(weights[p]), p))[: self.caps[k]]
            total = sum((abs(weights[p]) for p in top), Fraction(0))
            if total > best:
                best, arg = total, tuple(sorted(top))
        return best, arg


def fremlin_density_bound(family: FremlinFamily, n: int) -> int:
    """Certified lower bound ⌈n/2^k⌉ for the density, where n_k ≤ n < n_{k+1}."""
    n_seq = family.thresholds.values
    if n < 1 or n >= n_seq[family.K + 1]:
        raise PreconditionError(
            f"n={n} outside the certified range [1, {n_seq[family.K + 1]})", n=n
        )
    k = max(j for j in range(family.K + 1) if n_seq[j] <= n)
    return -(-n // 2**k)


def schreier_family() -> SchreierFamily:
    return SchreierFamily()


def fremlin_family(f="sqrt", D=None, K=2, **kw) -> FremlinFamily:
    return FremlinFamily(f, K=K, depth=D, **kw)


def strongly_monotone_family(D=None) -> StronglyMonotoneFamily:
    return StronglyMonotoneFamily(D)
