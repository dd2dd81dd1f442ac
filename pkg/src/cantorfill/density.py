"""Largest members, densities and filling checks.

``density`` picks the cheapest exact strategy that applies:

* ``size``: the family only looks at cardinalities, one configuration suffices;
* ``classes``: the family is determined by prefixes of a fixed length, so a
  configuration only matters through how many points it puts in each class;
* ``table``: a membership table over all subsets of a small ground, reduced
  with the compiled kernels;
* ``search``: lexicographic enumeration of n-subsets with pruning (a partial
  selection's largest member bounds every completion from below).
"""

from __future__ import annotations

import itertools
import math
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import BudgetExceeded, PreconditionError
from .families import HereditaryFamily

__all__ = [
    "DensityValue",
    "FillingReport",
    "ProbeRow",
    "max_member_search",
    "max_member_within",
    "max_member_size",
    "member_table",
    "best_table",
    "density",
    "density_profile",
    "heredity_violations",
    "is_eps_filling",
    "f_filling_check",
    "density_star_probe",
    "half_filling_subset",
    "is_half_filling_over",
    "default_budget",
]

TABLE_BITS = 25
MEMBER_LIMIT = 2_000_000


def default_budget() -> int:
    return int(os.environ.get("CANTORFILL_BUDGET", 2_000_000))


def max_member_search(member, points, budget=None):
    """Largest member inside ``points``; ``(member, exact)``.

    Depth-first over subsets in lexicographic order, never extending a
    non-member.  The first largest member found is the lexicographically
    smallest one.  ``budget`` caps predicate calls; on exhaustion the best
    member so far is returned with ``exact=False``.
    """
    pts = tuple(points)
    n = len(pts)
    best = ()
    calls = 0
    chosen = []
    stack = [0]
    while stack:
        j = stack[-1]
        if j >= n or len(chosen) + (n - j) <= len(best):
            stack.pop()
            if chosen:
                chosen.pop()
            continue
        stack[-1] = j + 1
        calls += 1
        if budget is not None and calls > budget:
            return best, False
        cand = tuple(chosen) + (pts[j],)
        if member(cand):
            chosen.append(pts[j])
            stack.append(j + 1)
            if len(chosen) > len(best):
                best = tuple(chosen)
    return best, True


def max_member_within(family: HereditaryFamily, config, budget=None) -> tuple:
    """A largest subset of ``config`` in the family (lexicographically first)."""
    pts = tuple(sorted(config))
    fast = family.largest_member(pts)
    if fast is not None:
        return tuple(fast)
    return max_member_search(family.member, pts, budget)[0]


def max_member_size(family: HereditaryFamily, config, budget=None):
    """``(size, exact)`` of the largest member inside ``config``."""
    pts = tuple(sorted(config))
    fast = family.max_member_size(pts)
    if fast is not None:
        return fast, True
    best, exact = max_member_search(family.member, pts, budget)
    return len(best), exact


def member_table(family: HereditaryFamily, points, limit=MEMBER_LIMIT):
    """0/1 array over all subset masks of ``points``, or ``None`` if too large."""
    pts = tuple(points)
    nbits = len(pts)
    table = family.member_table(pts)
    if table is not None:
        return np.ascontiguousarray(table, dtype=np.uint8)
    table = np.zeros(1 << nbits, dtype=np.uint8)
    table[0] = 1
    count = 1
    # members generated once each: extend only by indices above the current maximum
    stack = [(0, (), 0)]
    while stack:
        mask, members, start = stack.pop()
        for j in range(start, nbits):
            cand = members + (pts[j],)
            if family.member(cand):
                m = mask | (1 << j)
                table[m] = 1
                count += 1
                if count > limit:
                    return None
                stack.append((m, cand, j + 1))
    return table


def best_table(family, points, limit=MEMBER_LIMIT):
    """``best[S]`` = size of the largest member inside subset ``S``."""
    table = member_table(family, points, limit)
    if table is None:
        return None
    h = kernels.popcounts(len(points)) * table
    kernels.subset_max_transform(h, len(points))
    return h


@lru_cache(maxsize=4)
def _cached_best(family, points, limit):
    return best_table(family, points, limit)


def _mask_points(points, mask):
    return tuple(p for i, p in enumerate(points) if mask >> i & 1)


@dataclass(frozen=True)
class DensityValue:
    n: int
    value: int
    mode: str  # "exact", "lowerBound" or "upperBound"
    witness: tuple | None = None
    strategy: str = ""
    seed: int | None = None

    def to_json(self):
        return {
            "n": self.n,
            "value": self.value,
            "mode": self.mode,
            "witness": list(self.witness) if self.witness is not None else None,
            "strategy": self.strategy,
            "seed": self.seed,
        }


def _class_vectors(caps, n):
    if not caps:
        if n == 0:
            yield ()
        return
    head, rest = caps[0], caps[1:]
    room = sum(rest)
    for c in range(min(head, n), -1, -1):
        if n - c <= room:
            for tail in _class_vectors(rest, n - c):
                yield (c,) + tail


def _density_classes(family, ground, n, budget):
    depth = family.determination_depth
    classes = {}
    for p in ground:
        classes.setdefault(p[:depth], []).append(p)
    groups = [classes[key] for key in sorted(classes)]
    caps = [len(g) for g in groups]
    best = None
    exact = True
    for steps, vec in enumerate(_class_vectors(caps, n)):
        if steps >= budget:
            raise BudgetExceeded("class enumeration exceeded budget", n=n, budget=budget)
        cfg = tuple(sorted(itertools.chain.from_iterable(g[:c] for g, c in zip(groups, vec))))
        size, ok = max_member_size(family, cfg)
        exact &= ok
        if best is None or size < best[0] or (size == best[0] and cfg < best[1]):
            best = (size, cfg)
    return best[0], best[1], exact


def _density_table(family, ground, n):
    best = _cached_best(family, ground, MEMBER_LIMIT)
    if best is None:
        return None
    value, mask = kernels.min_at_popcount(best, len(ground), n)
    return int(value), _mask_points(ground, mask)


def _density_search(family, ground, n, budget):
    N = len(ground)
    best = [n + 1, None]
    nodes = 0
    exact = True

    def rec(start, chosen):
        nonlocal nodes, exact
        if len(chosen) == n:
            size, ok = max_member_size(family, chosen)
            exact &= ok
            if size < best[0]:
                best[0], best[1] = size, tuple(chosen)
            return
        for j in range(start, N - (n - len(chosen)) + 1):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded("subset enumeration exceeded budget", n=n, budget=budget)
            cand = chosen + (ground[j],)
            if len(cand) < n:
                size, ok = max_member_size(family, cand)
                if ok and size >= best[0]:
                    continue
            rec(j + 1, cand)

    rec(0, ())
    return best[0], best[1], exact


def density(family: HereditaryFamily, ground, n: int, mode="exact", budget=None, samples=200,
            seed=0, strategy=None) -> DensityValue:
    """Density of ``family`` at ``n`` over a finite ground set.

    Exact mode is the minimum over all ``n``-subsets of the ground of the
    largest member inside; sampled mode is the minimum over ``samples``
    seeded random ``n``-subsets, an upper bound.
    """
    ground = tuple(sorted(ground))
    if not 0 <= n <= len(ground):
        raise PreconditionError(f"n={n} outside 0..{len(ground)}", n=n)
    budget = default_budget() if budget is None else budget
    if mode == "sampled":
        if math.comb(len(ground), n) <= samples:
            return density(family, ground, n, "exact", budget)
        rng = random.Random(seed)
        best = None
        for _ in range(samples):
            cfg = tuple(sorted(rng.sample(ground, n)))
            size, _ = max_member_size(family, cfg)
            if best is None or size < best[0]:
                best = (size, cfg)
        return DensityValue(n, best[0], "upperBound", best[1], "sampled", seed)
    if mode != "exact":
        raise ValueError(f"unknown density mode {mode!r}")

    if strategy is None:
        strategy = _pick_strategy(family, ground)
    if strategy == "size":
        cfg = ground[:n]
        size, exact = max_member_size(family, cfg)
        return DensityValue(n, size, "exact" if exact else "lowerBound", cfg, "size")
    if strategy == "classes":
        value, cfg, exact = _density_classes(family, ground, n, budget)
        return DensityValue(n, value, "exact" if exact else "lowerBound", cfg, "classes")
    if strategy == "table":
        out = _density_table(family, ground, n)
        if out is not None:
            return DensityValue(n, out[0], "exact", out[1], "table")
    value, cfg, exact = _density_search(family, ground, n, budget)
    return DensityValue(n, value, "exact" if exact else "lowerBound", cfg, "search")


def _pick_strategy(family, ground):
    if family.size_determined:
        return "size"
    if family.determination_depth is not None and ground and isinstance(ground[0], str):
        return "classes"
    if len(ground) <= TABLE_BITS:
        return "table"
    return "search"


def density_profile(family, ground, n_max, **kw) -> dict[int, DensityValue]:
    return {n: density(family, ground, n, **kw) for n in range(1, n_max + 1)}


def heredity_violations(family, configs):
    """Pairs ``(member, subset)`` where a one-point removal leaves the family."""
    out = []
    for cfg in configs:
        pts = tuple(sorted(cfg))
        for r in range(len(pts) + 1):
            for sub in itertools.combinations(pts, r):
                if family.member(sub):
                    for i in range(len(sub)):
                        smaller = sub[:i] + sub[i + 1 :]
                        if not family.member(smaller):
                            out.append((sub, smaller))
    return out


@dataclass
class FillingReport:
    rows: list = field(default_factory=list)
    heredity_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.heredity_violations and all(r["ok"] for r in self.rows)

    def first_failure(self):
        return next((r for r in self.rows if not r["ok"]), None)

    def to_json(self):
        return {
            "ok": self.ok,
            "rows": self.rows,
            "heredity_violations": [[list(a), list(b)] for a, b in self.heredity_violations],
        }


def _spot_configs(ground, count, size, seed):
    rng = random.Random(seed)
    size = min(size, len(ground))
    return [rng.sample(ground, size) for _ in range(count)]


def is_eps_filling(family, ground, eps, N, spot_checks=20, seed=0, **kw) -> FillingReport:
    """Per-n verdict ``d(n)/n ≥ eps`` for ``n ≤ N``, plus heredity spot checks."""
    eps = Fraction(eps)
    ground = tuple(sorted(ground))
    report = FillingReport()
    for n in range(1, N + 1):
        d = density(family, ground, n, **kw)
        ok = Fraction(d.value, n) >= eps
        if d.mode == "upperBound" and ok:
            ok = None  # an upper bound cannot certify the inequality
        report.rows.append({"n": n, "density": d.value, "mode": d.mode, "ratio": str(Fraction(d.value, n)),
                            "ok": bool(ok), "witness": list(d.witness or ())})
    report.heredity_violations = heredity_violations(family, _spot_configs(ground, spot_checks, 6, seed))
    return report


def f_filling_check(family, A, f, N, **kw) -> FillingReport:
    """Every ``n``-subset of ``A`` (n ≤ N) contains a member of size ≥ f(n)."""
    A = tuple(sorted(A))
    report = FillingReport()
    for n in range(1, min(N, len(A)) + 1):
        d = density(family, A, n, **kw)
        need = f(n)
        ok = d.value >= need and d.mode != "upperBound"
        report.rows.append({"n": n, "f": need, "density": d.value, "mode": d.mode, "ok": ok,
                            "witness": list(d.witness or ())})
    return report


@dataclass(frozen=True)
class ProbeRow:
    n: int
    size: int
    density: int
    mode: str
    value: float

    def to_json(self):
        return {"n": self.n, "size": self.size, "density": self.density, "mode": self.mode,
                "value": self.value}


def density_star_probe(family, ground, n_max, budget=None, samples=200, seed=0) -> list[ProbeRow]:
    """``log2 d(2^n) / log2 n`` for ``2 ≤ n ≤ n_max``.

    Exact where the budget allows, otherwise a sampled upper bound (which
    also bounds the true value from above).
    """
    ground = tuple(sorted(ground))
    rows = []
    for n in range(2, n_max + 1):
        size = 2**n
        if size > len(ground):
            raise PreconditionError(f"ground has fewer than 2^{n} points", n=n)
        try:
            d = density(family, ground, size, budget=budget)
        except BudgetExceeded:
            d = density(family, ground, size, mode="sampled", samples=samples, seed=seed)
        rows.append(ProbeRow(n, size, d.value, d.mode, math.log2(d.value) / math.log2(n)))
    return rows


def _half_need(m):
    return np.array([-(-j // 2) for j in range(m + 1)], dtype=np.uint8)


def is_half_filling_over(family, points) -> bool:
    """Every subset S of ``points`` contains a member of size ≥ ⌈|S|/2⌉."""
    pts = tuple(sorted(points))
    for r in range(1, len(pts) + 1):
        for sub in itertools.combinations(pts, r):
            if max_member_size(family, sub)[0] < -(-r // 2):
                return False
    return True


def half_filling_subset(family, points, m, bound=8):
    """First ``m``-subset (lexicographic) over which the family is 1/2-filling."""
    if m > bound:
        raise BudgetExceeded(f"m={m} exceeds the brute-force bound {bound}", m=m, bound=bound)
    pts = tuple(sorted(points))
    if m > len(pts):
        return None
    if len(pts) <= TABLE_BITS:
        best = _cached_best(family, pts, MEMBER_LIMIT)
        if best is not None:
            mask = kernels.first_filling_combination(best, len(pts), m, _half_need(m))
            return None if mask < 0 else _mask_points(pts, mask)
    for combo in itertools.combinations(pts, m):
        if is_half_filling_over(family, combo):
            return combo
    return None
