"""Regular dyadic trees, cylinders, deciding trees and trapped antichains.

A tree ``T = (t_s)`` is stored as a map from indices ``s ∈ 2^{<d}`` to labels
of length below the host depth ``D``.  The cylinder of ``s`` is the set of
all depth-``D`` extensions of ``t_s``.  A product of level-n cylinders is
classified by checking one representative per cylinder when the family's
membership is determined by prefixes no longer than the labels, and by
enumerating every tuple otherwise.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .density import max_member_size, max_member_within
from .errors import (
    BudgetExceeded,
    FillingPreconditionError,
    NotDecidingError,
    PreconditionError,
    SearchFailed,
)
from .extraction import bfs_indices
from .nodes import comparable, is_prefix, is_strict_prefix, pad, precedes

__all__ = [
    "RegularDyadicTree",
    "CylinderSet",
    "TrappedReport",
    "LimitSet",
    "TRAPPED",
    "DISJOINT",
    "MIXED",
    "UNKNOWN",
    "regularity_violation",
    "validate_regular",
    "cylinder",
    "product_verdict",
    "decides_at",
    "max_trapped",
    "build_deciding_tree",
    "trapped_lower_bound",
    "domination_transfer",
    "measure",
    "limit_closed_set",
    "verify_limit_set",
    "graded_filling_tree",
    "cylinder_certifies",
]

TRAPPED = "trapped"
DISJOINT = "disjoint"
MIXED = "mixed"
UNKNOWN = "unknown"

DEFAULT_TUPLES = 200_000


def level_indices(n: int) -> list[str]:
    return ["".join(b) for b in itertools.product("01", repeat=n)]


@dataclass(frozen=True)
class RegularDyadicTree:
    labels: dict
    host_depth: int

    @property
    def depth(self) -> int:
        return max(len(s) for s in self.labels) + 1

    @classmethod
    def identity(cls, depth: int, host_depth: int) -> "RegularDyadicTree":
        return cls({s: s for s in bfs_indices(depth)}, host_depth)

    def level_length(self, n: int) -> int:
        return len(self.labels["0" * n])

    def representative(self, s: str) -> str:
        return pad(self.labels[s], self.host_depth)

    def index_of(self, t: str) -> str | None:
        return {v: k for k, v in self.labels.items()}.get(t)

    def to_json(self):
        return {"depth": self.depth, "host_depth": self.host_depth,
                "labels": dict(sorted(self.labels.items(), key=lambda kv: (len(kv[0]), kv[0])))}

    @classmethod
    def from_json(cls, data):
        labels = dict(data["labels"])
        host = data.get("host_depth", max(len(t) for t in labels.values()) + 1)
        tree = cls(labels, int(host))
        if "depth" in data and int(data["depth"]) != tree.depth:
            raise PreconditionError("declared depth does not match the labels")
        return tree


def regularity_violation(tree: RegularDyadicTree):
    """First pair of indices breaking regularity, with a reason; ``None`` if regular.

    Local form: labels are uniform in length on each level, each child label
    strictly extends its parent's, and the two children of a node stay in ≺
    order.  These are equivalent to the pairwise conditions.
    """
    labels = tree.labels
    d = tree.depth
    for s in bfs_indices(d):
        if s not in labels:
            return (s, s, "missing index")
        if len(labels[s]) >= tree.host_depth:
            return (s, s, "label not shorter than host depth")
    for n in range(d):
        level = level_indices(n)
        for s in level[1:]:
            if len(labels[s]) != len(labels[level[0]]):
                return (level[0], s, "level lengths differ")
    for s in bfs_indices(d - 1):
        t0, t1 = labels[s + "0"], labels[s + "1"]
        for child in (s + "0", s + "1"):
            if not is_strict_prefix(labels[s], labels[child]):
                return (s, child, "child does not extend parent")
        if comparable(t0, t1) or not precedes(t0, t1):
            return (s + "0", s + "1", "children out of order")
    return None


def validate_regular(tree: RegularDyadicTree) -> bool:
    return regularity_violation(tree) is None


@dataclass(frozen=True)
class CylinderSet:
    """Union of the depth-``D`` cylinders above an antichain of roots."""

    host_depth: int
    roots: tuple

    def __init__(self, host_depth: int, roots):
        roots = tuple(sorted(set(roots)))
        for a, b in itertools.combinations(roots, 2):
            if comparable(a, b):
                raise PreconditionError(f"roots {a!r} and {b!r} are comparable")
        if any(len(r) > host_depth for r in roots):
            raise PreconditionError("root longer than host depth")
        object.__setattr__(self, "host_depth", host_depth)
        object.__setattr__(self, "roots", roots)

    def points(self):
        for r in self.roots:
            for tail in itertools.product("01", repeat=self.host_depth - len(r)):
                yield r + "".join(tail)

    def __len__(self):
        return sum(2 ** (self.host_depth - len(r)) for r in self.roots)

    def union(self, other: "CylinderSet") -> "CylinderSet":
        return CylinderSet(self.host_depth, self.roots + other.roots)

    def to_json(self):
        return {"host_depth": self.host_depth, "roots": list(self.roots)}


def cylinder(tree: RegularDyadicTree, s: str) -> CylinderSet:
    if s not in tree.labels:
        raise PreconditionError(f"index {s!r} not in the tree", index=s)
    return CylinderSet(tree.host_depth, [tree.labels[s]])


def _extensions(t, depth):
    return [t + "".join(b) for b in itertools.product("01", repeat=depth - len(t))]


def _verdict_for_labels(family, labels, host_depth, budget):
    det = family.determination_depth
    if det is not None and all(len(t) >= det for t in labels):
        reps = tuple(pad(t, host_depth) for t in labels)
        return TRAPPED if family.member(reps) else DISJOINT
    total = 1
    for t in labels:
        total *= 2 ** (host_depth - len(t))
    if total > budget:
        return UNKNOWN
    seen_in = seen_out = False
    for combo in itertools.product(*(_extensions(t, host_depth) for t in labels)):
        if family.member(combo):
            seen_in = True
        else:
            seen_out = True
        if seen_in and seen_out:
            return MIXED
    return TRAPPED if seen_in else DISJOINT


def product_verdict(tree, family, antichain, budget=DEFAULT_TUPLES) -> str:
    """Classify the product of the cylinders of ``antichain`` (indices on one level)."""
    antichain = sorted(antichain)
    if len({len(s) for s in antichain}) > 1:
        raise PreconditionError("antichain indices must share one level")
    labels = [tree.labels[s] for s in antichain]
    return _verdict_for_labels(family, labels, tree.host_depth, budget)


def _antichains(n):
    level = level_indices(n)
    for r in range(1, len(level) + 1):
        yield from itertools.combinations(level, r)


@dataclass
class TrappedReport:
    level: int
    verdicts: dict = field(default_factory=dict)  # tuple of indices -> verdict

    @property
    def complete(self) -> bool:
        return UNKNOWN not in self.verdicts.values()

    @property
    def max_trapped(self) -> int:
        return max((len(a) for a, v in self.verdicts.items() if v == TRAPPED), default=0)

    def with_verdict(self, verdict):
        return [a for a, v in self.verdicts.items() if v == verdict]

    @property
    def mixed(self):
        return self.with_verdict(MIXED)

    def hereditary_violations(self):
        """Trapped antichains with a non-trapped one-point removal."""
        bad = []
        for a in self.with_verdict(TRAPPED):
            for i in range(len(a)):
                sub = a[:i] + a[i + 1 :]
                if sub and self.verdicts.get(sub) not in (TRAPPED, UNKNOWN):
                    bad.append((a, sub))
        return bad

    def to_json(self):
        return {
            "level": self.level,
            "complete": self.complete,
            "M": self.max_trapped,
            "counts": dict(Counter(self.verdicts.values())),
            "verdicts": {",".join(a) if a[0] else "∅": v for a, v in self.verdicts.items()},
        }


def decides_at(tree, family, n, budget=DEFAULT_TUPLES, max_antichains=1 << 16) -> TrappedReport:
    """Verdict for every non-empty antichain of level ``n``."""
    if not 0 <= n < tree.depth:
        raise PreconditionError(f"level {n} outside the tree (depth {tree.depth})", n=n)
    if 2 ** (2**n) - 1 > max_antichains:
        raise BudgetExceeded(f"level {n} has too many antichains to list", n=n)
    report = TrappedReport(n)
    for a in _antichains(n):
        report.verdicts[a] = product_verdict(tree, family, a, budget)
    return report


def max_trapped(tree, family, n, budget=DEFAULT_TUPLES) -> int:
    """``M_n``, the size of the largest trapped antichain at level ``n``.

    Uses one representative per cylinder when the family is determined at the
    level's label length: trapped antichains are then exactly the member
    subsets of the representatives.
    """
    det = family.determination_depth
    if det is not None and tree.level_length(n) >= det:
        reps = [tree.representative(s) for s in level_indices(n)]
        return max_member_size(family, reps)[0]
    report = decides_at(tree, family, n, budget)
    if report.mixed or not report.complete:
        raise NotDecidingError(f"tree does not decide at level {n}", level=n)
    return report.max_trapped


def build_deciding_tree(family, levels: int, host_depth: int, budget=DEFAULT_TUPLES) -> RegularDyadicTree:
    """A regular dyadic tree of depth ``levels + 1`` deciding for ``family``.

    Level by level: children start one bit below their parent; antichains are
    visited by size then lexicographically, and a mixed one shrinks its
    cylinders by extending every label of the level by the same number of
    bits (first successful extension in lexicographic order; labels outside
    the antichain continue with zeros).  Shrinking keeps earlier verdicts.
    """
    labels = {"": ""}
    for j in range(levels + 1):
        level = level_indices(j)
        for s in level[1:] if j == 0 else level:
            labels[s] = labels[s[:-1]] + s[-1]
        if len(labels[level[0]]) >= host_depth:
            raise SearchFailed(f"level {j} does not fit in host depth {host_depth}", level=j)
        for a in _antichains(j):
            current = [labels[s] for s in a]
            verdict = _verdict_for_labels(family, current, host_depth, budget)
            if verdict == TRAPPED or verdict == DISJOINT:
                continue
            ext = _homogenize(family, level, labels, a, host_depth, budget)
            if ext is None:
                raise SearchFailed(
                    f"antichain {list(a)} at level {j} cannot be made homogeneous",
                    level=j, antichain=list(a), verdict=verdict,
                )
            for s in level:
                labels[s] += ext.get(s, "0" * len(next(iter(ext.values()))))
    tree = RegularDyadicTree(labels, host_depth)
    assert validate_regular(tree)
    return tree


def _homogenize(family, level, labels, antichain, host_depth, budget):
    room = host_depth - 1 - len(labels[level[0]])
    spent = 0
    for delta in range(1, room + 1):
        tails = ["".join(b) for b in itertools.product("01", repeat=delta)]
        for choice in itertools.product(tails, repeat=len(antichain)):
            spent += 1
            if spent > budget:
                raise BudgetExceeded("refinement search exceeded budget", antichain=list(antichain))
            shrunk = [labels[s] + e for s, e in zip(antichain, choice)]
            if _verdict_for_labels(family, shrunk, host_depth, budget) in (TRAPPED, DISJOINT):
                return dict(zip(antichain, choice))
    return None


def trapped_lower_bound(tree, family, eps, n, budget=DEFAULT_TUPLES) -> tuple:
    """A trapped antichain of level ``n`` with at least ``eps·2^n`` indices.

    One representative per level-``n`` cylinder; a largest member among them
    maps back to indices, and the deciding property makes it trapped.
    """
    eps = Fraction(eps)
    level = level_indices(n)
    reps = {tree.representative(s): s for s in level}
    G = max_member_within(family, sorted(reps))
    F_n = tuple(sorted(reps[x] for x in G))
    if len(F_n) < eps * 2**n:
        raise FillingPreconditionError(
            f"largest member among level-{n} representatives has {len(F_n)} < {eps}·2^{n}",
            level=n, witness=sorted(reps), member=list(G),
        )
    verdict = product_verdict(tree, family, F_n, budget)
    if verdict != TRAPPED:
        raise NotDecidingError(f"antichain {list(F_n)} is {verdict}, not trapped", level=n, verdict=verdict)
    return F_n


def domination_transfer(tree, family, F, G, budget=DEFAULT_TUPLES) -> str:
    """Verdict of ``G``, after checking that ``F`` trapped forces ``G`` trapped."""
    F, G = tuple(sorted(F)), tuple(sorted(G))
    if not all(any(is_prefix(w, s) for s in F) for w in G):
        raise PreconditionError("G is not dominated by F")
    if F and G and len(G[0]) > len(F[0]):
        raise PreconditionError("G must live on a level at or above F")
    vf = product_verdict(tree, family, F, budget)
    vg = product_verdict(tree, family, G, budget)
    if vf == TRAPPED and vg != TRAPPED:
        raise NotDecidingError("a dominated antichain of a trapped one is not trapped",
                               F=list(F), G=list(G), verdict=vg)
    return vg


def measure(tree, cylinders: CylinderSet) -> Fraction:
    """Mass under the uniform tree measure: ``2^-n`` per level-n cylinder."""
    inverse = {}
    for s, t in tree.labels.items():
        inverse.setdefault(t, s)
    total = Fraction(0)
    for r in cylinders.roots:
        if r not in inverse:
            raise PreconditionError(f"root {r!r} is not a label of the tree", root=r)
        total += Fraction(1, 2 ** len(inverse[r]))
    return total


@dataclass(frozen=True)
class LimitSet:
    level: int
    nodes: tuple
    subsequence: tuple
    cylinders: CylinderSet
    mass: Fraction

    def to_json(self):
        return {"level": self.level, "nodes": list(self.nodes), "subsequence": list(self.subsequence),
                "cylinders": self.cylinders.to_json(), "measure": str(self.mass)}


def limit_closed_set(tree, family, eps, max_level, r, budget=DEFAULT_TUPLES) -> LimitSet:
    """Finite stand-in for a closed set of measure ≥ eps inside the family.

    For each level ``n`` in ``r..max_level`` take a trapped ``F_n`` and the
    level-``r`` nodes it dominates.  The set occurring most often (earliest
    first occurrence on ties) is kept, with the levels where it occurs.
    """
    if not 0 <= r <= max_level < tree.depth:
        raise PreconditionError("need 0 <= r <= max_level < tree depth")
    shadows = []
    for n in range(r, max_level + 1):
        try:
            F_n = trapped_lower_bound(tree, family, eps, n, budget)
        except (FillingPreconditionError, NotDecidingError) as exc:
            raise SearchFailed(f"no qualifying subsequence: level {n} failed ({exc})",
                               **{**exc.details, "level": n}) from exc
        shadows.append(tuple(sorted({s[:r] for s in F_n})))
    counts = Counter(shadows)
    top = max(counts.values())
    nodes = next(sh for sh in shadows if counts[sh] == top)
    subsequence = tuple(n for n, sh in zip(range(r, max_level + 1), shadows) if sh == nodes)
    cyl = CylinderSet(tree.host_depth, [tree.labels[s] for s in nodes])
    return LimitSet(r, nodes, subsequence, cyl, measure(tree, cyl))


def verify_limit_set(tree, family, nodes, max_size=4, budget=DEFAULT_TUPLES) -> list:
    """Antichains of at most ``max_size`` limit nodes whose product is not trapped."""
    bad = []
    for size in range(1, min(max_size, len(nodes)) + 1):
        for a in itertools.combinations(sorted(nodes), size):
            v = product_verdict(tree, family, a, budget)
            if v != TRAPPED:
                bad.append((a, v))
    return bad


def cylinder_certifies(family, t, host_depth, size, budget=DEFAULT_TUPLES) -> bool:
    """Whether every set of at most ``size`` points extending ``t`` is a member.

    Heredity reduces this to sets of exactly ``size`` points; the cylinder
    must have at least that many.
    """
    count = 2 ** (host_depth - len(t))
    if count < size:
        return False
    det = family.determination_depth
    if det is not None:
        if len(t) >= det:
            first = tuple(t + "".join(b) for b in itertools.islice(
                itertools.product("01", repeat=host_depth - len(t)), size))
            return family.member(first)
        groups = [_extensions(t + "".join(c), host_depth)
                  for c in itertools.product("01", repeat=det - len(t))]
        from .density import _class_vectors

        for steps, vec in enumerate(_class_vectors([len(g) for g in groups], size)):
            if steps > budget:
                raise BudgetExceeded("cylinder certification exceeded budget", label=t)
            cfg = tuple(sorted(itertools.chain.from_iterable(g[:c] for g, c in zip(groups, vec))))
            if not family.member(cfg):
                return False
        return True
    points = _extensions(t, host_depth)
    for steps, combo in enumerate(itertools.combinations(points, size)):
        if steps > budget:
            raise BudgetExceeded("cylinder certification exceeded budget", label=t)
        if not family.member(combo):
            return False
    return True


def graded_filling_tree(family, g, levels: int, host_depth: int, budget=DEFAULT_TUPLES) -> RegularDyadicTree:
    """Tree whose level-``k`` cylinders carry only members up to size ``g(k)``.

    Each level starts one bit below the parent labels and is pushed down by a
    common number of bits; every label independently takes the first
    extension (lexicographic) whose cylinder certifies ``g(k)``.
    """
    labels = {}
    for j in range(levels + 1):
        level = level_indices(j)
        base = {s: (labels[s[:-1]] + s[-1] if s else "") for s in level}
        need = g(j)
        placed = None
        blocker = None
        for delta in range(0, host_depth - len(base[level[0]])):
            tails = ["".join(b) for b in itertools.product("01", repeat=delta)]
            trial = {}
            for s in level:
                ext = next((e for e in tails if cylinder_certifies(family, base[s] + e, host_depth, need, budget)),
                           None)
                if ext is None:
                    blocker = s
                    break
                trial[s] = base[s] + ext
            else:
                placed = trial
                break
        if placed is None:
            raise SearchFailed(f"no cylinder below index {blocker!r} at level {j} certifies size {need}",
                               level=j, index=blocker, size=need)
        labels.update(placed)
    tree = RegularDyadicTree(labels, host_depth)
    assert validate_regular(tree)
    return tree
