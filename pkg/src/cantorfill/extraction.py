"""Increasing sets and the constructive extraction pipeline.

A set of ``2^n`` points is increasing when its splitting nodes, indexed by
``s ∈ 2^{<n}`` through the meet tree, keep ⊑ and ≺ and have lengths that
strictly grow in breadth-first order of ``s`` (level first, then left to
right).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .density import max_member_within
from .errors import (
    DensityPreconditionError,
    DepthError,
    NotIncreasingError,
    PreconditionError,
    SearchFailed,
)
from .nodes import (
    PointConfig,
    TypeSignature,
    downward_closure,
    is_prefix,
    meet,
    pad,
    splitting_nodes,
    tree_of,
    type_of,
)

__all__ = [
    "IncreasingWitness",
    "ExtractionTrace",
    "bfs_indices",
    "is_increasing_config",
    "canonical_increasing",
    "random_increasing",
    "extract_increasing",
    "extract_increasing_trace",
    "extract_type",
    "find_increasing_subset",
    "find_typed_member",
]


def bfs_indices(n: int) -> list[str]:
    """``2^{<n}`` ordered by length, then lexicographically."""
    return ["".join(bits) for j in range(n) for bits in itertools.product("01", repeat=j)]


@dataclass(frozen=True)
class IncreasingWitness:
    labels: dict  # s -> t_s for s in 2^{<n}
    source: PointConfig

    @property
    def n(self) -> int:
        return (len(self.source)).bit_length() - 1

    def level(self, j: int) -> list[str]:
        """``L_F(j)``: labels of the level-j indices, in ≺ order."""
        return [self.labels[s] for s in sorted(s for s in self.labels if len(s) == j)]

    def to_json(self):
        return {"points": list(self.source), "labels": dict(sorted(self.labels.items()))}


def _meet_tree(points, labels, s, n):
    """Index the splitting nodes of ``points`` by ``s``; False if unbalanced."""
    if len(s) == n:
        return len(points) == 1
    if len(points) < 2:
        return False
    w = meet(points[0], points[-1])
    left = [p for p in points if p[len(w)] == "0"]
    right = points[len(left):]
    labels[s] = w
    return _meet_tree(left, labels, s + "0", n) and _meet_tree(right, labels, s + "1", n)


def is_increasing_config(config) -> IncreasingWitness | bool:
    """Witness labelling of the splitting nodes, or ``False``."""
    cfg = config if isinstance(config, PointConfig) else PointConfig(config)
    size = len(cfg)
    if size < 1 or size & (size - 1):
        raise PreconditionError(f"size {size} is not a power of two", size=size)
    n = size.bit_length() - 1
    labels = {}
    if not _meet_tree(list(cfg.points), labels, "", n):
        return False
    lengths = [len(labels[s]) for s in bfs_indices(n)]
    if any(a >= b for a, b in zip(lengths, lengths[1:])):
        return False
    return IncreasingWitness(labels, cfg)


def _labels_to_points(labels, n, depth, fill=None):
    points = []
    for s in bfs_indices(n)[-(2 ** (n - 1)):] if n else []:
        for b in "01":
            stem = labels[s] + b
            points.append(stem + fill(stem, depth) if fill else pad(stem, depth))
    return points


def canonical_increasing(n: int, depth: int) -> PointConfig:
    """Deterministic ``2^n``-increasing set; label ``t_s`` has length = BFS rank of s."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if depth < 2**n:
        raise DepthError(f"canonical 2^{n}-increasing set needs depth >= {2**n}", depth=depth, n=n)
    if n == 0:
        return PointConfig(["0" * depth])
    labels = {}
    for rank, s in enumerate(bfs_indices(n)):
        if not s:
            labels[s] = ""
            continue
        stem = labels[s[:-1]] + s[-1]
        labels[s] = pad(stem, rank)
    return PointConfig(_labels_to_points(labels, n, depth))


def random_increasing(n: int, rng: random.Random, max_gap: int = 2, tail: int = 2) -> PointConfig:
    """A random ``2^n``-increasing set; depth is whatever the gaps add up to."""
    if n == 0:
        return PointConfig(["".join(rng.choice("01") for _ in range(1 + rng.randrange(tail)))])
    labels = {}
    last = -1
    for s in bfs_indices(n):
        if not s:
            length = rng.randrange(max_gap)
            labels[s] = "".join(rng.choice("01") for _ in range(length))
        else:
            parent = labels[s[:-1]]
            length = max(last + 1 + rng.randrange(max_gap), len(parent) + 1)
            labels[s] = parent + s[-1] + "".join(rng.choice("01") for _ in range(length - len(parent) - 1))
        last = len(labels[s])
    depth = last + 1 + rng.randrange(tail + 1)

    def fill(stem, d):
        return "".join(rng.choice("01") for _ in range(d - len(stem)))

    return PointConfig(_labels_to_points(labels, n, depth, fill))


@dataclass
class ExtractionTrace:
    """Intermediate data of :func:`extract_increasing`."""

    levels: list = field(default_factory=list)  # j_0 > j_1 > ... > j_{k-1}
    chain: list = field(default_factory=list)  # A_0, ..., A_{k-1}
    tree: dict = field(default_factory=dict)  # s -> w_s, a k-increasing subtree
    result: PointConfig | None = None

    def to_json(self):
        return {
            "H": list(self.result) if self.result is not None else None,
            "levels": {str(m): j for m, j in enumerate(self.levels)},
            "chain": [sorted(a) for a in self.chain],
            "tree": dict(sorted(self.tree.items())),
        }


def _spl(nodes) -> set:
    return splitting_nodes(downward_closure(nodes))


def extract_increasing_trace(F, G, k: int) -> ExtractionTrace:
    """Find a ``2^k``-increasing ``H ⊆ G`` inside a ``2^n``-increasing ``F``.

    Pigeonhole over the levels ``L_F(j)``: the splitting nodes of ``T_G``
    (then of the closures of the previous pieces) are split by level and the
    smallest level carrying at least ``n^{k-m-1}`` of them is kept.  A
    leftmost descent through the resulting chain gives the subtree, and one
    point of ``G`` on each side of each bottom node realizes ``H``.
    """
    F = F if isinstance(F, PointConfig) else PointConfig(F)
    G = G if isinstance(G, PointConfig) else PointConfig(G)
    witness = is_increasing_config(F)
    if not witness:
        raise NotIncreasingError("F is not increasing", points=list(F))
    n = witness.n
    if n < 2 or k < 1 or 2**n < n**k:
        raise PreconditionError(f"need n >= 2, k >= 1 and 2^n >= n^k (n={n}, k={k})", n=n, k=k)
    if not set(G) <= set(F):
        raise PreconditionError("G is not a subset of F")
    if len(G) < n**k:
        raise PreconditionError(f"|G|={len(G)} < n^k={n**k}", size=len(G), needed=n**k)

    level_of = {t: len(s) for s, t in witness.labels.items()}
    trace = ExtractionTrace()
    pool = splitting_nodes(tree_of(G))
    top = n
    for m in range(k):
        need = n ** (k - m - 1)
        by_level = {}
        for w in pool:
            by_level.setdefault(level_of[w], set()).add(w)
        j = next((j for j in range(top) if len(by_level.get(j, ())) >= need), None)
        if j is None:
            raise AssertionError("pigeonhole step failed; F is not increasing")
        trace.levels.append(j)
        trace.chain.append(by_level[j])
        top = j
        pool = _spl(by_level[j])

    def pick(m, stem):
        # chain pieces are antichains, where ≺ is plain string order
        return min((w for w in trace.chain[m] if is_prefix(stem, w)), default=None)

    root = min(trace.chain[k - 1])
    tree = {"": root}
    for s in bfs_indices(k)[1:]:
        m = k - 1 - len(s)
        w = pick(m, tree[s[:-1]] + s[-1])
        if w is None:
            raise AssertionError("chain node without successors on both sides")
        tree[s] = w
    trace.tree = tree
    points = []
    for s in (s for s in tree if len(s) == k - 1):
        for b in "01":
            points.append(min(p for p in G if is_prefix(tree[s] + b, p)))
    trace.result = PointConfig(points)
    return trace


def extract_increasing(F, G, k: int) -> PointConfig:
    return extract_increasing_trace(F, G, k).result


def extract_type(H, tau) -> PointConfig:
    """A subset of the ``2^k``-increasing set ``H`` of (k+1)-type ``tau``.

    Recurse on the even-indexed points with the restricted type, then add the
    odd neighbour of the ``τ(k)``-th chosen point.
    """
    H = H if isinstance(H, PointConfig) else PointConfig(H)
    tau = tau if isinstance(tau, TypeSignature) else TypeSignature(tau)
    witness = is_increasing_config(H)
    if not witness:
        raise NotIncreasingError("H is not increasing", points=list(H))
    k = witness.n
    if tau.k != k + 1:
        raise PreconditionError(f"H has 2^{k} points, so tau must be a {k + 1}-type", k=k, arity=tau.k)
    if k == 0:
        raise PreconditionError("types need at least two points")
    return PointConfig(H[i] for i in _type_indices(k, tau.values))


def _type_indices(k, values):
    if k == 1:
        return [0, 1]
    inner = _type_indices(k - 1, values[: k - 1])
    chosen = [2 * i for i in inner]
    return sorted(chosen + [2 * inner[values[k - 1]] + 1])


def find_increasing_subset(points, n: int) -> PointConfig:
    """A ``2^n``-increasing subset of a point set, by backtracking.

    Labels are assigned in breadth-first order, each the shortest splitting
    node below its parent's side that is longer than the previous label.
    """
    cfg = points if isinstance(points, PointConfig) else PointConfig(points)
    if n == 0:
        return PointConfig(cfg[:1])
    spl = sorted(splitting_nodes(tree_of(cfg)), key=lambda w: (len(w), w))
    order = bfs_indices(n)
    labels = {}

    def assign(i, last):
        if i == len(order):
            return True
        s = order[i]
        stem = labels[s[:-1]] + s[-1] if s else ""
        for w in spl:
            if len(w) > last and is_prefix(stem, w):
                labels[s] = w
                if assign(i + 1, len(w)):
                    return True
        labels.pop(s, None)
        return False

    if not assign(0, -1):
        raise SearchFailed(f"no 2^{n}-increasing subset", n=n)
    chosen = []
    for s in order[-(2 ** (n - 1)):]:
        for b in "01":
            chosen.append(min(p for p in cfg if is_prefix(labels[s] + b, p)))
    return PointConfig(chosen)


def find_typed_member(family, P, k: int, tau, n: int):
    """A member of ``family`` of type ``tau`` inside ``P``.

    ``P`` is a host depth (the full depth-``D`` cube) or a set of points.
    Pipeline: a ``2^n``-increasing F in P, its largest member G (which must
    have at least ``n^{k-1}`` points), a ``2^{k-1}``-increasing H ⊆ G, then
    the typed subset of H.
    """
    tau = tau if isinstance(tau, TypeSignature) else TypeSignature(tau)
    if n < 2 or k < 2:
        raise PreconditionError("need n >= 2 and k >= 2", n=n, k=k)
    if tau.k != k:
        raise PreconditionError(f"tau is a {tau.k}-type, expected {k}", arity=tau.k, k=k)
    if isinstance(P, int):
        F = canonical_increasing(n, P)
        host = None
    else:
        host = PointConfig(P)
        F = find_increasing_subset(host, n)
    G = max_member_within(family, F)
    if len(G) < n ** (k - 1):
        raise DensityPreconditionError(
            f"largest member of a 2^{n}-increasing set has {len(G)} < {n ** (k - 1)} points",
            witness=list(F), member=list(G), needed=n ** (k - 1),
        )
    H = extract_increasing(F, G, k - 1)
    I = extract_type(H, tau)
    assert family.member(I.points) and type_of(I) == tau
    assert host is None or set(I) <= set(host)
    return I
