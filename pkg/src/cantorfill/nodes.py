"""Finite nodes of the Cantor tree, point configurations and tree types.

Nodes are plain ``str`` objects over the alphabet ``{'0', '1'}``; the empty
string is the root.  A point of the depth-``D`` approximation of the Cantor
set is a node of length exactly ``D``.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ComparableNodesError, DepthError, NotSkewError, PreconditionError

__all__ = [
    "meet",
    "is_prefix",
    "is_strict_prefix",
    "comparable",
    "precedes",
    "check_node",
    "PointConfig",
    "FiniteTree",
    "TypeSignature",
    "tree_of",
    "splitting_nodes",
    "downward_closure",
    "is_skew",
    "type_of",
    "enumerate_types",
    "realize_type",
    "pad",
]


def check_node(s: str) -> str:
    if not isinstance(s, str) or s.strip("01"):
        raise ValueError(f"not a bitstring: {s!r}")
    return s


def meet(s: str, t: str) -> str:
    """Longest common prefix of two nodes."""
    return os.path.commonprefix((s, t))


def is_prefix(s: str, t: str) -> bool:
    """``s ⊑ t``."""
    return t.startswith(s)


def is_strict_prefix(s: str, t: str) -> bool:
    return len(s) < len(t) and t.startswith(s)


def comparable(s: str, t: str) -> bool:
    return s.startswith(t) or t.startswith(s)


def precedes(s: str, t: str) -> bool:
    """True iff ``s`` leaves ``s ∧ t`` through 0 and ``t`` through 1.

    Only defined for ⊑-incomparable nodes.
    """
    if comparable(s, t):
        raise ComparableNodesError(f"{s!r} and {t!r} are comparable", s=s, t=t)
    w = len(meet(s, t))
    return s[w] == "0"


def pad(s: str, depth: int, fill: str = "0") -> str:
    """Leftmost (by default) extension of ``s`` to ``depth``."""
    if len(s) > depth:
        raise DepthError(f"node {s!r} longer than depth {depth}")
    return s + fill * (depth - len(s))


@dataclass(frozen=True)
class PointConfig:
    """Strictly increasing tuple of equal-length bitstrings."""

    points: tuple

    def __init__(self, points: Iterable[str]):
        pts = sorted(check_node(p) for p in points)
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate points in configuration")
        if pts and len({len(p) for p in pts}) != 1:
            raise DepthError("points of a configuration must share one depth")
        object.__setattr__(self, "points", tuple(pts))

    @property
    def depth(self) -> int | None:
        return len(self.points[0]) if self.points else None

    def __iter__(self) -> Iterator[str]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, x) -> bool:
        return x in self.points

    def __getitem__(self, i):
        return self.points[i]

    def __repr__(self):
        return f"PointConfig({list(self.points)!r})"


@dataclass(frozen=True)
class FiniteTree:
    """A finite set of nodes viewed with the induced ⊑ order."""

    nodes: frozenset

    def __init__(self, nodes: Iterable[str]):
        object.__setattr__(self, "nodes", frozenset(check_node(s) for s in nodes))

    @property
    def downward_closed(self) -> bool:
        return all(s[:-1] in self.nodes for s in self.nodes if s)

    def level(self, m: int) -> list[str]:
        """Nodes with exactly ``m`` predecessors in the tree, sorted."""
        if self.downward_closed:
            return sorted(s for s in self.nodes if len(s) == m)
        out = []
        for s in self.nodes:
            if sum(1 for t in self.nodes if is_strict_prefix(t, s)) == m:
                out.append(s)
        return sorted(out)

    def height(self) -> int:
        return max((len(s) for s in self.nodes), default=-1)

    def __iter__(self):
        return iter(sorted(self.nodes, key=lambda s: (len(s), s)))

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, s):
        return s in self.nodes


def _prefixes(s: str) -> Iterator[str]:
    for i in range(len(s) + 1):
        yield s[:i]


def downward_closure(nodes: Iterable[str]) -> FiniteTree:
    out = set()
    for s in nodes:
        out.update(_prefixes(check_node(s)))
    return FiniteTree(out)


def tree_of(config) -> FiniteTree:
    """The prefix tree T_F of a non-empty configuration."""
    cfg = config if isinstance(config, PointConfig) else PointConfig(config)
    if not cfg.points:
        raise PreconditionError("tree of an empty configuration")
    return downward_closure(cfg.points)


def splitting_nodes(tree: FiniteTree) -> set[str]:
    if not tree.downward_closed:
        raise PreconditionError("splitting nodes need a downward closed tree")
    nodes = tree.nodes
    return {s for s in nodes if s + "0" in nodes and s + "1" in nodes}


def is_skew(tree: FiniteTree) -> bool:
    seen = set()
    for s in splitting_nodes(tree):
        if len(s) in seen:
            return False
        seen.add(len(s))
    return True


@dataclass(frozen=True)
class TypeSignature:
    """A k-type, stored as the vector ``(τ(1), ..., τ(k-1))``."""

    values: tuple

    def __init__(self, values: Iterable[int]):
        vals = tuple(int(v) for v in values)
        for n, v in enumerate(vals, start=1):
            if not 0 <= v <= n - 1:
                raise ValueError(f"type value τ({n})={v} outside 0..{n - 1}")
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return len(self.values) + 1

    def __call__(self, n: int) -> int:
        if not 1 <= n <= len(self.values):
            raise KeyError(n)
        return self.values[n - 1]

    def restrict(self, m: int) -> "TypeSignature":
        """The restriction to ``{1, ..., m}``, an (m+1)-type."""
        return TypeSignature(self.values[:m])

    def to_json(self) -> list[int]:
        return list(self.values)

    def __repr__(self):
        return f"TypeSignature({list(self.values)})"


def type_of(config) -> TypeSignature:
    """Type of a configuration whose prefix tree is skew.

    For each n, find the first level with n+1 nodes; the value is the
    ≺-position of the splitting node on the level just above it.
    """
    cfg = config if isinstance(config, PointConfig) else PointConfig(config)
    k = len(cfg)
    if k < 2:
        raise PreconditionError("a type needs at least two points", size=k)
    tree = tree_of(cfg)
    if not is_skew(tree):
        raise NotSkewError("prefix tree is not skew", points=list(cfg.points))
    spl = splitting_nodes(tree)
    values = []
    depth = cfg.depth
    prev = [""]
    for m in range(1, depth + 1):
        level = sorted(s for s in tree.nodes if len(s) == m)
        if len(level) > len(prev):
            # skew: the level grows by exactly one node
            (split,) = [s for s in prev if s in spl]
            values.append(prev.index(split))
        prev = level
    return TypeSignature(values)


def enumerate_types(k: int) -> list[TypeSignature]:
    """All k-types in lexicographic order of their value vectors."""
    if k < 2:
        raise PreconditionError("k-types need k >= 2", k=k)
    return [TypeSignature(v) for v in itertools.product(*(range(n) for n in range(1, k)))]


def realize_type(tau: TypeSignature, depth: int) -> PointConfig:
    """A canonical configuration of type ``tau`` at the given depth.

    Grows a staircase: at step n the ``τ(n)``-th active node splits and the
    others continue with 0, so the tree gains one node per level.
    """
    if not isinstance(tau, TypeSignature):
        tau = TypeSignature(tau)
    k = tau.k
    if depth < k - 1:
        raise DepthError(f"type of arity {k} needs depth >= {k - 1}", depth=depth, k=k)
    active = [""]
    for v in tau.values:
        grown = []
        for i, s in enumerate(active):
            if i == v:
                grown.extend((s + "0", s + "1"))
            else:
                grown.append(s + "0")
        active = grown
    return PointConfig(pad(s, depth) for s in active)


def count_types(k: int) -> int:
    return math.factorial(k - 1)
