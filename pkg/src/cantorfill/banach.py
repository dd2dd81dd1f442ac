"""The combinatorial norm of a hereditary family and Cesàro experiments.

For a finitely supported vector ``v = Σ a_x e_x`` the norm is the largest
``Σ_{x∈G} |a_x|`` over members ``G`` of the family inside the support.
Everything is exact: coefficients are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .density import default_budget, half_filling_subset, max_member_size
from .dyadic import RegularDyadicTree, max_trapped
from .errors import BudgetExceeded, DepthError, PreconditionError, SearchFailed

__all__ = [
    "SupportedVector",
    "NormResult",
    "CesaroReport",
    "NonSummabilityReport",
    "norm_f",
    "norm_bracket",
    "exhaustive_norm",
    "dyadic_enum",
    "branch_point",
    "cesaro_experiment",
    "non_summability_witness",
]


class SupportedVector:
    """Finitely supported vector with rational coefficients; zeros are dropped."""

    def __init__(self, entries=None):
        clean = {}
        for x, a in dict(entries or {}).items():
            a = Fraction(a)
            if a:
                clean[x] = a
        if len({len(x) for x in clean if isinstance(x, str)}) > 1:
            raise DepthError("support points have different depths")
        self.entries = clean

    @classmethod
    def indicator(cls, points, coefficient=1):
        return cls({x: coefficient for x in points})

    @property
    def support(self) -> tuple:
        return tuple(sorted(self.entries))

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, x):
        return self.entries.get(x, Fraction(0))

    def __add__(self, other):
        out = dict(self.entries)
        for x, a in other.entries.items():
            out[x] = out.get(x, 0) + a
        return SupportedVector(out)

    def __mul__(self, c):
        return SupportedVector({x: Fraction(c) * a for x, a in self.entries.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, SupportedVector) and self.entries == other.entries

    def sup_norm(self) -> Fraction:
        return max((abs(a) for a in self.entries.values()), default=Fraction(0))

    def l1_norm(self) -> Fraction:
        return sum((abs(a) for a in self.entries.values()), Fraction(0))

    def to_json(self):
        return {"entries": {str(x): str(a) for x, a in sorted(self.entries.items())}}

    @classmethod
    def from_json(cls, data):
        entries = data["entries"] if "entries" in data else data
        return cls({x: Fraction(a) for x, a in entries.items()})

    def __repr__(self):
        return f"SupportedVector({self.entries!r})"


@dataclass(frozen=True)
class NormResult:
    lower: Fraction
    upper: Fraction
    member: tuple

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def _check_singletons(family, v):
    if v.entries and not family.contains_singletons:
        raise PreconditionError("the family must contain every singleton", family=family.name)


def norm_bracket(family, v: SupportedVector, budget=None) -> NormResult:
    """Norm of ``v`` as a certified ``[lower, upper]`` bracket with a best member.

    Branch and bound over points by decreasing |a_x| (ties by point): include
    before exclude, never extend a non-member, and drop any branch whose value
    plus the remaining mass cannot beat the incumbent.
    """
    _check_singletons(family, v)
    if not v.entries:
        return NormResult(Fraction(0), Fraction(0), ())
    weights = {x: abs(a) for x, a in v.entries.items()}
    fast = family.max_weight_member(weights)
    if fast is not None:
        value, member = fast
        return NormResult(value, value, tuple(member))
    values = set(weights.values())
    if len(values) == 1:
        size, exact = max_member_size(family, v.support, budget)
        if exact:
            w = values.pop()
            return NormResult(w * size, w * size, ())

    budget = default_budget() if budget is None else budget
    order = sorted(weights, key=lambda x: (-weights[x], x))
    w = [weights[x] for x in order]
    suffix = [Fraction(0)] * (len(w) + 1)
    for j in range(len(w) - 1, -1, -1):
        suffix[j] = suffix[j + 1] + w[j]

    best, best_set = Fraction(0), ()
    calls = 0
    # frames: (next index, chosen points, value)
    stack = [(0, (), Fraction(0))]
    while stack:
        j, chosen, value = stack.pop()
        if value > best:
            best, best_set = value, chosen
        if j == len(w) or value + suffix[j] <= best:
            continue
        stack.append((j + 1, chosen, value))
        calls += 1
        if calls > budget:
            upper = max([best] + [val + suffix[k] for k, _, val in stack])
            raise BudgetExceeded("norm search exceeded budget", lower=str(best), upper=str(upper),
                                 bracket=(best, upper))
        cand = tuple(sorted(chosen + (order[j],)))
        if family.member(cand):
            stack.append((j + 1, cand, value + w[j]))
    return NormResult(best, best, tuple(sorted(best_set)))


def norm_f(family, v: SupportedVector, budget=None) -> Fraction:
    """Exact norm; :class:`BudgetExceeded` carries the bracket when the search runs out."""
    return norm_bracket(family, v, budget).lower


def exhaustive_norm(family, v: SupportedVector) -> Fraction:
    """Reference value: maximum over every subset of the support."""
    pts = v.support
    best = Fraction(0)
    for r in range(1, len(pts) + 1):
        for sub in itertools.combinations(pts, r):
            if family.member(sub):
                best = max(best, sum((abs(v[x]) for x in sub), Fraction(0)))
    return best


def dyadic_enum(i: int, m: int) -> str:
    """First ``m`` binary digits of ``i``, least significant first."""
    if i < 0 or i >= 2**m:
        raise PreconditionError(f"{i} needs more than {m} binary digits", i=i, m=m)
    return "".join(str((i >> k) & 1) for k in range(m))


def branch_point(tree: RegularDyadicTree, i: int) -> str:
    """``x_i``: follow the labels along the digits of ``i``, then pad with zeros."""
    d = tree.depth
    if not 0 <= i < 2**d:
        raise PreconditionError(f"index {i} outside 0..2^{d}-1", i=i, depth=d)
    z = dyadic_enum(i, d)
    stem = tree.labels[z[: d - 1]] + z[d - 1]
    if len(stem) > tree.host_depth:
        raise DepthError("host depth too small for branch points", host_depth=tree.host_depth)
    return stem + "0" * (tree.host_depth - len(stem))


@dataclass
class CesaroReport:
    rows: list = field(default_factory=list)  # (i, value, bound or None)
    thresholds: dict = field(default_factory=dict)  # n -> M_n

    @property
    def bound_holds(self) -> bool:
        return all(b is None or v <= b for _, v, b in self.rows)

    def value(self, i):
        return self.rows[i][1]

    def to_json(self):
        return {
            "rows": [{"i": i, "norm": str(v), "bound": None if b is None else str(b)} for i, v, b in self.rows],
            "M": {str(n): m for n, m in sorted(self.thresholds.items())},
            "bound_holds": self.bound_holds,
        }

    def to_csv_rows(self):
        return [("i", "norm", "bound")] + [(i, str(v), "" if b is None else str(b)) for i, v, b in self.rows]


def cesaro_experiment(family, tree: RegularDyadicTree, i_max: int, budget=None) -> CesaroReport:
    """Norms of the running averages of ``e_{x_0}, e_{x_1}, …`` up to ``i_max``.

    The bound ``M_n/2^{n-1}`` applies for ``2^{n-1} ≤ i < 2^n``: the first
    ``i+1`` branch points sit in distinct level-n cylinders, so any member
    among them lies in a trapped product.
    """
    d = tree.depth
    if not 0 <= i_max < 2 ** (d - 1):
        raise PreconditionError(f"i_max must be below 2^{d - 1} for a depth-{d} tree", i_max=i_max)
    if not family.contains_singletons:
        raise PreconditionError("the family must contain every singleton", family=family.name)
    points = [branch_point(tree, i) for i in range(i_max + 1)]
    report = CesaroReport()
    top = i_max.bit_length()
    for n in range(1, top + 1):
        report.thresholds[n] = max_trapped(tree, family, n)
    for i in range(i_max + 1):
        size, exact = max_member_size(family, points[: i + 1], budget)
        if not exact:
            raise BudgetExceeded(f"largest member among the first {i + 1} branch points not certified", i=i)
        n = i.bit_length()
        bound = Fraction(report.thresholds[n], 2 ** (n - 1)) if i else None
        report.rows.append((i, Fraction(size, i + 1), bound))
    return report


@dataclass
class NonSummabilityReport:
    indices: tuple
    points: tuple
    checked: int
    min_ratio: Fraction

    def to_json(self):
        return {"indices": list(self.indices), "points": list(self.points),
                "checked": self.checked, "min_ratio": str(self.min_ratio)}


def non_summability_witness(family, points, m: int, bound=8) -> NonSummabilityReport:
    """Indices ``L`` where every sum ``Σ_{i∈F} e_{x_i}``, F ⊆ L, has norm ≥ |F|/2."""
    pts = tuple(points)
    B = half_filling_subset(family, pts, m, bound)
    if B is None:
        raise SearchFailed(f"no {m}-subset over which the family is 1/2-filling", m=m)
    index = {x: i for i, x in enumerate(pts)}
    L = tuple(sorted(index[x] for x in B))
    checked, ratio = 0, None
    for r in range(1, len(L) + 1):
        for F in itertools.combinations(L, r):
            value = norm_f(family, SupportedVector.indicator(pts[i] for i in F))
            checked += 1
            q = value / r
            if q < Fraction(1, 2):
                raise AssertionError(f"norm {value} < {r}/2 on {F}")
            ratio = q if ratio is None else min(ratio, q)
    return NonSummabilityReport(L, tuple(pts[i] for i in L), checked, ratio)
