"""Finite compact sets, the Hausdorff metric, and Vietoris basic opens.

Finite point sets are dense in the space of non-empty compact subsets under
the Hausdorff metric, and every recurrence witness this package constructs
is finite, so they are the computable representation used throughout.
Membership answers on continuous spaces are therefore sound for existence
claims and inconclusive for refutations; see the README for the semantics.
"""

from __future__ import annotations

from itertools import product as _cartesian
from typing import Iterable, Sequence

from .spaces import (
    TOL,
    DynSystem,
    FiniteSpace,
    MetricSpace,
    OpenSet,
    ProductSpace,
    iterate,
)


class CompactSet:
    """A non-empty finite set of points of a space, deduplicated under TOL."""

    __slots__ = ("space", "points")

    def __init__(self, space: MetricSpace, points: Iterable):
        pts = sorted(points)
        if not pts:
            raise ValueError("compact set must be non-empty")
        kept: list = []
        for p in pts:
            space.check_point(p)
            if all(space.dist(p, q) >= TOL for q in kept):
                kept.append(p)
        self.space = space
        self.points = tuple(kept)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other):
        # structural equality on canonical point lists
        return (isinstance(other, CompactSet)
                and self.points == other.points)

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        return "{" + ", ".join(str(p) for p in self.points) + "}"

    def union(self, other: "CompactSet") -> "CompactSet":
        _require_same_space(self, other)
        return CompactSet(self.space, self.points + other.points)


def _require_same_space(a: CompactSet, b: CompactSet) -> None:
    if a.space is not b.space and repr(a.space) != repr(b.space):
        raise ValueError("compact sets live in different spaces")


def point_to_set(space: MetricSpace, x, k: CompactSet):
    return min(space.dist(x, q) for q in k.points)


def directed_hausdorff(a: CompactSet, b: CompactSet):
    return max(point_to_set(a.space, p, b) for p in a.points)


def hausdorff(a: CompactSet, b: CompactSet):
    """max of the two directed max-min distances."""
    _require_same_space(a, b)
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def sets_close(a: CompactSet, b: CompactSet, tol: float = TOL) -> bool:
    """Two-sided coverage within tol, i.e. equality up to the tolerance."""
    return hausdorff(a, b) <= tol


def hyper_apply(sys: DynSystem, k: CompactSet, n: int = 1) -> CompactSet:
    """Pointwise image of the set under the n-th iterate of the map."""
    if n == 1:
        return CompactSet(k.space, [sys.step(p) for p in k.points])
    return CompactSet(k.space, [iterate(sys, p, n) for p in k.points])


def hausdorff_ball_contains(center: CompactSet, eps, k: CompactSet) -> bool:
    """Membership of k in the open Hausdorff ball around center."""
    if eps <= 0:
        raise ValueError("ball radius must be positive")
    return hausdorff(center, k) < eps


class VietorisOpen:
    """Basic Vietoris open: sets covered by the union of the constituents
    and meeting every constituent."""

    def __init__(self, opens: Sequence[OpenSet]):
        opens = tuple(opens)
        if not opens:
            raise ValueError("a Vietoris open needs at least one constituent")
        self.opens = opens

    def __len__(self):
        return len(self.opens)

    def describe(self) -> str:
        return "V(" + "; ".join(u.describe() for u in self.opens) + ")"


def vietoris_contains(v: VietorisOpen, k: CompactSet) -> bool:
    space = k.space
    covered = all(
        any(u.contains(space, p) for u in v.opens) for p in k.points)
    if not covered:
        return False
    return all(
        any(u.contains(space, p) for p in k.points) for u in v.opens)


def product_embed(ks: Sequence[CompactSet]) -> CompactSet:
    """Cartesian product of compact sets, as a compact set of the product
    space.  The embedding is injective and commutes with coordinatewise
    images."""
    ks = list(ks)
    if not ks:
        raise ValueError("need at least one factor")
    for k in ks:
        if len(k) == 0:
            raise ValueError("empty factor")
    space = ProductSpace([k.space for k in ks])
    pts = [tuple(t) for t in _cartesian(*(k.points for k in ks))]
    return CompactSet(space, pts)


def enumerate_compacts(space: FiniteSpace, bound: int = 5) -> list[CompactSet]:
    """All non-empty subsets of a small finite space, in bitmask order."""
    if space.size > bound:
        raise ValueError(
            f"space size {space.size} exceeds enumeration bound {bound}")
    out = []
    for mask in range(1, 1 << space.size):
        pts = [i for i in range(space.size) if mask >> i & 1]
        out.append(CompactSet(space, pts))
    return out


def compact_from_mask(space: FiniteSpace, mask: int) -> CompactSet:
    return CompactSet(space, [i for i in range(space.size) if mask >> i & 1])


def mask_of_compact(k: CompactSet) -> int:
    mask = 0
    for p in k.points:
        mask |= 1 << p
    return mask


class HyperMetric(MetricSpace):
    """The space of finite compact subsets of a base space under the
    Hausdorff metric, so generic point machinery runs one level up."""

    def __init__(self, base: MetricSpace):
        self.base = base

    def dist(self, x, y):
        return hausdorff(x, y)

    def check_point(self, x) -> None:
        if not isinstance(x, CompactSet):
            raise ValueError(f"expected a compact set, got {x!r}")

    def grid(self, count: int) -> list:
        return [CompactSet(self.base, [p]) for p in self.base.grid(count)]

    def random_point(self, rng):
        k = rng.randrange(1, 4)
        return CompactSet(self.base, [self.base.random_point(rng)
                                      for _ in range(k)])

    def __repr__(self):
        return f"HyperMetric({self.base!r})"


class HyperSystem(DynSystem):
    """The induced map K -> f(K) on finite compact sets.

    Orbits are assembled pointwise, so closed-form base orbits stay closed
    form and finite base orbits keep exact periodicity certificates.
    """

    def __init__(self, base: DynSystem):
        self.base = base
        self.space = HyperMetric(base.space)

    def step(self, k: CompactSet) -> CompactSet:
        return hyper_apply(self.base, k)

    def orbit(self, k: CompactSet):
        from .spaces import ClosedFormOrbit
        import math as _math
        parts = [self.base.orbit(p) for p in k.points]
        space = self.base.space
        out = ClosedFormOrbit(
            lambda m: CompactSet(space, [o.at(m) for o in parts]))
        pres = [o.preperiod for o in parts]
        if all(p is not None for p in pres):
            out.preperiod = max(pres)
            out.period = _math.lcm(*(o.period for o in parts))
        return out

    def describe(self) -> str:
        return f"hyper({self.base.describe()})"
