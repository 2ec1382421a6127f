"""Metric spaces, open sets, and discrete-time dynamical systems.

Three point universes are supported: finite spaces (points are indices
0..n-1), the unit circle R/Z with arc-length distance, and finite products
with the max metric.  Circle coordinates may be floats or Fractions; the
doubling map always computes in exact rational arithmetic internally, so
long orbits do not decay numerically.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from itertools import islice, product as _cartesian
from typing import Iterator, Sequence

#: global tolerance for coordinate and distance comparisons
TOL = 1e-9


def _mod1(x):
    # works for int, float and Fraction alike
    return x % 1


# ---------------------------------------------------------------------------
# metric spaces
# ---------------------------------------------------------------------------

class MetricSpace:
    """Base class for point universes carrying a metric."""

    def dist(self, x, y):
        raise NotImplementedError

    def check_point(self, x) -> None:
        """Raise if ``x`` is not a valid point of this space."""
        raise NotImplementedError

    def grid(self, count: int) -> list:
        """A deterministic spread of points, used by samplers and probes."""
        raise NotImplementedError

    def random_point(self, rng):
        raise NotImplementedError


class FiniteSpace(MetricSpace):
    """``size`` points indexed 0..size-1.

    With no matrix the discrete metric is used (all off-diagonal distances
    are 1).  A supplied matrix must be symmetric, vanish exactly on the
    diagonal and satisfy the triangle inequality; this is checked on
    construction.
    """

    def __init__(self, size: int, matrix: Sequence[Sequence[float]] | None = None):
        if size < 1:
            raise ValueError(f"finite space needs at least one point, got {size}")
        self.size = size
        if matrix is None:
            self.matrix = None
        else:
            m = tuple(tuple(row) for row in matrix)
            if len(m) != size or any(len(row) != size for row in m):
                raise ValueError(f"distance matrix must be {size}x{size}")
            for i in range(size):
                if m[i][i] != 0:
                    raise ValueError(f"nonzero diagonal entry at {i}")
                for j in range(size):
                    if m[i][j] < 0:
                        raise ValueError(f"negative distance at ({i},{j})")
                    if i != j and m[i][j] <= 0:
                        raise ValueError(f"distinct points {i},{j} at distance 0")
                    if abs(m[i][j] - m[j][i]) > TOL:
                        raise ValueError(f"asymmetric matrix at ({i},{j})")
            for i in range(size):
                for j in range(size):
                    for k in range(size):
                        if m[i][j] > m[i][k] + m[k][j] + TOL:
                            raise ValueError(
                                f"triangle inequality fails on ({i},{j},{k})")
            self.matrix = m

    def dist(self, x, y):
        self.check_point(x)
        self.check_point(y)
        if self.matrix is None:
            return 0.0 if x == y else 1.0
        return self.matrix[x][y]

    def check_point(self, x) -> None:
        if not isinstance(x, (int,)) or isinstance(x, bool):
            raise ValueError(f"finite-space points are integers, got {x!r}")
        if not 0 <= x < self.size:
            raise IndexError(f"point {x} outside finite space of size {self.size}")

    def points(self) -> range:
        return range(self.size)

    def grid(self, count: int) -> list:
        return list(range(self.size))

    def random_point(self, rng):
        return rng.randrange(self.size)

    def __repr__(self):
        kind = "discrete" if self.matrix is None else "matrix"
        return f"FiniteSpace({self.size}, {kind})"


class Circle(MetricSpace):
    """The circle R/Z of circumference 1 with arc-length distance.

    Points are reals reduced mod 1; distances lie in [0, 1/2].  Fractions
    are kept exact throughout.
    """

    def dist(self, x, y):
        self.check_point(x)
        self.check_point(y)
        d = abs(_mod1(x) - _mod1(y))
        return min(d, 1 - d)

    def check_point(self, x) -> None:
        if not isinstance(x, numbers.Real):
            raise ValueError(f"circle points are real numbers, got {x!r}")

    def grid(self, count: int) -> list:
        return [Fraction(i, count) for i in range(count)]

    def random_point(self, rng):
        return rng.random()

    def __repr__(self):
        return "Circle()"


class ProductSpace(MetricSpace):
    """Finite product of factor spaces with the max-of-coordinates metric.

    The max metric makes a product ball equal the box of factor balls, which
    the witness constructions on product systems rely on.
    """

    def __init__(self, factors: Sequence[MetricSpace]):
        if not factors:
            raise ValueError("product space needs at least one factor")
        self.factors = tuple(factors)

    @property
    def arity(self) -> int:
        return len(self.factors)

    def dist(self, x, y):
        self.check_point(x)
        self.check_point(y)
        return max(f.dist(a, b) for f, a, b in zip(self.factors, x, y))

    def check_point(self, x) -> None:
        if not isinstance(x, tuple) or len(x) != len(self.factors):
            raise ValueError(
                f"expected a {len(self.factors)}-tuple, got {x!r}")
        for f, c in zip(self.factors, x):
            f.check_point(c)

    def grid(self, count: int) -> list:
        per = max(1, round(count ** (1.0 / len(self.factors))))
        axes = [f.grid(per) for f in self.factors]
        return list(islice(_cartesian(*axes), count))

    def random_point(self, rng):
        return tuple(f.random_point(rng) for f in self.factors)

    def __repr__(self):
        return f"ProductSpace({list(self.factors)!r})"


def dist(space: MetricSpace, x, y):
    return space.dist(x, y)


# ---------------------------------------------------------------------------
# open sets
# ---------------------------------------------------------------------------

class OpenSet:
    """A non-empty open subset of some space, with exact membership."""

    def contains(self, space: MetricSpace, x) -> bool:
        raise NotImplementedError

    def sample(self, space: MetricSpace, budget: int, rng) -> list:
        """Points inside the set: deterministic grid plus seeded randoms."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class FiniteSubset(OpenSet):
    """A set of indices, open in any finite space (discrete topology)."""

    indices: frozenset

    def __init__(self, indices):
        object.__setattr__(self, "indices", frozenset(indices))
        if not self.indices:
            raise ValueError("open subset must be non-empty")

    def contains(self, space, x) -> bool:
        space.check_point(x)
        return x in self.indices

    def sample(self, space, budget, rng):
        return sorted(self.indices)

    def describe(self) -> str:
        return "{" + ",".join(str(i) for i in sorted(self.indices)) + "}"


def _arc_contains(a, b, x):
    # open arc running counterclockwise from a to b, wrapping when b < a
    span = _mod1(b - a)
    off = _mod1(x - a)
    return 0 < off < span


@dataclass(frozen=True)
class ArcUnion(OpenSet):
    """Finite union of open circle arcs (a, b), counterclockwise, wrap allowed.

    Rational endpoints stay exact, which matters for the doubling map: grid
    samples of a rational arc are Fractions and iterate without float drift.
    """

    arcs: tuple

    def __init__(self, arcs):
        arcs = tuple((_mod1(a), _mod1(b)) for a, b in arcs)
        if not arcs:
            raise ValueError("arc union must have at least one arc")
        for a, b in arcs:
            if _mod1(b - a) == 0:
                raise ValueError(f"arc ({a},{b}) has zero length")
        object.__setattr__(self, "arcs", arcs)

    @staticmethod
    def around(center, radius) -> "ArcUnion":
        if radius <= 0:
            raise ValueError("arc radius must be positive")
        return ArcUnion([(center - radius, center + radius)])

    def contains(self, space, x) -> bool:
        space.check_point(x)
        return any(_arc_contains(a, b, x) for a, b in self.arcs)

    def sample(self, space, budget, rng):
        pts = []
        grid_budget = max(1, budget // 2)
        per_arc = max(1, grid_budget // len(self.arcs))
        for a, b in self.arcs:
            span = _mod1(b - a)
            # midpoint first (the designated center of a center/radius arc),
            # then an interior grid; exact when the endpoints are rational
            pts.append(_mod1(a + span * Fraction(1, 2)))
            for k in range(1, per_arc + 1):
                pts.append(_mod1(a + span * Fraction(k, per_arc + 1)))
        while len(pts) < budget:
            a, b = self.arcs[rng.randrange(len(self.arcs))]
            span = _mod1(b - a)
            t = rng.random()
            if 0 < t < 1:
                pts.append(_mod1(a + float(span) * t))
        return pts

    def describe(self) -> str:
        return "arcs[" + ",".join(f"({a},{b})" for a, b in self.arcs) + "]"


@dataclass(frozen=True)
class BallUnion(OpenSet):
    """Finite union of open metric balls; membership is strict.

    Distances within TOL of the radius count as boundary and are excluded,
    so float noise cannot smuggle a boundary point inside.
    """

    balls: tuple

    def __init__(self, balls):
        balls = tuple((c, r) for c, r in balls)
        if not balls:
            raise ValueError("ball union must have at least one ball")
        for _, r in balls:
            if r <= 0:
                raise ValueError("ball radius must be positive")
        object.__setattr__(self, "balls", balls)

    def contains(self, space, x) -> bool:
        return any(space.dist(x, c) < r - TOL for c, r in self.balls)

    def sample(self, space, budget, rng):
        if isinstance(space, FiniteSpace):
            return [p for p in space.points() if self.contains(space, p)]
        pts = [c for c, _ in self.balls]
        if isinstance(space, Circle):
            per = max(1, (budget // 2) // len(self.balls))
            for c, r in self.balls:
                for k in range(1, per + 1):
                    off = r * Fraction(k, per + 1)
                    pts.append(_mod1(c + off))
                    pts.append(_mod1(c - off))
        tries = 0
        while len(pts) < budget and tries < 20 * budget:
            tries += 1
            x = space.random_point(rng)
            if self.contains(space, x):
                pts.append(x)
        return pts[:max(budget, len(self.balls))]

    def describe(self) -> str:
        return "balls[" + ",".join(f"B({c},{r})" for c, r in self.balls) + "]"


@dataclass(frozen=True)
class ProductBox(OpenSet):
    """Per-factor open sets; a basic open box of a product space."""

    sides: tuple

    def __init__(self, sides):
        sides = tuple(sides)
        if not sides:
            raise ValueError("product box must have at least one side")
        object.__setattr__(self, "sides", sides)

    def contains(self, space, x) -> bool:
        space.check_point(x)
        return all(s.contains(f, c)
                   for s, f, c in zip(self.sides, space.factors, x))

    def sample(self, space, budget, rng):
        per = max(2, round(budget ** (1.0 / len(self.sides))))
        axes = [s.sample(f, per, rng)
                for s, f in zip(self.sides, space.factors)]
        return list(islice(_cartesian(*axes), budget))

    def describe(self) -> str:
        return "box[" + " x ".join(s.describe() for s in self.sides) + "]"


def open_contains(space: MetricSpace, u: OpenSet, x) -> bool:
    return u.contains(space, x)


def sample_points(space: MetricSpace, u: OpenSet, budget: int, rng) -> list:
    pts = u.sample(space, budget, rng)
    if not pts:
        raise ValueError(f"could not sample any point of {u.describe()}")
    return pts


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------

class Orbit:
    """Random access into the forward orbit of a single point.

    ``preperiod``/``period`` are set when the orbit is known to be eventually
    periodic (finite maps, rational points of the doubling map) and None for
    closed-form orbits such as rotations.
    """

    preperiod: int | None = None
    period: int | None = None

    def at(self, m: int):
        raise NotImplementedError


class EventuallyPeriodicOrbit(Orbit):
    def __init__(self, prefix: list, preperiod: int, period: int):
        self.prefix = prefix  # holds preperiod + period entries
        self.preperiod = preperiod
        self.period = period

    def at(self, m: int):
        if m < len(self.prefix):
            return self.prefix[m]
        return self.prefix[self.preperiod + (m - self.preperiod) % self.period]


class ClosedFormOrbit(Orbit):
    def __init__(self, fn):
        self.fn = fn

    def at(self, m: int):
        return self.fn(m)


class TupleOrbit(Orbit):
    def __init__(self, parts: Sequence[Orbit]):
        self.parts = tuple(parts)
        pres = [o.preperiod for o in parts]
        pers = [o.period for o in parts]
        if all(p is not None for p in pres):
            self.preperiod = max(pres)
            self.period = math.lcm(*pers)

    def at(self, m: int):
        return tuple(o.at(m) for o in self.parts)


def _detect_cycle(step, x0, cap: int | None = None) -> EventuallyPeriodicOrbit:
    seen = {x0: 0}
    prefix = [x0]
    x = x0
    while True:
        x = step(x)
        if x in seen:
            start = seen[x]
            return EventuallyPeriodicOrbit(prefix, start, len(prefix) - start)
        if cap is not None and len(prefix) >= cap:
            raise RuntimeError("orbit did not close within the cap")
        seen[x] = len(prefix)
        prefix.append(x)


# ---------------------------------------------------------------------------
# dynamical systems
# ---------------------------------------------------------------------------

class DynSystem:
    """A continuous self-map of a metric space, iterated in discrete time."""

    space: MetricSpace

    def step(self, x):
        raise NotImplementedError

    def orbit(self, x) -> Orbit:
        """Random-access orbit; exact where the point type allows it."""
        raise NotImplementedError

    def orbit_stream(self, x, max_m: int) -> Iterator:
        """Yield f^m(x) for m = 0..max_m without storing the orbit."""
        o = None
        try:
            o = self.orbit(x)
        except RuntimeError:
            pass
        if o is not None:
            for m in range(max_m + 1):
                yield o.at(m)
            return
        cur = x
        yield cur
        for _ in range(max_m):
            cur = self.step(cur)
            yield cur

    def describe(self) -> str:
        return type(self).__name__


class FiniteSystem(DynSystem):
    """A map on a finite space given by its image table."""

    def __init__(self, space: FiniteSpace, table: Sequence[int]):
        table = tuple(table)
        if len(table) != space.size:
            raise ValueError(
                f"table length {len(table)} does not match space size {space.size}")
        for i, v in enumerate(table):
            space.check_point(v)
        self.space = space
        self.table = table

    def step(self, x):
        self.space.check_point(x)
        return self.table[x]

    def orbit(self, x) -> Orbit:
        self.space.check_point(x)
        return _detect_cycle(lambda p: self.table[p], x)

    def describe(self) -> str:
        return f"finite{list(self.table)}"


class RotationSystem(DynSystem):
    """Circle rotation x -> x + theta mod 1."""

    def __init__(self, theta):
        self.space = Circle()
        self.theta = _mod1(theta)

    def step(self, x):
        return _mod1(x + self.theta)

    def orbit(self, x) -> Orbit:
        x0 = _mod1(x)
        th = self.theta
        return ClosedFormOrbit(lambda m: _mod1(x0 + m * th))

    def describe(self) -> str:
        return f"rotation(theta={self.theta})"


class DoublingSystem(DynSystem):
    """Circle doubling x -> 2x mod 1, computed in exact rationals.

    Floats are converted once to the exact rational they represent, so every
    iterate is exact; denominators only shrink under doubling.
    """

    #: orbits longer than this raise instead of caching (huge odd denominators)
    ORBIT_CAP = 1 << 16

    def __init__(self):
        self.space = Circle()

    def step(self, x):
        if not isinstance(x, Fraction):
            x = Fraction(x)
        return (2 * x) % 1

    def orbit(self, x) -> Orbit:
        x0 = Fraction(x) % 1
        return _detect_cycle(self.step, x0, cap=self.ORBIT_CAP)

    def describe(self) -> str:
        return "doubling"


class ProductSystem(DynSystem):
    """Coordinatewise product of factor systems."""

    def __init__(self, systems: Sequence[DynSystem]):
        if not systems:
            raise ValueError("product system needs at least one factor")
        self.systems = tuple(systems)
        self.space = ProductSpace([s.space for s in systems])

    def step(self, x):
        self.space.check_point(x)
        return tuple(s.step(c) for s, c in zip(self.systems, x))

    def orbit(self, x) -> Orbit:
        self.space.check_point(x)
        return TupleOrbit([s.orbit(c) for s, c in zip(self.systems, x)])

    def describe(self) -> str:
        inner = self.systems[0].describe()
        if all(s is self.systems[0] for s in self.systems):
            return f"product({inner}, N={len(self.systems)})"
        return "product(" + ", ".join(s.describe() for s in self.systems) + ")"


class NStepSystem(DynSystem):
    """The n-th iterate of a base system as a system in its own right."""

    def __init__(self, base: DynSystem, n: int):
        if n < 1:
            raise ValueError("step count must be >= 1")
        self.base = base
        self.n = n
        self.space = base.space

    def step(self, x):
        return iterate(self.base, x, self.n)

    def orbit(self, x) -> Orbit:
        inner = self.base.orbit(x)
        n = self.n
        out = ClosedFormOrbit(lambda m: inner.at(n * m))
        if inner.preperiod is not None:
            out.preperiod = -(-inner.preperiod // n)  # ceil division
            out.period = inner.period // math.gcd(inner.period, n)
        return out

    def describe(self) -> str:
        return f"step^{self.n}({self.base.describe()})"


def iterate(sys: DynSystem, x, n: int):
    """n-fold composition of the map applied to x; n = 0 returns x."""
    if n < 0:
        raise ValueError("iteration count must be non-negative")
    sys.space.check_point(x)
    if n == 0:
        return x
    return sys.orbit(x).at(n)


def n_fold(sys: DynSystem, n: int) -> ProductSystem:
    """The n-fold direct product of a system with itself."""
    if n < 1:
        raise ValueError("product arity must be >= 1")
    return ProductSystem([sys] * n)
