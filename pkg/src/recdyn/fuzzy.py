"""Step-valued normal fuzzy sets, their level-set algebra, and two metrics.

A step fuzzy set is a finitely-graded membership function: finitely many
levels a_1 < ... < a_M = 1 with nested finite level sets.  These are exactly
the fuzzy sets produced by every witness construction in this package, they
are upper-semicontinuous with compact support and non-empty top level, and
they are dense (for the supremum metric) among step-representable targets.

Two metrics are provided: the supremum metric (max Hausdorff distance over
level cuts) and a Skorokhod-style metric in which the level axis may be
reparametrized by an increasing homeomorphism of [0,1], penalized by its
maximal displacement.  For step functions the reparametrization only acts by
relabeling breakpoints, which reduces the infimum to a finite combinatorial
search; see d_skorokhod below.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .spaces import TOL, DynSystem, MetricSpace
from .hyperspace import CompactSet, directed_hausdorff, hausdorff, hyper_apply

#: minimal separation kept between relabeled breakpoints; homeomorphisms allow
#: arbitrary closeness, so this only biases the infimum upward by O(levels*SEP)
_SEP = 1e-9


class StepFuzzySet:
    """Membership function u(x) = max{a_i : x in L_i}, zero off L_1.

    levels: strictly increasing, all in (0, 1], last exactly 1.
    sets:   L_1 >= L_2 >= ... >= L_M (coverage up to TOL), all non-empty.
    The level cut at alpha in (a_{i-1}, a_i] is L_i; the cut at 0 is L_1
    (finite sets are closed, so the support closure is the support).
    """

    __slots__ = ("space", "levels", "sets")

    def __init__(self, space: MetricSpace, levels: Sequence, sets: Sequence[CompactSet]):
        levels = tuple(levels)
        sets = tuple(sets)
        if not levels or len(levels) != len(sets):
            raise ValueError("need matching non-empty level and set lists")
        if levels[-1] != 1:
            raise ValueError(f"top level must be exactly 1, got {levels[-1]}")
        for a, b in zip(levels, levels[1:]):
            if not a < b:
                raise ValueError(f"levels must increase strictly, got {a} >= {b}")
        if levels[0] <= 0:
            raise ValueError("levels must be positive")
        for hi, lo in zip(sets[1:], sets):
            if directed_hausdorff(hi, lo) >= TOL:
                raise ValueError("level sets must be nested downward")
        self.space = space
        self.levels = levels
        self.sets = sets

    @staticmethod
    def characteristic(k: CompactSet) -> "StepFuzzySet":
        return StepFuzzySet(k.space, (1,), (k,))

    def level_set(self, alpha) -> CompactSet:
        if not 0 <= alpha <= 1:
            raise ValueError(f"level must lie in [0,1], got {alpha}")
        if alpha == 0:
            return self.sets[0]
        for a, s in zip(self.levels, self.sets):
            if alpha <= a:
                return s
        return self.sets[-1]  # unreachable, levels end at 1

    def membership(self, x) -> float:
        self.space.check_point(x)
        out = 0
        for a, s in zip(self.levels, self.sets):
            if any(self.space.dist(x, p) < TOL for p in s.points):
                out = a
        return out

    def support(self) -> CompactSet:
        return self.sets[0]

    def canonical(self) -> "StepFuzzySet":
        """Drop levels whose cut equals the next higher cut."""
        levels, sets = [], []
        for i, (a, s) in enumerate(zip(self.levels, self.sets)):
            if i + 1 < len(self.sets) and s == self.sets[i + 1]:
                continue
            levels.append(a)
            sets.append(s)
        return StepFuzzySet(self.space, levels, sets)

    def describe(self) -> str:
        pairs = ", ".join(
            f"({a}: {s})" for a, s in
            zip(reversed(self.levels), reversed(self.sets)))
        return "[" + pairs + "]"

    def __repr__(self):
        return f"StepFuzzySet{self.describe()}"

    def __eq__(self, other):
        return (isinstance(other, StepFuzzySet)
                and self.levels == other.levels and self.sets == other.sets)

    def __hash__(self):
        return hash((self.levels, self.sets))


def level_set(u: StepFuzzySet, alpha) -> CompactSet:
    return u.level_set(alpha)


def zadeh_apply(sys: DynSystem, u: StepFuzzySet, n: int = 1) -> StepFuzzySet:
    """Push a fuzzy set forward through the map, n times.

    Realized cut by cut (the cut of the image at any level is the image of
    the cut), which keeps the level list unchanged and nesting automatic.
    """
    return StepFuzzySet(
        u.space, u.levels, tuple(hyper_apply(sys, s, n) for s in u.sets))


def merged_levels(u: StepFuzzySet, v: StepFuzzySet) -> list:
    return sorted(set(u.levels) | set(v.levels))


def d_inf(u: StepFuzzySet, v: StepFuzzySet):
    """Supremum over [0,1] of the Hausdorff distance between level cuts.

    Both arguments are constant between merged breakpoints, so the exact
    supremum is the max over the merged breakpoints (the cut at 0 equals the
    cut at the smallest positive breakpoint for finite supports).
    """
    if repr(u.space) != repr(v.space):
        raise ValueError("fuzzy sets live in different spaces")
    return max(hausdorff(u.level_set(m), v.level_set(m))
               for m in merged_levels(u, v))


def fuzzy_close(u: StepFuzzySet, v: StepFuzzySet, tol: float = TOL) -> bool:
    return d_inf(u, v) <= tol


@dataclass(frozen=True)
class Reparametrization:
    """An increasing homeomorphism of [0,1] pinned at finitely many pairs.

    pairs: ((b_0,g_0), ..., (b_k,g_k)) with b_0 = g_0 = 0, b_k = g_k = 1,
    strictly increasing in both coordinates; interpreted as the piecewise
    linear interpolation (any increasing interpolant has the same maximal
    displacement, attained at a breakpoint).
    """

    pairs: tuple

    def __init__(self, pairs):
        pairs = tuple((b, g) for b, g in pairs)
        if pairs[0] != (0, 0) or pairs[-1] != (1, 1):
            raise ValueError("reparametrization must fix 0 and 1")
        for (b0, g0), (b1, g1) in zip(pairs, pairs[1:]):
            if not (b0 < b1 and g0 < g1):
                raise ValueError("breakpoint pairs must increase strictly")
        object.__setattr__(self, "pairs", pairs)

    def __call__(self, alpha):
        if not 0 <= alpha <= 1:
            raise ValueError("argument outside [0,1]")
        for (b0, g0), (b1, g1) in zip(self.pairs, self.pairs[1:]):
            if alpha <= b1:
                t = (alpha - b0) / (b1 - b0)
                return g0 + t * (g1 - g0)
        return 1

    def displacement(self):
        return max(abs(g - b) for b, g in self.pairs)

    @staticmethod
    def identity() -> "Reparametrization":
        return Reparametrization(((0, 0), (1, 1)))


def relabel(v: StepFuzzySet, gamma: Sequence) -> StepFuzzySet:
    """The composition of v with a level reparametrization sending its
    breakpoints to gamma; the level sets are unchanged."""
    return StepFuzzySet(v.space, gamma, v.sets)


def _feasible_relabeling(alpha, beta, dmat, eps):
    """Search for strictly increasing gamma with gamma_i in
    [beta_i - eps, beta_i + eps], gamma ending at 1, such that every pair of
    overlapping level brackets of (alpha, gamma) has Hausdorff gap <= eps.

    Bracket overlaps of two interleaved partitions of (0,1] form a monotone
    staircase of index pairs; the walk is enumerated depth-first and each
    branch fixes the relabeled breakpoints greedily leftmost.  Returns the
    gamma list or None.
    """
    np_, m = len(alpha), len(beta)

    def lower_edge(j):
        return alpha[j - 1] if j > 0 else 0

    def dfs(j, i, gmin, acc):
        if dmat[j][i] > eps:
            return None
        if j == np_ - 1 and i == m - 1:
            return acc + [1]
        # close the u-bracket first: no breakpoint emitted
        if j + 1 < np_:
            got = dfs(j + 1, i, gmin, acc)
            if got is not None:
                return got
        if i + 1 < m:
            window_lo = beta[i] - eps
            window_hi = beta[i] + eps
            room = 1 - _SEP * (m - 1 - i)
            # gamma_i strictly inside the current u-bracket
            lo = max(gmin, window_lo, lower_edge(j) + _SEP)
            hi = min(window_hi, alpha[j] - _SEP, room)
            if lo <= hi:
                got = dfs(j, i + 1, lo + _SEP, acc + [lo])
                if got is not None:
                    return got
            # gamma_i exactly on the u-breakpoint (both brackets close)
            if j + 1 < np_:
                val = alpha[j]
                if (val >= gmin and window_lo <= val <= window_hi
                        and val <= room):
                    got = dfs(j + 1, i + 1, val + _SEP, acc + [val])
                    if got is not None:
                        return got
        return None

    return dfs(0, 0, max(_SEP, beta[0] - eps), [])


def d_skorokhod(u: StepFuzzySet, v: StepFuzzySet, tol: float = 1e-6):
    value, _ = skorokhod_witness(u, v, tol)
    return value


def skorokhod_witness(u: StepFuzzySet, v: StepFuzzySet, tol: float = 1e-6):
    """Skorokhod distance with an achieving reparametrization.

    The value is inf over admissible relabelings gamma of
    max(max_i |gamma_i - beta_i|, d_inf(u, relabel(v, gamma))), located by
    bisection on the radius with the staircase feasibility sweep above.
    Returns (value, reparametrization); the value is a certified upper bound
    within tol of the infimum and never exceeds d_inf(u, v).
    """
    upper = d_inf(u, v)
    identity = Reparametrization.identity()
    if upper <= tol or len(v.levels) == 1:
        # a single breakpoint is pinned at 1, nothing to relabel
        return upper, identity
    alpha, beta = list(u.levels), list(v.levels)
    dmat = [[hausdorff(su, sv) for sv in v.sets] for su in u.sets]
    lo, hi = 0.0, upper
    witness = None
    while hi - lo > tol:
        mid = (lo + hi) / 2
        got = _feasible_relabeling(alpha, beta, dmat, mid)
        if got is not None:
            hi = mid
            witness = got
        else:
            lo = mid
    if witness is None:
        return upper, identity
    pairs = [(0, 0)] + [(b, g) for b, g in zip(beta, witness)]
    if pairs[-1] != (1, 1):
        pairs.append((1, 1))
    return hi, Reparametrization(pairs)


def stratify(u: StepFuzzySet, eps) -> list:
    """Coarsen the level list so adjacent cuts stay within eps.

    Returns 0 = a_0 < a_1 < ... < a_N = 1 (a subset of u's own breakpoints,
    prefixed with 0) such that every cut taken inside a bracket
    (a_i, a_{i+1}] is within eps of the cut at a_{i+1}, strictly.  Greedy
    right-to-left merging keeps the top level exact; nesting makes the gap
    to a fixed anchor monotone as the scan moves down, so a single pass
    suffices.  The full breakpoint list trivially satisfies the condition,
    hence this never fails.
    """
    if eps <= 0:
        raise ValueError("stratification width must be positive")
    kept = [len(u.levels) - 1]
    anchor = len(u.levels) - 1
    for j in range(len(u.levels) - 2, -1, -1):
        if hausdorff(u.sets[j], u.sets[anchor]) < eps:
            continue
        kept.append(j)
        anchor = j
    return [0] + [u.levels[j] for j in reversed(kept)]


def witness_fuzzy(levels: Sequence, compacts: Sequence[CompactSet]) -> StepFuzzySet:
    """Step fuzzy set representing the pointwise max of levels[i] on
    compacts[i].

    The inputs need not be nested; the cut at levels[i] is the union of all
    compacts from i on, which is nested by construction, and normality holds
    because the top input is non-empty.
    """
    levels = tuple(levels)
    compacts = tuple(compacts)
    if not levels or len(levels) != len(compacts):
        raise ValueError("need matching non-empty level and set lists")
    space = compacts[0].space
    tails: list[CompactSet] = [compacts[-1]]
    for k in reversed(compacts[:-1]):
        tails.append(tails[-1].union(k))
    tails.reverse()
    return StepFuzzySet(space, levels, tails)


def fuzzy_to_hyper_witness(v: StepFuzzySet) -> CompactSet:
    """The top level cut; if the fuzzy orbit stays near a characteristic
    target, this compact set's orbit stays Hausdorff-near the target set."""
    return v.level_set(1)


class FuzzyMetric(MetricSpace):
    """Step fuzzy sets over a base space under the supremum or Skorokhod
    metric, so generic point machinery runs on the fuzzy level too."""

    def __init__(self, base: MetricSpace, metric: str = "sup"):
        if metric not in ("sup", "skorokhod"):
            raise ValueError(f"unknown fuzzy metric {metric!r}")
        self.base = base
        self.metric = metric

    def dist(self, x, y):
        return d_inf(x, y) if self.metric == "sup" else d_skorokhod(x, y)

    def check_point(self, x) -> None:
        if not isinstance(x, StepFuzzySet):
            raise ValueError(f"expected a step fuzzy set, got {x!r}")

    def grid(self, count: int) -> list:
        return [StepFuzzySet.characteristic(CompactSet(self.base, [p]))
                for p in self.base.grid(count)]

    def random_point(self, rng):
        k = rng.randrange(1, 3)
        pts = [self.base.random_point(rng) for _ in range(k + 1)]
        top = CompactSet(self.base, pts[:1])
        if k == 1:
            return StepFuzzySet.characteristic(top)
        return witness_fuzzy((Fraction(1, 2), 1),
                             (CompactSet(self.base, pts[1:]), top))

    def __repr__(self):
        return f"FuzzyMetric({self.base!r}, {self.metric})"


class ZadehSystem(DynSystem):
    """The induced map on step fuzzy sets, pushing every level cut forward.

    Orbits are assembled cut by cut, so exact base certificates survive.
    """

    def __init__(self, base: DynSystem, metric: str = "sup"):
        self.base = base
        self.space = FuzzyMetric(base.space, metric)

    def step(self, u: StepFuzzySet) -> StepFuzzySet:
        return zadeh_apply(self.base, u)

    def orbit(self, u: StepFuzzySet):
        from .hyperspace import HyperSystem
        from .spaces import ClosedFormOrbit
        import math as _math
        parts = [HyperSystem(self.base).orbit(s) for s in u.sets]
        levels = u.levels
        base_space = u.space
        out = ClosedFormOrbit(lambda m: StepFuzzySet(
            base_space, levels, tuple(o.at(m) for o in parts)))
        pres = [o.preperiod for o in parts]
        if all(p is not None for p in pres):
            out.preperiod = max(pres)
            out.period = _math.lcm(*(o.period for o in parts))
        return out

    def describe(self) -> str:
        return f"zadeh({self.base.describe()}, {self.space.metric})"
