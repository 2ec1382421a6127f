"""Return sets, Furstenberg-family predicates, and recurrence verdicts.

The same machinery runs on three layers: base systems on points, the induced
map on finite compact sets, and the induced map on step fuzzy sets.  On
finite spaces everything is exact and return windows carry an eventual
periodicity certificate (preperiod, period).  On continuous spaces inclusion
of a time in a return set is certified by an explicit sample point
("witnessed" semantics); absence of a witness at a given budget is
inconclusive, never a refutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from random import Random
from typing import Iterable, Optional, Sequence

from .spaces import (
    BallUnion,
    DynSystem,
    FiniteSpace,
    FiniteSubset,
    MetricSpace,
    OpenSet,
    ProductSpace,
    sample_points,
)
from .hyperspace import (
    CompactSet,
    VietorisOpen,
    hausdorff,
    hyper_apply,
    vietoris_contains,
)
from .fuzzy import StepFuzzySet, d_inf, stratify, witness_fuzzy, zadeh_apply
from .fuzzy import fuzzy_to_hyper_witness  # re-exported: closes the witness chain

__all__ = [
    "InternalCheckError", "ReturnWindow", "FamilyKind", "FamilySpec",
    "FamilyVerdict", "return_set", "ell_return_set", "family_eval",
    "ProbeVerdict", "RecurrenceReport", "is_rec_system",
    "hyper_rec_witness", "fuzzy_rec_witness", "fuzzy_to_hyper_witness",
    "PointReport", "point_recurrence", "QuasiRigidityReport",
    "quasi_rigidity_search", "singleton_probes", "arc_probes",
]

DEFAULT_BUDGET = 512
_EXACT_ENUM_CAP = 4096


class InternalCheckError(AssertionError):
    """A postcondition that the constructions guarantee failed anyway."""


# ---------------------------------------------------------------------------
# return windows
# ---------------------------------------------------------------------------

class ReturnWindow:
    """Truncated return set: memberships over [0, horizon].

    certificate, when present, is a pair (preperiod, period) asserting that
    membership of n >= preperiod depends only on n mod period; it is
    re-verified on the window at construction and is only produced by exact
    finite-space backends.
    """

    __slots__ = ("horizon", "members", "certificate", "semantics")

    def __init__(self, horizon: int, members: Iterable[int],
                 certificate: tuple[int, int] | None = None,
                 semantics: str = "windowed"):
        members = tuple(sorted(set(members)))
        if members and (members[0] < 0 or members[-1] > horizon):
            raise ValueError("memberships outside [0, horizon]")
        self.horizon = horizon
        self.members = members
        self.certificate = certificate
        self.semantics = semantics
        if certificate is not None:
            p, q = certificate
            if p < 0 or q < 1:
                raise ValueError(f"bad certificate ({p},{q})")
            inside = set(members)
            for n in range(p, horizon - q + 1):
                if (n in inside) != (n + q in inside):
                    raise ValueError(
                        f"certificate ({p},{q}) inconsistent with window at n={n}")

    def __contains__(self, n: int) -> bool:
        return n in set(self.members)

    def member_set(self) -> set:
        return set(self.members)

    def runs(self) -> list[tuple[int, int]]:
        """Run-length encoding of the membership list."""
        out: list[tuple[int, int]] = []
        for n in self.members:
            if out and out[-1][0] + out[-1][1] == n:
                out[-1] = (out[-1][0], out[-1][1] + 1)
            else:
                out.append((n, 1))
        return out

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "runs": [list(r) for r in self.runs()],
            "certificate": list(self.certificate) if self.certificate else None,
            "semantics": self.semantics,
        }

    def __repr__(self):
        head = ",".join(str(n) for n in self.members[:8])
        more = ",..." if len(self.members) > 8 else ""
        return (f"ReturnWindow[0..{self.horizon}]{{{head}{more}}}"
                f"({self.semantics})")


# ---------------------------------------------------------------------------
# Furstenberg-family predicates
# ---------------------------------------------------------------------------

class FamilyKind(Enum):
    INFINITE_EXACT = "infinite_exact"
    INFINITE_WINDOW = "infinite_window"
    COFINITE_EXACT = "cofinite_exact"
    THICK_WINDOW = "thick_window"
    SYNDETIC_WINDOW = "syndetic_window"
    CONTAINS_AP = "contains_ap"


_PARAM_KINDS = {
    FamilyKind.INFINITE_WINDOW: "min_count",
    FamilyKind.THICK_WINDOW: "run_length",
    FamilyKind.SYNDETIC_WINDOW: "max_gap",
    FamilyKind.CONTAINS_AP: "length",
}


@dataclass(frozen=True)
class FamilySpec:
    """A tagged membership predicate for return sets.

    Exact variants decide the untruncated notion from a periodicity
    certificate; windowed variants approximate it on the window and carry
    that caveat in their semantics tag.
    """

    kind: FamilyKind
    param: int | None = None

    def __post_init__(self):
        if self.kind in _PARAM_KINDS:
            if self.param is None or self.param < 1:
                raise ValueError(
                    f"{self.kind.value} needs a positive {_PARAM_KINDS[self.kind]}")
        elif self.param is not None:
            raise ValueError(f"{self.kind.value} takes no parameter")

    @staticmethod
    def infinite_exact() -> "FamilySpec":
        return FamilySpec(FamilyKind.INFINITE_EXACT)

    @staticmethod
    def infinite_window(min_count: int) -> "FamilySpec":
        return FamilySpec(FamilyKind.INFINITE_WINDOW, min_count)

    @staticmethod
    def cofinite_exact() -> "FamilySpec":
        return FamilySpec(FamilyKind.COFINITE_EXACT)

    @staticmethod
    def thick_window(run_length: int) -> "FamilySpec":
        return FamilySpec(FamilyKind.THICK_WINDOW, run_length)

    @staticmethod
    def syndetic_window(max_gap: int) -> "FamilySpec":
        return FamilySpec(FamilyKind.SYNDETIC_WINDOW, max_gap)

    @staticmethod
    def contains_ap(length: int) -> "FamilySpec":
        return FamilySpec(FamilyKind.CONTAINS_AP, length)

    @property
    def requires_certificate(self) -> bool:
        return self.kind in (FamilyKind.INFINITE_EXACT, FamilyKind.COFINITE_EXACT)

    def name(self) -> str:
        if self.param is None:
            return self.kind.value
        return f"{self.kind.value}({_PARAM_KINDS[self.kind]}={self.param})"


@dataclass(frozen=True)
class FamilyVerdict:
    holds: bool
    reason: str

    def __bool__(self):
        return self.holds


def _longest_run(members: Sequence[int]) -> int:
    best = cur = 0
    prev = None
    for n in members:
        cur = cur + 1 if prev is not None and n == prev + 1 else 1
        best = max(best, cur)
        prev = n
    return best


def find_ap(window: ReturnWindow, length: int,
            max_diff: int | None = None) -> tuple[int, int] | None:
    """First (start, difference) whose progression start + j*diff,
    j = 0..length, lies in the window; difference at least 1."""
    inside = window.member_set()
    if max_diff is None:
        max_diff = max(1, window.horizon // max(1, length))
    for start in window.members:
        top = (window.horizon - start) // length if length else window.horizon
        for diff in range(1, min(max_diff, top) + 1):
            if all(start + j * diff in inside for j in range(1, length + 1)):
                return start, diff
    return None


def family_eval(window: ReturnWindow, spec: FamilySpec) -> FamilyVerdict:
    """Decide membership of the (truncated) return set in the family."""
    members = window.members
    if spec.requires_certificate:
        if window.certificate is None:
            raise ValueError(
                f"{spec.name()} needs a periodicity certificate; "
                "use a windowed family on this backend")
        p, q = window.certificate
        if window.horizon < p + q - 1:
            raise ValueError(
                f"window horizon {window.horizon} too short for certificate "
                f"({p},{q}); need at least {p + q - 1}")
        residues = sorted({n % q for n in members if n >= p})
        if spec.kind is FamilyKind.INFINITE_EXACT:
            ok = bool(residues)
            return FamilyVerdict(
                ok, f"residues mod {q} beyond {p}: {residues}" if ok
                else f"no members beyond preperiod {p}")
        ok = len(residues) == q
        return FamilyVerdict(
            ok, f"all {q} residues present beyond {p}" if ok
            else f"missing residues mod {q}: "
                 f"{sorted(set(range(q)) - set(residues))}")
    if spec.kind is FamilyKind.INFINITE_WINDOW:
        ok = len(members) >= spec.param
        return FamilyVerdict(ok, f"{len(members)} members, need {spec.param}")
    if spec.kind is FamilyKind.THICK_WINDOW:
        run = _longest_run(members)
        return FamilyVerdict(run >= spec.param,
                             f"longest run {run}, need {spec.param}")
    if spec.kind is FamilyKind.SYNDETIC_WINDOW:
        g = spec.param
        if not members:
            return FamilyVerdict(False, "empty window")
        gaps = [members[0]] + [b - a for a, b in zip(members, members[1:])]
        gaps.append(window.horizon - members[-1])
        worst = max(gaps)
        return FamilyVerdict(worst <= g, f"largest gap {worst}, allowed {g}")
    if spec.kind is FamilyKind.CONTAINS_AP:
        got = find_ap(window, spec.param)
        if got is None:
            return FamilyVerdict(
                False, f"no progression of {spec.param + 1} terms")
        return FamilyVerdict(
            True, f"progression start={got[0]} diff={got[1]} "
                  f"({spec.param + 1} terms)")
    raise ValueError(f"unknown family kind {spec.kind}")


# ---------------------------------------------------------------------------
# return-set computation
# ---------------------------------------------------------------------------

def _exact_points(space: MetricSpace, u: OpenSet) -> list | None:
    """Every point of the open set, when the ambient space is finite and
    small enough to enumerate; None means fall back to sampling."""
    if isinstance(space, FiniteSpace):
        return [p for p in space.points() if u.contains(space, p)]
    if isinstance(space, ProductSpace):
        total = 1
        for f in space.factors:
            if not isinstance(f, FiniteSpace):
                return None
            total *= f.size
            if total > _EXACT_ENUM_CAP:
                return None
        from itertools import product as cartesian
        pts = [tuple(t) for t in cartesian(*(f.points() for f in space.factors))]
        return [p for p in pts if u.contains(space, p)]
    return None


def _certificate(orbits: Sequence) -> tuple[int, int] | None:
    pres = [o.preperiod for o in orbits]
    pers = [o.period for o in orbits]
    if any(p is None for p in pres):
        return None
    return max(pres), math.lcm(*pers)


def return_set(sys: DynSystem, u: OpenSet, v: OpenSet, horizon: int,
               witness_budget: int = DEFAULT_BUDGET,
               rng: Random | None = None) -> ReturnWindow:
    """Times n <= horizon at which the n-th image of u meets v."""
    space = sys.space
    pts = _exact_points(space, u)
    if pts is not None:
        if not pts:
            raise ValueError(f"open set {u.describe()} is empty in this space")
        orbits = [sys.orbit(x) for x in pts]
        members = [n for n in range(horizon + 1)
                   if any(v.contains(space, o.at(n)) for o in orbits)]
        return ReturnWindow(horizon, members, _certificate(orbits), "exact")
    rng = rng or Random(0)
    samples = sample_points(space, u, witness_budget, rng)
    hit = [False] * (horizon + 1)
    for x in samples:
        for m, y in enumerate(sys.orbit_stream(x, horizon)):
            if not hit[m] and v.contains(space, y):
                hit[m] = True
    return ReturnWindow(horizon, [n for n, h in enumerate(hit) if h],
                        None, "witnessed")


def ell_return_set(sys: DynSystem, u: OpenSet, ell: int, horizon: int,
                   witness_budget: int = DEFAULT_BUDGET,
                   rng: Random | None = None) -> ReturnWindow:
    """Times n with a common point visiting u at 0, n, 2n, ..., ell*n.

    With ell = 1 this is exactly the return set from u to itself.
    """
    if ell < 1:
        raise ValueError("multiplicity must be >= 1")
    space = sys.space
    pts = _exact_points(space, u)
    if pts is not None:
        if not pts:
            raise ValueError(f"open set {u.describe()} is empty in this space")
        orbits = [sys.orbit(x) for x in pts]
        members = []
        for n in range(horizon + 1):
            for o in orbits:
                if all(u.contains(space, o.at(j * n)) for j in range(1, ell + 1)):
                    members.append(n)
                    break
        return ReturnWindow(horizon, members, _certificate(orbits), "exact")
    rng = rng or Random(0)
    samples = sample_points(space, u, witness_budget, rng)
    top = ell * horizon
    masks = []
    for x in samples:
        bits = 0
        for m, y in enumerate(sys.orbit_stream(x, top)):
            if u.contains(space, y):
                bits |= 1 << m
        masks.append(bits)
    members = []
    for n in range(horizon + 1):
        for bits in masks:
            if all(bits >> (j * n) & 1 for j in range(ell + 1)):
                members.append(n)
                break
    return ReturnWindow(horizon, members, None, "witnessed")


# ---------------------------------------------------------------------------
# system-level verdicts over a probe family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeVerdict:
    probe: str
    window: ReturnWindow
    verdict: FamilyVerdict


@dataclass(frozen=True)
class RecurrenceReport:
    """Conjunction of family verdicts over an explicit probe family.

    Universal quantification over all opens is not decidable; the verdict is
    labeled with its probe family.  On finite spaces the singleton probes are
    exhaustive: every open is a union of singletons and a return set only
    grows under union, so family membership is inherited upward.
    """

    probes: tuple[ProbeVerdict, ...]
    ell: int
    family: str
    semantics: str

    @property
    def all_recurrent(self) -> bool:
        return all(p.verdict.holds for p in self.probes)

    def failing(self) -> list[str]:
        return [p.probe for p in self.probes if not p.verdict.holds]


def is_rec_system(sys: DynSystem, probes: Sequence[OpenSet], ell: int,
                  spec: FamilySpec, horizon: int,
                  witness_budget: int = DEFAULT_BUDGET,
                  rng: Random | None = None) -> RecurrenceReport:
    if not probes:
        raise ValueError("need a non-empty probe family")
    rows = []
    semantics = "exact"
    for u in probes:
        w = ell_return_set(sys, u, ell, horizon, witness_budget, rng)
        if w.semantics != "exact":
            semantics = w.semantics
        rows.append(ProbeVerdict(u.describe(), w, family_eval(w, spec)))
    return RecurrenceReport(tuple(rows), ell, spec.name(), semantics)


def singleton_probes(space: FiniteSpace) -> list[FiniteSubset]:
    return [FiniteSubset([i]) for i in space.points()]


def arc_probes(count: int, radius) -> list:
    from fractions import Fraction
    from .spaces import ArcUnion
    return [ArcUnion.around(Fraction(i, count), radius) for i in range(count)]


# ---------------------------------------------------------------------------
# witness construction
# ---------------------------------------------------------------------------

def _point_witness(sys: DynSystem, u: OpenSet, n: int, ell: int,
                   budget: int, rng: Random):
    """A point of u whose orbit revisits u at n, 2n, ..., ell*n, or None."""
    space = sys.space
    candidates = _exact_points(space, u)
    if candidates is None:
        candidates = sample_points(space, u, budget, rng)
    for x in candidates:
        orbit = sys.orbit(x)
        if all(u.contains(space, orbit.at(j * n)) for j in range(ell + 1)):
            return x
    return None


def hyper_rec_witness(sys: DynSystem, target, n: int, ell: int,
                      witness_budget: int = DEFAULT_BUDGET,
                      rng: Random | None = None,
                      shrink: float = 0.5) -> Optional[CompactSet]:
    """A finite compact set returning to the target at n, 2n, ..., ell*n.

    target is either a VietorisOpen or a pair (CompactSet, eps) meaning the
    open Hausdorff ball.  The set is assembled from one point witness per
    constituent open (per target point, for balls, with radius shrunk so the
    assembled set lands strictly inside the ball).  The membership claims are
    re-verified before returning; absence is a value, not an error.
    """
    rng = rng or Random(0)
    if isinstance(target, VietorisOpen):
        pts = []
        for u in target.opens:
            x = _point_witness(sys, u, n, ell, witness_budget, rng)
            if x is None:
                return None
            pts.append(x)
        k = CompactSet(sys.space, pts)
        for j in range(ell + 1):
            if not vietoris_contains(target, hyper_apply(sys, k, j * n)):
                raise InternalCheckError(
                    f"assembled witness leaves {target.describe()} at j={j}")
        return k
    center, eps = target
    if eps <= 0:
        raise ValueError("ball radius must be positive")
    pts = []
    for c in center.points:
        ball = BallUnion([(c, eps * shrink)])
        x = _point_witness(sys, ball, n, ell, witness_budget, rng)
        if x is None:
            return None
        pts.append(x)
    k = CompactSet(sys.space, pts)
    for j in range(ell + 1):
        got = hausdorff(center, hyper_apply(sys, k, j * n))
        if not got < eps:
            raise InternalCheckError(
                f"assembled witness at Hausdorff distance {got} >= {eps} at j={j}")
    return k


def fuzzy_rec_witness(sys: DynSystem, u: StepFuzzySet, eps, n: int, ell: int,
                      witness_budget: int = DEFAULT_BUDGET,
                      rng: Random | None = None) -> Optional[StepFuzzySet]:
    """A step fuzzy set whose orbit stays sup-metric eps-near u at the times
    0, n, 2n, ..., ell*n.

    Construction: coarsen u's levels to half-eps strata, find a compact
    witness in the half-eps Hausdorff ball of each stratum cut, and stack
    them as the pointwise max of scaled characteristic functions.  The
    distance chain (stratum gap + witness gap < eps) is re-verified on the
    result before it is returned.
    """
    if eps <= 0:
        raise ValueError("radius must be positive")
    rng = rng or Random(0)
    strata = stratify(u, eps / 2)[1:]
    witnesses = []
    for a in strata:
        k = hyper_rec_witness(sys, (u.level_set(a), eps / 2), n, ell,
                              witness_budget, rng)
        if k is None:
            return None
        witnesses.append(k)
    v = witness_fuzzy(strata, witnesses)
    for j in range(ell + 1):
        got = d_inf(u, zadeh_apply(sys, v, j * n))
        if not got < eps:
            raise InternalCheckError(
                f"fuzzy witness at distance {got} >= {eps} at j={j}")
    return v


# ---------------------------------------------------------------------------
# point recurrence and quasi-rigidity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointReport:
    point: object
    eps: float
    window: ReturnWindow
    ap_lengths: dict  # multiplicity -> FamilyVerdict
    max_ap: int

    def recurrent(self, min_count: int = 2) -> bool:
        """At least min_count positive returns in the window (exact when the
        certificate proves the pattern repeats)."""
        positives = [n for n in self.window.members if n >= 1]
        return len(positives) >= min_count


def point_recurrence(sys: DynSystem, x, eps, horizon: int,
                     ap_max: int = 12) -> PointReport:
    """Returns of a single orbit into its own eps-ball, with a bounded scan
    for arithmetic progressions in the return times."""
    if eps <= 0:
        raise ValueError("radius must be positive")
    space = sys.space
    space.check_point(x)
    try:
        orbit = sys.orbit(x)
    except RuntimeError:
        orbit = None
    members = []
    if orbit is not None:
        for n in range(horizon + 1):
            if space.dist(orbit.at(n), x) < eps:
                members.append(n)
        cert = (None if orbit.preperiod is None
                else (orbit.preperiod, orbit.period))
    else:
        for n, y in enumerate(sys.orbit_stream(x, horizon)):
            if space.dist(y, x) < eps:
                members.append(n)
        cert = None
    window = ReturnWindow(horizon, members, cert,
                          "exact" if cert else "windowed")
    ap = {}
    max_ap = 0
    for ell in range(2, ap_max + 1):
        verdict = family_eval(window, FamilySpec.contains_ap(ell))
        ap[ell] = verdict
        if verdict.holds:
            max_ap = ell
    return PointReport(x, eps, window, ap, max_ap)


@dataclass(frozen=True)
class QuasiRigidityReport:
    times: tuple[int, ...]
    residuals: tuple[float, ...]   # max over the sample at each chosen time
    served_eps: tuple[float, ...]
    unserved_eps: tuple[float, ...]  # schedule tail with no time <= horizon

    @property
    def complete(self) -> bool:
        return not self.unserved_eps


def default_eps_schedule(levels: int = 13) -> list[float]:
    return [0.1 * 2.0 ** -k for k in range(levels)]


def quasi_rigidity_search(sys: DynSystem, sample: Sequence, eps_schedule: Sequence[float],
                          horizon: int) -> QuasiRigidityReport:
    """Hunt for one time sequence along which every sampled point returns.

    For each radius in the (strictly decreasing) schedule the smallest unused
    time n <= horizon with max over the sample of dist(f^n(x), x) below the
    radius is taken.  Shrinking radii only shrink the feasible times, so the
    chosen times increase.  An exhausted horizon leaves the remaining radii
    unserved, which is inconclusive rather than a refutation.
    """
    sample = list(sample)
    if not sample:
        raise ValueError("need a non-empty sample")
    for a, b in zip(eps_schedule, eps_schedule[1:]):
        if not b < a:
            raise ValueError("radius schedule must decrease strictly")
    if eps_schedule and eps_schedule[-1] <= 0:
        raise ValueError("radii must be positive")
    space = sys.space
    orbits = [sys.orbit(x) for x in sample]
    cache: dict[int, float] = {}

    def worst(n: int) -> float:
        if n not in cache:
            cache[n] = max(space.dist(o.at(n), x)
                           for o, x in zip(orbits, sample))
        return cache[n]

    used: set[int] = set()
    times, residuals, served, unserved = [], [], [], []
    for eps in eps_schedule:
        found = None
        for n in range(1, horizon + 1):
            if n in used:
                continue
            if worst(n) < eps:
                found = n
                break
        if found is None:
            unserved.append(eps)
            continue
        used.add(found)
        times.append(found)
        residuals.append(worst(found))
        served.append(eps)
    return QuasiRigidityReport(tuple(times), tuple(residuals),
                               tuple(served), tuple(unserved))
