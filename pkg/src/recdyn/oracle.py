"""Exhaustive finite-scale verification of the recurrence equivalences.

On a small finite space every level of the tower (base products, induced map
on compact subsets, induced map on step fuzzy sets under either metric) is a
finite system, so each equivalence statement can be decided exactly and the
verdicts compared.  The induced maps are materialized as plain finite systems
(subsets as bitmask states, fuzzy sets as canonical level chains), which
funnels every statement through the same exact return-set machinery; metric
balls become explicit state sets computed from the pairwise distance
matrices.  A disagreement between statements would be an implementation bug,
not mathematical news, and is treated as a build-stopping failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian
from random import Random
from typing import Sequence

from .spaces import (
    DynSystem,
    FiniteSpace,
    FiniteSubset,
    FiniteSystem,
    ProductBox,
    n_fold,
)
from .hyperspace import (
    CompactSet,
    HyperSystem,
    VietorisOpen,
    compact_from_mask,
    hausdorff,
    mask_of_compact,
)
from .fuzzy import (
    StepFuzzySet,
    ZadehSystem,
    d_inf,
    d_skorokhod,
    fuzzy_to_hyper_witness,
)
from .recurrence import (
    FamilySpec,
    InternalCheckError,
    ReturnWindow,
    ell_return_set,
    family_eval,
    fuzzy_rec_witness,
    hyper_rec_witness,
    is_rec_system,
    point_recurrence,
    quasi_rigidity_search,
    singleton_probes,
)

ORACLE_HORIZON = 128


@dataclass(frozen=True)
class StatementVerdict:
    holds: bool
    semantics: str
    detail: str


@dataclass(frozen=True)
class EquivalenceReport:
    """Per-statement verdicts for one system, plus their agreement."""

    system: str
    comparison: str
    statements: dict
    witnesses: dict
    seed: int | None = None

    @property
    def agreement(self) -> bool:
        values = [v.holds for v in self.statements.values()]
        return all(values) or not any(values)

    def to_json(self) -> dict:
        return {
            "system": self.system,
            "comparison": self.comparison,
            "statements": {
                k: {"holds": v.holds, "semantics": v.semantics,
                    "detail": v.detail}
                for k, v in self.statements.items()},
            "agreement": self.agreement,
            "witnesses": self.witnesses,
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# materializations
# ---------------------------------------------------------------------------

def materialize_hyper_system(sys: FiniteSystem) -> tuple[FiniteSystem, list[int]]:
    """The induced subset map as a finite system on the 2^n - 1 non-empty
    subsets, encoded as bitmasks in increasing order."""
    n = sys.space.size
    masks = list(range(1, 1 << n))
    index = {m: i for i, m in enumerate(masks)}
    table = []
    for m in masks:
        img = 0
        for i in range(n):
            if m >> i & 1:
                img |= 1 << sys.table[i]
        table.append(index[img])
    return FiniteSystem(FiniteSpace(len(masks)), table), masks


def enumerate_step_grid(space: FiniteSpace, grid_m: int) -> list[StepFuzzySet]:
    """All step fuzzy sets with levels in {1/m, ..., 1} in canonical form
    (strictly decreasing level cuts), on a small finite space."""
    n = space.size
    all_masks = list(range(1, 1 << n))

    def chains(length: int):
        if length == 1:
            for m in all_masks:
                yield (m,)
            return
        for tail in chains(length - 1):
            top = tail[0]
            for big in all_masks:
                if big != top and big & top == top:
                    yield (big,) + tail

    grid = [Fraction(i, grid_m) for i in range(1, grid_m + 1)]
    out = []
    for k in range(1, grid_m + 1):
        for level_combo in _combinations_containing_top(grid, k):
            for chain in chains(k):
                sets = tuple(compact_from_mask(space, m) for m in chain)
                out.append(StepFuzzySet(space, level_combo, sets))
    return out


def _combinations_containing_top(grid: Sequence, k: int):
    from itertools import combinations
    lower = [g for g in grid if g != 1]
    for combo in combinations(lower, k - 1):
        yield tuple(sorted(combo)) + (Fraction(1),)


def materialize_zadeh_system(sys: FiniteSystem, grid_m: int):
    """The induced fuzzy map restricted to the level grid, as a finite
    system on canonical chains.  The grid is closed under the map because
    levels are preserved and cuts map to cuts (collapsed duplicates are
    dropped by canonicalization, which lands back on the grid)."""
    elements = enumerate_step_grid(sys.space, grid_m)
    key = {(u.levels, tuple(mask_of_compact(s) for s in u.sets)): i
           for i, u in enumerate(elements)}
    zadeh = ZadehSystem(sys)
    table = []
    for u in elements:
        v = zadeh.step(u).canonical()
        table.append(key[(v.levels, tuple(mask_of_compact(s) for s in v.sets))])
    return FiniteSystem(FiniteSpace(len(elements)), table), elements


# ---------------------------------------------------------------------------
# statement verdicts
# ---------------------------------------------------------------------------

def _conjunction(report) -> tuple[bool, str]:
    bad = report.failing()
    if bad:
        return False, f"failing probes: {', '.join(bad[:4])}" + (
            "..." if len(bad) > 4 else "")
    return True, f"all {len(report.probes)} probes recurrent"


def _base_products_verdict(sys: FiniteSystem, ell: int, spec: FamilySpec,
                           n_max: int, horizon: int) -> StatementVerdict:
    """Recurrence of every finite direct power, probed by singleton boxes.

    Singletons generate the discrete topology and return sets grow under
    unions, so singleton probes are exhaustive; a probe tuple only sees its
    distinct coordinates, so powers beyond the number of points add nothing.
    """
    size = sys.space.size
    bound = min(size, n_max)
    for n in range(1, bound + 1):
        sys_n = n_fold(sys, n)
        probes = [ProductBox([FiniteSubset([c]) for c in combo])
                  for combo in _cartesian(range(size), repeat=n)]
        report = is_rec_system(sys_n, probes, ell, spec, horizon)
        ok, detail = _conjunction(report)
        if not ok:
            return StatementVerdict(False, "exact", f"power N={n}: {detail}")
    return StatementVerdict(True, "exact",
                            f"all powers N<={bound} recurrent on singletons")


def _ball_probe_verdict(finite_sys: FiniteSystem, dmatrix, ell: int,
                        spec: FamilySpec, horizon: int,
                        label: str) -> StatementVerdict:
    """Recurrence of a materialized system probed by every metric ball.

    Ball membership only changes when the radius crosses a realized distance,
    so probing the midpoints between consecutive distinct matrix values
    covers every radius exactly.
    """
    states = range(len(dmatrix))
    for c in states:
        row = dmatrix[c]
        vals = sorted(set(row))
        radii = [(a + b) / 2 for a, b in zip(vals, vals[1:])] or [0.5]
        for eps in radii:
            ball = FiniteSubset([t for t in states if row[t] < eps])
            w = ell_return_set(finite_sys, ball, ell, horizon)
            v = family_eval(w, spec)
            if not v.holds:
                return StatementVerdict(
                    False, "exact",
                    f"{label}: center {c}, radius {eps:.6g}: {v.reason}")
    return StatementVerdict(True, "exact",
                            f"{label}: all ball probes recurrent")


def check_hyperspace_equivalence(sys: FiniteSystem, ell: int,
                                 spec: FamilySpec,
                                 n_max: int = 3,
                                 horizon: int = ORACLE_HORIZON) -> EquivalenceReport:
    """Compare recurrence of all finite direct powers of the base map with
    recurrence of the induced map on non-empty subsets."""
    size = sys.space.size
    if size > 5:
        raise ValueError("exhaustive check limited to spaces of size <= 5")
    if ell > 3:
        raise ValueError("exhaustive check limited to multiplicity <= 3")
    if n_max > 3:
        raise ValueError("power bound limited to 3")
    base = _base_products_verdict(sys, ell, spec, n_max, horizon)
    hyper_sys, masks = materialize_hyper_system(sys)
    report = is_rec_system(hyper_sys, singleton_probes(hyper_sys.space),
                           ell, spec, horizon)
    ok, detail = _conjunction(report)
    hyper = StatementVerdict(ok, "exact", detail)
    witnesses = {}
    if not ok:
        bad = report.failing()[0]
        witnesses["wandering_subset"] = bad
    return EquivalenceReport(
        system=sys.describe(),
        comparison="base-products vs subset-hyperspace",
        statements={"base_products": base, "hyperspace": hyper},
        witnesses=witnesses,
    )


def check_fuzzy_equivalence(sys: FiniteSystem, ell: int, spec: FamilySpec,
                            grid_m: int = 2,
                            horizon: int = ORACLE_HORIZON) -> EquivalenceReport:
    """Compare four statements on one finite system: recurrence of the base
    powers, of the subset map under Hausdorff balls, and of the level-grid
    fuzzy map under sup-metric and Skorokhod-metric balls."""
    size = sys.space.size
    if size > 3:
        raise ValueError("fuzzy enumeration limited to spaces of size <= 3")
    if grid_m > 3:
        raise ValueError("level grid limited to m <= 3")
    base = _base_products_verdict(sys, ell, spec, min(size, 3), horizon)

    hyper_sys, masks = materialize_hyper_system(sys)
    subsets = [compact_from_mask(sys.space, m) for m in masks]
    hmat = [[hausdorff(a, b) for b in subsets] for a in subsets]
    hyper = _ball_probe_verdict(hyper_sys, hmat, ell, spec, horizon,
                                "hausdorff balls")

    fuzzy_sys, elements = materialize_zadeh_system(sys, grid_m)
    sup_mat = [[d_inf(a, b) for b in elements] for a in elements]
    fuzzy_sup = _ball_probe_verdict(fuzzy_sys, sup_mat, ell, spec, horizon,
                                    "sup-metric balls")
    sko_mat = [[0.0 if i == j else d_skorokhod(a, elements[j])
                for j in range(len(elements))]
               for i, a in enumerate(elements)]
    fuzzy_sko = _ball_probe_verdict(fuzzy_sys, sko_mat, ell, spec, horizon,
                                    "skorokhod balls")

    return EquivalenceReport(
        system=sys.describe(),
        comparison="base vs hyperspace vs fuzzy (sup, skorokhod)",
        statements={
            "base_products": base,
            "hyperspace": hyper,
            "fuzzy_sup": fuzzy_sup,
            "fuzzy_skorokhod": fuzzy_sko,
        },
        witnesses={"grid_size": len(elements)},
    )


# ---------------------------------------------------------------------------
# point recurrence, AP recurrence and quasi-rigidity across the tower
# ---------------------------------------------------------------------------

def _min_positive_distance(space: FiniteSpace) -> float:
    if space.matrix is None:
        return 1.0
    vals = [space.matrix[i][j] for i in range(space.size)
            for j in range(space.size) if i != j]
    return min(vals)


def check_point_recurrence_descent(sys: DynSystem, mode: str = "point",
                                   eps: float | None = None,
                                   horizon: int = 256,
                                   sample_size: int = 12,
                                   ap_length: int = 6,
                                   seed: int = 0) -> EquivalenceReport:
    """Point-recurrence style verdicts on the base system, the induced map
    on compact sets, and the induced fuzzy map, with witness transport.

    mode is one of "point" (dense returns), "ap" (return times containing a
    progression of ap_length + 1 terms) and "quasirigid" (a single time
    sequence serving a whole sample).  On finite spaces the point sample is
    the whole space and verdicts are exact; on benchmark continuous systems
    they are windowed.
    """
    if mode not in ("point", "ap", "quasirigid"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = Random(seed)
    finite = isinstance(sys.space, FiniteSpace)
    if finite:
        if eps is None:
            eps = _min_positive_distance(sys.space) / 2
        base_pts = list(sys.space.points())
        hyper_pts = [compact_from_mask(sys.space, m)
                     for m in range(1, 1 << sys.space.size)]
        fuzzy_pts = [StepFuzzySet.characteristic(k) for k in hyper_pts]
        semantics = "exact"
    else:
        if eps is None:
            eps = 0.05
        base_pts = sys.space.grid(sample_size)
        hyper_pts = [CompactSet(sys.space, base_pts[:max(1, sample_size // 4)]),
                     CompactSet(sys.space, [base_pts[0]])]
        fuzzy_pts = [StepFuzzySet.characteristic(k) for k in hyper_pts]
        semantics = "windowed"

    layers = {
        "base": (sys, base_pts),
        "hyperspace": (HyperSystem(sys), hyper_pts),
        "fuzzy_sup": (ZadehSystem(sys, "sup"), fuzzy_pts),
        "fuzzy_skorokhod": (ZadehSystem(sys, "skorokhod"), fuzzy_pts),
    }
    statements = {}
    witnesses = {}
    for name, (layer_sys, pts) in layers.items():
        if mode == "quasirigid":
            schedule = [eps * 2.0 ** -k for k in range(4)]
            qr = quasi_rigidity_search(layer_sys, pts, schedule, horizon)
            holds = qr.complete
            detail = (f"times {list(qr.times)}" if holds
                      else f"unserved radii {list(qr.unserved_eps)}")
            if holds:
                witnesses[name] = list(qr.times)
        else:
            holds = True
            detail = f"all {len(pts)} sampled points pass"
            for x in pts:
                pr = point_recurrence(layer_sys, x, eps, horizon,
                                      ap_max=ap_length)
                if mode == "point":
                    if pr.window.certificate is not None:
                        ok = family_eval(pr.window,
                                         FamilySpec.infinite_exact()).holds
                    else:
                        ok = pr.recurrent(min_count=3)
                else:
                    ok = pr.ap_lengths[ap_length].holds
                if not ok:
                    holds = False
                    detail = f"point {x!r} fails ({mode})"
                    break
        statements[name] = StatementVerdict(holds, semantics, detail)

    if statements["base"].holds:
        witnesses["transport"] = _transport_chain(sys, base_pts, eps,
                                                  horizon, rng)
    return EquivalenceReport(
        system=sys.describe(),
        comparison=f"point-level descent ({mode})",
        statements=statements,
        witnesses=witnesses,
        seed=seed,
    )


def _transport_chain(sys: DynSystem, base_pts, eps, horizon: int,
                     rng: Random) -> dict:
    """Carry one base return time upward: compact witness from point
    witnesses, fuzzy witness above it, then extract the top cut back down
    and re-verify the Hausdorff bound.

    The fuzzy stage hunts point witnesses in quarter-eps balls, so shallow
    return times may fail it; the first several return times are tried.
    """
    space = sys.space
    x = base_pts[0]
    # deep returns (quarter radius) feed every stage of the chain
    pr = point_recurrence(sys, x, eps / 4, horizon, ap_max=2)
    times = [n for n in pr.window.members if n >= 1][:10]
    if not times:
        pr = point_recurrence(sys, x, eps, horizon, ap_max=2)
        times = [n for n in pr.window.members if n >= 1][:10]
    if not times:
        return {"status": "no base return time found"}
    target = CompactSet(space, [x])
    last = {"status": "no compact witness found", "times_tried": times}
    for n in times:
        k = hyper_rec_witness(sys, (target, eps), n, 1, rng=rng)
        if k is None:
            continue
        v = fuzzy_rec_witness(sys, StepFuzzySet.characteristic(target),
                              eps, n, 1, rng=rng)
        if v is None:
            last = {"status": "no fuzzy witness found", "n": n}
            continue
        back = fuzzy_to_hyper_witness(v)
        from .hyperspace import hyper_apply
        gaps = [hausdorff(target, hyper_apply(sys, back, j * n))
                for j in range(2)]
        if not all(g < eps for g in gaps):
            raise InternalCheckError(
                f"extracted witness misses the ball: gaps {gaps} vs eps {eps}")
        return {"status": "closed", "n": n, "compact": repr(k),
                "fuzzy": v.describe(), "extracted": repr(back),
                "gaps": [float(g) for g in gaps]}
    return last


# ---------------------------------------------------------------------------
# randomized sweeps
# ---------------------------------------------------------------------------

def random_finite_system(rng: Random, max_size: int = 4,
                         permutation_share: float = 0.5,
                         random_metric_share: float = 0.0) -> FiniteSystem:
    size = rng.randrange(1, max_size + 1)
    if rng.random() < random_metric_share:
        space = FiniteSpace(size, random_finite_metric(rng, size))
    else:
        space = FiniteSpace(size)
    if rng.random() < permutation_share:
        table = list(range(size))
        rng.shuffle(table)
    else:
        table = [rng.randrange(size) for _ in range(size)]
    return FiniteSystem(space, table)


def random_finite_metric(rng: Random, size: int) -> list[list[float]]:
    """A random metric: symmetric positive entries pushed through the
    shortest-path closure so the triangle inequality holds exactly."""
    m = [[0.0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            m[i][j] = m[j][i] = round(rng.uniform(0.2, 1.0), 4)
    for k in range(size):
        for i in range(size):
            for j in range(size):
                via = m[i][k] + m[k][j]
                if via < m[i][j]:
                    m[i][j] = via
    return m


@dataclass(frozen=True)
class SweepResult:
    reports: tuple
    disagreements: tuple

    @property
    def all_agree(self) -> bool:
        return not self.disagreements


def sweep_hyperspace_equivalence(count: int = 200, ells: Sequence[int] = (1, 2),
                                 max_size: int = 4, seed: int = 0,
                                 spec: FamilySpec | None = None) -> SweepResult:
    """Randomized agreement sweep between base-power recurrence and subset
    recurrence; any disagreement is an implementation bug."""
    spec = spec or FamilySpec.infinite_exact()
    rng = Random(seed)
    reports, bad = [], []
    for i in range(count):
        sys = random_finite_system(rng, max_size)
        for ell in ells:
            rep = check_hyperspace_equivalence(sys, ell, spec)
            rep = EquivalenceReport(rep.system, rep.comparison,
                                    rep.statements, rep.witnesses,
                                    seed=seed + i)
            reports.append(rep)
            if not rep.agreement:
                bad.append(rep)
    return SweepResult(tuple(reports), tuple(bad))


def sweep_fuzzy_equivalence(count: int = 50, ell: int = 2, grid_m: int = 2,
                            max_size: int = 3, seed: int = 0,
                            spec: FamilySpec | None = None,
                            random_metric_share: float = 0.5) -> SweepResult:
    """Randomized agreement sweep across all four statements of the fuzzy
    equivalence on small finite systems."""
    spec = spec or FamilySpec.infinite_exact()
    rng = Random(seed)
    reports, bad = [], []
    for i in range(count):
        sys = random_finite_system(rng, max_size,
                                   random_metric_share=random_metric_share)
        rep = check_fuzzy_equivalence(sys, ell, spec, grid_m)
        rep = EquivalenceReport(rep.system, rep.comparison, rep.statements,
                                rep.witnesses, seed=seed + i)
        reports.append(rep)
        if not rep.agreement:
            bad.append(rep)
    return SweepResult(tuple(reports), tuple(bad))
