"""Independent reference computations used to cross-check the library.

These deliberately avoid the production code paths: the Hausdorff oracle
works from the raw definition on point lists, the extension oracle evaluates
the sup over preimages directly, the sup-metric oracle scans a dense level
grid, and the return-set oracle re-walks orbits by repeated stepping with no
cycle detection or certificates.
"""

from __future__ import annotations


def brute_hausdorff(space, pts_a, pts_b):
    d = space.dist
    a_to_b = max(min(d(p, q) for q in pts_b) for p in pts_a)
    b_to_a = max(min(d(p, q) for q in pts_a) for p in pts_b)
    return max(a_to_b, b_to_a)


def membership_table(u):
    """Pointwise membership function of a step set on a finite space,
    straight from the definition."""
    out = {}
    for x in u.space.points():
        value = 0
        for level, cut in zip(u.levels, u.sets):
            if x in cut.points:
                value = max(value, level)
        out[x] = value
    return out


def zadeh_by_preimage_sup(sys, values):
    """The extension evaluated directly: sup of the membership over the
    preimage, zero when the preimage is empty."""
    out = {}
    for x in sys.space.points():
        pre = [y for y in sys.space.points() if sys.table[y] == x]
        out[x] = max((values[y] for y in pre), default=0)
    return out


def sup_metric_by_level_scan(u, v, steps=997):
    """Max Hausdorff gap over a dense grid of levels (plus level 0); equals
    the sup metric whenever every bracket is wider than one grid step."""
    worst = brute_hausdorff(u.space, u.level_set(0).points,
                            v.level_set(0).points)
    for k in range(1, steps + 1):
        alpha = k / steps
        worst = max(worst, brute_hausdorff(
            u.space, u.level_set(alpha).points, v.level_set(alpha).points))
    return worst


def return_set_by_stepping(sys, u_points, v_contains, horizon):
    """Members of the return window recomputed by repeated stepping, with no
    orbit tables and no certificate."""
    members = []
    cur = list(u_points)
    for n in range(horizon + 1):
        if any(v_contains(x) for x in cur):
            members.append(n)
        cur = [sys.step(x) for x in cur]
    return members


def ell_return_by_stepping(sys, space, u, ell, horizon):
    """Multiplicity-ell return window by direct stepping over all points of
    a finite open set."""
    pts = [p for p in space.points() if u.contains(space, p)]
    members = []
    for n in range(horizon + 1):
        for x in pts:
            good = True
            y = x
            for j in range(1, ell + 1):
                for _ in range(n):
                    y = sys.step(y)
                if not u.contains(space, y):
                    good = False
                    break
            if good:
                members.append(n)
                break
    return members
