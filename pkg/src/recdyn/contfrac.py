"""Continued-fraction convergents, used as an independent oracle for circle
rotations: the convergent denominators are exactly the best return times and
satisfy |q*theta - p| < 1/q_next."""

from __future__ import annotations

import math


def convergents(theta: float, q_max: int) -> list[tuple[int, int]]:
    """Convergents (p, q) of theta with q <= q_max, in increasing q order."""
    if q_max < 1:
        raise ValueError("denominator bound must be >= 1")
    p_prev, p_cur = 1, int(math.floor(theta))
    q_prev, q_cur = 0, 1
    out = [(p_cur, q_cur)]
    t = theta - math.floor(theta)
    for _ in range(64):
        if t < 1e-15:
            break
        t = 1.0 / t
        a = int(math.floor(t))
        t -= a
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        if q_cur > q_max:
            break
        out.append((p_cur, q_cur))
    return out


def circle_residual(theta: float, q: int) -> float:
    """Distance from q*theta to the nearest integer."""
    d = (q * theta) % 1.0
    return min(d, 1.0 - d)


def best_return_times(theta: float, eps_schedule, horizon: int) -> list[int]:
    """Predicted quasi-rigidity times of the rotation by theta.

    By the best-approximation property, every n below the next convergent
    denominator satisfies |n*theta - m| >= |q*theta - p| for the current
    convergent (p, q), so the smallest unused time within each radius is the
    smallest convergent denominator whose residual beats the radius.
    """
    qs = [q for _, q in convergents(theta, horizon) if q >= 1]
    qs = sorted(set(qs))
    used = set()
    out = []
    for eps in eps_schedule:
        pick = None
        for q in qs:
            if q in used:
                continue
            if circle_residual(theta, q) < eps:
                pick = q
                break
        if pick is None:
            break
        used.add(pick)
        out.append(pick)
    return out


GOLDEN_THETA = (math.sqrt(5.0) - 1.0) / 2.0
