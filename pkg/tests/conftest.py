import sys
from fractions import Fraction
from pathlib import Path
from random import Random

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from recdyn import (
    Circle,
    CompactSet,
    FiniteSpace,
    FiniteSystem,
    StepFuzzySet,
)
from recdyn.oracle import random_finite_metric


@pytest.fixture
def rng():
    return Random(20240801)


def random_space(rng: Random, max_points: int = 5, circle_share: float = 0.4):
    if rng.random() < circle_share:
        return Circle()
    size = rng.randrange(2, max_points + 1)
    if rng.random() < 0.5:
        return FiniteSpace(size)
    return FiniteSpace(size, random_finite_metric(rng, size))


def random_compact(rng: Random, space, max_points: int = 4) -> CompactSet:
    count = rng.randrange(1, max_points + 1)
    return CompactSet(space, [space.random_point(rng) for _ in range(count)])


def random_step_set(rng: Random, space, max_levels: int = 4,
                    lattice: int = 20) -> StepFuzzySet:
    depth = rng.randrange(1, max_levels + 1)
    ticks = sorted(rng.sample(range(1, lattice), depth - 1))
    levels = [Fraction(t, lattice) for t in ticks] + [Fraction(1)]
    support = random_compact(rng, space, 4)
    sets = [support]
    for _ in range(depth - 1):
        prev = sets[-1]
        keep = rng.randrange(1, len(prev.points) + 1)
        sets.append(CompactSet(space, rng.sample(list(prev.points), keep)))
    return StepFuzzySet(space, levels, sets)


def random_finite_system(rng: Random, max_size: int = 4,
                         permutation: bool | None = None) -> FiniteSystem:
    size = rng.randrange(1, max_size + 1)
    if permutation or (permutation is None and rng.random() < 0.5):
        table = list(range(size))
        rng.shuffle(table)
    else:
        table = [rng.randrange(size) for _ in range(size)]
    return FiniteSystem(FiniteSpace(size), table)
