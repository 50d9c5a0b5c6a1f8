import math
import random

import pytest

from gnewton import builtin, make
from gnewton.generalizers import GENERALIZER_NAMES, check_singularity
from gnewton.problems import BUILTIN_NAMES


def all_problems():
    return [builtin(name) for name in BUILTIN_NAMES]


def valid_solution_cells():
    """Every (problem, solution index, generalizer) triple where the map is
    invertible and nonsingular at the solution."""
    cells = []
    for p in all_problems():
        for si, x_star in enumerate(p.known_solutions):
            for s_name in GENERALIZER_NAMES:
                s = make(s_name)
                if not s.valid_point(x_star):
                    continue
                if check_singularity(s, x_star):
                    continue
                cells.append((p, si, x_star, s))
    return cells


def uniform_points(n, count, lo, hi, seed):
    rng = random.Random(seed)
    return [tuple(rng.uniform(lo, hi) for _ in range(n)) for _ in range(count)]


@pytest.fixture(scope="session")
def problems():
    return {p.name: p for p in all_problems()}
