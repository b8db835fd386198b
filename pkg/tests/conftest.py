import random

import pytest

from gaugeparam.data import graph_names, load
from gaugeparam.graph import random_graph


def _random_corpus(n=60, seed=20240611):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        nv = rng.randint(2, 6)
        lo, hi = nv - 1, min(8, (3 * nv) // 2)
        if lo > hi:
            continue
        m = rng.randint(lo, hi)
        g = random_graph(rng, nv, m)
        if g is not None:
            out.append(g)
    return out


RANDOM_GRAPHS = _random_corpus()
NAMED_GRAPHS = {name: load(name) for name in graph_names()}


@pytest.fixture(params=sorted(NAMED_GRAPHS))
def named_graph(request):
    return NAMED_GRAPHS[request.param]


@pytest.fixture
def one_loop():
    return NAMED_GRAPHS["one_loop"]
