import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from strucramsey.structures import FiniteStructure, Signature  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SIGNATURES = [
    Signature((("R", 2),)),
    Signature((("R", 2), ("U", 1))),
    Signature((("T", 3),)),
    Signature((), (("s", 1),)),
    Signature((("U", 1),), (("s", 1),)),
    Signature((), (("m", 2),)),
    Signature((("R", 2),), (("c", 0),)),
]


def random_structure(rng, sig, n, density=0.4):
    rels = {}
    for r, arity in sig.relations:
        cells = np.array(np.meshgrid(*[np.arange(n)] * arity, indexing="ij")).reshape(arity, -1).T
        keep = rng.random(len(cells)) < density
        rels[r] = [tuple(int(x) for x in row) for row in cells[keep]]
    funs = {}
    for f, arity in sig.functions:
        vals = rng.integers(0, n, size=n ** arity)
        tab = {}
        for k, args in enumerate(np.ndindex(*([n] * arity)) if arity else [()]):
            tab[tuple(int(a) for a in args)] = int(vals[k])
        funs[f] = tab
    return FiniteStructure(sig, n, rels, funs)


@st.composite
def structures(draw, max_size=5, sig=None):
    sig = sig or draw(st.sampled_from(SIGNATURES))
    n = draw(st.integers(1, max_size))
    seed = draw(st.integers(0, 2**32 - 1))
    density = draw(st.sampled_from([0.2, 0.5, 0.8]))
    return random_structure(np.random.default_rng(seed), sig, n, density)


@st.composite
def structure_pairs(draw, max_a=3, max_c=5):
    sig = draw(st.sampled_from(SIGNATURES))
    return draw(structures(max_a, sig)), draw(structures(max_c, sig))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
