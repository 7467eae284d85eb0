import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from hypermono.digraph import DiGraph  # noqa: E402
from hypermono.gallery import make_fixture  # noqa: E402


@pytest.fixture
def fx():
    return make_fixture


@st.composite
def small_digraphs(draw, max_vertices=7):
    n = draw(st.integers(1, max_vertices))
    vs = [f"v{i}" for i in range(n)]
    pairs = [(a, b) for a in vs for b in vs]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=3 * n))
    return DiGraph(edges, vertices=vs)
