import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from germlab import ComputeContext, GermSpec, load_corpus_germ
from germlab.multipoint import Branch
from germlab.poly import parse_polynomial


def make_germ(n, branch_components, name="test", params=()):
    """Build a germ from component strings, one tuple per branch."""
    variables = tuple(f"x{i}" for i in range(1, n)) + ("y",) + tuple(params)
    branches = tuple(
        Branch(chr(ord("a") + i), tuple(parse_polynomial(c, variables) for c in comps))
        for i, comps in enumerate(branch_components)
    )
    return GermSpec(n, branches, tuple(params), name)


CORPUS_GERMS = ["crosscap", "immersion", "s1", "s2", "h2", "cusp_curve"]
CORPUS_FAMILIES = ["ruas", "constant_s1", "rescaled_s1"]


@pytest.fixture(scope="session")
def shared_ctx():
    """One context per session so strata tables are computed once."""
    return ComputeContext(seed=7)


@pytest.fixture(scope="session")
def corpus(shared_ctx):
    return {name: load_corpus_germ(name) for name in CORPUS_GERMS}


@pytest.fixture(scope="session")
def families():
    return {name: load_corpus_germ(name) for name in CORPUS_FAMILIES}
