import hypothesis
import numpy as np
import pytest

from qprelax.core import QpInstance

hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=50, derandomize=True
)
hypothesis.settings.load_profile("default")


def make_qp(Q, c, A, b, name="test"):
    Q = np.array(Q, dtype=float)
    A = np.atleast_2d(np.array(A, dtype=float))
    b = np.atleast_1d(np.array(b, dtype=float))
    c = np.array(c, dtype=float)
    return QpInstance(n=Q.shape[0], m=A.shape[0], Q=Q, c=c, A=A, b=b, name=name)


@pytest.fixture
def simplex_convex():
    # strictly convex objective on a segment; minimum 0.5 at the midpoint
    return make_qp(np.eye(2), [0, 0], [[1, 1]], [1], "simplex-convex")


@pytest.fixture
def simplex_bilinear():
    # q = 2 x1 x2 on the unit segment; vertices achieve the minimum 0
    return make_qp([[0, 1], [1, 0]], [0, 0], [[1, 1]], [1], "simplex-bilinear")


@pytest.fixture
def simplex_concave3():
    return make_qp(-np.eye(3), [0, 0, 0], [[1, 1, 1]], [1], "simplex-concave")


@pytest.fixture
def horn():
    from qprelax.generators import horn_instance

    return horn_instance()


def feasible_samples(inst, count, seed=0):
    """Random feasible points as convex combinations of basic feasible points."""
    from qprelax.oracle import enumerate_vertices

    verts = enumerate_vertices(inst)
    assert verts, "sampling needs a feasible instance"
    rng = np.random.default_rng(seed)
    vmat = np.array(verts)
    out = []
    for _ in range(count):
        w = rng.dirichlet(np.ones(len(verts)))
        out.append(w @ vmat)
    return out
