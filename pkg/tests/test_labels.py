import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghor.labels import (PERFECT, SIMPLE, BasisMismatch, ExponentVector, eta_bar, paths_equal_mod_ker, sigma,
                         sigma_equal, sigma_normal_form, tau_bar)
from ghor.quiver import PathError

vectors = st.lists(st.integers(-5, 5), min_size=3, max_size=3).map(lambda v: ExponentVector(tuple(v), SIMPLE))


def test_arithmetic():
    u = ExponentVector((1, 0, 2), SIMPLE)
    v = ExponentVector((0, 1, 1), SIMPLE)
    assert (u + v).exponents == (1, 1, 3)
    assert (u - v).exponents == (1, -1, 1)
    assert (-u).exponents == (-1, 0, -2)
    assert u.scale(3).exponents == (3, 0, 6)
    assert u.shift(-1).exponents == (0, -1, 1)
    assert u.degree == 3 and len(u) == 3 and list(u) == [1, 0, 2]
    assert u.is_monomial() and not (u - v).is_monomial()
    assert repr(u) == "S[1, 0, 2]"


def test_basis_mismatch():
    with pytest.raises(BasisMismatch):
        ExponentVector((1, 0), SIMPLE) + ExponentVector((1, 0), PERFECT)
    with pytest.raises(BasisMismatch):
        ExponentVector((1, 0), SIMPLE) - ExponentVector((1, 0, 0), SIMPLE)


@given(vectors, st.integers(-4, 4))
def test_sigma_equal_detects_shift(u, k):
    assert sigma_equal(u.shift(k), u) == k


@given(vectors, vectors)
def test_sigma_equal_antisymmetric(u, v):
    a, b = sigma_equal(u, v), sigma_equal(v, u)
    assert (a is None) == (b is None)
    if a is not None:
        assert a == -b


@given(vectors)
def test_normal_form(u):
    ell, rest = sigma_normal_form(u)
    assert min(rest.exponents) == 0
    assert rest.shift(ell) == u


def test_face_labels_are_sigma(suite):
    for _, q in suite:
        for f in q.faces:
            assert eta_bar(q, f) == sigma(q, PERFECT)
            assert tau_bar(q, f) == sigma(q, SIMPLE)


def test_labels_of_conifold_paths(conifold):
    assert eta_bar(conifold, ("a1", "b1")).exponents == (1, 0, 1, 0)
    assert eta_bar(conifold, ()).exponents == (0, 0, 0, 0)
    with pytest.raises(PathError):
        eta_bar(conifold, ("a1", "a2"))


def test_paths_equal_mod_ker(conifold):
    # a1 b1 a2 and a2 b1 a1 have the same label and endpoints
    assert paths_equal_mod_ker(conifold, ("a1", "b1", "a2"), ("a2", "b1", "a1"))
    assert not paths_equal_mod_ker(conifold, ("a1",), ("a2",))
    assert not paths_equal_mod_ker(conifold, ("a1", "b1"), ("b1", "a1"))
    assert paths_equal_mod_ker(conifold, (), ())
    assert not paths_equal_mod_ker(conifold, (), ("a1",))


def test_unit_cycles_at_a_vertex_agree(conifold):
    f0, f1 = conifold.faces
    assert paths_equal_mod_ker(conifold, f0, f1)
