import contextlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghor import kernels


BACKENDS = pytest.mark.parametrize("jit", [True, False], ids=["numba", "fallback"])


@contextlib.contextmanager
def backend(jit):
    if jit and not kernels.numba_available:
        pytest.skip("numba not installed")
    before = kernels.use_numba()
    kernels.use_numba(jit)
    try:
        yield
    finally:
        kernels.use_numba(before)


def brute_cover(faces, n_arrows):
    # arrows outside every face are never chosen
    used = sum(1 << a for a in {a for f in faces for a in f})
    sols = []
    for mask in range(1 << n_arrows):
        if mask & ~used:
            continue
        if all(sum(1 for a in f if mask >> a & 1) == 1 for f in faces):
            sols.append(mask)
    return sorted(sols)


cover_instances = st.integers(1, 9).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True).map(sorted),
                 min_size=1, max_size=6),
    ))


@BACKENDS
@settings(max_examples=150, deadline=None)
@given(inst=cover_instances)
def test_exact_cover_matches_brute_force(jit, inst):
    n, faces = inst
    with backend(jit):
        assert sorted(kernels.exact_cover(faces, n)) == brute_cover(faces, n)


@BACKENDS
def test_exact_cover_empty_cases(jit):
    with backend(jit):
        assert kernels.exact_cover([], 3) == [0]
        assert kernels.exact_cover([[0], [0, 1], [1]], 2) == []


def test_exact_cover_order_is_deterministic():
    faces = [[0, 1, 2], [0, 1, 2]]
    with backend(True):
        a = kernels.exact_cover(faces, 3)
    with backend(False):
        b = kernels.exact_cover(faces, 3)
    assert a == b == [1, 2, 4]


def closure_brute(start, tails, heads, labels, bound):
    labels = [tuple(r) for r in labels]
    dim = len(labels[0])
    seen = {(start, (0,) * dim)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for v, vec in frontier:
            for a, (t, h) in enumerate(zip(tails, heads)):
                if t == v:
                    w = tuple(x + y for x, y in zip(vec, labels[a]))
                    if sum(w) <= bound and (h, w) not in seen:
                        seen.add((h, w))
                        nxt.append((h, w))
        frontier = nxt
    return seen


closure_instances = st.integers(1, 4).flatmap(
    lambda nv: st.integers(1, 4).flatmap(
        lambda dim: st.tuples(
            st.just(nv),
            st.lists(st.tuples(st.integers(0, nv - 1), st.integers(0, nv - 1),
                               st.lists(st.integers(0, 2), min_size=dim, max_size=dim)
                               .filter(lambda r: sum(r) > 0)),
                     min_size=1, max_size=6),
            st.integers(0, 5),
        )))


@BACKENDS
@settings(max_examples=100, deadline=None)
@given(inst=closure_instances)
def test_label_closure_matches_brute_force(jit, inst):
    nv, arrows, bound = inst
    tails = [a[0] for a in arrows]
    heads = [a[1] for a in arrows]
    labels = np.array([a[2] for a in arrows])
    with backend(jit):
        assert kernels.label_closure(0, tails, heads, labels, bound) == closure_brute(0, tails, heads, labels, bound)


def test_label_closure_rejects_zero_degree():
    with pytest.raises(ValueError, match="positive degree"):
        kernels.label_closure(0, [0], [0], [[0, 0]], 3)


def test_label_closure_generic_path_for_huge_bases():
    labels = np.eye(40, dtype=np.int64)[:3]
    tails, heads = [0, 0, 0], [0, 0, 0]
    got = kernels.label_closure(0, tails, heads, labels, 3)
    assert got == closure_brute(0, tails, heads, labels, 3)


def test_env_flag_can_disable(monkeypatch):
    import importlib
    monkeypatch.setenv("GHOR_NUMBA", "0")
    mod = importlib.reload(kernels)
    try:
        assert mod.use_numba() is False
    finally:
        monkeypatch.delenv("GHOR_NUMBA")
        importlib.reload(kernels)
    assert kernels.use_numba() == kernels.numba_available
