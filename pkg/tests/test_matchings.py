import pytest

from ghor.matchings import (Matching, classify, enumerate_perfect_matchings, is_simple,
                            strongly_connected_spanning, uncovered_arrows)
from ghor.quiver import Arrow

from oracles import brute_force_matchings


def test_matches_brute_force_on_suite(suite):
    for _, q in suite:
        got = [m.arrows for m in enumerate_perfect_matchings(q)]
        expected = brute_force_matchings([a.id for a in q.arrows], q.faces)
        assert sorted(got, key=sorted) == expected


@pytest.mark.parametrize("name,perfect,simple", [
    ("polynomial-2", 3, 3), ("polynomial-3", 4, 4), ("polynomial-4", 5, 5),
    ("conifold", 4, 4), ("center-deficient", 4, 2), ("genus2-octagon", 6, 6),
])
def test_counts(suite, name, perfect, simple):
    q = dict((s.name, q) for s, q in suite)[name]
    index = classify(q)
    assert (len(index.perfect), len(index.simple)) == (perfect, simple)


def test_every_matching_meets_each_face_once(suite):
    for _, q in suite:
        for m in classify(q).perfect:
            for f in q.faces:
                assert len(m.arrows & set(f)) == 1


def test_simple_is_subset_and_canonical(suite):
    for _, q in suite:
        index = classify(q)
        assert set(index.simple) <= set(index.perfect)
        keys = [m.sorted() for m in index.perfect]
        assert keys == sorted(keys)


def test_center_deficient_simple_matchings(deficient):
    index = classify(deficient)
    assert [m.sorted() for m in index.simple] == [("x1",), ("x2",)]
    assert not is_simple(deficient, Matching(frozenset({"y1"})))
    assert index.uncovered == ()


def test_bit_tables(conifold):
    index = classify(conifold)
    assert index.perfect_bits.shape == (4, 4)
    assert (index.perfect_bits.sum(axis=0) == 1).all()
    assert classify(conifold) is index


def test_uncovered_arrows():
    from ghor.instances import build_conifold_torus
    q = build_conifold_torus()
    assert uncovered_arrows(q, [Matching(frozenset({"a1"}))]) == ["a2", "b1", "b2"]


def test_strong_connectivity_edge_cases():
    assert strongly_connected_spanning([], [])
    assert not strongly_connected_spanning(["v"], [])
    assert strongly_connected_spanning(["v"], [Arrow("x", "v", "v")])
    assert not strongly_connected_spanning(["1", "2"], [Arrow("a", "1", "2")])
    assert strongly_connected_spanning(["1", "2"], [Arrow("a", "1", "2"), Arrow("b", "2", "1")])


def test_to_dict(conifold):
    d = classify(conifold).to_dict()
    assert d["perfect"] == [["a1"], ["a2"], ["b1"], ["b2"]]
    assert d["uncovered_arrows"] == []
