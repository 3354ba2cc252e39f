import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deabench.dataset import Dataset
from deabench.frontier import (
    Status,
    additive_slack,
    classify,
    classify_efficiency,
    representable,
)


def test_t1_classification(t1):
    c = classify(t1)
    assert c.E == ("A", "B", "C")
    assert c.status["D"] is Status.INEFFICIENT
    assert c.efficient_ids() == ["A", "B", "C"]


def test_t2_classification(t2):
    base = classify_efficiency(t2)
    assert base.efficient_ids() == ["A", "B", "C"]
    c = classify(t2)
    assert c.E == ("A", "B")
    assert c.status["C"] is Status.NONEXTREME_EFFICIENT
    assert c.inefficient_ids() == ["D"]


def test_dominated_dmu_inefficient():
    d = Dataset.from_arrays("PQ", [[2, 2], [3, 3]], [4, 4])
    assert classify(d).status["Q"] is Status.INEFFICIENT


def test_duplicates_keep_first():
    d = Dataset.from_arrays("ABCD", [2, 4, 4, 6], [2, 5, 5, 6])
    c = classify(d)
    assert "B" in c.E and "C" not in c.E
    assert c.status["C"] is Status.NONEXTREME_EFFICIENT


def test_crs_same_ray_keeps_first():
    d = Dataset.from_arrays("ABC", [[1, 2], [2, 4], [2, 1]], [1, 2, 1], rts="crs")
    c = classify(d)
    assert c.E == ("A", "C")


def test_slack_vector_units(t1):
    c = classify(t1)
    # D(5;3) is dominated by B(4;5): one unit of input, two of output
    s = c.slacks["D"]
    assert s.sum() > 1e-6
    value, _ = additive_slack(t1, t1["D"].inputs, t1["D"].outputs)
    assert value > 0


def test_oriented_additive(t1):
    out, _ = additive_slack(t1, (5,), (5.5,), orientation="output")
    assert out == pytest.approx(0.0, abs=1e-9)
    inp, _ = additive_slack(t1, (8 / 3,), (3,), orientation="input")
    assert inp == pytest.approx(0.0, abs=1e-9)


def test_representable(t2):
    idx = [t2.index(k) for k in "AB"]
    assert representable(t2, t2.index("C"), idx)
    assert not representable(t2, t2.index("A"), [t2.index("B")])
    assert not representable(t2, 0, [])


@st.composite
def small_dataset(draw):
    n = draw(st.integers(2, 7))
    m = draw(st.integers(1, 2))
    s = draw(st.integers(1, 2))
    vals = st.integers(1, 10)
    X = draw(st.lists(st.lists(vals, min_size=m, max_size=m), min_size=n, max_size=n))
    Y = draw(st.lists(st.lists(vals, min_size=s, max_size=s), min_size=n, max_size=n))
    rts = draw(st.sampled_from(["vrs", "crs"]))
    return Dataset.from_arrays([f"U{i}" for i in range(n)], X, Y, rts=rts)


@settings(max_examples=60, deadline=None)
@given(small_dataset())
def test_E_nonempty_efficient_and_irreducible(d):
    c = classify(d)
    assert c.E
    for e in c.E:
        assert c.status[e] is Status.EXTREME_EFFICIENT
        k = d.index(e)
        # every other DMU, including nonextreme ones, fails to reproduce it
        others = [j for j in range(d.n) if j != k and d.ids[j] in c.E]
        assert not representable(d, k, others)


@settings(max_examples=40, deadline=None)
@given(small_dataset(), st.randoms())
def test_status_permutation_invariant(d, rnd):
    # distinct rows only, so duplicate tie-breaking cannot differ
    rows = {tuple(r.inputs + r.outputs) for r in d.dmus}
    if len(rows) < d.n:
        return
    perm = list(range(d.n))
    rnd.shuffle(perm)
    e = Dataset([d.dmus[k] for k in perm], d.m, d.s, d.rts)
    if d.rts == "constant":
        norm = {tuple(np.round(r.vector / np.linalg.norm(r.vector), 12)) for r in d.dmus}
        if len(norm) < d.n:
            return
    assert classify(d).status == classify(e).status
