import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flownn.windowing import WindowPair, split


def split_reference(diff):
    """Independent zero-crossing segmentation: group maximal sign runs,
    then pair each nonnegative run with the negative run that follows it."""
    runs = [
        (neg, tuple(grp))
        for neg, grp in itertools.groupby(
            range(len(diff)), key=lambda i: diff[i] < 0
        )
    ]
    pairs = []
    i = 0
    if runs and runs[0][0]:
        pairs.append(((), runs[0][1]))
        i = 1
    while i < len(runs):
        t2 = runs[i + 1][1] if i + 1 < len(runs) else ()
        pairs.append((runs[i][1], t2))
        i += 2
    return pairs


def as_tuples(pairing):
    return [(p.t1, p.t2) for p in pairing]


def test_worked_example_mixed():
    pairing = split([2, 1, -1, -2, 3, -1])
    assert as_tuples(pairing) == [((0, 1), (2, 3)), ((4,), (5,))]


def test_all_zero_is_single_source_window():
    pairing = split([0, 0, 0])
    assert as_tuples(pairing) == [((0, 1, 2), ())]


def test_leading_negative_prefix_forms_empty_t1_pair():
    pairing = split([-1, 2, -1])
    assert as_tuples(pairing) == [((), (0,)), ((1,), (2,))]


def test_empty_series_rejected():
    with pytest.raises(ValueError):
        split([])


def test_no_sign_change_yields_one_pair():
    assert len(split([1.5, 0.25, 3])) == 1
    assert len(split([-1.0, -0.5])) == 1


def test_matches_reference_on_random_sequences():
    rng = np.random.default_rng(7)
    for _ in range(300):
        n = int(rng.integers(1, 201))
        diff = rng.normal(size=n)
        # sprinkle exact zeros to hit the >= 0 boundary
        diff[rng.random(n) < 0.1] = 0.0
        assert as_tuples(split(diff)) == split_reference(diff)


@given(
    st.lists(
        st.one_of(st.integers(-5, 5), st.floats(-2, 2, allow_nan=False)),
        min_size=1,
        max_size=60,
    )
)
@settings(max_examples=300, deadline=None)
def test_pairing_invariants(diff):
    pairing = split(diff)
    seen = []
    for k, p in enumerate(pairing):
        assert all(diff[i] >= 0 for i in p.t1)
        assert all(diff[i] < 0 for i in p.t2)
        if p.t1 and p.t2:
            assert max(p.t1) < min(p.t2)
        if not p.t1:
            assert k == 0  # empty T1 only at the sequence start
        if not p.t2:
            assert k == len(pairing) - 1  # empty T2 only at the end
        seen.extend(p.t1)
        seen.extend(p.t2)
    assert seen == list(range(len(diff)))  # coverage, order, disjointness


def test_json_dump_roundtrips_structure():
    import json

    pairing = split([1, -1, 2])
    doc = json.loads(pairing.to_json())
    assert doc == [{"t1": [0], "t2": [1]}, {"t1": [2], "t2": []}]


def test_pairs_are_immutable_records():
    p = WindowPair((0,), (1,))
    with pytest.raises(AttributeError):
        p.t1 = (2,)
