import random

import pytest
from hypothesis import given, strategies as st

from oracles import brute_longest_match
from x3.dictionary import FragmentDict


def test_first_insertions_are_dense():
    d = FragmentDict()
    assert d.add_fragment(b"ab") == 0
    assert d.add_fragment(b"abc") == 1
    assert len(d) == 2


def test_indexes_follow_insertion_order():
    rng = random.Random(1)
    d = FragmentDict()
    oracle = []
    seen = set()
    while len(oracle) < 1000:
        frag = bytes(rng.randrange(256) for _ in range(rng.randint(1, 12)))
        if frag in seen:
            continue
        seen.add(frag)
        assert d.add_fragment(frag) == len(oracle)
        oracle.append(frag)
    assert [d.get_fragment(i) for i in range(1000)] == oracle


def test_get_fragment_bounds():
    d = FragmentDict()
    d.add_fragment(b"ab")
    assert d.get_fragment(0) == b"ab"
    with pytest.raises(IndexError):
        d.get_fragment(1)
    with pytest.raises(IndexError):
        d.get_fragment(-1)


def test_duplicates_and_empty_rejected():
    d = FragmentDict()
    d.add_fragment(b"xy")
    with pytest.raises(ValueError):
        d.add_fragment(b"xy")
    with pytest.raises(ValueError):
        d.add_fragment(b"")
    assert len(d) == 1


def test_longest_match_examples():
    d = FragmentDict()
    for f in (b"ab", b"abc", b"b"):
        d.add_fragment(f)
    assert d.longest_match(b"abcd", 0, 4) == (1, 3)
    assert d.longest_match(b"abcd", 1, 3) == (2, 1)
    assert d.longest_match(b"abcd", 0, 2) == (0, 2)
    assert FragmentDict().longest_match(b"anything", 0, 8) is None

    partial = FragmentDict()
    partial.add_fragment(b"abcd")
    assert partial.longest_match(b"abce", 0, 4) is None


def test_no_prefix_property():
    # "abcd" stored without "abc": a walk through "abc" must not report it
    d = FragmentDict()
    d.add_fragment(b"a")
    d.add_fragment(b"abcd")
    assert d.longest_match(b"abcx", 0, 4) == (0, 1)
    assert d.longest_match(b"abcd", 0, 3) == (0, 1)
    assert d.longest_match(b"abcd", 0, 4) == (1, 4)


def test_longest_match_equals_brute_force_scan():
    rng = random.Random(7)
    for case in range(10_000):
        alphabet = b"ab" if case % 2 else b"abc"
        d = FragmentDict()
        frags = []
        for _ in range(rng.randint(0, 12)):
            f = bytes(rng.choice(alphabet) for _ in range(rng.randint(1, 5)))
            if f not in frags:
                d.add_fragment(f)
                frags.append(f)
        buf = bytes(rng.choice(alphabet) for _ in range(rng.randint(0, 10)))
        pos = rng.randint(0, len(buf))
        limit = rng.randint(0, 8)
        assert d.longest_match(buf, pos, limit) == brute_longest_match(frags, buf, pos, limit)


@given(st.lists(st.binary(min_size=1, max_size=6), unique=True, max_size=30), st.binary(max_size=20))
def test_longest_match_property(frags, buf):
    d = FragmentDict()
    for f in frags:
        d.add_fragment(f)
    for pos in range(len(buf) + 1):
        assert d.longest_match(buf, pos, len(buf)) == brute_longest_match(frags, buf, pos, len(buf))


def test_digest_tracks_insertion_sequence():
    a, b = FragmentDict(), FragmentDict()
    for f in (b"x", b"yz", b"xyz"):
        a.add_fragment(f)
        b.add_fragment(f)
        assert a.content_digest() == b.content_digest()
    c = FragmentDict()
    c.add_fragment(b"xy")
    c.add_fragment(b"z")
    assert c.content_digest() != FragmentDict().content_digest()
    a2 = FragmentDict()
    a2.add_fragment(b"x")
    a2.add_fragment(b"y")
    assert a2.content_digest() != c.content_digest()
