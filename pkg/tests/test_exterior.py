import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuphom.exterior import (
    ExtElement,
    Monomial,
    RankMismatchError,
    ScalarRingError,
    contract,
    hodge_star,
    parse_element,
    perm_sign,
    wedge,
)


def e(n, *idx):
    return ExtElement.basis(n, idx)


def test_wedge_examples():
    assert wedge(e(3, 1), e(3, 2)) == e(3, 1, 2)
    assert wedge(e(3, 2), e(3, 1)) == -1 * e(3, 1, 2)
    # inversion-count oracle on (1,4,5,2,3): 4 inversions -> +
    assert wedge(e(5, 1, 4, 5), e(5, 2, 3)) == e(5, 1, 2, 3, 4, 5)
    assert perm_sign((1, 4, 5, 2, 3)) == 1


def test_wedge_repeated_index_vanishes():
    assert wedge(e(4, 1, 2), e(4, 2, 3)).is_zero()


def test_contract_examples():
    a = e(3, 1, 2, 3)
    assert contract(a, a) == ExtElement.unit(3)
    assert contract(a, e(3, 1, 2)).is_zero()
    a4 = ExtElement.basis(4, (1, 2, 3))
    assert contract(a4, ExtElement.basis(4, (1, 2, 3, 4))) == e(4, 4)


def test_contract_rejects_inhomogeneous():
    a = e(3, 1) + e(3, 1, 2, 3)
    with pytest.raises(ValueError):
        contract(a, e(3, 1, 2))


def test_hodge_star_examples():
    assert hodge_star(ExtElement.unit(3)) == e(3, 1, 2, 3)
    assert hodge_star(e(3, 1, 2, 3)) == ExtElement.unit(3)
    assert hodge_star(e(3, 2)) == -1 * e(3, 1, 3)
    # defining property: x ^ star(x) = top for every monomial
    for n in range(1, 6):
        top = ExtElement.basis(n, tuple(range(1, n + 1)))
        for r in range(n + 1):
            for sub in itertools.combinations(range(1, n + 1), r):
                m = ExtElement.basis(n, sub)
                assert wedge(m, hodge_star(m)) == top


def test_star_star_sign():
    for n in range(1, 6):
        for r in range(n + 1):
            for sub in itertools.combinations(range(1, n + 1), r):
                m = ExtElement.basis(n, sub)
                assert hodge_star(hodge_star(m)) == ((-1) ** (r * (n - r))) * m


def test_wedge_associative_unital_exhaustive_small():
    for n in (2, 3, 4):
        monos = [
            ExtElement.basis(n, c)
            for r in range(n + 1)
            for c in itertools.combinations(range(1, n + 1), r)
        ]
        one = ExtElement.unit(n)
        for x in monos:
            assert wedge(one, x) == x == wedge(x, one)
        rng = random.Random(n)
        for _ in range(200):
            x, y, z = (rng.choice(monos) for _ in range(3))
            assert wedge(wedge(x, y), z) == wedge(x, wedge(y, z))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_graded_commutativity(data):
    n = data.draw(st.integers(2, 6))
    subs = [c for r in range(n + 1) for c in itertools.combinations(range(1, n + 1), r)]
    mx = data.draw(st.sampled_from(subs))
    my = data.draw(st.sampled_from(subs))
    cx = data.draw(st.integers(-5, 5))
    cy = data.draw(st.integers(-5, 5))
    x = cx * ExtElement.basis(n, mx)
    y = cy * ExtElement.basis(n, my)
    sign = (-1) ** (len(mx) * len(my))
    assert wedge(x, y) == sign * wedge(y, x)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_wedge_bilinear(data):
    n = 5
    subs = [c for r in range(n + 1) for c in itertools.combinations(range(1, n + 1), r)]

    def rand_elem():
        pick = data.draw(st.lists(st.sampled_from(subs), min_size=0, max_size=3))
        out = ExtElement.zero(n)
        for s in pick:
            out = out + data.draw(st.integers(-4, 4)) * ExtElement.basis(n, s)
        return out

    x, y, z = rand_elem(), rand_elem(), rand_elem()
    assert wedge(x + y, z) == wedge(x, z) + wedge(y, z)
    assert wedge(z, x + y) == wedge(z, x) + wedge(z, y)


def test_monomial_invariants():
    with pytest.raises(ValueError):
        Monomial((2, 1))
    with pytest.raises(ValueError):
        Monomial((0, 1))
    with pytest.raises(ValueError):
        ExtElement(3, {(1, 5): 1})


def test_ring_modes():
    x = ExtElement(3, {(1,): 1}, ring="Z")
    y = ExtElement(3, {(2,): 1}, ring="Q")
    with pytest.raises(ScalarRingError):
        x + y
    with pytest.raises(ScalarRingError):
        wedge(x, y)
    with pytest.raises(RankMismatchError):
        wedge(x, ExtElement(4, {(2,): 1}))
    from fractions import Fraction

    with pytest.raises(ScalarRingError):
        ExtElement(3, {(1,): Fraction(1, 2)}, ring="Z")
    q = ExtElement(3, {(1,): Fraction(1, 2)}, ring="Q")
    assert q.try_integral() is None
    assert x.rationalize().ring == "Q"


def test_text_round_trip():
    cases = [
        (7, "e123 + 2 e345 - 10 e567"),
        (3, "0"),
        (3, "e0"),
        (12, "e{1,2,11} - 3 e{3,4,5}"),
    ]
    for n, text in cases:
        x = parse_element(n, text)
        assert parse_element(n, x.text()) == x


def test_parse_unsorted_indices_signed():
    # e21 means e2 ^ e1 = -e12
    assert parse_element(3, "e21") == -1 * ExtElement.basis(3, (1, 2))


def test_json_round_trip():
    x = parse_element(7, "e123 + 2 e345 - 10 e567")
    assert ExtElement.from_json(7, x.to_json()) == x
    q = ExtElement(3, {(1,): "1/2"}, ring="Q")
    assert ExtElement.from_json(3, q.to_json(), ring="Q") == q


def test_homogeneous_degree():
    assert e(3, 1, 2).degree == 2
    assert ExtElement.zero(3).degree is None
    with pytest.raises(ValueError):
        (e(3, 1) + e(3, 1, 2)).degree
