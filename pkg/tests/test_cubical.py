import itertools
import random

import pytest

from cuphom.cubical import (
    CubChain,
    all_faces,
    coproduct,
    epsilon_face,
    face_degree,
    face_join,
    face_max,
    face_min,
    iterated_coproduct,
    iterated_coproduct_chain,
    join,
    leq_letterwise,
    project_torus,
)
from cuphom.exterior import ExtElement, Monomial


def test_coproduct_letters():
    assert coproduct(CubChain.face("I")).terms == {("0", "I"): 1, ("I", "1"): 1}
    assert coproduct(CubChain.face("0")).terms == {("0", "0"): 1}
    assert coproduct(CubChain.face("II")).terms == {
        ("00", "II"): 1,
        ("I0", "1I"): 1,
        ("0I", "I1"): -1,
        ("II", "11"): 1,
    }


def test_join_letters_and_examples():
    assert join("0", "1").terms == {("I",): 1}
    assert join("1", "0").terms == {("I",): -1}
    assert join("00", "11").terms == {("I1",): 1, ("0I",): 1}
    assert join(join("00", "10"), CubChain.face("11")).terms == {("II",): -1}
    assert join("00", join("10", "11")).terms == {("II",): 1}


def test_join_anti_associativity():
    rng = random.Random(0)
    for n in (1, 2, 3):
        faces = all_faces(n)
        for _ in range(120):
            x, y, z = (rng.choice(faces) for _ in range(3))
            lhs = join(join(x, y), CubChain.face(z))
            rhs = join(x, join(y, z))
            sign = (-1) ** (face_degree(x) + 1)
            assert lhs == sign * rhs, (x, y, z)


def test_iterated_coproduct_matches_recursive():
    for n in range(1, 4):
        for k in range(1, 5):
            assert iterated_coproduct(n, k) == iterated_coproduct_chain(
                CubChain.top(n), k
            )


def test_iterated_coproduct_signs_and_terms():
    t = iterated_coproduct(2, 3)
    # the 9-term expansion of (Delta x 1) Delta (II)
    assert len(t.terms) == 9
    assert t.terms[("00", "I0", "1I")] == 1
    assert t.terms[("00", "0I", "I1")] == -1
    assert t.terms[("00", "II", "11")] == 1
    # chain conditions: min F1 = 0^n, max Fk = 1^n, max F_i = min F_{i+1}
    for word in t.terms:
        assert face_min(word[0]) == "00"
        assert face_max(word[-1]) == "11"
        for a, b in zip(word, word[1:]):
            assert face_max(a) == face_min(b)


def test_face_join_examples():
    assert face_join("000", "100").terms == {("I00",): 1}
    assert face_join("I00", "111").terms == {("II1",): -1, ("I0I",): -1}
    assert face_join("0I0", "111").terms == {("0II",): -1}
    with pytest.raises(ValueError):
        face_join("100", "000")


def test_face_join_agrees_with_join():
    for n in (1, 2, 3):
        for f0 in all_faces(n):
            for f1 in all_faces(n):
                if leq_letterwise(face_max(f0), face_min(f1)):
                    assert face_join(f0, f1) == join(f0, f1), (f0, f1)


def test_boundary_squares_to_zero():
    for n in (1, 2, 3):
        for w in all_faces(n):
            assert CubChain.face(w).boundary().boundary().is_zero()
    # tensor words with Koszul signs
    c = CubChain(2, {("II", "I0"): 1, ("0I", "II"): -2})
    assert c.boundary().boundary().is_zero()


def test_join_boundary_identity():
    # d(x*y) = -dx*y - (-1)^|x| x*dy + eps(x) y - x eps(y)
    for n in (1, 2, 3):
        for x in all_faces(n):
            for y in all_faces(n):
                xc, yc = CubChain.face(x), CubChain.face(y)
                lhs = join(xc, yc).boundary()
                s = (-1) ** face_degree(x)
                rhs = (
                    -1 * join(xc.boundary(), yc)
                    + (-s) * join(xc, yc.boundary())
                    + epsilon_face(x) * yc
                    - epsilon_face(y) * xc
                )
                assert lhs == rhs, (x, y)


def test_epsilon_kills_joins():
    # a join has positive degree, so the augmentation annihilates it
    for n in (1, 2):
        for x in all_faces(n):
            for y in all_faces(n):
                for (word,), c in join(x, y).terms.items():
                    assert epsilon_face(word) == 0


def test_join_of_coproduct_vanishes():
    # * after Delta is zero (the square relation)
    from cuphom.cubical import coproduct_face

    for n in (1, 2, 3):
        for w in all_faces(n):
            total = CubChain(n, {}, 1)
            for s, (f, b) in coproduct_face(w):
                total = total + s * join(f, b)
            assert total.is_zero(), w


def test_coproduct_is_chain_map():
    from cuphom.cubical import boundary_face, coproduct_face

    for n in (1, 2, 3):
        for w in all_faces(n):
            lhs = coproduct(CubChain.face(w)).boundary()
            rhs = CubChain(n, {}, 2)
            for s, dw in boundary_face(w):
                rhs = rhs + s * coproduct(CubChain.face(dw))
            assert lhs == rhs, w


def test_coproduct_coassociative():
    for n in range(1, 5):
        for w in all_faces(n):
            c = CubChain.face(w)
            left = CubChain(n, {}, 3)
            right = CubChain(n, {}, 3)
            for (f, b), coeff in coproduct(c).terms.items():
                for (f2, b2), c2 in coproduct(CubChain.face(f)).terms.items():
                    left = left + CubChain(n, {(f2, b2, b): coeff * c2})
                for (f2, b2), c2 in coproduct(CubChain.face(b)).terms.items():
                    right = right + CubChain(n, {(f, f2, b2): coeff * c2})
            assert left == right, w


def test_project_torus():
    assert project_torus(CubChain.face("I0")) == ExtElement.basis(2, (1,))
    assert project_torus(CubChain.face("0I")) == ExtElement.basis(2, (2,))
    assert project_torus(
        CubChain(2, {("I0",): 1, ("I1",): 1})
    ) == 2 * ExtElement.basis(2, (1,))
    assert project_torus(CubChain.face("II")) == ExtElement.basis(2, (1, 2))
    # tensor words project to monomial tuples
    out = project_torus(CubChain(2, {("I0", "1I"): 3}))
    assert out == {(Monomial((1,)), Monomial((2,))): 3}


def test_serialization():
    c = CubChain(2, {("0I", "II"): -2, ("I0", "1I"): 1})
    assert CubChain.from_json(2, c.to_json()) == c
