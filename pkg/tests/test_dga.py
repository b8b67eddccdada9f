import json
import random

import pytest

from cuphom.dga import (
    DgaMap,
    DgaValidationError,
    FiniteDga,
    HirschOps,
    cubical_cochain_dga,
    exterior_dga,
    hopf_fixture,
    interval_algebra,
    simplicial_cochain_dga,
    tensor,
    trivial_dga,
    verify_hirsch,
)
from cuphom.exterior import ExtElement
from cuphom.homology import GradedAbGroup


def test_interval_algebra():
    alg, r0, r1 = interval_algebra()
    assert alg.d(alg.gen("e0")) == -1 * alg.gen("e01")
    assert alg.d(alg.gen("e1")) == alg.gen("e01")
    assert alg.gen("e0") * alg.gen("e0") == alg.gen("e0")
    assert (alg.gen("e0") * alg.gen("e1")).is_zero()
    assert r0(alg.gen("e0")) == r0.target.unit()
    assert r0(alg.gen("e1")).is_zero()
    assert alg.cohomology() == GradedAbGroup({0: (1, ())})
    assert r0.is_quasi_iso() and r1.is_quasi_iso()


def test_hopf_fixture():
    h = hopf_fixture()
    assert h.cohomology() == GradedAbGroup({0: (1, ()), 5: (0, (2,))})
    x3 = h.gen("x3")
    assert (x3 * x3).is_zero()
    # x3 = d(-h2)
    assert h.solve_dx(x3) == -1 * h.gen("h2")
    assert h.solve_dx(h.gen("x5")) is None
    assert h.gen("x3") * h.gen("h2") == h.gen("x5")
    assert h.gen("h2") * h.gen("x3") == -1 * h.gen("x5")


def test_validation_catches_bad_tables():
    # break Leibniz: d(x3 h2) must vanish but x3 h2 = x5 with d x5 = x5? no:
    # corrupt the differential instead
    gens = [("1", 0), ("a", 1)]
    with pytest.raises(DgaValidationError):
        FiniteDga(gens, {1: {1: 1}}, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}},
                  {0: 1})
    # non-associative table
    gens = [("1", 0), ("a", 1), ("b", 2), ("c", 3)]
    mul = {(0, 0): {0: 1}}
    for i in (1, 2, 3):
        mul[(0, i)] = {i: 1}
        mul[(i, 0)] = {i: 1}
    mul[(1, 1)] = {2: 1}
    mul[(1, 2)] = {3: 1}
    mul[(2, 1)] = {3: -1}  # (aa)a = a(aa) fails: c = -c
    with pytest.raises(DgaValidationError):
        FiniteDga(gens, {}, mul, {0: 1})


def test_tensor_unit_law_and_contractibles():
    alg, _, _ = interval_algebra()
    z = trivial_dga()
    h = hopf_fixture()
    assert tensor(z, h).cohomology() == h.cohomology()
    assert tensor(h, z).cohomology() == h.cohomology()
    t = tensor(alg, alg)
    assert t.cohomology() == GradedAbGroup({0: (1, ())})


def test_tensor_of_lines_is_plane():
    e1 = exterior_dga(1)
    e2 = exterior_dga(2)
    t = tensor(e1, e1)
    # the structure-constant comparison is the validated map below
    m = DgaMap(
        t,
        e2,
        {
            "1(x)1": {"1": 1},
            "e1(x)1": {"e1": 1},
            "1(x)e1": {"e2": 1},
            "e1(x)e1": {"e12": 1},
        },
    )
    assert m.is_quasi_iso()


def test_tensor_associative_on_basis():
    z = trivial_dga()
    alg, _, _ = interval_algebra()
    left = tensor(tensor(alg, z), alg)
    right = tensor(alg, tensor(z, alg))
    assert left.cohomology() == right.cohomology()
    assert sorted(left.degrees) == sorted(right.degrees)


def test_exterior_dga_basics():
    L = exterior_dga(3)
    assert L.dim == 8
    assert not L.diff
    assert L.hirsch.E(1, 1, [L.gen("e12"), L.gen("e23")]) == L.gen("e123")
    # round trips with the exterior module
    x = ExtElement(3, {(1, 2): 2, (3,): -1})
    assert L.to_ext(L.from_ext(x)) == x


def test_exterior_dga_verify_hirsch():
    for n in (2, 3):
        L = exterior_dga(n)
        ok, wit = verify_hirsch(L, trials=40, rng=random.Random(n))
        assert ok, wit


def test_cochain_dgas_verify_hirsch():
    ok, wit = verify_hirsch(cubical_cochain_dga(2), trials=40, rng=random.Random(0))
    assert ok, wit
    ok, wit = verify_hirsch(simplicial_cochain_dga(2), trials=40, rng=random.Random(1))
    assert ok, wit


def test_verify_hirsch_negative_control():
    L = exterior_dga(3)

    class Corrupt(HirschOps):
        def __init__(self, base):
            self.base = base
            self.cap = base.cap

        def E(self, p, q, els):
            v = self.base.E(p, q, els)
            if (p, q) == (1, 2):
                bump = sum(c for e in els for c in e.coords.values())
                v = v + bump * L.gen("e123")
            return v

    ok, wit = verify_hirsch(L, trials=60, rng=random.Random(3), ops=Corrupt(L.hirsch))
    assert not ok
    assert (wit["p"], wit["q"]) == (1, 2)


def test_json_round_trip_and_files(tmp_path):
    h = hopf_fixture()
    data = json.loads(json.dumps(h.to_json()))
    h2 = FiniteDga.from_json(data)
    assert h2.to_json() == h.to_json()
    path = tmp_path / "hopf.json"
    h.dump(path)
    assert FiniteDga.load(path).to_json() == h.to_json()


def test_cohomology_examples():
    L = exterior_dga(2)
    assert L.cohomology() == GradedAbGroup({0: (1, ()), 1: (2, ()), 2: (1, ())})


def test_solve_dx_degreewise():
    h = hopf_fixture()
    c = 2 * h.gen("x5")
    x = h.solve_dx(c)
    assert x is not None and h.d(x) == c
