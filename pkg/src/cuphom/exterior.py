"""Exterior algebra Lambda*(Z^n) with exact integer/rational arithmetic.

Basis monomials e^I are indexed by strictly increasing subsets I of
{1, ..., n}.  All signs are computed by inversion counting; nothing is
cached or approximated.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
import json
import re


class ScalarRingError(TypeError):
    """Raised when elements over Z and over Q are mixed."""


class RankMismatchError(ValueError):
    """Raised when operands live in exterior algebras of different rank."""


def inversions(seq) -> int:
    """Number of inversions of a sequence of distinct comparables."""
    count = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                count += 1
    return count


def perm_sign(seq) -> int:
    """Sign of the permutation sorting `seq` (entries distinct)."""
    return -1 if inversions(seq) % 2 else 1


class Monomial(tuple):
    """A basis monomial e^I, stored as a strictly increasing tuple of indices.

    >>> Monomial((1, 3, 5)).degree
    3
    >>> Monomial(())
    Monomial()
    """

    def __new__(cls, indices=()):
        t = tuple(indices)
        for a, b in zip(t, t[1:]):
            if a >= b:
                raise ValueError(f"indices must be strictly increasing, got {t}")
        if t and t[0] < 1:
            raise ValueError(f"indices must be >= 1, got {t}")
        return super().__new__(cls, t)

    @property
    def degree(self) -> int:
        return len(self)

    def sort_key(self):
        # canonical order: length first, then lexicographic
        return (len(self), self)

    def __repr__(self):
        return f"Monomial({','.join(map(str, self))})"


def _coerce_coeff(c, ring: str):
    if ring == "Z":
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise ScalarRingError(f"non-integer coefficient {c} in Z mode")
            return int(c)
        if not isinstance(c, int):
            raise ScalarRingError(f"coefficient {c!r} is not an integer")
        return c
    if ring == "Q":
        return Fraction(c)
    raise ValueError(f"unknown scalar ring {ring!r}; use 'Z' or 'Q'")


class ExtElement:
    """A finite Z- or Q-linear combination of exterior monomials.

    Immutable; all operations return new elements.  `ring` is 'Z' or 'Q';
    mixing the two modes raises ScalarRingError rather than coercing.
    """

    __slots__ = ("rank", "ring", "terms")

    def __init__(self, rank: int, terms=None, ring: str = "Z"):
        if rank < 0:
            raise ValueError("rank must be >= 0")
        if ring not in ("Z", "Q"):
            raise ValueError(f"unknown scalar ring {ring!r}")
        clean = {}
        for mono, coeff in (terms or {}).items():
            if not isinstance(mono, Monomial):
                mono = Monomial(mono)
            if mono and mono[-1] > rank:
                raise ValueError(f"monomial {mono} exceeds ambient rank {rank}")
            coeff = _coerce_coeff(coeff, ring)
            if coeff:
                clean[mono] = coeff
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *args):
        raise AttributeError("ExtElement is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, rank: int, ring: str = "Z") -> "ExtElement":
        return cls(rank, {}, ring)

    @classmethod
    def basis(cls, rank: int, indices, coeff=1, ring: str = "Z") -> "ExtElement":
        return cls(rank, {Monomial(indices): coeff}, ring)

    @classmethod
    def unit(cls, rank: int, ring: str = "Z") -> "ExtElement":
        return cls.basis(rank, (), 1, ring)

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        degs = {m.degree for m in self.terms}
        return len(degs) <= 1

    @property
    def degree(self):
        """Degree of a homogeneous element; None for 0; error if mixed."""
        degs = {m.degree for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs.pop()

    def coeff(self, indices):
        mono = indices if isinstance(indices, Monomial) else Monomial(indices)
        zero = 0 if self.ring == "Z" else Fraction(0)
        return self.terms.get(mono, zero)

    def monomials(self):
        return sorted(self.terms, key=Monomial.sort_key)

    def rationalize(self) -> "ExtElement":
        return ExtElement(self.rank, dict(self.terms), "Q")

    def try_integral(self):
        """Return the same element over Z, or None if a denominator survives."""
        if self.ring == "Z":
            return self
        if any(Fraction(c).denominator != 1 for c in self.terms.values()):
            return None
        return ExtElement(self.rank, {m: int(c) for m, c in self.terms.items()}, "Z")

    # -- ring structure ---------------------------------------------------

    def _check_compatible(self, other: "ExtElement"):
        if self.rank != other.rank:
            raise RankMismatchError(f"rank {self.rank} vs {other.rank}")
        if self.ring != other.ring:
            raise ScalarRingError(f"ring {self.ring} vs {other.ring}")

    def __add__(self, other):
        self._check_compatible(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return ExtElement(self.rank, terms, self.ring)

    def __neg__(self):
        return ExtElement(self.rank, {m: -c for m, c in self.terms.items()}, self.ring)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        if isinstance(scalar, ExtElement):
            return NotImplemented
        return ExtElement(
            self.rank, {m: scalar * c for m, c in self.terms.items()}, self.ring
        )

    def __mul__(self, other):
        if isinstance(other, ExtElement):
            return wedge(self, other)
        return self.__rmul__(other)

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        return (
            isinstance(other, ExtElement)
            and self.rank == other.rank
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.rank, self.ring, frozenset(self.terms.items())))

    # -- serialization ----------------------------------------------------

    def __repr__(self):
        return f"ExtElement({self.rank}, {self.text()!r}, ring={self.ring!r})"

    def text(self) -> str:
        """Text form, e.g. 'e123 + 2 e345 - 10 e567'; 'e{1,2,13}' above rank 9."""
        if not self.terms:
            return "0"
        parts = []
        for mono in self.monomials():
            c = self.terms[mono]
            if not mono:
                body = "e0" if self.rank < 10 else "e{}"
            elif self.rank < 10:
                body = "e" + "".join(map(str, mono))
            else:
                body = "e{" + ",".join(map(str, mono)) + "}"
            mag = abs(c)
            coeff_str = "" if mag == 1 else f"{mag} "
            sign = "-" if c < 0 else "+"
            parts.append((sign, f"{coeff_str}{body}"))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self):
        return [
            {"coeff": str(c) if self.ring == "Q" else c, "subset": list(m)}
            for m, c in sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())
        ]

    @classmethod
    def from_json(cls, rank: int, data, ring: str = "Z") -> "ExtElement":
        terms = {}
        for entry in data:
            mono = Monomial(entry["subset"])
            c = entry["coeff"]
            c = Fraction(c) if ring == "Q" else int(c)
            terms[mono] = terms.get(mono, 0) + c
        return cls(rank, terms, ring)

    def json_text(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?P<coeff>\d+(?:/\d+)?)?\s*"
    r"(?:e(?:\{(?P<braced>[\d,\s]*)\}|(?P<digits>\d+)))\s*"
)


def parse_element(rank: int, text: str, ring: str = "Z") -> ExtElement:
    """Parse the text format of ExtElement.text.

    Single-digit index runs ('e123') address indices 1-9; the braced form
    ('e{1,2,13}') is required to address indices >= 10.  'e0' and 'e{}' both
    denote the empty monomial; a bare '0' is the zero element.

    >>> parse_element(7, "e123 + 2 e345 - 10 e567").text()
    'e123 + 2 e345 - 10 e567'
    """
    text = text.strip()
    if text in ("0", ""):
        return ExtElement.zero(rank, ring)
    terms = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.start() != pos:
            raise ValueError(f"cannot parse element at {text[pos:]!r}")
        sign_str, coeff_str = m.group("sign"), m.group("coeff")
        if not first and sign_str is None:
            raise ValueError(f"missing +/- before {text[m.start():]!r}")
        sign = -1 if sign_str == "-" else 1
        if coeff_str is None:
            coeff = 1
        elif "/" in coeff_str:
            if ring != "Q":
                raise ScalarRingError("fractional coefficient in Z mode")
            coeff = Fraction(coeff_str)
        else:
            coeff = int(coeff_str)
        if m.group("braced") is not None:
            idx = [int(s) for s in m.group("braced").replace(" ", "").split(",") if s]
        else:
            digits = m.group("digits")
            idx = [] if digits == "0" else [int(ch) for ch in digits]
            if digits != "0" and "0" in digits:
                raise ValueError(f"index 0 in {digits!r}")
        mono = Monomial(sorted(idx))
        if len(set(idx)) != len(idx):
            continue  # repeated index: the monomial is zero
        s = perm_sign(idx)
        terms[mono] = terms.get(mono, 0) + sign * s * coeff
        pos = m.end()
        first = False
    return ExtElement(rank, terms, ring)


# -- the three structural operations --------------------------------------


def merge_sign(left, right):
    """(sign, merged) for e^left ^ e^right on disjoint increasing tuples."""
    seq = tuple(left) + tuple(right)
    return perm_sign(seq), Monomial(sorted(seq))


def wedge(x: ExtElement, y: ExtElement) -> ExtElement:
    """Exterior product.  Bilinear, associative, graded-commutative.

    >>> e = lambda *ix: ExtElement.basis(5, ix)
    >>> wedge(e(1), e(2)).text()
    'e12'
    >>> wedge(e(2), e(1)).text()
    '-e12'
    """
    x._check_compatible(y)
    terms = {}
    for mx, cx in x.terms.items():
        sx = set(mx)
        for my, cy in y.terms.items():
            if sx & set(my):
                continue
            sign, merged = merge_sign(mx, my)
            terms[merged] = terms.get(merged, 0) + sign * cx * cy
    return ExtElement(x.rank, terms, x.ring)


def contract(a: ExtElement, w: ExtElement) -> ExtElement:
    """Contraction iota_a of w against a degree-3 class a.

    On a monomial e^{s_1...s_k} the result sums, over position triples
    i1 < i2 < i3, the coefficient of a on {s_i1, s_i2, s_i3} times
    (-1)^(i1+i2+i3), deleting those three factors (positions 1-based).

    >>> a = ExtElement.basis(4, (1, 2, 3))
    >>> contract(a, ExtElement.basis(4, (1, 2, 3, 4))).text()
    'e4'
    """
    a._check_compatible(w)
    if a.degree not in (3, None):
        raise ValueError("contraction class must be homogeneous of degree 3")
    terms = {}
    for mw, cw in w.terms.items():
        k = len(mw)
        for pos in combinations(range(k), 3):
            triple = Monomial(mw[p] for p in pos)
            ca = a.terms.get(triple)
            if not ca:
                continue
            # positions are 1-based in the sign rule
            sign = -1 if (pos[0] + pos[1] + pos[2] + 3) % 2 else 1
            rest = Monomial(v for i, v in enumerate(mw) if i not in pos)
            terms[rest] = terms.get(rest, 0) + sign * ca * cw
    return ExtElement(w.rank, terms, w.ring)


def hodge_star(w: ExtElement) -> ExtElement:
    """Hodge star: e^I -> sign * e^(I complement), with e^I ^ *e^I = e^{1..n}.

    >>> hodge_star(ExtElement.basis(3, (2,))).text()
    '-e13'
    """
    n = w.rank
    full = range(1, n + 1)
    terms = {}
    for m, c in w.terms.items():
        comp = Monomial(i for i in full if i not in m)
        sign, _ = merge_sign(m, comp)
        terms[comp] = terms.get(comp, 0) + sign * c
    return ExtElement(n, terms, w.ring)
