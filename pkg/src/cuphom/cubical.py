"""Chains on the cubes I^n and the one-vertex torus T^n_1.

Faces of I^n are length-n words over {0, 1, I}; the degree of a face is its
number of I letters.  The structural operations are the Cartan-Serre
coproduct, the join (degree +1), the augmentation, and the boundary.  The
boundary convention is d(I) = 1 - 0 with Koszul signs over earlier I
letters; it is pinned down by d^2 = 0 together with the join/coproduct
boundary identities (see tests).
"""

from __future__ import annotations

from itertools import product

from .exterior import ExtElement, Monomial, perm_sign

LETTERS = "01I"


def face_degree(word: str) -> int:
    return word.count("I")


def face_min(word: str) -> str:
    return word.replace("I", "0")


def face_max(word: str) -> str:
    return word.replace("I", "1")


def leq_letterwise(a: str, b: str) -> bool:
    """Compare two vertex words (over {0,1}) letterwise."""
    return all(x <= y for x, y in zip(a, b))


def epsilon_face(word: str) -> int:
    """Augmentation: 1 on vertices, 0 on positive-degree faces."""
    return 0 if "I" in word else 1


def i_positions(word: str):
    return tuple(i + 1 for i, ch in enumerate(word) if ch == "I")


def boundary_face(word: str):
    """Cubical boundary as a list of (sign, word) pairs.

    d(I) = 1 - 0; the i-th I carries the Koszul sign over earlier I letters.
    """
    out = []
    seen_i = 0
    for pos, ch in enumerate(word):
        if ch != "I":
            continue
        sign = -1 if seen_i % 2 else 1
        out.append((sign, word[:pos] + "1" + word[pos + 1 :]))
        out.append((-sign, word[:pos] + "0" + word[pos + 1 :]))
        seen_i += 1
    return out


_LETTER_COPRODUCT = {
    "0": ((1, ("0", "0")),),
    "1": ((1, ("1", "1")),),
    "I": ((1, ("0", "I")), (1, ("I", "1"))),
}


def coproduct_face(word: str):
    """Cartan-Serre diagonal of one face: list of (sign, (front, back)).

    Letterwise rule 0 -> 0|0, 1 -> 1|1, I -> 0|I + I|1, tensor-distributed
    with Koszul signs.
    """
    terms = [(1, "", "")]
    for ch in word:
        new_terms = []
        for sign, front, back in terms:
            for s2, (f, b) in _LETTER_COPRODUCT[ch]:
                # Koszul: the new front letter passes the accumulated back part
                koszul = -1 if (f == "I" and face_degree(back) % 2) else 1
                new_terms.append((sign * s2 * koszul, front + f, back + b))
        terms = new_terms
    return [(s, (f, b)) for s, f, b in terms]


_JOIN_TABLE = {("0", "1"): 1, ("1", "0"): -1}


def join_faces(x: str, y: str):
    """Join of two faces: list of (sign, word), possibly empty.

    (x1..xn)*(y1..yn) = (-1)^{|x|} sum_i eps(y_<i) eps(x_>i)
                         x_<i (x_i * y_i) y_>i,
    where 0*1 = I and 1*0 = -I are the only nonzero letter joins.
    """
    if len(x) != len(y):
        raise ValueError("ambient mismatch in join")
    prefix = -1 if face_degree(x) % 2 else 1
    out = []
    for i in range(len(x)):
        s = _JOIN_TABLE.get((x[i], y[i]))
        if s is None:
            continue
        if "I" in y[:i] or "I" in x[i + 1 :]:
            continue
        out.append((prefix * s, x[:i] + "I" + y[i + 1 :]))
    return out


class CubChain:
    """Integer chain of tensor words of faces of I^n.

    terms maps tuples of face words (all of the same tensor length) to
    nonzero integers.  Immutable by convention.
    """

    __slots__ = ("n", "length", "terms")

    def __init__(self, n: int, terms=None, length: int | None = None):
        clean = {}
        for word, coeff in (terms or {}).items():
            if isinstance(word, str):
                word = (word,)
            word = tuple(word)
            for w in word:
                if len(w) != n or any(ch not in LETTERS for ch in w):
                    raise ValueError(f"bad face word {w!r} for ambient {n}")
            if length is None:
                length = len(word)
            elif len(word) != length:
                raise ValueError("mixed tensor lengths in one chain")
            if coeff:
                clean[word] = clean.get(word, 0) + coeff
        clean = {w: c for w, c in clean.items() if c}
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "length", length if length is not None else 1)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("CubChain is immutable")

    @classmethod
    def face(cls, word: str) -> "CubChain":
        return cls(len(word), {(word,): 1})

    @classmethod
    def top(cls, n: int) -> "CubChain":
        return cls.face("I" * n)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if self.n != other.n:
            raise ValueError("ambient mismatch")
        if self.terms and other.terms and self.length != other.length:
            raise ValueError("tensor length mismatch")
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms.get(w, 0) + c
        return CubChain(self.n, terms, self.length if self.terms else other.length)

    def __neg__(self):
        return CubChain(self.n, {w: -c for w, c in self.terms.items()}, self.length)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return CubChain(self.n, {w: k * c for w, c in self.terms.items()}, self.length)

    def __eq__(self, other):
        return (
            isinstance(other, CubChain)
            and self.n == other.n
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"CubChain({self.n}, 0)"
        bits = []
        for w in sorted(self.terms):
            c = self.terms[w]
            body = "|".join(w)
            bits.append(f"{'+' if c > 0 else '-'}{'' if abs(c) == 1 else abs(c)}{body}")
        return f"CubChain({self.n}, {' '.join(bits)})"

    def to_json(self):
        return {"|".join(w): c for w, c in sorted(self.terms.items())}

    @classmethod
    def from_json(cls, n: int, data) -> "CubChain":
        return cls(n, {tuple(k.split("|")): c for k, c in data.items()})

    def boundary(self) -> "CubChain":
        """Tensor-word boundary with Koszul signs across factors."""
        terms = {}
        for word, coeff in self.terms.items():
            left_deg = 0
            for slot, w in enumerate(word):
                koszul = -1 if left_deg % 2 else 1
                for s, dw in boundary_face(w):
                    nw = word[:slot] + (dw,) + word[slot + 1 :]
                    terms[nw] = terms.get(nw, 0) + koszul * s * coeff
                left_deg += face_degree(w)
        return CubChain(self.n, terms, self.length)


def coproduct(c: CubChain) -> CubChain:
    """Cartan-Serre coproduct of a word-length-1 chain.

    >>> coproduct(CubChain.face("I")).terms
    {('0', 'I'): 1, ('I', '1'): 1}
    """
    if c.length != 1:
        raise ValueError("coproduct is defined on word-length-1 chains")
    terms = {}
    for (w,), coeff in c.terms.items():
        for s, pair in coproduct_face(w):
            terms[pair] = terms.get(pair, 0) + s * coeff
    return CubChain(c.n, terms, 2)


def join(x, y) -> CubChain:
    """Join of two faces or word-length-1 chains; degree +1, bilinear."""
    if isinstance(x, str):
        x = CubChain.face(x)
    if isinstance(y, str):
        y = CubChain.face(y)
    if x.length != 1 or y.length != 1:
        raise ValueError("join is defined on word-length-1 chains")
    if x.n != y.n:
        raise ValueError("ambient mismatch")
    terms = {}
    for (wx,), cx in x.terms.items():
        for (wy,), cy in y.terms.items():
            for s, w in join_faces(wx, wy):
                terms[(w,)] = terms.get((w,), 0) + s * cx * cy
    return CubChain(x.n, terms, 1)


def iterated_coproduct(n: int, k: int) -> CubChain:
    """The (k-1)-fold coproduct of the top cell of I^n, by direct enumeration.

    Terms are the chains F_1|...|F_k with min F_1 = 0^n, max F_k = 1^n and
    max F_i = min F_{i+1}; the sign is the sign of the permutation formed by
    concatenating the I-positions of F_1, ..., F_k.  Cross-checked against
    the recursive coproduct in the test suite.
    """
    if k < 1:
        raise ValueError("fold count must be >= 1")
    terms = {}
    for stages in product(range(k), repeat=n):
        words = []
        for stage in range(k):
            word = "".join(
                "I" if s == stage else ("0" if s > stage else "1") for s in stages
            )
            words.append(word)
        order = sorted(range(n), key=lambda j: (stages[j], j))
        terms[tuple(words)] = perm_sign(order)
    return CubChain(n, terms, k)


def iterated_coproduct_chain(c: CubChain, k: int) -> CubChain:
    """Recursive k-factor coproduct of a word-length-1 chain (left-grown rake)."""
    if k < 1:
        raise ValueError("fold count must be >= 1")
    if c.length != 1:
        raise ValueError("expects a word-length-1 chain")
    terms = dict(c.terms)
    for _ in range(k - 1):
        new_terms = {}
        for word, coeff in terms.items():
            # expand the final factor; coassociativity makes the choice moot
            for s, (f, b) in coproduct_face(word[-1]):
                koszul = 1
                nw = word[:-1] + (f, b)
                new_terms[nw] = new_terms.get(nw, 0) + koszul * s * coeff
        terms = new_terms
    return CubChain(c.n, terms, k)


def face_join(f0: str, f1: str) -> CubChain:
    """Join of faces with max F0 <= min F1, via the face/edge description.

    The result is (-1)^{|F0|} times the sum of all faces G of dimension
    |F0| + |F1| + 1 with min F0 <= min G, max G <= max F1, such that G meets
    the connecting face F (the one with max F0 = min F, max F = min F1) in
    an edge that is a back edge of F and a front edge of G.  Agrees with
    `join` whenever the precondition holds.
    """
    if len(f0) != len(f1):
        raise ValueError("ambient mismatch")
    lo, hi = face_max(f0), face_min(f1)
    if not leq_letterwise(lo, hi):
        raise ValueError("precondition max F0 <= min F1 fails")
    n = len(f0)
    connecting = "".join(
        "I" if lo[i] != hi[i] else lo[i] for i in range(n)
    )
    sign = -1 if face_degree(f0) % 2 else 1
    target_dim = face_degree(f0) + face_degree(f1) + 1
    terms = {}
    min0, max1 = face_min(f0), face_max(f1)
    for g in all_faces(n):
        if face_degree(g) != target_dim:
            continue
        if not leq_letterwise(min0, face_min(g)):
            continue
        if not leq_letterwise(face_max(g), max1):
            continue
        inter = _face_intersection(g, connecting)
        if inter is None or face_degree(inter) != 1:
            continue
        if inter in back_edges(connecting) and inter in front_edges(g):
            terms[(g,)] = sign
    return CubChain(n, terms, 1)


def _face_intersection(a: str, b: str):
    """Intersection of two faces as a face, or None if empty."""
    out = []
    for x, y in zip(a, b):
        if x == y:
            out.append(x)
        elif x == "I":
            out.append(y)
        elif y == "I":
            out.append(x)
        else:
            return None
    return "".join(out)


def back_edges(face: str):
    """Edges replacing the I-substring by zeroes, one I, then ones."""
    pos = [i for i, ch in enumerate(face) if ch == "I"]
    out = []
    for k in range(len(pos)):
        w = list(face)
        for j, p in enumerate(pos):
            w[p] = "0" if j < k else ("I" if j == k else "1")
        out.append("".join(w))
    return out


def front_edges(face: str):
    """Edges replacing the I-substring by ones, one I, then zeroes."""
    pos = [i for i, ch in enumerate(face) if ch == "I"]
    out = []
    for k in range(len(pos)):
        w = list(face)
        for j, p in enumerate(pos):
            w[p] = "1" if j < k else ("I" if j == k else "0")
        out.append("".join(w))
    return out


def all_faces(n: int):
    """All faces of I^n in canonical order (0 < 1 < I letterwise, then lex)."""
    return ["".join(w) for w in product("01I", repeat=n)]


def faces_of_degree(n: int, d: int):
    return [w for w in all_faces(n) if face_degree(w) == d]


def project_torus(c: CubChain):
    """Quotient I^n -> T^n_1: a face maps to the subset of its I-positions.

    Word-length-1 chains land in the exterior algebra; longer tensor words
    give a dict keyed by tuples of monomials.
    """
    if c.length == 1:
        terms = {}
        for (w,), coeff in c.terms.items():
            m = Monomial(i_positions(w))
            terms[m] = terms.get(m, 0) + coeff
        return ExtElement(c.n, terms)
    terms = {}
    for word, coeff in c.terms.items():
        key = tuple(Monomial(i_positions(w)) for w in word)
        terms[key] = terms.get(key, 0) + coeff
    return {k: v for k, v in terms.items() if v}
