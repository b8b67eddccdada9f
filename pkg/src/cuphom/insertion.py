"""Graph realizations, 1-regularity, insertion products and insertion powers.

A family of subsets of {1..n} realizes a graph: each subset contributes the
path through its elements in increasing order, and equal labels are
identified.  The family is 1-regular when that (multi)graph is a tree; the
insertion product j_m of basis monomials is +-e^(union) exactly on
1-regular families, with the sign given by decomposing into the operations
E_{1,k} of the one-vertex torus.
"""

from __future__ import annotations

from itertools import product

from .exterior import ExtElement, Monomial
from .hirsch import e1p_torus


class SubsetFamily:
    """An unordered family of nonempty, pairwise distinct subsets of {1..n}."""

    def __init__(self, sets):
        clean = []
        for s in sets:
            m = s if isinstance(s, Monomial) else Monomial(sorted(s))
            if not m:
                raise ValueError("subsets must be nonempty")
            clean.append(m)
        if len(set(clean)) != len(clean):
            raise ValueError("subsets must be pairwise distinct")
        self.sets = tuple(sorted(clean, key=Monomial.sort_key))

    def __repr__(self):
        return f"SubsetFamily({[tuple(s) for s in self.sets]})"

    def realization(self) -> "RealizationGraph":
        return RealizationGraph(self.sets)


class RealizationGraph:
    """The realization multigraph of a list of subsets."""

    def __init__(self, sets):
        self.sets = tuple(tuple(s) for s in sets)
        self.vertices = sorted(set().union(*[set(s) for s in sets]) if sets else set())
        self.edges = []
        for s in self.sets:
            for a, b in zip(s, s[1:]):
                self.edges.append((a, b))

    def is_tree(self) -> bool:
        """Connected and |E| = |V| - 1 (multi-edges counted separately)."""
        if not self.vertices:
            return False
        if len(self.edges) != len(self.vertices) - 1:
            return False
        adj = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)


def is_one_regular(family, oracle: bool = False) -> bool:
    """True iff the realization graph is a tree.

    The default route is the greedy procedure: grow the family one subset
    at a time, each new subset meeting the union of the chosen ones in
    exactly one element.  `oracle=True` runs the direct tree check instead
    (kept as an independent test oracle).
    """
    if isinstance(family, SubsetFamily):
        sets = list(family.sets)
    else:
        sets = [s if isinstance(s, Monomial) else Monomial(sorted(s)) for s in family]
        if len(set(sets)) != len(sets):
            raise ValueError("subsets must be pairwise distinct")
    if not sets:
        return False
    if oracle:
        return RealizationGraph(sets).is_tree()
    remaining = list(sets)
    union = set(remaining.pop(0))
    while remaining:
        for i, s in enumerate(remaining):
            if len(union & set(s)) == 1:
                union |= set(s)
                remaining.pop(i)
                break
        else:
            return False
    return True


def _components(sets):
    """Connected components of the realization, as lists of subsets."""
    sets = list(sets)
    comps = []
    used = [False] * len(sets)
    for i in range(len(sets)):
        if used[i]:
            continue
        comp = [i]
        used[i] = True
        verts = set(sets[i])
        grew = True
        while grew:
            grew = False
            for j in range(len(sets)):
                if not used[j] and verts & set(sets[j]):
                    used[j] = True
                    comp.append(j)
                    verts |= set(sets[j])
                    grew = True
        comps.append([sets[j] for j in comp])
    return comps


def _j_monomials(monos, rank: int) -> ExtElement:
    """j_m on basis monomials via the recursive E_{1,k} decomposition."""
    if len(monos) == 1:
        return ExtElement(rank, {monos[0]: 1})
    head, rest = monos[0], monos[1:]
    comps = _components(rest)
    glue = []
    for comp in comps:
        shared = set(head) & set().union(*[set(s) for s in comp])
        if len(shared) != 1:
            return ExtElement.zero(rank)
        glue.append((shared.pop(), comp))
    glue.sort()
    sign = 1
    args = []
    for _, comp in glue:
        val = _j_monomials(comp, rank)
        if val.is_zero():
            return ExtElement.zero(rank)
        ((mono, coeff),) = val.terms.items()
        sign *= coeff
        args.append(mono)
    out = e1p_torus(Monomial(head), args)
    if out.is_zero():
        return ExtElement.zero(rank)
    return ExtElement(rank, {m: sign * c for m, c in out.terms.items()})


def insertion_product(elements) -> ExtElement:
    """The symmetric multilinear insertion product j_m, degree 1 - m.

    On monomials, +-e^(union of the subsets) when the family is 1-regular
    and 0 otherwise; inputs must be homogeneous of odd degree.

    >>> e = lambda *ix: ExtElement.basis(7, ix)
    >>> insertion_product([e(1,2,3), e(3,4,5)]).text()
    'e12345'
    >>> insertion_product([e(1,2,3), e(4,5,6)]).text()
    '0'
    """
    if not elements:
        raise ValueError("need at least one element")
    rank = elements[0].rank
    ring = elements[0].ring
    for el in elements:
        if el.rank != rank:
            raise ValueError("ambient rank mismatch")
        if el.is_zero():
            return ExtElement.zero(rank, ring)
        if el.degree % 2 == 0:
            raise ValueError("insertion product requires odd-degree inputs")
    out = ExtElement.zero(rank, ring)
    for combo in product(*[list(e.terms.items()) for e in elements]):
        coeff = 1
        for _, c in combo:
            coeff = coeff * c
        val = _j_monomials([m for m, _ in combo], rank)
        if not val.is_zero():
            if ring == "Q":
                val = val.rationalize()
            out = out + coeff * val
    return out


def one_regular_families(monos, m: int):
    """All 1-regular m-element subfamilies of a list of distinct monomials.

    Incremental DFS: a family is grown one monomial at a time, each new one
    meeting the union of the current ones in exactly one element (this is
    exactly the greedy 1-regularity invariant, so every intermediate state
    is 1-regular and dead branches are pruned immediately).
    """
    monos = list(monos)
    found = set()
    seen_states = set()

    def grow(chosen, union):
        key = frozenset(chosen)
        if key in seen_states:
            return
        seen_states.add(key)
        if len(chosen) == m:
            found.add(key)
            return
        for j in range(len(monos)):
            if j in chosen:
                continue
            if len(union & set(monos[j])) == 1:
                grow(chosen | {j}, union | set(monos[j]))

    if m == 1:
        return [(i,) for i in range(len(monos))]
    for i in range(len(monos)):
        grow(frozenset([i]), set(monos[i]))
    return [tuple(sorted(k)) for k in sorted(found, key=sorted)]


def insertion_power(a: ExtElement, m: int) -> ExtElement:
    """The m-th insertion power a^(o m) = j_m(a, ..., a) / m!.

    Computed as the sum over unordered 1-regular m-element families of
    distinct monomials of a, of the product of their coefficients times the
    insertion product; integral whenever a is.

    >>> a = ExtElement(7, {(1,2,3): 1, (3,4,5): 1, (5,6,7): 1})
    >>> insertion_power(a, 2).text()
    'e12345 + e34567'
    >>> insertion_power(a, 3).text()
    'e1234567'
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if a.is_zero():
        return ExtElement.zero(a.rank, a.ring)
    if a.degree % 2 == 0:
        raise ValueError("insertion powers require odd degree")
    if m == 1:
        return a
    monos = a.monomials()
    out = ExtElement.zero(a.rank, a.ring)
    for idxs in one_regular_families(monos, m):
        coeff = 1
        for i in idxs:
            coeff = coeff * a.terms[monos[i]]
        val = _j_monomials([monos[i] for i in idxs], a.rank)
        if not val.is_zero():
            if a.ring == "Q":
                val = val.rationalize()
            out = out + coeff * val
    return out
