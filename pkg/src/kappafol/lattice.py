"""Finite lattices: enumeration, distributivity checking, filters,
quotients, prime-filter representations, and the ordinal pairing map at
finite arguments.

Lattice elements are 0..n-1. The order is any partial order on them for
which all binary meets and joins exist; the constructor derives the
meet/join tables and the top/bottom elements and validates the lattice
axioms against the order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "DistReport", "FinLattice", "LatFilter", "all_filters", "all_lattices",
    "boolean_square", "chain", "check_distributivity", "is_distributive",
    "m3", "n5", "pairing", "prime_filters", "quotient_by_filter",
    "representation_map",
]


class FinLattice:
    """A finite lattice given by a partial order on 0..n-1."""

    def __init__(self, n, leq_pairs):
        if n < 1:
            raise ValueError("a lattice needs at least one element")
        self.n = n
        self.elements = tuple(range(n))
        rel = {(a, a) for a in self.elements}
        for a, b in leq_pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError("order pair (%r, %r) out of range" % (a, b))
            rel.add((a, b))
        for a, b in rel:
            if a != b and (b, a) in rel:
                raise ValueError("order is not antisymmetric at %d, %d" % (a, b))
        for a, b in list(rel):
            for c in self.elements:
                if (b, c) in rel and (a, c) not in rel:
                    raise ValueError(
                        "order is not transitive: %d <= %d <= %d" % (a, b, c)
                    )
        self._leq = frozenset(rel)
        self._meet = {}
        self._join = {}
        for a in self.elements:
            for b in self.elements:
                self._meet[(a, b)] = self._bound(a, b, lower=True)
                self._join[(a, b)] = self._bound(a, b, lower=False)
        self.bottom = 0
        self.top = 0
        for a in self.elements:
            self.bottom = self.meet(self.bottom, a)
            self.top = self.join(self.top, a)

    def _bound(self, a, b, lower):
        if lower:
            cands = [c for c in self.elements if (c, a) in self._leq and (c, b) in self._leq]
            best = [c for c in cands if all((d, c) in self._leq for d in cands)]
        else:
            cands = [c for c in self.elements if (a, c) in self._leq and (b, c) in self._leq]
            best = [c for c in cands if all((c, d) in self._leq for d in cands)]
        if len(best) != 1:
            raise ValueError(
                "elements %d, %d lack a %s" % (a, b, "meet" if lower else "join")
            )
        return best[0]

    def leq(self, a, b):
        return (a, b) in self._leq

    def meet(self, a, b):
        return self._meet[(a, b)]

    def join(self, a, b):
        return self._join[(a, b)]

    def meet_all(self, items):
        out = self.top
        for a in items:
            out = self.meet(out, a)
        return out

    def join_all(self, items):
        out = self.bottom
        for a in items:
            out = self.join(out, a)
        return out

    def complement(self, a):
        """The least complement of `a`, or None."""
        cands = [
            b for b in self.elements
            if self.meet(a, b) == self.bottom and self.join(a, b) == self.top
        ]
        return min(cands) if cands else None

    def pairs(self):
        return sorted(self._leq)

    def covers(self):
        out = []
        for a, b in self.pairs():
            if a == b:
                continue
            if not any(
                c != a and c != b and self.leq(a, c) and self.leq(c, b)
                for c in self.elements
            ):
                out.append((a, b))
        return out

    def canonical_key(self):
        """Isomorphism invariant: the least relabeling of the order."""
        strict = [(a, b) for a, b in self.pairs() if a != b]
        best = None
        for perm in itertools.permutations(self.elements):
            key = tuple(sorted((perm[a], perm[b]) for a, b in strict))
            if best is None or key < best:
                best = key
        return best

    def __repr__(self):
        return "FinLattice(%d, %r)" % (self.n, [p for p in self.covers()])


def chain(n):
    return FinLattice(n, [(i, j) for i in range(n) for j in range(i, n)])


def boolean_square():
    """The four-element Boolean algebra: bottom 0, atoms 1 and 2, top 3."""
    return FinLattice(4, [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)])


def m3():
    """The diamond: three incomparable atoms. Modular, not distributive."""
    return FinLattice(5, [(0, a) for a in (1, 2, 3, 4)] + [(a, 4) for a in (1, 2, 3)])


def n5():
    """The pentagon: 0 < 1 < 2 < 4 and 0 < 3 < 4. Not modular."""
    return FinLattice(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 4), (2, 4), (3, 4)])


def all_lattices(n):
    """All lattices with n elements, one per isomorphism class.

    Enumerates the transitive strict orders on a fixed linear extension
    (pairs only point upward), keeps those where all meets and joins
    exist, and dedupes by the least relabeling."""
    if n < 1:
        return []
    ups = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    seen = set()
    for mask in range(1 << len(ups)):
        rel = {ups[k] for k in range(len(ups)) if mask >> k & 1}
        if any((a, b) in rel and (b, c) in rel and (a, c) not in rel
               for a, b in rel for c in range(n)):
            continue
        try:
            lat = FinLattice(n, rel)
        except ValueError:
            continue
        key = lat.canonical_key()
        if key not in seen:
            seen.add(key)
            out.append(lat)
    return out


def is_distributive(lattice):
    L = lattice
    return all(
        L.meet(a, L.join(b, c)) == L.join(L.meet(a, b), L.meet(a, c))
        for a in L.elements for b in L.elements for c in L.elements
    )


@dataclass
class DistReport:
    ok: bool
    law_witness: tuple = None
    tt_witness: dict = None


def check_distributivity(lattice, gamma, height=None):
    """Check the gamma-ary distributive law and the propositional
    transfinite-transitivity property on the full gamma-branching tree of
    the given height (default gamma).

    The law: a MEET join(b_0..b_{gamma-1}) <= join of (a MEET b_i).
    The tree property: whenever every node f satisfies
    a_f <= join over children g of a_g, the root satisfies
    a_root <= join over leaves f of meet(a_{f|0}, .., a_f).

    Returns the first counterexample in lexicographic assignment order."""
    L = lattice
    if gamma < 1:
        raise ValueError("gamma must be at least 1")
    if height is None:
        height = gamma
    for a in L.elements:
        for bs in itertools.product(L.elements, repeat=gamma):
            lhs = L.meet(a, L.join_all(bs))
            rhs = L.join_all(L.meet(a, b) for b in bs)
            if not L.leq(lhs, rhs):
                return DistReport(False, law_witness=(a, bs))
    nodes = [()]
    for d in range(1, height + 1):
        nodes += list(itertools.product(range(gamma), repeat=d))
    leaves = [f for f in nodes if len(f) == height]

    def assign(i, current):
        if i == len(nodes):
            root = current[()]
            bound = L.join_all(
                L.meet_all(current[f[:k]] for k in range(height + 1)) for f in leaves
            )
            if not L.leq(root, bound):
                return dict(current)
            return None
        f = nodes[i]
        for v in L.elements:
            current[f] = v
            bad = False
            if f and f[-1] == gamma - 1:
                parent = f[:-1]
                up = L.join_all(current[parent + (j,)] for j in range(gamma))
                if not L.leq(current[parent], up):
                    bad = True
            if not bad:
                found = assign(i + 1, current)
                if found is not None:
                    return found
            del current[f]
        return None

    witness = assign(0, {})
    if witness is not None:
        return DistReport(False, tt_witness=witness)
    return DistReport(True)


@dataclass(frozen=True)
class LatFilter:
    carrier: frozenset
    kind: str = "filter"

    def validate(self, lattice):
        L = lattice
        cs = self.carrier
        if not cs:
            raise ValueError("a filter is nonempty")
        for a in cs:
            for b in L.elements:
                if L.leq(a, b) and b not in cs:
                    raise ValueError("filter is not upward closed at %d" % a)
        for a in cs:
            for b in cs:
                if L.meet(a, b) not in cs:
                    raise ValueError("filter is not meet closed")
        if self.kind == "prime filter":
            if not self.proper(lattice):
                raise ValueError("a prime filter is proper")
            for a in L.elements:
                for b in L.elements:
                    if L.join(a, b) in cs and a not in cs and b not in cs:
                        raise ValueError("filter is not prime at join(%d, %d)" % (a, b))
        return self

    def proper(self, lattice):
        return lattice.bottom not in self.carrier


def all_filters(lattice):
    """Every filter (nonempty, upward and meet closed), including the
    improper one, as frozensets in a deterministic order."""
    L = lattice
    out = []
    for mask in range(1, 1 << L.n):
        cs = frozenset(a for a in L.elements if mask >> a & 1)
        if L.top not in cs:
            continue
        if any(L.leq(a, b) and b not in cs for a in cs for b in L.elements):
            continue
        if any(L.meet(a, b) not in cs for a in cs for b in cs):
            continue
        out.append(cs)
    return sorted(out, key=lambda cs: (len(cs), sorted(cs)))


def prime_filters(lattice):
    """Proper filters F with: join(a, b) in F implies a in F or b in F."""
    L = lattice
    out = []
    for cs in all_filters(lattice):
        if L.bottom in cs:
            continue
        if any(
            L.join(a, b) in cs and a not in cs and b not in cs
            for a in L.elements for b in L.elements
        ):
            continue
        out.append(cs)
    return out


def representation_map(lattice):
    """e -> { indices of prime filters containing e }. Returns the map
    and whether it is injective (an embedding into a powerset lattice).
    Meet and join preservation hold for any prime-filter family and are
    asserted here."""
    L = lattice
    pf = prime_filters(lattice)
    mapping = {e: frozenset(i for i, F in enumerate(pf) if e in F) for e in L.elements}
    for a in L.elements:
        for b in L.elements:
            if mapping[L.meet(a, b)] != mapping[a] & mapping[b]:
                raise AssertionError("prime filters failed to preserve a meet")
            if mapping[L.join(a, b)] != mapping[a] | mapping[b]:
                raise AssertionError("prime filters failed to preserve a join")
    injective = len(set(mapping.values())) == L.n
    return mapping, injective


def quotient_by_filter(lattice, flt):
    """Collapse a (proper, principal since the lattice is finite) filter
    to the top: a == b iff a MEET u = b MEET u for u the generator.

    Returns (quotient lattice, theta) with theta the element map onto
    0..m-1. Requires a distributive lattice; the quotient map fails to
    respect joins otherwise, and ValueError is raised."""
    L = lattice
    cs = flt.carrier if isinstance(flt, LatFilter) else frozenset(flt)
    LatFilter(cs).validate(L)
    if L.bottom in cs:
        raise ValueError("cannot collapse the improper filter")
    u = L.meet_all(cs)
    reps = sorted({L.meet(a, u) for a in L.elements})
    index = {r: i for i, r in enumerate(reps)}
    pairs = [
        (index[a], index[b]) for a in reps for b in reps if L.leq(a, b)
    ]
    K = FinLattice(len(reps), pairs)
    theta = {a: index[L.meet(a, u)] for a in L.elements}
    for a in L.elements:
        for b in L.elements:
            if theta[L.meet(a, b)] != K.meet(theta[a], theta[b]) or \
               theta[L.join(a, b)] != K.join(theta[a], theta[b]):
                raise ValueError(
                    "quotient by this filter is not a lattice map; "
                    "the lattice is not distributive"
                )
    return K, theta


# ------------------------------------------------------------ ordinal pairing


@lru_cache(maxsize=None)
def _sup(n):
    """1 + the largest pairing value on arguments below n (0 when n=0)."""
    if n == 0:
        return 0
    return max(pairing(b, c) + 1 for b in range(n) for c in range(n))


@lru_cache(maxsize=None)
def pairing(beta, gamma):
    """The order-preserving pairing map at finite arguments: injective,
    monotone in both slots, and pairing(beta, gamma) >= gamma."""
    if beta < 0 or gamma < 0:
        raise ValueError("pairing is defined on naturals")
    if beta < gamma:
        return _sup(gamma) + beta
    return _sup(beta) + beta + gamma
