"""Exact arithmetic for finite abelian groups of bounded exponent.

A group is a direct sum of cyclic factors Z/m_i; elements and characters are
coefficient vectors against that basis.  Torus values are reduced rationals
in Q/Z.  Subgroups carry a canonical echelonized generating lattice computed
once, giving fast membership tests, orders, annihilators and quotient
presentations via Smith normal form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product

from . import intlinalg

MAX_NATIVE = 2**63 - 1


class ShapeError(ValueError):
    """Operands belong to different group shapes."""


class GuardExceeded(RuntimeError):
    """A size guard refused the computation (distinct from failure)."""


@dataclass(frozen=True)
class TorusValue:
    """Exact element p/q of Q/Z, reduced, with 0 <= p < q."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        g = math.gcd(self.numerator % self.denominator, self.denominator)
        num = (self.numerator % self.denominator) // g
        den = self.denominator // g
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def zero(cls):
        return cls(0, 1)

    @classmethod
    def from_fraction(cls, frac):
        frac = Fraction(frac)
        return cls(frac.numerator % frac.denominator, frac.denominator)

    @classmethod
    def parse(cls, text):
        parts = text.strip().split("/")
        if len(parts) != 2:
            raise ValueError(f"expected 'p/q', got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    def to_fraction(self):
        return Fraction(self.numerator, self.denominator)

    def __add__(self, other):
        return TorusValue.from_fraction(self.to_fraction() + other.to_fraction())

    def __sub__(self, other):
        return TorusValue.from_fraction(self.to_fraction() - other.to_fraction())

    def __neg__(self):
        return TorusValue(-self.numerator, self.denominator)

    def __rmul__(self, scalar):
        if not isinstance(scalar, int):
            return NotImplemented
        return TorusValue(scalar * self.numerator, self.denominator)

    def is_zero(self):
        return self.numerator == 0

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"


TORUS_ZERO = TorusValue(0, 1)
TORUS_HALF = TorusValue(1, 2)


@dataclass(frozen=True)
class FinAbGroup:
    """Direct sum of cyclic groups Z/m_i (moduli of 1 allowed as padding)."""

    moduli: tuple

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        if not moduli:
            raise ValueError("empty moduli list")
        if any(m < 1 for m in moduli):
            raise ValueError("moduli must be >= 1")
        order = 1
        for m in moduli:
            order *= m
            if order > MAX_NATIVE:
                raise OverflowError("group order exceeds native integer range")
        object.__setattr__(self, "moduli", moduli)

    @property
    def rank(self):
        return len(self.moduli)

    @property
    def order(self):
        return math.prod(self.moduli)

    @property
    def exponent(self):
        return reduce(math.lcm, self.moduli, 1)

    def validate_exponent(self, m):
        """Check the declared exponent m: every modulus must divide m."""
        bad = [mi for mi in self.moduli if m % mi != 0]
        if bad:
            raise ValueError(f"moduli {bad} do not divide declared exponent {m}")

    def element(self, coeffs):
        coeffs = tuple(int(c) % m for c, m in zip(coeffs, self.moduli))
        if len(coeffs) != self.rank:
            raise ShapeError("coefficient length does not match moduli")
        return GroupElem(self, coeffs)

    def character(self, coeffs):
        coeffs = tuple(int(c) % m for c, m in zip(coeffs, self.moduli))
        if len(coeffs) != self.rank:
            raise ShapeError("coefficient length does not match moduli")
        return Character(self, coeffs)

    def zero(self):
        return self.element((0,) * self.rank)

    def generator(self, i):
        return self.element(tuple(1 if j == i else 0 for j in range(self.rank)))

    def generators(self):
        return [self.generator(i) for i in range(self.rank)]

    def elements(self):
        """All elements, lexicographic in coefficient tuples."""
        for coeffs in product(*(range(m) for m in self.moduli)):
            yield GroupElem(self, coeffs)

    def characters(self):
        for coeffs in product(*(range(m) for m in self.moduli)):
            yield Character(self, coeffs)

    def index_of(self, elem):
        idx = 0
        for c, m in zip(elem.coeffs, self.moduli):
            idx = idx * m + c
        return idx

    def element_at(self, idx):
        coeffs = []
        for m in reversed(self.moduli):
            coeffs.append(idx % m)
            idx //= m
        return GroupElem(self, tuple(reversed(coeffs)))

    def __repr__(self):
        return "Z(" + ",".join(str(m) for m in self.moduli) + ")"


def group_new(moduli):
    return FinAbGroup(tuple(moduli))


@dataclass(frozen=True)
class GroupElem:
    group: FinAbGroup
    coeffs: tuple

    def _check(self, other):
        if self.group.moduli != other.group.moduli:
            raise ShapeError("group shapes differ")

    def __add__(self, other):
        self._check(other)
        return GroupElem(self.group, tuple((a + b) % m for a, b, m in
                                           zip(self.coeffs, other.coeffs, self.group.moduli)))

    def __sub__(self, other):
        self._check(other)
        return GroupElem(self.group, tuple((a - b) % m for a, b, m in
                                           zip(self.coeffs, other.coeffs, self.group.moduli)))

    def __neg__(self):
        return GroupElem(self.group, tuple((-a) % m for a, m in
                                           zip(self.coeffs, self.group.moduli)))

    def __rmul__(self, scalar):
        if not isinstance(scalar, int):
            return NotImplemented
        return GroupElem(self.group, tuple((scalar * a) % m for a, m in
                                           zip(self.coeffs, self.group.moduli)))

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def order(self):
        n = 1
        for c, m in zip(self.coeffs, self.group.moduli):
            if c:
                n = math.lcm(n, m // math.gcd(c, m))
        return n

    def __repr__(self):
        return "(" + ",".join(map(str, self.coeffs)) + ")"


@dataclass(frozen=True)
class Character:
    """A character of the group, identified with (xi_i / m_i)_i."""

    group: FinAbGroup
    coeffs: tuple

    def __add__(self, other):
        if self.group.moduli != other.group.moduli:
            raise ShapeError("group shapes differ")
        return Character(self.group, tuple((a + b) % m for a, b, m in
                                           zip(self.coeffs, other.coeffs, self.group.moduli)))

    def __neg__(self):
        return Character(self.group, tuple((-a) % m for a, m in
                                           zip(self.coeffs, self.group.moduli)))

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __call__(self, g):
        return pair(self, g)

    def __repr__(self):
        return "chi(" + ",".join(map(str, self.coeffs)) + ")"


def pair(xi, g):
    """Dual pairing <xi, g> = sum_i xi_i g_i / m_i in Q/Z, exact."""
    if xi.group.moduli != g.group.moduli:
        raise ShapeError("character and element shapes differ")
    total = Fraction(0)
    for x, c, m in zip(xi.coeffs, g.coeffs, g.group.moduli):
        total += Fraction(x * c, m)
    return TorusValue.from_fraction(total)


def _moduli_lattice_cols(moduli):
    n = len(moduli)
    return [[moduli[i] if j == i else 0 for j in range(n)] for i in range(n)]


class Subgroup:
    """Subgroup of a FinAbGroup with canonical echelonized generating matrix.

    The canonical form spans the lattice generated by lifts of the generators
    together with the moduli relations, so membership is a back-substitution
    against the echelon pivots.
    """

    def __init__(self, ambient, generators):
        self.ambient = ambient
        gens = []
        for g in generators:
            if g.group.moduli != ambient.moduli:
                raise ShapeError("generator not in ambient group")
            gens.append(g)
        self.generators = tuple(gens)
        n = ambient.rank
        cols = [list(g.coeffs) for g in gens]
        cols += [col[:] for col in _moduli_lattice_cols(ambient.moduli)]
        mat = [[col[i] for col in cols] for i in range(n)]
        self._pivots, self._basis = intlinalg.column_echelon(mat)
        index = intlinalg.lattice_index(self._pivots, n)
        self.order = ambient.order // index

    def __contains__(self, elem):
        if elem.group.moduli != self.ambient.moduli:
            raise ShapeError("element not in ambient group")
        return intlinalg.lattice_contains(self._pivots, self._basis, list(elem.coeffs))

    def __eq__(self, other):
        if not isinstance(other, Subgroup) or other.ambient.moduli != self.ambient.moduli:
            return False
        if self.order != other.order:
            return False
        return all(g in other for g in self.generators)

    def __hash__(self):
        key = tuple(tuple(col) for col in self._basis)
        return hash((self.ambient.moduli, key))

    def is_trivial(self):
        return self.order == 1

    def elements(self, guard=1 << 20):
        """All elements, ambient-lexicographic, via closure enumeration."""
        if self.order > guard:
            raise GuardExceeded(f"subgroup order {self.order} exceeds guard")
        seen = {self.ambient.zero().coeffs}
        frontier = [self.ambient.zero()]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = x + g
                    if y.coeffs not in seen:
                        seen.add(y.coeffs)
                        nxt.append(y)
            frontier = nxt
        return [self.ambient.element(c) for c in sorted(seen)]

    def contains_subgroup(self, other):
        return all(g in self for g in other.generators)

    def intersection(self, other):
        """Exact lattice intersection with another subgroup of the ambient."""
        if other.ambient.moduli != self.ambient.moduli:
            raise ShapeError("subgroups of different ambient groups")
        n = self.ambient.rank
        a_cols = self._basis
        b_cols = other._basis
        if not a_cols or not b_cols:
            return Subgroup(self.ambient, [])
        block = [[col[i] for col in a_cols] + [-col[i] for col in b_cols]
                 for i in range(n)]
        gens = []
        for vec in intlinalg.kernel_basis(block):
            coeffs = [0] * n
            for col, c in zip(a_cols, vec[:len(a_cols)]):
                for i in range(n):
                    coeffs[i] += c * col[i]
            g = self.ambient.element(coeffs)
            if not g.is_zero():
                gens.append(g)
        return Subgroup(self.ambient, gens)

    def scaled(self, n):
        """The subgroup n*H."""
        return Subgroup(self.ambient, [n * g for g in self.generators])

    def sum_with(self, other):
        return Subgroup(self.ambient, list(self.generators) + list(other.generators))

    def quotient_structure(self):
        """Moduli list of ambient/self via elementary-divisor reduction."""
        return self.quotient().group.moduli

    def quotient(self):
        return QuotientMap(self)

    def __repr__(self):
        return f"Subgroup(order={self.order} of {self.ambient!r})"


def subgroup_span(ambient, gens):
    return Subgroup(ambient, gens)


class QuotientMap:
    """Presentation of ambient/H as a direct sum of cyclic groups.

    project() and lift() are mutually inverse up to H; lift is a fixed
    section used for deterministic constructions.
    """

    def __init__(self, subgroup):
        self.subgroup = subgroup
        amb = subgroup.ambient
        n = amb.rank
        cols = [list(g.coeffs) for g in subgroup.generators]
        cols += _moduli_lattice_cols(amb.moduli)
        mat = [[col[i] for col in cols] for i in range(n)]
        u, uinv, d, _ = intlinalg.smith_normal_form(mat)
        divisors = [d[i][i] for i in range(n)]
        self._u = u
        self._uinv = uinv
        self._divisors = divisors
        kept = [i for i, di in enumerate(divisors) if di > 1]
        self._kept = kept
        self.group = FinAbGroup(tuple(divisors[i] for i in kept) or (1,))
        self.ambient = amb

    def project(self, elem):
        if elem.group.moduli != self.ambient.moduli:
            raise ShapeError("element not in ambient group")
        y = intlinalg.mat_vec(self._u, list(elem.coeffs))
        coeffs = [y[i] % self._divisors[i] for i in self._kept] or [0]
        return self.group.element(coeffs)

    def lift(self, q):
        if q.group.moduli != self.group.moduli:
            raise ShapeError("element not in quotient group")
        y = [0] * self.ambient.rank
        for pos, i in enumerate(self._kept):
            y[i] = q.coeffs[pos]
        x = intlinalg.mat_vec(self._uinv, y)
        return self.ambient.element(x)


def annihilator(subgroup):
    """Ann(H) = {xi : <xi, h> = 0 for all h in H}, as a subgroup of the
    dual group (identified with a group of the same moduli)."""
    amb = subgroup.ambient
    n = amb.rank
    exps = amb.exponent
    rows = []
    for g in subgroup.generators:
        rows.append([g.coeffs[i] * (exps // amb.moduli[i]) for i in range(n)])
    gens = intlinalg.kernel_mod_hom(rows, list(amb.moduli), [exps] * len(rows))
    dual = FinAbGroup(amb.moduli)
    ann = Subgroup(dual, [dual.element(v) for v in gens])
    assert subgroup.order * ann.order == amb.order
    return ann


def all_subgroups(group, guard=20000):
    """Every subgroup of a small group, found by closing element spans."""
    if group.order > guard:
        raise GuardExceeded(f"group order {group.order} exceeds guard")
    elems = list(group.elements())
    seen = {}
    trivial = Subgroup(group, [])
    seen[frozenset({group.zero().coeffs})] = trivial
    frontier = [trivial]
    while frontier:
        nxt = []
        for sub in frontier:
            for g in elems:
                if g in sub:
                    continue
                bigger = Subgroup(group, list(sub.generators) + [g])
                key = frozenset(e.coeffs for e in bigger.elements())
                if key not in seen:
                    seen[key] = bigger
                    nxt.append(bigger)
        frontier = nxt
    return sorted(seen.values(), key=lambda s: (s.order, sorted(e.coeffs for e in s.elements())))
