"""Phase polynomials on finite systems: difference operators, exact degree
computation by generator derivatives, polynomial-group bases over a value
modulus, and the Lucas binomial tables.

Degree testing uses only generator derivatives.  Any gamma expands through
d_{a+b} = d_a + d_b + d_a d_b into sums of generator-derivative compositions
of order >= 1, so vanishing of all (k+1)-fold generator derivatives is
equivalent to the all-shifts definition, while cutting the sweep from
|Gamma|^(k+1) to r^(k+1) compositions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from . import intlinalg
from .abelian import (FinAbGroup, GroupElem, GuardExceeded, ShapeError,
                      TorusValue)
from .systems import GammaSystem, translation_system


@dataclass(frozen=True)
class TorusFunction:
    """Dense table of exact torus values over a system's point set."""

    system: GammaSystem
    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if len(vals) != self.system.n_points:
            raise ShapeError("table length does not match point count")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_fractions(cls, system, fracs):
        return cls(system, tuple(TorusValue.from_fraction(f) for f in fracs))

    def __add__(self, other):
        return TorusFunction(self.system, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other):
        return TorusFunction(self.system, tuple(a - b for a, b in zip(self.values, other.values)))

    def __neg__(self):
        return TorusFunction(self.system, tuple(-a for a in self.values))

    def __rmul__(self, scalar):
        if not isinstance(scalar, int):
            return NotImplemented
        return TorusFunction(self.system, tuple(scalar * a for a in self.values))

    def is_zero(self):
        return all(v.is_zero() for v in self.values)

    def pinned(self):
        """Subtract the value at the canonical base point (point 0)."""
        c = self.values[0]
        return TorusFunction(self.system, tuple(v - c for v in self.values))

    def common_denominator(self):
        den = reduce(math.lcm, (v.denominator for v in self.values), 1)
        return [v.numerator * (den // v.denominator) for v in self.values], den


@dataclass(frozen=True)
class GroupValuedFunction:
    system: GammaSystem
    target: FinAbGroup
    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if len(vals) != self.system.n_points:
            raise ShapeError("table length does not match point count")
        object.__setattr__(self, "values", vals)

    def __add__(self, other):
        return GroupValuedFunction(self.system, self.target,
                                   tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other):
        return GroupValuedFunction(self.system, self.target,
                                   tuple(a - b for a, b in zip(self.values, other.values)))

    def is_zero(self):
        return all(v.is_zero() for v in self.values)


def _shift_table(system, values, i):
    perm = system.gen_perms[i]
    return [values[perm[x]] for x in range(system.n_points)]


def _diff_table(system, values, i):
    perm = system.gen_perms[i]
    return [values[perm[x]] - values[x] for x in range(system.n_points)]


def derivative(f, gamma):
    """(d_gamma f)(x) = f(T^gamma x) - f(x), exact, same kind as f."""
    system = f.system
    perm = system.perm_of(gamma)
    vals = tuple(f.values[perm[x]] - f.values[x] for x in range(system.n_points))
    if isinstance(f, TorusFunction):
        return TorusFunction(system, vals)
    return GroupValuedFunction(system, f.target, vals)


def degree_of_table(system, values, d_max):
    """Smallest k >= 0 with all (k+1)-fold generator derivatives zero,
    or None when the degree exceeds d_max.

    Invariant functions (in particular constants and the zero function) get
    degree 0; use is_zero for the zero predicate.
    """
    r = system.gamma.rank
    level = {(): list(values)}
    for k in range(d_max + 1):
        nxt = {}
        all_zero = True
        for key, tab in level.items():
            start = key[-1] if key else 0
            for i in range(start, r):
                d = _diff_table(system, tab, i)
                if any(not v.is_zero() for v in d):
                    all_zero = False
                nxt[key + (i,)] = d
        if all_zero:
            return k
        level = nxt
    return None


def degree(f, d_max):
    return degree_of_table(f.system, list(f.values), d_max)


def _multisets(r, size):
    """Non-decreasing index tuples of the given size over range(r)."""
    if size == 0:
        yield ()
        return
    def rec(prefix, start, remaining):
        if remaining == 0:
            yield tuple(prefix)
            return
        for i in range(start, r):
            prefix.append(i)
            yield from rec(prefix, i, remaining - 1)
            prefix.pop()
    yield from rec([], 0, size)


def _operator_rows(system, order):
    """Integer rows of all order-fold generator-derivative compositions,
    acting on value tables by left multiplication."""
    n = system.n_points
    rows = []
    for multiset in _multisets(system.gamma.rank, order):
        # compose difference operators as dense integer matrices
        mat = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for i in multiset:
            perm = system.gen_perms[i]
            mat = [[mat[perm[x]][j] - mat[x][j] for j in range(n)] for x in range(n)]
        rows.extend(mat)
    return rows


def poly_group_basis(system, k, M=None, guard_cells=10**7):
    """Generating set of {P : X -> (1/M)Z/Z, deg(P) <= k, P(x0) = 0} as a
    finite abelian group, computed as the kernel of the stacked (k+1)-fold
    generator-derivative map over Z/M.  Constants are excluded by pinning
    the canonical base point x0 (point 0).
    """
    if M is None:
        M = system.gamma.exponent ** max(k, 1)
    n = system.n_points
    if n * M > guard_cells:
        raise GuardExceeded(f"|X| * M = {n * M} exceeds guard")
    if k < 0:
        return []
    rows = _operator_rows(system, k + 1)
    rows.append([1 if j == 0 else 0 for j in range(n)])  # pin P(x0) = 0
    gens = intlinalg.kernel_mod_hom(rows, [M] * n, [M] * len(rows))
    basis = []
    for vec in sorted(gens):
        basis.append(TorusFunction.from_fractions(system, [Fraction(v, M) for v in vec]))
    return basis


def span_tables(basis, M, guard=10**6):
    """All numerator tables (mod M) in the span of basis functions, pinned at
    the base point; deterministic lexicographic-coefficient enumeration."""
    n = basis[0].system.n_points if basis else 0
    vecs = []
    for f in basis:
        nums, den = f.common_denominator()
        vecs.append([v * (M // den) for v in nums])
        if M % den != 0:
            raise ValueError("basis function denominator does not divide M")
    orders = []
    for vec in vecs:
        g = math.gcd(M, math.gcd(*vec) if vec else M)
        orders.append(M // g if g else 1)
    total = math.prod(orders) if orders else 1
    if total > guard:
        raise GuardExceeded(f"span enumeration size {total} exceeds guard")
    seen = {}
    def rec(idx, acc):
        if idx == len(vecs):
            key = tuple(acc)
            if key not in seen:
                seen[key] = None
            return
        vec = vecs[idx]
        cur = list(acc)
        for c in range(orders[idx]):
            rec(idx + 1, cur)
            cur = [(a + b) % M for a, b in zip(cur, vec)]
    rec(0, [0] * n)
    return list(seen.keys())


def binom_mod2_table(L, d):
    """The table s -> (1/2) * binom(lift(s), d) mod 1 on Z/2^L, where lift is
    the standard representative in [0, 2^L), together with its minimal period.

    Well-definedness (binom(s + 2^L, d) = binom(s, d) mod 2) is verified
    directly; by the Lucas congruence it amounts to d < 2^L.
    """
    size = 2 ** L
    bits = [math.comb(s, d) % 2 for s in range(2 * size)]
    for s in range(size):
        if bits[s] != bits[s + size]:
            raise ValueError(
                f"binom(s,{d}) mod 2 is not periodic mod 2^{L}; increase L")
    system = translation_system(FinAbGroup((size,)))
    table = TorusFunction(system, tuple(TorusValue(b, 2) for b in bits[:size]))
    period = size
    p = 1
    while p < size:
        if all(bits[s] == bits[(s + p) % size] for s in range(size)):
            period = p
            break
        p *= 2
    return table, period
