"""Combinatorial Gowers norms, inner products, multiplicative derivatives
and correlation functionals on finite systems.

Floating-point sums use math.fsum in a fixed lexicographic order so results
are reproducible bit for bit.  The expectation-over-parallelepipeds
definition adopted here is verified against the cube-measure seminorm on
transitive translation systems by the test suite rather than assumed.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .abelian import GuardExceeded, ShapeError, TorusValue
from .phasepoly import TorusFunction
from .systems import GammaSystem


@dataclass(frozen=True)
class ComplexFunction:
    """Dense complex table over a system's point set.  1-boundedness is a
    precondition of the norm-comparison properties, not of evaluation."""

    system: GammaSystem
    values: tuple

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        if len(vals) != self.system.n_points:
            raise ShapeError("table length does not match point count")
        object.__setattr__(self, "values", vals)

    def conj(self):
        return ComplexFunction(self.system, tuple(v.conjugate() for v in self.values))

    def is_one_bounded(self, tol=1e-12):
        return all(abs(v) <= 1 + tol for v in self.values)


def _roots_cache(den):
    return [cmath.exp(2j * cmath.pi * k / den) for k in range(den)]


def phase_exp(f):
    """e(P) for a torus function P."""
    nums, den = f.common_denominator()
    roots = _roots_cache(den)
    return ComplexFunction(f.system, tuple(roots[v % den] for v in nums))


def mult_derivative(f, h):
    """(Delta_h f)(x) = f(x + h) * conj(f(x))."""
    perm = f.system.perm_of(h)
    return ComplexFunction(f.system,
                           tuple(f.values[perm[x]] * f.values[x].conjugate()
                                 for x in range(f.system.n_points)))


def _mean(values):
    re = math.fsum(v.real for v in values)
    im = math.fsum(v.imag for v in values)
    n = len(values)
    return complex(re / n, im / n)


def _norm_power(f, d, tol):
    if d == 1:
        return abs(_mean(f.values)) ** 2
    gamma = f.system.gamma
    terms = []
    for h in gamma.elements():
        terms.append(_norm_power(mult_derivative(f, h), d - 1, tol))
    val = math.fsum(terms) / gamma.order
    assert val >= -tol
    return max(val, 0.0)


def gowers_norm(f, d, guard_cells=10**8, tol=1e-12):
    """||f||_{U^d} by the derivative recursion; base ||f||_{U^1} = |E f|."""
    if d < 1:
        raise ValueError("d must be >= 1")
    cost = f.system.gamma.order ** (d - 1) * f.system.n_points
    if cost > guard_cells:
        raise GuardExceeded(f"U^{d} enumeration cost {cost} exceeds guard")
    if d == 1:
        return abs(_mean(f.values))
    return _norm_power(f, d, tol) ** (1.0 / (1 << d))


def gowers_inner(fs, guard_cells=10**8):
    """Inner product E_{x,h_1..h_d} prod_omega C^{|omega|} f_omega(x + omega.h).

    fs has length 2^d and is indexed by the bitmask of omega; functions at
    odd-weight masks are conjugated.
    """
    count = len(fs)
    d = count.bit_length() - 1
    if count != 1 << d or d < 1:
        raise ShapeError("need exactly 2^d functions with d >= 1")
    system = fs[0].system
    for f in fs:
        if f.system != system:
            raise ShapeError("functions on different domains")
    gamma = system.gamma
    cost = gamma.order ** d * system.n_points
    if cost > guard_cells:
        raise GuardExceeded(f"inner product cost {cost} exceeds guard")
    gen_perms = [system.perm_of(h) for h in gamma.elements()]
    n = system.n_points
    vals = [np.array(f.values, dtype=complex) for f in fs]
    idx = np.arange(n)
    total_re = []
    total_im = []

    def rec(level, positions, acc):
        # positions[mask] = current point indices for that vertex
        if level == d:
            prod = np.ones(n, dtype=complex)
            for mask in range(count):
                v = vals[mask][positions[mask]]
                prod = prod * (np.conj(v) if _popcount(mask) % 2 else v)
            acc_re = math.fsum(prod.real.tolist())
            acc_im = math.fsum(prod.imag.tolist())
            total_re.append(acc_re)
            total_im.append(acc_im)
            return
        for perm in gen_perms:
            parr = np.array(perm)
            new_positions = list(positions)
            for mask in range(count):
                if mask & (1 << level):
                    new_positions[mask] = parr[positions[mask]]
            rec(level + 1, new_positions, acc)

    rec(0, [idx.copy() for _ in range(count)], None)
    denom = gamma.order ** d * n
    return complex(math.fsum(total_re) / denom, math.fsum(total_im) / denom)


def _popcount(x):
    return bin(x).count("1")


def correlate(f, P):
    """E_x f(x) e(-P(x))."""
    if f.system != P.system:
        raise ShapeError("function domains differ")
    eP = phase_exp(P)
    prods = [a * b.conjugate() for a, b in zip(f.values, eP.values)]
    return _mean(prods)


@dataclass(frozen=True)
class PhaseGowersReport:
    """Exact evaluation of ||e(P)||_{U^d}^{2^d}.

    exact_power is a Fraction when every top-level iterated phase lies in
    {0, 1/2} (each parallelepiped term is then +-1); otherwise it is None and
    phase_counts holds the multiset of phases for numeric evaluation.
    """

    d: int
    exact_power: object
    phase_counts: object

    def numeric_power(self):
        if self.exact_power is not None:
            return float(self.exact_power)
        total = 0.0
        count = 0
        for (num, den), c in self.phase_counts.items():
            total += c * math.cos(2 * math.pi * num / den)
            count += c
        return total / count

    def numeric_norm(self):
        p = self.numeric_power()
        return max(p, 0.0) ** (1.0 / (1 << self.d))


def phase_gowers_exact(P, d, guard_cells=10**8):
    """Exact report on ||e(P)||_{U^d}^{2^d} via iterated additive phases.

    The d-fold multiplicative derivative of e(P) is e of the d-fold additive
    derivative of P, so the full average is resolved by tabulating those
    phases; numerators are tracked modulo the common denominator with numpy
    integer arithmetic.
    """
    system = P.system
    gamma = system.gamma
    cost = gamma.order ** d * system.n_points
    if cost > guard_cells:
        raise GuardExceeded(f"phase enumeration cost {cost} exceeds guard")
    nums, den = P.common_denominator()
    base = np.array(nums, dtype=np.int64) % den
    perms = [np.array(system.perm_of(h)) for h in gamma.elements()]
    counts = Counter()

    def rec(level, arr):
        if level == d:
            vals, cnt = np.unique(arr, return_counts=True)
            for v, c in zip(vals.tolist(), cnt.tolist()):
                counts[v] += c
            return
        for perm in perms:
            rec(level + 1, (arr[perm] - arr) % den)

    rec(0, base)
    total = sum(counts.values())
    half = den // 2 if den % 2 == 0 else None
    exact = None
    if all(v == 0 or (half is not None and v == half) for v in counts):
        pos = counts.get(0, 0)
        neg = total - pos
        exact = Fraction(pos - neg, total)
    phase_counts = Counter()
    for v, c in counts.items():
        g = math.gcd(v, den)
        phase_counts[(v // g, den // g)] += c
    return PhaseGowersReport(d=d, exact_power=exact, phase_counts=phase_counts)
