"""Recursive cube systems over finite systems: cube measures, uniformity
seminorms, the alternating sum operator, and type testing for cocycles.

Conditional expectation onto the invariant algebra is the exact orbit
average; every point of an orbit carries the same weight because the
diagonal action preserves the measure, so the recursion stays in exact
rationals.  Supports are stored sparsely (cubes of positive weight only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .abelian import GuardExceeded, TorusValue
from .systems import Cocycle, GammaSystem, TORUS, coboundary_solve


@dataclass(frozen=True)
class CubeSystem:
    base: GammaSystem
    k: int
    support: tuple   # tuples of 2^k base point indices, indexed by bitmask
    weights: tuple   # exact Fractions, parallel to support

    def as_gamma_system(self):
        """The diagonal action on the support as a plain system (the measure
        is carried separately by weights)."""
        index = {t: i for i, t in enumerate(self.support)}
        perms = []
        for p in self.base.gen_perms:
            perms.append(tuple(index[tuple(p[x] for x in t)] for t in self.support))
        return GammaSystem(len(self.support), self.base.gamma, tuple(perms))

    def total_weight(self):
        return sum(self.weights, Fraction(0))


def _orbits_of_tuples(base, support):
    index = {t: i for i, t in enumerate(support)}
    perms = []
    for p in base.gen_perms:
        perms.append([index[tuple(p[x] for x in t)] for t in support])
    seen = [False] * len(support)
    orbit_id = [0] * len(support)
    orbits = []
    for i in range(len(support)):
        if seen[i]:
            continue
        stack = [i]
        seen[i] = True
        members = []
        while stack:
            j = stack.pop()
            members.append(j)
            for p in perms:
                t = p[j]
                if not seen[t]:
                    seen[t] = True
                    stack.append(t)
        oid = len(orbits)
        for j in members:
            orbit_id[j] = oid
        orbits.append(members)
    return orbits, orbit_id


def cube_system(base, k, guard_cells=10**7):
    """The level-k cube system, built by the measure recursion."""
    n = base.n_points
    support = [(x,) for x in range(n)]
    weights = [Fraction(1, n)] * n
    for _ in range(k):
        orbits, orbit_id = _orbits_of_tuples(base, support)
        new_support = []
        new_weights = []
        for members in orbits:
            size = len(members)
            for a in members:
                wa = weights[a] / size
                for b in members:
                    new_support.append(support[a] + support[b])
                    new_weights.append(wa)
        if len(new_support) > guard_cells:
            raise GuardExceeded(f"cube support {len(new_support)} exceeds guard")
        order = sorted(range(len(new_support)), key=lambda i: new_support[i])
        support = [new_support[i] for i in order]
        weights = [new_weights[i] for i in order]
    return CubeSystem(base, k, tuple(support), tuple(weights))


def _sgn(mask):
    return bin(mask).count("1")


def hk_seminorm(f_values, cube, tol=1e-12):
    """Uniformity seminorm of level cube.k: the 2^k-th root of the integral
    of the conjugation-twisted tensor product against the cube measure."""
    k = cube.k
    total = 0j
    for t, w in zip(cube.support, cube.weights):
        prod = complex(1.0)
        for mask, x in enumerate(t):
            v = f_values[x]
            prod *= v.conjugate() if _sgn(mask) % 2 else v
        total += float(w) * prod
    assert abs(total.imag) <= tol * max(1.0, abs(total.real)) + tol
    real = total.real
    assert real >= -tol
    real = max(real, 0.0)
    return real ** (1.0 / (1 << k))


def delta_cube(f_values, cube):
    """Alternating sum sum_omega (-1)^sgn(omega) f(x_omega) on the support,
    exact for torus- or group-valued tables."""
    out = []
    for t in cube.support:
        acc = None
        for mask, x in enumerate(t):
            term = f_values[x] if _sgn(mask) % 2 == 0 else -f_values[x]
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def type_leq(rho, k, guard_cells=10**7):
    """Whether the torus cocycle has type <= k: the alternating cube sum of
    rho is a coboundary on the level-k cube system, solved per ergodic
    component of the support."""
    if rho.target != TORUS:
        raise ValueError("type test expects a torus-valued cocycle")
    cube = cube_system(rho.system, k, guard_cells=guard_cells)
    cube_sys = cube.as_gamma_system()
    tables = tuple(tuple(delta_cube(list(rho.tables[i]), cube))
                   for i in range(rho.system.gamma.rank))
    delta_rho = Cocycle(cube_sys, TORUS, tables)
    return coboundary_solve(delta_rho) is not None


def dump_rows(cube):
    """CSV-ready rows: one per support tuple, weight as an exact 'p/q'."""
    rows = []
    for t, w in zip(cube.support, cube.weights):
        rows.append(list(t) + [f"{w.numerator}/{w.denominator}"])
    return rows
