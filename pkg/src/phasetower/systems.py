"""Finite measure-preserving systems for a finite abelian acting group.

A system is a finite point set with one commuting permutation per generator
of the acting group and uniform measure.  Cocycles are stored on generators
only; the two construction invariants (cycle sums vanish, cross-differences
agree) are exactly the solvability conditions for extending to the whole
group, so full cocycle values are derived on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abelian import (Character, FinAbGroup, GroupElem, GuardExceeded,
                      ShapeError, Subgroup, TorusValue, annihilator, pair,
                      subgroup_span)

TORUS = "torus"


class CocycleError(ValueError):
    """Tables do not satisfy the cocycle construction invariants."""


class PreconditionError(ValueError):
    """A documented operation precondition failed."""


class IntegrationDegreeError(RuntimeError):
    """Integration produced a transfer above the promised degree, which
    signals a violated exactness assumption on the underlying cocycle."""


def _perm_order(perm):
    n = len(perm)
    seen = [False] * n
    order = 1
    import math
    for i in range(n):
        if not seen[i]:
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            order = math.lcm(order, length)
    return order


@dataclass(frozen=True)
class GammaSystem:
    """Finite point set with a commuting generator-indexed action."""

    n_points: int
    gamma: FinAbGroup
    gen_perms: tuple
    labels: tuple = None  # optional per-point labels (e.g. group elements)

    def __post_init__(self):
        perms = tuple(tuple(p) for p in self.gen_perms)
        object.__setattr__(self, "gen_perms", perms)
        if len(perms) != self.gamma.rank:
            raise ShapeError("need one permutation per generator")
        for p, m in zip(perms, self.gamma.moduli):
            if sorted(p) != list(range(self.n_points)):
                raise ValueError("action table is not a permutation")
            if m % _perm_order(p) != 0:
                raise ValueError("generator order does not divide its modulus")
        for i in range(len(perms)):
            for j in range(i + 1, len(perms)):
                a, b = perms[i], perms[j]
                if any(a[b[x]] != b[a[x]] for x in range(self.n_points)):
                    raise ValueError("generator permutations do not commute")

    def points(self):
        return range(self.n_points)

    def apply_gen(self, i, x, times=1):
        p = self.gen_perms[i]
        for _ in range(times % self.gamma.moduli[i]):
            x = p[x]
        return x

    def apply(self, gamma_elem, x):
        if gamma_elem.group.moduli != self.gamma.moduli:
            raise ShapeError("element not in acting group")
        for i, c in enumerate(gamma_elem.coeffs):
            x = self.apply_gen(i, x, c)
        return x

    def perm_of(self, gamma_elem):
        return tuple(self.apply(gamma_elem, x) for x in self.points())

    def orbits(self):
        seen = [False] * self.n_points
        out = []
        for x in self.points():
            if seen[x]:
                continue
            orbit = []
            stack = [x]
            seen[x] = True
            while stack:
                y = stack.pop()
                orbit.append(y)
                for p in self.gen_perms:
                    z = p[y]
                    if not seen[z]:
                        seen[z] = True
                        stack.append(z)
            out.append(sorted(orbit))
        return out

    def is_transitive(self):
        return len(self.orbits()) == 1


def one_point_system(gamma):
    return GammaSystem(1, gamma, tuple((0,) for _ in range(gamma.rank)))


def translation_system(group):
    """The group acting on itself by translation, points in lexicographic
    coefficient order."""
    elems = list(group.elements())
    index = {e.coeffs: i for i, e in enumerate(elems)}
    perms = []
    for i in range(group.rank):
        g = group.generator(i)
        perms.append(tuple(index[(e + g).coeffs] for e in elems))
    return GammaSystem(len(elems), group, tuple(perms), labels=tuple(elems))


def _value_zero(target):
    return TorusValue.zero() if target == TORUS else target.zero()


@dataclass(frozen=True)
class Cocycle:
    """Generator-indexed cocycle into the torus or a finite abelian group."""

    system: GammaSystem
    target: object  # TORUS or FinAbGroup
    tables: tuple   # tables[i][x] = rho_{e_i}(x)

    def __post_init__(self):
        tables = tuple(tuple(t) for t in self.tables)
        object.__setattr__(self, "tables", tables)
        sys = self.system
        if len(tables) != sys.gamma.rank:
            raise ShapeError("need one table per generator")
        for t in tables:
            if len(t) != sys.n_points:
                raise ShapeError("table length does not match point count")
        zero = _value_zero(self.target)
        for i, m in enumerate(sys.gamma.moduli):
            for x in sys.points():
                total = zero
                y = x
                for _ in range(m):
                    total = total + tables[i][y]
                    y = sys.apply_gen(i, y)
                if not total.is_zero():
                    raise CocycleError(f"cycle sum at generator {i}, point {x} is {total}")
        for i in range(sys.gamma.rank):
            for j in range(i + 1, sys.gamma.rank):
                for x in sys.points():
                    lhs = tables[i][sys.apply_gen(j, x)] - tables[i][x]
                    rhs = tables[j][sys.apply_gen(i, x)] - tables[j][x]
                    if not (lhs - rhs).is_zero():
                        raise CocycleError(f"cross condition fails at generators {i},{j}, point {x}")

    def value(self, i, x):
        return self.tables[i][x]

    def eval(self, gamma_elem, x):
        """rho_gamma(x) by expanding gamma along the fixed generator order."""
        if gamma_elem.group.moduli != self.system.gamma.moduli:
            raise ShapeError("element not in acting group")
        total = _value_zero(self.target)
        for i, c in enumerate(gamma_elem.coeffs):
            for _ in range(c):
                total = total + self.tables[i][x]
                x = self.system.apply_gen(i, x)
        return total

    def table_of(self, gamma_elem):
        return [self.eval(gamma_elem, x) for x in self.system.points()]

    def compose_character(self, xi):
        """The torus cocycle xi o rho (target must be a group)."""
        if self.target == TORUS:
            raise ShapeError("cocycle already torus-valued")
        tables = tuple(tuple(pair(xi, v) for v in t) for t in self.tables)
        return Cocycle(self.system, TORUS, tables)

    def __add__(self, other):
        if other.system is not self.system and other.system != self.system:
            raise ShapeError("cocycles on different systems")
        tables = tuple(tuple(a + b for a, b in zip(ta, tb))
                       for ta, tb in zip(self.tables, other.tables))
        return Cocycle(self.system, self.target, tables)

    def __sub__(self, other):
        tables = tuple(tuple(a - b for a, b in zip(ta, tb))
                       for ta, tb in zip(self.tables, other.tables))
        return Cocycle(self.system, self.target, tables)


def constant_cocycle(system, target, values):
    """Homomorphism cocycle: rho_{e_i} constant equal to values[i]."""
    tables = tuple(tuple(values[i] for _ in system.points())
                   for i in range(system.gamma.rank))
    return Cocycle(system, target, tables)


def coboundary(system, target, table):
    """d(table): the coboundary cocycle of a transfer function."""
    tables = tuple(tuple(table[system.apply_gen(i, x)] - table[x] for x in system.points())
                   for i in range(system.gamma.rank))
    return Cocycle(system, target, tables)


def coboundary_solve(rho):
    """Transfer function F with dF = rho, or None.

    Per orbit, F is propagated from the least point along a spanning tree;
    existence is decided by the closing edges and the result is verified.
    F is normalized to vanish at each orbit's least point.
    """
    sys = rho.system
    zero = _value_zero(rho.target)
    values = [None] * sys.n_points
    for orbit in sys.orbits():
        base = orbit[0]
        values[base] = zero
        stack = [base]
        while stack:
            x = stack.pop()
            for i in range(sys.gamma.rank):
                y = sys.apply_gen(i, x)
                fy = values[x] + rho.tables[i][x]
                if values[y] is None:
                    values[y] = fy
                    stack.append(y)
                elif not (values[y] - fy).is_zero():
                    return None
    for i in range(sys.gamma.rank):
        for x in sys.points():
            if not (values[sys.apply_gen(i, x)] - values[x] - rho.tables[i][x]).is_zero():
                return None
    return values


@dataclass(frozen=True)
class SkewSystem:
    """Skew product base x_rho U, with the vertical structure kept explicit."""

    system: GammaSystem
    base: GammaSystem
    fiber: FinAbGroup
    rho: Cocycle

    def point_index(self, base_idx, u):
        return base_idx * self.fiber.order + self.fiber.index_of(u)

    def split_point(self, p):
        return divmod(p, self.fiber.order)

    def base_point(self, p):
        return p // self.fiber.order

    def fiber_elem(self, p):
        return self.fiber.element_at(p % self.fiber.order)

    def vertical_perm(self, v):
        out = []
        for p in range(self.system.n_points):
            b, ui = self.split_point(p)
            out.append(self.point_index(b, self.fiber.element_at(ui) + v))
        return tuple(out)

    def fiber_elements(self):
        return list(self.fiber.elements())


def skew_product(sys, rho):
    """The system on points x U with T^gamma(x,u) = (T^gamma x, u + rho_gamma(x))."""
    if rho.target == TORUS:
        raise ShapeError("skew product needs a group-valued cocycle")
    U = rho.target
    n = sys.n_points * U.order
    perms = []
    for i in range(sys.gamma.rank):
        perm = [0] * n
        for x in sys.points():
            for uidx in range(U.order):
                u = U.element_at(uidx)
                tx = sys.apply_gen(i, x)
                tu = u + rho.tables[i][x]
                perm[x * U.order + uidx] = tx * U.order + U.index_of(tu)
        perms.append(tuple(perm))
    skew = SkewSystem(GammaSystem(n, sys.gamma, tuple(perms)), sys, U, rho)
    # vertical translations must commute with the action
    for v in U.generators():
        vp = skew.vertical_perm(v)
        for p in skew.system.gen_perms:
            assert all(p[vp[x]] == vp[p[x]] for x in range(n))
    return skew


def vertical_derivative(skew, table, v):
    vp = skew.vertical_perm(v)
    return [table[vp[x]] - table[x] for x in range(skew.system.n_points)]


def check_u_cocycle(skew, fam):
    """Check the fiber-cocycle equation f_{u+v} = f_u + V_u f_v."""
    U = skew.fiber
    n = skew.system.n_points
    for uidx in range(U.order):
        u = U.element_at(uidx)
        vu = skew.vertical_perm(u)
        for vidx in range(U.order):
            v = U.element_at(vidx)
            widx = U.index_of(u + v)
            for p in range(n):
                lhs = fam[widx][p]
                rhs = fam[uidx][p] + fam[vidx][vu[p]]
                if not (lhs - rhs).is_zero():
                    return False
    return True


def integrate_u_cocycle(skew, fam):
    """Antiderivative F with d_U F = fam, normalized F(., 0) = 0.

    fam is indexed by fiber element index; each entry is a table on the skew
    points.  F(y, u) := f_u(y, 0).
    """
    if not check_u_cocycle(skew, fam):
        raise PreconditionError("family violates the fiber cocycle equation")
    U = skew.fiber
    n = skew.system.n_points
    values = [None] * n
    for p in range(n):
        b, uidx = skew.split_point(p)
        values[p] = fam[uidx][skew.point_index(b, U.zero())]
    for uidx in range(U.order):
        u = U.element_at(uidx)
        vu = skew.vertical_perm(u)
        for p in range(n):
            assert (values[vu[p]] - values[p] - fam[uidx][p]).is_zero()
    return values


def weight_of(chain, u):
    """Weight of u for a filtration chain U = U_{>0} >= U_{>1} >= ...

    Elements of U_{>i} have weight at least i+1; 0 has effectively infinite
    weight (returned as len(chain) + 1).
    """
    if u.is_zero():
        return len(chain) + 1
    wt = 0
    for i, sub in enumerate(chain):
        if u in sub:
            wt = i + 1
        else:
            break
    if wt == 0:
        raise PreconditionError("weight filtration must start at the full group")
    return wt


def integrate_poly_cocycle(skew, fam, k, weight_chain, degree_fn):
    """Integrate a vertical cocycle whose components obey the weighted degree
    bound deg f_u <= k - wt(u), and verify the transfer has degree <= k.

    degree_fn(table) must return the polynomial degree of a table on the skew
    system (or None when it exceeds its bound); it is injected to avoid a
    module cycle with the polynomial machinery.
    """
    U = skew.fiber
    for uidx in range(U.order):
        u = U.element_at(uidx)
        if u.is_zero():
            continue
        wt = weight_of(weight_chain, u)
        bound = k - wt
        deg = degree_fn(fam[uidx], max(bound, 0))
        if deg is None or deg > bound:
            raise PreconditionError(
                f"component at {u} has degree above k - wt = {bound}")
    F = integrate_u_cocycle(skew, fam)
    degF = degree_fn(F, k)
    if degF is None:
        raise IntegrationDegreeError(
            "transfer exceeds the promised degree; the cocycle defining the "
            "skew product cannot be exact with the supplied weight filtration")
    return F


def minimal_reduce(rho, guard=4096):
    """Smallest subgroup U' <= U such that rho - dF takes values in U'.

    Computed through the character criterion: U' is the annihilator of
    {xi : xi o rho is a coboundary}, and F is obtained by solving the
    quotient cocycle mod U'.
    """
    if rho.target == TORUS:
        raise ShapeError("minimal reduction needs a group-valued cocycle")
    if not rho.system.is_transitive():
        raise PreconditionError("base system must be transitive")
    U = rho.target
    if U.order > guard:
        raise GuardExceeded(f"fiber order {U.order} exceeds guard {guard}")
    solvable = []
    for xi in U.characters():
        if coboundary_solve(rho.compose_character(xi)) is not None:
            solvable.append(U.element(xi.coeffs))
    S = subgroup_span(U, solvable)
    Uprime = annihilator(S)
    # transfer: solve the quotient cocycle mod U'
    Usub = subgroup_span(U, [U.element(g.coeffs) for g in Uprime.generators])
    q = Usub.quotient()
    tables = tuple(tuple(q.project(v) for v in t) for t in rho.tables)
    qco = Cocycle(rho.system, q.group, tables)
    Fbar = coboundary_solve(qco)
    assert Fbar is not None, "character criterion guarantees solvability"
    F = [q.lift(v) for v in Fbar]
    return Usub, F


@dataclass
class ExactnessReport:
    d_max: int
    type_sets: dict = field(default_factory=dict)    # d -> set of character coeffs
    degree_sets: dict = field(default_factory=dict)  # d -> set of character coeffs
    filtration: dict = field(default_factory=dict)   # d -> Subgroup U_{>d}
    exact: bool = True


def exactness_check(rho, d_max, type_fn, degree_fn, guard_cells=10**7):
    """Type/degree comparison per character: rho is exact when, for every
    d <= d_max, {xi : type(xi o rho) <= d} = {xi : deg(xi o rho) <= d-1}.

    Reports the type filtration U_{>d} = Ann{xi : type <= d}.  type_fn and
    degree_fn are injected from the cube and polynomial modules.
    """
    if rho.target == TORUS:
        raise ShapeError("exactness check needs a group-valued cocycle")
    U = rho.target
    nX = rho.system.n_points
    if nX ** (2 ** d_max) > guard_cells:
        raise GuardExceeded(f"|X|^(2^d) = {nX ** (2 ** d_max)} exceeds guard")
    report = ExactnessReport(d_max=d_max)
    for d in range(d_max + 1):
        tset, pset = set(), set()
        for xi in U.characters():
            comp = rho.compose_character(xi)
            if type_fn(comp, d):
                tset.add(xi.coeffs)
            deg_tables = comp.tables
            if d == 0:
                is_poly = all(v.is_zero() for t in deg_tables for v in t)
            else:
                is_poly = all(degree_fn(list(t), d - 1) is not None for t in deg_tables)
            if is_poly:
                pset.add(xi.coeffs)
        report.type_sets[d] = tset
        report.degree_sets[d] = pset
        tsub = subgroup_span(U, [U.element(c) for c in tset])
        report.filtration[d] = annihilator(tsub)
        if tset != pset:
            report.exact = False
    return report
