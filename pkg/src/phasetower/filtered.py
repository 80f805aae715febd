"""Filtered finite abelian groups: embeddings, systems of relations, purity
witnesses, and splitting of short exact sequences.

Relation coefficients are reduced modulo exp(B): the action of a coefficient
vector on a family in B only depends on it mod exp(B), and the reduction
makes every relation space a finite group, so the full satisfied system of a
family is captured by generators of finitely many kernel subgroups (no cap
on the number of relations is ever needed).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import product

from . import intlinalg
from .abelian import (FinAbGroup, GroupElem, GuardExceeded, ShapeError,
                      Subgroup, subgroup_span)


class PremiseViolated(ValueError):
    """The purity premise fails for some relation (distinct from absence of
    a witness)."""


@dataclass(frozen=True)
class FilteredGroup:
    """A group with a nested chain A = A_0 >= A_1 >= ... >= A_{k+1} = 0."""

    ambient: FinAbGroup
    chain: tuple

    def __post_init__(self):
        chain = tuple(self.chain)
        if len(chain) < 2:
            raise ValueError("chain must contain A_0 and A_{k+1}")
        if chain[0].order != self.ambient.order:
            raise ValueError("A_0 must be the full group")
        if not chain[-1].is_trivial():
            raise ValueError("A_{k+1} must be trivial")
        for a, b in zip(chain, chain[1:]):
            if not a.contains_subgroup(b):
                raise ValueError("filtration must be nested")
        object.__setattr__(self, "chain", chain)

    @property
    def degree(self):
        return len(self.chain) - 2

    def level(self, j):
        """A_j, extended by the trivial group beyond the chain."""
        if j < 0:
            return self.chain[0]
        return self.chain[min(j, len(self.chain) - 1)]

    @classmethod
    def with_trivial_filtration(cls, group, degree=1):
        full = subgroup_span(group, group.generators())
        triv = subgroup_span(group, [])
        return cls(group, (full,) + (triv,) * (degree + 1))

    @classmethod
    def from_subgroup_gens(cls, group, gens_chain):
        """Chain given by generator lists for A_1 .. A_k (A_0 and the trivial
        top are added automatically)."""
        full = subgroup_span(group, group.generators())
        subs = [subgroup_span(group, [group.element(c) for c in gens])
                for gens in gens_chain]
        triv = subgroup_span(group, [])
        return cls(group, (full,) + tuple(subs) + (triv,))


@dataclass(frozen=True)
class RelationSystem:
    """Finitely many weighted relations (m, j): m . fam must lie in level j."""

    n: int
    relations: tuple

    def __post_init__(self):
        rels = tuple((tuple(int(c) for c in m), int(j)) for m, j in self.relations)
        for m, j in rels:
            if len(m) != self.n:
                raise ShapeError("relation width does not match variable count")
            if j < 1:
                raise ValueError("relation levels start at 1")
        object.__setattr__(self, "relations", rels)

    def reduced(self, modulus):
        return RelationSystem(self.n, tuple((tuple(c % modulus for c in m), j)
                                            for m, j in self.relations))


def relation_check(A, fam, R):
    """Whether the family satisfies the relation system inside A's chain."""
    if len(fam) != R.n:
        raise ShapeError("family length does not match variable count")
    for g in fam:
        if g.group.moduli != A.ambient.moduli:
            raise ShapeError("family element outside the ambient group")
    zero = A.ambient.zero()
    for m, j in R.relations:
        acc = zero
        for c, g in zip(m, fam):
            acc = acc + c * g
        if acc not in A.level(j):
            return False
    return True


class GroupHom:
    """Homomorphism between finite abelian groups, given on basis vectors."""

    def __init__(self, src, dst, images):
        self.src = src
        self.dst = dst
        images = tuple(images)
        if len(images) != src.rank:
            raise ShapeError("need one image per source basis vector")
        for img, m in zip(images, src.moduli):
            if not (m * img).is_zero():
                raise ValueError("images do not respect source relations")
        self.images = images

    def __call__(self, elem):
        if elem.group.moduli != self.src.moduli:
            raise ShapeError("element not in the source group")
        acc = self.dst.zero()
        for c, img in zip(elem.coeffs, self.images):
            acc = acc + c * img
        return acc

    def is_injective(self):
        seen = set()
        for e in self.src.elements():
            v = self(e).coeffs
            if v in seen:
                return False
            seen.add(v)
        return True


@dataclass(frozen=True)
class FilteredMorphism:
    """Filtration-respecting homomorphism between filtered groups."""

    source: FilteredGroup
    target: FilteredGroup
    hom: GroupHom

    def __post_init__(self):
        depth = max(len(self.source.chain), len(self.target.chain))
        for j in range(depth):
            for g in self.source.level(j).generators:
                if self.hom(g) not in self.target.level(j):
                    raise ValueError(f"morphism does not respect level {j}")

    def __call__(self, elem):
        return self.hom(elem)


class FilteredEmbedding:
    """A filtered subgroup A of a filtered group B, with the induced chain
    A_i = iota(A) cap B_i and an abstract presentation of A."""

    def __init__(self, amb, sub_gens):
        self.amb = amb
        gens = []
        for g in sub_gens:
            if g.group.moduli != amb.ambient.moduli:
                raise ShapeError("subgroup generator outside the ambient group")
            gens.append(g)
        self.image = subgroup_span(amb.ambient, gens)
        self.image_chain = tuple(self.image.intersection(b) for b in amb.chain)
        # abstract presentation of A with the induced filtration
        pres = _present_subgroup(amb.ambient, self.image)
        self.sub_group, self._to_ambient, self._from_ambient = pres
        sub_chain = []
        for level in self.image_chain:
            sub_chain.append(subgroup_span(
                self.sub_group, [self._from_ambient(g) for g in level.generators]))
        self.sub = FilteredGroup(self.sub_group, tuple(sub_chain))
        self.iota = GroupHom(self.sub_group, amb.ambient,
                             [self._to_ambient(self.sub_group.generator(i))
                              for i in range(self.sub_group.rank)])

    @property
    def degree(self):
        return self.amb.degree


def _present_subgroup(ambient, sub):
    """Abstract presentation of a subgroup: a FinAbGroup isomorphic to it,
    with maps to and from ambient coordinates."""
    gens = [list(g.coeffs) for g in sub.generators]
    n = len(gens)
    if n == 0:
        grp = FinAbGroup((1,))
        return grp, (lambda e: ambient.zero()), (lambda g: grp.zero())
    r = ambient.rank
    gmat = [[gens[t][i] for t in range(n)] for i in range(r)]
    # relation lattice {c : sum c_t gens_t = 0 in ambient}
    rel_gens = intlinalg.kernel_mod_hom(
        gmat, [ambient.exponent] * n, list(ambient.moduli))
    rel_cols = [list(v) for v in rel_gens]
    rel_cols += [[ambient.exponent if i == t else 0 for i in range(n)] for t in range(n)]
    rmat = [[col[i] for col in rel_cols] for i in range(n)]
    u, uinv, d, _ = intlinalg.smith_normal_form(rmat)
    divisors = [d[i][i] for i in range(n)]
    kept = [i for i, di in enumerate(divisors) if di > 1]
    grp = FinAbGroup(tuple(divisors[i] for i in kept) or (1,))

    def to_ambient(e):
        y = [0] * n
        for pos, i in enumerate(kept):
            y[i] = e.coeffs[pos]
        c = intlinalg.mat_vec(uinv, y)
        acc = ambient.zero()
        for t, ct in enumerate(c):
            acc = acc + ct * sub.generators[t]
        return acc

    def from_ambient(g):
        # solve sum c_t gens_t = g, then map through U
        target = list(g.coeffs)
        mat = [gmat[i] + [ambient.moduli[i] if t == i else 0 for t in range(r)]
               for i in range(r)]
        sol = intlinalg.solve_integer(mat, target)
        if sol is None:
            raise ValueError("element is not in the subgroup")
        c = sol[:n]
        y = intlinalg.mat_vec(u, c)
        coeffs = [y[i] % divisors[i] for i in kept] or [0]
        return grp.element(coeffs)

    return grp, to_ambient, from_ambient


def _satisfied_relation_generators(amb, fam, levels):
    """Generators of {m mod exp(B) : m . fam in levels[j]} for each level j.

    Each set is a subgroup of (Z/exp(B))^n because the levels are subgroups;
    generators capture the full satisfied system exactly.
    """
    B = amb.ambient
    exp = B.exponent
    n = len(fam)
    out = {}
    for j, level in levels.items():
        lat = level.sum_with(subgroup_span(B, []))  # defensive copy
        q = lat.quotient()
        cols = [q.project(g) for g in fam]
        rows = [[cols[t].coeffs[i] for t in range(n)]
                for i in range(q.group.rank)]
        scaled = [[rows[i][t] * (q.group.exponent // q.group.moduli[i])
                   for t in range(n)] for i in range(q.group.rank)]
        gens = intlinalg.kernel_mod_hom(
            scaled, [exp] * n, [q.group.exponent] * q.group.rank)
        out[j] = gens
    return out


def purity_witness(E, R, fam, exhaustive_bound=4096):
    """A family a in iota(A) with m.(b - a) in B_j for every relation, or
    None when no witness exists.

    The premise (m.b lands in the image of A/A_j) is checked first and its
    violation raised distinctly.  Small instances are searched exhaustively
    in lexicographic order (least witness); otherwise the witness conditions
    are solved exactly as an integer linear system.
    """
    B = E.amb.ambient
    if len(fam) != R.n:
        raise ShapeError("family length does not match variable count")
    R = R.reduced(B.exponent)
    for m, j in R.relations:
        acc = B.zero()
        for c, g in zip(m, fam):
            acc = acc + c * g
        if acc not in E.image.sum_with(E.amb.level(j)):
            raise PremiseViolated(f"relation {(m, j)} has no solution mod level {j}")
    return _solve_witness(E, R.relations, fam, exhaustive_bound)


def _solve_witness(E, relations, fam, exhaustive_bound):
    B = E.amb.ambient
    n = len(fam)
    A_elems_count = E.image.order
    if A_elems_count ** n <= exhaustive_bound:
        a_elems = E.image.elements()
        for cand in product(a_elems, repeat=n):
            ok = True
            for m, j in relations:
                acc = B.zero()
                for c, bi, ai in zip(m, fam, cand):
                    acc = acc + c * (bi - ai)
                if acc not in E.amb.level(j):
                    ok = False
                    break
            if ok:
                return list(cand)
        return None
    return _solve_witness_linear(E, relations, fam)


def _solve_witness_linear(E, relations, fam):
    """Exact integer solve of the witness conditions: unknowns are the
    subgroup-generator coefficients of each a_i plus lattice slack."""
    B = E.amb.ambient
    r = B.rank
    n = len(fam)
    agens = [list(g.coeffs) for g in E.image.generators]
    na = len(agens)
    if na == 0:
        for m, j in relations:
            acc = B.zero()
            for c, bi in zip(m, fam):
                acc = acc + c * bi
            if acc not in E.amb.level(j):
                return None
        return [B.zero() for _ in range(n)]
    rows = []
    rhs = []
    slack_cols = []
    col_count = n * na
    for m, j in relations:
        level = E.amb.level(j)
        lat = [list(g.coeffs) for g in level.generators]
        lat += [[B.moduli[i] if t == i else 0 for t in range(r)][:] for i in range(r)]
        base = len(slack_cols)
        slack_cols.extend(lat)
        target = [0] * r
        for c, bi in zip(m, fam):
            for i in range(r):
                target[i] += c * bi.coeffs[i]
        block = []
        for i in range(r):
            row = [0] * col_count
            for t in range(n):
                for s in range(na):
                    row[t * na + s] = m[t] * agens[s][i]
            block.append((row, base, [lat_col[i] for lat_col in lat], target[i]))
        rows.append((block, len(lat)))
    total_slack = len(slack_cols)
    mat = []
    vec = []
    offset = 0
    for block, width in rows:
        for row, base, lat_entries, t in block:
            full = row + [0] * total_slack
            for w, entry in enumerate(lat_entries):
                full[col_count + base + w] = entry
            mat.append(full)
            vec.append(t)
        offset += width
    sol = intlinalg.solve_integer(mat, vec)
    if sol is None:
        return None
    out = []
    for t in range(n):
        acc = B.zero()
        for s in range(na):
            acc = acc + (sol[t * na + s] % B.exponent) * E.image.generators[s]
        out.append(acc)
    return out


class SplitStatus(enum.Enum):
    SPLIT = "split"
    NO_SPLIT = "no_split"
    UNDECIDED = "undecided"


@dataclass
class SplitResult:
    status: SplitStatus
    section: object            # FilteredMorphism or None
    quotient: FilteredGroup
    project: object            # callable B.ambient -> quotient group
    detail: str = ""

    def retraction(self):
        """r(b) = b - s(pi(b)); a filtered morphism with r o iota = id."""
        if self.section is None:
            return None
        sec = self.section

        def r(b):
            return b - sec.hom(self.project(b))
        return r


def quotient_filtration(E):
    """The quotient C = B/iota(A) with chain C_j = pi(B_j)."""
    q = E.image.quotient()
    chain = []
    for level in E.amb.chain:
        chain.append(subgroup_span(q.group, [q.project(g) for g in level.generators]))
    return q, FilteredGroup(q.group, tuple(chain))


def split_section(E, exhaustive_bound=4096, guard=10**6):
    """A filtration-respecting section of B -> B/iota(A), when one exists.

    Follows the purity argument: lift the quotient generators, collect the
    full relation system they satisfy (generators of kernel subgroups mod
    exp(B)), and solve for a purity witness; the corrected lifts define the
    section.  Absence of a witness proves no section exists, because any
    section yields a witness by subtraction.
    """
    B = E.amb.ambient
    q, C = quotient_filtration(E)
    gens = [C.ambient.generator(i) for i in range(C.ambient.rank)]
    lifts = [q.lift(e) for e in gens]
    if C.ambient.order == 1:
        hom = GroupHom(C.ambient, B, [B.zero() for _ in gens])
        sec = FilteredMorphism(C, E.amb, hom)
        return SplitResult(SplitStatus.SPLIT, sec, C, q.project, "trivial quotient")
    levels = {j: subgroup_span(C.ambient,
                               [g for g in C.level(j).generators])
              for j in range(1, len(E.amb.chain))}
    rel_gens = _satisfied_relation_generators_over(C.ambient, gens, levels, B.exponent)
    relations = []
    for j, gens_j in rel_gens.items():
        for m in gens_j:
            relations.append((tuple(m), j))
    if E.image.order ** len(gens) > exhaustive_bound and \
            len(relations) * B.rank * len(gens) > guard:
        return SplitResult(SplitStatus.UNDECIDED, None, C, q.project,
                           "search bounds exceeded")
    witness = _solve_witness(E, relations, lifts, exhaustive_bound)
    if witness is None:
        return SplitResult(SplitStatus.NO_SPLIT, None, C, q.project,
                           "no purity witness for the generator relations")
    corrected = [b - a for b, a in zip(lifts, witness)]
    hom = GroupHom(C.ambient, B, corrected)
    sec = FilteredMorphism(C, E.amb, hom)
    for e in gens:
        assert q.project(hom(e)).coeffs == e.coeffs
    return SplitResult(SplitStatus.SPLIT, sec, C, q.project, "")


def _satisfied_relation_generators_over(cgroup, fam, levels, coeff_modulus):
    """Generators of {m mod coeff_modulus : m . fam in level_j} inside the
    quotient group, for each level."""
    n = len(fam)
    out = {}
    for j, level in levels.items():
        qj = level.quotient()
        cols = [qj.project(g) for g in fam]
        rows = [[cols[t].coeffs[i] for t in range(n)]
                for i in range(qj.group.rank)]
        scaled = [[rows[i][t] * (qj.group.exponent // qj.group.moduli[i])
                   for t in range(n)] for i in range(qj.group.rank)]
        gens = intlinalg.kernel_mod_hom(
            scaled, [coeff_modulus] * n, [qj.group.exponent] * qj.group.rank)
        out[j] = gens
    return out


def exhaustive_section_search(E, guard=10**6):
    """Brute-force oracle: try every candidate lift of the quotient
    generators and test for a filtered section directly."""
    B = E.amb.ambient
    q, C = quotient_filtration(E)
    gens = [C.ambient.generator(i) for i in range(C.ambient.rank)]
    if C.ambient.order == 1:
        return GroupHom(C.ambient, B, [B.zero() for _ in gens])
    a_elems = E.image.elements()
    lifts = [q.lift(e) for e in gens]
    c_elems = list(C.ambient.elements())
    if len(a_elems) ** len(gens) * len(c_elems) > guard:
        raise GuardExceeded("oracle search space exceeds guard")
    depth = len(E.amb.chain)
    for cand in product(a_elems, repeat=len(gens)):
        images = [b - a for b, a in zip(lifts, cand)]
        if any(not (m * img).is_zero()
               for img, m in zip(images, C.ambient.moduli)):
            continue
        hom = GroupHom(C.ambient, B, images)
        ok = True
        for c in c_elems:
            v = hom(c)
            if q.project(v).coeffs != c.coeffs:
                ok = False
                break
            for j in range(1, depth):
                if c in C.level(j) and v not in E.amb.level(j):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return hom
    return None


def pure_criterion_cyclic(E):
    """For trivial filtrations: iota(A) cap nB = n iota(A) for every divisor
    n of exp(B).  When true, a section must exist (cross-checked by tests)."""
    for level in E.amb.chain[1:]:
        if not level.is_trivial():
            raise ValueError("criterion applies to trivial filtrations only")
    B = E.amb.ambient
    full = subgroup_span(B, B.generators())
    exp = B.exponent
    for n in range(1, exp + 1):
        if exp % n != 0:
            continue
        nB = full.scaled(n)
        lhs = E.image.intersection(nB)
        rhs = E.image.scaled(n)
        if lhs.order != rhs.order:
            return False
    return True


def finite_split_check(E, extra_gens):
    """Whether the sequence restricted to B' = <iota(A), extra generators>
    (with the induced filtration) splits."""
    B = E.amb.ambient
    bp = subgroup_span(B, list(E.image.generators) + list(extra_gens))
    pres_grp, to_amb, from_amb = _present_subgroup(B, bp)
    chain = []
    for level in E.amb.chain:
        inter = bp.intersection(level)
        chain.append(subgroup_span(pres_grp, [from_amb(g) for g in inter.generators]))
    Bp = FilteredGroup(pres_grp, tuple(chain))
    sub_gens = [from_amb(g) for g in E.image.generators]
    Ep = FilteredEmbedding(Bp, sub_gens)
    res = split_section(Ep)
    if res.status == SplitStatus.UNDECIDED:
        raise GuardExceeded("restricted splitting undecided within bounds")
    return res.status == SplitStatus.SPLIT


def is_pure_up_to(E, n, family_bound=4096, exhaustive_bound=4096):
    """Exhaustive purity up to length n for tiny groups.

    For each family b in B^n, the premise-satisfying relations form subgroups
    of (Z/exp(B))^n per level (computed exactly through kernel generators),
    so a single witness solve per family settles every relation system at
    once.  The only cap is on family enumeration; it is reported when hit.
    """
    B = E.amb.ambient
    if B.order ** n > family_bound:
        raise GuardExceeded(
            f"family space {B.order ** n} exceeds bound {family_bound}")
    elems = list(B.elements())
    depth = len(E.amb.chain)
    for fam in product(elems, repeat=n):
        levels = {}
        for j in range(1, depth):
            levels[j] = E.image.sum_with(E.amb.level(j))
        rel_gens = _satisfied_relation_generators(E.amb, list(fam), levels)
        relations = [(tuple(m), j) for j, gens in rel_gens.items() for m in gens]
        witness = _solve_witness(E, relations, list(fam), exhaustive_bound)
        if witness is None:
            return False, fam
    return True, None
