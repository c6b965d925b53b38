"""Torus-invariant divisors, class and Picard groups, cyclic H^1.

Group presentations carry torsion through every computation; the desk
examples happen to be torsion-free but quotient constructions are not,
and truncating torsion would silently corrupt H^1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import lcm

from .fan import Fan, FanError, is_complete
from .linalg import (
    IntMatrix,
    Vector,
    hermite_normal_form,
    kernel_basis,
    smith_normal_form,
    solve_diophantine,
)


class DivisorError(ValueError):
    pass


@dataclass(frozen=True)
class TorusDivisor:
    """Formal sum over the rays of a fan: D = sum a_i D_i."""

    fan: Fan
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if len(self.coefficients) != len(self.fan.rays):
            raise DivisorError(
                f"{len(self.coefficients)} coefficients for {len(self.fan.rays)} rays")


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """Finitely generated abelian group: Z^free_rank + sum Z/t_i.

    ``projection`` (rows: torsion coordinates first, then free ones) maps
    the ambient coordinates onto the group when the presentation arises as
    an explicit quotient of an ambient Z^d; abstract presentations (Pic,
    H^1) carry none.
    """

    free_rank: int
    torsion: tuple[int, ...]
    projection: IntMatrix | None = None
    notes: tuple[str, ...] = ()

    @property
    def order(self) -> int | None:
        """Group order when finite, else None."""
        if self.free_rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def describe(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def _canonical_free_row(row: Vector) -> Vector:
    lead = next((x for x in row if x != 0), 0)
    return tuple(-x for x in row) if lead < 0 else row


def cokernel_presentation(a: IntMatrix, ambient: int) -> AbelianGroupPresentation:
    """Presentation of Z^ambient / (column span of a)."""
    if a.cols == 0:
        return AbelianGroupPresentation(ambient, (),
                                        IntMatrix.identity(ambient))
    dec = smith_normal_form(a)
    facs = dec.invariant_factors
    r = sum(1 for d in facs if d != 0)
    torsion_rows = []
    torsion = []
    for i, d in enumerate(facs):
        if d > 1:
            torsion.append(d)
            torsion_rows.append(tuple(x % d for x in dec.u.row(i)))
    free_rows = [_canonical_free_row(dec.u.row(i)) for i in range(r, ambient)]
    proj = IntMatrix.from_rows(torsion_rows + free_rows) \
        if (torsion_rows or free_rows) else IntMatrix(tuple(() for _ in range(0)))
    return AbelianGroupPresentation(ambient - r, tuple(torsion), proj)


def div_of_character(f: Fan, chi: Vector) -> TorusDivisor:
    """div(chi) = sum <u_i, chi> D_i over the rays."""
    if len(chi) != f.rank:
        raise DivisorError(f"character length {len(chi)} != rank {f.rank}")
    coeffs = tuple(sum(u * x for u, x in zip(ray, chi)) for ray in f.rays)
    return TorusDivisor(f, coeffs)


def divisor_matrix(f: Fan) -> IntMatrix:
    """Matrix of the character-to-divisor map, one row per ray."""
    return IntMatrix.from_rows(f.rays)


def class_group(f: Fan) -> AbelianGroupPresentation:
    """Z^rays / principal divisors, by Smith reduction of the ray pairing."""
    dmat = divisor_matrix(f)
    pres = cokernel_presentation(dmat, len(f.rays))
    if dmat.rank() < f.rank:
        pres = AbelianGroupPresentation(
            pres.free_rank, pres.torsion, pres.projection,
            pres.notes + ("div not injective: rays do not span",))
    return pres


def class_of(pres: AbelianGroupPresentation, coefficients: Vector) -> tuple[int, ...]:
    """Coordinates of a divisor's class under the presentation projection."""
    if pres.projection is None:
        raise DivisorError("presentation has no projection")
    raw = pres.projection.apply(tuple(coefficients))
    out = list(raw)
    for i, t in enumerate(pres.torsion):
        out[i] %= t
    return tuple(out)


@dataclass
class CartierCertificate:
    cartier: bool
    local_data: dict  # maximal cone index set -> character m_sigma
    failures: list  # maximal cone index sets with no integral local data


def is_cartier(f: Fan, d: TorusDivisor) -> CartierCertificate:
    """Local-character test: on each maximal cone sigma there must be an
    integral m with <u_i, m> = -a_i for every ray i of sigma."""
    if d.fan is not f and d.fan != f:
        raise DivisorError("divisor belongs to a different fan")
    local = {}
    failures = []
    for idx in f.maximal_cones():
        order = sorted(idx)
        if not order:
            local[idx] = (0,) * f.rank
            continue
        mat = IntMatrix.from_rows([f.rays[i] for i in order])
        rhs = tuple(-d.coefficients[i] for i in order)
        sol = solve_diophantine(mat, rhs)
        if sol is None:
            failures.append(idx)
        else:
            local[idx] = sol[0]
    return CartierCertificate(not failures, local, failures)


def _cone_index(f: Fan, idx) -> int:
    facs = smith_normal_form(
        IntMatrix.from_columns([f.rays[i] for i in sorted(idx)])).invariant_factors
    out = 1
    for d in facs:
        if d:
            out *= d
    return out


@dataclass
class PicardGroup:
    presentation: AbelianGroupPresentation
    index_in_class_group: int | None  # None = infinite
    class_group: AbelianGroupPresentation
    generators_in_class_coords: list[tuple[int, ...]]
    search_radius: int
    notes: tuple[str, ...] = ()


def _subgroup_presentation(gens: list[Vector], torsion: tuple[int, ...],
                           free_rank: int) -> tuple[AbelianGroupPresentation, int | None]:
    """Presentation of the subgroup of (sum Z/t_i) + Z^free generated by
    ``gens`` (coordinates: torsion first), plus its index when finite."""
    g = len(torsion) + free_rank
    relation_cols = [tuple(t if j == i else 0 for j in range(g))
                     for i, t in enumerate(torsion)]
    all_cols = [tuple(v) for v in gens] + relation_cols
    if not all_cols:
        all_cols = [(0,) * g]
    stacked = IntMatrix.from_columns(all_cols)
    quotient = cokernel_presentation(stacked, g)
    index = quotient.order
    h, _ = hermite_normal_form(stacked)
    basis = [h.column(j) for j in range(h.cols)
             if any(x != 0 for x in h.column(j))]
    if not basis:
        return AbelianGroupPresentation(0, ()), index
    bmat = IntMatrix.from_columns(basis)
    rel_in_basis = []
    for col in relation_cols:
        sol = solve_diophantine(bmat, col)
        if sol is None:
            raise DivisorError("internal: torsion relation escapes subgroup lattice")
        rel_in_basis.append(sol[0])
    if rel_in_basis:
        x = IntMatrix.from_columns(rel_in_basis)
        pres = cokernel_presentation(x, len(basis))
    else:
        pres = AbelianGroupPresentation(len(basis), ())
    return AbelianGroupPresentation(pres.free_rank, pres.torsion), index


def picard_group(f: Fan, search_radius: int | None = None) -> PicardGroup:
    """Cartier classes inside the class group, by bounded enumeration.

    The box radius defaults to the lcm of the maximal-cone lattice
    indices l, which certifies the search on simplicial fans because
    l * (any Weil divisor) is Cartier there, so Pic contains l * Cl.
    """
    cert = is_complete(f)
    if not cert.complete:
        raise DivisorError("picard_group requires a complete fan")
    cl = class_group(f)
    notes: list[str] = []
    maxc = f.maximal_cones()
    simplicial = all(
        f.cone(c).nrays == f.cone_dim(c) for c in maxc)
    radius = search_radius
    if radius is None:
        radius = lcm(*(_cone_index(f, c) for c in maxc)) if maxc else 1
    if not simplicial:
        notes.append("fan not simplicial: bounded search not certified exhaustive")
    s = len(cl.torsion)
    fr = cl.free_rank
    uinv = None
    if cl.projection is not None and cl.projection.rows:
        # section of the projection: lift class coordinates back to divisors
        dec = smith_normal_form(divisor_matrix(f))
        uinv = IntMatrix.identity(len(f.rays))
        from .linalg import inverse_unimodular

        uinv = inverse_unimodular(dec.u)
        rank_r = sum(1 for x in dec.invariant_factors if x != 0)
        lift_cols = []
        for i, d in enumerate(dec.invariant_factors):
            if d > 1:
                lift_cols.append(uinv.column(i))
        for i in range(rank_r, len(f.rays)):
            lift_cols.append(uinv.column(i))
        lift = lift_cols
    found: list[tuple[int, ...]] = []
    ranges = [range(t) for t in cl.torsion] + [range(-radius, radius + 1)] * fr
    for combo in itertools.product(*ranges):
        coeffs = [0] * len(f.rays)
        for val, col in zip(combo, lift):
            # free rows were sign-canonicalized; undo via the raw lift and
            # re-check through class_of below
            for i in range(len(coeffs)):
                coeffs[i] += val * col[i]
        d = TorusDivisor(f, tuple(coeffs))
        target = class_of(cl, d.coefficients)
        if is_cartier(f, d).cartier:
            found.append(target)
    gens = sorted(set(found))
    certified = [tuple(radius if j == s + i else 0 for j in range(s + fr))
                 for i in range(fr)] if simplicial else []
    pres, index = _subgroup_presentation(gens + certified, cl.torsion, fr)
    return PicardGroup(pres, index, cl, gens, radius, tuple(notes))


# ---------------------------------------------------------------------------
# first cohomology of a cyclic action
# ---------------------------------------------------------------------------

def _module_relation_columns(rank: int, torsion: tuple[int, ...]) -> list[Vector]:
    g = len(torsion) + rank
    return [tuple(t if j == i else 0 for j in range(g))
            for i, t in enumerate(torsion)]


def _in_relation_lattice(v: Vector, torsion: tuple[int, ...], free_rank: int) -> bool:
    s = len(torsion)
    return (all(v[i] % torsion[i] == 0 for i in range(s))
            and all(x == 0 for x in v[s:]))


def h1_cyclic(action: IntMatrix, order: int,
              module: AbelianGroupPresentation | None = None) -> AbelianGroupPresentation:
    """H^1 of the cyclic group of the given order acting through ``action``.

    Computes ker(1 + s + ... + s^(order-1)) / im(s - 1) on the module
    (Z^g by default, or the presented group with torsion coordinates
    first). Raises on an action that does not satisfy the declared order
    or does not preserve the relation lattice.
    """
    if order < 1:
        raise DivisorError("order must be positive")
    g = action.rows
    if action.cols != g:
        raise DivisorError("action matrix must be square")
    if module is None:
        torsion: tuple[int, ...] = ()
        free_rank = g
    else:
        torsion = module.torsion
        free_rank = module.free_rank
        if len(torsion) + free_rank != g:
            raise DivisorError("module presentation size does not match the action")
    rel_cols = _module_relation_columns(free_rank, torsion)
    for col in rel_cols:
        if not _in_relation_lattice(action.apply(col), torsion, free_rank):
            raise DivisorError("action does not preserve the relation lattice")
    power = IntMatrix.identity(g)
    norm_rows = [[0] * g for _ in range(g)]
    for _ in range(order):
        for i in range(g):
            for j in range(g):
                norm_rows[i][j] += power.entries[i][j]
        power = action @ power
    for j in range(g):
        col = tuple(power.entries[i][j] - (1 if i == j else 0) for i in range(g))
        if not _in_relation_lattice(col, torsion, free_rank):
            raise DivisorError(f"action^{order} is not the identity on the module")
    norm = IntMatrix.from_rows(norm_rows)

    if rel_cols:
        stacked = IntMatrix.from_rows(
            [list(norm.row(i)) + [-c[i] for c in rel_cols] for i in range(g)])
    else:
        stacked = norm
    ker = kernel_basis(stacked)
    xparts = [tuple(ker.column(j)[:g]) for j in range(ker.cols)]
    xparts = [v for v in xparts if any(v)]
    if not xparts:
        return AbelianGroupPresentation(0, ())
    h, _ = hermite_normal_form(IntMatrix.from_columns(xparts))
    basis = [h.column(j) for j in range(h.cols) if any(h.column(j))]
    bmat = IntMatrix.from_columns(basis)
    sigma_minus_1 = IntMatrix.from_rows(
        [[action.entries[i][j] - (1 if i == j else 0) for j in range(g)]
         for i in range(g)])
    q_cols = [sigma_minus_1.column(j) for j in range(g)] + rel_cols
    coords = []
    for col in q_cols:
        sol = solve_diophantine(bmat, col)
        if sol is None:
            raise DivisorError("internal: coboundary escapes the cocycle lattice")
        coords.append(sol[0])
    x = IntMatrix.from_columns(coords)
    pres = cokernel_presentation(x, len(basis))
    return AbelianGroupPresentation(pres.free_rank, pres.torsion)
