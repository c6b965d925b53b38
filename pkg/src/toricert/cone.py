"""Strongly convex rational polyhedral cones.

A cone is stored by its canonical minimal generating set: primitive
integer ray vectors, lexicographically sorted, with redundant generators
removed. Equality is therefore structural. Facet inequalities are derived
lazily by exact Fourier-Motzkin projection of the generator description
and cached; the lazy initialization is idempotent, so concurrent readers
can only ever observe the one canonical value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .linalg import (
    IntMatrix,
    LinAlgError,
    Vector,
    kernel_basis,
    nonneg_rational_solve,
    smith_normal_form,
    vec_gcd,
)


class ConeError(ValueError):
    """Invalid cone input (zero generator, wrong dimension, line, ...)."""


def primitive(v: Vector) -> Vector:
    """Divide an integer vector by the gcd of its entries.

    The zero vector has no direction and is rejected.
    """
    g = vec_gcd(v)
    if g == 0:
        raise ConeError("primitive: zero vector")
    return tuple(a // g for a in v)


def _primitive_signed(v) -> Vector:
    """Primitive integer vector from a rational one, same direction."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = tuple(int(Fraction(x) * den) for x in v)
    return primitive(ints)


def span_basis(vectors: list[Vector], rank: int) -> list[Vector]:
    """Saturated integer basis of the rational span of the given vectors."""
    if not vectors:
        return []
    mat = IntMatrix.from_columns(vectors)
    dec = smith_normal_form(mat)
    s = sum(1 for d in dec.invariant_factors if d != 0)
    from .linalg import inverse_unimodular

    uinv = inverse_unimodular(dec.u)
    return [uinv.column(j) for j in range(s)]


def _fm_project_rays(rays_in_span: list[Vector], s: int) -> list[Vector]:
    """Facet normals of the full-dimensional cone spanned by the given rays.

    The cone lives in Z^s and the rays span it. Works on the system
    { y - R @ lam = 0, lam >= 0 } over variables (y, lam), eliminating
    the lam variables: equations by exact substitution, leftovers by
    Fourier-Motzkin combination. Rows are kept as primitive integer
    vectors throughout.
    """
    k = len(rays_in_span)
    nvar = s + k
    # row layout: (y_1..y_s, lam_1..lam_k)
    equations: list[list[int]] = []
    for i in range(s):
        row = [0] * nvar
        row[i] = 1
        for j, u in enumerate(rays_in_span):
            row[s + j] = -u[i]
        equations.append(row)
    inequalities: list[list[int]] = []
    for j in range(k):
        row = [0] * nvar
        row[s + j] = 1
        inequalities.append(row)

    def reduce_row(row: list[int]) -> tuple[int, ...] | None:
        g = vec_gcd(tuple(row))
        if g == 0:
            return None
        return tuple(a // g for a in row)

    for var in range(nvar - 1, s - 1, -1):
        eq_idx = next((i for i, e in enumerate(equations) if e[var] != 0), None)
        if eq_idx is not None:
            e = equations.pop(eq_idx)
            c = e[var]
            new_eqs = []
            for r in equations:
                d = r[var]
                if d:
                    g = gcd(abs(c), abs(d))
                    r = [(abs(c) // g) * x - ((d * (1 if c > 0 else -1)) // g) * y
                         for x, y in zip(r, e)]
                rr = reduce_row(r) if any(r) else None
                if rr is not None:
                    new_eqs.append(list(rr))
            equations = new_eqs
            new_ineqs = []
            for r in inequalities:
                d = r[var]
                if d:
                    g = gcd(abs(c), abs(d))
                    r = [(abs(c) // g) * x - ((d * (1 if c > 0 else -1)) // g) * y
                         for x, y in zip(r, e)]
                rr = reduce_row(r)
                if rr is not None and any(rr[:var]):
                    new_ineqs.append(list(rr))
            inequalities = new_ineqs
        else:
            pos = [r for r in inequalities if r[var] > 0]
            neg = [r for r in inequalities if r[var] < 0]
            keep = [r for r in inequalities if r[var] == 0]
            seen = {tuple(r) for r in keep}
            for p, q in itertools.product(pos, neg):
                comb = [(-q[var]) * x + p[var] * y for x, y in zip(p, q)]
                rr = reduce_row(comb)
                if rr is not None and any(rr[:var]) and rr not in seen:
                    seen.add(rr)
                    keep.append(list(rr))
            inequalities = keep
    if equations:
        # cannot happen for a spanning ray set; guard against misuse
        raise ConeError("projection left equations: rays do not span the space")

    # dedupe and keep only genuine facets: valid inequalities whose tight
    # ray set spans a hyperplane of the s-dimensional span.
    normals = sorted({tuple(r[:s]) for r in inequalities})
    facets = []
    for w in normals:
        tight = [u for u in rays_in_span if sum(a * b for a, b in zip(w, u)) == 0]
        if any(sum(a * b for a, b in zip(w, u)) < 0 for u in rays_in_span):
            raise ConeError("internal: projected inequality violated by a ray")
        if not tight:
            if s == 1:
                facets.append(w)  # the single inequality of a 1-d cone
            continue
        tdim = IntMatrix.from_columns(tight).rank()
        if tdim == s - 1:
            facets.append(w)
    return sorted(set(facets))


@dataclass(frozen=True)
class QuotientType:
    """Canonical type (d, k) of a two-dimensional cyclic quotient cone."""

    order: int
    weight: int

    @property
    def smooth(self) -> bool:
        return self.order == 1

    @property
    def label(self) -> str | None:
        if self.order == 1:
            return "smooth"
        if self.weight == self.order - 1:
            return f"A{self.order - 1}"
        return None


class Cone:
    """Strongly convex rational polyhedral cone, canonical generators."""

    __slots__ = ("ambient_rank", "rays", "_span_u", "_span_dim", "_facets_span",
                 "_faces")

    def __init__(self, ambient_rank: int, rays: tuple[Vector, ...]):
        self.ambient_rank = ambient_rank
        self.rays = rays
        self._span_u = None
        self._span_dim = None
        self._facets_span = None
        self._faces = None

    # -- identity ----------------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, Cone)
                and self.ambient_rank == other.ambient_rank
                and self.rays == other.rays)

    def __hash__(self):
        return hash((self.ambient_rank, self.rays))

    def __repr__(self):
        return f"Cone(rank={self.ambient_rank}, rays={list(self.rays)})"

    @classmethod
    def zero(cls, ambient_rank: int) -> "Cone":
        return cls(ambient_rank, ())

    @property
    def is_zero(self) -> bool:
        return not self.rays

    @property
    def nrays(self) -> int:
        return len(self.rays)

    # -- derived geometry (computed once, cached) ---------------------------
    def _ensure_span(self) -> None:
        if self._span_u is not None:
            return
        if not self.rays:
            self._span_u = IntMatrix.identity(self.ambient_rank)
            self._span_dim = 0
            return
        dec = smith_normal_form(IntMatrix.from_columns(list(self.rays)))
        self._span_dim = sum(1 for d in dec.invariant_factors if d != 0)
        self._span_u = dec.u

    @property
    def dim(self) -> int:
        self._ensure_span()
        return self._span_dim

    def _span_coords(self, v) -> tuple | None:
        """Coordinates of v in the span, or None if v is outside it."""
        self._ensure_span()
        s = self._span_dim
        img = tuple(sum(Fraction(a) * Fraction(x) for a, x in zip(row, v))
                    for row in self._span_u.entries)
        if any(x != 0 for x in img[s:]):
            return None
        return img[:s]

    def _ensure_facets(self) -> None:
        if self._facets_span is not None:
            return
        self._ensure_span()
        s = self._span_dim
        rays_in_span = [tuple(int(x) for x in self._span_coords(u)) for u in self.rays]
        self._facets_span = tuple(_fm_project_rays(rays_in_span, s)) if s else ()

    @property
    def facets(self) -> tuple[Vector, ...]:
        """Ambient integer facet normals (restricted to the span)."""
        self._ensure_facets()
        s = self._span_dim
        urows = self._span_u.entries[:s]
        out = []
        for w in self._facets_span:
            amb = tuple(sum(w[i] * urows[i][j] for i in range(s))
                        for j in range(self.ambient_rank))
            out.append(amb)
        return tuple(out)

    @property
    def span_equations(self) -> tuple[Vector, ...]:
        """Integer normals cutting out the linear span of the cone."""
        self._ensure_span()
        return tuple(self._span_u.entries[self._span_dim:])

    # -- predicates ----------------------------------------------------------
    def contains(self, p) -> bool:
        if len(p) != self.ambient_rank:
            raise ConeError(f"point dimension {len(p)} != rank {self.ambient_rank}")
        coords = self._span_coords(p)
        if coords is None:
            return False
        if not self.rays:
            return True  # coords is the empty tuple: p == 0
        self._ensure_facets()
        return all(sum(Fraction(a) * x for a, x in zip(w, coords)) >= 0
                   for w in self._facets_span)

    def relint_contains(self, p) -> bool:
        if len(p) != self.ambient_rank:
            raise ConeError(f"point dimension {len(p)} != rank {self.ambient_rank}")
        coords = self._span_coords(p)
        if coords is None:
            return False
        if not self.rays:
            return True
        self._ensure_facets()
        return all(sum(Fraction(a) * x for a, x in zip(w, coords)) > 0
                   for w in self._facets_span)

    def faces(self) -> list["Cone"]:
        """All faces, from the zero cone up to the cone itself."""
        if self._faces is not None:
            return list(self._faces)
        self._ensure_facets()
        ray_coords = [self._span_coords(u) for u in self.rays]
        tight_sets = []
        for w in self._facets_span:
            tight_sets.append(frozenset(
                i for i, y in enumerate(ray_coords)
                if sum(Fraction(a) * x for a, x in zip(w, y)) == 0))
        all_idx = frozenset(range(self.nrays))
        masks = {all_idx}
        for r in range(1, len(tight_sets) + 1):
            for combo in itertools.combinations(tight_sets, r):
                mask = all_idx
                for t in combo:
                    mask &= t
                masks.add(mask)
        faces = []
        for mask in masks:
            rays = tuple(sorted(self.rays[i] for i in mask))
            faces.append(Cone(self.ambient_rank, rays))
        faces.sort(key=lambda c: (c.nrays, c.rays))
        self._faces = tuple(faces)
        return list(faces)

    def is_face_of(self, other: "Cone") -> bool:
        return self in other.faces()


def cone_from_rays(ambient_rank: int, generators) -> Cone:
    """Canonical cone from a generator list.

    Generators are primitivized, duplicates and redundant (non-extreme)
    generators removed, the result sorted lexicographically. Raises
    ConeError when the generators span a line (not strongly convex).
    """
    gens = []
    for v in generators:
        v = tuple(int(x) for x in v)
        if len(v) != ambient_rank:
            raise ConeError(f"generator dimension {len(v)} != rank {ambient_rank}")
        if all(x == 0 for x in v):
            raise ConeError("zero generator")
        p = primitive(v)
        if p not in gens:
            gens.append(p)
    gens.sort()
    if gens:
        mat = IntMatrix.from_columns(gens)
        for u in gens:
            if nonneg_rational_solve(mat, tuple(-x for x in u)) is not None:
                raise ConeError(f"not strongly convex: contains the line through {u}")
        kept = list(gens)
        for u in list(kept):
            others = [w for w in kept if w != u]
            if not others:
                continue
            if nonneg_rational_solve(IntMatrix.from_columns(others), u) is not None:
                kept.remove(u)
        gens = kept
    return Cone(ambient_rank, tuple(gens))


def intersect(a: Cone, b: Cone) -> Cone:
    """Geometric intersection of two cones in the same ambient lattice.

    Every extreme ray of the intersection is the 1-dimensional span
    intersection of a face of each cone, so candidates are enumerated
    over face pairs and filtered by exact membership.
    """
    if a.ambient_rank != b.ambient_rank:
        raise ConeError("intersect: ambient rank mismatch")
    n = a.ambient_rank
    candidates: list[Vector] = []
    seen: set[Vector] = set()
    faces_a = [f for f in a.faces() if f.nrays]
    faces_b = [f for f in b.faces() if f.nrays]
    for fa, fb in itertools.product(faces_a, faces_b):
        ba = span_basis(list(fa.rays), n)
        bb = span_basis(list(fb.rays), n)
        stacked = IntMatrix.from_columns(ba + [tuple(-x for x in c) for c in bb])
        ker = kernel_basis(stacked)
        if ker.cols != 1:
            continue
        alpha = ker.column(0)[:len(ba)]
        vec = tuple(sum(alpha[i] * ba[i][j] for i in range(len(ba))) for j in range(n))
        if all(x == 0 for x in vec):
            continue
        vec = primitive(vec)
        for cand in (vec, tuple(-x for x in vec)):
            if cand in seen:
                continue
            if a.contains(cand) and b.contains(cand):
                seen.add(cand)
                candidates.append(cand)
                break
    if not candidates:
        return Cone.zero(n)
    return cone_from_rays(n, candidates)


def is_simplicial(c: Cone) -> bool:
    """Ray generators linearly independent over the rationals."""
    if c.is_zero:
        return True
    return IntMatrix.from_columns(list(c.rays)).rank() == c.nrays


def is_smooth(c: Cone) -> bool:
    """Simplicial and the rays extend to a Z-basis of the ambient lattice."""
    if c.is_zero:
        return True
    if not is_simplicial(c):
        return False
    facs = smith_normal_form(IntMatrix.from_columns(list(c.rays))).invariant_factors
    return all(d == 1 for d in facs[:c.nrays])


def quotient_type_2d(c: Cone) -> QuotientType:
    """Type (d, k) of a 2-dimensional cone in a rank-2 lattice.

    Normalizes the first generator to (0, 1) by a unimodular change of
    basis, bringing the second to (d, -k); the reported k is the smaller
    of k and its inverse mod d, which absorbs the choice of which
    generator is normalized first. d = 1 means smooth; k = d - 1 is the
    A_{d-1} series.
    """
    if c.ambient_rank != 2 or c.dim != 2:
        raise ConeError("quotient_type_2d requires a 2-dimensional cone in rank 2")
    if not is_simplicial(c):
        raise ConeError("quotient_type_2d requires a simplicial cone")
    u, v = c.rays
    # unimodular m with m @ u = (0, 1): top row (-u2, u1), bottom solves x*u1+y*u2=1
    from .linalg import _exgcd

    _, x, y = _exgcd(u[0], u[1])
    m = ((-u[1], u[0]), (x, y))
    a = m[0][0] * v[0] + m[0][1] * v[1]
    b = m[1][0] * v[0] + m[1][1] * v[1]
    if a < 0:
        a, b = -a, b  # diag(-1, 1) fixes (0, 1)
    d = a
    if d == 0:
        raise ConeError("degenerate cone")
    k = (-b) % d
    if d > 1:
        k = min(k, pow(k, -1, d))
    else:
        k = 0
    return QuotientType(d, k)
