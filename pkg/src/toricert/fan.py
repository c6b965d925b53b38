"""Fans of strongly convex cones and morphisms between them.

A fan is a ray list (primitive, distinct, construction order preserved)
plus a face-closed set of cones given as frozensets of ray indices; the
zero cone is the empty set and is always present. Pairwise compatibility
is certified on maximal cones with exact separating functionals, which is
equivalent to checking every pair because intersections of faces of
compatible cones are again common faces.

Completeness is decided by the wall-pairing criterion (every maximal cone
full-dimensional, every wall shared by exactly two maximal cones) and
cross-checked by deterministic sample-point membership.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cone import Cone, ConeError, cone_from_rays, is_smooth, primitive
from .linalg import IntMatrix, Vector, nonneg_rational_solve, vec_gcd

DEFAULT_SEED = 20260809
GRID_DIRECTIONS = 200
RANDOM_POINTS = 100


class FanError(ValueError):
    """Structurally unusable fan input."""


IndexSet = frozenset


def _cone_key(idx: frozenset) -> tuple[int, ...]:
    return tuple(sorted(idx))


class Fan:
    """Fan on Z^rank given by rays and ray-index cone sets."""

    def __init__(self, rank: int, rays, cones):
        if rank < 1:
            raise FanError("rank must be >= 1")
        rays = tuple(tuple(int(x) for x in r) for r in rays)
        for r in rays:
            if len(r) != rank:
                raise FanError(f"ray {r} has wrong dimension")
            if all(x == 0 for x in r):
                raise FanError("zero ray")
            if r != primitive(r):
                raise FanError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise FanError("duplicate rays")
        cone_sets = {frozenset()}
        for c in cones:
            idx = frozenset(int(i) for i in c)
            for i in idx:
                if not 0 <= i < len(rays):
                    raise FanError(f"cone index {i} out of range")
            cone_sets.add(idx)
        self.rank = rank
        self.rays = rays
        self.cones: frozenset[frozenset[int]] = frozenset(cone_sets)
        self._cone_cache: dict[frozenset[int], Cone] = {}

    def __eq__(self, other):
        return (isinstance(other, Fan) and self.rank == other.rank
                and self.rays == other.rays and self.cones == other.cones)

    def __hash__(self):
        return hash((self.rank, self.rays, self.cones))

    def __repr__(self):
        return f"Fan(rank={self.rank}, nrays={len(self.rays)}, ncones={len(self.cones)})"

    def sorted_cones(self) -> list[frozenset[int]]:
        return sorted(self.cones, key=lambda c: (len(c), _cone_key(c)))

    def cone(self, idx) -> Cone:
        idx = frozenset(idx)
        got = self._cone_cache.get(idx)
        if got is None:
            got = Cone(self.rank, tuple(sorted(self.rays[i] for i in idx)))
            self._cone_cache[idx] = got
        return got

    def cone_dim(self, idx) -> int:
        return self.cone(idx).dim

    def maximal_cones(self) -> list[frozenset[int]]:
        out = []
        for c in self.cones:
            if not any(c < d for d in self.cones):
                out.append(c)
        return sorted(out, key=_cone_key)

    def ray_index(self, v: Vector) -> int | None:
        try:
            return self.rays.index(tuple(v))
        except ValueError:
            return None


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class FanValidation:
    valid: bool
    violations: list[dict] = field(default_factory=list)


def _separating_functional_exists(rays_a, rays_b, common, rank) -> bool:
    """Exact feasibility of a functional positive on rays_a off the common
    face, zero on the common face, negative on rays_b off it.

    Such a functional exists iff the two cones meet exactly in the face
    generated by ``common``.
    """
    a_strict = [u for u in rays_a if u not in common]
    b_strict = [v for v in rays_b if v not in common]
    rows = []
    rhs = []
    nslack = len(a_strict) + len(b_strict)
    for pos, u in enumerate(a_strict):
        rows.append((u, -1, pos))
        rhs.append(1)
    for f in common:
        rows.append((f, 0, -1))
        rhs.append(0)
    for pos, v in enumerate(b_strict):
        rows.append((v, 1, len(a_strict) + pos))
        rhs.append(-1)
    width = 2 * rank + nslack
    mat = []
    for vec, slack_sign, slack_pos in rows:
        row = list(vec) + [-x for x in vec] + [0] * nslack
        if slack_sign:
            row[2 * rank + slack_pos] = slack_sign
        mat.append(row)
    return nonneg_rational_solve(IntMatrix.from_rows(mat), tuple(rhs)) is not None


def validate(f: Fan) -> FanValidation:
    """Check all fan invariants; violations are data, not exceptions."""
    violations: list[dict] = []
    used = set()
    for idx in f.sorted_cones():
        used |= idx
        if not idx:
            continue
        listed = sorted(f.rays[i] for i in idx)
        try:
            canon = cone_from_rays(f.rank, listed)
        except ConeError as e:
            violations.append({"kind": "invalid-cone", "cone": _cone_key(idx),
                               "detail": str(e)})
            continue
        if list(canon.rays) != listed:
            violations.append({"kind": "redundant-generator", "cone": _cone_key(idx),
                               "detail": f"minimal generators are {list(canon.rays)}"})
    missing_ray = [i for i in range(len(f.rays)) if i not in used]
    for i in missing_ray:
        violations.append({"kind": "unused-ray", "ray": i})
    if violations:
        return FanValidation(False, violations)

    index_of = {r: i for i, r in enumerate(f.rays)}
    for idx in f.sorted_cones():
        for face in f.cone(idx).faces():
            fidx = frozenset(index_of[r] for r in face.rays)
            if fidx not in f.cones:
                violations.append({"kind": "face-missing", "cone": _cone_key(idx),
                                   "face": _cone_key(fidx)})

    maxc = f.maximal_cones()
    for ia, ib in itertools.combinations(maxc, 2):
        ca, cb = f.cone(ia), f.cone(ib)
        in_b = frozenset(i for i in ia if cb.contains(f.rays[i]))
        in_a = frozenset(j for j in ib if ca.contains(f.rays[j]))
        shared = ia & ib
        if in_b != shared or in_a != shared:
            violations.append({
                "kind": "intersection-not-a-face",
                "cones": [_cone_key(ia), _cone_key(ib)],
                "detail": "a generator of one cone lies inside the other "
                          "without being shared",
            })
            continue
        common = [f.rays[i] for i in shared]
        if not _separating_functional_exists(list(ca.rays), list(cb.rays),
                                             common, f.rank):
            violations.append({
                "kind": "intersection-not-a-face",
                "cones": [_cone_key(ia), _cone_key(ib)],
                "detail": "no separating functional: cones overlap beyond "
                          "their shared face",
            })
    return FanValidation(not violations, violations)


# ---------------------------------------------------------------------------
# completeness
# ---------------------------------------------------------------------------

def grid_directions(rank: int, count: int = GRID_DIRECTIONS) -> list[Vector]:
    """Fixed deterministic list of primitive directions (shell by shell)."""
    if rank == 1:
        return [(1,), (-1,)]
    out: list[Vector] = []
    radius = 1
    while len(out) < count:
        shell = []
        for v in itertools.product(range(-radius, radius + 1), repeat=rank):
            if max(abs(x) for x in v) != radius:
                continue
            if vec_gcd(v) != 1:
                continue
            shell.append(v)
        shell.sort()
        out.extend(shell)
        radius += 1
    return out[:count]


def random_rational_points(rank: int, count: int, seed: int) -> list[tuple]:
    rng = random.Random(seed)
    pts = []
    while len(pts) < count:
        p = tuple(Fraction(rng.randint(-999, 999), rng.randint(1, 97))
                  for _ in range(rank))
        if any(x != 0 for x in p):
            pts.append(p)
    return pts


@dataclass
class CompletenessCertificate:
    complete: bool
    pure: bool
    unpaired_walls: list[dict]
    sample_covered: bool
    sampling_agrees: bool
    seed: int


def is_complete(f: Fan, seed: int = DEFAULT_SEED) -> CompletenessCertificate:
    """Wall-pairing completeness test with sample-point cross-check."""
    maxc = f.maximal_cones()
    pure = bool(maxc) and all(f.cone_dim(c) == f.rank for c in maxc)
    unpaired: list[dict] = []
    if pure:
        wall_owners: dict[tuple, list] = {}
        for idx in maxc:
            for face in f.cone(idx).faces():
                if face.dim == f.rank - 1:
                    wall_owners.setdefault(face.rays, []).append(idx)
        for wall, owners in sorted(wall_owners.items()):
            if len(owners) != 2:
                unpaired.append({"wall": [list(r) for r in wall],
                                 "owners": [_cone_key(o) for o in owners]})
        wall_complete = not unpaired
    else:
        wall_complete = False
    samples = [tuple(Fraction(x) for x in d) for d in grid_directions(f.rank)]
    samples += random_rational_points(f.rank, RANDOM_POINTS, seed)
    max_cones = [f.cone(c) for c in maxc]
    covered = all(any(c.contains(p) for c in max_cones) for p in samples)
    return CompletenessCertificate(
        complete=wall_complete,
        pure=pure,
        unpaired_walls=unpaired,
        sample_covered=covered,
        sampling_agrees=(wall_complete == covered),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# subfans
# ---------------------------------------------------------------------------

def rays_subfan(f: Fan) -> Fan:
    """The subfan of the zero cone and all rays."""
    return Fan(f.rank, f.rays, [{i} for i in range(len(f.rays))])


def smooth_subfan(f: Fan) -> Fan:
    """The maximal subfan whose cones are all smooth.

    Smoothness is face-hereditary, so the smooth cones form a subfan.
    All rays survive (a primitive ray is a smooth cone).
    """
    keep = [c for c in f.sorted_cones() if c and is_smooth(f.cone(c))]
    return Fan(f.rank, f.rays, keep)


def _subfan_cone_map(f: Fan, sub: Fan) -> dict[frozenset, frozenset]:
    """Translate sub's cones into f's indexing; error if not a subfan."""
    if sub.rank != f.rank:
        raise FanError("subfan rank mismatch")
    index_of = {r: i for i, r in enumerate(f.rays)}
    ray_map = {}
    for j, r in enumerate(sub.rays):
        if r not in index_of:
            raise FanError(f"not a subfan: ray {r} not in the ambient fan")
        ray_map[j] = index_of[r]
    out = {}
    for c in sub.cones:
        translated = frozenset(ray_map[j] for j in c)
        if translated not in f.cones:
            raise FanError(f"not a subfan: cone {sorted(c)} missing from the ambient fan")
        out[c] = translated
    return out


def complement_codim(f: Fan, sub: Fan) -> int | None:
    """min dim over cones of f missing from sub; None when sub = f.

    By the orbit-cone correspondence the orbit of a missing cone sigma has
    codimension dim(sigma), so this is the codimension of the removed set.
    """
    translated = set(_subfan_cone_map(f, sub).values())
    missing = [c for c in f.cones if c not in translated]
    if not missing:
        return None
    return min(f.cone_dim(c) for c in missing)


def minimal_cone_containing(f: Fan, p) -> frozenset[int] | None:
    """Index set of the unique cone whose relative interior contains p."""
    for idx in f.sorted_cones():
        if f.cone(idx).relint_contains(p):
            return idx
    return None


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------

@dataclass
class FanMorphism:
    matrix: IntMatrix
    source: Fan
    target: Fan
    assignment: dict  # source cone index set -> target cone index set


@dataclass
class MorphismViolation:
    matrix: IntMatrix
    failures: list[dict]


def check_morphism(m: IntMatrix, src: Fan, dst: Fan) -> FanMorphism | MorphismViolation:
    """Certify that m maps every source cone into some target cone.

    The recorded target is the minimal one (unique: candidates containing
    a common cone are closed under passing to their shared face).
    """
    if m.cols != src.rank or m.rows != dst.rank:
        raise FanError(f"matrix shape {m.rows}x{m.cols} does not map "
                       f"rank {src.rank} to rank {dst.rank}")
    assignment = {}
    failures = []
    dst_sorted = dst.sorted_cones()
    for idx in src.sorted_cones():
        images = [m.apply(src.rays[i]) for i in sorted(idx)]
        best = None
        for j in dst_sorted:
            cj = dst.cone(j)
            if all(cj.contains(v) for v in images):
                if best is None or dst.cone_dim(j) < dst.cone_dim(best):
                    best = j
        if best is None:
            failures.append({"cone": _cone_key(idx),
                             "images": [list(v) for v in images]})
        else:
            assignment[idx] = best
    if failures:
        return MorphismViolation(m, failures)
    return FanMorphism(m, src, dst, assignment)
