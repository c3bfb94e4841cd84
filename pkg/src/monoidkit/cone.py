"""Exact rational polyhedral geometry.

Cones carry both a V-description (extreme rays plus a lineality basis) and an
H-description (primitive integer inequality normals); the two are
cross-validated on construction.  Linear programs are solved with an exact
rational simplex using Bland's anti-cycling rule, so every answer is a
certificate, never an approximation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .lattice import kernel_basis, primitive_vector

Vec = tuple  # tuple[Fraction | int, ...]


def fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def vec(xs) -> Vec:
    return tuple(fr(x) for x in xs)


def vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a: Vec) -> Vec:
    c = fr(c)
    return tuple(c * x for x in a)


def vdot(a: Vec, b: Vec):
    return sum(x * y for x, y in zip(a, b))


def vzero(n: int) -> Vec:
    return tuple(Fraction(0) for _ in range(n))


def is_zero_vec(a: Vec) -> bool:
    return all(x == 0 for x in a)


def rational_rank(vectors) -> int:
    """Rank of a list of rational vectors, by Gaussian elimination."""
    rows = [list(map(fr, v)) for v in vectors if not is_zero_vec(v)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    col = 0
    while rows and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def solve_linear_system(rows, rhs):
    """Solve the square-rank rational system rows*x = rhs.

    Returns the unique solution, or None if the system is singular or
    inconsistent (the caller distinguishes neither case).
    """
    if not rows:
        return None
    n = len(rows[0])
    aug = [list(map(fr, r)) + [fr(b)] for r, b in zip(rows, rhs)]
    piv_cols = []
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, len(aug)) if aug[i][col] != 0), None)
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = 1 / aug[rank][col]
        aug[rank] = [x * inv for x in aug[rank]]
        for i in range(len(aug)):
            if i != rank and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[rank])]
        piv_cols.append(col)
        rank += 1
    if rank < n:
        return None
    for i in range(rank, len(aug)):
        if aug[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for r, col in enumerate(piv_cols):
        x[col] = aug[r][n]
    return tuple(x)


# ---------------------------------------------------------------------------
# Exact simplex
# ---------------------------------------------------------------------------

def _simplex_phase(tab, basis, cost, ncols):
    """Run simplex iterations on a tableau already canonical for `basis`.

    Entering rule: lowest-index negative reduced cost (Bland).  Leaving rule:
    minimum ratio, tie broken by lowest basic-variable index.  Returns
    'optimal' or 'unbounded'.
    """
    m = len(tab)
    while True:
        cb = [cost[b] for b in basis]
        enter = None
        for j in range(ncols):
            rc = cost[j] - sum(cb[i] * tab[i][j] for i in range(m))
            if rc < 0:
                enter = j
                break
        if enter is None:
            return "optimal"
        pivot_row = None
        best_ratio = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if (best_ratio is None or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[pivot_row])):
                    best_ratio = ratio
                    pivot_row = i
        if pivot_row is None:
            return "unbounded"
        pe = tab[pivot_row][enter]
        tab[pivot_row] = [x / pe for x in tab[pivot_row]]
        for i in range(m):
            if i != pivot_row and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[pivot_row])]
        basis[pivot_row] = enter


def lp_solve(A, b, c):
    """Minimize c.z subject to A z = b, z >= 0, exactly.

    Returns (status, z, value) with status in {'optimal', 'infeasible',
    'unbounded'}; z and value are None unless status == 'optimal'.
    """
    m = len(A)
    n = len(A[0]) if m else len(c)
    rows = []
    rhs = []
    for i in range(m):
        r = [fr(x) for x in A[i]]
        bi = fr(b[i])
        if bi < 0:
            r = [-x for x in r]
            bi = -bi
        rows.append(r)
        rhs.append(bi)
    # Phase 1 with artificial variables n .. n+m-1.
    tab = [rows[i] + [fr(int(i == j)) for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    cost1 = [Fraction(0)] * n + [Fraction(1)] * m
    status = _simplex_phase(tab, basis, cost1, n + m)
    assert status == "optimal"
    val1 = sum(tab[i][-1] for i in range(m) if basis[i] >= n)
    if val1 > 0:
        return "infeasible", None, None
    # Drive remaining artificials out of the basis; drop redundant rows.
    keep = []
    for i in range(m):
        if basis[i] >= n:
            piv = next((j for j in range(n) if tab[i][j] != 0), None)
            if piv is None:
                continue  # redundant constraint
            pe = tab[i][piv]
            tab[i] = [x / pe for x in tab[i]]
            for k in range(m):
                if k != i and tab[k][piv] != 0:
                    f = tab[k][piv]
                    tab[k] = [x - f * y for x, y in zip(tab[k], tab[i])]
            basis[i] = piv
        keep.append(i)
    tab = [tab[i][:n] + [tab[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    cost2 = [fr(x) for x in c]
    status = _simplex_phase(tab, basis, cost2, n)
    if status == "unbounded":
        return "unbounded", None, None
    z = [Fraction(0)] * n
    for i, bi in enumerate(basis):
        z[bi] = tab[i][-1]
    value = sum(cost2[j] * z[j] for j in range(n))
    return "optimal", tuple(z), value


def in_cone_vrep(gens, x) -> bool:
    """Is x a nonnegative rational combination of the given generators?"""
    gens = [vec(g) for g in gens if not is_zero_vec(g)]
    x = vec(x)
    if is_zero_vec(x):
        return True
    if not gens:
        return False
    A = [[g[i] for g in gens] for i in range(len(x))]
    status, _, _ = lp_solve(A, list(x), [Fraction(0)] * len(gens))
    return status == "optimal"


# ---------------------------------------------------------------------------
# Double description
# ---------------------------------------------------------------------------

def _ddm(normals, dim):
    """Extreme rays and lineality of {x : <n, x> >= 0 for n in normals}.

    Incremental double description with the combinatorial adjacency test.
    Returns (rays, lineality) as lists of Fraction vectors; rays are reduced
    to primitive integer direction vectors.
    """
    lineality = [vec([Fraction(int(i == j)) for j in range(dim)]) for i in range(dim)]
    rays: list[Vec] = []
    processed: list[Vec] = []

    def zero_set(r):
        return frozenset(i for i, n in enumerate(processed) if vdot(n, r) == 0)

    for a in normals:
        a = vec(a)
        if is_zero_vec(a):
            processed.append(a)
            continue
        lin_vals = [vdot(a, l) for l in lineality]
        if any(v != 0 for v in lin_vals):
            k = next(i for i, v in enumerate(lin_vals) if v != 0)
            l0 = lineality[k]
            if lin_vals[k] < 0:
                l0 = vscale(-1, l0)
            al0 = vdot(a, l0)
            new_lin = []
            for i, l in enumerate(lineality):
                if i == k:
                    continue
                new_lin.append(vsub(l, vscale(vdot(a, l) / al0, l0)))
            rays = [vsub(r, vscale(vdot(a, r) / al0, l0)) for r in rays]
            rays.append(l0)
            lineality = new_lin
        else:
            plus = [r for r in rays if vdot(a, r) > 0]
            zero = [r for r in rays if vdot(a, r) == 0]
            minus = [r for r in rays if vdot(a, r) < 0]
            if minus:
                new_rays = plus + zero
                zsets = {id(r): zero_set(r) for r in rays}
                for rp in plus:
                    for rm in minus:
                        common = zsets[id(rp)] & zsets[id(rm)]
                        adjacent = True
                        for r3 in rays:
                            if r3 is rp or r3 is rm:
                                continue
                            if zsets[id(r3)] >= common:
                                adjacent = False
                                break
                        if adjacent:
                            comb = vsub(vscale(vdot(a, rp), rm), vscale(vdot(a, rm), rp))
                            comb = vec(primitive_vector(comb))
                            if not is_zero_vec(comb):
                                new_rays.append(comb)
                rays = new_rays
        rays = [vec(primitive_vector(r)) for r in rays]
        seen = set()
        uniq = []
        for r in rays:
            if r not in seen:
                seen.add(r)
                uniq.append(r)
        rays = uniq
        processed.append(a)
    return rays, lineality


@dataclass(frozen=True)
class RationalCone:
    """A rational polyhedral cone with matched V- and H-descriptions.

    facet_normals is a complete inequality description: x lies in the cone
    iff <n, x> >= 0 for every normal (equations appear as +-pairs when the
    cone is not full-dimensional).  generators are primitive extreme rays
    modulo the lineality space.
    """
    ambient_dim: int
    generators: tuple
    facet_normals: tuple
    lineality_basis: tuple

    def contains(self, x) -> bool:
        x = vec(x)
        return all(vdot(n, x) >= 0 for n in self.facet_normals)

    def contains_cone(self, other: "RationalCone") -> bool:
        pts = list(other.generators)
        for l in other.lineality_basis:
            pts.append(l)
            pts.append(tuple(-t for t in l))
        return all(self.contains(p) for p in pts)

    @property
    def dim(self) -> int:
        vecs = list(self.generators) + list(self.lineality_basis)
        return rational_rank(vecs) if vecs else 0

    def is_pointed(self) -> bool:
        return not self.lineality_basis

    def is_trivial(self) -> bool:
        return not self.generators and not self.lineality_basis

    def negate(self) -> "RationalCone":
        return RationalCone(
            self.ambient_dim,
            tuple(tuple(-x for x in g) for g in self.generators),
            tuple(tuple(-x for x in n) for n in self.facet_normals),
            self.lineality_basis,
        )


def _canonical_rays(rays):
    return tuple(sorted(primitive_vector(r) for r in rays))


def _assemble_cone(dim, ray_candidates, validate_gens=None) -> RationalCone:
    """Build the canonical cone generated by ray_candidates (V-description)."""
    gens = [vec(g) for g in ray_candidates if not is_zero_vec(vec(g))]
    if not gens:
        normals = []
        for i in range(dim):
            e = [0] * dim
            e[i] = 1
            normals.append(tuple(e))
            normals.append(tuple(-x for x in e))
        return RationalCone(dim, (), tuple(normals), ())
    dual_rays, _ = _ddm(gens, dim)
    span_cut = kernel_basis([[int(x) for x in primitive_vector(g)] for g in gens]) \
        if gens else []
    normals = list(_canonical_rays(dual_rays))
    for l in span_cut:
        normals.append(tuple(l))
        normals.append(tuple(-x for x in l))
    rays, _ = _ddm(normals, dim)
    lin = kernel_basis([list(n) for n in normals]) if normals else \
        [list(r) for r in [[int(i == j) for j in range(dim)] for i in range(dim)]]
    cone = RationalCone(dim, _canonical_rays(rays), tuple(normals),
                        tuple(tuple(r) for r in lin))
    # V/H cross-validation.
    for g in gens:
        if not cone.contains(g):
            raise AssertionError(f"generator {g} violates computed H-description")
    vgens = gens + [vec(l) for l in cone.lineality_basis] \
        + [vscale(-1, vec(l)) for l in cone.lineality_basis]
    for r in cone.generators:
        if not in_cone_vrep(vgens, r):
            raise AssertionError(f"computed ray {r} is not generated by the input")
    return cone


def cone_from_generators(generators, ambient_dim: int | None = None) -> RationalCone:
    gens = [vec(g) for g in generators]
    if ambient_dim is None:
        if not gens:
            raise ValueError("ambient dimension required for an empty generator list")
        ambient_dim = len(gens[0])
    return _assemble_cone(ambient_dim, gens)


def dual_description(generators, ambient_dim: int | None = None) -> RationalCone:
    """Compute the H-description (and canonical V-description) of the cone
    generated by the given vectors."""
    return cone_from_generators(generators, ambient_dim)


def cone_from_inequalities(normals, ambient_dim: int) -> RationalCone:
    normals = [vec(n) for n in normals]
    rays, lin = _ddm(normals, ambient_dim)
    ray_candidates = list(rays)
    for l in lin:
        ray_candidates.append(l)
        ray_candidates.append(vscale(-1, l))
    cone = _assemble_cone(ambient_dim, ray_candidates)
    for n in normals:
        for g in cone.generators:
            assert vdot(n, g) >= 0
    return cone


def dual_cone(cone: RationalCone) -> RationalCone:
    gens = list(cone.generators)
    for l in cone.lineality_basis:
        gens.append(l)
        gens.append(tuple(-x for x in l))
    if not gens:
        # dual of {0} is everything
        basis = [tuple(int(i == j) for j in range(cone.ambient_dim))
                 for i in range(cone.ambient_dim)]
        cands = [b for b in basis] + [tuple(-x for x in b) for b in basis]
        return _assemble_cone(cone.ambient_dim, cands)
    rays, lin = _ddm([vec(g) for g in gens], cone.ambient_dim)
    cands = list(rays)
    for l in lin:
        cands.append(l)
        cands.append(vscale(-1, l))
    return _assemble_cone(cone.ambient_dim, cands)


def positive_functional(cone: RationalCone):
    """An integer functional strictly positive on cone - {0}.

    Requires the cone to be pointed; the sum of the dual cone's extreme rays
    lies in the relative interior of the dual, which is exactly the set of
    functionals positive away from 0.
    """
    if not cone.is_pointed():
        raise ValueError("cone has nontrivial lineality; no positive functional")
    if cone.is_trivial():
        return vzero(cone.ambient_dim)
    dual = dual_cone(cone)
    total = vzero(cone.ambient_dim)
    for r in dual.generators:
        total = vadd(total, vec(r))
    total = vec(primitive_vector(total))
    for g in cone.generators:
        assert vdot(total, g) > 0
    return total


# ---------------------------------------------------------------------------
# Faces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    """A face of a cone, recorded by the maximal set of tight facet normals."""
    cone: RationalCone
    tight_facets: frozenset
    dim: int
    rays: tuple

    def contains_relint(self, x) -> bool:
        x = vec(x)
        if not self.cone.contains(x):
            return False
        for i, n in enumerate(self.cone.facet_normals):
            v = vdot(n, x)
            if i in self.tight_facets:
                if v != 0:
                    return False
            elif v == 0:
                return False
        return True

    def relint_point(self):
        total = vzero(self.cone.ambient_dim)
        for r in self.rays:
            total = vadd(total, vec(r))
        return total


def _face_from_rays(cone: RationalCone, ray_idx: frozenset) -> Face:
    rays = tuple(cone.generators[i] for i in sorted(ray_idx))
    tight = frozenset(
        i for i, n in enumerate(cone.facet_normals)
        if all(vdot(vec(n), vec(r)) == 0 for r in rays)
    )
    vecs = list(rays) + list(cone.lineality_basis)
    dim = rational_rank(vecs) if vecs else 0
    return Face(cone, tight, dim, rays)


@lru_cache(maxsize=None)
def face_lattice(cone: RationalCone) -> tuple:
    """All faces of the cone, from the cone itself down to its minimal face.

    Faces are identified with the subsets of extreme rays they contain; the
    minimal face is the lineality space (the zero face for pointed cones).
    """
    n = len(cone.generators)
    start = frozenset(range(n))
    seen = {start}
    order = [start]
    queue = [start]
    while queue:
        cur = queue.pop()
        cur_rays = [cone.generators[i] for i in sorted(cur)]
        tight = set(
            i for i, nm in enumerate(cone.facet_normals)
            if all(vdot(vec(nm), vec(r)) == 0 for r in cur_rays)
        )
        for i, nm in enumerate(cone.facet_normals):
            if i in tight:
                continue
            child = frozenset(j for j in cur if vdot(vec(nm), vec(cone.generators[j])) == 0)
            if child not in seen:
                seen.add(child)
                order.append(child)
                queue.append(child)
    faces = [_face_from_rays(cone, s) for s in order]
    faces.sort(key=lambda f: (f.dim, sorted(f.tight_facets)))
    return tuple(faces)


def face_of_point(cone: RationalCone, x) -> Face:
    """The face whose relative interior contains x (x must lie in the cone)."""
    x = vec(x)
    if not cone.contains(x):
        raise ValueError(f"{x} is not in the cone")
    tight = frozenset(i for i, n in enumerate(cone.facet_normals) if vdot(n, x) == 0)
    ray_idx = frozenset(
        i for i, g in enumerate(cone.generators)
        if all(vdot(vec(cone.facet_normals[j]), vec(g)) == 0 for j in tight)
    )
    face = _face_from_rays(cone, ray_idx)
    assert face.contains_relint(x)
    return face


def tangent_cone(cone: RationalCone, face: Face) -> RationalCone:
    """Directions satisfying exactly the facet inequalities tight on the face."""
    if face.cone != cone:
        raise ValueError("face does not belong to this cone")
    normals = [cone.facet_normals[i] for i in sorted(face.tight_facets)]
    return cone_from_inequalities(normals, cone.ambient_dim)


# ---------------------------------------------------------------------------
# Polyhedra, strict feasibility, vertex enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    normal: tuple      # integer normal a
    offset: Fraction   # rational b, constraint <a, x> >= b
    strict: bool = False


@dataclass(frozen=True)
class RationalPolyhedron:
    dim: int
    constraints: tuple

    @staticmethod
    def build(dim, items) -> "RationalPolyhedron":
        cons = []
        for it in items:
            if isinstance(it, Constraint):
                cons.append(Constraint(tuple(int(x) for x in it.normal),
                                       fr(it.offset), bool(it.strict)))
            else:
                a, b, *rest = it
                strict = bool(rest[0]) if rest else False
                cons.append(Constraint(tuple(int(x) for x in a), fr(b), strict))
        return RationalPolyhedron(dim, tuple(cons))

    def satisfied_by(self, x, respect_strict=True) -> bool:
        x = vec(x)
        for c in self.constraints:
            v = vdot(vec(c.normal), x)
            if c.strict and respect_strict:
                if not v > c.offset:
                    return False
            elif not v >= c.offset:
                return False
        return True


def lp_feasible_strict(poly: RationalPolyhedron):
    """A rational point satisfying the constraints, strict ones strictly,
    or None.  Strictness is handled by maximizing a common margin t <= 1;
    homogeneous strict systems are thereby normalized automatically."""
    d = poly.dim
    m = len(poly.constraints)
    nvars = 2 * d + 1 + m + 1  # u, w, t, surplus, slack for t <= 1
    A = []
    b = []
    for i, c in enumerate(poly.constraints):
        row = [fr(x) for x in c.normal] + [-fr(x) for x in c.normal]
        row.append(Fraction(-1 if c.strict else 0))  # t
        row.extend(Fraction(int(j == i)) * -1 for j in range(m))  # surplus
        row.append(Fraction(0))
        A.append(row)
        b.append(fr(c.offset))
    trow = [Fraction(0)] * (2 * d)
    trow.append(Fraction(1))
    trow.extend([Fraction(0)] * m)
    trow.append(Fraction(1))
    A.append(trow)
    b.append(Fraction(1))
    cost = [Fraction(0)] * nvars
    cost[2 * d] = Fraction(-1)  # maximize t
    status, z, value = lp_solve(A, b, cost)
    if status != "optimal":
        return None
    t = z[2 * d]
    if t <= 0:
        return None
    x = tuple(z[i] - z[d + i] for i in range(d))
    assert poly.satisfied_by(x)
    return x


def lp_feasible(poly: RationalPolyhedron):
    """A rational point satisfying the constraints with strict flags ignored."""
    relaxed = RationalPolyhedron(
        poly.dim, tuple(Constraint(c.normal, c.offset, False) for c in poly.constraints))
    d = poly.dim
    m = len(relaxed.constraints)
    A = []
    b = []
    for i, c in enumerate(relaxed.constraints):
        row = [fr(x) for x in c.normal] + [-fr(x) for x in c.normal]
        row.extend(Fraction(int(j == i)) * -1 for j in range(m))
        A.append(row)
        b.append(fr(c.offset))
    status, z, _ = lp_solve(A, b, [Fraction(0)] * (2 * d + m))
    if status != "optimal":
        return None
    return tuple(z[i] - z[d + i] for i in range(d))


def recession_cone(poly: RationalPolyhedron) -> RationalCone:
    return cone_from_inequalities([c.normal for c in poly.constraints], poly.dim)


def polytope_vertices(poly: RationalPolyhedron) -> list:
    """Exact vertices of a bounded polyhedron (strict flags are ignored).

    Basic solutions are enumerated over all dim-subsets of constraints in
    lexicographic order; unbounded input raises ValueError.
    """
    from itertools import combinations

    rc = recession_cone(poly)
    if not rc.is_trivial():
        raise ValueError("polyhedron is unbounded; vertex enumeration undefined")
    d = poly.dim
    cons = poly.constraints
    verts = set()
    if d == 0:
        return [()]
    for combo in combinations(range(len(cons)), d):
        rows = [cons[i].normal for i in combo]
        rhs = [cons[i].offset for i in combo]
        x = solve_linear_system(rows, rhs)
        if x is None:
            continue
        if poly.satisfied_by(x, respect_strict=False):
            verts.add(tuple(x))
    return sorted(verts)


def is_trivial_intersection(c1: RationalCone, c2: RationalCone) -> bool:
    """Decide c1 intersect c2 == {0} by sign-exploring strict LPs."""
    if c1.ambient_dim != c2.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    d = c1.ambient_dim
    base = [(n, 0, False) for n in c1.facet_normals]
    base += [(n, 0, False) for n in c2.facet_normals]
    for j in range(d):
        for sign in (1, -1):
            e = [0] * d
            e[j] = sign
            poly = RationalPolyhedron.build(d, base + [(tuple(e), 0, True)])
            if lp_feasible_strict(poly) is not None:
                return False
    return True


def intersect_cones(c1: RationalCone, c2: RationalCone) -> RationalCone:
    if c1.ambient_dim != c2.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    return cone_from_inequalities(
        list(c1.facet_normals) + list(c2.facet_normals), c1.ambient_dim)
