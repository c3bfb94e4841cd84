"""Affine monoids inside finitely generated abelian groups.

An ambient group is (1/den)Z^rank + sum Z/d_i; elements are flat tuples of
Fractions whose first `rank` coordinates are the free part (denominators
dividing `den`) and whose remaining coordinates are torsion residues.
Monoids are given by finitely many generators and are integral by
construction.  All computations reduce to exact integer lattice problems on
the presentation Z^(rank + #torsion) with relations d_i * e_i.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import lattice as la
from . import cone as cn
from .cone import Fraction as _F, fr, vec
from .lattice import primitive_vector


@dataclass(frozen=True)
class Ambient:
    """The group (1/den)Z^rank + Z/d_1 + ... + Z/d_t."""
    rank: int
    torsion: tuple = ()
    den: int = 1

    def __post_init__(self):
        assert self.rank >= 0 and self.den >= 1
        for i, d in enumerate(self.torsion):
            assert d >= 2
            if i:
                assert d % self.torsion[i - 1] == 0, "invariant factor chain broken"

    @property
    def width(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def exponent(self) -> int:
        return self.torsion[-1] if self.torsion else 1

    def normalize(self, v) -> tuple:
        v = [fr(x) for x in v]
        if len(v) != self.width:
            raise ValueError(f"element of length {len(v)} in ambient of width {self.width}")
        out = list(v[: self.rank])
        for i, d in enumerate(self.torsion):
            x = v[self.rank + i]
            if x.denominator != 1:
                raise ValueError("torsion coordinate must be an integer residue")
            out.append(_F(int(x) % d))
        for x in out[: self.rank]:
            if (x * self.den).denominator != 1:
                raise ValueError(f"coordinate {x} not in lattice (1/{self.den})Z")
        return tuple(out)

    def zero(self) -> tuple:
        return tuple(_F(0) for _ in range(self.width))

    def add(self, a, b) -> tuple:
        return self.normalize([x + y for x, y in zip(a, b)])

    def sub(self, a, b) -> tuple:
        return self.normalize([x - y for x, y in zip(a, b)])

    def smul(self, k: int, a) -> tuple:
        return self.normalize([k * x for x in a])

    def to_int(self, v) -> tuple:
        """Integer presentation coordinates: free part scaled by den."""
        v = self.normalize(v)
        out = [int(x * self.den) for x in v[: self.rank]]
        out.extend(int(x) for x in v[self.rank:])
        return tuple(out)

    def from_int(self, w) -> tuple:
        out = [_F(x, self.den) for x in w[: self.rank]]
        out.extend(_F(x) for x in w[self.rank:])
        return self.normalize(out)

    def relation_rows(self) -> list:
        """Presentation relations of the ambient group in integer coordinates."""
        rows = []
        for i, d in enumerate(self.torsion):
            r = [0] * self.width
            r[self.rank + i] = d
            rows.append(tuple(r))
        return rows

    def in_lattice(self, v) -> bool:
        try:
            self.normalize(v)
            return True
        except ValueError:
            return False


def free_part(v, ambient: Ambient) -> tuple:
    return tuple(v[: ambient.rank])


@dataclass(frozen=True)
class AffineMonoid:
    ambient: Ambient
    generators: tuple

    @staticmethod
    def make(ambient: Ambient, generators) -> "AffineMonoid":
        gens = []
        seen = set()
        for g in generators:
            g = ambient.normalize(g)
            if all(x == 0 for x in g) or g in seen:
                continue
            seen.add(g)
            gens.append(g)
        gens.sort()
        return AffineMonoid(ambient, tuple(gens))

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def gen_int_matrix(self) -> list:
        """Columns are the integer-presentation coordinates of the generators."""
        cols = [self.ambient.to_int(g) for g in self.generators]
        return [[c[i] for c in cols] for i in range(self.ambient.width)]


def monoid_from_generators(generators, rank: int | None = None,
                           torsion=(), den: int = 1) -> AffineMonoid:
    gens = [list(g) for g in generators]
    if rank is None:
        if not gens:
            raise ValueError("rank required when no generators are given")
        rank = len(gens[0]) - len(torsion)
    return AffineMonoid.make(Ambient(rank, tuple(torsion), den), gens)


def nonneg_orthant(dim: int) -> AffineMonoid:
    gens = [[int(i == j) for j in range(dim)] for i in range(dim)]
    return monoid_from_generators(gens, rank=dim)


@lru_cache(maxsize=None)
def free_cone(m: AffineMonoid) -> cn.RationalCone:
    """The rational cone spanned by the free parts of the generators."""
    gens = [free_part(g, m.ambient) for g in m.generators]
    gens = [g for g in gens if not cn.is_zero_vec(g)]
    return cn.cone_from_generators(gens, m.ambient.rank)


@lru_cache(maxsize=None)
def _gp_lattice_rows(m: AffineMonoid) -> tuple:
    """Generators (as integer rows) of the subgroup lattice of the presentation
    spanned by the monoid generators and the ambient torsion relations."""
    rows = [m.ambient.to_int(g) for g in m.generators]
    rows.extend(m.ambient.relation_rows())
    return tuple(rows)


def gp_contains(m: AffineMonoid, v) -> bool:
    """Is v in the group envelope of m (inside the ambient group)?"""
    try:
        w = m.ambient.to_int(v)
    except ValueError:
        return False
    rows = [list(r) for r in _gp_lattice_rows(m)]
    if not rows:
        return all(x == 0 for x in w)
    mat = la.transpose(rows)
    return la.solve_integer(mat, list(w)) is not None


def gp_sat_contains(m: AffineMonoid, v) -> bool:
    """Does some positive multiple of v lie in the group envelope of m?"""
    try:
        w = m.ambient.to_int(v)
    except ValueError:
        return False
    rows = [list(r) for r in _gp_lattice_rows(m)]
    free = [r for r in rows if any(r)]
    if not free:
        return all(x == 0 for x in w[: m.ambient.rank])
    sat = la.saturation_basis(free, m.ambient.width)
    # torsion coordinates are annihilated by a multiple automatically
    wfree = list(w[: m.ambient.rank]) + [0] * len(m.ambient.torsion)
    return la.in_lattice([list(s) for s in sat], wfree, m.ambient.width)


@lru_cache(maxsize=None)
def unit_indices(m: AffineMonoid) -> tuple:
    """Indices of generators that are units (their negative lies in the monoid).

    A generator is a unit iff it appears in the support of a nonnegative
    rational relation among the generators (modulo ambient torsion), which is
    an exact LP on the presentation lattice.
    """
    n = m.ngens
    if n == 0:
        return ()
    w = m.ambient.width
    cols = [m.ambient.to_int(g) for g in m.generators]
    rel = m.ambient.relation_rows()
    out = []
    for i0 in range(n):
        # variables: c_0..c_{n-1} >= 0, t_j split into t+ - t-, surplus s >= 0
        nt = len(rel)
        nvars = n + 2 * nt + 1
        A = []
        b = []
        for coord in range(w):
            row = [fr(cols[j][coord]) for j in range(n)]
            row.extend(fr(rel[j][coord]) for j in range(nt))
            row.extend(fr(-rel[j][coord]) for j in range(nt))
            row.append(fr(0))
            A.append(row)
            b.append(fr(0))
        row = [fr(0)] * nvars
        row[i0] = fr(1)
        row[-1] = fr(-1)
        A.append(row)
        b.append(fr(1))
        status, _, _ = cn.lp_solve(A, b, [fr(0)] * nvars)
        if status == "optimal":
            out.append(i0)
    return tuple(out)


def is_sharp(m: AffineMonoid) -> bool:
    return not unit_indices(m)


def _positive_unit_relation(m: AffineMonoid) -> list:
    """Integer c >= 0 with sum c_i g_i = 0 and c_i >= 1 on every unit index."""
    units = unit_indices(m)
    n = m.ngens
    total = [0] * n
    cols = [m.ambient.to_int(g) for g in m.generators]
    rel = m.ambient.relation_rows()
    w = m.ambient.width
    for i0 in units:
        nt = len(rel)
        nvars = n + 2 * nt + 1
        A = []
        b = []
        for coord in range(w):
            row = [fr(cols[j][coord]) for j in range(n)]
            row.extend(fr(rel[j][coord]) for j in range(nt))
            row.extend(fr(-rel[j][coord]) for j in range(nt))
            row.append(fr(0))
            A.append(row)
            b.append(fr(0))
        row = [fr(0)] * nvars
        row[i0] = fr(1)
        row[-1] = fr(-1)
        A.append(row)
        b.append(fr(1))
        status, z, _ = cn.lp_solve(A, b, [fr(0)] * nvars)
        assert status == "optimal"
        c = [z[j] for j in range(n)]
        den = 1
        for x in c:
            den = den * x.denominator // __import__("math").gcd(den, x.denominator)
        ci = [int(x * den) for x in c]
        # Positive rational relations only involve unit generators.
        assert all(ci[j] == 0 or j in units for j in range(n))
        total = [a + bb for a, bb in zip(total, ci)]
    return total


def units(m: AffineMonoid) -> la.FGAbelianGroup:
    """Structure of the unit group m intersect (-m)."""
    idx = unit_indices(m)
    if not idx:
        return la.FGAbelianGroup(0, ())
    rows = [list(m.ambient.to_int(m.generators[i])) for i in idx]
    rows.extend(list(r) for r in m.ambient.relation_rows())
    # Subgroup generated by unit generators inside the ambient group:
    # quotient of the generated lattice by the relation lattice.
    gen_lat = la.lattice_basis(rows, m.ambient.width)
    rel_only = [list(r) for r in m.ambient.relation_rows()]
    if not rel_only:
        inv = la.invariant_factors(la.transpose([list(r) for r in gen_lat]))
        free = len(gen_lat) - sum(1 for x in inv if x)
        # all invariant factors are 1 in a plain sublattice of Z^k
        return la.FGAbelianGroup(len(gen_lat), ())
    # Structure of (gen_lat + rel)/rel: use SNF on the stacked presentation.
    # Map Z^{#gens_lat} -> ambient group; kernel via relations.
    cols = la.transpose([list(g) for g in gen_lat])
    relcols = la.transpose(rel_only)
    stacked = [cols[i] + relcols[i] for i in range(m.ambient.width)]
    ker = la.kernel_basis(stacked)
    proj = [k[: len(gen_lat)] for k in ker]
    if not proj:
        return la.FGAbelianGroup(len(gen_lat), ())
    rel_mat = la.transpose(proj)
    grp = la.cokernel(rel_mat, rows=len(gen_lat))
    return la.FGAbelianGroup(grp.free_rank, grp.invariant_factors)


@dataclass(frozen=True)
class QuotientMap:
    """Projection of an ambient group onto a quotient, in SNF coordinates."""
    source: Ambient
    target: Ambient
    matrix: tuple  # integer matrix on presentation coordinates

    def apply(self, v) -> tuple:
        w = self.source.to_int(v)
        img = la.mat_vec([list(r) for r in self.matrix], list(w))
        return self.target.from_int(img)


def quotient_by_subgroup(ambient: Ambient, subgroup_rows: list) -> QuotientMap:
    """Quotient of the ambient group by the subgroup generated by the given
    elements (presentation coordinates)."""
    rows = [list(r) for r in subgroup_rows]
    rows.extend(list(r) for r in ambient.relation_rows())
    if not rows:
        rows = []
    mat = la.transpose(rows) if rows else [[0] for _ in range(ambient.width)]
    grp = la.cokernel(mat, rows=ambient.width)
    target = Ambient(grp.free_rank, grp.invariant_factors, 1)
    return QuotientMap(ambient, target, grp.basis_change)


def sharpen(m: AffineMonoid) -> tuple[AffineMonoid, QuotientMap]:
    """The sharp quotient m/(units) together with the projection."""
    idx = unit_indices(m)
    unit_rows = [m.ambient.to_int(m.generators[i]) for i in idx]
    q = quotient_by_subgroup(m.ambient, unit_rows)
    gens = [q.apply(g) for g in m.generators]
    return AffineMonoid.make(q.target, gens), q


def member(m: AffineMonoid, a):
    """Nonnegative integer coefficients expressing a over the generators,
    or None when a is not in the monoid."""
    try:
        a = m.ambient.normalize(a)
    except ValueError as exc:
        raise ValueError(f"element not in ambient group: {exc}") from None
    if all(x == 0 for x in a):
        return tuple(0 for _ in m.generators)
    if not m.generators:
        return None
    units_idx = unit_indices(m)
    if units_idx:
        return _member_with_units(m, a, units_idx)
    return _member_sharp(m, a)


def _member_sharp(m: AffineMonoid, a):
    amb = m.ambient
    rank = amb.rank
    cone = free_cone(m)
    afree = free_part(a, amb)
    if not cone.contains(afree):
        return None
    if not gp_contains(m, a):
        return None
    ell = cn.positive_functional(cone) if not cone.is_trivial() else cn.vzero(rank)
    gens_int = [amb.to_int(g) for g in m.generators]
    a_int = amb.to_int(a)
    n = len(gens_int)
    orders = []
    weights = []
    for g, gi in zip(m.generators, gens_int):
        gf = free_part(g, amb)
        w = cn.vdot(ell, gf)
        weights.append(w)
        if w == 0:
            # purely-torsion generator: finite order bounds raw coefficients
            d = 1
            for i, dv in enumerate(amb.torsion):
                r = int(g[rank + i])
                if r:
                    d = d * (dv // __import__("math").gcd(dv, r)) \
                        // __import__("math").gcd(d, dv // __import__("math").gcd(dv, r))
            orders.append(max(1, d))
        else:
            orders.append(None)
    order_idx = sorted(range(n), key=lambda i: (-(weights[i]), m.generators[i]))

    sol = [0] * n

    def dfs(pos, rem_int, rem_ell):
        if all(x == 0 for x in rem_int):
            return True
        if pos == n:
            return False
        i = order_idx[pos]
        w = weights[i]
        if w == 0:
            bound = orders[i] - 1
        else:
            bound = int(rem_ell / w)
        gi = gens_int[i]
        for c in range(bound, -1, -1):
            nxt = [x - c * y for x, y in zip(rem_int, gi)]
            # normalize torsion residues
            for t, d in enumerate(amb.torsion):
                nxt[rank + t] %= d
            nell = rem_ell - c * w
            frees = [_F(x, amb.den) for x in nxt[:rank]]
            if not cone.contains(frees):
                continue
            sol[i] = c
            if dfs(pos + 1, nxt, nell):
                return True
        sol[i] = 0
        return False

    a_list = list(a_int)
    for t, d in enumerate(amb.torsion):
        a_list[rank + t] %= d
    if dfs(0, a_list, cn.vdot(ell, afree)):
        total = [sum(sol[i] * gi[j] for i, gi in enumerate(gens_int))
                 for j in range(amb.width)]
        for t, d in enumerate(amb.torsion):
            total[rank + t] %= d
        assert total == a_list
        return tuple(sol)
    return None


def _member_with_units(m: AffineMonoid, a, units_idx):
    sharp, q = sharpen(m)
    a_bar = q.apply(a)
    img_gens = [q.apply(g) for g in m.generators]
    # membership in the sharp quotient, solved over the projected generators
    proj = AffineMonoid(q.target, tuple(img_gens))  # keep index correspondence
    coeffs = _member_sharp_multi(proj, a_bar)
    if coeffs is None:
        return None
    # fix up the unit-group discrepancy
    amb = m.ambient
    total = amb.zero()
    for c, g in zip(coeffs, m.generators):
        total = amb.add(total, amb.smul(c, g))
    diff = amb.sub(a, total)  # lies in the unit subgroup
    unit_cols = [list(amb.to_int(m.generators[i])) for i in units_idx]
    rel = [list(r) for r in amb.relation_rows()]
    mat = la.transpose(unit_cols + rel)
    y = la.solve_integer(mat, list(amb.to_int(diff)))
    if y is None:
        return None
    y = y[: len(units_idx)]
    pos_rel = _positive_unit_relation(m)
    shift = 0
    for j, i in enumerate(units_idx):
        if y[j] < 0:
            assert pos_rel[i] > 0
            need = (-y[j] + pos_rel[i] - 1) // pos_rel[i]
            shift = max(shift, need)
    out = list(coeffs)
    for j, i in enumerate(units_idx):
        out[i] += y[j] + shift * pos_rel[i]
    for i in range(m.ngens):
        if i not in units_idx:
            continue
    check = amb.zero()
    for c, g in zip(out, m.generators):
        assert c >= 0
        check = amb.add(check, amb.smul(c, g))
    assert check == m.ambient.normalize(a)
    return tuple(out)


def _member_sharp_multi(m: AffineMonoid, a):
    """Sharp membership allowing duplicate/zero generators (index-preserving)."""
    amb = m.ambient
    if all(x == 0 for x in amb.normalize(a)):
        return tuple(0 for _ in m.generators)
    canonical = AffineMonoid.make(amb, m.generators)
    coeffs = _member_sharp(canonical, a)
    if coeffs is None:
        return None
    out = [0] * m.ngens
    used = {g: c for g, c in zip(canonical.generators, coeffs)}
    for g, c in list(used.items()):
        for i, h in enumerate(m.generators):
            if amb.normalize(h) == g and c:
                out[i] = c
                used[g] = 0
                break
    # any leftover means a canonical generator had no preimage; impossible
    assert all(v == 0 for v in used.values())
    return tuple(out)


# ---------------------------------------------------------------------------
# Hilbert bases
# ---------------------------------------------------------------------------

def _parallelepiped_points(basis_cols):
    """Lattice points of {sum l_i b_i : 0 <= l_i < 1} for a full-rank integer
    basis given as columns; exactly |det| points, found via SNF residues."""
    k = len(basis_cols)
    B = [[basis_cols[j][i] for j in range(k)] for i in range(k)]  # columns -> matrix
    U, D, V = la.smith_normal_form(B)
    Uinv = la.unimodular_inverse(U)
    dets = [D[i][i] for i in range(k)]
    assert all(d != 0 for d in dets)
    Binv = _rational_inverse(B)
    pts = []
    for t in itertools.product(*(range(d) for d in dets)):
        x = la.mat_vec(Uinv, list(t))
        lam = [sum(Binv[i][j] * x[j] for j in range(k)) for i in range(k)]
        x = [x[i] - sum(B[i][j] * (lam[j].numerator // lam[j].denominator)
                        for j in range(k)) for i in range(k)]
        pts.append(tuple(x))
    return pts


def _rational_inverse(mat):
    n = len(mat)
    aug = [[_F(mat[i][j]) for j in range(n)] + [_F(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def hilbert_basis(cone: cn.RationalCone, lattice_rows=None):
    """The minimal generating set of cone intersect lattice, for a pointed cone.

    The lattice defaults to Z^ambient_dim and is otherwise given by basis
    vectors.  Candidates are collected from the fundamental parallelepipeds
    of all full-rank ray subsets, then reduced to the irreducible elements.
    Vectors are returned in ambient coordinates.
    """
    if not cone.is_pointed():
        raise ValueError("Hilbert basis requires a pointed cone")
    dim = cone.ambient_dim
    if lattice_rows is None:
        lattice_rows = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    lattice_rows = [tuple(int(x) for x in r) for r in lattice_rows]
    if cone.is_trivial() or not lattice_rows:
        return []
    # express the cone inside the rational span of the lattice
    span = cn.cone_from_generators(
        [r for r in lattice_rows] + [tuple(-x for x in r) for r in lattice_rows], dim)
    cone = cn.intersect_cones(cone, span)
    if cone.is_trivial():
        return []
    # solve L * y = ray for each ray (overdetermined consistent system)
    k = len(lattice_rows)
    rays_L = []
    for r in cone.generators:
        aug_rows = [[_F(lattice_rows[j][i]) for j in range(k)] for i in range(dim)]
        y = cn.solve_linear_system(aug_rows, [_F(x) for x in r])
        if y is None:
            raise ValueError("cone does not lie in the span of the lattice")
        rays_L.append(primitive_vector(y))
    basis_pts = _hilbert_in_lattice(rays_L, k)
    out = []
    for p in basis_pts:
        amb = tuple(sum(lattice_rows[j][i] * p[j] for j in range(k)) for i in range(dim))
        out.append(amb)
    return sorted(out)


def _hilbert_in_lattice(rays, k):
    """Hilbert basis of cone(rays) intersect Z^k, rays integer and pointed."""
    rays = [tuple(r) for r in rays]
    d = cn.rational_rank(rays)
    if d == 0:
        return []
    if d < k:
        sat = la.saturation_basis([list(r) for r in rays], k)
        sub_rays = []
        for r in rays:
            rows = [[_F(sat[j][i]) for j in range(d)] for i in range(k)]
            y = cn.solve_linear_system(rows, [_F(x) for x in r])
            assert y is not None
            sub_rays.append(primitive_vector(y))
        inner = _hilbert_in_lattice(sub_rays, d)
        return [tuple(sum(sat[j][i] * p[j] for j in range(d)) for i in range(k))
                for p in inner]
    cone = cn.cone_from_generators(rays, k)
    assert cone.is_pointed()
    rays = [tuple(int(x) for x in r) for r in cone.generators]
    candidates = set(rays)
    for combo in itertools.combinations(rays, d):
        if cn.rational_rank(combo) < d:
            continue
        for p in _parallelepiped_points(list(combo)):
            if cone.contains(p) and any(p):
                candidates.add(tuple(int(x) for x in p))
    candidates.discard(tuple(0 for _ in range(k)))

    basis = []
    cand_sorted = sorted(candidates)
    for s in cand_sorted:
        reducible = False
        for y in cand_sorted:
            if y == s:
                continue
            diff = tuple(a - b for a, b in zip(s, y))
            # s = y + diff with both parts nonzero lattice points of the cone
            if any(diff) and cone.contains(diff):
                reducible = True
                break
        if not reducible:
            basis.append(s)
    return sorted(basis)


# ---------------------------------------------------------------------------
# Saturation and predicates
# ---------------------------------------------------------------------------

def cone_lattice_generators(cone: cn.RationalCone) -> list:
    """Integer generators of {x in Z^dim : x in cone}.

    Splits off the lineality lattice (a saturated sublattice of Z^dim) and
    computes the Hilbert basis of the pointed quotient; lifts are valid
    because the cone contains its lineality space.
    """
    dim = cone.ambient_dim
    if cone.is_trivial():
        return []
    lin = [list(l) for l in cone.lineality_basis]
    if not lin:
        return [tuple(int(x) for x in h) for h in hilbert_basis(cone)]
    q = la.cokernel(la.transpose(lin), rows=dim)
    assert not q.invariant_factors  # lineality lattice is saturated
    proj = [list(r) for r in q.basis_change][: q.free_rank]
    proj_gens = [tuple(sum(proj[i][j] * int(g[j]) for j in range(dim))
                       for i in range(q.free_rank)) for g in cone.generators]
    proj_cone = cn.cone_from_generators(
        [g for g in proj_gens if any(g)], q.free_rank)
    hb = hilbert_basis(proj_cone)
    out = []
    for l in lin:
        out.append(tuple(l))
        out.append(tuple(-x for x in l))
    for h in hb:
        lift = la.solve_integer(proj, [int(x) for x in h])
        assert lift is not None
        out.append(tuple(lift))
    return out


def saturate(m: AffineMonoid, bound: int | None = None) -> tuple[AffineMonoid, bool]:
    """The saturation {a in ambient : n*a in m for some n >= 1}.

    Always exact: a positive multiple of a lands in m iff the free part of a
    lies in the cone of m (multiples absorb torsion, cone membership scales),
    so the saturation is the full preimage of cone(m) over the ambient
    lattice.  The certification flag is kept for interface stability and is
    always True; `bound` is accepted and ignored.
    """
    amb = m.ambient
    if not m.generators:
        return m, True
    cone_int = cn.cone_from_generators(
        [tuple(int(x * amb.den) for x in free_part(g, amb)) for g in m.generators],
        amb.rank)
    free_gens = cone_lattice_generators(cone_int)
    gens = [amb.from_int(list(h) + [0] * len(amb.torsion)) for h in free_gens]
    for i, d in enumerate(amb.torsion):
        tv = [0] * amb.width
        tv[amb.rank + i] = 1
        gens.append(amb.from_int(tv))
    return AffineMonoid.make(amb, gens), True


def monoid_equal(m1: AffineMonoid, m2: AffineMonoid) -> bool:
    if m1.ambient != m2.ambient:
        return False
    return all(member(m2, g) is not None for g in m1.generators) and \
        all(member(m1, g) is not None for g in m2.generators)


def is_saturated(m: AffineMonoid) -> bool:
    sat, _ = saturate(m)
    return monoid_equal(m, sat)


def scale(m: AffineMonoid, n: int) -> AffineMonoid:
    """The monoid (1/n)m in the refined lattice (1/(n*den))Z^rank.

    Coordinates stay in the same rational vector space, so m is literally a
    submonoid of the result and the abstract inclusion is multiplication by n.
    """
    if n < 1:
        raise ValueError("scale factor must be a positive integer")
    if m.ambient.torsion:
        raise ValueError("scaling requires a torsion-free ambient")
    if not is_saturated(m):
        raise ValueError("scaling requires a saturated monoid")
    amb = Ambient(m.ambient.rank, (), m.ambient.den * n)
    gens = [tuple(x / n for x in g) for g in m.generators]
    return AffineMonoid.make(amb, gens)


def is_divisible_upto(m: AffineMonoid, n: int) -> bool:
    """Does every generator admit a k-th root in m for all k <= n?"""
    for k in range(2, n + 1):
        for g in m.generators:
            candidate = [x / k for x in g[: m.ambient.rank]]
            candidate += [x for x in g[m.ambient.rank:]]
            # torsion part: need t with k*t = g_tors; try all residues
            ok = False
            if not m.ambient.torsion:
                if all((x * m.ambient.den).denominator == 1 for x in candidate):
                    ok = member(m, candidate) is not None
            else:
                for residues in itertools.product(*(range(d) for d in m.ambient.torsion)):
                    t = list(candidate[: m.ambient.rank]) + [_F(r) for r in residues]
                    good = all((x * m.ambient.den).denominator == 1
                               for x in t[: m.ambient.rank])
                    if not good:
                        continue
                    km = m.ambient.smul(k, m.ambient.normalize(t))
                    if km == m.ambient.normalize(g) and member(m, t) is not None:
                        ok = True
                        break
            if not ok:
                return False
    return True


def elements_up_to(m: AffineMonoid, height: int) -> list:
    """All monoid elements whose free coordinates have absolute value <= height
    (exact BFS closure under generator addition)."""
    amb = m.ambient
    seen = {amb.zero()}
    frontier = [amb.zero()]
    while frontier:
        nxt = []
        for v in frontier:
            for g in m.generators:
                w = amb.add(v, g)
                if w in seen:
                    continue
                if any(abs(x) > height for x in w[: amb.rank]):
                    continue
                seen.add(w)
                nxt.append(w)
        frontier = nxt
    return sorted(seen)
