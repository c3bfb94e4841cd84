"""Homomorphisms of affine monoids and their property checkers.

Implements exactness, integrality (via the decomposability criterion on the
solution monoid), p-quasi-saturatedness (via integral pushouts), and the
polyhedral decision procedure for pseudo-saturatedness: minimal faces,
minimal decompositions, uniqueness via face-pair feasibility, and certified
conductor bounds.  Every negative verdict carries a witness that can be
re-verified independently.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from . import cone as cn
from . import lattice as la
from . import monoid as mn
from .cone import fr, vec
from .monoid import AffineMonoid, Ambient


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonoidHom:
    """A homomorphism given by an integer matrix on presentation coordinates.

    int_matrix maps source presentation coordinates (free part scaled by the
    source denominator, then torsion residues) to target presentation
    coordinates; torsion columns may not hit free rows.  Every source
    generator must land in the target monoid.
    """
    source: AffineMonoid
    target: AffineMonoid
    int_matrix: tuple

    def apply(self, v):
        w = self.source.ambient.to_int(v)
        img = la.mat_vec([list(r) for r in self.int_matrix], list(w))
        return self.target.ambient.from_int(img)

    def free_block(self):
        rs, rt = self.source.ambient.rank, self.target.ambient.rank
        return [[self.int_matrix[i][j] for j in range(rs)] for i in range(rt)]

    def rational_matrix(self):
        """Matrix on ambient coordinates (free part), as Fractions."""
        rs, rt = self.source.ambient.rank, self.target.ambient.rank
        ds, dt = self.source.ambient.den, self.target.ambient.den
        blk = self.free_block()
        return [[Fraction(blk[i][j] * ds, dt) for j in range(rs)] for i in range(rt)]


def _validate_hom(h: MonoidHom) -> MonoidHom:
    src, tgt = h.source.ambient, h.target.ambient
    mat = [list(r) for r in h.int_matrix]
    assert len(mat) == tgt.width and all(len(r) == src.width for r in mat)
    for j, d in enumerate(src.torsion):
        col = src.rank + j
        for i in range(tgt.rank):
            if mat[i][col] != 0:
                raise ValueError("torsion coordinates cannot map to free coordinates")
        for i, dt in enumerate(tgt.torsion):
            if (d * mat[tgt.rank + i][col]) % dt != 0:
                raise ValueError("matrix incompatible with torsion orders")
    for g in h.source.generators:
        if mn.member(h.target, h.apply(g)) is None:
            raise ValueError(f"generator {g} does not map into the target monoid")
    return h


def hom(source: AffineMonoid, target: AffineMonoid, matrix) -> MonoidHom:
    """Build a homomorphism from a rational matrix on ambient coordinates
    (free coordinates only; ambients must have no torsion mismatch)."""
    rs, rt = source.ambient.rank, target.ambient.rank
    ds, dt = source.ambient.den, target.ambient.den
    mat = [[fr(x) for x in row] for row in matrix]
    assert len(mat) == rt and all(len(r) == rs for r in mat)
    if source.ambient.torsion or target.ambient.torsion:
        raise ValueError("use hom_from_int_matrix for ambients with torsion")
    im = []
    for i in range(rt):
        row = []
        for j in range(rs):
            e = mat[i][j] * dt / ds
            if e.denominator != 1:
                raise ValueError(f"matrix entry {mat[i][j]} does not preserve lattices")
            row.append(int(e))
        im.append(tuple(row))
    return _validate_hom(MonoidHom(source, target, tuple(im)))


def hom_from_int_matrix(source, target, int_matrix) -> MonoidHom:
    return _validate_hom(MonoidHom(source, target,
                                   tuple(tuple(int(x) for x in r) for r in int_matrix)))


def inclusion_hom(sub: AffineMonoid, sup: AffineMonoid) -> MonoidHom:
    """The identity-coordinates inclusion of sub into sup (same rational space)."""
    rs, rt = sub.ambient.rank, sup.ambient.rank
    if rs != rt or sub.ambient.torsion or sup.ambient.torsion:
        raise ValueError("inclusion requires equal-rank torsion-free ambients")
    ds, dt = sub.ambient.den, sup.ambient.den
    if dt % ds != 0:
        raise ValueError("target lattice does not refine the source lattice")
    k = dt // ds
    mat = [[k * int(i == j) for j in range(rs)] for i in range(rt)]
    return _validate_hom(MonoidHom(sub, sup, tuple(tuple(r) for r in mat)))


def identity_hom(m: AffineMonoid) -> MonoidHom:
    return hom_from_int_matrix(m, m, la.identity_matrix(m.ambient.width))


def compose(g: MonoidHom, f: MonoidHom) -> MonoidHom:
    assert f.target == g.source
    mat = la.mat_mul([list(r) for r in g.int_matrix], [list(r) for r in f.int_matrix])
    return _validate_hom(MonoidHom(f.source, g.target, tuple(tuple(r) for r in mat)))


def kernel_trivial(h: MonoidHom) -> bool:
    """Is the induced map on group envelopes injective?"""
    src = h.source.ambient
    tgt = h.target.ambient
    gp_rows = [list(src.to_int(g)) for g in h.source.generators]
    gp_rows.extend(list(r) for r in src.relation_rows())
    basis = la.lattice_basis(gp_rows, src.width)
    if not basis:
        return True
    hm = [list(r) for r in h.int_matrix]
    img_cols = [la.mat_vec(hm, list(b)) for b in basis]
    rel_t = [list(r) for r in tgt.relation_rows()]
    mat = la.transpose([list(c) for c in img_cols] + rel_t)
    ker = la.kernel_basis(mat) if mat else []
    src_rel = [list(r) for r in src.relation_rows()]
    for k in ker:
        zcoef = k[: len(basis)]
        z = [sum(basis[j][i] * zcoef[j] for j in range(len(basis)))
             for i in range(src.width)]
        if not any(z):
            continue
        # z is a nonzero lattice vector killed by h; injectivity survives only
        # if z is itself an ambient relation (the zero element).
        if not src_rel or not la.in_lattice(src_rel, z, src.width):
            return False
    return True


def cokernel_group(h: MonoidHom) -> la.FGAbelianGroup:
    """Structure of gp(target-ambient) / image(gp(source))."""
    src, tgt = h.source.ambient, h.target.ambient
    gp_rows = [list(src.to_int(g)) for g in h.source.generators]
    gp_rows.extend(list(r) for r in src.relation_rows())
    basis = la.lattice_basis(gp_rows, src.width) or []
    hm = [list(r) for r in h.int_matrix]
    cols = [la.mat_vec(hm, list(b)) for b in basis]
    cols.extend(list(r) for r in tgt.relation_rows())
    if not cols:
        return la.FGAbelianGroup(tgt.width, ())
    return la.cokernel(la.transpose(cols), rows=tgt.width)


# ---------------------------------------------------------------------------
# Preimage monoids and exactness
# ---------------------------------------------------------------------------

def _lattice_cone_generators(lattice_rows, normals, width):
    """Generators of {z in lattice : <n, z> >= 0 for n in normals}.

    lattice_rows generate a sublattice of Z^width; normals act on the same
    integer coordinates.  The result is a finite generating set (an exact
    submonoid is finitely generated), including +-pairs along the part of
    the lattice where all normals vanish.
    """
    basis = la.lattice_basis([list(r) for r in lattice_rows], width)
    if not basis:
        return []
    s = len(basis)
    pulled = []
    for n in normals:
        pulled.append(tuple(sum(int(n[i]) * basis[j][i] for i in range(width))
                            for j in range(s)))
    cone = cn.cone_from_inequalities(pulled, s)
    gens_c = mn.cone_lattice_generators(cone)
    out = []
    for c in gens_c:
        out.append(tuple(sum(basis[j][i] * int(c[j]) for j in range(s))
                         for i in range(width)))
    return out


def preimage_monoid_generators(h: MonoidHom, use_full_ambient=False):
    """Generators of {z in gp(source) : h(z) in target monoid}, assuming the
    target monoid is saturated (so membership is a cone condition on the
    free part).  With use_full_ambient the source group envelope is replaced
    by the whole source ambient group."""
    src, tgt = h.source.ambient, h.target.ambient
    if use_full_ambient:
        rows = [tuple(r) for r in la.identity_matrix(src.width)]
    else:
        rows = [src.to_int(g) for g in h.source.generators]
    rows = list(rows) + [tuple(r) for r in src.relation_rows()]
    cone_t = mn.free_cone(h.target)
    blk = h.free_block()
    normals = []
    for n in cone_t.facet_normals:
        normals.append(tuple(sum(int(n[i]) * blk[i][j] for i in range(tgt.rank))
                             for j in range(src.rank)) + (0,) * len(src.torsion))
    gens = _lattice_cone_generators(rows, normals, src.width)
    return [src.from_int(g) for g in gens]


def is_exact(h: MonoidHom):
    """Exactness of h: the group-envelope preimage of the target equals the
    source.  Returns (bool, counterexample or None)."""
    if not mn.is_saturated(h.target):
        raise ValueError("exactness checker requires a saturated target")
    for g in preimage_monoid_generators(h):
        if mn.member(h.source, g) is None:
            return False, g
    return True, None


# ---------------------------------------------------------------------------
# Integrality (flatness criterion on the solution monoid)
# ---------------------------------------------------------------------------

def _enumerate_polytope_lattice(poly: cn.RationalPolyhedron, den: int = 1):
    """All points of (1/den)Z^dim inside a bounded polyhedron."""
    verts = cn.polytope_vertices(poly)
    if not verts:
        return []
    dim = poly.dim
    lo = [min(v[i] for v in verts) for i in range(dim)]
    hi = [max(v[i] for v in verts) for i in range(dim)]
    ranges = []
    for i in range(dim):
        a = -((-lo[i] * den).__ceil__()) if hasattr(lo[i], '__ceil__') else None
        start = -(-(lo[i] * den)).__floor__() if False else None
        import math
        start = math.ceil(lo[i] * den)
        stop = math.floor(hi[i] * den)
        ranges.append(range(start, stop + 1))
    out = []
    for combo in itertools.product(*ranges):
        pt = tuple(Fraction(x, den) for x in combo)
        if poly.satisfied_by(pt, respect_strict=False):
            out.append(pt)
    return out


def divisors_in(m: AffineMonoid, b) -> list:
    """All monoid elements d with d | b in m (requires a sharp monoid)."""
    amb = m.ambient
    if mn.unit_indices(m):
        raise ValueError("divisor enumeration requires a sharp monoid")
    cone = mn.free_cone(m)
    b = amb.normalize(b)
    bfree = mn.free_part(b, amb)
    cons = [(n, 0, False) for n in cone.facet_normals]
    cons += [(tuple(-x for x in n), -cn.vdot(vec(n), vec(bfree)), False)
             for n in cone.facet_normals]
    poly = cn.RationalPolyhedron.build(amb.rank, cons)
    out = []
    for ffree in _enumerate_polytope_lattice(poly, amb.den):
        if amb.torsion:
            for residues in itertools.product(*(range(d) for d in amb.torsion)):
                cand = amb.normalize(list(ffree) + [Fraction(r) for r in residues])
                if mn.member(m, cand) is not None and \
                        mn.member(m, amb.sub(b, cand)) is not None:
                    out.append(cand)
        else:
            cand = amb.normalize(ffree)
            if mn.member(m, cand) is not None and \
                    mn.member(m, amb.sub(b, cand)) is not None:
                out.append(cand)
    return sorted(out)


def solution_monoid_generators(h: MonoidHom):
    """Generators of {(a1, a2, b1, b2) : h(a1) + b1 = h(a2) + b2} inside
    source x source x target x target."""
    src, tgt = h.source.ambient, h.target.ambient
    wS, wT = src.width, tgt.width
    width = 2 * wS + 2 * wT
    # presentation: block coordinates (a1, a2, b1, b2), relations per block
    rows = []
    for g in h.source.generators:
        gi = src.to_int(g)
        rows.append(tuple(gi) + (0,) * (wS + 2 * wT))
        rows.append((0,) * wS + tuple(gi) + (0,) * (2 * wT))
    for g in h.target.generators:
        gi = tgt.to_int(g)
        rows.append((0,) * (2 * wS) + tuple(gi) + (0,) * wT)
        rows.append((0,) * (2 * wS + wT) + tuple(gi))
    for r in src.relation_rows():
        rows.append(tuple(r) + (0,) * (wS + 2 * wT))
        rows.append((0,) * wS + tuple(r) + (0,) * (2 * wT))
    for r in tgt.relation_rows():
        rows.append((0,) * (2 * wS) + tuple(r) + (0,) * wT)
        rows.append((0,) * (2 * wS + wT) + tuple(r))
    # the linear condition h(a1) + b1 - h(a2) - b2 = 0 (modulo target torsion)
    hm = [list(r) for r in h.int_matrix]
    cond_cols = []
    basis = la.lattice_basis([list(r) for r in rows], width)
    conds = []
    for z in basis:
        a1 = list(z[:wS])
        a2 = list(z[wS: 2 * wS])
        b1 = list(z[2 * wS: 2 * wS + wT])
        b2 = list(z[2 * wS + wT:])
        img = [x + y - u - v for x, y, u, v in zip(
            la.mat_vec(hm, a1), b1, la.mat_vec(hm, a2), b2)]
        conds.append(img)
    rel_t = [list(r) for r in tgt.relation_rows()]
    stacked = la.transpose(conds) if conds else []
    if rel_t:
        relmat = la.transpose(rel_t)
        stacked = [stacked[i] + relmat[i] for i in range(wT)] if stacked else relmat
    ker = la.kernel_basis(stacked) if stacked else \
        [list(r) for r in la.identity_matrix(len(basis))]
    sol_rows = []
    for k in ker:
        coef = k[: len(basis)]
        z = [sum(basis[j][i] * coef[j] for j in range(len(basis)))
             for i in range(width)]
        sol_rows.append(tuple(z))
    # cone conditions: each block lies in its monoid's cone
    cone_s = mn.free_cone(h.source)
    cone_t = mn.free_cone(h.target)
    normals = []
    rkS, rkT = src.rank, tgt.rank
    for n in cone_s.facet_normals:
        normals.append(tuple(n) + (0,) * (wS - rkS) + (0,) * (wS + 2 * wT))
        normals.append((0,) * wS + tuple(n) + (0,) * (wS - rkS) + (0,) * (2 * wT))
    for n in cone_t.facet_normals:
        normals.append((0,) * (2 * wS) + tuple(n) + (0,) * (wT - rkT) + (0,) * wT)
        normals.append((0,) * (2 * wS + wT) + tuple(n) + (0,) * (wT - rkT))
    gens = _lattice_cone_generators(sol_rows, normals, width)
    out = []
    for z in gens:
        a1 = src.from_int(z[:wS])
        a2 = src.from_int(z[wS: 2 * wS])
        b1 = tgt.from_int(z[2 * wS: 2 * wS + wT])
        b2 = tgt.from_int(z[2 * wS + wT:])
        out.append((a1, a2, b1, b2))
    return out


def is_integral(h: MonoidHom):
    """Kato's flatness criterion: every solution of h(a1)+b1 = h(a2)+b2 is
    decomposable.  Returns (bool, failing solution or None).

    Decomposable solutions are closed under addition, so checking a
    generating set of the solution monoid is sound and complete.
    """
    if not kernel_trivial(h):
        raise ValueError("integrality checker requires an injective homomorphism")
    if mn.unit_indices(h.source) or mn.unit_indices(h.target):
        hs, _, _ = sharpen_hom(h)
        return is_integral(hs)
    src, tgt = h.source, h.target
    for (a1, a2, b1, b2) in solution_monoid_generators(h):
        # need a3, a4 in source, b in target with b1 = h(a3)+b, b2 = h(a4)+b,
        # a1+a3 = a2+a4; a4 and b are determined by a3.
        ok = False
        for d in divisors_in(tgt, b1):
            sol = _hom_preimage_element(h, d)
            if sol is None:
                continue
            a3 = sol
            a4 = src.ambient.sub(src.ambient.add(a1, a3), a2)
            if mn.member(src, a4) is None:
                continue
            b = tgt.ambient.sub(b1, h.apply(a3))
            if mn.member(tgt, b) is None:
                continue
            ok = True
            break
        if not ok:
            return False, (a1, a2, b1, b2)
    return True, None


def _hom_preimage_element(h: MonoidHom, d):
    """Some source monoid element mapping to d, or None (h injective)."""
    src, tgt = h.source.ambient, h.target.ambient
    gp_rows = [list(src.to_int(g)) for g in h.source.generators]
    gp_rows.extend(list(r) for r in src.relation_rows())
    basis = la.lattice_basis(gp_rows, src.width)
    if not basis:
        return None
    hm = [list(r) for r in h.int_matrix]
    cols = [la.mat_vec(hm, list(b)) for b in basis]
    rel_t = [list(r) for r in tgt.relation_rows()]
    mat = la.transpose([list(c) for c in cols] + rel_t)
    sol = la.solve_integer(mat, list(tgt.to_int(d)))
    if sol is None:
        return None
    coef = sol[: len(basis)]
    z = [sum(basis[j][i] * coef[j] for j in range(len(basis)))
         for i in range(src.width)]
    cand = src.from_int(z)
    if mn.member(h.source, cand) is None:
        return None
    return cand


# ---------------------------------------------------------------------------
# Quasi-saturatedness via integral pushouts
# ---------------------------------------------------------------------------

def is_p_quasi_saturated(h: MonoidHom, p: int):
    """Exactness of the comparison map out of the integral pushout of h along
    multiplication by p.  Returns (bool, certificate or None); a certificate
    is an element of the comparison preimage missing from the pushout."""
    from . import pushout as po

    if p < 2:
        raise ValueError("p must be a prime (>= 2)")
    mul_p = hom_from_int_matrix(
        h.source, h.source,
        [[p * int(i == j) for j in range(h.source.ambient.width)]
         for i in range(h.source.ambient.width)])
    res = po.pushout(h, mul_p)
    qp = res.int_monoid
    # w: pushout -> target, (q, r) |-> p*q + h(r)
    wS, wT = h.target.ambient.width, h.source.ambient.width
    hm = [list(r) for r in h.int_matrix]
    w_on_stacked = [[0] * (wS + wT) for _ in range(wS)]
    for i in range(wS):
        w_on_stacked[i][i] = p
        for j in range(wT):
            w_on_stacked[i][wS + j] = hm[i][j]
    sec = [list(r) for r in res.section]   # pushout coords -> stacked coords
    wmat = la.mat_mul(w_on_stacked, sec)
    w = hom_from_int_matrix(qp, h.target, wmat)
    # exactness of w over the full pushout group
    for g in preimage_monoid_generators(w, use_full_ambient=True):
        if mn.member(qp, g) is None:
            return False, g
    return True, None


def default_prime_set(h: MonoidHom) -> tuple:
    primes = {2, 3, 5, 7}
    ck = cokernel_group(h)
    for d in ck.invariant_factors:
        for q in _prime_factors(d):
            primes.add(q)
    for d in h.source.ambient.torsion + h.target.ambient.torsion:
        for q in _prime_factors(d):
            primes.add(q)
    return tuple(sorted(primes))


def _prime_factors(n: int):
    n = abs(n)
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def is_quasi_saturated(h: MonoidHom, primes=None):
    """Per-prime quasi-saturatedness over a finite prime set.

    The default set (small primes plus primes of the relevant torsion) is a
    heuristic; the verdict is always relative to the set actually used.
    """
    heuristic = primes is None
    primes = tuple(primes) if primes is not None else default_prime_set(h)
    if not primes:
        raise ValueError("empty prime set")
    results = {}
    for p in primes:
        ok, cert = is_p_quasi_saturated(h, p)
        results[p] = (ok, cert)
    verdict = all(ok for ok, _ in results.values())
    return {"verdict_on_set": verdict, "primes": primes,
            "per_prime": results, "heuristic_set": heuristic}


# ---------------------------------------------------------------------------
# Pairs (N inside P) and minimal decompositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairNP:
    """A toric submonoid N of a torsion-free fs monoid P with
    cone(P) meet -cone(N) = {0}; the setting of the uniqueness criterion."""
    P: AffineMonoid
    N: AffineMonoid

    @property
    def ambient(self) -> Ambient:
        return self.P.ambient

    def inclusion(self) -> MonoidHom:
        return inclusion_hom(self.N, self.P)


def make_pair(P: AffineMonoid, n_generators) -> PairNP:
    amb = P.ambient
    if amb.torsion:
        raise ValueError("pair requires a torsion-free ambient")
    N = AffineMonoid.make(amb, [amb.normalize(g) for g in n_generators])
    for g in N.generators:
        if mn.member(P, g) is None:
            raise ValueError(f"N-generator {g} is not an element of P")
    if not mn.is_saturated(P):
        raise ValueError("P must be saturated")
    if not mn.is_saturated(N):
        raise ValueError("N must be saturated (toric)")
    if mn.unit_indices(N):
        raise ValueError("N must be sharp (toric)")
    cp = mn.free_cone(P)
    if N.generators:
        cnN = mn.free_cone(N)
        if not cn.is_trivial_intersection(cp, cnN.negate()):
            raise ValueError("cone(P) meets -cone(N) nontrivially")
    return PairNP(P, N)


def pair_cones(pair: PairNP):
    cp = mn.free_cone(pair.P)
    if pair.N.generators:
        cnN = mn.free_cone(pair.N)
    else:
        cnN = cn.cone_from_generators([], pair.ambient.rank)
    return cp, cnN


def is_degenerate(pair: PairNP) -> bool:
    return not pair.N.generators


@lru_cache(maxsize=None)
def minimal_faces(pair: PairNP) -> tuple:
    """Faces of cone(P) whose relative-interior points cannot be reduced by
    any nonzero direction of cone(N): exactly the faces F with
    tangent_cone(cone P, F) meet -cone(N) = {0}."""
    cp, cnN = pair_cones(pair)
    faces = cn.face_lattice(cp)
    if is_degenerate(pair):
        return tuple(faces)
    neg = cnN.negate()
    out = []
    for f in faces:
        t = cn.tangent_cone(cp, f)
        if cn.is_trivial_intersection(t, neg):
            out.append(f)
    return tuple(out)


@dataclass(frozen=True)
class MinimalDecomposition:
    x: tuple
    p_part: tuple       # the irreducible remainder inside cone(P)
    n_part: tuple       # the extracted component inside cone(N)
    face_tight: frozenset
    piece_dim: int

    def as_pair(self):
        return (self.p_part, self.n_part)


def _piece_polyhedron(pair: PairNP, face: cn.Face, x, strict_relint: bool):
    cp, cnN = pair_cones(pair)
    d = pair.ambient.rank
    cons = []
    for i, n in enumerate(cp.facet_normals):
        if i in face.tight_facets:
            cons.append((n, 0, False))
            cons.append((tuple(-t for t in n), 0, False))
        else:
            cons.append((n, 0, strict_relint))
    for nrm in cnN.facet_normals:
        # x - y in cone(N):  <m, x - y> >= 0
        cons.append((tuple(-t for t in nrm), -cn.vdot(vec(nrm), vec(x)), False))
    return cn.RationalPolyhedron.build(d, cons)


def point_is_minimal(pair: PairNP, y) -> bool:
    """Direct check that y - q leaves cone(P) for every nonzero q in cone(N);
    independent of the face machinery (used for witness verification)."""
    cp, cnN = pair_cones(pair)
    y = vec(y)
    if not cp.contains(y):
        return False
    if is_degenerate(pair):
        return True
    ell = cn.positive_functional(cnN)
    d = pair.ambient.rank
    cons = [(n, 0, False) for n in cnN.facet_normals]
    for n in cp.facet_normals:
        cons.append((tuple(-t for t in n), -cn.vdot(vec(n), y), False))
    cons.append((tuple(ell), 1, False))
    poly = cn.RationalPolyhedron.build(d, cons)
    # feasible q: y - q in cone(P), q in cone(N), ell(q) >= 1 (so q != 0)
    return cn.lp_feasible(poly) is None


def minimal_decompositions(pair: PairNP, x) -> list:
    """All extreme minimal decompositions of x relative to (N, P).

    For each minimal face the solution set {y in relint(F), x - y in cone(N)}
    is a bounded polytope piece; its vertices are returned (dimension flags
    record the piece dimension, so a positive-dimensional family of
    decompositions is recognizable).  The answer is unique iff the list has
    exactly one entry."""
    amb = pair.ambient
    x = vec(amb.normalize(list(x))[: amb.rank]) if len(x) == amb.width else vec(x)
    cp, cnN = pair_cones(pair)
    if not cp.contains(x):
        raise ValueError(f"{x} is not in cone(P)")
    if is_degenerate(pair):
        fx = cn.face_of_point(cp, x)
        return [MinimalDecomposition(tuple(x), tuple(x), cn.vzero(amb.rank),
                                     fx.tight_facets, 0)]
    found = {}
    for face in minimal_faces(pair):
        strict_poly = _piece_polyhedron(pair, face, x, True)
        witness = cn.lp_feasible_strict(strict_poly)
        if witness is None:
            continue
        closed = _piece_polyhedron(pair, face, x, False)
        verts = cn.polytope_vertices(closed)
        assert verts, "feasible piece must have vertices"
        dim = cn.rational_rank([cn.vsub(v, verts[0]) for v in verts[1:]]) \
            if len(verts) > 1 else 0
        for v in verts:
            y = tuple(v)
            n_part = cn.vsub(x, y)
            assert cnN.contains(n_part)
            assert point_is_minimal(pair, y)
            prev = found.get(y)
            if prev is None or prev.piece_dim < dim:
                fy = cn.face_of_point(cp, y)
                found[y] = MinimalDecomposition(tuple(x), y, tuple(n_part),
                                                fy.tight_facets, dim)
    result = sorted(found.values(), key=lambda m: m.p_part)
    assert result, "every point of cone(P) admits a minimal decomposition"
    return result


def decomposition_parts(pair: PairNP, x):
    """(p_part, n_part) of the unique minimal decomposition of x; raises when
    the decomposition is not unique."""
    decs = minimal_decompositions(pair, x)
    if len(decs) != 1:
        raise ValueError(f"{x} admits {len(decs)} extreme minimal decompositions")
    return decs[0].p_part, decs[0].n_part


# ---------------------------------------------------------------------------
# Pseudo-saturatedness decision
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionCertificate:
    pseudo_saturated: bool
    degenerate: bool
    face_pair_table: tuple
    witness: tuple | None        # (x, (dec1, dec2)) when not pseudo-saturated
    conductor_bound: int
    refined_conductor: int | None


def _face_pair_feasible(pair: PairNP, f1: cn.Face, f2: cn.Face):
    """A witness (y1, q1, y2, q2) with y_i in relint(F_i), q_i in cone(N),
    y1 + q1 = y2 + q2 and q1 != q2, or None."""
    cp, cnN = pair_cones(pair)
    d = pair.ambient.rank

    def block(v, pos):
        row = [0] * (4 * d)
        for i, t in enumerate(v):
            row[pos * d + i] = t
        return tuple(row)

    cons = []
    for pos, face in ((0, f1), (1, f2)):
        for i, n in enumerate(cp.facet_normals):
            if i in face.tight_facets:
                cons.append((block(n, pos), 0, False))
                cons.append((block([-t for t in n], pos), 0, False))
            else:
                cons.append((block(n, pos), 0, True))
    for pos in (2, 3):
        for n in cnN.facet_normals:
            cons.append((block(n, pos), 0, False))
    for i in range(d):
        e = [0] * (4 * d)
        e[i] = 1
        e[2 * d + i] = 1
        e[d + i] = -1
        e[3 * d + i] = -1
        cons.append((tuple(e), 0, False))
        cons.append((tuple(-t for t in e), 0, False))
    for coord in range(d):
        for sign in (1, -1):
            e = [0] * (4 * d)
            e[2 * d + coord] = sign
            e[3 * d + coord] = -sign
            poly = cn.RationalPolyhedron.build(4 * d, cons + [(tuple(e), 0, True)])
            sol = cn.lp_feasible_strict(poly)
            if sol is not None:
                y1 = sol[:d]
                y2 = sol[d: 2 * d]
                q1 = sol[2 * d: 3 * d]
                q2 = sol[3 * d:]
                return (coord, sign, (tuple(y1), tuple(q1), tuple(y2), tuple(q2)))
    return None


def is_pseudo_saturated(pair: PairNP) -> DecompositionCertificate:
    """Uniqueness of minimal decompositions across all of cone(P), decided by
    strict feasibility over ordered pairs of minimal faces."""
    bound = conductor_bound(pair)
    if is_degenerate(pair):
        return DecompositionCertificate(True, True, (), None, bound, 1)
    faces = minimal_faces(pair)
    table = []
    for i, f1 in enumerate(faces):
        for f2 in faces[i:]:
            hit = _face_pair_feasible(pair, f1, f2)
            if hit is not None:
                coord, sign, (y1, q1, y2, q2) = hit
                x = cn.vadd(vec(y1), vec(q1))
                assert cn.vadd(vec(y2), vec(q2)) == x
                assert y1 != y2
                assert point_is_minimal(pair, y1)
                assert point_is_minimal(pair, y2)
                decs = minimal_decompositions(pair, x)
                assert len(decs) >= 2
                witness = (tuple(x), (decs[0], decs[1]))
                table.append((tuple(sorted(f1.tight_facets)),
                              tuple(sorted(f2.tight_facets)),
                              "feasible", coord, sign))
                return DecompositionCertificate(False, False, tuple(table),
                                                witness, bound, None)
            table.append((tuple(sorted(f1.tight_facets)),
                          tuple(sorted(f2.tight_facets)), "infeasible", None, None))
    refined = refined_conductor(pair)
    return DecompositionCertificate(True, False, tuple(table), None, bound, refined)


# ---------------------------------------------------------------------------
# Conductor bounds
# ---------------------------------------------------------------------------

def _dedupe_updown(normals):
    seen = set()
    out = []
    for n in normals:
        key = la.primitive_vector(n)
        neg = tuple(-x for x in key)
        if key in seen or neg in seen:
            continue
        seen.add(key)
        out.append(key)
    return out


def conductor_bound(pair: PairNP) -> int:
    """Determinant bound certifying a pseudo-saturation conductor: the
    maximal |det| over full-rank square submatrices of the stacked family of
    facet normals of cone(P), facet normals of cone(N), and integer normals
    cutting out the linear span of N."""
    d = pair.ambient.rank
    cp, cnN = pair_cones(pair)
    family = _dedupe_updown(cp.facet_normals)
    if pair.N.generators:
        family += _dedupe_updown(cnN.facet_normals)
        n_free = [[int(x) for x in la.primitive_vector(mn.free_part(g, pair.ambient))]
                  for g in pair.N.generators]
        span_perp = la.kernel_basis(n_free)
        family += [tuple(r) for r in span_perp]
    else:
        family += [tuple(r) for r in la.identity_matrix(d)]
    family = _dedupe_updown(family)
    best = 1
    for combo in itertools.combinations(family, d):
        det = abs(la.mat_det([list(r) for r in combo]))
        if det > best:
            best = det
    return best


def _solution_map_for_face(pair: PairNP, face: cn.Face):
    """The linear map x -> coefficients of the extracted cone(N)-part on the
    linearity domain attached to this minimal face, or None when the tight
    system does not determine the component for generic x."""
    amb = pair.ambient
    d = amb.rank
    cp, cnN = pair_cones(pair)
    b_gp = la.lattice_basis(
        [[int(x * amb.den) for x in mn.free_part(g, amb)] for g in pair.N.generators], d)
    if not b_gp:
        return None
    s = len(b_gp)
    tight_rows = [cp.facet_normals[i] for i in sorted(face.tight_facets)]
    tight_rows = _dedupe_updown(tight_rows)
    if not tight_rows:
        return None
    # q = sum alpha_j B_j with T q = T x for the tight normals T
    M = [[sum(fr(t[i]) * b_gp[j][i] for i in range(d)) for j in range(s)]
         for t in tight_rows]
    if cn.rational_rank(M) < s:
        return None
    # solve M * A = T column by column
    A_cols = []
    for c in range(d):
        rhs = [fr(t[c]) for t in tight_rows]
        col = cn.solve_linear_system(M, rhs)
        if col is None:
            return None
        A_cols.append(col)
        # consistency: M*col == rhs must hold exactly (overdetermined case)
        for r in range(len(tight_rows)):
            if sum(M[r][j] * col[j] for j in range(s)) != rhs[r]:
                return None
    A = [[A_cols[c][j] for c in range(d)] for j in range(s)]  # s x d
    return A, b_gp


def refined_conductor(pair: PairNP) -> int:
    """lcm of the denominators of the extracted-component linear maps over
    the full-dimensional linearity domains; falls back to the determinant
    bound when no domain qualifies.  For a pseudo-saturated pair this is a
    certified conductor."""
    if is_degenerate(pair):
        return 1
    amb = pair.ambient
    d = amb.rank
    cp, cnN = pair_cones(pair)
    result = 1
    found = False
    for face in minimal_faces(pair):
        sol = _solution_map_for_face(pair, face)
        if sol is None:
            continue
        A, b_gp = sol
        s = len(b_gp)
        # q(x) in ambient coordinates
        qmat = [[sum(fr(b_gp[j][i]) * A[j][c] for j in range(s)) for c in range(d)]
                for i in range(d)]
        # full-dimensional domain test
        cons = [(n, 0, False) for n in cp.facet_normals]
        degenerate_face = False
        for i, n in enumerate(cp.facet_normals):
            if i in face.tight_facets:
                continue
            # functional <n, x - q(x)>
            rowf = [fr(n[c]) - sum(fr(n[i2]) * qmat[i2][c] for i2 in range(d))
                    for c in range(d)]
            if all(v == 0 for v in rowf):
                degenerate_face = True
                break
            cons.append((_clear_denoms(rowf), 0, True))
        if degenerate_face:
            continue
        for m in cnN.facet_normals:
            rowf = [sum(fr(m[i2]) * qmat[i2][c] for i2 in range(d)) for c in range(d)]
            if all(v == 0 for v in rowf):
                continue
            cons.append((_clear_denoms(rowf), 0, True))
        poly = cn.RationalPolyhedron.build(d, cons)
        if cn.lp_feasible_strict(poly) is None:
            continue
        found = True
        for j in range(s):
            for c in range(d):
                e = A[j][c]
                if e == 0:
                    continue
                q = e.denominator * amb.den // gcd(e.numerator, e.denominator * amb.den)
                result = lcm(result, q)
    if not found:
        return conductor_bound(pair)
    return result


def _clear_denoms(row):
    den = 1
    for x in row:
        den = lcm(den, fr(x).denominator)
    return tuple(int(fr(x) * den) for x in row)


# ---------------------------------------------------------------------------
# Definitional conductor spot checks
# ---------------------------------------------------------------------------

def _random_element(m: AffineMonoid, rng, max_coeff=3):
    v = m.ambient.zero()
    for g in m.generators:
        v = m.ambient.add(v, m.ambient.smul(rng.randint(0, max_coeff), g))
    return v


def _find_divisibility_witness(h: MonoidHom, M: int, n: int, x, y):
    """x' in the source with M x | n x' and h(x') | M y, or None (exhaustive
    over the finite divisor set of M y)."""
    src, tgt = h.source, h.target
    My = tgt.ambient.smul(M, y)
    Mx = src.ambient.smul(M, x)
    for d in divisors_in(tgt, My):
        xp = _hom_preimage_element(h, d)
        if xp is None:
            continue
        if mn.member(src, src.ambient.sub(src.ambient.smul(n, xp), Mx)) is not None:
            return xp
    return None


def check_conductor_property(h: MonoidHom, M: int, trials: int = 100,
                             seed: int = 0) -> dict:
    """Randomized spot-check of the defining conductor property: whenever
    h(x) divides n*y, some x' satisfies M x | n x' and h(x') | M y.

    Samples triples (n, x, y) with h(x) | n y and searches x' exhaustively
    over divisors of M y.  Never claims completeness."""
    if M < 1:
        raise ValueError("conductor must be >= 1")
    rng = random.Random(seed)
    failures = []
    checked = 0
    attempts = 0
    while checked < trials and attempts < 50 * trials:
        attempts += 1
        n = rng.randint(1, 4)
        x = _random_element(h.source, rng, 2)
        z = _random_element(h.target, rng, 2)
        total = h.target.ambient.add(h.apply(x), z)   # n*y candidate
        y = None
        cand = [Fraction(t, n) for t in total]
        try:
            ynorm = h.target.ambient.normalize(cand)
            if mn.member(h.target, ynorm) is not None:
                y = ynorm
        except ValueError:
            y = None
        if y is None:
            y = h.target.ambient.add(h.apply(x), z)
            n = 1
        checked += 1
        xp = _find_divisibility_witness(h, M, n, x, y)
        if xp is None:
            failures.append({"n": n, "x": x, "y": y})
    return {"trials": checked, "conductor": M, "seed": seed,
            "failures": failures, "ok": not failures}


def find_conductor_failure(h: MonoidHom, M: int, height: int = 4):
    """A definitional failure triple (n, x, y) for the given conductor, found
    by exhaustive search over bounded triples; None if none exists within
    the bound."""
    src_elems = [e for e in mn.elements_up_to(h.source, height)]
    tgt_elems = [e for e in mn.elements_up_to(h.target, height)]
    for n in range(1, 5):
        for x in src_elems:
            hx = h.apply(x)
            for y in tgt_elems:
                ny = h.target.ambient.smul(n, y)
                if mn.member(h.target, h.target.ambient.sub(ny, hx)) is None:
                    continue
                if _find_divisibility_witness(h, M, n, x, y) is None:
                    return (n, x, y)
    return None


# ---------------------------------------------------------------------------
# Reductions and chart validation
# ---------------------------------------------------------------------------

def sharpen_hom(h: MonoidHom):
    """The induced homomorphism between sharp quotients, with both
    projections.  Units map to units, so the matrix descends."""
    s_sharp, qs = mn.sharpen(h.source)
    t_sharp, qt = mn.sharpen(h.target)
    sec = _section_of(qs)
    mat = la.mat_mul([list(r) for r in qt.matrix],
                     la.mat_mul([list(r) for r in h.int_matrix], sec))
    hs = hom_from_int_matrix(s_sharp, t_sharp, mat)
    return hs, qs, qt


def _section_of(q: mn.QuotientMap):
    """Integer right inverse of a quotient projection (columns)."""
    rows = [list(r) for r in q.matrix]
    if not rows:
        return [[0] for _ in range(q.source.width)]
    n = q.target.width
    w = q.source.width
    cols = []
    for i in range(n):
        rhs = [int(i == j) for j in range(n)]
        # solve q.matrix * x = e_i + torsion adjustments; plain solve suffices
        sol = la.solve_integer(rows, rhs)
        assert sol is not None, "quotient projections are surjective"
        cols.append(sol)
    return la.transpose(cols)


def localize_monoid(m: AffineMonoid, s_elems) -> AffineMonoid:
    """The localization of m at the given elements (adds their inverses)."""
    gens = list(m.generators)
    for s in s_elems:
        s = m.ambient.normalize(s)
        if mn.member(m, s) is None:
            raise ValueError(f"{s} is not in the monoid")
        gens.append(m.ambient.smul(-1, s))
    return AffineMonoid.make(m.ambient, gens)


def localize_hom(h: MonoidHom, s_elems, t_elems):
    """The induced homomorphism on localizations; h(S) must divide into T's
    localization (validated by the hom constructor)."""
    src = localize_monoid(h.source, s_elems)
    tgt = localize_monoid(h.target, t_elems)
    return hom_from_int_matrix(src, tgt, [list(r) for r in h.int_matrix])


def validate_small_chart(h: MonoidHom, primes=None) -> dict:
    """Checklist for a standard chart: injectivity, torsion-free target,
    trivial cone intersection, integrality, quasi-saturatedness on a prime
    set, and torsion-freeness of the group-envelope cokernel."""
    report = {}
    report["injective"] = kernel_trivial(h)
    tgt_amb = h.target.ambient
    report["target_torsion_free"] = not tgt_amb.torsion
    try:
        img_gens = [h.apply(g) for g in h.source.generators]
        cp = mn.free_cone(h.target)
        if any(any(x for x in mn.free_part(g, tgt_amb)) for g in img_gens):
            cimg = cn.cone_from_generators(
                [mn.free_part(g, tgt_amb) for g in img_gens], tgt_amb.rank)
            report["trivial_intersection"] = cn.is_trivial_intersection(
                cp, cimg.negate())
        else:
            report["trivial_intersection"] = True
    except Exception:
        report["trivial_intersection"] = False
    try:
        ok, cert = is_integral(h)
        report["integral"] = ok
        if not ok:
            report["integral_certificate"] = cert
    except ValueError as exc:
        report["integral"] = False
        report["integral_error"] = str(exc)
    qs = is_quasi_saturated(h, primes)
    report["quasi_saturated_on_set"] = qs["verdict_on_set"]
    report["prime_set"] = qs["primes"]
    ck = cokernel_group(h)
    report["cokernel_torsion_free"] = not ck.invariant_factors
    report["cokernel"] = ck.describe()
    report["all_pass"] = all(report[k] for k in (
        "injective", "target_torsion_free", "trivial_intersection",
        "integral", "quasi_saturated_on_set", "cokernel_torsion_free"))
    return report


def pair_from_hom(h: MonoidHom) -> PairNP:
    """The pair (image of the source, target) attached to an injective
    homomorphism into a torsion-free fs monoid; pseudo-saturatedness of h
    only depends on this pair."""
    if not kernel_trivial(h):
        raise ValueError("pair extraction requires an injective homomorphism")
    imgs = [h.apply(g) for g in h.source.generators]
    return make_pair(h.target, imgs)
