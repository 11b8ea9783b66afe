r"""Newton polygons, graded reductions, residue towers, and key polynomials.

Everything here is relative to a MacLaneVal chain.  The residue tower
k_0 <= k_1 <= ... <= k_n attaches one finite field per augmentation step:
k_{i+1} is k_i extended by the reduction of phi_{i+1} with respect to the
depth-i truncation, and the designated generator of the step is the image
of the graded variable of level i.

The graded reduction H(level, alpha, g) returns a Laurent polynomial over
k_level, computed by recursive descent on phi-adic expansions: only the
expansion terms sitting on the line u + lambda*i = alpha contribute, their
indices form an arithmetic progression with gap e_level, and each
contributes its own lower-level H image.  The Laurent monomial twist
X^{c(alpha)} is carried as an explicit integer shift so both normalizations
of a residual polynomial are recoverable.

No graded ring is ever materialized: a Laurent value is a pair
(shift, polynomial) and mapping one level up means evaluating the variable
at the designated generator through the recorded embedding.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional

from .field import KPoly
from .ff import FField, FFElem, FFPoly, Embedding, ff_extend, is_irreducible
from .rationals import OO
from .valuation import MacLaneVal, NotAKeyPolynomial, RadiusNotAboveCentreValue


class AlphaNotInValueGroup(ValueError):
    pass


class HEqualsX(ValueError):
    pass


class NotIrreducibleResidual(ValueError):
    pass


# ---------------------------------------------------------------------------
# Newton polygons


class EdgeData:
    """Selected-edge endpoints (i0, u0), (i1, u1); lam is minus the slope."""

    __slots__ = ("lam", "i0", "u0", "i1", "u1")

    def __init__(self, lam, i0, u0, i1, u1):
        self.lam, self.i0, self.u0, self.i1, self.u1 = lam, i0, u0, i1, u1

    @property
    def width(self) -> int:
        return self.i1 - self.i0

    def __repr__(self):
        from .rationals import qstr
        return f"Edge(lam={qstr(self.lam)}, ({self.i0},{qstr(self.u0)})..({self.i1},{qstr(self.u1)}))"


class NewtonPolygon:
    """Lower convex hull of the expansion points (i, v_prev(a_i))."""

    def __init__(self, points, v_prev=None, phi=None):
        self.points = sorted(points)
        self.v_prev = v_prev
        self.phi = phi
        self.vertices = _lower_hull(self.points)

    def edges(self) -> List[EdgeData]:
        out = []
        for (i0, u0), (i1, u1) in zip(self.vertices, self.vertices[1:]):
            lam = Fraction(u0 - u1, i1 - i0)
            out.append(EdgeData(lam, i0, u0, i1, u1))
        return out

    def slopes(self):
        return [-e.lam for e in self.edges()]

    def __repr__(self):
        return f"NewtonPolygon({self.vertices})"


def _lower_hull(points):
    verts = []
    for pt in points:
        while len(verts) >= 2:
            (ox, oy), (ax, ay) = verts[-2], verts[-1]
            bx, by = pt
            if (ax - ox) * (by - oy) - (ay - oy) * (bx - ox) <= 0:
                verts.pop()
            else:
                break
        verts.append(pt)
    return verts


def newton_polygon(v_prev: MacLaneVal, phi: KPoly, f: KPoly) -> NewtonPolygon:
    if f.is_zero():
        raise ValueError("Newton polygon of the zero polynomial")
    pts = []
    for i, a in enumerate(f.phi_expand(phi)):
        if not a.is_zero():
            pts.append((i, v_prev.eval(a)))
    return NewtonPolygon(pts, v_prev, phi)


def principal_part(N: NewtonPolygon, vphi) -> NewtonPolygon:
    """Sub-polygon of the edges with slope < -vphi."""
    verts = [N.vertices[0]]
    for (i0, u0), (i1, u1) in zip(N.vertices, N.vertices[1:]):
        slope = Fraction(u1 - u0, i1 - i0)
        if slope < -vphi:
            verts.append((i1, u1))
        else:
            break
    M = NewtonPolygon.__new__(NewtonPolygon)
    M.points = verts
    M.vertices = verts
    M.v_prev, M.phi = N.v_prev, N.phi
    return M


def selected_edge(N: NewtonPolygon, lam) -> EdgeData:
    """Endpoints of the part of N touched first by a line of slope -lam."""
    if lam is OO:
        i1, u1 = N.vertices[0]
        return EdgeData(OO, 0, OO, i1, u1)
    best = None
    lo = hi = None
    for (i, u) in N.vertices:
        key = u + lam * i
        if best is None or key < best:
            best, lo, hi = key, (i, u), (i, u)
        elif key == best:
            hi = (i, u)
    return EdgeData(lam, lo[0], lo[1], hi[0], hi[1])


# ---------------------------------------------------------------------------
# Residue towers


class ResidueTower:
    """Fields k_0 .. k_n with step embeddings, generators, and moduli."""

    __slots__ = ("fields", "embeddings", "gens", "moduli", "rel_degrees")

    def __init__(self, fields, embeddings, gens, moduli, rel_degrees):
        self.fields = fields
        self.embeddings = embeddings  # embeddings[i]: k_i -> k_{i+1}
        self.gens = gens              # gens[i+1]: image of the level-i variable in k_{i+1}
        self.moduli = moduli          # moduli[i+1]: reduction of phi_{i+1} over k_i
        self.rel_degrees = rel_degrees

    @property
    def top(self) -> FField:
        return self.fields[-1]

    def embed_to_top(self, level: int, x: FFElem) -> FFElem:
        for i in range(level, len(self.fields) - 1):
            x = self.embeddings[i](x)
        return x


def residue_tower(v: MacLaneVal) -> ResidueTower:
    """Tower of the chain, built incrementally on the cached truncations so
    every prefix shares its field objects with the full chain."""
    if "tower" in v._cache:
        return v._cache["tower"]
    depth = v.depth if not v.is_pseudo else v.depth - 1
    if depth == 0:
        tower = ResidueTower([v.field.residue_field], [], [None], [None], [])
    elif v.is_pseudo or depth < v.depth:
        tower = residue_tower(v.truncation(depth))
    else:
        prefix = v.truncation(depth - 1)
        base = residue_tower(prefix)
        phi_n = v.steps[depth - 1].phi
        # the modulus of the step is the reduction of the new centre, taken
        # over the prefix so its coefficients live in the prefix's top field
        red = reduce_poly(prefix, phi_n)
        modulus = red.poly
        if modulus.degree != phi_n.degree // (prefix.deg * red.b):
            raise AssertionError("tower modulus has unexpected degree")
        G, emb, root = ff_extend(base.fields[-1], modulus)
        tower = ResidueTower(base.fields + [G], base.embeddings + [emb],
                             base.gens + [root], base.moduli + [modulus],
                             base.rel_degrees + [modulus.degree])
    v._cache["tower"] = tower
    return tower


# ---------------------------------------------------------------------------
# Graded reduction maps


class Laurent:
    """A Laurent polynomial over one tower level: X^shift * poly(X)."""

    __slots__ = ("field", "shift", "poly")

    def __init__(self, field: FField, shift: int, poly: FFPoly):
        self.field = field
        self.shift = shift
        self.poly = poly

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __repr__(self):
        return f"X^{self.shift} * {self.poly!r}"


def _ui_pair(e_i: int, h_i: int, scaled_alpha: int):
    """u, i with u*e_i + i*h_i = scaled_alpha and 0 <= i < e_i."""
    if e_i == 1:
        return scaled_alpha - 0, 0
    i = (scaled_alpha * pow(h_i, -1, e_i)) % e_i
    u = (scaled_alpha - i * h_i) // e_i
    return u, i


def graded_H(v: MacLaneVal, level: int, alpha, g: KPoly) -> Laurent:
    """H_{level, alpha}(g): zero if the level value of g exceeds alpha.

    alpha must lie in the value group of the depth-``level`` truncation.
    """
    tower = residue_tower(v)
    return _graded_H(v, tower, level, alpha, g)


def _graded_H(v: MacLaneVal, tower: ResidueTower, level: int, alpha, g: KPoly) -> Laurent:
    kf = tower.fields[level]
    if g.is_zero():
        return Laurent(kf, 0, FFPoly(kf, []))
    scaled = alpha * v.e_levels[level]
    if not isinstance(scaled, int) and Fraction(scaled).denominator != 1:
        raise AlphaNotInValueGroup(f"{alpha} is not in the value group at level {level}")
    scaled = int(scaled)
    val = v._eval_level(level, g)
    if val > alpha:
        return Laurent(kf, 0, FFPoly(kf, []))
    if val < alpha:
        raise ValueError("graded reduction of an element below the stated degree")
    if level == 0:
        p = v.field.p
        unit = Fraction(p) ** (-scaled)
        coeffs = [(c * v.field.rat(unit)).residue() for c in g.coeffs]
        return Laurent(kf, 0, FFPoly(kf, coeffs))
    e_i = v.e_rel[level]
    h_i = v.h_rel[level]
    lam = v.steps[level - 1].lam
    phi = v.steps[level - 1].phi
    u_a, i_a = _ui_pair(e_i, h_i, scaled)
    c_a = v.ellp[level] * i_a - v.ell[level] * u_a
    coeffs = []
    expansion = g.phi_expand(phi)
    j = 0
    s = i_a
    while s < len(expansion):
        a_s = expansion[s]
        alpha_j = alpha - s * lam
        if a_s.is_zero():
            coeffs.append(kf.zero)
        else:
            inner = _graded_H(v, tower, level - 1, alpha_j, a_s)
            coeffs.append(_rho(tower, level, inner))
        j += 1
        s = i_a + j * e_i
    return Laurent(kf, c_a, FFPoly(kf, coeffs))


def _rho(tower: ResidueTower, level: int, lau: Laurent) -> FFElem:
    """Map a Laurent value over k_{level-1} into k_level via the step generator."""
    emb = tower.embeddings[level - 1]
    gen = tower.gens[level]
    kf = tower.fields[level]
    if lau.is_zero():
        return kf.zero
    if gen.is_zero() and lau.shift < 0:
        raise AssertionError("negative power of a vanishing step generator")
    acc = kf.zero
    for j, c in enumerate(lau.poly.coeffs):
        if not c.is_zero():
            acc = acc + emb(c) * gen ** (lau.shift + j)
    return acc


# ---------------------------------------------------------------------------
# Residual polynomials (reductions)


class Reduction:
    """f|_v together with the selected-edge data it came from.

    ``poly`` is f|_v over the top tower field; ``i0``/``i1`` are the edge
    endpoints, ``b`` the last-step relative index e_n, and ``h_exponent``
    the integer E with H_{n,alpha}(f) = X^E * f|_v, so the alpha-graded
    normalization is recoverable from the plain one.
    """

    __slots__ = ("poly", "alpha", "i0", "i1", "b", "floor_shift", "h_exponent")

    def __init__(self, poly, alpha, i0, i1, b, floor_shift, h_exponent):
        self.poly = poly
        self.alpha = alpha
        self.i0 = i0
        self.i1 = i1
        self.b = b
        self.floor_shift = floor_shift
        self.h_exponent = h_exponent

    @property
    def degree(self) -> int:
        return self.poly.degree

    def __repr__(self):
        return f"Reduction(i0={self.i0}, i1={self.i1}, poly={self.poly!r})"


def reduce_poly(v: MacLaneVal, f: KPoly) -> Reduction:
    """The reduction f|_v along the chain of v (Gauss handled coefficientwise)."""
    if f.is_zero():
        raise ValueError("reduction of the zero polynomial")
    tower = residue_tower(v)
    if v.is_gauss:
        alpha = v.eval(f)
        unit = Fraction(v.field.p) ** (-int(alpha))
        kf = tower.fields[0]
        coeffs = [(c * v.field.rat(unit)).residue() for c in f.coeffs]
        poly = FFPoly(kf, coeffs)
        return Reduction(poly, alpha, 0, f.degree, 1, 0, 0)
    if v.is_pseudo:
        raise ValueError("reduction with respect to an infinite pseudo-valuation")
    n = v.depth
    lam = v.steps[-1].lam
    phi = v.steps[-1].phi
    prev = v.truncation(n - 1)
    expansion = f.phi_expand(phi)
    alpha = OO
    for s, a in enumerate(expansion):
        if a.is_zero():
            continue
        t = prev.eval(a) + lam * s
        if alpha is OO or t < alpha:
            alpha = t
    i0 = i1 = None
    for s, a in enumerate(expansion):
        if a.is_zero():
            continue
        if prev.eval(a) + lam * s == alpha:
            if i0 is None:
                i0 = s
            i1 = s
    e_n = v.e_rel[n]
    kf = tower.top
    coeffs = []
    for j in range((i1 - i0) // e_n + 1):
        s = i0 + j * e_n
        a_s = expansion[s] if s < len(expansion) else KPoly(v.field, [])
        if a_s.is_zero():
            coeffs.append(kf.zero)
            continue
        alpha_j = alpha - s * lam
        inner = _graded_H(v, residue_tower(v), n - 1, alpha_j, a_s)
        coeffs.append(_rho(residue_tower(v), n, inner))
    poly = FFPoly(kf, coeffs)
    h_exp = Fraction(i0, e_n) - v.ell[n] * v.e_levels[n - 1] * alpha
    if h_exp.denominator != 1:
        raise AssertionError("graded shift exponent must be an integer")
    return Reduction(poly, alpha, i0, i1, e_n, i0 // e_n, int(h_exp))


# ---------------------------------------------------------------------------
# Key polynomials


def is_key(v: MacLaneVal, phi: KPoly) -> bool:
    """Key-polynomial test over v: same-degree equivalent-to-centre case, or
    irreducible reduction with full edge and i0 = 0."""
    if not phi.is_monic() or phi.degree < 1:
        return False
    if any(c.val() is not OO and c.val() < 0 for c in phi.coeffs):
        return False
    if v.is_gauss:
        red = reduce_poly(v, phi)
        if v.eval(phi) != 0:
            return False
        return is_irreducible(red.poly)
    if phi.degree == v.deg and v.equiv(phi, v.centre):
        return True
    if phi.degree % v.deg:
        return False
    red = reduce_poly(v, phi)
    if red.i0 != 0:
        return False
    if phi.degree != red.i1 * v.deg:
        return False
    return is_irreducible(red.poly)


def augment(v: MacLaneVal, phi: KPoly, lam) -> MacLaneVal:
    """Checked augmentation: phi must be a key polynomial and lam > v(phi)."""
    if not is_key(v, phi):
        raise NotAKeyPolynomial("augmentation centre is not a key polynomial")
    if lam is not OO and lam <= v.eval(phi):
        raise RadiusNotAboveCentreValue("radius must exceed the centre's value")
    return v.augment_unchecked(phi, lam)


def _balanced(x: int, p: int) -> int:
    x %= p
    return x if x <= p // 2 else x - p


def _lift_subfield_elem(K, t) -> "KElem":
    """Integer lift of a residue element with balanced coordinates."""
    if K.m > 1:
        return K.elem(*[_balanced(int(x), K.p) for x in t.coords])
    return K.rat(_balanced(int(t.coords[0]), K.p))


def _decompose_over_step(tower: ResidueTower, level: int, c: FFElem):
    """Write c in k_level as sum emb(t_j) * gen^j, j < rel degree of the step."""
    emb = tower.embeddings[level - 1]
    gen = tower.gens[level]
    kf = tower.fields[level]
    sub = tower.fields[level - 1]
    rel = tower.rel_degrees[level - 1]
    p = kf.p
    cols = []
    basis_elems = []
    for j in range(rel):
        for t in range(sub.degree):
            b = FFElem(sub, tuple(1 if u == t else 0 for u in range(sub.degree)))
            val = emb(b) * gen ** j
            cols.append(val.coords)
            basis_elems.append((j, b))
    from .ff import _gauss_solve_mod_p
    rows = [tuple(col[i] for col in cols) for i in range(kf.degree)]
    sol = _gauss_solve_mod_p(rows, list(c.coords), p)
    if sol is None:
        raise AssertionError("step decomposition failed")
    out = [sub.zero] * rel
    for coeff, (j, b) in zip(sol, basis_elems):
        if coeff:
            scaled = FFElem(sub, tuple((coeff * x) % p for x in b.coords))
            out[j] = out[j] + scaled
    return out


def _inv_graded(v: MacLaneVal, tower: ResidueTower, level: int, alpha, c: FFElem) -> KPoly:
    """Preimage construction: a in K[x] with deg a < deg phi_{level+1},
    value alpha at depth ``level``, and rho(H(level, alpha, a)) = c."""
    K = v.field
    if c.is_zero():
        raise ValueError("preimage of zero requested")
    if level == 0:
        scaled = int(alpha)
        parts = _decompose_over_step(tower, 1, c)
        lift = KPoly(K, [_lift_subfield_elem(K, t) for t in parts])
        return lift.scale(K.rat(Fraction(K.p) ** scaled))
    e_i = v.e_rel[level]
    h_i = v.h_rel[level]
    lam = v.steps[level - 1].lam
    phi = v.steps[level - 1].phi
    scaled = alpha * v.e_levels[level]
    assert Fraction(scaled).denominator == 1
    u_a, i_a = _ui_pair(e_i, h_i, int(scaled))
    c_a = v.ellp[level] * i_a - v.ell[level] * u_a
    gen_up = tower.gens[level + 1]
    target = c * gen_up ** (-c_a) if c_a else c
    parts = _decompose_over_step(tower, level + 1, target)
    acc = KPoly(K, [])
    for j, t_j in enumerate(parts):
        if t_j.is_zero():
            continue
        s = i_a + j * e_i
        alpha_j = alpha - s * lam
        a_j = _inv_graded(v, tower, level - 1, alpha_j, t_j)
        acc = acc + a_j * phi ** s
    return acc


def lift_key(v: MacLaneVal, h: FFPoly) -> KPoly:
    """A key polynomial over v whose reduction is the monic irreducible h != X.

    The result is monic of degree b_v * deg(v) * deg(h) with integral
    coefficients; the roundtrip through reduce_poly is checked before
    returning.
    """
    tower = residue_tower(v)
    kv = tower.top
    if h.field is not kv:
        raise ValueError("residual polynomial must live over the top residue field")
    if h.degree < 1 or not h.lead() == kv.one or not is_irreducible(h):
        raise NotIrreducibleResidual("lift target must be monic irreducible")
    if h.degree >= 1 and h[0].is_zero():
        raise HEqualsX("cannot lift a residual polynomial divisible by X")
    K = v.field
    if v.is_gauss:
        phi = KPoly(K, [_lift_subfield_elem(K, c) for c in h.coeffs[:-1]] + [K.one])
        assert is_key(v, phi)
        return phi
    n = v.depth
    e_n = v.e_rel[n]
    lam = v.steps[-1].lam
    phi_n = v.steps[-1].phi
    d = h.degree
    acc = phi_n ** (d * e_n)
    for j in range(d):
        c_j = h[j]
        if c_j.is_zero():
            continue
        alpha_j = (d - j) * e_n * lam
        a_j = _inv_graded(v, tower, n - 1, alpha_j, c_j)
        acc = acc + a_j * phi_n ** (j * e_n)
    if any(c.val() is not OO and c.val() < 0 for c in acc.coeffs):
        raise AssertionError("lifted key has non-integral coefficients")
    red = reduce_poly(v, acc)
    if not (red.i0 == 0 and red.poly == h):
        raise AssertionError("lifted key failed the reduction roundtrip")
    return acc


def residual_order(red_poly: FFPoly, factor: FFPoly) -> int:
    """Multiplicity of a monic factor inside a residual polynomial."""
    count = 0
    g = red_poly
    while True:
        q, r = g.divmod(factor)
        if not r.is_zero():
            return count
        count += 1
        g = q
