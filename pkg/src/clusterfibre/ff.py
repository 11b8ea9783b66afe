"""Finite fields of odd characteristic, represented absolutely over F_p.

A field of p^d elements is F_p[t]/(modulus) with a monic irreducible modulus
of degree d; elements are coordinate vectors of length d.  Every field object
has its own identity, and moving between fields always goes through an
explicit Embedding.  There is no implicit coercion anywhere: arithmetic
between elements of different field objects raises.

Factorization is squarefree decomposition, then distinct-degree splitting,
then Cantor-Zassenhaus equal-degree splitting.  The equal-degree step draws
random elements from a caller-supplied ``random.Random``, so results are
reproducible for a fixed seed (the returned factor list is sorted into a
canonical order regardless).
"""

from __future__ import annotations

import random
from typing import Optional


class NotIrreducible(ValueError):
    pass


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _int_poly_mul_mod(a, b, modulus, p):
    """Product of int coefficient vectors, reduced mod (modulus, p)."""
    d = len(modulus) - 1
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    for i in range(len(out) - 1, d - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(d):
                out[i - d + j] = (out[i - d + j] - c * modulus[j]) % p
    return tuple(c % p for c in out[:d]) + (0,) * max(0, d - len(out))


class FField:
    """F_{p^degree} as F_p[t]/(modulus); modulus is a tuple of d+1 ints."""

    _counter = 0

    def __init__(self, p: int, modulus):
        modulus = tuple(c % p for c in modulus)
        if not modulus or modulus[-1] != 1:
            raise ValueError("modulus must be monic")
        self.p = p
        self.degree = len(modulus) - 1
        self.modulus = modulus
        FField._counter += 1
        self.uid = FField._counter
        self.zero = FFElem(self, (0,) * self.degree)
        self.one = FFElem(self, (1,) + (0,) * (self.degree - 1))
        self.gen = FFElem(self, tuple(1 if i == 1 else 0 for i in range(self.degree))) \
            if self.degree > 1 else FFElem(self, (-modulus[0] % p,))

    @property
    def order(self) -> int:
        return self.p ** self.degree

    def elem(self, coords) -> "FFElem":
        if isinstance(coords, int):
            coords = (coords,) + (0,) * (self.degree - 1)
        coords = tuple(c % self.p for c in coords)
        if len(coords) != self.degree:
            coords = coords + (0,) * (self.degree - len(coords))
        return FFElem(self, coords)

    def from_int_poly(self, coeffs) -> "FFElem":
        """Element given as an integer polynomial in the field generator."""
        acc = self.zero
        for c in reversed(list(coeffs)):
            acc = acc * self.gen + self.elem(c)
        return acc

    def all_prime_subfield(self):
        return [self.elem(i) for i in range(self.p)]

    def __repr__(self):
        return f"GF({self.p}^{self.degree})#{self.uid}"


def prime_field(p: int) -> FField:
    return FField(p, (0, 1))


class FFElem:
    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = tuple(coords)

    def _check(self, other):
        if not isinstance(other, FFElem) or other.field is not self.field:
            raise TypeError("mixed-field arithmetic; use an explicit Embedding")

    def __add__(self, other):
        self._check(other)
        p = self.field.p
        return FFElem(self.field, tuple((a + b) % p for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        p = self.field.p
        return FFElem(self.field, tuple((a - b) % p for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        p = self.field.p
        return FFElem(self.field, tuple((-a) % p for a in self.coords))

    def __mul__(self, other):
        self._check(other)
        F = self.field
        return FFElem(F, _int_poly_mul_mod(self.coords, other.coords, F.modulus, F.p))

    def __pow__(self, n):
        F = self.field
        if n < 0:
            return self.inverse() ** (-n)
        result, base = F.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "FFElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self ** (self.field.order - 2)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __eq__(self, other):
        return isinstance(other, FFElem) and other.field is self.field and other.coords == self.coords

    def __hash__(self):
        return hash((self.field.uid, self.coords))

    def __repr__(self):
        return f"ff({list(self.coords)})"


class Embedding:
    """Ring injection between explicit finite fields.

    ``matrix`` maps source coordinates to target coordinates (columns are the
    images of the source basis 1, t, t^2, ...).  Identity embeddings carry no
    matrix.
    """

    def __init__(self, src: FField, dst: FField, matrix=None):
        self.src = src
        self.dst = dst
        self.matrix = matrix  # list of dst-coordinate tuples, one per src basis vector

    def __call__(self, x: FFElem) -> FFElem:
        if x.field is not self.src:
            raise TypeError("element not in the embedding's source field")
        if self.matrix is None:
            if self.dst is not self.src:
                raise TypeError("identity embedding with distinct fields")
            return x
        p = self.dst.p
        out = [0] * self.dst.degree
        for c, col in zip(x.coords, self.matrix):
            if c:
                for i, m in enumerate(col):
                    out[i] = (out[i] + c * m) % p
        return FFElem(self.dst, tuple(out))

    def map_poly(self, f: "FFPoly") -> "FFPoly":
        return FFPoly(self.dst, [self(c) for c in f.coeffs])

    @staticmethod
    def identity(F: FField) -> "Embedding":
        return Embedding(F, F, None)

    def compose_after(self, inner: "Embedding") -> "Embedding":
        """self o inner."""
        if inner.dst is not self.src:
            raise TypeError("embeddings do not compose")
        cols = []
        for j in range(inner.src.degree):
            basis = FFElem(inner.src, tuple(1 if i == j else 0 for i in range(inner.src.degree)))
            cols.append(self(inner(basis)).coords)
        return Embedding(inner.src, self.dst, cols)


class FFPoly:
    """Polynomial over one FField, dense coefficient tuple, zero = ()."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FField, coeffs):
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @staticmethod
    def from_ints(field, ints) -> "FFPoly":
        return FFPoly(field, [field.elem(i) for i in ints])

    @staticmethod
    def x(field) -> "FFPoly":
        return FFPoly(field, [field.zero, field.one])

    @staticmethod
    def const(field, c: FFElem) -> "FFPoly":
        return FFPoly(field, [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i) -> FFElem:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    def lead(self) -> FFElem:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other):
        return (isinstance(other, FFPoly) and other.field is self.field
                and other.coeffs == self.coeffs)

    def __hash__(self):
        return hash((self.field.uid,) + tuple(c.coords for c in self.coeffs))

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return FFPoly(self.field, [self[i] + other[i] for i in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return FFPoly(self.field, [self[i] - other[i] for i in range(n)])

    def __neg__(self):
        return FFPoly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return FFPoly(self.field, [])
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return FFPoly(self.field, out)

    def scale(self, c: FFElem) -> "FFPoly":
        return FFPoly(self.field, [a * c for a in self.coeffs])

    def shift(self, k: int) -> "FFPoly":
        """Multiply by X^k, k >= 0."""
        if self.is_zero():
            return self
        return FFPoly(self.field, [self.field.zero] * k + list(self.coeffs))

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return FFPoly(self.field, []), self
        inv_lead = other.lead().inverse()
        quo = [self.field.zero] * (dq + 1)
        for i in range(dq, -1, -1):
            c = rem[i + other.degree] * inv_lead
            quo[i] = c
            if not c.is_zero():
                for j, b in enumerate(other.coeffs):
                    rem[i + j] = rem[i + j] - c * b
        return FFPoly(self.field, quo), FFPoly(self.field, rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "FFPoly":
        if self.is_zero():
            return self
        return self.scale(self.lead().inverse())

    def gcd(self, other) -> "FFPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def derivative(self) -> "FFPoly":
        F = self.field
        return FFPoly(F, [F.elem(i) * c for i, c in enumerate(self.coeffs)][1:])

    def evaluate(self, x: FFElem) -> FFElem:
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def pow_mod(self, n: int, modulus: "FFPoly") -> "FFPoly":
        result = FFPoly.const(self.field, self.field.one)
        base = self % modulus
        while n:
            if n & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            n >>= 1
        return result

    def compose_frobenius_root(self) -> "FFPoly":
        """Given f = g(X^p) return g with p-th roots taken on coefficients."""
        p, F = self.field.p, self.field
        root_exp = F.order // p
        out = []
        for i in range(0, len(self.coeffs), p):
            out.append(self.coeffs[i] ** root_exp)
        return FFPoly(F, out)

    def key(self):
        return (len(self.coeffs),) + tuple(c.coords for c in self.coeffs)

    def __repr__(self):
        return f"FFPoly({[list(c.coords) for c in self.coeffs]})"


def squarefree_decomposition(f: FFPoly):
    """List of (g_i, multiplicity) with f = lead * prod g_i^m_i, g_i squarefree monic."""
    F = f.field
    parts = []
    f = f.monic()

    def rec(g, mult):
        if g.degree <= 0:
            return
        dg = g.derivative()
        if dg.is_zero():
            rec(g.compose_frobenius_root(), mult * F.p)
            return
        c = g.gcd(dg)
        w = g // c
        i = 1
        while w.degree > 0:
            y = w.gcd(c)
            z = w // y
            if z.degree > 0:
                parts.append((z, mult * i))
            w = y
            c = c // y
            i += 1
        if c.degree > 0:
            # leftover collects the factors with multiplicity divisible by p,
            # so it is a polynomial in X^p; strip one Frobenius layer
            rec(c.compose_frobenius_root(), mult * F.p)

    rec(f, 1)
    return parts


def _distinct_degree(f: FFPoly):
    """f squarefree monic -> list of (product of degree-d factors, d)."""
    F = f.field
    out = []
    x = FFPoly.x(F)
    h = x % f
    d = 0
    rest = f
    while rest.degree > 0:
        d += 1
        if 2 * d > rest.degree:
            out.append((rest, rest.degree))
            break
        h = h.pow_mod(F.order, f)
        g = rest.gcd(h - x)
        if g.degree > 0:
            out.append((g, d))
            rest = rest // g
    return out


def _equal_degree_split(f: FFPoly, d: int, rng: random.Random):
    """Split a squarefree monic product of degree-d irreducibles (odd char)."""
    F = f.field
    if f.degree == d:
        return [f]
    exponent = (F.order ** d - 1) // 2
    while True:
        a = FFPoly(F, [F.elem(tuple(rng.randrange(F.p) for _ in range(F.degree)))
                       for _ in range(f.degree)])
        if a.degree < 1:
            continue
        g = f.gcd(a)
        if 0 < g.degree < f.degree:
            pass
        else:
            b = a.pow_mod(exponent, f) - FFPoly.const(F, F.one)
            g = f.gcd(b)
            if not (0 < g.degree < f.degree):
                continue
        return _equal_degree_split(g, d, rng) + _equal_degree_split(f // g, d, rng)


def ff_factor(f: FFPoly, rng: Optional[random.Random] = None):
    """Factor a nonzero polynomial into monic irreducibles with multiplicities.

    Returns a canonically sorted list of (factor, multiplicity); the product
    of the factors (to their multiplicities), times lead(f), rebuilds f.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if rng is None:
        rng = random.Random(0)
    factors = []
    for g, mult in squarefree_decomposition(f):
        for h, d in _distinct_degree(g):
            for irr in _equal_degree_split(h, d, rng):
                factors.append((irr, mult))
    factors.sort(key=lambda fm: fm[0].key())
    return factors


def is_irreducible(f: FFPoly) -> bool:
    """Rabin test: X^{q^n} = X mod f and gcd(X^{q^{n/r}} - X, f) = 1."""
    if f.degree < 1:
        return False
    if f.degree == 1:
        return True
    F = f.field
    x = FFPoly.x(F)
    n = f.degree
    h = x % f
    powers = {}
    for i in range(1, n + 1):
        h = h.pow_mod(F.order, f)
        powers[i] = h
    if not (powers[n] - x % f).is_zero():
        return False
    for r in {d for d in range(2, n + 1) if n % d == 0 and _is_prime(d)}:
        g = f.gcd(powers[n // r] - x)
        if g.degree != 0:
            return False
    return True


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def find_irreducible_int_poly(p: int, degree: int):
    """Deterministically pick a monic integer polynomial of the given degree
    that is irreducible mod p (smallest in the counting order)."""
    F = prime_field(p)
    if degree == 1:
        return (0, 1)
    bound = p ** degree
    for code in range(bound):
        coeffs, c = [], code
        for _ in range(degree):
            coeffs.append(c % p)
            c //= p
        cand = tuple(coeffs) + (1,)
        if is_irreducible(FFPoly.from_ints(F, cand)):
            return cand
    raise AssertionError("no irreducible polynomial found")  # unreachable


def _gauss_solve_mod_p(rows, rhs, p):
    """Solve M x = rhs over F_p; rows is a list of row tuples. Returns list or None."""
    n = len(rows)
    m = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if aug[i][c] % p), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][c], -1, p)
        aug[r] = [(v * inv) % p for v in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] % p:
                f = aug[i][c]
                aug[i] = [(a - f * b) % p for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == n:
            break
    for i in range(r, n):
        if aug[i][m] % p:
            return None
    x = [0] * m
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][m] % p
    return x


def ff_extend(F: FField, h: FFPoly, rng: Optional[random.Random] = None):
    """Build the extension of F by a monic irreducible h.

    Returns ``(G, emb, root)`` where G is an absolute field of degree
    [F:F_p] * deg h, emb : F -> G is a ring injection, and h(root) = 0 after
    mapping h's coefficients through emb.
    """
    if h.degree < 1 or not is_irreducible(h):
        raise NotIrreducible("modulus of a field extension must be irreducible")
    if h.degree == 1:
        root = -(h[0] * h[1].inverse())
        return F, Embedding.identity(F), root

    p, a, t = F.p, F.degree, h.degree
    n = a * t
    hm = h.monic()

    # Arithmetic in E = F[Y]/(h): vectors of t coefficients in F.
    def e_mul(u, v):
        out = [F.zero] * (2 * t - 1)
        for i, ui in enumerate(u):
            if not ui.is_zero():
                for j, vj in enumerate(v):
                    out[i + j] = out[i + j] + ui * vj
        for i in range(len(out) - 1, t - 1, -1):
            c = out[i]
            if not c.is_zero():
                out[i] = F.zero
                for j in range(t):
                    out[i - t + j] = out[i - t + j] - c * hm[j]
        return out[:t]

    def flat(u):
        coords = []
        for c in u:
            coords.extend(c.coords)
        return tuple(coords)

    y_vec = [F.zero, F.one] + [F.zero] * (t - 2)
    theta_vec = [F.gen] + [F.zero] * (t - 1)

    for c in range(p * a + 1):
        # candidate generator gamma = Y + c*theta_F
        gamma = [yi + F.elem(c) * ti for yi, ti in zip(y_vec, theta_vec)]
        powers = [[F.one] + [F.zero] * (t - 1)]
        for _ in range(n):
            powers.append(e_mul(powers[-1], gamma))
        rows = [flat(v) for v in powers]
        # minimal polynomial: first dependence among 1, gamma, ..., gamma^n
        cols = list(zip(*rows[:n]))  # n x n matrix, columns indexed by power
        sol = _gauss_solve_mod_p([tuple(col) for col in cols],
                                 [(-x) % p for x in rows[n]], p)
        if sol is None:
            continue
        modulus = tuple(sol) + (1,)
        G = FField(p, modulus)
        # coordinates w.r.t. gamma-powers: solve P * x = vec for the basis images
        power_cols = [tuple(col) for col in zip(*rows[:n])]

        def to_G(u):
            x = _gauss_solve_mod_p(power_cols, list(flat(u)), p)
            return FFElem(G, tuple(x))

        emb_cols = []
        basis_pow = [F.one] + [F.zero] * (t - 1)
        for j in range(a):
            vec = [F.gen ** j] + [F.zero] * (t - 1)
            emb_cols.append(to_G(vec).coords)
        emb = Embedding(F, G, emb_cols)
        root = to_G(y_vec)
        # sanity: root satisfies the mapped modulus
        mapped = emb.map_poly(hm)
        if not mapped.evaluate(root).is_zero():
            raise AssertionError("extension construction failed root check")
        return G, emb, root
    raise AssertionError("no primitive generator found")  # unreachable for finite fields
