"""The p-adic coefficient field, its residue field, and polynomials over it.

The base field is the unramified extension K = Q_p(theta) of degree m, with
theta a root of a monic integer polynomial whose reduction mod p is
irreducible.  Elements are restricted to the number field Q(theta) sitting
inside K, stored as coordinate vectors of Fractions in the power basis
1, theta, ..., theta^(m-1).  Every computation in the package stays inside
Q(theta), so all arithmetic is exact; completions are never approximated.

The normalized valuation has val(p) = 1.  Because the reduction of the
defining polynomial stays irreducible, the power basis reduces to a basis of
the residue field, and the valuation of an element is the minimum of the
p-adic valuations of its coordinates; this is checked at construction time.

KPoly is a dense univariate polynomial over K.  The phi-adic expansion
(repeated division by a monic phi) is the workhorse for everything
valuation-theoretic downstream.
"""

from __future__ import annotations

from fractions import Fraction
from .ff import (FField, FFElem, FFPoly, prime_field, is_irreducible,
                 find_irreducible_int_poly)
from .rationals import OO, ext_min


class NegativeValuation(ValueError):
    pass


class NotSeparable(ValueError):
    pass


def vp_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of integer 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_fraction(x: Fraction, p: int):
    if x == 0:
        return OO
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def _qpoly_divmod(a, b):
    """divmod of Fraction coefficient lists (dense, may have float-free zeros)."""
    a = list(a)
    db = len(b) - 1
    while b and b[-1] == 0:
        b = b[:-1]
        db -= 1
    if db < 0:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(0, len(a) - db)
    inv = Fraction(1) / b[-1]
    for i in range(len(a) - db - 1, -1, -1):
        c = a[i + db] * inv
        q[i] = c
        if c:
            for j in range(db + 1):
                a[i + j] -= c * b[j]
    r = a[:db]
    while r and r[-1] == 0:
        r.pop()
    return q, r


class BaseField:
    """Unramified p-adic base field with exact Q(theta) coefficients."""

    def __init__(self, p: int, m: int = 1, gen_minpoly=None):
        if p < 3 or not _is_prime(p):
            raise ValueError("residue characteristic must be an odd prime")
        if gen_minpoly is None:
            gen_minpoly = find_irreducible_int_poly(p, m)
        gen_minpoly = tuple(int(c) for c in gen_minpoly)
        if len(gen_minpoly) != m + 1 or gen_minpoly[-1] != 1:
            raise ValueError("gen_minpoly must be monic of degree m")
        self.p = p
        self.m = m
        self.gen_minpoly = gen_minpoly
        if m == 1:
            self.residue_field = prime_field(p)
        else:
            red = FFPoly.from_ints(prime_field(p), gen_minpoly)
            if not is_irreducible(red):
                raise ValueError("gen_minpoly reduction mod p must stay irreducible")
            self.residue_field = FField(p, gen_minpoly)
        self.zero = KElem(self, (Fraction(0),) * m)
        self.one = KElem(self, (Fraction(1),) + (Fraction(0),) * (m - 1))

    def elem(self, *coords) -> "KElem":
        if len(coords) == 1 and isinstance(coords[0], (list, tuple)):
            coords = tuple(coords[0])
        cs = tuple(Fraction(c) for c in coords)
        if len(cs) > self.m:
            raise ValueError("too many coordinates")
        return KElem(self, cs + (Fraction(0),) * (self.m - len(cs)))

    def rat(self, x) -> "KElem":
        return self.elem(Fraction(x))

    @property
    def theta(self) -> "KElem":
        if self.m == 1:
            return self.zero
        return self.elem(*([0, 1]))

    def poly(self, coeffs) -> "KPoly":
        out = []
        for c in coeffs:
            if isinstance(c, KElem):
                out.append(c)
            else:
                out.append(self.rat(c))
        return KPoly(self, out)

    def x(self) -> "KPoly":
        return self.poly([0, 1])

    def __repr__(self):
        return f"Q_{self.p}" if self.m == 1 else f"Q_{self.p}(theta_deg{self.m})"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class KElem:
    __slots__ = ("field", "coords")

    def __init__(self, field: BaseField, coords):
        self.field = field
        self.coords = tuple(coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __eq__(self, other):
        return (isinstance(other, KElem) and other.field is self.field
                and other.coords == self.coords)

    def __hash__(self):
        return hash(self.coords)

    def __add__(self, other):
        return KElem(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return KElem(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return KElem(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other):
        K = self.field
        if K.m == 1:
            return KElem(K, (self.coords[0] * other.coords[0],))
        out = [Fraction(0)] * (2 * K.m - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    out[i + j] += a * b
        mod = K.gen_minpoly
        for i in range(len(out) - 1, K.m - 1, -1):
            c = out[i]
            if c:
                out[i] = Fraction(0)
                for j in range(K.m):
                    out[i - K.m + j] -= c * mod[j]
        return KElem(K, tuple(out[:K.m]))

    def inverse(self) -> "KElem":
        K = self.field
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if K.m == 1:
            return KElem(K, (1 / self.coords[0],))
        # extended Euclid in Q[x] against the defining polynomial: maintain
        # s with s * self = r (mod minpoly); degrees of s stay below m
        a = [Fraction(c) for c in K.gen_minpoly]
        b = [c for c in self.coords]
        while b and b[-1] == 0:
            b.pop()
        s_prev, s_cur = [Fraction(0)], [Fraction(1)]
        while len(b) > 1:
            q, r = _qpoly_divmod(a, b)
            prod = [Fraction(0)] * (len(q) + len(s_cur))
            for i, qi in enumerate(q):
                if qi:
                    for j, sj in enumerate(s_cur):
                        prod[i + j] += qi * sj
            nxt = [Fraction(0)] * max(len(s_prev), len(prod))
            for i, c in enumerate(s_prev):
                nxt[i] += c
            for i, c in enumerate(prod):
                nxt[i] -= c
            while nxt and nxt[-1] == 0:
                nxt.pop()
            a, b = b, r
            s_prev, s_cur = s_cur, nxt
        inv = 1 / b[0]
        out = [c * inv for c in s_cur] + [Fraction(0)] * K.m
        return KElem(K, tuple(out[:K.m]))

    def __pow__(self, n: int) -> "KElem":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def val(self):
        """Normalized valuation: min of coordinate p-adic valuations; val(p)=1."""
        return ext_min(vp_fraction(c, self.field.p) for c in self.coords)

    def residue(self) -> FFElem:
        """Reduction to the residue field; requires val >= 0."""
        if self.val() is not OO and self.val() < 0:
            raise NegativeValuation("cannot reduce an element of negative valuation")
        K, p = self.field, self.field.p
        k = K.residue_field
        acc = k.zero
        gen_pow = k.one
        for c in self.coords:
            num = c.numerator % p
            den = c.denominator % p
            acc = acc + k.elem(num * pow(den, -1, p)) * gen_pow
            gen_pow = gen_pow * k.gen if K.m > 1 else gen_pow
        return acc

    def __repr__(self):
        if self.field.m == 1:
            return str(self.coords[0])
        return "(" + " + ".join(f"{c}*th^{i}" if i else str(c)
                                for i, c in enumerate(self.coords) if c) + ")" \
            if not self.is_zero() else "0"


class KPoly:
    """Dense univariate polynomial over the base field; zero = empty tuple."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: BaseField, coeffs):
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i) -> KElem:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    def lead(self) -> KElem:
        if self.is_zero():
            raise ValueError("zero polynomial")
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return not self.is_zero() and self.lead() == self.field.one

    def __eq__(self, other):
        return (isinstance(other, KPoly) and other.field is self.field
                and other.coeffs == self.coeffs)

    def __hash__(self):
        return hash(tuple(c.coords for c in self.coeffs))

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return KPoly(self.field, [self[i] + other[i] for i in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return KPoly(self.field, [self[i] - other[i] for i in range(n)])

    def __neg__(self):
        return KPoly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return KPoly(self.field, [])
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return KPoly(self.field, out)

    def scale(self, c: KElem) -> "KPoly":
        return KPoly(self.field, [a * c for a in self.coeffs])

    def __pow__(self, n: int) -> "KPoly":
        result = self.field.poly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return KPoly(self.field, []), self
        inv = other.lead().inverse()
        quo = [self.field.zero] * (dq + 1)
        for i in range(dq, -1, -1):
            c = rem[i + other.degree] * inv
            quo[i] = c
            if not c.is_zero():
                for j, b in enumerate(other.coeffs):
                    rem[i + j] = rem[i + j] - c * b
        return KPoly(self.field, quo), KPoly(self.field, rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "KPoly":
        return self.scale(self.lead().inverse())

    def gcd(self, other) -> "KPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def derivative(self) -> "KPoly":
        K = self.field
        return KPoly(K, [K.rat(i) * c for i, c in enumerate(self.coeffs)][1:])

    def evaluate(self, x: KElem) -> KElem:
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def subst_scaled_x(self, c_exp: int) -> "KPoly":
        """Return f(p^c * x)."""
        K = self.field
        scale = Fraction(K.p) ** c_exp
        out, power = [], Fraction(1)
        for c in self.coeffs:
            out.append(c * K.rat(power))
            power *= scale
        return KPoly(K, out)

    def is_separable(self) -> bool:
        if self.degree < 1:
            return False
        return self.gcd(self.derivative()).degree == 0

    def phi_expand(self, phi: "KPoly"):
        """Coefficients (a_0, a_1, ...) of the phi-adic expansion, deg a_i < deg phi."""
        if not phi.is_monic() or phi.degree < 1:
            raise ValueError("expansion base must be monic of positive degree")
        out = []
        g = self
        while not g.is_zero():
            g, r = g.divmod(phi)
            out.append(r)
        if not out:
            out = [KPoly(self.field, [])]
        return out

    def resultant(self, other) -> KElem:
        f, g = self, other
        K = self.field
        if f.is_zero() or g.is_zero():
            return K.zero
        sign = 1
        acc = K.one
        while g.degree > 0:
            r = f % g
            if r.is_zero():
                return K.zero
            if (f.degree * g.degree) % 2:
                sign = -sign
            acc = acc * g.lead() ** _ke_pow_int(f.degree - r.degree)
            f, g = g, r
        acc = acc * g.lead() ** _ke_pow_int(f.degree)
        return acc if sign > 0 else -acc

    def __repr__(self):
        if self.is_zero():
            return "KPoly(0)"
        return "KPoly[" + ", ".join(repr(c) for c in self.coeffs) + "]"


def _ke_pow_int(n: int) -> int:
    return max(n, 0)


def discriminant_val(f: KPoly):
    """Valuation of disc(f) = res(f, f') / lc(f), used only as a work bound."""
    r = f.resultant(f.derivative())
    if r.is_zero():
        raise NotSeparable("polynomial has a repeated root")
    v = r.val() - f.lead().val()
    return v


def extend_unramified(K: BaseField, t: int):
    """Extend the base field so its residue degree is multiplied by t.

    Returns ``(K2, embed)`` where K2 is a BaseField of unramified degree
    m * t and embed maps KElem of K to KElem of K2 exactly (over Q).  The
    construction finds a global compositum Q(theta, eta) with eta a root of
    a lift of an irreducible residue polynomial, then a primitive element
    whose minimal polynomial stays irreducible mod p.
    """
    if t <= 1:
        return K, lambda a: a
    p, m = K.p, K.m
    M = m * t
    k = K.residue_field

    # degree-t irreducible over the residue field, lifted to Z[theta][y]
    hbar = _find_irreducible_over(k, t)
    h_coeffs = []
    for c in hbar.coeffs:
        h_coeffs.append(K.elem(*[int(x) for x in c.coords]) if m > 1 else K.rat(int(c.coords[0])))

    # E = K[eta]/(h): vectors of t KElems
    def e_mul(u, v):
        out = [K.zero] * (2 * t - 1)
        for i, ui in enumerate(u):
            if not ui.is_zero():
                for j, vj in enumerate(v):
                    out[i + j] = out[i + j] + ui * vj
        for i in range(len(out) - 1, t - 1, -1):
            c = out[i]
            if not c.is_zero():
                out[i] = K.zero
                for j in range(t):
                    out[i - t + j] = out[i - t + j] - c * h_coeffs[j]
        return out[:t]

    def flat(u):
        coords = []
        for c in u:
            coords.extend(c.coords)
        return coords

    eta = [K.zero, K.one] + [K.zero] * (t - 2)
    theta = [K.theta] + [K.zero] * (t - 1)

    for mult in range(1, p * M + 2):
        gen = [a + K.rat(mult) * b for a, b in zip(eta, theta)] if m > 1 else eta
        powers = [[K.one] + [K.zero] * (t - 1)]
        for _ in range(M):
            powers.append(e_mul(powers[-1], gen))
        rows = [flat(v) for v in powers]
        cols = rows[:M]  # column j of the system is the vector of gen^j
        sol = _gauss_solve_q(cols, [-x for x in rows[M]])
        if sol is None:
            if m == 1:
                raise AssertionError("degenerate extension of the rationals")
            continue
        if any(c.denominator != 1 for c in sol):
            continue
        minpoly = tuple(int(c) for c in sol) + (1,)
        red = FFPoly.from_ints(prime_field(p), minpoly)
        if not is_irreducible(red):
            continue
        K2 = BaseField(p, M, minpoly)
        theta_img_coords = _gauss_solve_q(cols, flat(theta))
        theta_img = K2.elem(*theta_img_coords)

        def embed(a: KElem, _img=theta_img, _K2=K2):
            acc = _K2.zero
            for c in reversed(a.coords):
                acc = acc * _img + _K2.rat(c)
            return acc

        # the image of theta must still satisfy the old defining polynomial
        check = K2.zero
        for c in reversed(K.gen_minpoly):
            check = check * theta_img + K2.rat(c)
        if not check.is_zero():
            raise AssertionError("embedding failed minimal polynomial check")
        return K2, embed
    raise AssertionError("no primitive element found for the compositum")


def _find_irreducible_over(k: FField, t: int) -> FFPoly:
    """Smallest (in a fixed counting order) monic irreducible of degree t over k."""
    # try polynomials with prime-subfield coefficients first; they exist and
    # stay irreducible over k exactly when gcd(t, [k:F_p]) = 1
    q = k.order
    p = k.p
    count = 0
    code = 0
    while True:
        coeffs, c = [], code
        for _ in range(t):
            coeffs.append(c % q)
            c //= q
        cs = []
        for v in coeffs:
            vec = []
            for _ in range(k.degree):
                vec.append(v % p)
                v //= p
            cs.append(k.elem(tuple(vec)))
        cand = FFPoly(k, cs + [k.one])
        if is_irreducible(cand):
            return cand
        code += 1
        count += 1
        if count > q ** t:
            raise AssertionError("no irreducible polynomial found")


def _gauss_solve_q(cols, rhs):
    """Solve over Q: sum_j x_j * cols[j] = rhs. cols: list of columns. None if unsolvable."""
    ncols = len(cols)
    nrows = len(rhs)
    aug = [[Fraction(cols[j][i]) for j in range(ncols)] + [Fraction(rhs[i])]
           for i in range(nrows)]
    piv_cols = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if aug[i][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][ncols]
    return x
