r"""MacLane pseudo-valuations on K[x] as augmentation chains.

A valuation is stored as the chain [(phi_1, lambda_1), ..., (phi_n, lambda_n)]
of augmentation steps over the Gauss valuation: the empty chain is Gauss, and
step i sends phi_i to lambda_i.  Evaluation descends the chain through
phi-adic expansions:

    v(sum a_s phi_n^s) = min_s ( v_{n-1}(a_s) + s * lambda_n ).

Only the last lambda may be infinite; such a chain is the pseudo-valuation
supported on the centre's roots.  Chains are validated and their numeric
data (group indices e_{v_i}, the relative e_i, h_i = e_{v_i} lambda_i, and
the Bezout pair ell_i h_i + ell'_i e_i = 1 with 0 <= ell_i < e_i) are
computed eagerly at construction; chains have depth at most log2(deg f), so
there is nothing to defer.

Comparison uses the discoid order: v <= w exactly when w sends the centre of
a minimal chain of v to at least v's radius.  The meet walks the minimal
chain of one argument and caps the first step that overshoots, which is
verified against the pointwise-minimum characterization by the property
tests rather than trusted.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .field import BaseField, KElem, KPoly
from .rationals import OO, ext_min


class NotAKeyPolynomial(ValueError):
    pass


class RadiusNotAboveCentreValue(ValueError):
    pass


class BadChain(ValueError):
    pass


class AugStep:
    __slots__ = ("phi", "lam")

    def __init__(self, phi: KPoly, lam):
        self.phi = phi
        self.lam = lam

    def __eq__(self, other):
        return isinstance(other, AugStep) and other.phi == self.phi and other.lam == self.lam

    def __hash__(self):
        return hash((self.phi, self.lam))

    def __repr__(self):
        from .rationals import qstr
        return f"(deg{self.phi.degree} -> {qstr(self.lam)})"


class MacLaneVal:
    """An augmentation chain over the Gauss valuation, with cached invariants."""

    __slots__ = ("field", "steps", "e_levels", "e_rel", "h_rel", "ell", "ellp",
                 "centre_values", "_cache")

    def __init__(self, field: BaseField, steps=()):
        self.field = field
        self.steps = tuple(steps)
        self._cache = {}
        self._validate_and_cache()

    # -- construction -----------------------------------------------------

    def _validate_and_cache(self):
        prev_deg = None
        e_levels = [1]
        e_rel = [None]
        h_rel = [None]
        ell = [None]
        ellp = [None]
        centre_values = []  # v_{i-1}(phi_i) for each step i
        for idx, step in enumerate(self.steps):
            phi, lam = step.phi, step.lam
            if not phi.is_monic() or phi.degree < 1:
                raise BadChain("centres must be monic of positive degree")
            if any(c.val() is not OO and c.val() < 0 for c in phi.coeffs):
                raise BadChain("centres must have integral coefficients")
            if prev_deg is not None and phi.degree % prev_deg:
                raise BadChain("centre degrees must divide along the chain")
            prev_deg = phi.degree
            vphi = self._eval_level(idx, phi)
            centre_values.append(vphi)
            if lam is not OO and lam <= vphi:
                raise RadiusNotAboveCentreValue(
                    "augmentation radius must exceed the current centre value")
            if lam is OO and idx != len(self.steps) - 1:
                raise BadChain("only the final radius may be infinite")
            if idx > 0:
                prev_phi = self.steps[idx - 1].phi
                diff = phi - prev_phi
                # MacLane chain condition: phi not v-equivalent to the previous centre
                if diff.is_zero() or self._eval_level(idx, diff) > vphi:
                    raise BadChain("consecutive centres must not be v-equivalent")
            if lam is OO:
                e_levels.append(e_levels[-1])
                e_rel.append(None)
                h_rel.append(None)
                ell.append(None)
                ellp.append(None)
            else:
                den = Fraction(lam).denominator
                ev = _lcm(e_levels[-1], den)
                e_levels.append(ev)
                e_i = ev // e_levels[-2]
                h_i = int(ev * lam)
                l_i = pow(h_i, -1, e_i) % e_i if e_i > 1 else 0
                lp_i = (1 - l_i * h_i) // e_i
                e_rel.append(e_i)
                h_rel.append(h_i)
                ell.append(l_i)
                ellp.append(lp_i)
        self.e_levels = e_levels
        self.e_rel = e_rel
        self.h_rel = h_rel
        self.ell = ell
        self.ellp = ellp
        self.centre_values = centre_values

    @staticmethod
    def gauss(field: BaseField) -> "MacLaneVal":
        return MacLaneVal(field, ())

    def augment_unchecked(self, phi: KPoly, lam) -> "MacLaneVal":
        """Extend the chain without testing that phi is a key polynomial.

        Chain-shape conditions (monic, integral, radius above centre value,
        non-equivalence with the previous centre) are still enforced.
        """
        return MacLaneVal(self.field, self.steps + (AugStep(phi, lam),))

    # -- basic data --------------------------------------------------------

    @property
    def depth(self) -> int:
        return len(self.steps)

    @property
    def is_gauss(self) -> bool:
        return not self.steps

    @property
    def is_pseudo(self) -> bool:
        return bool(self.steps) and self.steps[-1].lam is OO

    @property
    def deg(self) -> int:
        return self.steps[-1].phi.degree if self.steps else 1

    @property
    def radius(self):
        # convention: the Gauss valuation has radius 0 and centre x
        return self.steps[-1].lam if self.steps else Fraction(0)

    @property
    def centre(self) -> KPoly:
        return self.steps[-1].phi if self.steps else self.field.x()

    @property
    def group_index(self) -> int:
        """e_v = [Gamma_v : Z]."""
        return self.e_levels[-1]

    @property
    def epsilon(self) -> int:
        """Group index one level down the chain (1 for Gauss)."""
        return self.e_levels[-2] if self.steps else 1

    @property
    def b_last(self) -> Optional[int]:
        """e_n = e_v/epsilon_v, the denominator contributed by the last step."""
        if not self.steps:
            return 1
        return self.e_rel[-1]

    @property
    def h_last(self) -> Optional[int]:
        return self.h_rel[-1] if self.steps else 0

    @property
    def ell_last(self) -> Optional[int]:
        return self.ell[-1] if self.steps else 0

    @property
    def ellp_last(self) -> Optional[int]:
        return self.ellp[-1] if self.steps else 1

    def truncation(self, depth: int) -> "MacLaneVal":
        if depth == self.depth:
            return self
        key = ("trunc", depth)
        if key not in self._cache:
            self._cache[key] = MacLaneVal(self.field, self.steps[:depth])
        return self._cache[key]

    # -- evaluation ---------------------------------------------------------

    def eval(self, g: KPoly):
        if g.is_zero():
            return OO
        return self._eval_level(self.depth, g)

    def _eval_level(self, level: int, g: KPoly):
        if g.is_zero():
            return OO
        if level == 0:
            return ext_min(c.val() for c in g.coeffs)
        phi, lam = self.steps[level - 1].phi, self.steps[level - 1].lam
        best = OO
        for s, a in enumerate(g.phi_expand(phi)):
            if a.is_zero():
                continue
            term = self._eval_level(level - 1, a) + lam * s
            if term is not OO and (best is OO or term < best):
                best = term
        return best

    def eval_elem(self, c: KElem):
        return c.val()

    def equiv(self, g: KPoly, h: KPoly) -> bool:
        """g =_v h, tested as v(g - h) > v(g)."""
        diff = g - h
        if diff.is_zero():
            return True
        return self.eval(diff) > self.eval(g)

    # -- order structure ----------------------------------------------------

    def leq(self, other: "MacLaneVal") -> bool:
        """Discoid order: self <= other iff other(centre) >= radius on a minimal chain."""
        if self.is_gauss:
            return True
        mv = self.minimal_chain()
        lam = mv.radius
        val = other.eval(mv.centre)
        return val is OO or (lam is not OO and val >= lam)

    def same_valuation(self, other: "MacLaneVal") -> bool:
        return self.leq(other) and other.leq(self)

    def minimal_chain(self) -> "MacLaneVal":
        """Equivalent chain with strictly increasing centre degrees."""
        if "minimal" in self._cache:
            return self._cache["minimal"]
        keep = []
        for step in self.steps:
            if keep and keep[-1].phi.degree == step.phi.degree:
                keep[-1] = step
            else:
                keep.append(step)
        out = self if len(keep) == len(self.steps) else MacLaneVal(self.field, keep)
        self._cache["minimal"] = out
        return out

    def meet(self, other: "MacLaneVal") -> "MacLaneVal":
        if self.leq(other):
            return self
        if other.leq(self):
            return other
        mv = self.minimal_chain()
        best_depth = 0
        for d in range(1, mv.depth + 1):
            if mv.truncation(d).leq(other):
                best_depth = d
            else:
                break
        prefix = mv.truncation(best_depth)
        step = mv.steps[best_depth]
        lam2 = other.eval(step.phi)
        if lam2 is not OO and lam2 > prefix.eval(step.phi):
            return prefix.augment_unchecked(step.phi, lam2)
        return prefix

    # -- chain numerics -----------------------------------------------------

    def chain_invariants(self) -> dict:
        """Numeric data of the chain plus the residue tower handle."""
        from .newton import residue_tower  # deferred: newton builds towers
        tower = residue_tower(self)
        return {
            "deg": self.deg,
            "radius": self.radius,
            "e_v": self.group_index,
            "epsilon": self.epsilon,
            "b_v": self.b_last,
            "h_v": self.h_last,
            "ell_v": self.ell_last,
            "ellp_v": self.ellp_last,
            "residue_degrees": tower.rel_degrees,
            "f_v": tower.top.degree // self.field.m,
            "tower": tower,
        }

    def pi_exponents(self, i: int):
        """Exponent vector of pi_i on (phi_1, ..., phi_i, p), via the recursion
        pi_i = phi_i^{ell_i} * pi_{i-1}^{ell'_i}."""
        vec = [0] * (self.depth + 1)
        vec[-1] = 1  # pi_0 = p
        for j in range(1, i + 1):
            new = [e * self.ellp[j] for e in vec]
            new[j - 1] += self.ell[j]
            vec = new
        return tuple(vec)

    def pi_exponents_closed(self, i: int):
        """Same vector by the closed form m'_j = ell_j ell'_{j+1} ... ell'_i."""
        vec = [0] * (self.depth + 1)
        prod = 1
        for j in range(i, 0, -1):
            vec[j - 1] = self.ell[j] * prod
            prod *= self.ellp[j]
        vec[-1] = prod
        return tuple(vec)

    # -- misc ----------------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, MacLaneVal) and other.field is self.field
                and other.steps == self.steps)

    def __hash__(self):
        return hash(self.steps)

    def __repr__(self):
        from .rationals import qstr
        if self.is_gauss:
            return "v0"
        inner = ", ".join(f"v(deg{s.phi.degree})={qstr(s.lam)}" for s in self.steps)
        return f"[v0, {inner}]"


def _lcm(a: int, b: int) -> int:
    from math import gcd
    return a // gcd(a, b) * b
