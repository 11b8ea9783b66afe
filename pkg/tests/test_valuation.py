"""Chain evaluation, comparison, meet, and chain numerics."""

import random
from fractions import Fraction as F

import pytest

from clusterfibre.field import BaseField
from clusterfibre.rationals import OO
from clusterfibre.valuation import (MacLaneVal, AugStep, BadChain,
                                    RadiusNotAboveCentreValue)


def _v13(p):
    """The two-step chain of the running sextic example: v(x)=1/2, v(x^2-p)=5/3."""
    K = BaseField(p)
    v0 = MacLaneVal.gauss(K)
    v1 = v0.augment_unchecked(K.x(), F(1, 2))
    v2 = v1.augment_unchecked(K.poly([-p, 0, 1]), F(5, 3))
    return K, v0, v1, v2


def _sextic(K, p):
    return K.poly([-p, 0, 1]) ** 3 - K.poly([p ** 5])


class TestGaussAndEval:
    def test_gauss_values(self):
        K = BaseField(5)
        v0 = MacLaneVal.gauss(K)
        assert v0.eval(K.poly([5, 5, 1])) == 0
        assert v0.eval(K.poly([-5, 0, 0, 5 ** 3])) == 1
        assert v0.eval(K.poly([])) is OO

    def test_eval_sextic(self):
        K, v0, v1, v2 = _v13(5)
        f = _sextic(K, 5)
        assert v1.eval(f) == 3
        assert v2.eval(f) == 5

    def test_eval_cubic_worked_example(self):
        # v = [v0, v(x)=1/3, v(x^3-2p)=5/3] gives value 10/3 on the running cubic
        p = 7
        K = BaseField(p)
        v0 = MacLaneVal.gauss(K)
        v1 = v0.augment_unchecked(K.x(), F(1, 3))
        phi = K.poly([-2 * p, 0, 0, 1])
        v2 = v1.augment_unchecked(phi, F(5, 3))
        f = phi * phi - K.poly([0, 0, p]) * phi
        assert v2.eval(f) == F(10, 3)

    def test_eval_constant(self):
        K, _, v1, v2 = _v13(3)
        c = K.poly([F(9, 2)])
        assert v1.eval(c) == 2
        assert v2.eval(c) == 2

    def test_eval_multiplicative_random(self):
        K, _, v1, v2 = _v13(3)
        rng = random.Random(5)
        for v in (v1, v2):
            for _ in range(60):
                g = K.poly([rng.randrange(-9, 9) for _ in range(rng.randrange(1, 6))])
                h = K.poly([rng.randrange(-9, 9) for _ in range(rng.randrange(1, 6))])
                if g.is_zero() or h.is_zero():
                    continue
                assert v.eval(g * h) == v.eval(g) + v.eval(h)

    def test_pseudo_valuation_eval(self):
        K, v0, v1, _ = _v13(5)
        phi = K.poly([-5, 0, 1])
        vinf = v1.augment_unchecked(phi, OO)
        assert vinf.is_pseudo
        assert vinf.eval(phi * K.poly([1, 1])) is OO
        assert vinf.eval(K.poly([1, 1])) == 0


class TestChainValidation:
    def test_radius_must_increase(self):
        K, _, v1, _ = _v13(5)
        with pytest.raises(RadiusNotAboveCentreValue):
            v1.augment_unchecked(K.poly([-5, 0, 1]), F(1, 1))

    def test_maclane_condition(self):
        K, v0, v1, _ = _v13(5)
        # same centre again is v-equivalent to itself: not a MacLane chain
        with pytest.raises(BadChain):
            v1.augment_unchecked(K.x(), F(2, 3))

    def test_degree_divisibility(self):
        K = BaseField(5)
        v0 = MacLaneVal.gauss(K)
        v = v0.augment_unchecked(K.poly([-5, 0, 1]), F(3, 2))
        with pytest.raises(BadChain):
            v.augment_unchecked(K.poly([5, 0, 0, 1]), F(7, 2))

    def test_nonintegral_centre_rejected(self):
        K = BaseField(5)
        v0 = MacLaneVal.gauss(K)
        with pytest.raises(BadChain):
            v0.augment_unchecked(K.poly([F(1, 5), 1]), F(1, 2))


class TestOrder:
    def test_gauss_least(self):
        K, v0, v1, v2 = _v13(5)
        assert v0.leq(v1) and v0.leq(v2) and v0.leq(v0)

    def test_one_three_containment(self):
        K, v0, v1, v2 = _v13(5)
        assert v1.leq(v2)
        assert not v2.leq(v1)

    def test_leq_matches_pointwise(self):
        K, v0, v1, v2 = _v13(3)
        rng = random.Random(11)
        for _ in range(100):
            g = K.poly([rng.randrange(-20, 20) for _ in range(rng.randrange(1, 7))])
            if g.is_zero():
                continue
            assert v1.eval(g) <= v2.eval(g)

    def test_incomparable(self):
        K = BaseField(5)
        v0 = MacLaneVal.gauss(K)
        a = v0.augment_unchecked(K.poly([-5, 1]), F(2))   # around 5
        b = v0.augment_unchecked(K.poly([5, 1]), F(2))    # around -5
        assert not a.leq(b) and not b.leq(a)


class TestMeet:
    def test_meet_idempotent_and_gauss(self):
        K, v0, v1, v2 = _v13(5)
        assert v2.meet(v2) == v2
        assert v0.meet(v2) == v0
        assert v2.meet(v0) == v0

    def test_meet_comparable(self):
        K, v0, v1, v2 = _v13(5)
        assert v1.meet(v2).same_valuation(v1)

    def test_meet_incomparable_depth1(self):
        K = BaseField(5)
        v0 = MacLaneVal.gauss(K)
        a = v0.augment_unchecked(K.poly([-5, 1]), F(3))
        b = v0.augment_unchecked(K.poly([-10, 1]), F(2))
        m = a.meet(b)
        # 5 and 10 agree to valuation 1 only
        assert m.deg == 1 and m.radius == 1
        assert m.leq(a) and m.leq(b)

    def test_meet_min_property(self):
        # (v ^ w)(g) = min(v(g), w(g)) spot-checked on many polynomials
        K = BaseField(3)
        v0 = MacLaneVal.gauss(K)
        a = v0.augment_unchecked(K.x(), F(1, 2)).augment_unchecked(
            K.poly([-3, 0, 1]), F(5, 3))
        b = v0.augment_unchecked(K.poly([-3, 1]), F(2))
        m = a.meet(b)
        assert m.leq(a) and m.leq(b)
        rng = random.Random(23)
        for _ in range(150):
            g = K.poly([rng.randrange(-27, 27) for _ in range(rng.randrange(1, 6))])
            if g.is_zero():
                continue
            assert m.eval(g) <= min(a.eval(g), b.eval(g))
        # the minimum identity on the centres themselves
        for phi in (a.centre, b.centre, K.x()):
            assert m.eval(phi) == min(a.eval(phi), b.eval(phi))

    def test_meet_with_pseudo(self):
        # the leaf pseudo-valuation replaces the last radius of the chain
        K, v0, v1, v2 = _v13(5)
        leaf = v1.augment_unchecked(v2.centre, OO)
        assert v1.meet(leaf).same_valuation(v1)
        assert leaf.meet(v2).same_valuation(v2)


class TestMinimalChain:
    def test_identity_on_minimal(self):
        K, v0, v1, v2 = _v13(5)
        assert v2.minimal_chain() == v2

    def test_collapse_same_degree(self):
        K = BaseField(5)
        v0 = MacLaneVal.gauss(K)
        v1 = v0.augment_unchecked(K.x(), F(1))
        v2 = v1.augment_unchecked(K.poly([-5, 1]), F(2))
        mv = v2.minimal_chain()
        assert mv.depth == 1
        assert mv.centre == K.poly([-5, 1])
        rng = random.Random(3)
        for _ in range(1000):
            g = K.poly([rng.randrange(-50, 50) for _ in range(rng.randrange(1, 7))])
            if g.is_zero():
                continue
            assert mv.eval(g) == v2.eval(g)
        assert mv.deg == v2.deg and mv.radius == v2.radius

    def test_gauss_minimal(self):
        K = BaseField(5)
        v0 = MacLaneVal.gauss(K)
        assert v0.minimal_chain() == v0


class TestChainNumerics:
    def test_sextic_chain_data(self):
        K, v0, v1, v2 = _v13(5)
        inv1 = v1.chain_invariants()
        assert (inv1["epsilon"], inv1["b_v"], inv1["e_v"], inv1["deg"]) == (1, 2, 2, 1)
        assert inv1["radius"] == F(1, 2)
        inv2 = v2.chain_invariants()
        assert (inv2["epsilon"], inv2["b_v"], inv2["e_v"], inv2["deg"]) == (2, 3, 6, 2)
        assert inv2["radius"] == F(5, 3)
        assert v0.chain_invariants()["e_v"] == 1
        assert v0.chain_invariants()["deg"] == 1
        assert v0.chain_invariants()["radius"] == 0

    def test_bezout_identities(self):
        K, v0, v1, v2 = _v13(5)
        for v in (v1, v2):
            for i in range(1, v.depth + 1):
                assert v.ell[i] * v.h_rel[i] + v.ellp[i] * v.e_rel[i] == 1
                assert 0 <= v.ell[i] < v.e_rel[i]

    def test_epsilon_chain_independence(self):
        # the same valuation through a longer MacLane chain keeps epsilon
        K = BaseField(5)
        v0 = MacLaneVal.gauss(K)
        long = v0.augment_unchecked(K.x(), F(1)).augment_unchecked(K.poly([-5, 1]), F(2))
        short = v0.augment_unchecked(K.poly([-5, 1]), F(2))
        assert long.same_valuation(short)
        assert long.epsilon == short.epsilon == 1
        assert long.group_index == short.group_index == 1

    def test_pi_exponent_closed_form(self):
        K, v0, v1, v2 = _v13(5)
        for i in range(v2.depth + 1):
            assert v2.pi_exponents(i) == v2.pi_exponents_closed(i)

    def test_worked_cubic_pi(self):
        # pi_1 = x for the chain v(x)=1/3, v(x^3-2p)=5/3
        p = 7
        K = BaseField(p)
        v = MacLaneVal.gauss(K).augment_unchecked(K.x(), F(1, 3))
        v = v.augment_unchecked(K.poly([-2 * p, 0, 0, 1]), F(5, 3))
        assert v.pi_exponents(1) == (1, 0, 0)  # phi_1^1 * phi_2^0 * p^0


class TestAugmentMonotone:
    def test_augment_increases(self):
        K, v0, v1, v2 = _v13(3)
        rng = random.Random(9)
        for _ in range(80):
            g = K.poly([rng.randrange(-9, 9) for _ in range(rng.randrange(1, 7))])
            if g.is_zero():
                continue
            assert v2.eval(g) >= v1.eval(g)
            if g.degree < 2:
                assert v2.eval(g) == v1.eval(g)
