"""Definition-style invariant records against the worked sextic and friends."""

from fractions import Fraction as F

import pytest

from clusterfibre.field import BaseField
from clusterfibre.clusters import build_cluster_tree
from clusterfibre.invariants import (all_records, nu, genus_double_cover,
                                     compute_record)
from clusterfibre.ff import FFPoly, prime_field


def _sextic(p, mode="exact"):
    K = BaseField(p)
    f = K.poly([-p, 0, 1]) ** 3 - K.poly([p ** 5])
    tree = build_cluster_tree(f, K, mode=mode)
    recs = all_records(tree)
    root = tree.root
    child = root.children[0]
    return tree, recs[root.id], recs[child.id]


class TestSexticTable:
    @pytest.mark.parametrize("p", [3, 5, 7, 11])
    def test_row_v1(self, p):
        tree, r1, r2 = _sextic(p)
        assert (r1.b, r1.e, r1.n, r1.m, r1.i_v, r1.p, r1.gamma, r1.delta,
                r1.p0, r1.gamma0, r1.genus) == (2, 2, 2, 2, 6, 2, 1, 1, 2, 2, 0)
        assert r1.nu == 3
        assert r1.lam == F(1, 2)
        assert r1.s == F(1, 2)
        assert r1.s0 == -1

    @pytest.mark.parametrize("p", [3, 5, 7, 11])
    def test_row_v2(self, p):
        tree, r1, r2 = _sextic(p)
        assert (r2.b, r2.e, r2.n, r2.m, r2.i_v, r2.p, r2.gamma, r2.delta,
                r2.p0, r2.gamma0, r2.genus) == (3, 6, 2, 6, 3, 1, 1, 1, 2, 1, 0)
        assert r2.nu == 5
        assert r2.s == F(5, 6)
        assert r2.s0 == F(-5, 6)

    def test_intro_normalization_reported(self):
        tree, r1, r2 = _sextic(5)
        assert r2.nu_intro == 10
        assert r2.s_intro == F(-5, 3)
        assert r2.s0_intro == F(-10, 3)
        assert r1.nu_intro == 3  # degree 1: both normalizations agree

    def test_s_identity(self):
        tree, r1, r2 = _sextic(7)
        for r in (r1, r2):
            assert r.s == F(r.i_v * r.lam + r.p * r.lam - r.nu, 2)

    def test_u_values(self):
        tree, r1, r2 = _sextic(5)
        assert r1.u == 2 and r2.u == 1
        assert not r1.ubereven and not r2.ubereven

    def test_residual_constants(self):
        tree, r1, r2 = _sextic(5)
        # v2: f|_v linear monic -> leading constant 1, gbar = y - 1
        assert r2.gbar_exp == 1
        assert r2.gbar_const == r2.k_v.one
        # v1: f|_v = (X-1)^3 -> leading 1; constant term -1
        assert r1.gbar_exp == 2
        assert r1.gbar_const == r1.k_v.one
        assert r1.gbar0_const == -r1.k_v.one
        assert r1.gbar0_exp == 1
        assert r2.gbar0_exp == 2

    def test_fbar_ftilde(self):
        tree, r1, r2 = _sextic(5)
        # v1: (X-1)^3 / (X-1)^3 = 1; ftilde = x * (X-1)
        assert r1.fbar.degree == 0
        assert r1.ftilde.degree == 2
        assert r1.ftilde[0].is_zero()
        # v2: linear, no children with distinct centre
        assert r2.fbar.degree == 1
        assert r2.ftilde.degree == 1


class TestNu:
    def test_nu_simple(self):
        K = BaseField(5)
        f = K.poly([-5, 0, 1])
        tree = build_cluster_tree(f, K)
        assert nu(tree, tree.root) == 1  # min(2*(1/2), 1)

    def test_nu_nonmonic_leading(self):
        K = BaseField(5)
        f = (K.poly([-5, 0, 1]) ** 3 - K.poly([5 ** 5])).scale(K.rat(F(5, 3)))
        tree = build_cluster_tree(f, K)
        recs = all_records(tree)
        assert recs[tree.root.id].nu == 4  # v_K(c_f) = 1 shifts nu by 1


class TestGenus:
    def test_squarefree_quintic(self):
        k = prime_field(5)
        ft = FFPoly.from_ints(k, [0, -1, 0, 0, 0, 1])  # X^5 - X, five roots
        assert genus_double_cover(ft, 2) == 2

    def test_line(self):
        k = prime_field(5)
        assert genus_double_cover(FFPoly.from_ints(k, [3, 1]), 2) == 0
        assert genus_double_cover(FFPoly.from_ints(k, [3, 1]), 1) == 0

    def test_square_constant(self):
        k = prime_field(5)
        sq = FFPoly.from_ints(k, [1, 2, 1])  # (X+1)^2
        assert genus_double_cover(sq, 2) == 0

    def test_genus_two_semistable(self):
        # six rational roots in two deep pockets: a genus-2-ish configuration
        K = BaseField(5)
        f = K.poly([1])
        for a in [5, 10, 15, 20, 35, 55]:
            f = f * K.poly([-a, 1])
        tree = build_cluster_tree(f, K)
        recs = all_records(tree)
        # every record passed its internal genus cross-check by construction
        assert all(r.genus >= 0 for r in recs.values())


class TestRegressions:
    def test_branch_count_with_residue_extension(self):
        # quartic whose only cluster has k_v = F_9: the branch-degree count of
        # u must be taken per component of the residue extension
        K = BaseField(3)
        f = K.poly([19, -6, 2, -3, 1])
        tree = build_cluster_tree(f, K)
        recs = all_records(tree)  # genus cross-check runs inside
        deep = recs[tree.nodes[-1].id]
        assert deep.f_v == 2
        assert deep.u == deep.ftilde.degree
        assert deep.genus == 0

    def test_matching_orbit_from_deeper_edge(self):
        # degree-minimal cluster whose matching orbit is certified by a
        # width-one edge rather than a residual factor of its own reduction
        K = BaseField(7)
        f = K.poly([-9947, -8, -311, 1])
        tree = build_cluster_tree(f, K)
        recs = all_records(tree)
        assert any(r.p0 == 1 for r in recs.values())

    def test_deep_collapse_chain(self):
        # two roots agreeing to order p^12: eleven in-place refinements
        K = BaseField(5)
        a = 5
        b = 5 + 5 ** 12
        f = K.poly([-a, 1]) * K.poly([-b, 1])
        tree = build_cluster_tree(f, K)
        assert len(tree.nodes) == 1
        assert tree.root.radius == 12
        assert all_records(tree)[tree.root.id].genus == 0


class TestUbereven:
    def test_constructed_ubereven(self):
        # two even children and no stray roots: u = 0 and the top splits
        K = BaseField(5)
        f = K.poly([1])
        for a in [5, 30, -5, -30]:
            f = f * K.poly([-a, 1])
        tree = build_cluster_tree(f, K)
        recs = all_records(tree)
        root_rec = recs[tree.root.id]
        assert root_rec.u == 0
        assert root_rec.n == 2
        assert root_rec.ubereven
        assert root_rec.genus == 0

    def test_open_p1_cluster(self):
        # x^3 - p: single cluster with e*nu odd -> n = 1
        K = BaseField(5)
        f = K.poly([-5, 0, 0, 1])
        tree = build_cluster_tree(f, K)
        r = all_records(tree)[tree.root.id]
        assert r.n == 1 and r.m == 2 * r.e
        assert r.genus == 0
        assert r.fbar.degree == 1
