"""Cluster-tree discovery against worked examples and the degree-1 oracle."""

import random
from fractions import Fraction as F

import pytest

from clusterfibre.field import BaseField, NotSeparable
from clusterfibre.rationals import OO
from clusterfibre.clusters import (normalize_input, build_cluster_tree,
                                   cluster_chain, p0_flag, ResidueModeOverflow)
from clusterfibre.degree1 import rational_cluster_tree, oracle_signature, tree_signature


def _sextic_tree(p, mode="exact"):
    K = BaseField(p)
    f = K.poly([-p, 0, 1]) ** 3 - K.poly([p ** 5])
    return K, build_cluster_tree(f, K, mode=mode)


def _linear_product(K, roots):
    f = K.poly([1])
    for a in roots:
        f = f * K.poly([-a, 1])
    return f


def _assert_all_roots_positive(g):
    from clusterfibre.valuation import MacLaneVal
    from clusterfibre.newton import newton_polygon
    N = newton_polygon(MacLaneVal.gauss(g.field), g.field.x(), g)
    assert all(s < 0 for s in N.slopes())


class TestNormalize:
    def test_untouched(self):
        K = BaseField(5)
        f = K.poly([-5, 0, 1]) ** 3 - K.poly([5 ** 5])
        g, c = normalize_input(f)
        assert c == 0 and g == f

    def test_negative_valuation_roots(self):
        K = BaseField(5)
        f = K.poly([F(-1, 5), 0, 1])  # roots of valuation -1/2
        g, c = normalize_input(f)
        assert c == 1
        _assert_all_roots_positive(g)

    def test_zero_valuation_roots(self):
        K = BaseField(5)
        f = K.poly([0, -1, 1])  # x(x-1)
        g, c = normalize_input(f)
        assert c == 1
        _assert_all_roots_positive(g)

    def test_not_separable(self):
        K = BaseField(5)
        with pytest.raises(NotSeparable):
            normalize_input(K.poly([-5, 0, 1]) ** 2)


class TestSexticTree:
    @pytest.mark.parametrize("p", [3, 5, 7, 11])
    def test_two_proper_clusters(self, p):
        K, tree = _sextic_tree(p)
        assert len(tree.nodes) == 2
        root = tree.root
        assert (root.degree, root.radius, root.size) == (1, F(1, 2), 6)
        child = root.children[0]
        assert (child.degree, child.radius, child.size) == (2, F(5, 3), 6)
        assert len(child.leaves) == 1
        assert child.leaves[0].degree == 6
        assert root.leaves == []

    def test_chains(self):
        K, tree = _sextic_tree(5)
        root, child = tree.root, tree.root.children[0]
        cc = cluster_chain(child)
        assert cc.depth == 2
        assert [s.lam for s in cc.steps] == [F(1, 2), F(5, 3)]
        assert cc.steps[1].phi == K.poly([-5, 0, 1])
        assert cluster_chain(root).depth == 1

    def test_p0_flags(self):
        K, tree = _sextic_tree(5)
        root, child = tree.root, tree.root.children[0]
        assert p0_flag(root) == 2  # min orbit degree 6 != 1
        assert p0_flag(child) == 2  # min orbit degree 6 != 2

    def test_geometric_mode_same_shape(self):
        K, tree = _sextic_tree(5, mode="geometric")
        assert tree.field.m == 1  # residual factors already linear
        assert len(tree.nodes) == 2

    def test_tree_order_matches_valuation_order(self):
        K, tree = _sextic_tree(5)
        for node in tree.nodes:
            for child in node.children:
                assert cluster_chain(node).leq(cluster_chain(child))
                assert not cluster_chain(child).leq(cluster_chain(node))


class TestSmallShapes:
    def test_irreducible_quadratic(self):
        K = BaseField(5)
        f = K.poly([-5, 0, 1])
        tree = build_cluster_tree(f, K)
        assert len(tree.nodes) == 1
        node = tree.root
        assert (node.degree, node.radius, node.size) == (1, F(1, 2), 2)
        assert node.leaves[0].degree == 2
        assert p0_flag(node) == 2

    def test_two_rational_roots(self):
        K = BaseField(5)
        f = _linear_product(K, [5, 5 + 25])
        tree = build_cluster_tree(f, K)
        assert len(tree.nodes) == 1
        node = tree.root
        assert (node.degree, node.radius, node.size) == (1, F(2), 2)
        assert sorted(l.degree for l in node.leaves) == [1, 1]
        assert p0_flag(node) == 1
        # centre is the minimal polynomial of one of the two roots
        assert node.centre in (K.poly([-5, 1]), K.poly([-30, 1]))
        assert node.i0_v == 1

    def test_collapse_rule(self):
        # both roots congruent mod p^3: the radius-1 candidate is not a cluster
        K = BaseField(5)
        f = _linear_product(K, [5 + 25, 5 + 25 + 125])
        tree = build_cluster_tree(f, K)
        assert len(tree.nodes) == 1
        assert tree.root.radius == F(3)
        assert tree.root.size == 2

    def test_nested_degree_one(self):
        K = BaseField(5)
        f = _linear_product(K, [5, 5 + 25, -5, -5 + 25 * 2])
        tree = build_cluster_tree(f, K)
        root = tree.root
        assert (root.degree, root.radius, root.size) == (1, F(1), 4)
        assert not root.is_degree_minimal
        assert len(root.children) == 2
        assert {c.size for c in root.children} == {2}
        assert all(c.radius == F(2) for c in root.children)
        # non-degree-minimal root inherits a child's centre, and that child's
        # chain stays one step long (radius bump, not a longer chain)
        assert any(root.centre == c.centre for c in root.children)
        shared = next(c for c in root.children if c.centre == root.centre)
        other = next(c for c in root.children if c.centre != root.centre)
        assert cluster_chain(shared).depth == 1
        assert cluster_chain(other).depth == 2

    def test_mixed_cluster_with_quadratic_orbit(self):
        # roots 5, 5+125 and the orbit of sqrt(5): radius-1/2 top cluster
        K = BaseField(5)
        f = _linear_product(K, [5, 5 + 125]) * K.poly([-5, 0, 1])
        tree = build_cluster_tree(f, K)
        root = tree.root
        assert (root.degree, root.size) == (1, 4)
        assert root.radius == F(1, 2)
        assert len(root.children) == 1
        assert len(root.leaves) == 1 and root.leaves[0].degree == 2
        inner = root.children[0]
        assert (inner.degree, inner.radius, inner.size) == (1, F(3), 2)

    def test_single_leaf_no_proper(self):
        K = BaseField(5)
        f = K.poly([-5, 1])
        tree = build_cluster_tree(f, K)
        assert tree.root is None
        assert tree.orphan_leaf is not None and tree.orphan_leaf.degree == 1

    def test_deep_path_tree(self):
        # strictly nested degree-1 clusters of sizes 4 > 3 > 2
        K = BaseField(3)
        f = _linear_product(K, [3, 3 + 9, 3 + 9 + 27, 12345 * 3 + 3 ** 2 * 0 + 6])
        tree = build_cluster_tree(f, K)
        sizes = sorted(n.size for n in tree.nodes)
        assert sizes[-1] == 4


class TestWorkedCubic:
    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_cubic_tree(self, p):
        K = BaseField(p)
        phi = K.poly([-2 * p, 0, 0, 1])
        f = phi * phi - K.poly([0, 0, p]) * phi
        tree = build_cluster_tree(f, K)
        root = tree.root
        assert (root.degree, root.radius, root.size) == (1, F(1, 3), 6)
        assert len(root.children) == 1
        inner = root.children[0]
        assert (inner.degree, inner.size) == (3, 6)
        assert inner.radius == F(5, 3)


class TestDegreeOneOracle:
    @pytest.mark.parametrize("p", [3, 5])
    def test_randomized_against_oracle(self, p):
        rng = random.Random(1000 + p)
        K = BaseField(p)
        for _ in range(30):
            n = rng.randrange(2, 9)
            roots = set()
            while len(roots) < n:
                roots.add(p * rng.randrange(1, p ** 3))
            roots = sorted(roots)
            f = _linear_product(K, roots)
            tree = build_cluster_tree(f, K)
            oracle = rational_cluster_tree(roots, p)
            assert tree_signature(tree.root) == oracle_signature(oracle)

    def test_oracle_example(self):
        oracle = rational_cluster_tree([5, 30, 55], 5)
        # all pairwise valuations: v(25)=2, v(50)=2, v(25)=2 -> one cluster
        assert oracle.size == 3 and oracle.radius == 2


class TestGeometricMode:
    def test_extension_triggered(self):
        # (x^2+1)-orbit pair at radius 1: residual factor X^2+1 over F_3
        K = BaseField(3)
        f = K.poly([1, 0, 1]) ** 2 - K.poly([3 ** 5])
        exact = build_cluster_tree(f, K, mode="exact")
        geo = build_cluster_tree(f, K, mode="geometric")
        assert geo.field.m > 1
        assert len(geo.nodes) >= len(exact.nodes)

    def test_budget(self):
        K = BaseField(3)
        f = K.poly([1, 0, 1]) ** 2 - K.poly([3 ** 5])
        with pytest.raises(ResidueModeOverflow):
            build_cluster_tree(f, K, mode="geometric", extension_budget=1)
