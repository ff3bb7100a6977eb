import random
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_matroids
from oracles import closure, orbit_min, relabel, stabilizer_order
from r3matroids.core import braid_a3, fano, make_matroid, multiplicity_vector
from r3matroids.permgroup import (MalformedPermutation, Permutation, apply, blocklist_stabilizer,
                                  canonical_form, group_from_generators, is_minimal_in_orbit,
                                  minimal_image, symmetric_group)


def random_blocks(rnd, n, linear=False):
    """Random block list; ``linear`` keeps pairwise intersections at most one atom."""
    out = []
    for _ in range(rnd.randint(0, 6)):
        b = tuple(sorted(rnd.sample(range(1, n + 1), rnd.randint(2, n - 1))))
        if linear and any(len(set(b) & set(c)) > 1 for c in out):
            continue
        if b not in out:
            out.append(b)
    return tuple(sorted(out, key=lambda b: (-len(b), b)))


def random_group(rnd, n):
    gens = []
    for _ in range(rnd.randint(0, 2)):
        img = list(range(1, n + 1))
        rnd.shuffle(img)
        gens.append(tuple(img))
    return gens


class TestGroups:
    def test_sym4(self):
        G = group_from_generators(4, [Permutation.from_cycles(4, (1, 2)),
                                      Permutation.from_cycles(4, (1, 2, 3, 4))])
        assert G.order() == 24 and G.is_symmetric()

    def test_trivial(self):
        assert group_from_generators(5, []).order() == 1

    def test_order_against_closure(self):
        g1 = Permutation.from_cycles(6, (1, 2, 3), (4, 5, 6))
        g2 = Permutation.from_cycles(6, (1, 4))
        G = group_from_generators(6, [g1, g2])
        raw = [tuple(x - 1 for x in g.images) for g in (g1, g2)]
        assert G.order() == len(closure(6, raw))

    def test_malformed(self):
        with pytest.raises(MalformedPermutation):
            Permutation([1, 1, 2])
        with pytest.raises(MalformedPermutation):
            group_from_generators(3, [(1, 2)])

    def test_random_orders_and_membership(self):
        rnd = random.Random(5)
        for _ in range(60):
            n = rnd.randint(2, 7)
            gens = random_group(rnd, n)
            G = group_from_generators(n, gens)
            elems = closure(n, [tuple(x - 1 for x in g) for g in gens])
            assert G.order() == len(elems)
            assert {tuple(x - 1 for x in g.images) for g in G.elements()} == elems
            for p in permutations(range(1, n + 1)):
                if rnd.random() < 0.05:
                    assert (p in G) == (tuple(x - 1 for x in p) in elems)


class TestApply:
    def test_identity(self):
        A = braid_a3().blocks
        assert apply(Permutation.identity(6), A) == A

    def test_setwise_fixed(self):
        assert apply(Permutation.from_cycles(3, (1, 2)), [[1, 3], [2, 3]]) == ((1, 3), (2, 3))

    def test_braid_image_valid(self):
        img = apply(Permutation.from_cycles(6, (1, 2, 3)), braid_a3().blocks)
        M = make_matroid(6, img)
        assert multiplicity_vector(M) == multiplicity_vector(braid_a3())

    @settings(max_examples=80)
    @given(st.permutations(range(1, 8)), st.permutations(range(1, 8)))
    def test_action_composes(self, g, h):
        g, h = Permutation(g), Permutation(h)
        A = fano().blocks
        assert apply(g, apply(h, A)) == apply(g * h, A)


class TestStabilizer:
    def test_empty(self):
        assert blocklist_stabilizer(5, []).order() == 120

    def test_single_block(self):
        from math import factorial
        assert blocklist_stabilizer(14, [range(1, 6)]).order() == factorial(5) * factorial(9)

    def test_braid(self):
        assert blocklist_stabilizer(6, braid_a3().blocks).order() == 24

    def test_fano(self):
        assert blocklist_stabilizer(7, fano().blocks).order() == 168

    def test_against_brute_force(self):
        rnd = random.Random(11)
        for _ in range(80):
            n = rnd.randint(3, 6)
            A = random_blocks(rnd, n)
            G = blocklist_stabilizer(n, A)
            assert G.order() == stabilizer_order(n, A)
            for g in G.generators:
                assert apply(g, A) == A

    def test_matroid_automorphisms(self):
        for M in all_matroids(6):
            assert blocklist_stabilizer(6, M.blocks).order() == stabilizer_order(6, M.blocks)


class TestMinimalImage:
    def test_trivial_group(self):
        A = ((2, 3), (1, 3))
        assert minimal_image(group_from_generators(3), A) == ((1, 3), (2, 3))
        assert is_minimal_in_orbit(group_from_generators(3), [[2, 3]])

    def test_small_orbit(self):
        assert not is_minimal_in_orbit(symmetric_group(3), [[2, 3]])
        assert minimal_image(symmetric_group(3), [[2, 3]]) == ((1, 2),)

    def test_braid_relabelings(self):
        rnd = random.Random(2)
        target = canonical_form(6, braid_a3().blocks)
        assert target == orbit_min(6, braid_a3().blocks)
        for _ in range(20):
            p = list(range(1, 7))
            rnd.shuffle(p)
            assert canonical_form(6, relabel(p, braid_a3().blocks)) == target

    def test_fano_relabelings(self):
        rnd = random.Random(3)
        forms = set()
        for _ in range(50):
            p = list(range(1, 8))
            rnd.shuffle(p)
            forms.add(minimal_image(symmetric_group(7), relabel(p, fano().blocks)))
        assert len(forms) == 1
        assert forms.pop() == orbit_min(7, fano().blocks)

    def test_sym_against_brute_force(self):
        rnd = random.Random(17)
        for n in (4, 5, 6):
            perms = list(permutations(range(1, n + 1)))
            for _ in range(60):
                A = random_blocks(rnd, n)
                m = minimal_image(symmetric_group(n), A)
                assert m == orbit_min(n, A, perms)
                assert minimal_image(symmetric_group(n), m) == m
                assert is_minimal_in_orbit(symmetric_group(n), A) == (m == A)

    def test_subgroups_against_brute_force(self):
        rnd = random.Random(23)
        for _ in range(150):
            n = rnd.randint(3, 7)
            gens = random_group(rnd, n)
            G = group_from_generators(n, gens)
            elems = [tuple(x + 1 for x in g) for g in closure(n, [tuple(x - 1 for x in g) for g in gens])]
            A = random_blocks(rnd, n)
            m = minimal_image(G, A)
            assert m == orbit_min(n, A, elems)
            assert is_minimal_in_orbit(G, A) == (m == relabel(tuple(range(1, n + 1)), A))

    def test_isomorphism_iff_equal_forms(self):
        ms = all_matroids(6)
        forms = [canonical_form(6, M.blocks) for M in ms]
        assert len(set(forms)) == len(ms)
        for M, f in zip(ms, forms):
            assert f == M.blocks
        # every labeled relabeling class collapses
        for M in ms:
            p = list(range(6, 0, -1))
            assert canonical_form(6, relabel(p, M.blocks)) == M.blocks

    def test_pairwise_non_isomorphic_by_brute_force(self):
        ms = all_matroids(6)
        perms = list(permutations(range(1, 7)))
        for M, N in combinations(ms, 2):
            if multiplicity_vector(M) == multiplicity_vector(N):
                assert orbit_min(6, M.blocks, perms) != orbit_min(6, N.blocks, perms)
