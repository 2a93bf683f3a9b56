import math

import numpy as np
import pytest
from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.named_groups import SymmetricGroup

from tsystems.action import (
    BSGS, InducedAction, certify_alt_or_sym, cycle_type, generator_moves, induced_generators, is_odd,
    k_transitivity, orbit_partition,
)
from tsystems.tuples import class_table
from tsystems.words import MoveSequence, NielsenMove

from oracles import brute_generating_pairs, sympy_perms


def cyc(N, *cycles):
    p = np.arange(N)
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            p[a] = b
    return p


def bare(perms):
    perms = np.array(perms)
    return InducedAction(perms.shape[1], [], perms)


def test_rank2_orbits_against_union_find(A5):
    """Nielsen moves plus S5 conjugation on V_2(A5), with no class table."""
    pairs = brute_generating_pairs(A5)
    index = {p: i for i, p in enumerate(pairs)}
    parent = list(range(len(pairs)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    perms = sympy_perms(A5)
    pidx = {p: i for i, p in enumerate(perms)}
    conj = [SymmetricGroup(5).generators[0], SymmetricGroup(5).generators[1]]
    for i, (a, b) in enumerate(pairs):
        nbrs = [mv.apply((a, b), A5) for mv in generator_moves(2)]
        nbrs += [(pidx[s * perms[a] * ~s], pidx[s * perms[b] * ~s]) for s in conj]
        for t in nbrs:
            parent[find(i)] = find(index[t])
    sizes = sorted(np.bincount([find(i) for i in range(len(pairs))]).tolist())
    sizes = [s // 120 for s in sizes if s]
    act = induced_generators(class_table(A5, 2))
    assert sorted(len(o) for o in orbit_partition(act)) == sizes == [9, 10]


def test_permutation_of_sequence(A5):
    act = induced_generators(class_table(A5, 2))
    m1, m2 = NielsenMove("R", 1, 2, 1, 2), NielsenMove("I", 2, rank=2)
    seq = MoveSequence((m1, m2), 2)
    composed = act.perm(m2)[act.perm(m1)]
    assert np.array_equal(act.permutation_of(seq), composed)


def test_k_transitivity_natural_actions():
    s5 = bare([cyc(5, (0, 1)), cyc(5, (0, 1, 2, 3, 4))])
    assert k_transitivity(s5, 2).transitive
    assert k_transitivity(s5, 5).transitive
    c5 = bare([cyc(5, (0, 1, 2, 3, 4))])
    r = k_transitivity(c5, 2)
    assert not r.transitive and r.orbit_count == 4 and r.states == 20
    a5 = bare([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3)), cyc(5, (2, 3, 4))])
    assert k_transitivity(a5, 3).transitive
    assert not k_transitivity(a5, 5).transitive


def test_cycle_type_and_parity():
    p = cyc(7, (0, 1, 2), (3, 4))
    assert sorted(cycle_type(p)) == [1, 1, 2, 3]
    assert is_odd(p)
    assert not is_odd(cyc(7, (0, 1, 2)))


@pytest.mark.parametrize("seed", range(6))
def test_bsgs_order_against_sympy(seed):
    rng = np.random.default_rng(seed)
    N = 9
    gens = [rng.permutation(N) for _ in range(2)]
    if seed % 2:
        gens = [cyc(N, (0, 1, 2)), cyc(N, (3, 4, 5, 6)), cyc(N, (6, 7, 8))]
    want = PermutationGroup([Permutation(g.tolist()) for g in gens]).order()
    assert BSGS(gens, N).order == want


def test_certify_small_degrees():
    assert certify_alt_or_sym(bare([cyc(5, (0, 1)), cyc(5, (0, 1, 2, 3, 4))])).verdict == "Sym"
    assert certify_alt_or_sym(bare([cyc(5, (0, 1, 2)), cyc(5, (2, 3, 4))])).verdict == "Alt"
    assert certify_alt_or_sym(bare([cyc(5, (0, 1, 2, 3, 4))])).verdict == "Other"
    assert certify_alt_or_sym(bare([cyc(6, (0, 1, 2)), cyc(6, (3, 4, 5))])).verdict == "Other"
    res = certify_alt_or_sym(bare([cyc(5, (0, 1)), cyc(5, (0, 1, 2, 3, 4))]))
    assert res.order == math.factorial(5)


def test_certify_large_degree_by_jordan():
    N = 131
    sym = certify_alt_or_sym(bare([cyc(N, (0, 1)), cyc(N, tuple(range(N)))]))
    assert (sym.verdict, sym.method) == ("Sym", "jordan")
    assert sym.jordan_prime is not None and sym.jordan_prime <= N - 3
    alt = certify_alt_or_sym(bare([cyc(N, (0, 1, 2)), cyc(N, tuple(range(N)))]))
    assert alt.verdict == "Alt"
    # a transitive but imprimitive group: not 2-transitive
    half = N - 1
    blocks = bare([cyc(half, tuple(range(0, half, 2)), tuple(range(1, half, 2))), cyc(half, *[(i, i + 1) for i in range(0, half, 2)])])
    assert certify_alt_or_sym(blocks, bsgs_degree_limit=10).verdict == "Other"
