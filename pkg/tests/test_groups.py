import itertools

import numpy as np
import pytest

from tsystems.errors import GroupSpecError, NotAGroupError
from tsystems.groups import closure, load_group, validate_table

from conftest import group
from oracles import naive_closure, sympy_perms


@pytest.mark.parametrize("spec,order", [
    ("A5", 60), ("S4", 24), ("S3", 6), ("Q8", 8), ("C5", 5), ("D4", 8),
    ("C2xC2", 4), ("C3xC3", 9), ("PSL2(7)", 168), ("PSL2(5)", 60), ("C1", 1),
])
def test_orders(spec, order):
    assert group(spec).order == order


@pytest.mark.parametrize("spec", ["A5", "S4", "Q8", "D4"])
def test_table_matches_sympy(spec):
    G = group(spec)
    perms = sympy_perms(G)
    index = {p: i for i, p in enumerate(perms)}
    for a, b in itertools.product(range(G.order), repeat=2):
        assert G.product(a, b) == index[perms[a] * perms[b]]


@pytest.mark.parametrize("spec,count", [
    ("A5", 120), ("S4", 24), ("Q8", 24), ("C3xC3", 48), ("C2xC2", 6), ("PSL2(7)", 336), ("C5", 4),
])
def test_automorphism_counts(spec, count):
    assert group(spec).aut_count == count


def brute_aut_count(G):
    """Count maps of a generating pair that extend to a homomorphism."""
    gens = G.generating_tuple()
    ident = 0
    # BFS words for every element over gens
    word = {ident: ()}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for i, g in enumerate(gens):
                y = G.product(x, g)
                if y not in word:
                    word[y] = word[x] + (i,)
                    nxt.append(y)
        frontier = nxt
    count = 0
    for imgs in itertools.product(range(G.order), repeat=len(gens)):
        phi = {}
        for x, w in word.items():
            acc = 0
            for i in w:
                acc = G.product(acc, imgs[i])
            phi[x] = acc
        if len(set(phi.values())) != G.order:
            continue
        if all(phi[G.product(a, b)] == G.product(phi[a], phi[b]) for a in range(G.order) for b in range(G.order)):
            count += 1
    return count


@pytest.mark.parametrize("spec", ["S3", "Q8", "C2xC2", "D4", "C3xC3"])
def test_automorphism_count_brute(spec):
    G = group(spec)
    assert G.aut_count == brute_aut_count(G)


def test_automorphisms_are_homomorphisms(A5):
    t = A5.table
    for img in A5.aut_array[::7]:
        assert np.array_equal(img[t], t[img[:, None], img[None, :]])


def test_aut_compose_order(S4):
    auts = S4.aut_array
    s, t = 3, 5
    c = S4.aut_compose(s, t)
    # s first, then t
    assert np.array_equal(auts[c], auts[t][auts[s]])
    assert S4.aut_compose(s, S4.aut_inverse(s)) == 0


def test_closure_examples(A5):
    five = A5.id_from_cycles("(0 1 2 3 4)")
    assert len(closure(A5, [five])) == 5
    three = A5.id_from_cycles("(0 1 2)")
    assert len(closure(A5, [five, three])) == 60
    assert closure(A5, [five, three]) == frozenset(naive_closure(A5.product, [five, three], 0))


def test_pair_generates_matches_closure(S4):
    pg = S4.pair_generates
    for a, b in itertools.product(range(S4.order), repeat=2):
        assert pg[a, b] == (len(naive_closure(S4.product, [a, b], 0)) == 24)


def test_rank_and_simplicity():
    assert group("A5").rank == 2
    assert group("C2xC2").rank == 2
    assert group("C5").rank == 1
    assert group("A5").is_simple_nonabelian()
    assert group("PSL2(7)").is_simple_nonabelian()
    assert not group("S4").is_simple_nonabelian()
    assert not group("C5").is_simple_nonabelian()


def test_psl2_5_is_a5():
    P = group("PSL2(5)")
    A = group("A5")
    assert sorted(np.bincount(P.element_orders)) == sorted(np.bincount(A.element_orders))
    assert P.aut_count == 120


@pytest.mark.parametrize("bad", ["XYZ", "A", "S99", "PSL2(8)", "A5x", "table:/nonexistent"])
def test_bad_specs(bad):
    with pytest.raises(GroupSpecError):
        load_group(bad)


def test_table_file_roundtrip(tmp_path, S3):
    path = tmp_path / "s3.txt"
    rows = [" ".join(map(str, r)) for r in S3.table.tolist()]
    path.write_text("6\n" + "\n".join(rows) + "\n")
    G = load_group(f"table:{path}")
    assert G.order == 6 and G.aut_count == 6 and not G.is_abelian()


def test_validate_table_rejects():
    bad = np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]])
    with pytest.raises(NotAGroupError):
        validate_table(bad)
    # Latin square that is not associative
    t = np.array([[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]])
    with pytest.raises(NotAGroupError):
        validate_table(t)
