"""Independent reference computations used by the tests.

Nothing here imports the library's search code: groups are rebuilt with
sympy and closures are computed by naive Python BFS.
"""

from itertools import product

from sympy.combinatorics import Permutation, PermutationGroup


def sympy_perms(G):
    """sympy Permutations indexed by element id (permutation backend only)."""
    return [Permutation(list(G.rep(i))) for i in range(G.order)]


def naive_closure(mul, gens, identity):
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def sympy_generates(perms, tup, order):
    return PermutationGroup([perms[i] for i in tup]).order() == order


def a5_hall_count(n):
    """Generating n-tuples of A5 via the Moebius function of its subgroup lattice."""
    return 60**n - 5 * 12**n - 6 * 10**n - 10 * 6**n + 20 * 3**n + 60 * 2**n - 60


def brute_generating_pairs(G):
    perms = sympy_perms(G)
    return [(a, b) for a, b in product(range(G.order), repeat=2)
            if sympy_generates(perms, (a, b), G.order)]


def naive_subgroup_join(G):
    """All subgroups as frozensets, plus the table ``J[s, g] = <S_s, g>``."""
    import numpy as np

    subs = [frozenset([0])]
    index = {subs[0]: 0}
    joins = {}
    i = 0
    while i < len(subs):
        S = subs[i]
        for g in range(G.order):
            if g in S:
                T = S
            else:
                T = frozenset(naive_closure(G.product, list(S) + [g], 0))
            if T not in index:
                index[T] = len(subs)
                subs.append(T)
            joins[i, g] = index[T]
        i += 1
    J = np.zeros((len(subs), G.order), dtype=np.int64)
    for (s, g), t in joins.items():
        J[s, g] = t
    sizes = np.array([len(S) for S in subs])
    return J, sizes
