"""Named small permutation groups."""

from __future__ import annotations

from itertools import product

from .perm_core import Permutation, PermutationGroup


def symmetric_group(n: int) -> PermutationGroup:
    if n == 1:
        return PermutationGroup(1)
    gens = [Permutation.from_cycles(n, (0, 1))]
    if n > 2:
        gens.append(Permutation.from_cycles(n, tuple(range(n))))
    return PermutationGroup(n, gens)


def alternating_group(n: int) -> PermutationGroup:
    if n < 3:
        return PermutationGroup(n)
    return PermutationGroup(n, [Permutation.from_cycles(n, (0, 1, k)) for k in range(2, n)])


def cyclic_group(n: int) -> PermutationGroup:
    if n == 1:
        return PermutationGroup(1)
    return PermutationGroup(n, [Permutation.from_cycles(n, tuple(range(n)))])


def dihedral_group(n: int) -> PermutationGroup:
    """Symmetries of the n-gon, of order 2n (n >= 3)."""
    rot = Permutation(tuple((i + 1) % n for i in range(n)))
    ref = Permutation(tuple((-i) % n for i in range(n)))
    return PermutationGroup(n, [rot, ref])


def klein_four() -> PermutationGroup:
    return PermutationGroup(4, [Permutation.from_cycles(4, (0, 1), (2, 3)),
                                Permutation.from_cycles(4, (0, 2), (1, 3))])


def direct_product(a: PermutationGroup, b: PermutationGroup) -> PermutationGroup:
    """a x b acting on the disjoint union of the two point sets."""
    n, m = a.degree, b.degree
    gens = [Permutation(g.images + tuple(range(n, n + m))) for g in a.generators]
    gens += [Permutation(tuple(range(n)) + tuple(n + j for j in h.images)) for h in b.generators]
    return PermutationGroup(n + m, gens)


def elementary_abelian_2(rank: int) -> PermutationGroup:
    g = cyclic_group(2)
    out = g
    for _ in range(rank - 1):
        out = direct_product(out, g)
    return out


def quaternion_group() -> PermutationGroup:
    """Q8 in its regular representation."""
    # units as (sign, axis) with axis 0..3 = 1, i, j, k
    table = {(1, 1): (-1, 0), (2, 2): (-1, 0), (3, 3): (-1, 0),
             (1, 2): (1, 3), (2, 3): (1, 1), (3, 1): (1, 2),
             (2, 1): (-1, 3), (3, 2): (-1, 1), (1, 3): (-1, 2)}

    def mul(x, y):
        (sx, ax), (sy, ay) = x, y
        if ax == 0:
            return sx * sy, ay
        if ay == 0:
            return sx * sy, ax
        s, a = table[(ax, ay)]
        return sx * sy * s, a

    units = [(s, a) for a, s in product(range(4), (1, -1))]
    index = {u: i for i, u in enumerate(units)}

    def left(u):
        return Permutation(tuple(index[mul(u, v)] for v in units))

    return PermutationGroup(8, [left((1, 1)), left((1, 2))])


def fixture_groups() -> dict[str, PermutationGroup]:
    """A spread of groups of order at most 24 used across the test suites."""
    return {
        "C1": PermutationGroup(1),
        "C2": cyclic_group(2),
        "C3": cyclic_group(3),
        "C4": cyclic_group(4),
        "V4": klein_four(),
        "C5": cyclic_group(5),
        "S3": symmetric_group(3),
        "C6": cyclic_group(6),
        "C7": cyclic_group(7),
        "D4": dihedral_group(4),
        "Q8": quaternion_group(),
        "C2xC4": direct_product(cyclic_group(2), cyclic_group(4)),
        "C2^3": elementary_abelian_2(3),
        "C8": cyclic_group(8),
        "C3xC3": direct_product(cyclic_group(3), cyclic_group(3)),
        "D5": dihedral_group(5),
        "A4": alternating_group(4),
        "D6": dihedral_group(6),
        "C2xS3": direct_product(cyclic_group(2), symmetric_group(3)),
        "D7": dihedral_group(7),
        "C2xD4": direct_product(cyclic_group(2), dihedral_group(4)),
        "C3xS3": direct_product(cyclic_group(3), symmetric_group(3)),
        "D10": dihedral_group(10),
        "S4": symmetric_group(4),
        "C2xA4": direct_product(cyclic_group(2), alternating_group(4)),
    }
