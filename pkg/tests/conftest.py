import random
import sys

from pseudosplit.fans import SmoothKatoFan, star_subdivision
from pseudosplit.frobenian import GaloisSetup
from pseudosplit.groups import (
    cyclic_group,
    direct_product,
    fixture_groups,
    klein_four,
    symmetric_group,
)
from pseudosplit.perm_core import GroupAction, Permutation


FIXTURE_GROUPS = fixture_groups()


def perm(*images):
    return Permutation(tuple(images))


# --- Galois setups ---------------------------------------------------------

def klein_setup():
    """Lambda = V4 = <a, b>, Gamma = G = <b>, N trivial, b swaps the two fiber points."""
    lam = klein_four()
    a, b = lam.generators
    g = cyclic_group(2)
    return GaloisSetup(lam, lam.subgroup([b]), g, g.trivial_subgroup(), [b],
                       GroupAction(g, 2, (perm(1, 0),)))


def s3_natural_setup():
    s3 = symmetric_group(3)
    return GaloisSetup(s3, s3.whole(), s3, s3.trivial_subgroup(), s3.generators,
                       GroupAction(s3, 3, s3.generators))


def s3_in_s3xc2_setup():
    """Lambda = S3 x C2 with Gamma the S3 factor; G = S3 acting naturally."""
    s3 = symmetric_group(3)
    lam = direct_product(s3, cyclic_group(2))
    emb = [Permutation(g.images + (3, 4)) for g in s3.generators]
    return GaloisSetup(lam, lam.subgroup(emb), s3, s3.trivial_subgroup(), emb,
                       GroupAction(s3, 3, s3.generators))


def s3xc2_over_s3_setup():
    """G = S3 x C2 acting on 5 points, N = the C2 factor, Gamma = Lambda = S3.

    An element (sigma, tau) fixes a point unless sigma is a 3-cycle and tau
    is the swap, so s takes the value 1/2 on 3-cycles.
    """
    s3 = symmetric_group(3)
    g = direct_product(s3, cyclic_group(2))
    n = g.subgroup([perm(0, 1, 2, 4, 3)])
    quot = [Permutation(p.images[:3]) for p in g.generators]
    return GaloisSetup(s3, s3.whole(), g, n, quot, GroupAction(g, 5, g.generators))


def empty_fiber_setup():
    s3 = symmetric_group(3)
    return GaloisSetup(s3, s3.whole(), s3, s3.trivial_subgroup(), s3.generators, None)


NAMED_SETUPS = {
    "klein": klein_setup,
    "s3_natural": s3_natural_setup,
    "s3_in_s3xc2": s3_in_s3xc2_setup,
    "s3xc2_over_s3": s3xc2_over_s3_setup,
}


# --- random smooth fans ----------------------------------------------------

def _orthant(d):
    return SmoothKatoFan(d, [[int(i == k) for k in range(d)] for i in range(d)], [list(range(d))])


BASE_FANS = {
    "N1": lambda: _orthant(1),
    "N2": lambda: _orthant(2),
    "N3": lambda: _orthant(3),
    "P1": lambda: SmoothKatoFan(1, [[1], [-1]], [[0], [1]]),
    "P2": lambda: SmoothKatoFan(2, [[1, 0], [0, 1], [-1, -1]], [[0, 1], [1, 2], [0, 2]]),
    "P1xP1": lambda: SmoothKatoFan(2, [[1, 0], [0, 1], [-1, 0], [0, -1]],
                                   [[0, 1], [1, 2], [2, 3], [0, 3]]),
    "P3": lambda: SmoothKatoFan(3, [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]],
                                [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]),
}


def _random_unimodular(rng, d):
    m = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(3 * d):
        i, j = rng.sample(range(d), 2) if d > 1 else (0, 0)
        if i == j:
            break
        c = rng.choice([-1, 1])
        for k in range(d):
            m[k][j] += c * m[k][i]  # column operation
    if rng.random() < 0.5:
        for k in range(d):
            m[k][0] = -m[k][0]
    return m


def _transform(m, v):
    return [sum(m[i][k] * v[k] for k in range(len(v))) for i in range(len(v))]


def random_smooth_fan(rng, max_cones=4):
    """A random fan of rank <= 3 with at most ``max_cones`` maximal cones.

    Start from a small complete or affine toric fan, star subdivide a few
    times, keep a random subset of maximal cones, renumber the
    rays that remain and apply a random GL(d, Z) change of coordinates.
    """
    f = BASE_FANS[rng.choice(sorted(BASE_FANS))]()
    for _ in range(rng.randint(0, 2)):
        centers = [c for c in f.faces if len(c) >= 2]
        if not centers:
            break
        f = star_subdivision(f, rng.choice(centers)).refined
    cones = list(f.maximal_cones)
    rng.shuffle(cones)
    keep = cones[:rng.randint(1, max_cones)]
    used = sorted({i for c in keep for i in c})
    new = {old: k for k, old in enumerate(used)}
    g = _random_unimodular(rng, f.dim)
    rays = [_transform(g, f.rays[i]) for i in used]
    return SmoothKatoFan(f.dim, rays, [[new[i] for i in c] for c in keep])


def random_fans(seed, count):
    rng = random.Random(seed)
    return [random_smooth_fan(rng) for _ in range(count)]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
