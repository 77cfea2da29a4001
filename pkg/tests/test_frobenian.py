from collections import deque
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations_with_replacement

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudosplit.etale import EtaleAlgebraDescriptor, is_pseudo_split
from pseudosplit.frobenian import (
    ClassFunction,
    GaloisSetup,
    conjugacy_saturation,
    delta,
    density_s_eq_1,
    is_pseudo_split_via_s,
    mean,
    predict_surjectivity,
    s_lt_one_witness,
    s_profile,
    s_value,
    surjectivity_set,
)
from pseudosplit.groups import cyclic_group, direct_product, klein_four, symmetric_group
from pseudosplit.perm_core import (
    GroupAction,
    GroupError,
    Permutation,
    conjugacy_classes,
    quotient_by_normal,
)

from conftest import (
    FIXTURE_GROUPS,
    NAMED_SETUPS,
    empty_fiber_setup,
    klein_setup,
    perm,
    s3_natural_setup,
)


# --- brute-force oracle -------------------------------------------------------

def word_images(group, targets):
    """Map each element of ``group`` to the product of ``targets`` along a generator word."""
    ident = Permutation.identity(targets[0].degree) if targets else None
    out = {group.identity: ident}
    queue = deque([group.identity])
    while queue:
        x = queue.popleft()
        for s, t in zip(group.generators, targets):
            y = s * x
            if y not in out:
                out[y] = t * out[x]
                queue.append(y)
    return out


def brute_s(setup, lam_elt):
    """s at a place with Frobenius class lam_elt, counted place by place.

    Places w of the intermediate field over v correspond to Gamma-classes in
    the Lambda-class of Frobenius that meet Gamma.  Each w contributes the
    proportion of its Frobenius lifts in G that fix a component.
    """
    if setup.fiber is None:
        return Fraction(0)
    lam = setup.lam.elements
    gamma = set(setup.gamma.elements)
    locus = {m * lam_elt * m.inverse() for m in lam} & gamma
    if not locus:
        return Fraction(1)
    places = []
    left = set(locus)
    while left:
        z = min(left)
        c = {y * z * y.inverse() for y in gamma}
        places.append(c)
        left -= c
    proj = word_images(setup.g_group, list(setup.quotient_images))
    fib = word_images(setup.g_group, list(setup.fiber.generator_images))
    n = sum(1 for g in setup.g_group.elements if proj[g].is_identity())
    total = Fraction(0)
    for c in places:
        lifts = [g for g in setup.g_group.elements if proj[g] in c]
        fixing = sum(1 for g in lifts if any(i == j for i, j in enumerate(fib[g].images)))
        assert len(lifts) == len(c) * n
        total += Fraction(fixing, len(lifts))
    return total / len(places)


# --- setup generators ---------------------------------------------------------

def setup_from_quotient(g, n, comps, widen=False):
    """Lambda = G/N (optionally times C2), Gamma = the copy of G/N, fiber from ``comps``."""
    q, proj = quotient_by_normal(g, n)
    if widen:
        lam = direct_product(q, cyclic_group(2))
        emb = lambda p: Permutation(p.images + (q.degree, q.degree + 1))  # noqa: E731
    else:
        lam, emb = q, (lambda p: p)
    quot = [emb(proj[s]) for s in g.generators]
    gamma = lam.subgroup(quot)
    fiber = EtaleAlgebraDescriptor(g, comps).action
    return GaloisSetup(lam, gamma, g, n, quot, fiber)


def sampled_setups(limit_order=12):
    out = []
    for name, g in FIXTURE_GROUPS.items():
        if g.order > limit_order or g.order == 1:
            continue
        subs = g.all_subgroups()
        normals = [h for h in subs if h.is_normal()]
        proper = [h for h in subs if h.order < g.order]
        for k, n in enumerate(normals[:3]):
            comps = [proper[(k + j) % len(proper)] for j in range(1 + k % 2)]
            out.append(setup_from_quotient(g, n, comps, widen=bool(k % 2)))
    return out


SAMPLED = sampled_setups()


def algebra_setups():
    out = []
    for name, g in FIXTURE_GROUPS.items():
        subs = g.all_subgroups()
        for comps in combinations_with_replacement(range(len(subs)), 2):
            out.append(GaloisSetup.from_algebra(EtaleAlgebraDescriptor(g, [subs[i] for i in comps])))
            if len(out) % 7 == 0:
                break
    return out


# --- validation of setups ---------------------------------------------------------

def test_setup_rejects_bad_data():
    s3 = symmetric_group(3)
    nat = GroupAction(s3, 3, s3.generators)
    with pytest.raises(GroupError, match="not normal"):
        GaloisSetup(s3, s3.whole(), s3, s3.subgroup([perm(1, 0, 2)]), s3.generators, nat)
    c2 = cyclic_group(2)
    with pytest.raises(GroupError, match="kernel"):
        GaloisSetup(s3, s3.whole(), s3, s3.trivial_subgroup(), [perm(1, 0, 2), perm(0, 1, 2)], nat)
    with pytest.raises(GroupError, match="image"):
        GaloisSetup(s3, s3.whole(), c2, c2.trivial_subgroup(), [perm(1, 0, 2)],
                    GroupAction(c2, 2, (perm(1, 0),)))
    with pytest.raises(GroupError, match="Lambda"):
        GaloisSetup(c2, s3.whole(), s3, s3.trivial_subgroup(), s3.generators, nat)
    with pytest.raises(GroupError, match="homomorphism"):
        GaloisSetup(s3, s3.whole(), s3, s3.trivial_subgroup(), [perm(1, 0, 2), perm(1, 0, 2)], nat)
    with pytest.raises(GroupError, match="fiber"):
        GaloisSetup(s3, s3.whole(), s3, s3.trivial_subgroup(), s3.generators,
                    GroupAction(c2, 2, (perm(1, 0),)))


def test_class_function():
    s3 = symmetric_group(3)
    f = ClassFunction.from_function(s3, lambda g: int(g.is_identity()))
    assert mean(f) == Fraction(1, 6)
    assert all(f(x) == f(s3.class_representative(x)) for x in s3.elements)
    assert mean(ClassFunction.from_function(s3, lambda g: 1)) == 1
    with pytest.raises(ValueError):
        ClassFunction(s3, {s3.identity: Fraction(1)})


# --- worked examples ------------------------------------------------------

def test_conjugacy_saturation_examples():
    v = klein_four()
    x = v.generators[0]
    assert conjugacy_saturation(v, [x]) == (frozenset([x]), [x])
    s3 = symmetric_group(3)
    sat, reps = conjugacy_saturation(s3, [perm(1, 0, 2)])
    assert sat == {perm(1, 0, 2), perm(2, 1, 0), perm(0, 2, 1)} and len(reps) == 1
    assert conjugacy_saturation(s3, []) == (frozenset(), [])
    with pytest.raises(GroupError):
        conjugacy_saturation(s3, [perm(1, 0, 2, 3)])


def test_klein_example():
    st_ = klein_setup()
    a, b = st_.lam.generators
    e = st_.lam.identity
    assert (s_value(st_, b), s_value(st_, a), s_value(st_, e), s_value(st_, a * b)) == (0, 1, 1, 1)
    assert density_s_eq_1(st_) == Fraction(3, 4)
    assert delta(st_) == Fraction(1, 2)
    assert mean(s_profile(st_).values) == Fraction(3, 4)
    assert s_lt_one_witness(st_, b) == st_.g_group.generators[0]
    assert s_lt_one_witness(st_, a) is None
    assert not is_pseudo_split_via_s(st_)


def test_s3_natural_example():
    st_ = s3_natural_setup()
    assert s_value(st_, perm(1, 2, 0)) == 0
    assert s_value(st_, perm(1, 0, 2)) == 1
    assert s_value(st_, perm(0, 1, 2)) == 1
    assert density_s_eq_1(st_) == Fraction(2, 3)
    assert delta(st_) == Fraction(2, 3)
    assert s_lt_one_witness(st_, perm(1, 2, 0)) == perm(1, 2, 0)


def test_split_and_empty_fiber_examples():
    s3 = symmetric_group(3)
    split = GaloisSetup.from_algebra(EtaleAlgebraDescriptor(s3, [s3.subgroup([perm(1, 0, 2)]), s3.whole()]))
    assert all(v == 1 for _, v in s_profile(split).values.items())
    assert density_s_eq_1(split) == 1 and delta(split) == 1
    assert all(s_lt_one_witness(split, x) is None for x in s3.elements)

    empty = empty_fiber_setup()
    prof = s_profile(empty)
    assert prof.empty_fiber and all(v == 0 for _, v in prof.values.items())
    assert not is_pseudo_split_via_s(empty)
    for fn in (density_s_eq_1, delta):
        with pytest.raises(ValueError):
            fn(empty)


def test_d3_lifted_is_pseudo_split_via_s():
    s3 = symmetric_group(3)
    d = EtaleAlgebraDescriptor(s3, [s3.subgroup([perm(1, 2, 0)]), s3.subgroup([perm(1, 0, 2)])])
    st_ = GaloisSetup.from_algebra(d)
    assert is_pseudo_split_via_s(st_)
    assert density_s_eq_1(st_) == 1


def test_nontrivial_kernel_gives_half():
    st_ = NAMED_SETUPS["s3xc2_over_s3"]()
    assert s_value(st_, perm(1, 2, 0)) == Fraction(1, 2)
    assert mean(s_profile(st_).values) == Fraction(5, 6)
    # {s = 1} is everything but the 3-cycles
    assert density_s_eq_1(st_) == Fraction(2, 3)


def test_unramified_convention_outside_gamma():
    st_ = NAMED_SETUPS["s3_in_s3xc2"]()
    for c in conjugacy_classes(st_.lam):
        if c[0].images[3] == 4:  # nontrivial C2 part: class misses Gamma
            assert s_value(st_, c[0]) == 1


def test_profile_json():
    js = s_profile(klein_setup()).to_json()
    assert js["empty_fiber"] is False
    assert [c["s"] for c in js["classes"]] == ["1/1", "1/1", "0/1", "1/1"]


def test_prediction_examples():
    k = klein_setup()
    a, b = k.lam.generators
    assert predict_surjectivity([], b, lam=k.lam)
    assert predict_surjectivity([], b)
    assert not predict_surjectivity([k], b)
    assert predict_surjectivity([k], a)
    reps, dens = surjectivity_set([k])
    assert reps == [k.lam.identity, a, a * b] and dens == Fraction(3, 4)
    assert surjectivity_set([k, k]) == (reps, dens)

    split = GaloisSetup(k.lam, k.gamma, k.g_group, k.n, k.quotient_images,
                        GroupAction(k.g_group, 1, (perm(0),)))
    assert all(predict_surjectivity([split], x) for x in k.lam.elements)
    assert surjectivity_set([k, split]) == (reps, dens)


def test_prediction_needs_common_lambda():
    with pytest.raises(GroupError):
        predict_surjectivity([klein_setup(), s3_natural_setup()], perm(0, 1, 2, 3))
    with pytest.raises(ValueError):
        surjectivity_set([])


# --- properties -----------------------------------------------------------------

ALL_SETUPS = [f() for f in NAMED_SETUPS.values()] + SAMPLED


@pytest.mark.parametrize("setup", ALL_SETUPS, ids=lambda s: repr(s))
def test_s_matches_place_level_oracle(setup):
    for c in conjugacy_classes(setup.lam):
        assert s_value(setup, c[0]) == brute_s(setup, c[0])


@pytest.mark.parametrize("setup", ALL_SETUPS, ids=lambda s: repr(s))
def test_s_range_denominator_and_class_invariance(setup):
    for lam_elt in setup.lam.elements:
        s = s_value(setup, lam_elt)
        assert 0 <= s <= 1
        locus = {x for x in setup.lam.conjugacy_class(lam_elt) if x in setup.gamma}
        k = len(conjugacy_saturation(setup.gamma.group, locus)[1]) or 1
        assert (setup.n.order * setup.lam.order * k) % s.denominator == 0
        for mu in setup.lam.elements:
            assert s_value(setup, mu * lam_elt * mu.inverse()) == s


@pytest.mark.parametrize("setup", ALL_SETUPS, ids=lambda s: repr(s))
def test_mean_witness_and_density(setup):
    prof = s_profile(setup)
    brute = sum((s_value(setup, x) for x in setup.lam.elements), Fraction(0)) / setup.lam.order
    assert mean(prof.values) == brute
    for r, v in prof.values.items():
        assert (s_lt_one_witness(setup, r) is not None) == (v < 1)
    ones = sum(1 for x in setup.lam.elements if s_value(setup, x) == 1)
    assert density_s_eq_1(setup) == Fraction(ones, setup.lam.order)
    assert is_pseudo_split_via_s(setup) == (density_s_eq_1(setup) == 1)


def test_delta_comparison_when_lambda_is_gamma():
    for st_ in algebra_setups():
        assert mean(s_profile(st_).values) == delta(st_)


def test_via_s_agrees_with_descriptor():
    for st_ in algebra_setups():
        d_split = all(any(i == j for i, j in enumerate(st_.fiber(g).images)) for g in st_.g_group.elements)
        assert is_pseudo_split_via_s(st_) == d_split


def test_parallel_profile_matches_sequential():
    st_ = NAMED_SETUPS["s3xc2_over_s3"]()
    reps = [c[0] for c in conjugacy_classes(st_.lam)]
    seq = [s_value(st_, r) for r in reps]
    with ThreadPoolExecutor(4) as ex:
        par = list(ex.map(lambda r: s_value(st_, r), reps))
    assert par == seq


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(range(len(SAMPLED))), min_size=1, max_size=3), st.data())
def test_surjectivity_set_is_intersection(idx, data):
    base = SAMPLED[idx[0]]
    strata = [base] + [s for s in (SAMPLED[i] for i in idx[1:]) if s.lam == base.lam]
    reps, dens = surjectivity_set(strata)
    ind = ClassFunction.from_function(
        base.lam, lambda x: int(all(s_value(s, x) == 1 for s in strata)))
    assert dens == mean(ind)
    assert set(reps) == {r for r, v in ind.items() if v == 1}
    x = data.draw(st.sampled_from(base.lam.elements))
    assert predict_surjectivity(strata, x) == (base.lam.class_representative(x) in reps)
