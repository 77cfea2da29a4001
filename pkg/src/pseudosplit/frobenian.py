"""s-invariants and frobenian densities on finite Galois data.

A place v of the base field enters only through the conjugacy class of its
Frobenius in Lambda, so every function of v here is a class function on
Lambda.  Places ramified in the top field are outside the model; the values
below describe the unramified ones.  All arithmetic is exact.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .etale import EtaleAlgebraDescriptor
from .perm_core import (
    GroupAction,
    GroupError,
    Permutation,
    PermutationGroup,
    SubgroupHandle,
    conjugacy_classes,
    extend_homomorphism,
    has_fixed_point,
)


class GaloisSetup:
    """The tower k in K in L with groups G = Gal(L/K), N, Gamma = G/N inside Lambda.

    ``quotient_images[i]`` is the image in Lambda of ``g_group.generators[i]``;
    the induced map G -> Lambda must have kernel N and image Gamma.
    ``fiber`` is the G-action on the geometric components I(L), or None for an
    empty fiber.
    """

    def __init__(self, lam: PermutationGroup, gamma: SubgroupHandle, g_group: PermutationGroup,
                 n: SubgroupHandle, quotient_images: Sequence[Permutation],
                 fiber: GroupAction | None, label: str | None = None):
        if not gamma.element_set <= lam.element_set:
            raise GroupError("Gamma is not a subgroup of Lambda")
        if not n.element_set <= g_group.element_set:
            raise GroupError("N is not a subgroup of G")
        bad = next(((s, h) for s in g_group.generators for h in n.generators
                    if h.conjugate_by(s) not in n), None)
        if bad is not None:
            s, h = bad
            raise GroupError(f"N is not normal in G: conjugating {h.to_list()} by {s.to_list()} leaves N")
        for p in quotient_images:
            if p not in lam:
                raise GroupError(f"quotient image {p.to_list()} is not in Lambda")
        proj = extend_homomorphism(g_group, list(quotient_images), lam.degree, "quotient map")
        kernel = frozenset(g for g, q in proj.items() if q.is_identity())
        if kernel != n.element_set:
            raise GroupError(f"kernel of the quotient map has order {len(kernel)}, but |N| = {n.order}")
        if frozenset(proj.values()) != gamma.element_set:
            raise GroupError("image of the quotient map is not Gamma")
        if fiber is not None and fiber.group != g_group:
            raise GroupError("fiber action is not an action of G")
        self.lam = lam
        self.gamma = gamma
        self.g_group = g_group
        self.n = n
        self.quotient_images = tuple(quotient_images)
        self.projection: dict[Permutation, Permutation] = proj
        self.fiber = fiber
        self.label = label

    @classmethod
    def from_algebra(cls, d: EtaleAlgebraDescriptor, label: str | None = None) -> GaloisSetup:
        """Geometrically irreducible base with N trivial: Lambda = Gamma = G."""
        g = d.group
        return cls(g, g.whole(), g, g.trivial_subgroup(), g.generators, d.action, label)

    @property
    def empty_fiber(self) -> bool:
        return self.fiber is None

    @cached_property
    def fixing_elements(self) -> frozenset[Permutation]:
        """Elements of G acting with a fixed point on the fiber."""
        if self.fiber is None:
            return frozenset()
        return frozenset(g for g in self.g_group.elements if has_fixed_point(g, self.fiber))

    @cached_property
    def _fixing_over(self) -> Counter:
        """gamma -> #{g in G : g mod N = gamma, g has a fixed point}."""
        return Counter(self.projection[g] for g in self.fixing_elements)

    def __repr__(self):
        name = f" {self.label!r}" if self.label else ""
        return (f"GaloisSetup{name}(|Lambda|={self.lam.order}, |Gamma|={self.gamma.order}, "
                f"|G|={self.g_group.order}, |N|={self.n.order}, "
                f"fiber={'empty' if self.fiber is None else self.fiber.size})")


class ClassFunction:
    """An exact rational function on a group, constant on conjugacy classes."""

    def __init__(self, group: PermutationGroup, values: Mapping[Permutation, Fraction]):
        if set(values) != {c[0] for c in conjugacy_classes(group)}:
            raise ValueError("a class function needs exactly one value per conjugacy class")
        self.group = group
        self.values: dict[Permutation, Fraction] = {r: Fraction(values[r]) for r in sorted(values)}

    def __call__(self, g: Permutation) -> Fraction:
        return self.values[self.group.class_representative(g)]

    def items(self):
        return self.values.items()

    @classmethod
    def from_function(cls, group: PermutationGroup, f) -> ClassFunction:
        return cls(group, {c[0]: Fraction(f(c[0])) for c in conjugacy_classes(group)})


@dataclass(frozen=True)
class SInvariantProfile:
    setup: GaloisSetup
    values: ClassFunction
    empty_fiber: bool

    def to_json(self) -> dict:
        return {
            "empty_fiber": self.empty_fiber,
            "classes": [
                {"representative": r.to_list(),
                 "size": len(self.setup.lam.conjugacy_class(r)),
                 "s": fraction_str(v)}
                for r, v in self.values.items()
            ],
        }


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def conjugacy_saturation(h: PermutationGroup, z: Iterable[Permutation]
                         ) -> tuple[frozenset[Permutation], list[Permutation]]:
    """C_H(Z) and one representative per H-class inside it."""
    z = list(z)
    for x in z:
        h.check_member(x)
    reps = sorted({h.class_representative(x) for x in z})
    sat = frozenset(y for r in reps for y in h.conjugacy_class(r))
    return sat, reps


def _frobenius_locus(setup: GaloisSetup, lam_elt: Permutation) -> frozenset[Permutation]:
    """C_Lambda(lam_elt) intersected with Gamma."""
    setup.lam.check_member(lam_elt, "Lambda class representative")
    cls = setup.lam.conjugacy_class(lam_elt)
    return frozenset(x for x in cls if x in setup.gamma)


def s_value(setup: GaloisSetup, lam_elt: Permutation) -> Fraction:
    z = _frobenius_locus(setup, lam_elt)
    if setup.empty_fiber:
        return Fraction(0)
    if not z:
        return Fraction(1)
    gamma = setup.gamma.group
    _, reps = conjugacy_saturation(gamma, z)
    over = setup._fixing_over
    n = setup.n.order
    total = Fraction(0)
    for r in reps:
        cls = gamma.conjugacy_class(r)
        hits = sum(over[c] for c in cls)
        total += Fraction(hits, len(cls) * n)
    return total / len(reps)


def s_profile(setup: GaloisSetup) -> SInvariantProfile:
    vals = {c[0]: s_value(setup, c[0]) for c in conjugacy_classes(setup.lam)}
    return SInvariantProfile(setup, ClassFunction(setup.lam, vals), setup.empty_fiber)


def s_lt_one_witness(setup: GaloisSetup, lam_elt: Permutation) -> Permutation | None:
    """Least g in G with no fixed point on the fiber and g mod N in C_Lambda(lam_elt) & Gamma."""
    if setup.empty_fiber:
        raise ValueError("s_lt_one_witness needs a nonempty fiber")
    z = _frobenius_locus(setup, lam_elt)
    for g in setup.g_group.elements:
        if setup.projection[g] in z and g not in setup.fixing_elements:
            return g
    return None


def mean(f: ClassFunction) -> Fraction:
    grp = f.group
    total = sum((len(grp.conjugacy_class(r)) * v for r, v in f.items()), Fraction(0))
    return total / grp.order


def density_s_eq_1(setup: GaloisSetup) -> Fraction:
    if setup.empty_fiber:
        raise ValueError("density of {s = 1} is only defined for a nonempty fiber")
    lam = setup.lam
    good = 0
    for cls in conjugacy_classes(lam):
        z = _frobenius_locus(setup, cls[0])
        if all(g in setup.fixing_elements for g in setup.g_group.elements
               if setup.projection[g] in z):
            good += len(cls)
    return Fraction(good, lam.order)


def delta(setup: GaloisSetup) -> Fraction:
    if setup.empty_fiber:
        raise ValueError("delta is only defined for a nonempty fiber")
    return Fraction(len(setup.fixing_elements), setup.g_group.order)


def is_pseudo_split_via_s(setup: GaloisSetup) -> bool:
    if setup.empty_fiber:
        return False
    by_profile = all(v == 1 for _, v in s_profile(setup).values.items())
    by_group = len(setup.fixing_elements) == setup.g_group.order
    if by_profile != by_group:
        raise AssertionError(f"s-profile and fixed-point routes disagree for {setup!r}")
    return by_group


def _common_lambda(strata: Sequence[GaloisSetup], lam: PermutationGroup | None) -> PermutationGroup:
    if lam is None:
        if not strata:
            raise ValueError("an ambient Lambda is required when there are no strata")
        lam = strata[0].lam
    for i, st in enumerate(strata):
        if st.lam != lam:
            raise GroupError(f"stratum {i} does not share the ambient Lambda")
    return lam


def predict_surjectivity(strata: Sequence[GaloisSetup], lam_elt: Permutation,
                         lam: PermutationGroup | None = None) -> bool:
    """True iff every stratum has s = 1 at the class of ``lam_elt``."""
    if strata or lam is not None:
        amb = _common_lambda(strata, lam)
        amb.check_member(lam_elt, "Lambda class representative")
    return all(s_value(st, lam_elt) == 1 for st in strata)


def surjectivity_set(strata: Sequence[GaloisSetup], lam: PermutationGroup | None = None
                     ) -> tuple[list[Permutation], Fraction]:
    """Classes of Lambda where every stratum has s = 1, and their density."""
    amb = _common_lambda(strata, lam)
    reps = []
    weight = 0
    for cls in conjugacy_classes(amb):
        if all(s_value(st, cls[0]) == 1 for st in strata):
            reps.append(cls[0])
            weight += len(cls)
    return reps, Fraction(weight, amb.order)
