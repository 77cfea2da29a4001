"""Finite etale algebras through their Galois shadows.

An algebra ``A = k_1 + ... + k_n`` splitting over a Galois extension with group
G is recorded as G together with the stabilisers H_i of its factors.  Its
geometric points form the G-set ``G/H_1 + ... + G/H_n``; split and
pseudo-split are statements about fixed points on that set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .perm_core import (
    GroupAction,
    GroupError,
    Permutation,
    PermutationGroup,
    SubgroupHandle,
    coset_action,
    disjoint_union,
    has_fixed_point,
)


class EtaleAlgebraDescriptor:
    def __init__(self, group: PermutationGroup, components: Sequence[SubgroupHandle]):
        if not components:
            raise GroupError("an etale algebra descriptor needs at least one component")
        for i, h in enumerate(components):
            if not h.element_set <= group.element_set:
                raise GroupError(f"component {i} is not a subgroup of the Galois group")
        self.group = group
        self.components: tuple[SubgroupHandle, ...] = tuple(components)

    @cached_property
    def blocks(self) -> tuple[GroupAction, ...]:
        return tuple(coset_action(self.group, h) for h in self.components)

    @cached_property
    def action(self) -> GroupAction:
        """The G-action on the disjoint union of the coset spaces."""
        return disjoint_union(self.blocks)

    @property
    def dimension(self) -> int:
        return self.action.size

    def __repr__(self):
        return f"EtaleAlgebraDescriptor(|G|={self.group.order}, degrees={component_degrees(self)})"


@dataclass(frozen=True)
class SplitnessReport:
    is_split: bool
    is_pseudo_split: bool
    uncovered: tuple[Permutation, ...]
    fixed_component: int | None

    def to_json(self) -> dict:
        return {
            "split": self.is_split,
            "pseudo_split": self.is_pseudo_split,
            "uncovered": [g.to_list() for g in self.uncovered],
            "fixed_component": self.fixed_component,
        }


def _fixed_component(d: EtaleAlgebraDescriptor) -> int | None:
    for i, h in enumerate(d.components):
        if h.order == d.group.order:
            return i
    return None


def is_split(d: EtaleAlgebraDescriptor) -> bool:
    return _fixed_component(d) is not None


def is_pseudo_split(d: EtaleAlgebraDescriptor) -> SplitnessReport:
    act = d.action
    uncovered = tuple(g for g in d.group.elements if not has_fixed_point(g, act))
    fixed = _fixed_component(d)
    return SplitnessReport(fixed is not None, not uncovered, uncovered, fixed)


def covered_by_conjugates(d: EtaleAlgebraDescriptor) -> bool:
    """Whether G is the union of the conjugates of the H_i.

    Same answer as ``is_pseudo_split`` but computed from stabilisers rather
    than from the action.
    """
    union: set[Permutation] = set()
    for h in d.components:
        for g in d.group.elements:
            union.update(x.conjugate_by(g) for x in h.elements)
    return len(union) == d.group.order


def algebra_from_covering(lam: PermutationGroup, subgroups: Sequence[SubgroupHandle]) -> EtaleAlgebraDescriptor:
    return EtaleAlgebraDescriptor(lam, subgroups)


def component_degrees(d: EtaleAlgebraDescriptor) -> list[int]:
    return [d.group.order // h.order for h in d.components]
