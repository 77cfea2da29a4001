"""Finite permutation groups by explicit element listing.

Groups here are small (the default cap is 10**5 elements), so everything is
done by closure and orbit enumeration rather than Schreier-Sims.  Elements and
class representatives are kept in lexicographic order of their image tuples so
that every derived output is reproducible.

Composition convention: ``(p * q)(i) == p(q(i))``, i.e. ``q`` acts first.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

DEFAULT_ORDER_CAP = 100_000


class GroupError(ValueError):
    """Raised for malformed permutations, subgroups or actions."""


class GroupTooLarge(GroupError):
    pass


@dataclass(frozen=True, order=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise GroupError(f"not a permutation of 0..{len(imgs) - 1}: {list(imgs)}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def _trusted(cls, images: tuple[int, ...]) -> Permutation:
        p = object.__new__(cls)
        object.__setattr__(p, "images", images)
        return p

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        return cls._trusted(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, degree: int, *cycles: Sequence[int]) -> Permutation:
        imgs = list(range(degree))
        seen: set[int] = set()
        for cyc in cycles:
            if seen.intersection(cyc) or len(set(cyc)) != len(cyc):
                raise GroupError(f"cycles are not disjoint: {cycles}")
            seen.update(cyc)
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                imgs[a] = b
        return cls(tuple(imgs))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: Permutation) -> Permutation:
        if other.degree != self.degree:
            raise GroupError("cannot compose permutations of different degree")
        mine = self.images
        return Permutation._trusted(tuple(mine[j] for j in other.images))

    def inverse(self) -> Permutation:
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation._trusted(tuple(inv))

    def conjugate_by(self, g: Permutation) -> Permutation:
        """Return ``g * self * g**-1``."""
        return g * self * g.inverse()

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def fixed_points(self) -> list[int]:
        return [i for i, j in enumerate(self.images) if i == j]

    def order(self) -> int:
        from math import lcm

        n = 1
        for c in self.cycles():
            n = lcm(n, len(c))
        return n

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its least point."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            j = self.images[start]
            while j != start:
                cyc.append(j)
                seen[j] = True
                j = self.images[j]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def to_list(self) -> list[int]:
        return list(self.images)

    def __repr__(self):
        cyc = self.cycles()
        if not cyc:
            return f"Permutation(id_{self.degree})"
        return "Permutation(" + "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) + ")"


def _closure(degree: int, gens: Sequence[Permutation], cap: int) -> list[Permutation]:
    ident = Permutation.identity(degree)
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = s * x
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise GroupTooLarge(f"group too large: more than {cap} elements")
                queue.append(y)
    return sorted(seen)


class PermutationGroup:
    """A permutation group of fixed degree given by generators.

    Equality is structural: two groups are equal when they have the same
    degree and the same element set, whatever generators were used.
    """

    def __init__(self, degree: int, generators: Iterable[Permutation | Sequence[int]] = (),
                 cap: int = DEFAULT_ORDER_CAP):
        if degree < 1:
            raise GroupError("degree must be positive")
        gens = []
        for g in generators:
            p = g if isinstance(g, Permutation) else Permutation(tuple(g))
            if p.degree != degree:
                raise GroupError(f"generator {p.to_list()} has degree {p.degree}, expected {degree}")
            gens.append(p)
        self.degree = degree
        self.generators: tuple[Permutation, ...] = tuple(gens)
        self.cap = cap

    @cached_property
    def elements(self) -> list[Permutation]:
        return _closure(self.degree, self.generators, self.cap)

    @cached_property
    def element_set(self) -> frozenset[Permutation]:
        return frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return self.order

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: Permutation) -> bool:
        return g.degree == self.degree and g in self.element_set

    def __eq__(self, other):
        if not isinstance(other, PermutationGroup):
            return NotImplemented
        return self.degree == other.degree and self.element_set == other.element_set

    def __hash__(self):
        return hash((self.degree, self.element_set))

    def __repr__(self):
        return f"PermutationGroup(degree={self.degree}, order={self.order})"

    @property
    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def check_member(self, g: Permutation, what: str = "element") -> None:
        if g not in self:
            raise GroupError(f"{what} {g.to_list()} does not lie in {self!r}")

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(a * b == b * a for a, b in combinations(gens, 2))

    def is_cyclic(self) -> bool:
        n = self.order
        return any(g.order() == n for g in self.elements)

    def conjugacy_class(self, g: Permutation) -> list[Permutation]:
        self.check_member(g)
        return list(self._classes[self._class_index[g]])

    def _conjugation_orbit(self, g: Permutation) -> list[Permutation]:
        seen = {g}
        queue = deque([g])
        while queue:
            x = queue.popleft()
            for s in self.generators:
                y = x.conjugate_by(s)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    @cached_property
    def _classes(self) -> tuple[tuple[Permutation, ...], ...]:
        done: set[Permutation] = set()
        classes = []
        for g in self.elements:  # sorted, so each class is met first at its least member
            if g in done:
                continue
            cls = self._conjugation_orbit(g)
            done.update(cls)
            classes.append(tuple(cls))
        return tuple(classes)

    @cached_property
    def _class_index(self) -> dict[Permutation, int]:
        return {g: i for i, cls in enumerate(self._classes) for g in cls}

    def class_representative(self, g: Permutation) -> Permutation:
        self.check_member(g)
        return self._classes[self._class_index[g]][0]

    def subgroup(self, generators: Iterable[Permutation | Sequence[int]]) -> SubgroupHandle:
        return SubgroupHandle(self, generators)

    def whole(self) -> SubgroupHandle:
        return SubgroupHandle(self, self.generators)

    def trivial_subgroup(self) -> SubgroupHandle:
        return SubgroupHandle(self, ())

    def cyclic_subgroups(self) -> list[SubgroupHandle]:
        seen: dict[frozenset, SubgroupHandle] = {}
        for g in self.elements:
            h = SubgroupHandle(self, [g])
            seen.setdefault(h.element_set, h)
        return sorted(seen.values(), key=lambda h: (h.order, h.elements))

    def all_subgroups(self) -> list[SubgroupHandle]:
        """Every subgroup, found by joining cyclic subgroups until stable."""
        cyclic = self.cyclic_subgroups()
        found: dict[frozenset, SubgroupHandle] = {h.element_set: h for h in cyclic}
        frontier = list(found.values())
        while frontier:
            new = []
            for h in frontier:
                for c in cyclic:
                    if c.element_set <= h.element_set:
                        continue
                    j = SubgroupHandle(self, h.generators + c.generators)
                    if j.element_set not in found:
                        found[j.element_set] = j
                        new.append(j)
            frontier = new
        return sorted(found.values(), key=lambda h: (h.order, h.elements))


def conjugacy_classes(group: PermutationGroup) -> list[list[Permutation]]:
    """Conjugacy classes, each sorted; the first member is the representative."""
    return [list(c) for c in group._classes]


def generate_elements(group: PermutationGroup) -> list[Permutation]:
    return list(group.elements)


class SubgroupHandle:
    """A subgroup of ``parent`` given by member generators."""

    def __init__(self, parent: PermutationGroup, generators: Iterable[Permutation | Sequence[int]]):
        gens = []
        for g in generators:
            p = g if isinstance(g, Permutation) else Permutation(tuple(g))
            parent.check_member(p, "subgroup generator")
            gens.append(p)
        self.parent = parent
        self.generators: tuple[Permutation, ...] = tuple(gens)

    @cached_property
    def group(self) -> PermutationGroup:
        return PermutationGroup(self.parent.degree, self.generators, cap=self.parent.cap)

    @property
    def elements(self) -> list[Permutation]:
        return self.group.elements

    @property
    def element_set(self) -> frozenset[Permutation]:
        return self.group.element_set

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def __contains__(self, g: Permutation) -> bool:
        return g in self.group

    def __eq__(self, other):
        if not isinstance(other, SubgroupHandle):
            return NotImplemented
        return self.group == other.group

    def __hash__(self):
        return hash(self.group)

    def __repr__(self):
        return f"SubgroupHandle(order={self.order}, index={self.index})"

    def is_whole(self) -> bool:
        return self.order == self.parent.order

    def normality_violation(self) -> tuple[Permutation, Permutation] | None:
        """A pair (s, h) with s h s^-1 outside the subgroup, or None if normal."""
        for s in self.parent.generators:
            for h in self.generators:
                if h.conjugate_by(s) not in self:
                    return s, h
        return None

    def is_normal(self) -> bool:
        return self.normality_violation() is None

    def conjugate(self, g: Permutation) -> SubgroupHandle:
        return SubgroupHandle(self.parent, [h.conjugate_by(g) for h in self.generators])


def extend_homomorphism(group: PermutationGroup, generator_images: Sequence[Permutation],
                        target_degree: int, what: str = "map") -> dict[Permutation, Permutation]:
    """Extend an assignment on generators to a homomorphism on all of ``group``.

    Raises GroupError if the assignment does not respect the relations.
    """
    if len(generator_images) != len(group.generators):
        raise GroupError(f"{what}: {len(generator_images)} images given for "
                         f"{len(group.generators)} generators")
    for p in generator_images:
        if p.degree != target_degree:
            raise GroupError(f"{what}: image {p.to_list()} is not of degree {target_degree}")
    table = {group.identity: Permutation.identity(target_degree)}
    queue = deque([group.identity])
    while queue:
        x = queue.popleft()
        fx = table[x]
        for s, fs in zip(group.generators, generator_images):
            y = s * x
            fy = fs * fx
            prev = table.get(y)
            if prev is None:
                table[y] = fy
                queue.append(y)
            elif prev != fy:
                raise GroupError(f"{what} is not a homomorphism: {y.to_list()} would map to "
                                 f"both {prev.to_list()} and {fy.to_list()}")
    return table


@dataclass(frozen=True)
class GroupAction:
    """A left action of ``group`` on ``{0, ..., size-1}``.

    ``generator_images[i]`` is the permutation of the set induced by
    ``group.generators[i]``.
    """

    group: PermutationGroup
    size: int
    generator_images: tuple[Permutation, ...]
    _table: dict = field(default=None, init=False, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self):
        if self.size < 1:
            raise GroupError("action set must be nonempty")
        imgs = tuple(p if isinstance(p, Permutation) else Permutation(tuple(p))
                     for p in self.generator_images)
        for p in imgs:
            if p.degree != self.size:
                raise GroupError(f"action image {p.to_list()} does not permute {self.size} points")
        object.__setattr__(self, "generator_images", imgs)
        table = extend_homomorphism(self.group, imgs, self.size, "group action")
        object.__setattr__(self, "_table", table)

    def __call__(self, g: Permutation) -> Permutation:
        try:
            return self._table[g]
        except KeyError:
            raise GroupError(f"{g.to_list()} is not in the acting group") from None

    def is_transitive(self) -> bool:
        orbit = {0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for p in self.generator_images:
                j = p(i)
                if j not in orbit:
                    orbit.add(j)
                    queue.append(j)
        return len(orbit) == self.size

    def restrict(self, sub: PermutationGroup) -> GroupAction:
        """The action of a subgroup of ``group`` (given as a group) on the same set."""
        return GroupAction(sub, self.size, tuple(self(g) for g in sub.generators))


def has_fixed_point(g: Permutation, action: GroupAction) -> bool:
    return any(i == j for i, j in enumerate(action(g).images))


def left_cosets(group: PermutationGroup, h: SubgroupHandle) -> list[frozenset[Permutation]]:
    """Left cosets gH ordered by their least element."""
    if h.parent != group and not h.element_set <= group.element_set:
        raise GroupError("subgroup is not contained in the group")
    hs = h.elements
    seen: set[Permutation] = set()
    cosets = []
    for g in group.elements:
        if g in seen:
            continue
        c = frozenset(g * x for x in hs)
        seen |= c
        cosets.append(c)
    return cosets


def coset_action(group: PermutationGroup, h: SubgroupHandle) -> GroupAction:
    """Left translation action of ``group`` on its left cosets of ``h``."""
    if not h.element_set <= group.element_set:
        raise GroupError("subgroup is not contained in the group")
    cosets = left_cosets(group, h)
    where = {g: i for i, c in enumerate(cosets) for g in c}
    reps = [min(c) for c in cosets]
    imgs = tuple(Permutation._trusted(tuple(where[s * r] for r in reps)) for s in group.generators)
    return GroupAction(group, len(cosets), imgs)


def quotient_by_normal(group: PermutationGroup, n: SubgroupHandle
                       ) -> tuple[PermutationGroup, dict[Permutation, Permutation]]:
    """The quotient ``group / n`` realised on the cosets of ``n``, with the projection."""
    if not n.element_set <= group.element_set:
        raise GroupError("subgroup is not contained in the group")
    for s in group.generators:
        for h in n.generators:
            c = h.conjugate_by(s)
            if c not in n:
                raise GroupError(f"subgroup is not normal: conjugating {h.to_list()} by "
                                 f"{s.to_list()} gives {c.to_list()}")
    act = coset_action(group, n)
    q = PermutationGroup(act.size, act.generator_images, cap=group.cap)
    proj = {g: act(g) for g in group.elements}
    return q, proj


def disjoint_union(actions: Sequence[GroupAction]) -> GroupAction:
    """Disjoint union of actions of one group, blocks laid out in order."""
    if not actions:
        raise GroupError("need at least one action")
    group = actions[0].group
    size = sum(a.size for a in actions)
    imgs = []
    for k in range(len(group.generators)):
        out: list[int] = []
        off = 0
        for a in actions:
            out.extend(off + j for j in a.generator_images[k].images)
            off += a.size
        imgs.append(Permutation._trusted(tuple(out)))
    return GroupAction(group, size, tuple(imgs))

